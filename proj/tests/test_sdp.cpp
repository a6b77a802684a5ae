#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rvopt/poly.hpp"
#include "rvopt/sdp.hpp"

using namespace rvopt;

namespace {

// min y s.t. [[y, 1], [1, y]] PSD  ->  y* = 1
SdpProblem two_by_two() {
  SdpProblem p;
  p.num_vars = 1;
  p.objective = {1.0};
  SdpBlock b;
  b.size = 2;
  b.entries.push_back({SdpEntry::kConstTerm, 0, 1, 1.0});
  b.entries.push_back({0, 0, 0, 1.0});
  b.entries.push_back({0, 1, 1, 1.0});
  p.blocks.push_back(b);
  return p;
}

// min y1 + y2 s.t. diag(y1 - 1, y2 - 1) PSD  ->  (1, 1)
SdpProblem diag_two() {
  SdpProblem p;
  p.num_vars = 2;
  p.objective = {1.0, 1.0};
  SdpBlock b;
  b.size = 2;
  b.entries.push_back({SdpEntry::kConstTerm, 0, 0, -1.0});
  b.entries.push_back({SdpEntry::kConstTerm, 1, 1, -1.0});
  b.entries.push_back({0, 0, 0, 1.0});
  b.entries.push_back({1, 1, 1, 1.0});
  p.blocks.push_back(b);
  return p;
}

// Gram feasibility for x^2 - 2x + 1 over the basis (1, x): every entry is
// pinned by a coefficient equality, so the solution must be [[1,-1],[-1,1]].
SdpProblem gram_sos() {
  SdpProblem p;
  p.num_vars = 3;  // g00, g01, g11
  p.objective = {0.0, 0.0, 0.0};
  SdpBlock b;
  b.size = 2;
  b.entries.push_back({0, 0, 0, 1.0});
  b.entries.push_back({1, 0, 1, 1.0});
  b.entries.push_back({2, 1, 1, 1.0});
  p.blocks.push_back(b);
  p.equalities.push_back({{{0, 1.0}}, 1.0});    // constant: g00 = 1
  p.equalities.push_back({{{1, 2.0}}, -2.0});   // x: 2 g01 = -2
  p.equalities.push_back({{{2, 1.0}}, 1.0});    // x^2: g11 = 1
  return p;
}

SdpProblem random_problem(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SdpProblem p;
  p.num_vars = 5;
  p.objective.resize(5);
  for (auto& c : p.objective) c = u(rng);
  for (int blk = 0; blk < 2; ++blk) {
    SdpBlock b;
    b.size = 3 + blk;
    for (int k = -1; k < 5; ++k)
      for (int i = 0; i < b.size; ++i)
        for (int j = i; j < b.size; ++j)
          if (u(rng) > 0.2) b.entries.push_back({k, i, j, u(rng)});
    p.blocks.push_back(std::move(b));
  }
  for (int e = 0; e < 2; ++e) {
    SdpLinearEq eq;
    for (int k = 0; k < 5; ++k)
      if (u(rng) > 0.0) eq.coeffs.emplace_back(k, u(rng));
    if (eq.coeffs.empty()) eq.coeffs.emplace_back(0, 1.0);
    eq.rhs = u(rng);
    p.equalities.push_back(std::move(eq));
  }
  return p;
}

}  // namespace

TEST_CASE("analytic instance: off-diagonal ones") {
  const auto sol = solve_sdp(two_by_two());
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.y[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.primal_obj == doctest::Approx(1.0).epsilon(1e-6));
  // weak duality at termination
  CHECK(sol.primal_obj >= sol.dual_obj - 1e-8 * (1.0 + std::abs(sol.primal_obj)));
  CHECK(sol.gap <= 1e-8);
}

TEST_CASE("analytic instance: separable diagonal") {
  const auto sol = solve_sdp(diag_two());
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.y[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.y[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.primal_obj == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("analytic instance: fully pinned Gram") {
  const auto sol = solve_sdp(gram_sos());
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.y[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.y[1] == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(sol.y[2] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("optimal status implies small residuals and PSD slack") {
  const auto p = two_by_two();
  const auto sol = solve_sdp(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.primal_residual <= 1e-7);
  CHECK(sol.dual_residual <= 1e-7);
  // reassemble S(y) and check its minimum eigenvalue
  la::Matrix s(2, 2);
  s(0, 1) = s(1, 0) = 1.0;
  s(0, 0) = s(1, 1) = sol.y[0];
  CHECK(la::min_eigenvalue(s) >= -1e-7);
}

TEST_CASE("infeasible constraint system is reported") {
  // S = [-1 + 0*y] can never be PSD
  SdpProblem p;
  p.num_vars = 1;
  p.objective = {0.0};
  SdpBlock b;
  b.size = 1;
  b.entries.push_back({SdpEntry::kConstTerm, 0, 0, -1.0});
  p.blocks.push_back(b);
  const auto sol = solve_sdp(p);
  CHECK(sol.status == SdpStatus::PrimalInfeasible);
}

TEST_CASE("unbounded objective is reported as dual infeasibility") {
  // min -y s.t. [y] PSD
  SdpProblem p;
  p.num_vars = 1;
  p.objective = {-1.0};
  SdpBlock b;
  b.size = 1;
  b.entries.push_back({0, 0, 0, 1.0});
  p.blocks.push_back(b);
  const auto sol = solve_sdp(p);
  CHECK(sol.status == SdpStatus::DualInfeasible);
}

TEST_CASE("objective is invariant under simultaneous row/column permutation") {
  // permute indices of the 2x2 instance: swap 0 <-> 1
  const auto base = solve_sdp(two_by_two());
  SdpProblem p = two_by_two();
  for (auto& e : p.blocks[0].entries) {
    e.i = 1 - e.i;
    e.j = 1 - e.j;
  }
  const auto per = solve_sdp(p);
  REQUIRE(per.status == SdpStatus::Optimal);
  CHECK(per.primal_obj == doctest::Approx(base.primal_obj).epsilon(1e-7));
}

TEST_CASE("determinism: identical runs produce identical iterates") {
  const auto a = solve_sdp(gram_sos());
  const auto b = solve_sdp(gram_sos());
  REQUIRE(a.status == SdpStatus::Optimal);
  REQUIRE(b.status == SdpStatus::Optimal);
  CHECK(a.iterations == b.iterations);
  for (int k = 0; k < 3; ++k) CHECK(a.y[k] == b.y[k]);
}

TEST_CASE("sdpa export: structure of the tiny instance") {
  const auto text = export_sdpa(two_by_two());
  CHECK(text.find("1 = mDIM") != std::string::npos);
  CHECK(text.find("1 = nBLOCK") != std::string::npos);
  // three entry lines: F_0 off-diagonal and the two diagonal F_1 entries
  std::size_t lines = 0, pos = 0;
  while ((pos = text.find('\n', pos)) != std::string::npos) {
    ++pos;
    ++lines;
  }
  const auto imported = import_sdpa(text);
  CHECK(structurally_equal(two_by_two(), imported));
}

TEST_CASE("sdpa export: no equality block when there are no equalities") {
  const auto text = export_sdpa(diag_two());
  CHECK(text.find("rvopt-eq") == std::string::npos);
  CHECK(text.find("1 = nBLOCK") != std::string::npos);
}

TEST_CASE("sdpa round-trip on randomized instances") {
  std::mt19937_64 rng(31337);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_problem(rng);
    const auto q = import_sdpa(export_sdpa(p));
    CHECK(structurally_equal(p, q));
    // 17 significant digits round-trip doubles exactly
    CHECK(structurally_equal(p, q, 0.0));
  }
}

TEST_CASE("equalities round-trip through the diagonal encoding") {
  const auto p = gram_sos();
  const auto text = export_sdpa(p);
  CHECK(text.find("*rvopt-eq block=2 count=3") != std::string::npos);
  const auto q = import_sdpa(text);
  REQUIRE(q.equalities.size() == 3);
  CHECK(structurally_equal(p, q));
  const auto sol = solve_sdp(q);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.y[1] == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("malformed problems are rejected") {
  SdpProblem p;
  p.num_vars = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = two_by_two();
  p.blocks[0].entries.push_back({7, 0, 0, 1.0});  // variable out of range
  CHECK_THROWS_AS(p.validate(), Error);
}
