#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rvopt/moment.hpp"
#include "rvopt/semialg.hpp"

using namespace rvopt;

namespace {

VariableSpace::Ptr x2() { return VariableSpace::make({{"x", {"x1", "x2"}}}); }

}  // namespace

TEST_CASE("membership: boxes and balls") {
  const auto s = x2();
  const auto box = make_box(s, {0, 0}, {1, 1});
  CHECK(membership(box, std::vector<double>{0.5, 0.5}, 1e-9));
  CHECK(membership(box, std::vector<double>{1.0, 1.0}, 0.0));  // boundary
  CHECK(!membership(box, std::vector<double>{1.2, 0.5}, 1e-9));

  const auto ball = make_ball(s, {0, 0}, std::sqrt(2.0));
  CHECK(!membership(ball, std::vector<double>{2.0, 0.0}, 1e-9));
  CHECK(membership(ball, std::vector<double>{1.0, 1.0}, 1e-9));
  CHECK_THROWS_AS(membership(ball, std::vector<double>{1.0}, 0.0), Error);
}

TEST_CASE("descriptor invariants") {
  const auto s = x2();
  CHECK_THROWS_AS(make_box(s, {0, 1}, {1, 1}), Error);   // lower < upper required
  CHECK_THROWS_AS(make_ball(s, {0, 0}, 0.0), Error);     // radius > 0
  const auto gen = make_general(s, {parse_polynomial(s, "x1")}, 2.0);
  REQUIRE(gen.witness_index.has_value());
  // witness appears among the inequalities and caps the norm
  const auto& w = gen.inequalities[*gen.witness_index];
  CHECK(w.eval(std::vector<double>{0.0, 0.0}) == doctest::Approx(4.0));
  CHECK(w.eval(std::vector<double>{2.0, 0.0}) == doctest::Approx(0.0));
  CHECK(enclosing_radius(gen) == doctest::Approx(2.0));
}

TEST_CASE("uniform box moments: closed forms") {
  // [0,1]^2
  const auto g1 = uniform_box_moments(BoxShape{{0, 0}, {1, 1}}, 4);
  const MonomialBasis b(2, 4);
  CHECK(g1[0] == doctest::Approx(1.0));
  Monomial m10(2), m22(2);
  m10.exponents = {1, 0};
  m22.exponents = {2, 2};
  CHECK(g1[b.index_of(m10)] == doctest::Approx(0.5));
  CHECK(g1[b.index_of(m22)] == doctest::Approx(1.0 / 9.0));
  // odd moment on a symmetric interval vanishes
  const auto g2 = uniform_box_moments(BoxShape{{-1}, {1}}, 3);
  CHECK(g2[1] == doctest::Approx(0.0));
  CHECK_THROWS_AS(uniform_box_moments(BoxShape{{0, 0}, {1, 0}}, 2), Error);
}

TEST_CASE("uniform ball moments: frozen values") {
  // n=2, R=sqrt(2): E[x1^2] = R^2/4 = 1/2
  const auto g = uniform_ball_moments(2, BallShape{{0, 0}, std::sqrt(2.0)}, 4);
  const MonomialBasis b(2, 4);
  Monomial m20(2), m10(2), m22(2);
  m20.exponents = {2, 0};
  m10.exponents = {1, 0};
  m22.exponents = {2, 2};
  CHECK(g[b.index_of(m20)] == doctest::Approx(0.5));
  CHECK(g[b.index_of(m10)] == doctest::Approx(0.0));
  // n=2, R=1: E[x1^2 x2^2] = 1/24 (frozen from the closed form; cross-checked
  // against Monte Carlo below)
  const auto g1 = uniform_ball_moments(2, BallShape{{0, 0}, 1.0}, 4);
  CHECK(g1[b.index_of(m22)] == doctest::Approx(1.0 / 24.0));
}

TEST_CASE("moments agree with Monte Carlo within 3 sigma up to degree 8") {
  const MonomialBasis b(2, 8);
  auto poly_of = [&](const Monomial& m) {
    return [m](const oracle::Point& p) {
      double v = 1.0;
      for (std::size_t i = 0; i < m.exponents.size(); ++i)
        for (std::uint32_t e = 0; e < m.exponents[i]; ++e) v *= p[i];
      return v;
    };
  };
  SUBCASE("box [-1,2] x [0,1]") {
    const BoxShape box{{-1, 0}, {2, 1}};
    const auto gamma = uniform_box_moments(box, 8);
    const auto sampler = oracle::box_sampler({-1, 0}, {2, 1});
    for (std::size_t k = 0; k < b.size(); ++k) {
      const auto est = oracle::mc_mean(poly_of(b[k]), sampler, 1000000, 2024 + k);
      CHECK(std::abs(est.mean - gamma[k]) <= 3.0 * est.stderr_ + 1e-12);
    }
  }
  SUBCASE("ball centered off-origin") {
    const BallShape ball{{0.3, -0.2}, 1.5};
    const auto gamma = uniform_ball_moments(2, ball, 8);
    const auto sampler = oracle::ball_sampler({0.3, -0.2}, 1.5);
    for (std::size_t k = 0; k < b.size(); ++k) {
      const auto est = oracle::mc_mean(poly_of(b[k]), sampler, 1000000, 777 + k);
      CHECK(std::abs(est.mean - gamma[k]) <= 3.0 * est.stderr_ + 1e-12);
    }
  }
}

TEST_CASE("every moment vector is PSD as a moment matrix") {
  for (int which = 0; which < 3; ++which) {
    std::vector<double> gamma;
    VariableSpace::Ptr s = x2();
    if (which == 0) gamma = uniform_box_moments(BoxShape{{0, 0}, {1, 1}}, 8);
    if (which == 1) gamma = uniform_ball_moments(2, BallShape{{0, 0}, std::sqrt(2.0)}, 8);
    if (which == 2) gamma = uniform_ball_moments(2, BallShape{{0.5, 0.25}, 2.0}, 8);
    TruncatedMomentSequence y{s, 8, gamma};
    y.check();
    const auto m = moment_matrix(y, 4);
    double trace = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) trace += m(i, i);
    CHECK(la::min_eigenvalue(m) >= -1e-10 * std::max(1.0, trace));
    CHECK(gamma[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("product sets concatenate inequalities over the joint space") {
  const auto xs = x2();
  const auto us = VariableSpace::make({{"u", {"u1"}}});
  const auto X = make_ball(xs, {0, 0}, std::sqrt(2.0));
  const auto U = make_box(us, {0}, {1});
  const auto XU = product_set(X, U);
  CHECK(XU.dim() == 3);
  CHECK(XU.inequalities.size() == 2);
  CHECK(membership(XU, std::vector<double>{1.0, 0.0, 0.5}, 1e-9));
  CHECK(!membership(XU, std::vector<double>{1.0, 0.0, 1.5}, 1e-9));
}

TEST_CASE("sampling stays inside the set") {
  std::mt19937_64 rng(5);
  const auto s = x2();
  const auto ball = make_ball(s, {1, -1}, 0.7);
  for (int i = 0; i < 200; ++i)
    CHECK(membership(ball, sample_point(ball, rng), 1e-12));
  const auto gen = make_general(
      s, {parse_polynomial(s, "x1 - x2")}, 2.0);
  for (int i = 0; i < 200; ++i)
    CHECK(membership(gen, sample_point(gen, rng), 1e-12));
}
