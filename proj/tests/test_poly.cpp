#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rvopt/poly.hpp"

using namespace rvopt;

namespace {

VariableSpace::Ptr xu_space() {
  return VariableSpace::make({{"x", {"x1", "x2"}}, {"u", {"u1"}}});
}

Polynomial random_poly(const VariableSpace::Ptr& space, std::uint32_t deg,
                       std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  Polynomial p(space);
  const auto mons = basis(space->size(), deg);
  std::uniform_int_distribution<std::size_t> pick(0, mons.size() - 1);
  for (int t = 0; t < 8; ++t) p.add_term(mons[pick(rng)], u(rng));
  return p;
}

}  // namespace

TEST_CASE("basis: graded-lex order and sizes") {
  // n=2, d=2 -> [1, x1, x2, x1^2, x1 x2, x2^2]
  const auto b22 = basis(2, 2);
  REQUIRE(b22.size() == 6);
  CHECK(b22[0].exponents == std::vector<std::uint32_t>{0, 0});
  CHECK(b22[1].exponents == std::vector<std::uint32_t>{1, 0});
  CHECK(b22[2].exponents == std::vector<std::uint32_t>{0, 1});
  CHECK(b22[3].exponents == std::vector<std::uint32_t>{2, 0});
  CHECK(b22[4].exponents == std::vector<std::uint32_t>{1, 1});
  CHECK(b22[5].exponents == std::vector<std::uint32_t>{0, 2});

  CHECK(basis(1, 3).size() == 4);
  CHECK(basis(3, 2).size() == 10);
  CHECK(basis_size(2, 2) == 6);
  CHECK(basis_size(3, 2) == 10);
  CHECK(basis_size(2, 8) == 45);
}

TEST_CASE("basis indexing is a bijection") {
  const MonomialBasis b(3, 5);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.index_of(b[i]) == i);
  Monomial too_big(3);
  too_big.exponents = {6, 0, 0};
  CHECK(!b.try_index_of(too_big).has_value());
}

TEST_CASE("eval on the bundled-instance objectives") {
  const auto space = xu_space();
  // x1^2 u^2 + x2^2 u at (1,1,1) -> 2
  const auto f1 = parse_polynomial(space, "x1^2*u1^2 + x2^2*u1");
  CHECK(f1.eval(std::vector<double>{1, 1, 1}) == doctest::Approx(2.0));
  CHECK(Polynomial(space).eval(std::vector<double>{0.3, -2, 5}) == 0.0);
  const auto sq = parse_polynomial(space, "x1^2 + 2*x1*x2 + x2^2");
  CHECK(sq.eval(std::vector<double>{1, 2, 0}) == doctest::Approx(9.0));
  CHECK_THROWS_AS(sq.eval(std::vector<double>{1, 2}), Error);
}

TEST_CASE("arithmetic: expansion, cancellation, empty product") {
  const auto space = VariableSpace::make({{"x", {"x1", "x2"}}});
  const auto s = parse_polynomial(space, "x1 + x2");
  const auto sq = s.pow(2);
  CHECK(sq.term_count() == 3);
  Monomial m11(2);
  m11.exponents = {1, 1};
  CHECK(sq.coefficient(m11) == doctest::Approx(2.0));

  Polynomial z = s;
  z -= s;
  CHECK(z.is_zero());
  CHECK(z.degree() == 0);  // zero polynomial has degree 0 by convention

  const auto one = s.pow(0);
  CHECK(one.term_count() == 1);
  CHECK(one.eval(std::vector<double>{5.0, 7.0}) == doctest::Approx(1.0));
}

TEST_CASE("substitute_block matches the hand-computed instances") {
  const auto space = xu_space();
  const auto f2 =
      parse_polynomial(space, "-1*x1^4 - 2*x1^2*x2^2 - x2^4 + x1^2 - u1^2");
  const auto f2_u0 = f2.substitute_block("u", std::vector<double>{0.0});
  CHECK(f2_u0.space()->size() == 2);
  CHECK(f2_u0.eval(std::vector<double>{1.0, 1.0}) == doctest::Approx(-3.0));
  CHECK(f2_u0.to_string() == "-x1^4 - 2*x1^2*x2^2 - x2^4 + x1^2");

  const auto f1 = parse_polynomial(space, "x1^2*u1^2 + x2^2*u1");
  const auto f1_x0 = f1.substitute_block("x", std::vector<double>{0.0, 0.0});
  CHECK(f1_x0.is_zero());

  const auto gspace = VariableSpace::make({{"x", {"x1", "x2"}}, {"v", {"v1", "v2"}}});
  const auto g = parse_polynomial(gspace, "-1*x1^2*v2^2 - x2^2*v1^2 + 1");
  const auto g_x = g.substitute_block("x", std::vector<double>{1.0, 0.0});
  // -v2^2 + 1
  CHECK(g_x.eval(std::vector<double>{0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(g_x.eval(std::vector<double>{3.0, 1.0}) == doctest::Approx(0.0));
  CHECK(g_x.degree() == 2);
}

TEST_CASE("property: eval is a ring homomorphism") {
  std::mt19937_64 rng(99);
  const auto space = VariableSpace::make({{"x", {"x1", "x2", "x3"}}});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = random_poly(space, 4, rng);
    const auto q = random_poly(space, 4, rng);
    const std::vector<double> z{u(rng), u(rng), u(rng)};
    const double scale =
        1.0 + std::abs(p.eval(z)) + std::abs(q.eval(z)) +
        std::abs(p.eval(z) * q.eval(z));
    CHECK(std::abs((p + q).eval(z) - (p.eval(z) + q.eval(z))) <= 1e-12 * scale);
    CHECK(std::abs(Polynomial::mul(p, q).eval(z) - p.eval(z) * q.eval(z)) <=
          1e-12 * scale);
  }
}

TEST_CASE("property: substitute then eval equals eval at the joint point") {
  std::mt19937_64 rng(123);
  const auto space = xu_space();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = random_poly(space, 5, rng);
    const std::vector<double> xu{u(rng), u(rng), u(rng)};
    const auto px = p.substitute_block("u", std::vector<double>{xu[2]});
    const double scale = 1.0 + std::abs(p.eval(xu));
    CHECK(std::abs(px.eval(std::vector<double>{xu[0], xu[1]}) - p.eval(xu)) <=
          1e-12 * scale);
  }
}

TEST_CASE("lift re-expresses polynomials over a joint space") {
  const auto xs = VariableSpace::make({{"x", {"x1", "x2"}}});
  const auto joint = VariableSpace::make({{"u", {"u1"}}, {"x", {"x1", "x2"}}});
  const auto p = parse_polynomial(xs, "x1^2 - 3*x2");
  const auto lifted = p.lift(joint);
  CHECK(lifted.eval(std::vector<double>{9.0, 2.0, 0.5}) ==
        doctest::Approx(p.eval(std::vector<double>{2.0, 0.5})));
}

TEST_CASE("parser rejects malformed input with positions") {
  const auto space = xu_space();
  CHECK_THROWS_WITH_AS(parse_polynomial(space, "x1^-1"),
                       doctest::Contains("negative exponents"), Error);
  CHECK_THROWS_AS(parse_polynomial(space, "x1 + + x2"), Error);
  CHECK_THROWS_AS(parse_polynomial(space, "2*"), Error);
  CHECK_THROWS_AS(parse_polynomial(space, "y1 + 2"), Error);
  CHECK_THROWS_AS(parse_polynomial(space, ""), Error);
  // exact coefficient round trip via 17-digit printing
  const auto p = parse_polynomial(space, "0.1*x1 + 1e-3*u1^3 - 7");
  const auto q = parse_polynomial(space, p.to_string());
  for (const auto& [m, c] : p.terms()) CHECK(q.coefficient(m) == c);
}
