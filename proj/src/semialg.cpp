#include "rvopt/semialg.hpp"

#include <algorithm>
#include <cmath>

namespace rvopt {

namespace {

Polynomial ball_constraint(const VariableSpace::Ptr& space,
                           std::span<const double> center, double radius) {
  Polynomial p = Polynomial::constant(space, radius * radius);
  for (std::size_t i = 0; i < space->size(); ++i) {
    Polynomial zi = Polynomial::variable(space, i);
    Polynomial shifted = zi - Polynomial::constant(space, center[i]);
    p -= shifted * shifted;
  }
  return p;
}

}  // namespace

SetDescriptor make_box(VariableSpace::Ptr space, std::vector<double> lower,
                       std::vector<double> upper) {
  const std::size_t n = space->size();
  if (lower.size() != n || upper.size() != n)
    throw Error("make_box: bound dimension mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!(lower[i] < upper[i])) throw Error("make_box: requires lower < upper");
  SetDescriptor s;
  s.space = space;
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial zi = Polynomial::variable(space, i);
    s.inequalities.push_back((zi - Polynomial::constant(space, lower[i])) *
                             (Polynomial::constant(space, upper[i]) - zi));
  }
  s.shape = BoxShape{std::move(lower), std::move(upper)};
  return s;
}

SetDescriptor make_ball(VariableSpace::Ptr space, std::vector<double> center,
                        double radius) {
  if (center.size() != space->size())
    throw Error("make_ball: center dimension mismatch");
  if (!(radius > 0.0)) throw Error("make_ball: radius must be positive");
  SetDescriptor s;
  s.space = space;
  s.inequalities.push_back(ball_constraint(space, center, radius));
  s.witness_index = 0;
  s.shape = BallShape{std::move(center), radius};
  return s;
}

SetDescriptor make_general(VariableSpace::Ptr space,
                           std::vector<Polynomial> inequalities, double bound) {
  if (!(bound > 0.0)) throw Error("make_general: witness bound must be positive");
  SetDescriptor s;
  s.space = space;
  s.inequalities = std::move(inequalities);
  for (auto& p : s.inequalities)
    if (!p.space()->same_as(*space))
      throw Error("make_general: inequality over a different space");
  std::vector<double> origin(space->size(), 0.0);
  s.inequalities.push_back(ball_constraint(space, origin, bound));
  s.witness_index = s.inequalities.size() - 1;
  s.shape = GeneralShape{bound};
  return s;
}

VariableSpace::Ptr joint_space(const VariableSpace& a, const VariableSpace& b) {
  std::vector<std::pair<std::string, std::vector<std::string>>> blocks;
  auto push = [&](const VariableSpace& s) {
    for (const auto& blk : s.blocks()) {
      std::vector<std::string> vars(s.names().begin() + blk.offset,
                                    s.names().begin() + blk.offset + blk.size);
      blocks.emplace_back(blk.name, std::move(vars));
    }
  };
  push(a);
  push(b);
  return VariableSpace::make(std::move(blocks));
}

SetDescriptor product_set(const SetDescriptor& a, const SetDescriptor& b) {
  SetDescriptor s;
  s.space = joint_space(*a.space, *b.space);
  for (const auto& p : a.inequalities) s.inequalities.push_back(p.lift(s.space));
  for (const auto& p : b.inequalities) s.inequalities.push_back(p.lift(s.space));
  s.shape = GeneralShape{std::hypot(enclosing_radius(a), enclosing_radius(b))};
  return s;
}

bool membership(const SetDescriptor& s, std::span<const double> point, double tol) {
  if (point.size() != s.dim()) throw Error("membership: dimension mismatch");
  for (const auto& p : s.inequalities)
    if (p.eval(point) < -tol) return false;
  return true;
}

double enclosing_radius(const SetDescriptor& s) {
  if (const auto* box = std::get_if<BoxShape>(&s.shape)) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < box->lower.size(); ++i) {
      const double m = std::max(std::abs(box->lower[i]), std::abs(box->upper[i]));
      r2 += m * m;
    }
    return std::sqrt(r2);
  }
  if (const auto* ball = std::get_if<BallShape>(&s.shape)) {
    double c = 0.0;
    for (double v : ball->center) c += v * v;
    return std::sqrt(c) + ball->radius;
  }
  return std::get<GeneralShape>(s.shape).bound;
}

std::vector<double> sample_point(const SetDescriptor& s, std::mt19937_64& rng) {
  const std::size_t n = s.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (const auto* box = std::get_if<BoxShape>(&s.shape)) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i)
      p[i] = box->lower[i] + unit(rng) * (box->upper[i] - box->lower[i]);
    return p;
  }
  if (const auto* ball = std::get_if<BallShape>(&s.shape)) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> p(n);
    double norm = 0.0;
    for (auto& v : p) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(std::max(norm, 1e-300));
    const double r = ball->radius * std::pow(unit(rng), 1.0 / double(n));
    for (std::size_t i = 0; i < n; ++i) p[i] = ball->center[i] + r * p[i] / norm;
    return p;
  }
  const double bound = std::get<GeneralShape>(s.shape).bound;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int tries = 0; tries < 100000; ++tries) {
    std::vector<double> p(n);
    double norm = 0.0;
    for (auto& v : p) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(std::max(norm, 1e-300));
    const double r = bound * std::pow(unit(rng), 1.0 / double(n));
    for (auto& v : p) v = r * v / norm;
    if (membership(s, p, 0.0)) return p;
  }
  throw Error("sample_point: rejection sampling failed (set may be thin or empty)");
}

std::vector<double> uniform_box_moments(const BoxShape& box, std::uint32_t maxdeg) {
  const std::size_t n = box.lower.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!(box.lower[i] < box.upper[i]))
      throw Error("uniform_box_moments: degenerate box");
  // per-variable 1-d moments m_i[e] = (u^{e+1} - l^{e+1}) / ((e+1)(u - l))
  std::vector<std::vector<double>> m1(n, std::vector<double>(maxdeg + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double l = box.lower[i], u = box.upper[i];
    for (std::uint32_t e = 0; e <= maxdeg; ++e)
      m1[i][e] = (std::pow(u, e + 1) - std::pow(l, e + 1)) /
                 (double(e + 1) * (u - l));
  }
  const auto mons = basis(n, maxdeg);
  std::vector<double> gamma(mons.size());
  for (std::size_t k = 0; k < mons.size(); ++k) {
    double v = 1.0;
    for (std::size_t i = 0; i < n; ++i) v *= m1[i][mons[k].exponents[i]];
    gamma[k] = v;
  }
  return gamma;
}

namespace {

// Moments of the uniform measure on the origin-centered ball of radius R:
// zero when any exponent is odd, otherwise
//   R^{|a|} * (n/(|a|+n)) * prod_i Gamma((a_i+1)/2) * Gamma(n/2)
//   / (Gamma((|a|+n)/2) * pi^{n/2}).
double central_ball_moment(std::size_t n, double radius, const Monomial& m) {
  std::uint32_t total = 0;
  for (auto e : m.exponents) {
    if (e % 2 == 1) return 0.0;
    total += e;
  }
  double lg = 0.0;
  for (auto e : m.exponents) lg += std::lgamma((e + 1) / 2.0);
  lg += std::lgamma(n / 2.0);
  lg -= std::lgamma((total + n) / 2.0);
  lg -= 0.5 * double(n) * std::log(M_PI);
  const double ratio = double(n) / double(total + n);
  return std::pow(radius, double(total)) * ratio * std::exp(lg);
}

}  // namespace

std::vector<double> uniform_ball_moments(std::size_t nvars, const BallShape& ball,
                                         std::uint32_t maxdeg) {
  if (!(ball.radius > 0.0)) throw Error("uniform_ball_moments: radius must be positive");
  const MonomialBasis bas(nvars, maxdeg);
  bool centered = true;
  for (double c : ball.center)
    if (c != 0.0) centered = false;
  std::vector<double> central(bas.size());
  for (std::size_t k = 0; k < bas.size(); ++k)
    central[k] = central_ball_moment(nvars, ball.radius, bas[k]);
  if (centered) return central;
  // shifted ball: E[(c+z)^a] expanded by the binomial theorem per coordinate
  std::vector<double> gamma(bas.size(), 0.0);
  for (std::size_t k = 0; k < bas.size(); ++k) {
    const auto& a = bas[k].exponents;
    // iterate over all beta <= a componentwise
    Monomial beta(nvars);
    double total = 0.0;
    while (true) {
      double coef = 1.0;
      for (std::size_t i = 0; i < nvars; ++i) {
        const std::uint32_t ai = a[i], bi = beta.exponents[i];
        // C(ai, bi) * c_i^(ai-bi)
        double binom = 1.0;
        for (std::uint32_t t = 0; t < bi; ++t)
          binom = binom * double(ai - t) / double(t + 1);
        coef *= binom * std::pow(ball.center[i], double(ai - bi));
      }
      total += coef * central[bas.index_of(beta)];
      // advance beta in mixed radix bounded by a
      std::size_t i = 0;
      while (i < nvars) {
        if (beta.exponents[i] < a[i]) {
          ++beta.exponents[i];
          break;
        }
        beta.exponents[i] = 0;
        ++i;
      }
      if (i == nvars) break;
    }
    gamma[k] = total;
  }
  return gamma;
}

std::vector<double> uniform_moments(const SetDescriptor& s, std::uint32_t maxdeg) {
  if (const auto* box = std::get_if<BoxShape>(&s.shape))
    return uniform_box_moments(*box, maxdeg);
  if (const auto* ball = std::get_if<BallShape>(&s.shape))
    return uniform_ball_moments(s.dim(), *ball, maxdeg);
  throw Error("uniform_moments: closed-form moments need a box or ball shape");
}

}  // namespace rvopt
