#include "rvopt/value_approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rvopt::approx {

namespace {

std::uint32_t halfdeg(std::uint32_t d) { return (d + 1) / 2; }

struct MarginalSolve {
  ValueApprox approx;
  double moment_objective = 0.0;
  TruncatedMomentSequence z;
};

// Shared assembly: moment-side SDP over the joint space with the pure-base
// moments of degree <= d pinned to gamma. `sign` is -1 for Upper
// (max L_z(f) = -min -L_z(f)) and +1 for Lower (min L_z(g)).
MarginalSolve solve_marginal(const Polynomial& f, const SetDescriptor& base,
                             const SetDescriptor& param, std::uint32_t d,
                             Direction dir, const Options& opts) {
  if (d < 1) throw Error("value approx: degree must be >= 1");
  const SetDescriptor joint = product_set(base, param);
  Polynomial fj = f.lift(joint.space);
  const std::uint32_t t = opts.order.value_or(default_order(f, base, param, d));
  {
    const std::uint32_t tmin =
        std::max(std::max<std::uint32_t>(1, halfdeg(d)),
                 hierarchy::min_order(fj, joint));
    if (t < tmin) throw Error("value approx: relaxation order below the degree bound");
  }

  Polynomial objective = fj;
  if (dir == Direction::Upper) objective *= -1.0;
  hierarchy::Relaxation rel = hierarchy::relax(objective, joint, t);

  // pin the pure-base marginal moments to gamma for 1 <= |alpha| <= d
  const std::vector<double> gamma = uniform_moments(base, d);
  const MonomialBasis base_basis(base.dim(), d);
  const MonomialBasis joint_basis(joint.dim(), 2 * t);
  std::vector<std::size_t> base_to_joint(base.dim());
  for (const auto& blk : base.space->blocks()) {
    const auto& jb = joint.space->block(blk.name);
    for (std::size_t i = 0; i < blk.size; ++i)
      base_to_joint[blk.offset + i] = jb.offset + i;
  }
  std::vector<std::size_t> pin_rows_base_index;
  for (std::size_t a = 1; a < base_basis.size(); ++a) {
    Monomial lifted(joint.dim());
    for (std::size_t i = 0; i < base.dim(); ++i)
      lifted.exponents[base_to_joint[i]] = base_basis[a].exponents[i];
    SdpLinearEq pin;
    pin.coeffs.emplace_back(static_cast<int>(joint_basis.index_of(lifted)), 1.0);
    pin.rhs = gamma[a];
    rel.sdp.equalities.push_back(std::move(pin));
    pin_rows_base_index.push_back(a);
  }
  if (opts.on_relaxation) opts.on_relaxation(rel.sdp, t);

  const SdpSolution sol = solve_sdp(rel.sdp, opts.sdp);
  if (sol.status != SdpStatus::Optimal) {
    const bool raise = sol.status == SdpStatus::DualInfeasible ||
                       sol.status == SdpStatus::PrimalInfeasible;
    throw ApproxError(std::string("value approx solve failed: ") + to_string(sol.status) +
                          (raise ? " (truncated module too small; raise the order)" : ""),
                      raise);
  }

  // Coefficients off the equality multipliers: row 0 is the normalization
  // z_0 = 1 (constant coefficient), the rest are the pins. The dual
  // constraint reads <A_delta, X> + mu_row = c_delta, so the certificate
  // identity gives poly = -(mu_norm + sum mu_a x^a) for Upper and
  // + for Lower.
  const double s = (dir == Direction::Upper) ? -1.0 : 1.0;
  Polynomial poly(base.space);
  poly.set_coefficient(Monomial(base.dim()), s * sol.eq_duals[0]);
  for (std::size_t k = 0; k < pin_rows_base_index.size(); ++k) {
    const auto& mono = base_basis[pin_rows_base_index[k]];
    poly.set_coefficient(mono, s * sol.eq_duals[1 + k]);
  }

  double integral = 0.0;
  for (const auto& [mono, c] : poly.terms())
    integral += c * gamma[base_basis.index_of(mono)];

  MarginalSolve out{ValueApprox{std::move(poly), dir, d, t, integral, 0.0},
                    (dir == Direction::Upper) ? -sol.primal_obj : sol.primal_obj,
                    TruncatedMomentSequence{joint.space, 2 * t, sol.y}};
  const double z0 = out.z.values[0];
  for (auto& v : out.z.values) v /= z0;

  // sampled one-sided guarantee
  std::mt19937_64 rng(opts.seed);
  double margin = std::numeric_limits<double>::infinity();
  const std::size_t bdim = base.dim();
  for (std::size_t i = 0; i < opts.guarantee_samples; ++i) {
    const auto xs = sample_point(base, rng);
    const auto us = sample_point(param, rng);
    std::vector<double> joint_pt(joint.dim(), 0.0);
    for (std::size_t k = 0; k < bdim; ++k) joint_pt[base_to_joint[k]] = xs[k];
    std::size_t upos = 0;
    for (const auto& blk : param.space->blocks()) {
      const auto& jb = joint.space->block(blk.name);
      for (std::size_t k = 0; k < blk.size; ++k) joint_pt[jb.offset + k] = us[upos++];
    }
    const double fv = fj.eval(joint_pt);
    const double pv = out.approx.poly.eval(xs);
    const double gap = (dir == Direction::Upper) ? pv - fv : fv - pv;
    margin = std::min(margin, gap);
  }
  out.approx.guarantee_margin = margin;
  if (margin < -100.0 * opts.guarantee_tol)
    throw ApproxError("value approx: sampled one-sided guarantee violated by " +
                          std::to_string(-margin),
                      false);
  return out;
}

}  // namespace

std::uint32_t default_order(const Polynomial& f, const SetDescriptor& base,
                            const SetDescriptor& param, std::uint32_t d) {
  std::uint32_t t = std::max<std::uint32_t>(1, halfdeg(d));
  t = std::max(t, halfdeg(f.degree()));
  t = std::max(t, hierarchy::constraint_halfdeg(base));
  t = std::max(t, hierarchy::constraint_halfdeg(param));
  return t + 1;  // one slack order on top of the degree bound
}

ValueApprox upper_value_approx(const Polynomial& f, const SetDescriptor& base,
                               const SetDescriptor& param, std::uint32_t d,
                               const Options& opts) {
  return solve_marginal(f, base, param, d, Direction::Upper, opts).approx;
}

ValueApprox lower_value_approx(const Polynomial& g, const SetDescriptor& base,
                               const SetDescriptor& param, std::uint32_t e,
                               const Options& opts) {
  return solve_marginal(g, base, param, e, Direction::Lower, opts).approx;
}

MarginalDual dual_marginal(const Polynomial& f, const SetDescriptor& base,
                           const SetDescriptor& param, std::uint32_t d,
                           const Options& opts) {
  MarginalSolve s = solve_marginal(f, base, param, d, Direction::Upper, opts);
  return MarginalDual{s.moment_objective, std::move(s.z)};
}

double Envelope::eval(std::span<const double> x) const {
  if (members.empty()) throw Error("envelope: empty");
  double v = members.front().poly.eval(x);
  for (std::size_t i = 1; i < members.size(); ++i) {
    const double w = members[i].poly.eval(x);
    v = (direction == Direction::Upper) ? std::min(v, w) : std::max(v, w);
  }
  return v;
}

Envelope monotone_envelope(std::vector<ValueApprox> members) {
  if (members.empty()) throw Error("envelope: need at least one member");
  const Direction dir = members.front().direction;
  for (const auto& m : members) {
    if (m.direction != dir) throw Error("envelope: mixed directions");
    if (!m.poly.space()->same_as(*members.front().poly.space()))
      throw Error("envelope: members over different spaces");
  }
  Envelope e;
  e.direction = dir;
  e.members = std::move(members);
  return e;
}

}  // namespace rvopt::approx
