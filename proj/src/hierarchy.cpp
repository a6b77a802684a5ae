#include "rvopt/hierarchy.hpp"

#include <algorithm>
#include <cmath>

namespace rvopt::hierarchy {

namespace {

std::uint32_t halfdeg(std::uint32_t d) { return (d + 1) / 2; }

}  // namespace

std::uint32_t constraint_halfdeg(const SetDescriptor& k) {
  std::uint32_t d0 = 1;
  for (const auto& h : k.inequalities) d0 = std::max(d0, halfdeg(h.degree()));
  return d0;
}

std::uint32_t min_order(const Polynomial& f, const SetDescriptor& k) {
  std::uint32_t t = std::max<std::uint32_t>(1, halfdeg(f.degree()));
  t = std::max(t, constraint_halfdeg(k));
  return t;
}

Relaxation relax(const Polynomial& f, const SetDescriptor& k, std::uint32_t t) {
  if (!f.space()->same_as(*k.space))
    throw Error("hierarchy: objective and set live on different spaces");
  if (t < min_order(f, k))
    throw Error("hierarchy: relaxation order too small for the degrees involved");

  const std::size_t n = k.dim();
  const MonomialBasis full(n, 2 * t);
  Relaxation rel;
  rel.order = t;
  SdpProblem& p = rel.sdp;
  p.num_vars = static_cast<int>(full.size());
  p.objective.assign(p.num_vars, 0.0);
  for (const auto& [mono, c] : f.terms())
    p.objective[full.index_of(mono)] += c;

  // moment matrix block
  {
    const MonomialBasis half(n, t);
    SdpBlock blk;
    blk.size = static_cast<int>(half.size());
    for (std::size_t a = 0; a < half.size(); ++a)
      for (std::size_t b = a; b < half.size(); ++b) {
        const int var = static_cast<int>(full.index_of(half[a] + half[b]));
        blk.entries.push_back({var, static_cast<int>(a), static_cast<int>(b), 1.0});
      }
    p.blocks.push_back(std::move(blk));
  }
  // localizing blocks
  for (const auto& h : k.inequalities) {
    const std::uint32_t th = t - halfdeg(h.degree());
    const MonomialBasis half(n, th);
    SdpBlock blk;
    blk.size = static_cast<int>(half.size());
    for (std::size_t a = 0; a < half.size(); ++a)
      for (std::size_t b = a; b < half.size(); ++b) {
        const Monomial ab = half[a] + half[b];
        for (const auto& [kappa, hk] : h.terms()) {
          const int var = static_cast<int>(full.index_of(ab + kappa));
          blk.entries.push_back({var, static_cast<int>(a), static_cast<int>(b), hk});
        }
      }
    p.blocks.push_back(std::move(blk));
  }
  // y_0 = 1
  SdpLinearEq norm;
  norm.coeffs.emplace_back(0, 1.0);
  norm.rhs = 1.0;
  p.equalities.push_back(std::move(norm));
  return rel;
}

namespace {

std::vector<double> project_to_set(std::vector<double> x, const SetDescriptor& k) {
  if (const auto* box = std::get_if<BoxShape>(&k.shape)) {
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = std::clamp(x[i], box->lower[i], box->upper[i]);
    return x;
  }
  if (const auto* ball = std::get_if<BallShape>(&k.shape)) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - ball->center[i];
      r2 += d * d;
    }
    const double r = std::sqrt(r2);
    if (r > ball->radius) {
      const double s = ball->radius / r;
      for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = ball->center[i] + s * (x[i] - ball->center[i]);
    }
    return x;
  }
  return x;  // general sets: reported as-is
}

}  // namespace

Result minimize(const Polynomial& f, const SetDescriptor& k, const Options& opts) {
  const std::uint32_t lo = opts.t_min.value_or(min_order(f, k));
  const std::uint32_t hi = std::max(opts.t_max.value_or(lo + 3), lo);
  if (lo < min_order(f, k))
    throw Error("hierarchy: requested order below the degree bound");
  const std::uint32_t d0 = constraint_halfdeg(k);
  const std::size_t n = k.dim();

  Result res;
  std::optional<Result> first_certified;
  std::vector<double> fallback;
  for (std::uint32_t t = lo; t <= hi; ++t) {
    Relaxation rel = relax(f, k, t);
    if (opts.on_relaxation) opts.on_relaxation(rel.sdp, t);
    const SdpSolution sol = solve_sdp(rel.sdp, opts.sdp);
    res.last_status = sol.status;
    if (sol.status == SdpStatus::PrimalInfeasible) {
      // moment feasible sets only shrink with the order: the set is empty
      res.infeasible = true;
      res.note = "relaxation infeasible at order " + std::to_string(t);
      return res;
    }
    if (sol.status != SdpStatus::Optimal) {
      res.note += "order " + std::to_string(t) + ": " + to_string(sol.status) + "; ";
      continue;
    }
    res.bounds_by_order.push_back(sol.primal_obj);
    if (sol.primal_obj > res.bound) {
      res.bound = sol.primal_obj;
      res.order = t;
    }

    TruncatedMomentSequence y;
    y.space = f.space();
    y.degree = 2 * t;
    y.values = sol.y;
    const double y0 = y.values[0];
    if (std::abs(y0 - 1.0) > 1e-6) {
      res.note += "order " + std::to_string(t) + ": normalization drift; ";
    }
    for (auto& v : y.values) v /= y0;

    fallback.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) fallback[i] = y.values[1 + i];

    const auto ft = flat_truncation(y, d0, opts.rank_ratio);
    if (!ft) continue;
    ExtractionOptions eo;
    eo.rank_ratio = opts.rank_ratio;
    eo.seed = opts.seed;
    eo.d0 = d0;
    const auto atoms = extract_atoms(y, ft->t, ft->rank, eo);
    if (!atoms) continue;

    bool all_ok = true;
    for (const auto& atom : atoms->atoms) {
      if (!membership(k, atom.point, opts.feas_tol)) {
        all_ok = false;
        break;
      }
      const double fx = f.eval(atom.point);
      if (std::abs(fx - res.bound) > opts.match_tol * (1.0 + std::abs(res.bound))) {
        all_ok = false;
        break;
      }
    }
    if (!all_ok) continue;

    if (!first_certified) {
      Result cert = res;
      cert.atoms = atoms;
      cert.minimizers.clear();
      for (const auto& atom : atoms->atoms) cert.minimizers.push_back(atom.point);
      cert.certified = true;
      cert.order = t;
      if (opts.stop_at_certified) return cert;
      first_certified = std::move(cert);
    }
  }
  if (first_certified) {
    first_certified->bounds_by_order = res.bounds_by_order;
    return *first_certified;
  }

  // graceful degradation: degree-1 moments projected to the set
  if (!fallback.empty())
    res.minimizers.push_back(project_to_set(fallback, k));
  return res;
}

Result maximize(const Polynomial& f, const SetDescriptor& k, const Options& opts) {
  Polynomial neg = f;
  neg *= -1.0;
  Result res = minimize(neg, k, opts);
  res.bound = -res.bound;
  for (auto& b : res.bounds_by_order) b = -b;
  return res;
}

}  // namespace rvopt::hierarchy
