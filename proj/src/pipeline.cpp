#include "rvopt/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace rvopt::pipeline {

void ProblemSpec::validate() const {
  if (objectives.empty()) throw Error("problem: at least one objective required");
  if (!x_space->find_block("x")) throw Error("problem: x-space must have block 'x'");
  if (!x_set.space->same_as(*x_space)) throw Error("problem: X set space mismatch");
  if (!x_set.is_box() && !x_set.is_ball())
    throw Error("problem: X must be a box or a ball (closed-form moments)");
  for (const auto& f : objectives) {
    if (!f.space()->find_block("x")) throw Error("problem: objective missing x block");
    if (objectives_uncertain()) {
      if (!f.space()->find_block("u"))
        throw Error("problem: objective missing u block");
    } else if (f.space()->size() != x_space->size()) {
      throw Error("problem: objective must be over x alone (no uncertainty set)");
    }
  }
  for (const auto& g : constraints) {
    if (!g.space()->find_block("x")) throw Error("problem: constraint missing x block");
    if (constraints_uncertain()) {
      if (!g.space()->find_block("v"))
        throw Error("problem: constraint missing v block");
    } else if (g.space()->size() != x_space->size()) {
      throw Error("problem: constraint must be over x alone (no uncertainty set)");
    }
  }
}

void ScalarizationConfig::validate(std::size_t l) const {
  if (lambda.size() != l) throw Error("scalarization: lambda length mismatch");
  double sum = 0.0;
  for (double v : lambda) {
    if (!(v > 0.0)) throw Error("scalarization: lambda must be strictly positive");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error("scalarization: lambda must sum to 1");
  if (!chebyshev && p < 1) throw Error("scalarization: p must be >= 1");
}

std::vector<std::vector<double>> default_lambda_grid(std::size_t l) {
  std::vector<std::vector<double>> grid;
  if (l == 1) {
    grid.push_back({1.0});
    return grid;
  }
  if (l == 2) {
    for (int k = 1; k <= 17; ++k) {
      const double a = 0.05 * k;
      grid.push_back({a, 1.0 - a});
    }
    return grid;
  }
  // positive simplex lattice with denominator q
  const std::uint32_t q = 6;
  std::vector<std::uint32_t> part(l, 1);
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i,
                                                            std::uint32_t left) {
    if (i + 1 == l) {
      part[i] = left;
      std::vector<double> lam(l);
      for (std::size_t k = 0; k < l; ++k) lam[k] = double(part[k]) / double(q);
      grid.push_back(lam);
      return;
    }
    for (std::uint32_t v = 1; v + (l - i - 1) <= left; ++v) {
      part[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, q);
  return grid;
}

namespace {

std::uint32_t degree_in_x(const Polynomial& p) {
  return p.degree_in_block("x");
}

approx::Options approx_options(const SweepOptions& opts, const std::string& label) {
  approx::Options ao;
  ao.sdp.tol = opts.sdp_tol;
  ao.sdp.max_iter = opts.sdp_max_iter;
  ao.seed = opts.seed;
  if (opts.approx_order) ao.order = opts.approx_order;
  if (opts.export_hook) {
    auto hook = opts.export_hook;
    ao.on_relaxation = [hook, label](const SdpProblem& p, std::uint32_t t) {
      hook(p, label + "_t" + std::to_string(t));
    };
  }
  return ao;
}

hierarchy::Options hierarchy_options(const SweepOptions& opts,
                                     const std::string& label) {
  hierarchy::Options ho;
  ho.sdp.tol = opts.sdp_tol;
  ho.sdp.max_iter = opts.sdp_max_iter;
  ho.seed = opts.seed;
  ho.feas_tol = opts.feas_tol;
  ho.rank_ratio = opts.rank_ratio;
  if (opts.export_hook) {
    auto hook = opts.export_hook;
    ho.on_relaxation = [hook, label](const SdpProblem& p, std::uint32_t t) {
      hook(p, label + "_t" + std::to_string(t));
    };
  }
  return ho;
}

// value approximation with an automatic order bump when the truncated
// certificate module is too small at the default order
approx::ValueApprox approx_with_retry(
    const Polynomial& f, const SetDescriptor& base, const SetDescriptor& param,
    std::uint32_t d, approx::Direction dir, approx::Options ao) {
  const std::uint32_t base_order =
      ao.order.value_or(approx::default_order(f, base, param, d));
  for (std::uint32_t bump = 0;; ++bump) {
    ao.order = base_order + bump;
    try {
      return dir == approx::Direction::Upper
                 ? approx::upper_value_approx(f, base, param, d, ao)
                 : approx::lower_value_approx(f, base, param, d, ao);
    } catch (const approx::ApproxError& e) {
      if (!e.order_too_small || bump >= 2) throw;
    }
  }
}

}  // namespace

UtopiaPoint utopia_point(const ProblemSpec& spec, std::vector<double> eps,
                         const SweepOptions& opts) {
  spec.validate();
  const std::size_t l = spec.num_objectives();
  UtopiaPoint up;
  up.bounds.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    const std::string label = "utopia_f" + std::to_string(i + 1);
    if (!spec.objectives_uncertain()) {
      auto ho = hierarchy_options(opts, label);
      const auto res = hierarchy::minimize(spec.objectives[i], spec.x_set, ho);
      if (!res.has_bound())
        throw Error("utopia: no usable bound for objective " + std::to_string(i + 1) +
                    " (" + res.note + ")");
      up.bounds[i] = res.bound;
      continue;
    }
    // interchange sup and min: approximate u -> min_{x in X} f_i(x, u) from
    // below over U, then maximize that polynomial over U
    const std::uint32_t du =
        std::max<std::uint32_t>(1, spec.objectives[i].degree_in_block("u"));
    auto ao = approx_options(opts, label);
    ao.order.reset();  // the role-swapped problem sizes its own order
    const auto q = approx_with_retry(spec.objectives[i], *spec.u_set, spec.x_set,
                                     du, approx::Direction::Lower, ao);
    auto ho = hierarchy_options(opts, label + "_max");
    const auto res = hierarchy::maximize(q.poly, *spec.u_set, ho);
    if (!res.has_bound())
      throw Error("utopia: inner maximization failed for objective " +
                  std::to_string(i + 1) + " (" + res.note + ")");
    // hierarchy::maximize returns an upper bound of max q; q itself
    // under-estimates min_x f, so bounds_i <= sup_u min_x f_i needs the
    // certified value when available, otherwise the largest sampled value
    double val = res.bound;
    if (!res.certified) {
      // conservative fallback: evaluate q on a grid of U
      std::mt19937_64 rng(opts.seed + 17 * i);
      double best = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < 512; ++s) {
        const auto u = sample_point(*spec.u_set, rng);
        best = std::max(best, q.poly.eval(u));
      }
      val = best;
    }
    up.bounds[i] = val;
  }
  if (eps.empty()) {
    eps.resize(l);
    for (std::size_t i = 0; i < l; ++i) eps[i] = 0.05 * (1.0 + std::abs(up.bounds[i]));
  }
  if (eps.size() != l) throw Error("utopia: eps length mismatch");
  for (double e : eps)
    if (!(e > 0.0)) throw Error("utopia: eps must be strictly positive");
  up.eps = std::move(eps);
  up.y_u.resize(l);
  for (std::size_t i = 0; i < l; ++i) up.y_u[i] = up.bounds[i] - up.eps[i];
  return up;
}

Polynomial build_gamma(const std::vector<Polynomial>& fbar,
                       const std::vector<double>& y_u,
                       const ScalarizationConfig& cfg) {
  cfg.validate(fbar.size());
  if (cfg.chebyshev)
    throw Error("build_gamma: sup-norm scalarization is handled by chebyshev_scalarize");
  if (fbar.empty()) throw Error("build_gamma: no objectives");
  const auto space = fbar.front().space();
  Polynomial gamma(space);
  for (std::size_t i = 0; i < fbar.size(); ++i) {
    Polynomial term = fbar[i];
    term -= Polynomial::constant(space, y_u[i]);
    term *= cfg.lambda[i];
    gamma += term.pow(cfg.p);
  }
  return gamma;
}

SetDescriptor build_omega_bar(const ProblemSpec& spec,
                              const std::vector<Polynomial>& gbar) {
  std::vector<Polynomial> ineqs = spec.x_set.inequalities;
  for (const auto& g : gbar) ineqs.push_back(g);
  return make_general(spec.x_space, std::move(ineqs),
                      enclosing_radius(spec.x_set) + 1e-9);
}

hierarchy::Result solve_scalarized(const Polynomial& gamma,
                                   const SetDescriptor& omega_bar,
                                   const hierarchy::Options& opts) {
  return hierarchy::minimize(gamma, omega_bar, opts);
}

hierarchy::Result chebyshev_scalarize(const std::vector<Polynomial>& fbar,
                                      const std::vector<double>& y_u,
                                      const std::vector<double>& lambda,
                                      const SetDescriptor& omega_bar,
                                      const hierarchy::Options& opts,
                                      std::uint64_t seed) {
  const std::size_t l = fbar.size();
  if (lambda.size() != l) throw Error("chebyshev: lambda length mismatch");
  // estimate an upper bound T for the aux variable from sampled values
  std::mt19937_64 rng(seed);
  double tmax = 0.0;
  for (int s = 0; s < 512; ++s) {
    const auto x = sample_point(omega_bar, rng);
    double m = 0.0;
    for (std::size_t i = 0; i < l; ++i)
      m = std::max(m, lambda[i] * (fbar[i].eval(x) - y_u[i]));
    tmax = std::max(tmax, m);
  }
  const double t_hi = 1.5 * tmax + 1.0;

  // joint space (x, aux)
  std::vector<std::pair<std::string, std::vector<std::string>>> blocks;
  const auto& xs = *fbar.front().space();
  for (const auto& blk : xs.blocks()) {
    std::vector<std::string> vars(xs.names().begin() + blk.offset,
                                  xs.names().begin() + blk.offset + blk.size);
    blocks.emplace_back(blk.name, std::move(vars));
  }
  blocks.emplace_back("aux", std::vector<std::string>{"aux1"});
  auto aux_space = VariableSpace::make(std::move(blocks));
  const std::size_t aux_idx = aux_space->size() - 1;
  Polynomial aux = Polynomial::variable(aux_space, aux_idx);

  std::vector<Polynomial> ineqs;
  for (const auto& h : omega_bar.inequalities) ineqs.push_back(h.lift(aux_space));
  for (std::size_t i = 0; i < l; ++i) {
    Polynomial fi = fbar[i].lift(aux_space);
    fi -= Polynomial::constant(aux_space, y_u[i]);
    fi *= lambda[i];
    ineqs.push_back(aux - fi);
  }
  ineqs.push_back(aux * (Polynomial::constant(aux_space, t_hi) - aux));
  const double bound = std::hypot(enclosing_radius(omega_bar), t_hi) + 1e-9;
  SetDescriptor k = make_general(aux_space, std::move(ineqs), bound);

  hierarchy::Result res = hierarchy::minimize(aux, k, opts);
  // report minimizers in x alone
  for (auto& m : res.minimizers)
    if (m.size() == aux_space->size()) m.resize(aux_space->size() - 1);
  if (res.atoms)
    for (auto& a : res.atoms->atoms)
      if (a.point.size() == aux_space->size()) a.point.resize(aux_space->size() - 1);
  return res;
}

RobustValue robust_value(const ProblemSpec& spec, std::span<const double> x_star,
                         std::size_t i, const SweepOptions& opts) {
  if (i >= spec.num_objectives()) throw Error("robust_value: objective index");
  const Polynomial& f = spec.objectives[i];
  if (!spec.objectives_uncertain()) {
    return {f.eval(x_star), true};
  }
  const Polynomial fu = f.substitute_block("x", x_star);
  auto ho = hierarchy_options(opts, "robust_f" + std::to_string(i + 1));
  const auto res = hierarchy::maximize(fu, *spec.u_set, ho);
  if (!res.has_bound()) throw Error("robust_value: hierarchy failed (" + res.note + ")");
  return {res.bound, res.certified};
}

std::size_t SweepResult::certified_count() const {
  std::size_t n = 0;
  for (const auto& r : records)
    if (r.certified) ++n;
  return n;
}

SweepResult sweep(const ProblemSpec& spec, const SweepOptions& opts) {
  spec.validate();
  const std::size_t l = spec.num_objectives();
  const std::size_t m = spec.num_constraints();
  SweepResult out;
  out.fbar_info.resize(l);
  out.gbar_info.resize(m);

  // objective upper approximations
  for (std::size_t i = 0; i < l; ++i) {
    if (!spec.objectives_uncertain()) {
      out.fbar.push_back(spec.objectives[i]);
      continue;
    }
    const std::uint32_t d = (i < opts.objective_degrees.size() &&
                             opts.objective_degrees[i] > 0)
                                ? opts.objective_degrees[i]
                                : std::max<std::uint32_t>(1, degree_in_x(spec.objectives[i]));
    auto ao = approx_options(opts, "fbar" + std::to_string(i + 1) + "_d" + std::to_string(d));
    auto va = approx_with_retry(spec.objectives[i], spec.x_set, *spec.u_set, d,
                                approx::Direction::Upper, ao);
    out.fbar.push_back(va.poly);
    out.fbar_info[i] = std::move(va);
  }
  // constraint lower approximations
  for (std::size_t j = 0; j < m; ++j) {
    if (!spec.constraints_uncertain()) {
      out.gbar.push_back(spec.constraints[j]);
      continue;
    }
    const std::uint32_t e = (j < opts.constraint_degrees.size() &&
                             opts.constraint_degrees[j] > 0)
                                ? opts.constraint_degrees[j]
                                : std::max<std::uint32_t>(1, degree_in_x(spec.constraints[j]));
    auto ao = approx_options(opts, "gbar" + std::to_string(j + 1) + "_e" + std::to_string(e));
    auto va = approx_with_retry(spec.constraints[j], spec.x_set, *spec.v_set, e,
                                approx::Direction::Lower, ao);
    out.gbar.push_back(va.poly);
    out.gbar_info[j] = std::move(va);
  }

  out.utopia = utopia_point(spec, opts.eps, opts);
  const SetDescriptor omega_bar = build_omega_bar(spec, out.gbar);

  // cells in deterministic (p, lambda) order
  struct Cell {
    ScalarizationConfig cfg;
    std::size_t index;
  };
  const auto grid = opts.lambda_grid.empty() ? default_lambda_grid(l) : opts.lambda_grid;
  std::vector<Cell> cells;
  for (const auto p : opts.p_list)
    for (const auto& lam : grid)
      cells.push_back({ScalarizationConfig{lam, p, false}, cells.size()});
  if (opts.include_chebyshev)
    for (const auto& lam : grid)
      cells.push_back({ScalarizationConfig{lam, 0, true}, cells.size()});

  std::vector<std::vector<ParetoRecord>> cell_records(cells.size());
  std::vector<CellDiagnostic> cell_diag(cells.size());

  auto run_cell = [&](const Cell& cell) {
    CellDiagnostic diag;
    diag.p = cell.cfg.p;
    diag.chebyshev = cell.cfg.chebyshev;
    diag.lambda = cell.cfg.lambda;
    std::ostringstream label;
    label << (cell.cfg.chebyshev ? "cell_pinf" : "cell_p" + std::to_string(cell.cfg.p))
          << "_lam";
    label.precision(4);
    for (std::size_t i = 0; i + 1 < cell.cfg.lambda.size(); ++i)
      label << (i ? "-" : "") << cell.cfg.lambda[i];
    try {
      hierarchy::Result res;
      if (cell.cfg.chebyshev) {
        auto ho = hierarchy_options(opts, label.str());
        res = chebyshev_scalarize(out.fbar, out.utopia.y_u, cell.cfg.lambda,
                                  omega_bar, ho, opts.seed + cell.index);
      } else {
        const Polynomial gamma = build_gamma(out.fbar, out.utopia.y_u, cell.cfg);
        const std::uint32_t half = (gamma.degree() + 1) / 2;
        if (basis_size(spec.nx(), half) > opts.degree_guard_rows) {
          diag.ok = false;
          diag.message = "degree guard: moment matrix would have " +
                         std::to_string(basis_size(spec.nx(), half)) + " rows";
          cell_diag[cell.index] = diag;
          return;
        }
        auto ho = hierarchy_options(opts, label.str());
        ho.t_max = hierarchy::min_order(gamma, omega_bar) + opts.hierarchy_extra_orders;
        res = solve_scalarized(gamma, omega_bar, ho);
      }
      if (res.infeasible) {
        diag.ok = false;
        diag.message = "empty approximated feasible set: " + res.note;
        cell_diag[cell.index] = diag;
        return;
      }
      for (const auto& xs : res.minimizers) {
        ParetoRecord rec;
        rec.x_star = xs;
        rec.lambda = cell.cfg.lambda;
        rec.p = cell.cfg.p;
        rec.chebyshev = cell.cfg.chebyshev;
        rec.certified = res.certified;
        for (std::size_t i = 0; i < l; ++i)
          rec.approx_values.push_back(out.fbar[i].eval(xs));
        for (std::size_t i = 0; i < l; ++i) {
          const auto rv = robust_value(spec, xs, i, opts);
          rec.robust_values.push_back(rv.value);
          rec.certified = rec.certified && rv.certified;
        }
        rec.certified = rec.certified && membership(omega_bar, xs, opts.feas_tol);
        cell_records[cell.index].push_back(std::move(rec));
      }
      diag.ok = true;
      if (!res.certified) diag.message = "uncertified cell: " + res.note;
    } catch (const std::exception& e) {
      diag.ok = false;
      diag.message = e.what();
    }
    cell_diag[cell.index] = diag;
  };

  std::size_t nthreads = opts.threads ? opts.threads : std::thread::hardware_concurrency();
  nthreads = std::max<std::size_t>(1, std::min(nthreads, cells.size()));
  if (nthreads <= 1) {
    for (const auto& c : cells) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells.size()) break;
          run_cell(cells[i]);
        }
      });
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (auto& r : cell_records[i]) out.records.push_back(std::move(r));
    out.diagnostics.push_back(std::move(cell_diag[i]));
  }
  return out;
}

std::vector<ParetoRecord> pareto_filter(std::vector<ParetoRecord> records,
                                        double tol) {
  std::vector<ParetoRecord> kept;
  for (std::size_t i = 0; i < records.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < records.size() && !dominated; ++j) {
      if (i == j) continue;
      const auto& a = records[j].robust_values;
      const auto& b = records[i].robust_values;
      if (a.size() != b.size()) throw Error("pareto_filter: mixed dimensions");
      bool le = true, strict = false;
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k] + tol) le = false;
        if (a[k] < b[k] - tol) strict = true;
      }
      dominated = le && strict;
    }
    if (!dominated) kept.push_back(records[i]);
  }
  return kept;
}

}  // namespace rvopt::pipeline
