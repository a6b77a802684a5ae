// Primal-dual path-following interior-point method for
//
//   min c^T y   s.t.   S(y) = A_0 + sum_k y_k A_k  PSD  (block diagonal),
//                      E y = d,
//
// in the style of the classic SDPA / HKM scheme: the slack S is kept as an
// independent PD iterate with a primal residual R_P = A_0 + A(y) - S driven
// to zero, X is the dual block matrix, mu the equality multipliers.
// KKT:  A*(X) + E^T mu = c,   E y = d,   R_P = 0,   X S = 0.
//
// Newton direction for target nu (predictor nu=0, corrector nu=sigma*mubar
// with the Mehrotra cross term dXa*dSa):
//   dS = A(dy) + R_P
//   dX = (nu I - X S - X dS - dXa dSa) S^{-1}, then symmetrized
//   (B + reg I) dy - E^T dmu = nu g - c + E^T mu - A*(X R_P S^{-1})
//                              - A*(dXa dSa S^{-1})
//   E dy = d - E y
// with B_kl = <A_k, X A_l S^{-1}> (symmetric positive definite) and
// g = A*(S^{-1}). The bordered system is solved by block elimination
// through the Cholesky factor of B.
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

#include "rvopt/kernels.hpp"
#include "rvopt/sdp.hpp"

namespace rvopt {

namespace {

using la::Cholesky;
using la::Matrix;

struct Atom {
  int r, c;
  double v;
};

// Per-block view of the data: dense A_0 and, for each variable that touches
// the block, the full list of (row, col, value) atoms of its coefficient
// matrix (symmetric entries expanded to both positions).
struct BlockData {
  int size = 0;
  Matrix a0;
  std::vector<int> vars;
  std::vector<std::vector<Atom>> atoms;
};

std::vector<BlockData> build_blocks(const SdpProblem& p) {
  std::vector<BlockData> out;
  out.reserve(p.blocks.size());
  for (const auto& blk : p.blocks) {
    BlockData bd;
    bd.size = blk.size;
    bd.a0 = Matrix(blk.size, blk.size);
    std::vector<int> slot(p.num_vars, -1);
    for (const auto& e : blk.entries) {
      if (e.var == SdpEntry::kConstTerm) {
        bd.a0(e.i, e.j) += e.value;
        if (e.i != e.j) bd.a0(e.j, e.i) += e.value;
        continue;
      }
      int s = slot[e.var];
      if (s < 0) {
        s = static_cast<int>(bd.vars.size());
        slot[e.var] = s;
        bd.vars.push_back(e.var);
        bd.atoms.emplace_back();
      }
      bd.atoms[s].push_back({e.i, e.j, e.value});
      if (e.i != e.j) bd.atoms[s].push_back({e.j, e.i, e.value});
    }
    out.push_back(std::move(bd));
  }
  return out;
}

// out_k += sum over atoms of A_k of v * M(r, c)
void accumulate_adjoint(const BlockData& bd, const Matrix& m,
                        std::vector<double>& out) {
  for (std::size_t s = 0; s < bd.vars.size(); ++s) {
    double acc = 0.0;
    for (const auto& a : bd.atoms[s]) acc += a.v * m(a.r, a.c);
    out[bd.vars[s]] += acc;
  }
}

Matrix assemble(const BlockData& bd, const std::vector<double>& y) {
  Matrix m = bd.a0;
  for (std::size_t s = 0; s < bd.vars.size(); ++s) {
    const double yk = y[bd.vars[s]];
    if (yk == 0.0) continue;
    for (const auto& a : bd.atoms[s]) m(a.r, a.c) += yk * a.v;
  }
  return m;
}

// Largest step alpha for which M + alpha*dM stays PSD, bounded by 1.0.
double max_step(const Cholesky& chol_m, const Matrix& dm) {
  Matrix u = dm;
  chol_m.forward_inplace(u);
  Matrix ut = u.transposed();
  chol_m.forward_inplace(ut);
  const double lmin = la::min_eigenvalue(ut);
  if (lmin >= -1e-14) return 1.0;
  return std::min(1.0, -1.0 / lmin);
}

struct EqData {
  // dense equality matrix rows (p x m) and rhs
  Matrix e;
  std::vector<double> d;
  std::size_t rows = 0;
};

EqData build_eq(const SdpProblem& p) {
  EqData eq;
  eq.rows = p.equalities.size();
  eq.e = Matrix(eq.rows, p.num_vars);
  eq.d.resize(eq.rows);
  for (std::size_t r = 0; r < eq.rows; ++r) {
    for (const auto& [k, v] : p.equalities[r].coeffs) eq.e(r, k) += v;
    eq.d[r] = p.equalities[r].rhs;
  }
  return eq;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SdpSolverOptions& opts) {
  p.validate();
  const int m = p.num_vars;
  const auto blocks = build_blocks(p);
  const auto eq = build_eq(p);
  const std::size_t neq = eq.rows;
  const std::size_t nb = blocks.size();

  double total_dim = 0.0;
  for (const auto& b : blocks) total_dim += b.size;

  double data_scale = 1.0;
  for (const auto& b : blocks) data_scale = std::max(data_scale, b.a0.max_abs());
  for (double c : p.objective) data_scale = std::max(data_scale, std::abs(c));
  const double init = opts.init_scale > 0.0
                          ? opts.init_scale
                          : 10.0 * std::max(std::sqrt(total_dim), data_scale);

  SdpSolution sol;
  sol.y.assign(m, 0.0);
  sol.eq_duals.assign(neq, 0.0);
  std::vector<Matrix> s_mats(nb), x_mats(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    s_mats[b] = Matrix::identity(blocks[b].size);
    kern::scal(init, s_mats[b].data(), std::size_t(blocks[b].size) * blocks[b].size);
    x_mats[b] = Matrix::identity(blocks[b].size);
    kern::scal(init, x_mats[b].data(), std::size_t(blocks[b].size) * blocks[b].size);
  }

  const double a0_norm = [&] {
    double s = 1.0;
    for (const auto& b : blocks) s = std::max(s, b.a0.frobenius_norm());
    return s;
  }();

  // Equality rows with a single coefficient touching a variable no other row
  // uses pin the corresponding dual-feasibility row outright; their
  // multipliers can be recomputed exactly from X at every iterate, which
  // keeps the dual residual from degrading as the barrier parameter shrinks.
  std::vector<std::tuple<std::size_t, int, double>> mu_refresh;
  {
    std::vector<int> touches(m, 0);
    for (const auto& e : p.equalities)
      for (const auto& [k, v] : e.coeffs) touches[k]++;
    for (std::size_t r = 0; r < neq; ++r) {
      if (p.equalities[r].coeffs.size() == 1) {
        const auto [k, v] = p.equalities[r].coeffs.front();
        if (touches[k] == 1 && v != 0.0) mu_refresh.emplace_back(r, k, v);
      }
    }
  }
  const double c_norm = 1.0 + inf_norm(p.objective);
  const double d_norm = 1.0 + inf_norm(eq.d);

  std::vector<Matrix> r_p(nb), s_inv(nb), ds(nb), dx(nb), ds_aff(nb), dx_aff(nb);
  std::vector<Cholesky> s_chol, x_chol;
  Matrix bmat(m, m);
  std::vector<double> g(m), adj_x(m), rhs1(m), dy(m), dmu(neq), r_d(m), r_e(neq);

  auto compute_objs = [&] {
    sol.primal_obj = kern::dot(p.objective.data(), sol.y.data(), m);
    double dobj = 0.0;
    for (std::size_t b = 0; b < nb; ++b) dobj -= la::inner(blocks[b].a0, x_mats[b]);
    for (std::size_t r = 0; r < neq; ++r) dobj += eq.d[r] * sol.eq_duals[r];
    sol.dual_obj = dobj;
  };

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) try {
    // factor current iterates; back off along the previous direction if
    // rounding pushed an iterate off the cone
    s_chol.clear();
    x_chol.clear();
    bool pd = true;
    for (std::size_t b = 0; b < nb; ++b) {
      s_chol.emplace_back(s_mats[b]);
      x_chol.emplace_back(x_mats[b]);
      if (!s_chol.back().ok || !x_chol.back().ok) pd = false;
    }
    if (!pd) {
      sol.status = SdpStatus::NumericalFailure;
      break;
    }
    for (std::size_t b = 0; b < nb; ++b) s_inv[b] = s_chol[b].inverse();

    // residuals
    double mu_bar = 0.0;
    for (std::size_t b = 0; b < nb; ++b) mu_bar += la::inner(x_mats[b], s_mats[b]);
    mu_bar /= total_dim;

    double pres_abs = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      r_p[b] = assemble(blocks[b], sol.y);
      r_p[b].add_scaled(-1.0, s_mats[b]);
      pres_abs = std::max(pres_abs, r_p[b].frobenius_norm());
    }
    for (std::size_t r = 0; r < neq; ++r)
      r_e[r] = eq.d[r] - kern::dot(eq.e.row(r), sol.y.data(), m);
    pres_abs = std::max(pres_abs, inf_norm(r_e));
    const double pres = pres_abs / (1.0 + std::max(a0_norm, d_norm));

    std::fill(adj_x.begin(), adj_x.end(), 0.0);
    for (std::size_t b = 0; b < nb; ++b) accumulate_adjoint(blocks[b], x_mats[b], adj_x);
    for (const auto& [r, k, v] : mu_refresh)
      sol.eq_duals[r] = (p.objective[k] - adj_x[k]) / v;
    for (int k = 0; k < m; ++k) {
      r_d[k] = p.objective[k] - adj_x[k];
      for (std::size_t r = 0; r < neq; ++r) r_d[k] -= eq.e(r, k) * sol.eq_duals[r];
    }
    const double dres_abs = inf_norm(r_d);
    const double dres = dres_abs / c_norm;

    compute_objs();
    const double gap = std::abs(sol.primal_obj - sol.dual_obj) /
                       (1.0 + std::max(std::abs(sol.primal_obj), std::abs(sol.dual_obj)));
    sol.gap = gap;
    sol.primal_residual = pres;
    sol.dual_residual = dres;

    if (opts.trace)
      std::fprintf(stderr,
                   "  it %3d  pobj % .10e dobj % .10e gap %.2e pres %.2e dres %.2e mu %.2e\n",
                   iter, sol.primal_obj, sol.dual_obj, gap, pres, dres, mu_bar);

    const double mu_rel = mu_bar * total_dim / (1.0 + std::abs(sol.primal_obj));
    if (pres <= 10.0 * opts.tol && dres <= 10.0 * opts.tol && gap <= opts.tol &&
        mu_rel <= 100.0 * opts.tol) {
      sol.status = SdpStatus::Optimal;
      break;
    }

    // divergence heuristics (infeasibility is reported, not certified):
    // iterates running off along a ray whose residual is small relative to
    // the iterate's size point at an improving ray of the other side
    double x_norm = 0.0;
    for (std::size_t b = 0; b < nb; ++b) x_norm = std::max(x_norm, x_mats[b].max_abs());
    x_norm = std::max(x_norm, inf_norm(sol.eq_duals));
    const double y_norm = inf_norm(sol.y);
    if (x_norm > 1e8 * init && dres_abs / (1.0 + x_norm) < 1e-6) {
      sol.status = SdpStatus::PrimalInfeasible;
      break;
    }
    if (y_norm > 1e8 * std::max(1.0, data_scale) &&
        pres_abs / (1.0 + y_norm) < 1e-6) {
      sol.status = SdpStatus::DualInfeasible;
      break;
    }
    if (x_norm > 1e60 || y_norm > 1e60 || mu_bar > 1e60) {
      sol.status = SdpStatus::NumericalFailure;
      break;
    }

    // Schur complement B_kl = <A_k, X A_l S^{-1}>, assembled per block from
    // the atom lists: tr(E_{rc} X E_{r'c'} S^{-1}) = X(c, r') S^{-1}(c', r).
    bmat.fill(0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& bd = blocks[b];
      const Matrix& x = x_mats[b];
      const Matrix& si = s_inv[b];
      const std::size_t nv = bd.vars.size();
      for (std::size_t sa = 0; sa < nv; ++sa) {
        const int k = bd.vars[sa];
        for (std::size_t sb = sa; sb < nv; ++sb) {
          const int l = bd.vars[sb];
          double acc = 0.0;
          for (const auto& a : bd.atoms[sa]) {
            const double* xrow = x.row(a.c);
            const double* srow = si.row(a.r);
            double t = 0.0;
            for (const auto& bt : bd.atoms[sb]) t += bt.v * xrow[bt.r] * srow[bt.c];
            acc += a.v * t;
          }
          bmat(k, l) += acc;
          if (k != l) bmat(l, k) += acc;
        }
      }
    }
    double btrace = 0.0;
    for (int k = 0; k < m; ++k) btrace += bmat(k, k);
    double reg = opts.schur_regularization * std::max(1.0, btrace / m);
    Cholesky* bchol = nullptr;
    Cholesky bfac(bmat, 0.0);
    while (!bfac.ok) {
      for (int k = 0; k < m; ++k) bmat(k, k) += reg;
      reg *= 100.0;
      bfac = Cholesky(bmat, 0.0);
      if (reg > 1e-2 * std::max(1.0, btrace / m)) break;
    }
    if (!bfac.ok) {
      sol.status = SdpStatus::NumericalFailure;
      break;
    }
    bchol = &bfac;

    // bordered-system helpers
    Matrix w;  // B^{-1} E^T
    Cholesky* mchol = nullptr;
    Cholesky mfac(Matrix::identity(1), 0.0);
    if (neq > 0) {
      w = eq.e.transposed();
      bchol->solve_inplace(w);
      Matrix mm(neq, neq);
      kern::gemm_nn(neq, neq, m, 1.0, eq.e.data(), m, w.data(), neq, mm.data(), neq);
      mfac = Cholesky(mm, 0.0);
      if (!mfac.ok) {
        sol.status = SdpStatus::NumericalFailure;
        break;
      }
      mchol = &mfac;
    }

    auto solve_direction = [&](double nu, bool corrector) {
      // rhs1 = nu g - c + E^T mu - A*(X R_P S^{-1}) - [A*(dXa dSa S^{-1})]
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t b = 0; b < nb; ++b) accumulate_adjoint(blocks[b], s_inv[b], g);
      for (int k = 0; k < m; ++k) {
        rhs1[k] = nu * g[k] - p.objective[k];
        for (std::size_t r = 0; r < neq; ++r) rhs1[k] += eq.e(r, k) * sol.eq_duals[r];
      }
      for (std::size_t b = 0; b < nb; ++b) {
        const int n = blocks[b].size;
        Matrix t1(n, n);
        la::gemm(1.0, r_p[b], s_inv[b], t1);
        Matrix t2(n, n);
        la::gemm(1.0, x_mats[b], t1, t2);
        if (corrector) {
          Matrix t3(n, n);
          la::gemm(1.0, dx_aff[b], ds_aff[b], t3);
          la::gemm(1.0, t3, s_inv[b], t2);
        }
        std::vector<double> tmp(m, 0.0);
        accumulate_adjoint(blocks[b], t2, tmp);
        for (int k = 0; k < m; ++k) rhs1[k] -= tmp[k];
      }
      // bordered elimination: B dy - E^T dmu = rhs1, E dy = r_e
      auto bordered_solve = [&](const std::vector<double>& b1,
                                const std::vector<double>& b2,
                                std::vector<double>& sy, std::vector<double>& smu) {
        sy = b1;
        bchol->solve_inplace(sy);
        if (neq > 0) {
          for (std::size_t r = 0; r < neq; ++r)
            smu[r] = b2[r] - kern::dot(eq.e.row(r), sy.data(), m);
          mchol->solve_inplace(smu);
          for (int k = 0; k < m; ++k)
            for (std::size_t r = 0; r < neq; ++r) sy[k] += w(k, r) * smu[r];
        }
      };
      bordered_solve(rhs1, r_e, dy, dmu);
      // one step of iterative refinement
      {
        std::vector<double> res1(m, 0.0), res2(neq, 0.0);
        for (int k = 0; k < m; ++k) {
          double acc = rhs1[k] - kern::dot(bmat.row(k), dy.data(), m);
          for (std::size_t r = 0; r < neq; ++r) acc += eq.e(r, k) * dmu[r];
          res1[k] = acc;
        }
        for (std::size_t r = 0; r < neq; ++r)
          res2[r] = r_e[r] - kern::dot(eq.e.row(r), dy.data(), m);
        std::vector<double> cy(m), cmu(neq);
        bordered_solve(res1, res2, cy, cmu);
        for (int k = 0; k < m; ++k) dy[k] += cy[k];
        for (std::size_t r = 0; r < neq; ++r) dmu[r] += cmu[r];
      }
      // dS = A(dy) + R_P ; dX = nu Sinv - X - X dS Sinv - corr, symmetrized
      for (std::size_t b = 0; b < nb; ++b) {
        const auto& bd = blocks[b];
        const int n = bd.size;
        ds[b] = r_p[b];
        for (std::size_t sidx = 0; sidx < bd.vars.size(); ++sidx) {
          const double v = dy[bd.vars[sidx]];
          if (v == 0.0) continue;
          for (const auto& a : bd.atoms[sidx]) ds[b](a.r, a.c) += v * a.v;
        }
        Matrix t1(n, n);
        la::gemm(1.0, ds[b], s_inv[b], t1);
        dx[b] = s_inv[b];
        kern::scal(nu, dx[b].data(), std::size_t(n) * n);
        dx[b].add_scaled(-1.0, x_mats[b]);
        la::gemm(-1.0, x_mats[b], t1, dx[b]);
        if (corrector) {
          Matrix t3(n, n);
          la::gemm(1.0, dx_aff[b], ds_aff[b], t3);
          la::gemm(-1.0, t3, s_inv[b], dx[b]);
        }
        dx[b].symmetrize();
      }
    };

    auto step_bounds = [&](double& ap, double& ad) {
      ap = 1.0;
      ad = 1.0;
      for (std::size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(s_chol[b], ds[b]));
        ad = std::min(ad, max_step(x_chol[b], dx[b]));
      }
    };

    // predictor
    solve_direction(0.0, false);
    double ap_aff, ad_aff;
    step_bounds(ap_aff, ad_aff);
    ap_aff = std::min(1.0, opts.step_fraction * ap_aff);
    ad_aff = std::min(1.0, opts.step_fraction * ad_aff);
    double mu_aff = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      Matrix xs = x_mats[b];
      xs.add_scaled(ad_aff, dx[b]);
      Matrix ss = s_mats[b];
      ss.add_scaled(ap_aff, ds[b]);
      mu_aff += la::inner(xs, ss);
    }
    mu_aff = std::max(mu_aff / total_dim, 0.0);
    double sigma = std::pow(mu_aff / std::max(mu_bar, 1e-300), 3.0);
    sigma = std::min(std::max(sigma, 1e-8), 1.0);
    for (std::size_t b = 0; b < nb; ++b) {
      ds_aff[b] = ds[b];
      dx_aff[b] = dx[b];
    }

    // corrector
    solve_direction(sigma * mu_bar, true);
    double ap, ad;
    step_bounds(ap, ad);
    ap = std::min(1.0, opts.step_fraction * ap);
    ad = std::min(1.0, opts.step_fraction * ad);

    // take the step, backing off if rounding broke positive definiteness
    bool step_failed = false;
    for (int tries = 0;; ++tries) {
      bool ok = true;
      for (std::size_t b = 0; b < nb && ok; ++b) {
        Matrix ss = s_mats[b];
        ss.add_scaled(ap, ds[b]);
        ok = Cholesky(ss, 0.0).ok;
      }
      for (std::size_t b = 0; b < nb && ok; ++b) {
        Matrix xx = x_mats[b];
        xx.add_scaled(ad, dx[b]);
        ok = Cholesky(xx, 0.0).ok;
      }
      if (ok) break;
      ap *= 0.8;
      ad *= 0.8;
      if (tries > 20) {
        step_failed = true;
        break;
      }
    }
    if (step_failed) {
      sol.status = SdpStatus::NumericalFailure;
      break;
    }

    for (std::size_t b = 0; b < nb; ++b) {
      s_mats[b].add_scaled(ap, ds[b]);
      x_mats[b].add_scaled(ad, dx[b]);
    }
    for (int k = 0; k < m; ++k) sol.y[k] += ap * dy[k];
    for (std::size_t r = 0; r < neq; ++r) sol.eq_duals[r] += ad * dmu[r];

    bool bad = false;
    for (double v : sol.y)
      if (!std::isfinite(v)) bad = true;
    if (bad) {
      sol.status = SdpStatus::NumericalFailure;
      break;
    }
  } catch (const std::exception&) {
    // overflow inside a factorization or eigensolve on a diverging iterate
    sol.status = SdpStatus::NumericalFailure;
    break;
  }

  if (iter >= opts.max_iter) sol.status = SdpStatus::MaxIterations;
  compute_objs();
  sol.iterations = iter;
  sol.block_duals = x_mats;
  return sol;
}

}  // namespace rvopt
