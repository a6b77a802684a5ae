#include "rvopt/moment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rvopt {

void TruncatedMomentSequence::check() const {
  if (values.size() != basis_size(nvars(), degree))
    throw Error("tms: value count does not match basis size");
  if (std::abs(values[0] - 1.0) > 1e-9)
    throw Error("tms: not normalized (y_0 != 1)");
}

double riesz(const TruncatedMomentSequence& y, const Polynomial& p) {
  if (p.degree() > y.degree) throw Error("riesz: polynomial degree exceeds tms degree");
  const MonomialBasis bas(y.nvars(), y.degree);
  double acc = 0.0;
  for (const auto& [mono, c] : p.terms()) acc += c * y.values[bas.index_of(mono)];
  return acc;
}

la::Matrix moment_matrix(const TruncatedMomentSequence& y, std::uint32_t d) {
  if (y.degree < 2 * d) throw Error("moment_matrix: tms degree too small");
  const MonomialBasis half(y.nvars(), d);
  const MonomialBasis full(y.nvars(), y.degree);
  la::Matrix m(half.size(), half.size());
  for (std::size_t a = 0; a < half.size(); ++a)
    for (std::size_t b = a; b < half.size(); ++b) {
      const double v = y.values[full.index_of(half[a] + half[b])];
      m(a, b) = v;
      m(b, a) = v;
    }
  return m;
}

la::Matrix localizing_matrix(const TruncatedMomentSequence& y,
                             const Polynomial& g, std::uint32_t d) {
  if (y.degree < 2 * d + g.degree())
    throw Error("localizing_matrix: tms degree too small");
  const MonomialBasis half(y.nvars(), d);
  const MonomialBasis full(y.nvars(), y.degree);
  la::Matrix m(half.size(), half.size());
  for (std::size_t a = 0; a < half.size(); ++a)
    for (std::size_t b = a; b < half.size(); ++b) {
      double v = 0.0;
      const Monomial ab = half[a] + half[b];
      for (const auto& [kappa, gk] : g.terms())
        v += gk * y.values[full.index_of(ab + kappa)];
      m(a, b) = v;
      m(b, a) = v;
    }
  return m;
}

std::size_t numerical_rank(const la::Matrix& sym, double ratio) {
  const auto eig = la::sym_eig(sym);
  double smax = 0.0;
  for (double v : eig.values) smax = std::max(smax, std::abs(v));
  if (smax == 0.0) return 0;
  std::size_t r = 0;
  for (double v : eig.values)
    if (std::abs(v) >= ratio * smax) ++r;
  return r;
}

std::optional<FlatTruncation> flat_truncation(const TruncatedMomentSequence& y,
                                              std::uint32_t d0,
                                              double rank_ratio) {
  if (d0 < 1) d0 = 1;
  const std::uint32_t dmax = y.degree / 2;
  if (dmax < d0) return std::nullopt;
  std::vector<std::size_t> ranks(dmax + 1);
  for (std::uint32_t t = 0; t <= dmax; ++t)
    ranks[t] = numerical_rank(moment_matrix(y, t), rank_ratio);
  for (std::uint32_t t = d0; t <= dmax; ++t) {
    if (ranks[t - d0] == ranks[t] && ranks[t] > 0)
      return FlatTruncation{t, ranks[t]};
  }
  return std::nullopt;
}

std::optional<AtomicMeasure> extract_atoms(const TruncatedMomentSequence& y,
                                           std::uint32_t t, std::size_t r,
                                           const ExtractionOptions& opts) {
  const std::size_t n = y.nvars();
  const MonomialBasis half(n, t);
  const std::size_t st = half.size();
  if (r == 0 || r > st) return std::nullopt;

  // rank-revealing factorization M_t = V V^T, V of width r
  const la::Matrix mt = moment_matrix(y, t);
  const auto eig = la::sym_eig(mt);
  la::Matrix v(st, r);
  for (std::size_t k = 0; k < r; ++k) {
    const std::size_t idx = st - 1 - k;  // largest eigenvalues
    const double lam = eig.values[idx];
    if (lam <= 0.0) return std::nullopt;
    const double s = std::sqrt(lam);
    for (std::size_t i = 0; i < st; ++i) v(i, k) = s * eig.vectors(i, idx);
  }

  // column-echelon: row-reduce V^T processing monomial columns in graded
  // order, so pivots land on the lowest-degree monomials
  la::Matrix c = v.transposed();  // r x st
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  const double cnorm = c.max_abs();
  for (std::size_t col = 0; col < st && row < r; ++col) {
    std::size_t best = row;
    for (std::size_t i = row + 1; i < r; ++i)
      if (std::abs(c(i, col)) > std::abs(c(best, col))) best = i;
    if (std::abs(c(best, col)) < 1e-9 * cnorm) continue;
    if (best != row)
      for (std::size_t j = 0; j < st; ++j) std::swap(c(row, j), c(best, j));
    const double piv = c(row, col);
    for (std::size_t j = 0; j < st; ++j) c(row, j) /= piv;
    for (std::size_t i = 0; i < r; ++i) {
      if (i == row) continue;
      const double f = c(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < st; ++j) c(i, j) -= f * c(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  if (pivots.size() < r) return std::nullopt;

  // basis monomials must leave room for multiplication by one variable
  const std::uint32_t d0 = std::max<std::uint32_t>(opts.d0, 1);
  for (std::size_t p : pivots)
    if (half[p].degree() + 1 > t) return std::nullopt;

  // multiplication matrices: row j of N_i holds the coordinates of
  // x_i * b_j in the pivot basis; coordinates of any monomial m are C(:, m)
  std::vector<la::Matrix> nmats(n, la::Matrix(r, r));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      Monomial shifted = half[pivots[j]];
      shifted.exponents[i] += 1;
      const std::size_t col = half.index_of(shifted);
      for (std::size_t k = 0; k < r; ++k) nmats[i](j, k) = c(k, col);
    }
  }

  // random convex combination, then its Schur basis diagonalizes all N_i
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  std::vector<double> w(n);
  double wsum = 0.0;
  for (auto& x : w) {
    x = unit(rng);
    wsum += x;
  }
  la::Matrix nmix(r, r);
  for (std::size_t i = 0; i < n; ++i) nmix.add_scaled(w[i] / wsum, nmats[i]);
  la::Matrix q, tt;
  if (!la::real_schur(nmix, q, tt)) return std::nullopt;

  AtomicMeasure mu;
  mu.atoms.resize(r);
  for (std::size_t j = 0; j < r; ++j) {
    mu.atoms[j].point.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      // q_j^T N_i q_j
      double acc = 0.0;
      for (std::size_t a = 0; a < r; ++a) {
        double row_dot = 0.0;
        for (std::size_t b = 0; b < r; ++b) row_dot += nmats[i](a, b) * q(b, j);
        acc += q(a, j) * row_dot;
      }
      mu.atoms[j].point[i] = acc;
    }
  }

  // weights by least squares against the moments up to degree 2(t - d0)
  const std::uint32_t fit_deg = std::min(y.degree, 2 * (t - std::min(t, d0)));
  const MonomialBasis fit(n, fit_deg);
  const MonomialBasis full(n, y.degree);
  la::Matrix vdm(fit.size(), r);
  for (std::size_t a = 0; a < fit.size(); ++a)
    for (std::size_t j = 0; j < r; ++j) {
      double m = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::uint32_t e = 0; e < fit[a].exponents[i]; ++e)
          m *= mu.atoms[j].point[i];
      vdm(a, j) = m;
    }
  std::vector<double> rhs(fit.size());
  for (std::size_t a = 0; a < fit.size(); ++a)
    rhs[a] = y.values[full.index_of(fit[a])];
  const auto weights = la::least_squares(vdm, rhs);
  double total = 0.0;
  for (std::size_t j = 0; j < r; ++j) {
    if (!(weights[j] > 1e-8)) return std::nullopt;
    mu.atoms[j].weight = weights[j];
    total += weights[j];
  }
  if (std::abs(total - 1.0) > 1e-4) return std::nullopt;

  // re-synthesized moments must reproduce y on the fitted range
  double worst = 0.0;
  for (std::size_t a = 0; a < fit.size(); ++a) {
    double synth = 0.0;
    for (std::size_t j = 0; j < r; ++j) synth += weights[j] * vdm(a, j);
    worst = std::max(worst, std::abs(synth - rhs[a]));
  }
  if (worst > opts.resynth_tol) return std::nullopt;
  return mu;
}

TruncatedMomentSequence synthesize_moments(const AtomicMeasure& mu,
                                           VariableSpace::Ptr space,
                                           std::uint32_t degree) {
  TruncatedMomentSequence y;
  y.space = std::move(space);
  y.degree = degree;
  const MonomialBasis bas(y.nvars(), degree);
  y.values.assign(bas.size(), 0.0);
  for (const auto& atom : mu.atoms) {
    for (std::size_t a = 0; a < bas.size(); ++a) {
      double m = 1.0;
      for (std::size_t i = 0; i < y.nvars(); ++i)
        for (std::uint32_t e = 0; e < bas[a].exponents[i]; ++e) m *= atom.point[i];
      y.values[a] += atom.weight * m;
    }
  }
  return y;
}

}  // namespace rvopt
