#include "rvopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rvopt/kernels.hpp"

namespace rvopt::la {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::add_scaled(double a, const Matrix& other) {
  kern::axpy(a, other.data(), data(), d_.size());
}

void Matrix::symmetrize() {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j) {
      const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = v;
      (*this)(j, i) = v;
    }
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius_norm() const {
  return std::sqrt(kern::dot(data(), data(), d_.size()));
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : d_) m = std::max(m, std::abs(v));
  return m;
}

void gemm(double alpha, const Matrix& a, const Matrix& b, Matrix& c) {
  kern::gemm_nn(a.rows(), b.cols(), a.cols(), alpha, a.data(), a.cols(),
                b.data(), b.cols(), c.data(), c.cols());
}

void gemm_nt(double alpha, const Matrix& a, const Matrix& b, Matrix& c) {
  kern::gemm_nt(a.rows(), b.rows(), a.cols(), alpha, a.data(), a.cols(),
                b.data(), b.cols(), c.data(), c.cols());
}

double inner(const Matrix& a, const Matrix& b) {
  return kern::dot(a.data(), b.data(), a.rows() * a.cols());
}

bool cholesky_inplace(Matrix& a, double pivot_tol) {
  const std::size_t n = a.rows();
  constexpr std::size_t kBlock = 64;
  for (std::size_t k0 = 0; k0 < n; k0 += kBlock) {
    const std::size_t kb = std::min(kBlock, n - k0);
    const std::size_t kend = k0 + kb;
    // diagonal block, unblocked
    for (std::size_t j = k0; j < kend; ++j) {
      const double d =
          a(j, j) - kern::dot(a.row(j) + k0, a.row(j) + k0, j - k0);
      if (!(d > pivot_tol)) return false;
      a(j, j) = std::sqrt(d);
      const double inv = 1.0 / a(j, j);
      for (std::size_t i = j + 1; i < kend; ++i)
        a(i, j) = (a(i, j) - kern::dot(a.row(i) + k0, a.row(j) + k0, j - k0)) * inv;
    }
    if (kend == n) break;
    // panel below the diagonal block
    for (std::size_t j = k0; j < kend; ++j) {
      const double inv = 1.0 / a(j, j);
      for (std::size_t i = kend; i < n; ++i)
        a(i, j) = (a(i, j) - kern::dot(a.row(i) + k0, a.row(j) + k0, j - k0)) * inv;
    }
    // trailing update in row strips, lower triangle only
    constexpr std::size_t kStrip = 96;
    for (std::size_t i0 = kend; i0 < n; i0 += kStrip) {
      const std::size_t ib = std::min(kStrip, n - i0);
      const std::size_t ncols = i0 + ib - kend;
      kern::gemm_nt(ib, ncols, kb, -1.0, a.row(i0) + k0, n, a.row(kend) + k0,
                    n, a.row(i0) + kend, n);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = 0.0;
  return true;
}

Cholesky::Cholesky(const Matrix& a, double pivot_tol) : l(a) {
  ok = cholesky_inplace(l, pivot_tol);
}

void Cholesky::solve_inplace(std::span<double> b) const {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i)
    b[i] = (b[i] - kern::dot(l.row(i), b.data(), i)) / l(i, i);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * b[k];
    b[ii] = s / l(ii, ii);
  }
}

std::vector<double> Cholesky::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_inplace(x);
  return x;
}

void Cholesky::forward_inplace(Matrix& b) const {
  const std::size_t n = l.rows(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k)
      kern::axpy(-l(i, k), b.row(k), b.row(i), m);
    kern::scal(1.0 / l(i, i), b.row(i), m);
  }
}

void Cholesky::backward_inplace(Matrix& b) const {
  const std::size_t n = l.rows(), m = b.cols();
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k)
      kern::axpy(-l(k, ii), b.row(k), b.row(ii), m);
    kern::scal(1.0 / l(ii, ii), b.row(ii), m);
  }
}

void Cholesky::solve_inplace(Matrix& b) const {
  forward_inplace(b);
  backward_inplace(b);
}

Matrix Cholesky::inverse() const {
  Matrix inv = Matrix::identity(l.rows());
  solve_inplace(inv);
  inv.symmetrize();
  return inv;
}

double Cholesky::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form; the input
// matrix is overwritten with the accumulated orthogonal transformation.
void tridiagonalize(Matrix& a, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          a(j, i) = a(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k)
            a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
        for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
      }
    }
    d[i] = a(i, i);
    a(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      a(j, i) = 0.0;
      a(i, j) = 0.0;
    }
  }
}

// Implicit-shift QL on a tridiagonal matrix, accumulating rotations into z.
void tql2(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
  const std::size_t n = d.size();
  if (n <= 1) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-15 * dd) break;
      }
      if (m != l) {
        if (iter++ == 64)
          throw std::runtime_error("sym_eig: QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

SymEig sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::runtime_error("sym_eig: square input required");
  const std::size_t n = a.rows();
  SymEig out;
  if (n == 0) return out;
  Matrix z = a;
  z.symmetrize();
  std::vector<double> d, e;
  if (n == 1) {
    out.values = {z(0, 0)};
    out.vectors = Matrix::identity(1);
    return out;
  }
  tridiagonalize(z, d, e);
  tql2(d, e, z);
  // sort ascending, reorder columns
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[idx[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = z(i, idx[j]);
  }
  return out;
}

double min_eigenvalue(const Matrix& a) {
  return sym_eig(a).values.front();
}

namespace {

void hessenberg(Matrix& h, Matrix& q) {
  const std::size_t n = h.rows();
  q = Matrix::identity(n);
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) norm += h(i, k) * h(i, k);
    norm = std::sqrt(norm);
    if (norm <= 1e-300) continue;
    double alpha = (h(k + 1, k) >= 0.0) ? -norm : norm;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
    v[k + 1] -= alpha;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 <= 1e-300) continue;
    const double beta = 2.0 / vnorm2;
    // H <- P H P with P = I - beta v v^T
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * h(i, j);
      s *= beta;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= s * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
      s *= beta;
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * v[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += q(i, j) * v[j];
      s *= beta;
      for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= s * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    h(k + 1, k) = alpha;
  }
}

}  // namespace

bool real_schur(const Matrix& a, Matrix& q, Matrix& t, std::size_t max_sweeps) {
  const std::size_t n = a.rows();
  t = a;
  hessenberg(t, q);
  if (n <= 1) return true;
  const double norm = std::max(t.frobenius_norm(), 1e-30);
  const auto negligible = [&](std::size_t i) {
    return std::abs(t(i, i - 1)) <=
           1e-14 * (std::abs(t(i, i)) + std::abs(t(i - 1, i - 1))) + 1e-18 * norm;
  };
  std::size_t hi = n - 1;
  std::size_t sweeps = 0;
  while (hi > 0) {
    if (++sweeps > max_sweeps * n) return false;
    while (hi > 0 && negligible(hi)) {
      t(hi, hi - 1) = 0.0;
      --hi;
    }
    if (hi == 0) break;
    std::size_t lo = hi;
    while (lo > 0 && !negligible(lo)) --lo;
    // Wilkinson shift from the trailing 2x2 block; fall back to the corner
    // entry when the block has complex eigenvalues (exceptional step).
    const double a11 = t(hi - 1, hi - 1), a12 = t(hi - 1, hi);
    const double a21 = t(hi, hi - 1), a22 = t(hi, hi);
    const double tr = a11 + a22, det = a11 * a22 - a12 * a21;
    const double disc = tr * tr / 4.0 - det;
    double shift;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      const double mu1 = tr / 2.0 + root, mu2 = tr / 2.0 - root;
      shift = (std::abs(mu1 - a22) < std::abs(mu2 - a22)) ? mu1 : mu2;
    } else {
      shift = a22 + ((sweeps % 16 == 0) ? 0.75 * std::abs(t(hi, hi - 1)) : 0.0);
    }
    // explicit single-shift QR step on the active block: factor
    // G_{hi-1}...G_lo (T - shift I) = R by row rotations, then T <- R Q +
    // shift I with Q = G_lo^T ... G_{hi-1}^T applied as column rotations.
    for (std::size_t j = lo; j <= hi; ++j) t(j, j) -= shift;
    std::vector<double> cs(hi - lo), sn(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      const double x = t(i, i);
      const double y = t(i + 1, i);
      const double r = std::hypot(x, y);
      double c = 1.0, s = 0.0;
      if (r > 1e-300) {
        c = x / r;
        s = y / r;
      }
      cs[i - lo] = c;
      sn[i - lo] = s;
      for (std::size_t j = i; j < n; ++j) {
        const double t1 = t(i, j), t2 = t(i + 1, j);
        t(i, j) = c * t1 + s * t2;
        t(i + 1, j) = -s * t1 + c * t2;
      }
    }
    for (std::size_t i = lo; i < hi; ++i) {
      const double c = cs[i - lo], s = sn[i - lo];
      for (std::size_t j = 0; j <= std::min(i + 1, hi); ++j) {
        const double t1 = t(j, i), t2 = t(j, i + 1);
        t(j, i) = c * t1 + s * t2;
        t(j, i + 1) = -s * t1 + c * t2;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double q1 = q(j, i), q2 = q(j, i + 1);
        q(j, i) = c * q1 + s * q2;
        q(j, i + 1) = -s * q1 + c * q2;
      }
    }
    for (std::size_t j = lo; j <= hi; ++j) t(j, j) += shift;
  }
  // require a fully real (upper triangular) result
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(t(i, i - 1)) > 1e-8 * norm) return false;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) t(i, j) = 0.0;
  return true;
}

std::vector<double> least_squares(const Matrix& a, std::span<const double> b) {
  const std::size_t m = a.rows(), k = a.cols();
  Matrix ata(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < m; ++r) s += a(r, i) * a(r, j);
      ata(i, j) = s;
    }
  double tr = 0.0;
  for (std::size_t i = 0; i < k; ++i) tr += ata(i, i);
  const double ridge = 1e-12 * (tr / std::max<std::size_t>(k, 1) + 1.0);
  for (std::size_t i = 0; i < k; ++i) ata(i, i) += ridge;
  std::vector<double> atb(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t r = 0; r < m; ++r) atb[i] += a(r, i) * b[r];
  Cholesky ch(ata);
  if (!ch.ok) throw std::runtime_error("least_squares: normal equations not PD");
  ch.solve_inplace(atb);
  return atb;
}

}  // namespace rvopt::la
