#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rvopt::la {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), d_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return d_[i * cols_ + j];
  }
  double* row(std::size_t i) { return d_.data() + i * cols_; }
  const double* row(std::size_t i) const { return d_.data() + i * cols_; }
  double* data() { return d_.data(); }
  const double* data() const { return d_.data(); }

  void fill(double v) { d_.assign(d_.size(), v); }
  // this += a * other (same shape)
  void add_scaled(double a, const Matrix& other);
  void symmetrize();  // this <- (this + this^T)/2, square only
  Matrix transposed() const;
  double frobenius_norm() const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> d_;
};

// C += alpha * A * B
void gemm(double alpha, const Matrix& a, const Matrix& b, Matrix& c);
// C += alpha * A * B^T
void gemm_nt(double alpha, const Matrix& a, const Matrix& b, Matrix& c);
// <A, B> = sum_ij A_ij B_ij
double inner(const Matrix& a, const Matrix& b);

// In-place lower Cholesky factorization of a symmetric matrix (the strict
// upper triangle is zeroed). Returns false when a pivot drops below
// pivot_tol, leaving the matrix partially factored.
bool cholesky_inplace(Matrix& a, double pivot_tol = 0.0);

struct Cholesky {
  Matrix l;
  bool ok = false;

  explicit Cholesky(const Matrix& a, double pivot_tol = 0.0);
  // Solve (L L^T) x = b in place.
  void solve_inplace(std::span<double> b) const;
  std::vector<double> solve(std::span<const double> b) const;
  // Solve L y = b (forward) and L^T x = y (backward) for matrix RHS, in
  // place, column blocks of B.
  void solve_inplace(Matrix& b) const;
  // B <- L^{-1} B
  void forward_inplace(Matrix& b) const;
  // B <- L^{-T} B
  void backward_inplace(Matrix& b) const;
  // Explicit inverse of A = L L^T (symmetric).
  Matrix inverse() const;
  double log_det() const;
};

struct SymEig {
  std::vector<double> values;  // ascending
  Matrix vectors;              // columns are eigenvectors
};

// Eigendecomposition of a symmetric matrix: Householder tridiagonalization
// followed by implicit-shift QL. Throws on non-square input.
SymEig sym_eig(const Matrix& a);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& a);

// Real Schur decomposition A = Q T Q^T with Q orthogonal, for small dense
// matrices whose eigenvalues are expected to be real (Hessenberg reduction +
// shifted QR). Returns false when some eigenvalue resists real deflation
// (complex pair) or the iteration stalls.
bool real_schur(const Matrix& a, Matrix& q, Matrix& t, std::size_t max_sweeps = 200);

// Minimum-norm least squares via normal equations with a tiny ridge;
// adequate for the small well-conditioned systems used here.
std::vector<double> least_squares(const Matrix& a, std::span<const double> b);

}  // namespace rvopt::la
