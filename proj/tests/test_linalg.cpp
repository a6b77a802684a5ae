#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "rvopt/kernels.hpp"
#include "rvopt/linalg.hpp"

using namespace rvopt;
using la::Matrix;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

Matrix random_spd(std::size_t n, std::mt19937_64& rng) {
  Matrix r = random_matrix(n, n, rng);
  Matrix a(n, n);
  la::gemm_nt(1.0, r, r, a);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += double(n);
  return a;
}

}  // namespace

TEST_CASE("cholesky factors and solves SPD systems") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 2u, 5u, 40u, 130u}) {
    const Matrix a = random_spd(n, rng);
    la::Cholesky ch(a);
    REQUIRE(ch.ok);
    // reconstruct
    Matrix rec(n, n);
    la::gemm_nt(1.0, ch.l, ch.l, rec);
    rec.add_scaled(-1.0, a);
    CHECK(rec.frobenius_norm() <= 1e-10 * (1.0 + a.frobenius_norm()));
    // solve
    std::vector<double> b(n);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : b) v = u(rng);
    const auto x = ch.solve(b);
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) r[i] += a(i, j) * x[j];
      r[i] -= b[i];
    }
    double rn = 0.0;
    for (double v : r) rn = std::max(rn, std::abs(v));
    CHECK(rn <= 1e-9 * (1.0 + a.frobenius_norm()));
    // inverse symmetric
    const Matrix inv = ch.inverse();
    Matrix prod(n, n);
    la::gemm(1.0, a, inv, prod);
    prod.add_scaled(-1.0, Matrix::identity(n));
    CHECK(prod.frobenius_norm() <= 1e-8 * (1.0 + a.frobenius_norm()));
  }
}

TEST_CASE("cholesky refuses indefinite matrices") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  la::Cholesky ch(a);
  CHECK(!ch.ok);
}

TEST_CASE("sym_eig: residuals, orthogonality, ordering") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 3u, 10u, 60u, 150u}) {
    Matrix a = random_matrix(n, n, rng);
    a.symmetrize();
    const auto eig = la::sym_eig(a);
    REQUIRE(eig.values.size() == n);
    for (std::size_t i = 1; i < n; ++i) CHECK(eig.values[i - 1] <= eig.values[i] + 1e-12);
    const double norm = 1.0 + a.frobenius_norm();
    // A V = V D
    Matrix av(n, n);
    la::gemm(1.0, a, eig.vectors, av);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        av(i, j) -= eig.values[j] * eig.vectors(i, j);
    CHECK(av.frobenius_norm() <= 1e-9 * norm * double(n));
    // V^T V = I
    Matrix vtv(n, n);
    kern::gemm_nn(n, n, n, 1.0, eig.vectors.transposed().data(), n,
                  eig.vectors.data(), n, vtv.data(), n);
    vtv.add_scaled(-1.0, Matrix::identity(n));
    CHECK(vtv.frobenius_norm() <= 1e-9 * double(n));
  }
}

TEST_CASE("sym_eig on a known matrix") {
  // [[2,1],[1,2]] has eigenvalues 1 and 3
  Matrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 2;
  const auto eig = la::sym_eig(a);
  CHECK(eig.values[0] == doctest::Approx(1.0));
  CHECK(eig.values[1] == doctest::Approx(3.0));
  CHECK(la::min_eigenvalue(a) == doctest::Approx(1.0));
}

TEST_CASE("real_schur recovers a prescribed real spectrum") {
  std::mt19937_64 rng(23);
  for (std::size_t n : {1u, 2u, 3u, 6u, 12u}) {
    // A = P D P^{-1} with well-separated eigenvalues and P near identity
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = double(i) + 0.25 * double(i * i);
    Matrix p = Matrix::identity(n);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) p(i, j) = u(rng);
    Matrix pinv = Matrix::identity(n);
    {
      // Gaussian elimination
      Matrix a = p;
      for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t rr = c + 1; rr < n; ++rr)
          if (std::abs(a(rr, c)) > std::abs(a(piv, c))) piv = rr;
        for (std::size_t j = 0; j < n; ++j) {
          std::swap(a(c, j), a(piv, j));
          std::swap(pinv(c, j), pinv(piv, j));
        }
        const double s = a(c, c);
        for (std::size_t j = 0; j < n; ++j) {
          a(c, j) /= s;
          pinv(c, j) /= s;
        }
        for (std::size_t rr = 0; rr < n; ++rr) {
          if (rr == c) continue;
          const double f = a(rr, c);
          if (f == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) {
            a(rr, j) -= f * a(c, j);
            pinv(rr, j) -= f * pinv(c, j);
          }
        }
      }
    }
    Matrix pd(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) pd(i, j) = p(i, j) * d[j];
    Matrix a(n, n);
    la::gemm(1.0, pd, pinv, a);

    Matrix q, t;
    REQUIRE(la::real_schur(a, q, t));
    // Q orthogonal
    Matrix qtq(n, n);
    kern::gemm_nn(n, n, n, 1.0, q.transposed().data(), n, q.data(), n, qtq.data(), n);
    qtq.add_scaled(-1.0, Matrix::identity(n));
    CHECK(qtq.frobenius_norm() <= 1e-9 * double(n));
    // Q^T A Q = T
    Matrix aq(n, n), qtaq(n, n);
    la::gemm(1.0, a, q, aq);
    kern::gemm_nn(n, n, n, 1.0, q.transposed().data(), n, aq.data(), n, qtaq.data(), n);
    qtaq.add_scaled(-1.0, t);
    CHECK(qtaq.frobenius_norm() <= 1e-8 * (1.0 + a.frobenius_norm()));
    // spectrum matches as a multiset
    std::vector<double> got(n);
    for (std::size_t i = 0; i < n; ++i) got[i] = t(i, i);
    std::sort(got.begin(), got.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(d[i]).epsilon(1e-6));
  }
}

TEST_CASE("least_squares recovers consistent systems") {
  std::mt19937_64 rng(5);
  const std::size_t m = 20, k = 4;
  const Matrix a = random_matrix(m, k, rng);
  std::vector<double> xtrue{0.5, -1.25, 2.0, 0.125};
  std::vector<double> b(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) b[i] += a(i, j) * xtrue[j];
  const auto x = la::least_squares(a, b);
  for (std::size_t j = 0; j < k; ++j) CHECK(x[j] == doctest::Approx(xtrue[j]).epsilon(1e-8));
}
