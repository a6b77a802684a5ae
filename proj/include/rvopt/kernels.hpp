#pragma once

#include <cstddef>

// Double-precision building blocks under the dense linear algebra layer.
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant is selected at first use when the CPU supports it. Variants are
// equivalence-tested against the reference in tests/test_kernels.cpp.
namespace rvopt::kern {

struct Backend {
  const char* name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x *= a
  void (*scal)(double a, double* x, std::size_t n);
  // C += alpha * A * B; row-major, A is m x k (lda), B is k x n (ldb),
  // C is m x n (ldc)
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, double alpha,
                  const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc);
  // C += alpha * A * B^T; A is m x k (lda), B is n x k (ldb), C is m x n (ldc)
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, double alpha,
                  const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc);
};

const Backend& scalar_backend();

// Currently active backend (auto-detected on first call).
const Backend& active();

// Force a backend by name: "scalar", "avx2" or "auto". Throws on a name that
// is unknown or unsupported on this CPU. Intended for tests and benchmarks.
void select_backend(const char* name);

inline double dot(const double* x, const double* y, std::size_t n) {
  return active().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy(a, x, y, n);
}
inline void scal(double a, double* x, std::size_t n) { active().scal(a, x, n); }
inline void gemm_nn(std::size_t m, std::size_t n, std::size_t k, double alpha,
                    const double* a, std::size_t lda, const double* b,
                    std::size_t ldb, double* c, std::size_t ldc) {
  active().gemm_nn(m, n, k, alpha, a, lda, b, ldb, c, ldc);
}
inline void gemm_nt(std::size_t m, std::size_t n, std::size_t k, double alpha,
                    const double* a, std::size_t lda, const double* b,
                    std::size_t ldb, double* c, std::size_t ldc) {
  active().gemm_nt(m, n, k, alpha, a, lda, b, ldb, c, ldc);
}

}  // namespace rvopt::kern
