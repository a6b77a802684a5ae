// AVX2 + FMA variants. Compiled with -mavx2 -mfma; only ever called through
// the dispatch table after a runtime CPU check.
#include <immintrin.h>

#include "rvopt/kernels.hpp"

namespace rvopt::kern {
namespace {

inline double hsum4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum4(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    __m256d y1 = _mm256_loadu_pd(y + i + 4);
    y0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), y0);
    y1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i + 4), y1);
    _mm256_storeu_pd(y + i, y0);
    _mm256_storeu_pd(y + i + 4, y1);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_avx2(double a, double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

// Broadcast-and-accumulate kernel, two A rows at a time: keeps both C rows in
// registers across the k loop for unit-stride streams over B.
void gemm_nn_avx2(std::size_t m, std::size_t n, std::size_t k, double alpha,
                  const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const double* a0 = a + i * lda;
    const double* a1 = a0 + lda;
    double* c0 = c + i * ldc;
    double* c1 = c0 + ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const __m256d a0v = _mm256_set1_pd(alpha * a0[p]);
      const __m256d a1v = _mm256_set1_pd(alpha * a1[p]);
      const double* bp = b + p * ldb;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        const __m256d bv = _mm256_loadu_pd(bp + j);
        _mm256_storeu_pd(c0 + j, _mm256_fmadd_pd(a0v, bv, _mm256_loadu_pd(c0 + j)));
        _mm256_storeu_pd(c1 + j, _mm256_fmadd_pd(a1v, bv, _mm256_loadu_pd(c1 + j)));
      }
      for (; j < n; ++j) {
        c0[j] += alpha * a0[p] * bp[j];
        c1[j] += alpha * a1[p] * bp[j];
      }
    }
  }
  if (i < m) {
    const double* ai = a + i * lda;
    double* ci = c + i * ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const __m256d av = _mm256_set1_pd(alpha * ai[p]);
      const double* bp = b + p * ldb;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4)
        _mm256_storeu_pd(ci + j, _mm256_fmadd_pd(av, _mm256_loadu_pd(bp + j),
                                                 _mm256_loadu_pd(ci + j)));
      for (; j < n; ++j) ci[j] += alpha * ai[p] * bp[j];
    }
  }
}

void gemm_nt_avx2(std::size_t m, std::size_t n, std::size_t k, double alpha,
                  const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * lda;
    double* ci = c + i * ldc;
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
      const double* b0 = b + j * ldb;
      const double* b1 = b0 + ldb;
      __m256d acc0 = _mm256_setzero_pd();
      __m256d acc1 = _mm256_setzero_pd();
      std::size_t p = 0;
      for (; p + 4 <= k; p += 4) {
        const __m256d av = _mm256_loadu_pd(ai + p);
        acc0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b0 + p), acc0);
        acc1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b1 + p), acc1);
      }
      double s0 = hsum4(acc0), s1 = hsum4(acc1);
      for (; p < k; ++p) {
        s0 += ai[p] * b0[p];
        s1 += ai[p] * b1[p];
      }
      ci[j] += alpha * s0;
      ci[j + 1] += alpha * s1;
    }
    for (; j < n; ++j) ci[j] += alpha * dot_avx2(ai, b + j * ldb, k);
  }
}

}  // namespace

const Backend& avx2_backend() {
  static const Backend b{"avx2",    dot_avx2,     axpy_avx2,
                         scal_avx2, gemm_nn_avx2, gemm_nt_avx2};
  return b;
}

}  // namespace rvopt::kern
