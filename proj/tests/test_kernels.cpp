#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "rvopt/kernels.hpp"

using namespace rvopt;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar dot/axpy/scal basics") {
  const std::vector<double> x{1.0, 2.0, 3.0}, y{4.0, -5.0, 6.0};
  const auto& sb = kern::scalar_backend();
  CHECK(sb.dot(x.data(), y.data(), 3) == doctest::Approx(1 * 4 - 2 * 5 + 3 * 6));
  std::vector<double> z = y;
  sb.axpy(2.0, x.data(), z.data(), 3);
  CHECK(z[0] == doctest::Approx(6.0));
  CHECK(z[2] == doctest::Approx(12.0));
  sb.scal(0.5, z.data(), 3);
  CHECK(z[0] == doctest::Approx(3.0));
}

TEST_CASE("scalar gemm matches a naive triple loop") {
  std::mt19937_64 rng(7);
  const std::size_t m = 5, n = 7, k = 4;
  const auto a = random_vec(m * k, rng);
  const auto b = random_vec(k * n, rng);
  std::vector<double> c(m * n, 0.0), ref(m * n, 0.0);
  kern::scalar_backend().gemm_nn(m, n, k, 1.5, a.data(), k, b.data(), n, c.data(), n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p)
        ref[i * n + j] += 1.5 * a[i * k + p] * b[p * n + j];
  for (std::size_t i = 0; i < m * n; ++i) CHECK(c[i] == doctest::Approx(ref[i]));

  // nt variant: C += alpha A B^T
  std::vector<double> bt(n * k);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t p = 0; p < k; ++p) bt[j * k + p] = b[p * n + j];
  std::vector<double> c2(m * n, 0.0);
  kern::scalar_backend().gemm_nt(m, n, k, 1.5, a.data(), k, bt.data(), k, c2.data(), n);
  for (std::size_t i = 0; i < m * n; ++i) CHECK(c2[i] == doctest::Approx(ref[i]));
}

TEST_CASE("active backend is equivalent to the scalar reference") {
  INFO("active backend: ", kern::active().name);
  std::mt19937_64 rng(42);
  const auto& sb = kern::scalar_backend();
  const auto& ab = kern::active();
  // sizes straddling the unroll widths, including ragged tails
  for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 64u, 257u}) {
    const auto x = random_vec(n, rng);
    const auto y = random_vec(n, rng);
    const double scale = 1.0 + std::abs(sb.dot(x.data(), y.data(), n));
    CHECK(std::abs(ab.dot(x.data(), y.data(), n) - sb.dot(x.data(), y.data(), n)) <=
          1e-13 * scale);
    auto z1 = y, z2 = y;
    sb.axpy(0.7, x.data(), z1.data(), n);
    ab.axpy(0.7, x.data(), z2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(z1[i] == doctest::Approx(z2[i]).epsilon(1e-13));
    sb.scal(-1.3, z1.data(), n);
    ab.scal(-1.3, z2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(z1[i] == doctest::Approx(z2[i]).epsilon(1e-13));
  }
  for (auto [m, n, k] : std::vector<std::array<std::size_t, 3>>{
           {1, 1, 1}, {2, 3, 5}, {5, 8, 3}, {17, 19, 23}, {32, 32, 32}, {33, 65, 9}}) {
    const auto a = random_vec(m * k, rng);
    const auto b = random_vec(k * n, rng);
    std::vector<double> c1(m * n, 0.5), c2(m * n, 0.5);
    sb.gemm_nn(m, n, k, -0.9, a.data(), k, b.data(), n, c1.data(), n);
    ab.gemm_nn(m, n, k, -0.9, a.data(), k, b.data(), n, c2.data(), n);
    for (std::size_t i = 0; i < m * n; ++i)
      CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-12));
    const auto bt = random_vec(n * k, rng);
    std::fill(c1.begin(), c1.end(), -0.25);
    std::fill(c2.begin(), c2.end(), -0.25);
    sb.gemm_nt(m, n, k, 1.1, a.data(), k, bt.data(), k, c1.data(), n);
    ab.gemm_nt(m, n, k, 1.1, a.data(), k, bt.data(), k, c2.data(), n);
    for (std::size_t i = 0; i < m * n; ++i)
      CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-12));
  }
}

TEST_CASE("backend selection") {
  kern::select_backend("scalar");
  CHECK(std::string(kern::active().name) == "scalar");
  kern::select_backend("auto");
  CHECK_THROWS(kern::select_backend("sse42"));
#if defined(__x86_64__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    kern::select_backend("avx2");
    CHECK(std::string(kern::active().name) == "avx2");
    kern::select_backend("auto");
  }
#endif
}
