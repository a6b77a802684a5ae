#include <stdexcept>
#include <string>

#include "rvopt/kernels.hpp"

namespace rvopt::kern {

#if defined(__x86_64__) || defined(_M_X64)
const Backend& avx2_backend();  // kernels_avx2.cpp

static bool cpu_has_avx2_fma() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

namespace {

const Backend* detect() {
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2_fma()) return &avx2_backend();
#endif
  return &scalar_backend();
}

const Backend*& current() {
  static const Backend* b = detect();
  return b;
}

}  // namespace

const Backend& active() { return *current(); }

void select_backend(const char* name) {
  const std::string s(name);
  if (s == "auto") {
    current() = detect();
    return;
  }
  if (s == "scalar") {
    current() = &scalar_backend();
    return;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (s == "avx2") {
    if (!cpu_has_avx2_fma())
      throw std::runtime_error("kern: avx2 backend not supported on this CPU");
    current() = &avx2_backend();
    return;
  }
#endif
  throw std::runtime_error("kern: unknown backend '" + s + "'");
}

}  // namespace rvopt::kern
