#pragma once

#include <cstddef>
#include <string>

namespace bcgwr::simd {

// Hot inner loops of the vectorized likelihood, in scalar reference form and
// an AVX2 variant selected at runtime. Both variants share one contract; the
// AVX2 path may reassociate sums, so callers compare results with tolerances,
// not bit equality.

struct Kernels {
  // sum_i w[i] * (y[i] - mu[i])^2
  double (*weighted_ssr)(const double* w, const double* y, const double* mu, std::size_t n);
  // sum_i w[i] * (r[i] - delta * x[i])^2  (beta proposals shift one column)
  double (*weighted_ssr_shift)(const double* w, const double* r, const double* x, double delta,
                               std::size_t n);
  // sum_i w[i] * r[i]^2
  double (*weighted_sq)(const double* w, const double* r, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  const char* name;
};

const Kernels& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const Kernels& avx2_kernels();
#endif

// Best variant the running CPU supports; cached after the first call.
const Kernels& active_kernels();

// Force a specific variant ("scalar", "avx2", "auto"); used by tests and the
// benchmark harness. Throws if the variant is unavailable on this CPU.
void select_kernels(const std::string& name);

inline double weighted_ssr(const double* w, const double* y, const double* mu, std::size_t n) {
  return active_kernels().weighted_ssr(w, y, mu, n);
}
inline double weighted_ssr_shift(const double* w, const double* r, const double* x, double delta,
                                 std::size_t n) {
  return active_kernels().weighted_ssr_shift(w, r, x, delta, n);
}
inline double weighted_sq(const double* w, const double* r, std::size_t n) {
  return active_kernels().weighted_sq(w, r, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active_kernels().axpy(a, x, y, n);
}
inline double dot(const double* a, const double* b, std::size_t n) {
  return active_kernels().dot(a, b, n);
}

}  // namespace bcgwr::simd
