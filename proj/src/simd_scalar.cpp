#include "bcgwr/simd.hpp"

namespace bcgwr::simd {

namespace {

double weighted_ssr_scalar(const double* w, const double* y, const double* mu, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - mu[i];
    acc += w[i] * r * r;
  }
  return acc;
}

double weighted_ssr_shift_scalar(const double* w, const double* r, const double* x, double delta,
                                 std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = r[i] - delta * x[i];
    acc += w[i] * t * t;
  }
  return acc;
}

double weighted_sq_scalar(const double* w, const double* r, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * r[i] * r[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{weighted_ssr_scalar, weighted_ssr_shift_scalar, weighted_sq_scalar,
                         axpy_scalar, dot_scalar, "scalar"};
  return k;
}

}  // namespace bcgwr::simd
