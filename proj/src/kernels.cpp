#include "bcgwr/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace bcgwr {

namespace {
void check_bandwidth(double b) {
  if (!(b > 0.0)) throw std::domain_error("kernel bandwidth must be positive");
}
}  // namespace

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "exponential") return KernelKind::Exponential;
  if (name == "gaussian") return KernelKind::Gaussian;
  if (name == "bisquare") return KernelKind::Bisquare;
  if (name == "graph_hybrid") return KernelKind::GraphHybrid;
  throw std::invalid_argument("unknown kernel: " + name);
}

std::string kernel_kind_to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Exponential: return "exponential";
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::Bisquare: return "bisquare";
    case KernelKind::GraphHybrid: return "graph_hybrid";
  }
  return "?";
}

void KernelSpec::validate() const {
  if (!(bandwidth_upper > 0.0)) throw std::domain_error("KernelSpec: D must be positive");
}

double exponential_weight(double d, double b) {
  check_bandwidth(b);
  if (std::isinf(d)) return 0.0;
  return std::exp(-d / b);
}

double gaussian_weight(double d, double b) {
  check_bandwidth(b);
  if (std::isinf(d)) return 0.0;
  const double r = d / b;
  return std::exp(-r * r);
}

double bisquare_weight(double d, double b) {
  check_bandwidth(b);
  if (std::isinf(d) || d >= b) return 0.0;
  const double t = 1.0 - (d / b) * (d / b);
  return t * t;
}

double graph_hybrid_weight(double d, double b) {
  check_bandwidth(b);
  if (std::isinf(d)) return 0.0;
  if (d <= 1.0) return 1.0;
  return std::exp(-d / b);
}

double kernel_weight(KernelKind kind, double d, double b) {
  switch (kind) {
    case KernelKind::Exponential: return exponential_weight(d, b);
    case KernelKind::Gaussian: return gaussian_weight(d, b);
    case KernelKind::Bisquare: return bisquare_weight(d, b);
    case KernelKind::GraphHybrid: return graph_hybrid_weight(d, b);
  }
  throw std::invalid_argument("unknown kernel kind");
}

std::vector<WeightRow> weight_rows(const DistanceMatrix& distances, const KernelSpec& spec,
                                   double b, const std::vector<int>& obs_region) {
  spec.validate();
  check_bandwidth(b);
  const int s = distances.size;
  const size_t n = obs_region.size();
  std::vector<WeightRow> rows(s);
  for (int focal = 0; focal < s; ++focal) {
    rows[focal].focal_region = focal;
    rows[focal].weights.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const int r = obs_region[i];
      if (r < 0 || r >= s) throw std::out_of_range("weight_rows: observation region out of range");
      rows[focal].weights[i] = kernel_weight(spec.kind, distances(r, focal), b);
    }
  }
  return rows;
}

}  // namespace bcgwr
