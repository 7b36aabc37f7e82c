#pragma once

#include <string>
#include <vector>

#include "bcgwr/geometry.hpp"

namespace bcgwr {

enum class KernelKind { Exponential, Gaussian, Bisquare, GraphHybrid };

KernelKind kernel_kind_from_string(const std::string& name);
std::string kernel_kind_to_string(KernelKind kind);

// Kernel choice plus the Uniform(0, D) bandwidth prior upper bound.
struct KernelSpec {
  KernelKind kind = KernelKind::Exponential;
  double bandwidth_upper = 100.0;  // D

  void validate() const;
};

// Scalar kernels: distance + bandwidth -> weight in [0, 1]. +inf maps to 0.
double exponential_weight(double d, double b);
double gaussian_weight(double d, double b);
// Standard GWR bi-square (1 - (d/b)^2)^2 on d < b, 0 outside.
double bisquare_weight(double d, double b);
// Graph-distance hybrid: 1 for d <= 1, exponential decay beyond.
double graph_hybrid_weight(double d, double b);

double kernel_weight(KernelKind kind, double d, double b);

// Per-observation weights for one focal region.
struct WeightRow {
  int focal_region = 0;
  std::vector<double> weights;
};

// obs_region maps each observation to its region index; the result has one
// row per focal region, each of length n.
std::vector<WeightRow> weight_rows(const DistanceMatrix& distances, const KernelSpec& spec,
                                   double b, const std::vector<int>& obs_region);

}  // namespace bcgwr
