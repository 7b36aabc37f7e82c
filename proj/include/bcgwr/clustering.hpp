#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcgwr/rng.hpp"

namespace bcgwr {

// One matrix of per-region coefficient values to be clustered: S rows, q
// columns (q = 1 for a single coefficient, q = p for the joint vector).
struct CoefficientSample {
  int num_rows = 0;
  int num_cols = 0;
  std::vector<double> values;  // row-major S*q
  int sample_id = 0;

  double at(int i, int d) const { return values[static_cast<size_t>(i) * num_cols + d]; }
};

struct GmmModel {
  int num_components = 0;
  int num_dims = 0;
  std::vector<double> weights;    // K, positive, sum 1
  std::vector<double> means;      // K*q
  std::vector<double> variances;  // K*q, diagonal covariance
  double log_likelihood = 0.0;
  bool variance_floored = false;  // a component collapsed and was floored
};

struct GmmFit {
  GmmModel model;
  std::vector<double> responsibilities;  // S*K
  std::vector<int> hard_labels;          // S, argmax responsibility
  std::vector<double> loglik_trace;      // per EM iteration, nondecreasing
};

GmmFit gmm_em_fit(const CoefficientSample& sample, int K, Rng& rng, int max_iter = 200,
                  double tol = 1e-8);

// BIC model selection over K = 1..K_max with seeded restarts.
struct GmmSelection {
  int best_k = 1;
  GmmFit fit;
  std::vector<double> bic;  // indexed by K-1
};
GmmSelection gmm_select_k(const CoefficientSample& sample, int K_max, int restarts,
                          std::uint64_t seed);

// Truncated stick-breaking: C_k = V_k prod_{j<k} (1 - V_j); the last weight
// absorbs the remainder so the result sums to 1 exactly.
std::vector<double> stick_breaking_weights(const std::vector<double>& V);

struct DpmmConfig {
  double alpha = 1.0;
  int truncation = 20;  // L
  int iterations = 2000;
  int burn_in = 500;
  // Base-measure hyperparameters default to data-driven values when <= 0.
  double prior_mean_strength = 0.1;    // kappa0
  double prior_variance_shape = 2.0;   // a0
  std::uint64_t seed = 0;
};

// Per-iteration cluster label vectors from a truncated blocked Gibbs run.
struct ClusterDraws {
  int num_regions = 0;
  int truncation = 0;
  std::vector<std::vector<int>> labels;  // Q vectors of length S
  bool saturated = false;  // some iteration occupied all L clusters
};

ClusterDraws dpmm_fit(const CoefficientSample& sample, const DpmmConfig& config);

// S x S binary matrix, B[i][j] = 1 iff z_i == z_j.
std::vector<std::uint8_t> membership_matrix(const std::vector<int>& z);

struct ClusterConfiguration {
  std::vector<int> labels;  // length S, 0-based consecutive
  int num_labels = 0;
  std::vector<double> probabilities;  // S * num_labels, rows sum to 1
  std::string method_tag;             // "dahl" or "mode"
};

// Label vectors the iteration closest (least squares) to the mean membership
// matrix produced; ties go to the earliest iteration.
ClusterConfiguration dahl_configuration(const ClusterDraws& draws);

// Per-region modal label after aligning every iteration to the Dahl solution
// (Hungarian assignment on label overlap); needed because the raw labels
// switch freely across MCMC iterations.
ClusterConfiguration mode_configuration(const ClusterDraws& draws);

// Minimum-cost assignment on a square cost matrix; returns column for each row.
std::vector<int> hungarian_assignment(const std::vector<double>& cost, int n);

// Relabel `labels` so they overlap `reference` as much as possible.
std::vector<int> align_labels(const std::vector<int>& labels, const std::vector<int>& reference);

struct TwoStageResult {
  ClusterConfiguration configuration;
  // Aligned stage-1 labels, one row per input sample (persisted as the
  // across-sample label matrix).
  std::vector<std::vector<int>> stage1_labels;
};

// Appendix-style two-stage DPMM configuration: per-sample DPMM runs reduced
// to one configuration each, then a per-region mode across samples after
// cross-sample alignment.
TwoStageResult two_stage_dpmm(const std::vector<CoefficientSample>& samples,
                              const DpmmConfig& config, const std::string& stage1_method = "mode");

// Fraction of unordered pairs on which the two labelings agree.
double rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace bcgwr
