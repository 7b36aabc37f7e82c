#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcgwr/data.hpp"
#include "bcgwr/geometry.hpp"

namespace bcgwr {

struct SimStudySpec {
  std::string study = "flat64";  // flat64 | georgia159
  int setting = 0;               // 1..3, georgia159 only
  int obs_per_region = 3;
  std::uint64_t seed = 0;
  double covariate_bandwidth = -1.0;  // <=0 means max distance / 4 (georgia)

  void validate() const;
};

struct SimDataset {
  SpatialFrame frame;
  RegressionData data;
  std::vector<double> true_beta;  // S*p row-major
  std::vector<int> true_labels;   // length S (georgia only, else empty)
};

// Flat study: 64 regions on an 8x8 lattice scaled so the maximum pairwise
// distance is 10; X1..X5 iid N(0,1), beta = (2, 0, 0, 4, 8), eps ~ N(0,1).
SimDataset generate_flat_study(std::uint64_t seed, int obs_per_region = 3);

// Georgia-structured study: 159 lattice regions in three contiguous centroid
// blocks of sizes 51/49/59; six covariates drawn from an MVN with exponential
// kernel covariance over the distance matrix; per-region beta row from the
// setting's cluster vectors; intercept fixed at 0; one observation per region
// unless obs_per_region says otherwise.
SimDataset generate_georgia_study(int setting, std::uint64_t seed,
                                  double covariate_bandwidth = -1.0, int obs_per_region = 1);

SimDataset generate_study(const SimStudySpec& spec);

// The per-cluster true coefficient vectors (3 clusters x 6 covariates).
std::vector<std::vector<double>> georgia_cluster_beta(int setting);

// Persist a dataset as the CSV/JSON schema the ingestion path reads:
// <prefix>_frame.csv, <prefix>_data.csv, <prefix>_true_beta.csv, and
// <prefix>_labels.csv when labels exist.
void write_dataset_csv(const SimDataset& dataset, const std::string& prefix);

}  // namespace bcgwr
