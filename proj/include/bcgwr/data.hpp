#pragma once

#include <string>
#include <vector>

#include "bcgwr/geometry.hpp"

namespace bcgwr {

// Response, design matrix, and the observation -> region map. The design
// matrix is stored column-major: the sampler's hot loops walk whole columns.
struct RegressionData {
  std::vector<double> y;
  std::vector<std::vector<double>> x_columns;  // p columns of length n
  std::vector<std::string> column_names;
  std::vector<int> obs_region;
  int num_regions = 0;

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(x_columns.size()); }

  void validate() const;
};

// Data CSV columns: region_id, y, then covariates. The sidecar schema (JSON,
// optional) maps covariate names to "continuous" or "categorical";
// categorical columns are one-hot encoded with the first (sorted) level as
// baseline. Covariates without a schema entry are treated as continuous.
RegressionData read_regression_csv(const std::string& data_path, const SpatialFrame& frame,
                                   const std::string& schema_path = "");

}  // namespace bcgwr
