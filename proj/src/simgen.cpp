#include "bcgwr/simgen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "bcgwr/kernels.hpp"
#include "bcgwr/rng.hpp"

namespace bcgwr {

void SimStudySpec::validate() const {
  if (study != "flat64" && study != "georgia159")
    throw std::domain_error("SimStudySpec: unknown study '" + study + "'");
  const bool georgia = study == "georgia159";
  if (georgia && (setting < 1 || setting > 3))
    throw std::domain_error("SimStudySpec: georgia159 requires setting in {1,2,3}");
  if (!georgia && setting != 0)
    throw std::domain_error("SimStudySpec: setting applies to georgia159 only");
  if (obs_per_region < 1) throw std::domain_error("SimStudySpec: obs_per_region must be >= 1");
}

namespace {

SpatialFrame lattice_frame(int cols, int count, double scale) {
  SpatialFrame frame;
  frame.mode = CoordinateMode::Planar;
  frame.region_ids.reserve(count);
  frame.coordinates.reserve(count);
  for (int i = 0; i < count; ++i) {
    frame.region_ids.push_back("r" + std::to_string(i));
    frame.coordinates.emplace_back(scale * (i % cols), scale * (i / cols));
  }
  return frame;
}

}  // namespace

SimDataset generate_flat_study(std::uint64_t seed, int obs_per_region) {
  if (obs_per_region < 1) throw std::domain_error("generate_flat_study: obs_per_region >= 1");
  const int S = 64;
  // 8x8 unit lattice has max distance 7*sqrt(2); rescale so it is exactly 10.
  const double scale = 10.0 / (7.0 * std::sqrt(2.0));
  SimDataset out;
  out.frame = lattice_frame(8, S, scale);

  const std::vector<double> beta = {2.0, 0.0, 0.0, 4.0, 8.0};
  const int p = static_cast<int>(beta.size());
  const int n = S * obs_per_region;

  out.data.num_regions = S;
  out.data.column_names = {"x1", "x2", "x3", "x4", "x5"};
  out.data.x_columns.assign(p, std::vector<double>(n));
  out.data.y.resize(n);
  out.data.obs_region.resize(n);

  Rng rng(seed, 0, 0);
  for (int i = 0; i < n; ++i) {
    out.data.obs_region[i] = i / obs_per_region;
    double mu = 0.0;
    for (int j = 0; j < p; ++j) {
      const double x = rng.normal();
      out.data.x_columns[j][i] = x;
      mu += beta[j] * x;
    }
    out.data.y[i] = mu + rng.normal();
  }

  out.true_beta.resize(static_cast<size_t>(S) * p);
  for (int s = 0; s < S; ++s)
    for (int j = 0; j < p; ++j) out.true_beta[static_cast<size_t>(s) * p + j] = beta[j];
  out.data.validate();
  return out;
}

std::vector<std::vector<double>> georgia_cluster_beta(int setting) {
  switch (setting) {
    case 1:
      return {{1, 0, 1, 0, 0.5, 2}, {1, 0.7, 0.3, 2, 0, 3}, {2, 1, 0.8, 1, 0, 1}};
    case 2:
      return {{2, 0, 1, 0, 4, 2}, {1, 0, 3, 2, 0, 3}, {4, 1, 0, 3, 0, 1}};
    case 3:
      return {{9, 0, -4, 0, 2, 5}, {1, 7, 3, 6, 0, -1}, {2, 0, 6, 1, 7, 0}};
    default:
      throw std::domain_error("georgia_cluster_beta: setting must be 1, 2, or 3");
  }
}

SimDataset generate_georgia_study(int setting, std::uint64_t seed, double covariate_bandwidth,
                                  int obs_per_region) {
  const auto cluster_beta = georgia_cluster_beta(setting);
  if (obs_per_region < 1) throw std::domain_error("generate_georgia_study: obs_per_region >= 1");
  const int S = 159;
  const int p = 6;

  SimDataset out;
  // 13-wide lattice, 12 full rows plus 3 trailing points; the three clusters
  // are contiguous row-major bands of 51/49/59 regions.
  out.frame = lattice_frame(13, S, 1.0);
  out.true_labels.resize(S);
  for (int s = 0; s < S; ++s) out.true_labels[s] = s < 51 ? 0 : (s < 100 ? 1 : 2);

  const DistanceMatrix dist = euclidean_distances(out.frame);
  double max_dist = 0.0;
  for (double v : dist.values) max_dist = std::max(max_dist, v);
  const double bw = covariate_bandwidth > 0.0 ? covariate_bandwidth : max_dist / 4.0;

  // Exponential-kernel covariance over the lattice; jitter keeps the Cholesky
  // well conditioned at large bandwidths.
  Eigen::MatrixXd K(S, S);
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < S; ++j) K(i, j) = exponential_weight(dist(i, j), bw);
  K.diagonal().array() += 1e-8;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("generate_georgia_study: covariance Cholesky failed");
  const Eigen::MatrixXd L = llt.matrixL();

  Rng rng(seed, 0, 0);
  Eigen::MatrixXd X(S, p);  // per-region covariate values
  Eigen::VectorXd z(S);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < S; ++i) z(i) = rng.normal();
    X.col(j) = L * z;
  }

  out.true_beta.resize(static_cast<size_t>(S) * p);
  for (int s = 0; s < S; ++s)
    for (int j = 0; j < p; ++j)
      out.true_beta[static_cast<size_t>(s) * p + j] = cluster_beta[out.true_labels[s]][j];

  const int n = S * obs_per_region;
  out.data.num_regions = S;
  out.data.column_names = {"x1", "x2", "x3", "x4", "x5", "x6"};
  out.data.x_columns.assign(p, std::vector<double>(n));
  out.data.y.resize(n);
  out.data.obs_region.resize(n);
  for (int i = 0; i < n; ++i) {
    const int s = i / obs_per_region;
    out.data.obs_region[i] = s;
    double mu = 0.0;  // beta_0 = 0
    for (int j = 0; j < p; ++j) {
      out.data.x_columns[j][i] = X(s, j);
      mu += cluster_beta[out.true_labels[s]][j] * X(s, j);
    }
    out.data.y[i] = mu + rng.normal();
  }
  out.data.validate();
  return out;
}

SimDataset generate_study(const SimStudySpec& spec) {
  spec.validate();
  if (spec.study == "flat64") return generate_flat_study(spec.seed, spec.obs_per_region);
  return generate_georgia_study(spec.setting, spec.seed, spec.covariate_bandwidth,
                                spec.obs_per_region);
}

void write_dataset_csv(const SimDataset& dataset, const std::string& prefix) {
  const int S = dataset.frame.size();
  const int n = dataset.data.n();
  const int p = dataset.data.p();

  {
    std::ofstream f(prefix + "_frame.csv");
    if (!f) throw std::runtime_error("write_dataset_csv: cannot open " + prefix + "_frame.csv");
    f << "region_id,x,y\n";
    char buf[128];
    for (int s = 0; s < S; ++s) {
      std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g\n", dataset.frame.region_ids[s].c_str(),
                    dataset.frame.coordinates[s].first, dataset.frame.coordinates[s].second);
      f << buf;
    }
  }
  {
    std::ofstream f(prefix + "_data.csv");
    if (!f) throw std::runtime_error("write_dataset_csv: cannot open " + prefix + "_data.csv");
    f << "region_id,y";
    for (const auto& name : dataset.data.column_names) f << ',' << name;
    f << '\n';
    char buf[64];
    for (int i = 0; i < n; ++i) {
      f << dataset.frame.region_ids[dataset.data.obs_region[i]];
      std::snprintf(buf, sizeof(buf), ",%.17g", dataset.data.y[i]);
      f << buf;
      for (int j = 0; j < p; ++j) {
        std::snprintf(buf, sizeof(buf), ",%.17g", dataset.data.x_columns[j][i]);
        f << buf;
      }
      f << '\n';
    }
  }
  {
    std::ofstream f(prefix + "_true_beta.csv");
    if (!f)
      throw std::runtime_error("write_dataset_csv: cannot open " + prefix + "_true_beta.csv");
    f << "region_id";
    for (const auto& name : dataset.data.column_names) f << ",beta_" << name;
    f << '\n';
    char buf[64];
    for (int s = 0; s < S; ++s) {
      f << dataset.frame.region_ids[s];
      for (int j = 0; j < p; ++j) {
        std::snprintf(buf, sizeof(buf), ",%.17g", dataset.true_beta[static_cast<size_t>(s) * p + j]);
        f << buf;
      }
      f << '\n';
    }
  }
  if (!dataset.true_labels.empty()) {
    std::ofstream f(prefix + "_labels.csv");
    if (!f) throw std::runtime_error("write_dataset_csv: cannot open " + prefix + "_labels.csv");
    f << "region_id,label\n";
    for (int s = 0; s < S; ++s)
      f << dataset.frame.region_ids[s] << ',' << dataset.true_labels[s] << '\n';
  }
}

}  // namespace bcgwr
