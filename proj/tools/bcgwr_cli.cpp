// bcgwr: pipeline driver for simulation, fitting, clustering, and assessment.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.
// Every flag can also come from a JSON --config file (flags win) or from an
// environment variable with the BCGWR_ prefix (e.g. BCGWR_SEED).

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bcgwr/assessment.hpp"
#include "bcgwr/bgwr.hpp"
#include "bcgwr/clustering.hpp"
#include "bcgwr/data.hpp"
#include "bcgwr/geometry.hpp"
#include "bcgwr/io.hpp"
#include "bcgwr/kernels.hpp"
#include "bcgwr/rjmcmc.hpp"
#include "bcgwr/simd.hpp"
#include "bcgwr/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fill CLI option defaults from a JSON config file before flags are parsed;
// flags given on the command line still override (CLI11 re-assigns them).
json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) throw ConfigError("config file not found: " + path);
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config file parse error in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object: " + path);
  return j;
}

template <typename T>
void from_config(const json& cfg, const std::string& key, T& var) {
  if (cfg.contains(key)) {
    try {
      var = cfg.at(key).get<T>();
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }
}

bcgwr::DistanceMetric metric_from_string(const std::string& name) {
  if (name == "euclidean") return bcgwr::DistanceMetric::Euclidean;
  if (name == "great_circle") return bcgwr::DistanceMetric::GreatCircle;
  if (name == "graph") return bcgwr::DistanceMetric::Graph;
  throw ConfigError("unknown distance metric: " + name);
}

void ensure_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError("cannot create output directory " + out + ": " + ec.message());
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError("missing required path: --" + what);
  if (!fs::exists(path)) throw DataError(what + " file not found: " + path);
}

// Shared fit/assess inputs: frame + distances + regression data + kernel.
struct Inputs {
  bcgwr::SpatialFrame frame;
  bcgwr::DistanceMatrix distances;
  bcgwr::RegressionData data;
  bcgwr::KernelSpec kernel;
};

Inputs load_inputs(const std::string& data_path, const std::string& frame_path,
                   const std::string& adjacency_path, const std::string& schema_path,
                   const std::string& distance_name, const std::string& kernel_name,
                   double bandwidth_upper, bool spherical) {
  require_file(frame_path, "frame");
  require_file(data_path, "data");
  Inputs in;
  in.frame = bcgwr::read_frame_csv(
      frame_path, spherical ? bcgwr::CoordinateMode::Spherical : bcgwr::CoordinateMode::Planar);
  if (!adjacency_path.empty()) {
    require_file(adjacency_path, "adjacency");
    bcgwr::read_adjacency_csv(adjacency_path, in.frame);
  }
  in.distances = bcgwr::compute_distances(in.frame, metric_from_string(distance_name));
  in.data = bcgwr::read_regression_csv(data_path, in.frame, schema_path);
  in.kernel.kind = bcgwr::kernel_kind_from_string(kernel_name);
  if (bandwidth_upper > 0) {
    in.kernel.bandwidth_upper = bandwidth_upper;
  } else {
    double dmax = 0.0;
    for (double v : in.distances.values)
      if (std::isfinite(v)) dmax = std::max(dmax, v);
    in.kernel.bandwidth_upper = dmax > 0 ? dmax : 1.0;
  }
  in.kernel.validate();
  return in;
}

std::vector<int> read_truth_csv(const std::string& path, const bcgwr::SpatialFrame& frame) {
  std::ifstream f(path);
  if (!f) throw DataError("truth labels file not found: " + path);
  std::string line;
  std::getline(f, line);  // header
  std::vector<int> labels(frame.size(), -1);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError("malformed truth row: " + line);
    const std::string id = line.substr(0, comma);
    const int label = std::stoi(line.substr(comma + 1));
    bool found = false;
    for (int s = 0; s < frame.size(); ++s) {
      if (frame.region_ids[s] == id) {
        labels[s] = label;
        found = true;
        break;
      }
    }
    if (!found) throw DataError("truth region id not in frame: " + id);
  }
  for (int s = 0; s < frame.size(); ++s)
    if (labels[s] < 0) throw DataError("truth labels missing region " + frame.region_ids[s]);
  return labels;
}

std::vector<std::string> default_region_ids(int S) {
  std::vector<std::string> ids;
  ids.reserve(S);
  for (int s = 0; s < S; ++s) ids.push_back("r" + std::to_string(s));
  return ids;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string study = "flat64";
  int setting = 0;
  std::int64_t seed = -1;
  int obs_per_region = -1;  // -1: study default (3 flat, 1 georgia)
  double covariate_bandwidth = -1.0;
  std::string out = ".";
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.seed < 0) throw ConfigError("--seed is required (no wall-clock seeding)");
  bcgwr::SimStudySpec spec;
  spec.study = a.study;
  spec.setting = a.study == "georgia159" ? (a.setting > 0 ? a.setting : 1) : 0;
  spec.obs_per_region = a.obs_per_region > 0 ? a.obs_per_region
                                             : (a.study == "georgia159" ? 1 : 3);
  spec.seed = static_cast<std::uint64_t>(a.seed);
  spec.covariate_bandwidth = a.covariate_bandwidth;
  spec.validate();

  const bcgwr::SimDataset dataset = bcgwr::generate_study(spec);
  ensure_dir(a.out);
  std::string prefix = a.out + "/" + spec.study;
  if (spec.setting > 0) prefix += "_setting" + std::to_string(spec.setting);
  bcgwr::write_dataset_csv(dataset, prefix);

  json cfg = {{"study", spec.study},
              {"setting", spec.setting},
              {"obs_per_region", spec.obs_per_region},
              {"seed", spec.seed},
              {"covariate_bandwidth", spec.covariate_bandwidth}};
  bcgwr::write_manifest_json("simulate", spec.seed, cfg.dump(), prefix + "_manifest.json");
  std::cout << "wrote " << prefix << "_{frame,data,true_beta";
  if (!dataset.true_labels.empty()) std::cout << ",labels";
  std::cout << "}.csv\n";
  return 0;
}

// --- fit --------------------------------------------------------------------

struct FitArgs {
  std::string data_path, frame_path, adjacency_path, schema_path;
  std::string distance = "euclidean";
  std::string kernel = "exponential";
  double bandwidth_upper = -1.0;
  bool spherical = false;
  int iters = 10000, burnin = 2000, thin = 1;
  std::int64_t seed = -1;
  bool select = false;
  bool lppd = false;
  std::string simd = "auto";
  std::string out = ".";
  double beta_scale = 0.1, sigma2_scale = 0.4, sigma2_beta_scale = 0.4, bandwidth_scale = 5.0;
  bool no_adapt = false;
};

bcgwr::BgwrConfig make_sampler_config(const FitArgs& a) {
  bcgwr::BgwrConfig cfg;
  cfg.iterations = a.iters;
  cfg.burn_in = a.burnin;
  cfg.thin = a.thin;
  cfg.seed = static_cast<std::uint64_t>(a.seed);
  cfg.beta_scale = a.beta_scale;
  cfg.sigma2_scale = a.sigma2_scale;
  cfg.sigma2_beta_scale = a.sigma2_beta_scale;
  cfg.bandwidth_scale = a.bandwidth_scale;
  cfg.adapt_scales = !a.no_adapt;
  cfg.validate();
  return cfg;
}

json fit_config_json(const FitArgs& a) {
  return json{{"data", a.data_path},       {"frame", a.frame_path},
              {"adjacency", a.adjacency_path}, {"schema", a.schema_path},
              {"distance", a.distance},    {"kernel", a.kernel},
              {"bandwidth_upper", a.bandwidth_upper}, {"spherical", a.spherical},
              {"iters", a.iters},          {"burnin", a.burnin},
              {"thin", a.thin},            {"seed", a.seed},
              {"select", a.select},        {"lppd", a.lppd},
              {"simd", a.simd}};
}

int cmd_fit(const FitArgs& a) {
  if (a.seed < 0) throw ConfigError("--seed is required (no wall-clock seeding)");
  bcgwr::simd::select_kernels(a.simd);
  const Inputs in = load_inputs(a.data_path, a.frame_path, a.adjacency_path, a.schema_path,
                                a.distance, a.kernel, a.bandwidth_upper, a.spherical);
  const bcgwr::BgwrConfig cfg = make_sampler_config(a);

  const bcgwr::PosteriorDraws draws =
      a.select ? bcgwr::run_rjmcmc(in.data, in.distances, in.kernel, cfg)
               : bcgwr::run_bgwr(in.data, in.distances, in.kernel, cfg);

  ensure_dir(a.out);
  bcgwr::write_draws_csv(draws, a.out + "/draws.csv");
  bcgwr::write_summary_csv(draws, in.frame.region_ids, in.data.column_names,
                           a.out + "/summary.csv");
  bcgwr::write_acceptance_csv(draws.acceptance, a.out + "/acceptance.csv");
  if (a.select) {
    const bcgwr::InclusionSummary incl = bcgwr::inclusion_summary(draws);
    bcgwr::write_inclusion_csv(incl, draws.num_regions, in.frame.region_ids,
                               in.data.column_names, a.out + "/inclusion.csv");
  }
  const bcgwr::FitAssessment fa =
      bcgwr::assess_fit(draws, in.data, in.distances, in.kernel, a.lppd);
  if (!(std::isfinite(fa.waic) && std::isfinite(fa.dic)))
    throw std::range_error("assessment produced non-finite WAIC/DIC");
  {
    std::ofstream f(a.out + "/assessment.csv");
    f << "metric,value\nwaic," << bcgwr::format_double(fa.waic) << "\nwaic_V,"
      << bcgwr::format_double(fa.V) << "\ndic," << bcgwr::format_double(fa.dic) << "\np_d,"
      << bcgwr::format_double(fa.p_d) << '\n';
  }
  bcgwr::write_manifest_json("fit", cfg.seed, fit_config_json(a).dump(),
                             a.out + "/manifest.json");
  std::cout << "retained " << draws.num_draws() << " draws; acceptance beta="
            << draws.acceptance.beta << " sigma2=" << draws.acceptance.sigma2
            << " bandwidth=" << draws.acceptance.bandwidth << "\n";
  return 0;
}

// --- cluster ----------------------------------------------------------------

struct ClusterArgs {
  std::string draws_path;
  std::string frame_path;
  std::string truth_path;
  std::string model = "both";   // gmm | dpmm | both
  std::string method = "both";  // dahl | mode | both
  int samples = 500;
  int kmax = 10;
  int restarts = 10;
  int truncation = 20;
  double alpha = 1.0;
  int dpmm_iters = 600;
  int dpmm_burnin = 200;
  std::int64_t seed = -1;
  std::string out = ".";
};

std::vector<bcgwr::CoefficientSample> extract_samples(const bcgwr::PosteriorDraws& draws,
                                                      int max_samples) {
  const int M = draws.num_draws();
  const int S = draws.num_regions;
  const int p = draws.num_coefficients;
  const int take = std::min(M, max_samples);
  std::vector<bcgwr::CoefficientSample> out;
  out.reserve(take);
  for (int t = 0; t < take; ++t) {
    // Evenly spaced retained draws; deterministic for a given draw log.
    const int m = static_cast<int>((static_cast<long long>(t) * M) / take);
    bcgwr::CoefficientSample cs;
    cs.num_rows = S;
    cs.num_cols = p;
    cs.sample_id = m;
    cs.values.resize(static_cast<size_t>(S) * p);
    for (int s = 0; s < S; ++s)
      for (int j = 0; j < p; ++j) {
        double v = draws.beta_at(m, s, j);
        if (draws.has_selection() && !draws.gamma_at(m, s, j)) v = 0.0;
        cs.values[static_cast<size_t>(s) * p + j] = v;
      }
    out.push_back(std::move(cs));
  }
  return out;
}

int cmd_cluster(const ClusterArgs& a) {
  if (a.seed < 0) throw ConfigError("--seed is required (no wall-clock seeding)");
  require_file(a.draws_path, "draws");
  const bcgwr::PosteriorDraws draws = bcgwr::read_draws_csv(a.draws_path);
  std::vector<std::string> region_ids;
  bcgwr::SpatialFrame frame;
  if (!a.frame_path.empty()) {
    require_file(a.frame_path, "frame");
    frame = bcgwr::read_frame_csv(a.frame_path, bcgwr::CoordinateMode::Planar);
    if (frame.size() != draws.num_regions)
      throw DataError("frame and draw log disagree on region count");
    region_ids = frame.region_ids;
  } else {
    region_ids = default_region_ids(draws.num_regions);
    frame.region_ids = region_ids;
    frame.coordinates.assign(draws.num_regions, {0.0, 0.0});
  }

  const auto samples = extract_samples(draws, a.samples);
  const bool want_gmm = a.model == "gmm" || a.model == "both";
  const bool want_dpmm = a.model == "dpmm" || a.model == "both";
  const bool want_dahl = a.method == "dahl" || a.method == "both";
  const bool want_mode = a.method == "mode" || a.method == "both";
  if (!want_gmm && !want_dpmm) throw ConfigError("unknown clustering model: " + a.model);
  if (!want_dahl && !want_mode) throw ConfigError("unknown configuration method: " + a.method);

  ensure_dir(a.out);
  std::vector<int> truth;
  if (!a.truth_path.empty()) truth = read_truth_csv(a.truth_path, frame);
  std::vector<std::tuple<std::string, std::string, double>> ri_rows;

  auto emit = [&](const std::string& model, const bcgwr::ClusterConfiguration& conf) {
    bcgwr::write_configuration_csv(conf, region_ids,
                                   a.out + "/labels_" + model + "_" + conf.method_tag + ".csv");
    if (!truth.empty())
      ri_rows.emplace_back(model, conf.method_tag, bcgwr::rand_index(conf.labels, truth));
  };

  if (want_gmm) {
    bcgwr::ClusterDraws gdraws;
    gdraws.num_regions = draws.num_regions;
    gdraws.truncation = a.kmax;
    for (size_t t = 0; t < samples.size(); ++t) {
      const auto sel = bcgwr::gmm_select_k(samples[t], a.kmax, a.restarts,
                                           static_cast<std::uint64_t>(a.seed) + 7919 * t);
      gdraws.labels.push_back(sel.fit.hard_labels);
    }
    if (want_dahl) emit("gmm", bcgwr::dahl_configuration(gdraws));
    if (want_mode) emit("gmm", bcgwr::mode_configuration(gdraws));
  }
  if (want_dpmm) {
    bcgwr::DpmmConfig dc;
    dc.alpha = a.alpha;
    dc.truncation = a.truncation;
    dc.iterations = a.dpmm_iters;
    dc.burn_in = a.dpmm_burnin;
    dc.seed = static_cast<std::uint64_t>(a.seed) + 104729;
    const bcgwr::TwoStageResult two = bcgwr::two_stage_dpmm(samples, dc, "mode");
    bcgwr::ClusterDraws sdraws;
    sdraws.num_regions = draws.num_regions;
    sdraws.truncation = a.truncation;
    sdraws.labels = two.stage1_labels;
    if (want_dahl) emit("dpmm", bcgwr::dahl_configuration(sdraws));
    if (want_mode) emit("dpmm", bcgwr::mode_configuration(sdraws));
  }
  if (!truth.empty()) {
    std::ofstream f(a.out + "/rand_index.csv");
    f << "model,method,rand_index\n";
    for (const auto& [model, method, ri] : ri_rows)
      f << model << ',' << method << ',' << bcgwr::format_double(ri) << '\n';
  }
  json cfg = {{"draws", a.draws_path}, {"frame", a.frame_path},   {"truth", a.truth_path},
              {"model", a.model},      {"method", a.method},      {"samples", a.samples},
              {"kmax", a.kmax},        {"restarts", a.restarts},  {"truncation", a.truncation},
              {"alpha", a.alpha},      {"dpmm_iters", a.dpmm_iters},
              {"dpmm_burnin", a.dpmm_burnin}, {"seed", a.seed}};
  bcgwr::write_manifest_json("cluster", static_cast<std::uint64_t>(a.seed), cfg.dump(),
                             a.out + "/cluster_manifest.json");
  for (const auto& [model, method, ri] : ri_rows)
    std::cout << model << "+" << method << " rand_index=" << ri << "\n";
  return 0;
}

// --- assess -----------------------------------------------------------------

struct AssessArgs {
  std::string draws_path, data_path, frame_path, adjacency_path, schema_path;
  std::string distance = "euclidean";
  std::string kernel = "exponential";
  double bandwidth_upper = -1.0;
  bool spherical = false;
  bool lppd = false;
  std::string out = ".";
};

int cmd_assess(const AssessArgs& a) {
  require_file(a.draws_path, "draws");
  const Inputs in = load_inputs(a.data_path, a.frame_path, a.adjacency_path, a.schema_path,
                                a.distance, a.kernel, a.bandwidth_upper, a.spherical);
  const bcgwr::PosteriorDraws draws = bcgwr::read_draws_csv(a.draws_path);
  const bcgwr::FitAssessment fa =
      bcgwr::assess_fit(draws, in.data, in.distances, in.kernel, a.lppd);
  if (!(std::isfinite(fa.waic) && std::isfinite(fa.dic)))
    throw std::range_error("assessment produced non-finite WAIC/DIC");
  ensure_dir(a.out);
  std::ofstream f(a.out + "/assessment.csv");
  f << "metric,value\nwaic," << bcgwr::format_double(fa.waic) << "\nwaic_V,"
    << bcgwr::format_double(fa.V) << "\ndic," << bcgwr::format_double(fa.dic) << "\np_d,"
    << bcgwr::format_double(fa.p_d) << '\n';
  json cfg = {{"draws", a.draws_path}, {"data", a.data_path},     {"frame", a.frame_path},
              {"distance", a.distance}, {"kernel", a.kernel},     {"lppd", a.lppd},
              {"bandwidth_upper", a.bandwidth_upper}};
  bcgwr::write_manifest_json("assess", 0, cfg.dump(), a.out + "/assess_manifest.json");
  std::cout << "waic=" << fa.waic << " dic=" << fa.dic << " p_d=" << fa.p_d << "\n";
  return 0;
}

// --- replicate ----------------------------------------------------------------

struct ReplicateArgs {
  std::string study = "flat64";
  int setting = 0;
  int replicates = 20;
  std::int64_t seed = -1;
  int iters = 10000, burnin = 2000, thin = 1;
  std::string kernel = "exponential";
  bool select = false;
  int obs_per_region = -1;
  int workers = 1;
  std::string out = ".";
};

void run_one_replicate(const ReplicateArgs& a, int r, const std::string& path) {
  bcgwr::SimStudySpec spec;
  spec.study = a.study;
  spec.setting = a.study == "georgia159" ? (a.setting > 0 ? a.setting : 1) : 0;
  spec.obs_per_region =
      a.obs_per_region > 0 ? a.obs_per_region : (a.study == "georgia159" ? 1 : 3);
  spec.seed = static_cast<std::uint64_t>(a.seed) + static_cast<std::uint64_t>(r);
  const bcgwr::SimDataset dataset = bcgwr::generate_study(spec);
  const bcgwr::DistanceMatrix distances =
      bcgwr::compute_distances(dataset.frame, bcgwr::DistanceMetric::Euclidean);

  bcgwr::KernelSpec kernel;
  kernel.kind = bcgwr::kernel_kind_from_string(a.kernel);
  double dmax = 0.0;
  for (double v : distances.values) dmax = std::max(dmax, v);
  kernel.bandwidth_upper = a.study == "flat64" ? 100.0 : dmax;

  bcgwr::BgwrConfig cfg;
  cfg.iterations = a.iters;
  cfg.burn_in = a.burnin;
  cfg.thin = a.thin;
  cfg.seed = spec.seed;
  cfg.validate();
  const bcgwr::PosteriorDraws draws =
      a.select ? bcgwr::run_rjmcmc(dataset.data, distances, kernel, cfg)
               : bcgwr::run_bgwr(dataset.data, distances, kernel, cfg);
  const auto summary = bcgwr::posterior_summary(draws);

  const int S = draws.num_regions;
  const int p = draws.num_coefficients;
  double bw = 0.0;
  for (double b : draws.bandwidth) bw += b;
  bw /= draws.num_draws();

  // One row per coefficient: region-averaged posterior mean and sd.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw DataError("cannot open for writing: " + tmp);
    f << "replicate,coefficient,mean,sd,bandwidth_mean,true_beta\n";
    for (int j = 0; j < p; ++j) {
      double mean = 0.0, sd = 0.0, truth = 0.0;
      for (int s = 0; s < S; ++s) {
        mean += summary[static_cast<size_t>(s) * p + j].mean;
        sd += summary[static_cast<size_t>(s) * p + j].sd;
        truth += dataset.true_beta[static_cast<size_t>(s) * p + j];
      }
      f << r << ',' << j << ',' << bcgwr::format_double(mean / S) << ','
        << bcgwr::format_double(sd / S) << ',' << bcgwr::format_double(bw) << ','
        << bcgwr::format_double(truth / S) << '\n';
    }
  }
  fs::rename(tmp, path);  // partial writes never leave a readable replicate file
}

int cmd_replicate(const ReplicateArgs& a) {
  if (a.seed < 0) throw ConfigError("--seed is required (no wall-clock seeding)");
  if (a.replicates <= 0) throw ConfigError("--replicates must be positive");
  ensure_dir(a.out);

  auto replicate_path = [&](int r) {
    return a.out + "/replicate_" + std::to_string(r) + ".csv";
  };

  // Resumable: replicates whose files already exist are skipped.
  std::vector<int> pending;
  for (int r = 0; r < a.replicates; ++r)
    if (!fs::exists(replicate_path(r))) pending.push_back(r);

  const int workers = std::max(1, std::min(a.workers, static_cast<int>(pending.size())));
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= pending.size() || failed.load()) return;
      try {
        run_one_replicate(a, pending[i], replicate_path(pending[i]));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        error_message = e.what();
        return;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failed.load()) throw std::runtime_error("replicate failed: " + error_message);

  // Merge: read every replicate file back, aggregate per coefficient.
  int p = -1;
  std::vector<std::vector<double>> means, sds;
  std::vector<double> truth;
  double bw_sum = 0.0;
  for (int r = 0; r < a.replicates; ++r) {
    std::ifstream f(replicate_path(r));
    if (!f) throw DataError("missing replicate file: " + replicate_path(r));
    std::string line;
    std::getline(f, line);
    std::vector<double> row_means, row_sds;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string field;
      std::vector<std::string> fields;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      if (fields.size() != 6) throw DataError("malformed replicate row: " + line);
      row_means.push_back(std::stod(fields[2]));
      row_sds.push_back(std::stod(fields[3]));
      if (r == 0) truth.push_back(std::stod(fields[5]));
      if (row_means.size() == 1) bw_sum += std::stod(fields[4]);
    }
    if (p < 0) p = static_cast<int>(row_means.size());
    if (static_cast<int>(row_means.size()) != p)
      throw DataError("replicate files disagree on coefficient count");
    means.push_back(std::move(row_means));
    sds.push_back(std::move(row_sds));
  }

  const bcgwr::ReplicationMetrics metrics = bcgwr::replication_metrics(means, sds, truth);
  {
    std::ofstream f(a.out + "/metrics.csv");
    f << "coefficient,true_beta,mean_estimate,mab,msd,mmse\n";
    for (int j = 0; j < p; ++j) {
      double avg = 0.0;
      for (int r = 0; r < a.replicates; ++r) avg += means[r][j];
      avg /= a.replicates;
      f << j << ',' << bcgwr::format_double(truth[j]) << ',' << bcgwr::format_double(avg)
        << ',' << bcgwr::format_double(metrics.mab[j]) << ','
        << bcgwr::format_double(metrics.msd[j]) << ','
        << bcgwr::format_double(metrics.mmse[j]) << '\n';
    }
    f << "bandwidth," << bcgwr::format_double(bw_sum / a.replicates) << ",,,,\n";
  }
  json cfg = {{"study", a.study},       {"setting", a.setting}, {"replicates", a.replicates},
              {"seed", a.seed},         {"iters", a.iters},     {"burnin", a.burnin},
              {"thin", a.thin},         {"kernel", a.kernel},   {"select", a.select},
              {"workers", a.workers}};
  bcgwr::write_manifest_json("replicate", static_cast<std::uint64_t>(a.seed), cfg.dump(),
                             a.out + "/replicate_manifest.json");
  std::cout << "aggregated " << a.replicates << " replicates into " << a.out
            << "/metrics.csv\n";
  return 0;
}

// --- summarize ----------------------------------------------------------------

struct SummarizeArgs {
  std::string draws_path;
  std::string frame_path;
  int coefficient = -1;  // extra rank-probability outputs when >= 0
  int top_k = 3;
  std::string out = ".";
};

int cmd_summarize(const SummarizeArgs& a) {
  require_file(a.draws_path, "draws");
  const bcgwr::PosteriorDraws draws = bcgwr::read_draws_csv(a.draws_path);
  std::vector<std::string> region_ids;
  if (!a.frame_path.empty()) {
    require_file(a.frame_path, "frame");
    const auto frame = bcgwr::read_frame_csv(a.frame_path, bcgwr::CoordinateMode::Planar);
    if (frame.size() != draws.num_regions)
      throw DataError("frame and draw log disagree on region count");
    region_ids = frame.region_ids;
  } else {
    region_ids = default_region_ids(draws.num_regions);
  }
  std::vector<std::string> coef_names;
  for (int j = 0; j < draws.num_coefficients; ++j) coef_names.push_back("beta_" + std::to_string(j));

  ensure_dir(a.out);
  bcgwr::write_summary_csv(draws, region_ids, coef_names, a.out + "/summary.csv");
  if (a.coefficient >= 0) {
    if (a.coefficient >= draws.num_coefficients)
      throw ConfigError("--coefficient out of range");
    const auto own = bcgwr::prob_exceed_own_mean(draws, a.coefficient);
    const auto topk = bcgwr::top_k_probability(draws, a.coefficient, a.top_k);
    std::ofstream f(a.out + "/rank_probabilities.csv");
    f << "region_id,prob_exceed_own_mean,prob_top_" << a.top_k << "\n";
    for (int s = 0; s < draws.num_regions; ++s)
      f << region_ids[s] << ',' << bcgwr::format_double(own[s]) << ','
        << bcgwr::format_double(topk[s]) << '\n';
  }
  std::cout << "wrote " << a.out << "/summary.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian cluster geographically weighted regression pipeline"};
  app.require_subcommand(1);
  app.fallthrough();  // --config may appear after the subcommand name
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values")
      ->envname("BCGWR_CONFIG");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic study dataset");
  c_sim->add_option("study", sim.study, "flat64 or georgia159");
  c_sim->add_option("--setting", sim.setting, "georgia159 setting (1-3)");
  c_sim->add_option("--seed", sim.seed, "RNG seed (required)")->envname("BCGWR_SEED");
  c_sim->add_option("--obs-per-region", sim.obs_per_region, "observations per region");
  c_sim->add_option("--covariate-bandwidth", sim.covariate_bandwidth,
                    "georgia covariate correlation scale");
  c_sim->add_option("--out", sim.out, "output directory")->envname("BCGWR_OUT");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Run the BGWR (or RJMCMC) sampler");
  c_fit->add_option("--data", fit.data_path, "data CSV (region_id,y,covariates...)");
  c_fit->add_option("--frame", fit.frame_path, "frame CSV (region_id,x,y)");
  c_fit->add_option("--adjacency", fit.adjacency_path, "adjacency edge-list CSV");
  c_fit->add_option("--schema", fit.schema_path, "covariate schema JSON");
  c_fit->add_option("--distance", fit.distance, "euclidean | great_circle | graph")
      ->envname("BCGWR_DISTANCE");
  c_fit->add_option("--kernel", fit.kernel, "exponential | gaussian | bisquare | graph_hybrid")
      ->envname("BCGWR_KERNEL");
  c_fit->add_option("--bandwidth-upper", fit.bandwidth_upper,
                    "bandwidth prior upper bound D (default: max distance)");
  c_fit->add_flag("--spherical", fit.spherical, "frame holds lat/lon degrees");
  c_fit->add_option("--iters", fit.iters, "MCMC iterations")->envname("BCGWR_ITERS");
  c_fit->add_option("--burnin", fit.burnin, "burn-in iterations")->envname("BCGWR_BURNIN");
  c_fit->add_option("--thin", fit.thin, "thinning interval");
  c_fit->add_option("--seed", fit.seed, "RNG seed (required)")->envname("BCGWR_SEED");
  c_fit->add_flag("--select", fit.select, "enable reversible-jump variable selection");
  c_fit->add_flag("--lppd", fit.lppd, "use log-mean-exp lppd in WAIC");
  c_fit->add_option("--simd", fit.simd, "auto | scalar | avx2");
  c_fit->add_option("--out", fit.out, "output directory")->envname("BCGWR_OUT");

  ClusterArgs clu;
  auto* c_clu = app.add_subcommand("cluster", "Cluster posterior coefficient samples");
  c_clu->add_option("--draws", clu.draws_path, "draw log CSV from fit");
  c_clu->add_option("--frame", clu.frame_path, "frame CSV for region ids");
  c_clu->add_option("--truth", clu.truth_path, "true labels CSV for Rand index");
  c_clu->add_option("--model", clu.model, "gmm | dpmm | both");
  c_clu->add_option("--method", clu.method, "dahl | mode | both")->envname("BCGWR_METHOD");
  c_clu->add_option("--samples", clu.samples, "posterior samples to cluster (default 500)");
  c_clu->add_option("--kmax", clu.kmax, "GMM maximum K for BIC selection");
  c_clu->add_option("--restarts", clu.restarts, "GMM EM restarts per K");
  c_clu->add_option("--truncation", clu.truncation, "DPMM stick-breaking truncation");
  c_clu->add_option("--alpha", clu.alpha, "DPMM concentration");
  c_clu->add_option("--dpmm-iters", clu.dpmm_iters, "DPMM Gibbs iterations per sample");
  c_clu->add_option("--dpmm-burnin", clu.dpmm_burnin, "DPMM burn-in per sample");
  c_clu->add_option("--seed", clu.seed, "RNG seed (required)")->envname("BCGWR_SEED");
  c_clu->add_option("--out", clu.out, "output directory")->envname("BCGWR_OUT");

  AssessArgs ass;
  auto* c_ass = app.add_subcommand("assess", "WAIC/DIC for an existing draw log");
  c_ass->add_option("--draws", ass.draws_path, "draw log CSV from fit");
  c_ass->add_option("--data", ass.data_path, "data CSV");
  c_ass->add_option("--frame", ass.frame_path, "frame CSV");
  c_ass->add_option("--adjacency", ass.adjacency_path, "adjacency edge-list CSV");
  c_ass->add_option("--schema", ass.schema_path, "covariate schema JSON");
  c_ass->add_option("--distance", ass.distance, "euclidean | great_circle | graph")
      ->envname("BCGWR_DISTANCE");
  c_ass->add_option("--kernel", ass.kernel, "kernel name")->envname("BCGWR_KERNEL");
  c_ass->add_option("--bandwidth-upper", ass.bandwidth_upper, "bandwidth prior upper bound");
  c_ass->add_flag("--spherical", ass.spherical, "frame holds lat/lon degrees");
  c_ass->add_flag("--lppd", ass.lppd, "use log-mean-exp lppd in WAIC");
  c_ass->add_option("--out", ass.out, "output directory")->envname("BCGWR_OUT");

  ReplicateArgs rep;
  auto* c_rep = app.add_subcommand("replicate", "Seeded simulate+fit replicates");
  c_rep->add_option("--study", rep.study, "flat64 or georgia159");
  c_rep->add_option("--setting", rep.setting, "georgia159 setting (1-3)");
  c_rep->add_option("--replicates", rep.replicates, "number of replicates");
  c_rep->add_option("--seed", rep.seed, "base RNG seed; replicate r uses seed+r")
      ->envname("BCGWR_SEED");
  c_rep->add_option("--iters", rep.iters, "MCMC iterations")->envname("BCGWR_ITERS");
  c_rep->add_option("--burnin", rep.burnin, "burn-in iterations")->envname("BCGWR_BURNIN");
  c_rep->add_option("--thin", rep.thin, "thinning interval");
  c_rep->add_option("--kernel", rep.kernel, "kernel name")->envname("BCGWR_KERNEL");
  c_rep->add_flag("--select", rep.select, "use reversible-jump selection");
  c_rep->add_option("--obs-per-region", rep.obs_per_region, "observations per region");
  c_rep->add_option("--workers", rep.workers, "worker threads")->envname("BCGWR_WORKERS");
  c_rep->add_option("--out", rep.out, "output directory")->envname("BCGWR_OUT");

  SummarizeArgs sum;
  auto* c_sum = app.add_subcommand("summarize", "Posterior summaries from a draw log");
  c_sum->add_option("--draws", sum.draws_path, "draw log CSV from fit");
  c_sum->add_option("--frame", sum.frame_path, "frame CSV for region ids");
  c_sum->add_option("--coefficient", sum.coefficient,
                    "coefficient index for rank-probability outputs");
  c_sum->add_option("--top-k", sum.top_k, "k for top-k rank probabilities");
  c_sum->add_option("--out", sum.out, "output directory")->envname("BCGWR_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    // Config-file values fill in anything not set by a flag.
    const json cfg = load_config_file(config_path);
    if (c_sim->parsed()) {
      if (!c_sim->count("--seed")) from_config(cfg, "seed", sim.seed);
      if (!c_sim->count("--setting")) from_config(cfg, "setting", sim.setting);
      if (!c_sim->count("--out")) from_config(cfg, "out", sim.out);
      if (!c_sim->count("--obs-per-region")) from_config(cfg, "obs_per_region", sim.obs_per_region);
      if (!c_sim->count("--covariate-bandwidth"))
        from_config(cfg, "covariate_bandwidth", sim.covariate_bandwidth);
      return cmd_simulate(sim);
    }
    if (c_fit->parsed()) {
      if (!c_fit->count("--data")) from_config(cfg, "data", fit.data_path);
      if (!c_fit->count("--frame")) from_config(cfg, "frame", fit.frame_path);
      if (!c_fit->count("--adjacency")) from_config(cfg, "adjacency", fit.adjacency_path);
      if (!c_fit->count("--schema")) from_config(cfg, "schema", fit.schema_path);
      if (!c_fit->count("--distance")) from_config(cfg, "distance", fit.distance);
      if (!c_fit->count("--kernel")) from_config(cfg, "kernel", fit.kernel);
      if (!c_fit->count("--bandwidth-upper"))
        from_config(cfg, "bandwidth_upper", fit.bandwidth_upper);
      if (!c_fit->count("--iters")) from_config(cfg, "iters", fit.iters);
      if (!c_fit->count("--burnin")) from_config(cfg, "burnin", fit.burnin);
      if (!c_fit->count("--thin")) from_config(cfg, "thin", fit.thin);
      if (!c_fit->count("--seed")) from_config(cfg, "seed", fit.seed);
      if (!c_fit->count("--select")) from_config(cfg, "select", fit.select);
      if (!c_fit->count("--simd")) from_config(cfg, "simd", fit.simd);
      if (!c_fit->count("--out")) from_config(cfg, "out", fit.out);
      from_config(cfg, "beta_scale", fit.beta_scale);
      from_config(cfg, "sigma2_scale", fit.sigma2_scale);
      from_config(cfg, "sigma2_beta_scale", fit.sigma2_beta_scale);
      from_config(cfg, "bandwidth_scale", fit.bandwidth_scale);
      from_config(cfg, "no_adapt", fit.no_adapt);
      return cmd_fit(fit);
    }
    if (c_clu->parsed()) {
      if (!c_clu->count("--draws")) from_config(cfg, "draws", clu.draws_path);
      if (!c_clu->count("--frame")) from_config(cfg, "frame", clu.frame_path);
      if (!c_clu->count("--truth")) from_config(cfg, "truth", clu.truth_path);
      if (!c_clu->count("--model")) from_config(cfg, "model", clu.model);
      if (!c_clu->count("--method")) from_config(cfg, "method", clu.method);
      if (!c_clu->count("--samples")) from_config(cfg, "samples", clu.samples);
      if (!c_clu->count("--seed")) from_config(cfg, "seed", clu.seed);
      if (!c_clu->count("--out")) from_config(cfg, "out", clu.out);
      return cmd_cluster(clu);
    }
    if (c_ass->parsed()) {
      if (!c_ass->count("--draws")) from_config(cfg, "draws", ass.draws_path);
      if (!c_ass->count("--data")) from_config(cfg, "data", ass.data_path);
      if (!c_ass->count("--frame")) from_config(cfg, "frame", ass.frame_path);
      if (!c_ass->count("--distance")) from_config(cfg, "distance", ass.distance);
      if (!c_ass->count("--kernel")) from_config(cfg, "kernel", ass.kernel);
      if (!c_ass->count("--out")) from_config(cfg, "out", ass.out);
      return cmd_assess(ass);
    }
    if (c_rep->parsed()) {
      if (!c_rep->count("--study")) from_config(cfg, "study", rep.study);
      if (!c_rep->count("--setting")) from_config(cfg, "setting", rep.setting);
      if (!c_rep->count("--replicates")) from_config(cfg, "replicates", rep.replicates);
      if (!c_rep->count("--seed")) from_config(cfg, "seed", rep.seed);
      if (!c_rep->count("--iters")) from_config(cfg, "iters", rep.iters);
      if (!c_rep->count("--burnin")) from_config(cfg, "burnin", rep.burnin);
      if (!c_rep->count("--kernel")) from_config(cfg, "kernel", rep.kernel);
      if (!c_rep->count("--workers")) from_config(cfg, "workers", rep.workers);
      if (!c_rep->count("--out")) from_config(cfg, "out", rep.out);
      return cmd_replicate(rep);
    }
    if (c_sum->parsed()) {
      if (!c_sum->count("--draws")) from_config(cfg, "draws", sum.draws_path);
      if (!c_sum->count("--frame")) from_config(cfg, "frame", sum.frame_path);
      if (!c_sum->count("--out")) from_config(cfg, "out", sum.out);
      return cmd_summarize(sum);
    }
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::range_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  }
}
