#include "bcgwr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace bcgwr {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

void write_draws_csv(const PosteriorDraws& draws, const std::string& path) {
  auto f = open_out(path);
  const int M = draws.num_draws();
  const int S = draws.num_regions;
  const int p = draws.num_coefficients;
  const bool sel = draws.has_selection();

  f << "draw,region,sigma2,sigma2_beta,bandwidth";
  for (int j = 0; j < p; ++j) f << ",beta_" << j;
  if (sel)
    for (int j = 0; j < p; ++j) f << ",gamma_" << j;
  f << '\n';
  for (int m = 0; m < M; ++m) {
    for (int s = 0; s < S; ++s) {
      f << m << ',' << s << ',' << format_double(draws.sigma2[static_cast<size_t>(m) * S + s])
        << ',' << format_double(draws.sigma2_beta[m]) << ','
        << format_double(draws.bandwidth[m]);
      for (int j = 0; j < p; ++j) f << ',' << format_double(draws.beta_at(m, s, j));
      if (sel)
        for (int j = 0; j < p; ++j) f << ',' << static_cast<int>(draws.gamma_at(m, s, j));
      f << '\n';
    }
  }
}

PosteriorDraws read_draws_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open draw log: " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty draw log: " + path);
  const auto header = split_csv_line(line);
  if (header.size() < 6 || header[0] != "draw" || header[1] != "region")
    throw std::runtime_error("unrecognized draw log header: " + path);
  int p = 0, gcols = 0;
  for (const auto& h : header) {
    if (h.rfind("beta_", 0) == 0) ++p;
    if (h.rfind("gamma_", 0) == 0) ++gcols;
  }
  if (p == 0 || (gcols != 0 && gcols != p))
    throw std::runtime_error("inconsistent draw log columns: " + path);

  PosteriorDraws draws;
  draws.num_coefficients = p;
  int max_region = -1;
  std::vector<double> sigma2_beta_rows, bandwidth_rows;
  std::vector<int> draw_rows;
  size_t rows = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != 5 + p + gcols)
      throw std::runtime_error("malformed draw log row in " + path);
    draw_rows.push_back(std::stoi(fields[0]));
    const int region = std::stoi(fields[1]);
    max_region = std::max(max_region, region);
    draws.sigma2.push_back(std::stod(fields[2]));
    sigma2_beta_rows.push_back(std::stod(fields[3]));
    bandwidth_rows.push_back(std::stod(fields[4]));
    for (int j = 0; j < p; ++j) draws.beta.push_back(std::stod(fields[5 + j]));
    if (gcols)
      for (int j = 0; j < p; ++j)
        draws.gamma.push_back(static_cast<std::uint8_t>(std::stoi(fields[5 + p + j])));
    ++rows;
  }
  const int S = max_region + 1;
  if (S <= 0 || rows % S != 0) throw std::runtime_error("draw log rows not a multiple of regions");
  draws.num_regions = S;
  const size_t M = rows / S;
  draws.sigma2_beta.resize(M);
  draws.bandwidth.resize(M);
  for (size_t m = 0; m < M; ++m) {
    draws.sigma2_beta[m] = sigma2_beta_rows[m * S];
    draws.bandwidth[m] = bandwidth_rows[m * S];
  }
  return draws;
}

void write_summary_csv(const PosteriorDraws& draws, const std::vector<std::string>& region_ids,
                       const std::vector<std::string>& coef_names, const std::string& path) {
  const auto summary = posterior_summary(draws);
  const int S = draws.num_regions;
  const int p = draws.num_coefficients;
  auto f = open_out(path);
  f << "region_id,coefficient,mean,sd,lower95,upper95\n";
  for (int s = 0; s < S; ++s) {
    for (int j = 0; j < p; ++j) {
      const auto& c = summary[static_cast<size_t>(s) * p + j];
      f << region_ids[s] << ',' << coef_names[j] << ',' << format_double(c.mean) << ','
        << format_double(c.sd) << ',' << format_double(c.lower95) << ','
        << format_double(c.upper95) << '\n';
    }
  }
}

void write_acceptance_csv(const AcceptanceReport& report, const std::string& path) {
  auto f = open_out(path);
  f << "block,acceptance_rate\n";
  f << "beta," << format_double(report.beta) << '\n';
  f << "sigma2," << format_double(report.sigma2) << '\n';
  f << "sigma2_beta," << format_double(report.sigma2_beta) << '\n';
  f << "bandwidth," << format_double(report.bandwidth) << '\n';
  f << "toggle," << format_double(report.toggle) << '\n';
}

void write_inclusion_csv(const InclusionSummary& summary, int num_regions,
                         const std::vector<std::string>& region_ids,
                         const std::vector<std::string>& coef_names, const std::string& path) {
  const int p = static_cast<int>(coef_names.size());
  auto f = open_out(path);
  f << "region_id,coefficient,inclusion_probability,conditional_mean,ever_included\n";
  for (int s = 0; s < num_regions; ++s) {
    for (int j = 0; j < p; ++j) {
      const size_t idx = static_cast<size_t>(s) * p + j;
      f << region_ids[s] << ',' << coef_names[j] << ','
        << format_double(summary.probability[idx]) << ','
        << format_double(summary.conditional_mean[idx]) << ','
        << static_cast<int>(summary.ever_included[idx]) << '\n';
    }
  }
}

void write_configuration_csv(const ClusterConfiguration& configuration,
                             const std::vector<std::string>& region_ids,
                             const std::string& path) {
  const int S = static_cast<int>(configuration.labels.size());
  const int K = configuration.num_labels;
  auto f = open_out(path);
  f << "region_id,label";
  for (int k = 0; k < K; ++k) f << ",prob_" << k;
  f << '\n';
  for (int s = 0; s < S; ++s) {
    f << region_ids[s] << ',' << configuration.labels[s];
    for (int k = 0; k < K; ++k)
      f << ',' << format_double(configuration.probabilities[static_cast<size_t>(s) * K + k]);
    f << '\n';
  }
}

void write_manifest_json(const std::string& command, std::uint64_t seed,
                         const std::string& config_json, const std::string& path) {
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["version"] = "1.0.0";
  manifest["seed"] = seed;
  manifest["config"] = nlohmann::json::parse(config_json);
  manifest["config_hash"] = fnv1a_hex(config_json);
  auto f = open_out(path);
  f << manifest.dump(2) << '\n';
}

}  // namespace bcgwr
