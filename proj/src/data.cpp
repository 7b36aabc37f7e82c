#include "bcgwr/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace bcgwr {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    out.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  return out;
}

}  // namespace

void RegressionData::validate() const {
  if (y.empty()) throw std::invalid_argument("RegressionData: no observations");
  if (obs_region.size() != y.size())
    throw std::invalid_argument("RegressionData: obs_region/y size mismatch");
  for (const auto& col : x_columns)
    if (col.size() != y.size()) throw std::invalid_argument("RegressionData: ragged design matrix");
  for (int r : obs_region)
    if (r < 0 || r >= num_regions)
      throw std::invalid_argument("RegressionData: observation region out of range");
}

RegressionData read_regression_csv(const std::string& data_path, const SpatialFrame& frame,
                                   const std::string& schema_path) {
  std::ifstream in(data_path);
  if (!in) throw std::runtime_error("cannot open data CSV: " + data_path);

  std::unordered_map<std::string, std::string> schema;
  if (!schema_path.empty()) {
    std::ifstream sin(schema_path);
    if (!sin) throw std::runtime_error("cannot open schema: " + schema_path);
    nlohmann::json js;
    sin >> js;
    for (auto it = js.begin(); it != js.end(); ++it) schema[it.key()] = it.value().get<std::string>();
  }

  std::unordered_map<std::string, int> region_index;
  for (int i = 0; i < frame.size(); ++i) region_index[frame.region_ids[i]] = i;

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty data CSV: " + data_path);
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "region_id" || header[1] != "y")
    throw std::runtime_error("data CSV must start with region_id,y: " + data_path);
  const int num_covariates = static_cast<int>(header.size()) - 2;

  std::vector<int> obs_region;
  std::vector<double> y;
  std::vector<std::vector<std::string>> raw(num_covariates);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error("data CSV row width mismatch: " + data_path);
    const auto it = region_index.find(fields[0]);
    if (it == region_index.end())
      throw std::runtime_error("data CSV references unknown region: " + fields[0]);
    obs_region.push_back(it->second);
    y.push_back(std::stod(fields[1]));
    for (int c = 0; c < num_covariates; ++c) raw[c].push_back(fields[c + 2]);
  }

  RegressionData data;
  data.y = std::move(y);
  data.obs_region = std::move(obs_region);
  data.num_regions = frame.size();

  for (int c = 0; c < num_covariates; ++c) {
    const std::string& name = header[c + 2];
    const auto kind = schema.count(name) ? schema.at(name) : std::string("continuous");
    if (kind == "continuous") {
      std::vector<double> col(raw[c].size());
      for (size_t i = 0; i < raw[c].size(); ++i) col[i] = std::stod(raw[c][i]);
      data.x_columns.push_back(std::move(col));
      data.column_names.push_back(name);
    } else if (kind == "categorical") {
      std::set<std::string> levels(raw[c].begin(), raw[c].end());
      auto it = levels.begin();
      ++it;  // first sorted level is the baseline
      for (; it != levels.end(); ++it) {
        std::vector<double> col(raw[c].size());
        for (size_t i = 0; i < raw[c].size(); ++i) col[i] = raw[c][i] == *it ? 1.0 : 0.0;
        data.x_columns.push_back(std::move(col));
        data.column_names.push_back(name + "=" + *it);
      }
    } else {
      throw std::runtime_error("schema type for " + name + " must be continuous or categorical");
    }
  }

  data.validate();
  return data;
}

}  // namespace bcgwr
