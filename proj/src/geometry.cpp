#include "bcgwr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace bcgwr {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

DistanceMatrix make_matrix(int s, DistanceMetric metric) {
  DistanceMatrix m;
  m.size = s;
  m.metric = metric;
  m.values.assign(static_cast<size_t>(s) * s, 0.0);
  return m;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    // trim whitespace and CR
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    out.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  return out;
}

}  // namespace

void SpatialFrame::validate() const {
  if (region_ids.size() < 2) throw std::invalid_argument("SpatialFrame needs at least 2 regions");
  if (coordinates.size() != region_ids.size())
    throw std::invalid_argument("SpatialFrame: coordinates/region_ids size mismatch");
  if (mode == CoordinateMode::Spherical) {
    for (const auto& [lat, lon] : coordinates) {
      if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0)
        throw std::domain_error("SpatialFrame: latitude/longitude out of range");
    }
  }
  if (has_adjacency() && adjacency.size() != region_ids.size())
    throw std::invalid_argument("SpatialFrame: adjacency size mismatch");
}

DistanceMatrix euclidean_distances(const SpatialFrame& frame) {
  if (frame.mode != CoordinateMode::Planar)
    throw std::invalid_argument("euclidean_distances requires a planar frame");
  const int s = frame.size();
  DistanceMatrix m = make_matrix(s, DistanceMetric::Euclidean);
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      const double dx = frame.coordinates[i].first - frame.coordinates[j].first;
      const double dy = frame.coordinates[i].second - frame.coordinates[j].second;
      const double d = std::sqrt(dx * dx + dy * dy);
      m.at(i, j) = d;
      m.at(j, i) = d;
    }
  }
  return m;
}

DistanceMatrix great_circle_distances(const SpatialFrame& frame, double radius) {
  if (frame.mode != CoordinateMode::Spherical)
    throw std::invalid_argument("great_circle_distances requires a spherical frame");
  if (radius <= 0.0) throw std::domain_error("great_circle_distances: radius must be positive");
  frame.validate();
  const int s = frame.size();
  DistanceMatrix m = make_matrix(s, DistanceMetric::GreatCircle);
  for (int i = 0; i < s; ++i) {
    const double ai = frame.coordinates[i].first * kDegToRad;
    const double bi = frame.coordinates[i].second * kDegToRad;
    for (int j = i + 1; j < s; ++j) {
      const double aj = frame.coordinates[j].first * kDegToRad;
      const double bj = frame.coordinates[j].second * kDegToRad;
      double c = std::cos(ai) * std::cos(aj) * std::cos(bi - bj) + std::sin(ai) * std::sin(aj);
      c = std::clamp(c, -1.0, 1.0);  // absorbs float overshoot at identical/antipodal points
      const double d = radius * std::acos(c);
      m.at(i, j) = d;
      m.at(j, i) = d;
    }
  }
  return m;
}

DistanceMatrix graph_distances(const SpatialFrame& frame) {
  if (!frame.has_adjacency())
    throw std::invalid_argument("graph_distances requires adjacency information");
  const int s = frame.size();
  DistanceMatrix m = make_matrix(s, DistanceMetric::Graph);
  std::fill(m.values.begin(), m.values.end(), kInfiniteDistance);
  std::vector<int> dist(s);
  std::deque<int> queue;
  for (int src = 0; src < s; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    queue.clear();
    queue.push_back(src);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : frame.adjacency[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int j = 0; j < s; ++j)
      if (dist[j] >= 0) m.at(src, j) = static_cast<double>(dist[j]);
  }
  return m;
}

DistanceMatrix compute_distances(const SpatialFrame& frame, DistanceMetric metric,
                                 double sphere_radius) {
  switch (metric) {
    case DistanceMetric::Euclidean: return euclidean_distances(frame);
    case DistanceMetric::GreatCircle: return great_circle_distances(frame, sphere_radius);
    case DistanceMetric::Graph: return graph_distances(frame);
  }
  throw std::invalid_argument("unknown distance metric");
}

SpatialFrame read_frame_csv(const std::string& path, CoordinateMode mode) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open frame CSV: " + path);
  SpatialFrame frame;
  frame.mode = mode;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty frame CSV: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 3) throw std::runtime_error("frame CSV row needs 3 columns: " + path);
    frame.region_ids.push_back(fields[0]);
    frame.coordinates.emplace_back(std::stod(fields[1]), std::stod(fields[2]));
  }
  frame.validate();
  return frame;
}

void read_adjacency_csv(const std::string& path, SpatialFrame& frame) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open adjacency CSV: " + path);
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < frame.size(); ++i) index[frame.region_ids[i]] = i;
  frame.adjacency.assign(frame.region_ids.size(), {});
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 2) throw std::runtime_error("adjacency CSV row needs 2 columns: " + path);
    const auto a = index.find(fields[0]);
    const auto b = index.find(fields[1]);
    if (a == index.end() || b == index.end())
      throw std::runtime_error("adjacency CSV references unknown region: " + line);
    if (a->second == b->second) continue;  // keep the diagonal empty
    frame.adjacency[a->second].push_back(b->second);
    frame.adjacency[b->second].push_back(a->second);
  }
  for (auto& neighbours : frame.adjacency) {
    std::sort(neighbours.begin(), neighbours.end());
    neighbours.erase(std::unique(neighbours.begin(), neighbours.end()), neighbours.end());
  }
}

}  // namespace bcgwr
