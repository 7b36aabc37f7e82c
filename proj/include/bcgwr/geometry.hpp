#pragma once

#include <limits>
#include <string>
#include <vector>

namespace bcgwr {

enum class CoordinateMode { Planar, Spherical };

// Region geometry: point coordinates plus an optional adjacency relation.
// Coordinates are (x, y) in planar mode and (latitude, longitude) in degrees
// in spherical mode; the mode is an explicit flag, never inferred from ranges.
struct SpatialFrame {
  std::vector<std::string> region_ids;
  std::vector<std::pair<double, double>> coordinates;
  CoordinateMode mode = CoordinateMode::Planar;
  // adjacency[i] lists neighbour indices; empty outer vector means "absent".
  std::vector<std::vector<int>> adjacency;

  int size() const { return static_cast<int>(region_ids.size()); }
  bool has_adjacency() const { return !adjacency.empty(); }

  void validate() const;
};

enum class DistanceMetric { Euclidean, GreatCircle, Graph };

constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

// Symmetric S x S matrix with zero diagonal; +inf marks disconnected pairs.
struct DistanceMatrix {
  int size = 0;
  DistanceMetric metric = DistanceMetric::Euclidean;
  std::vector<double> values;  // row-major size*size

  double operator()(int i, int j) const { return values[static_cast<size_t>(i) * size + j]; }
  double& at(int i, int j) { return values[static_cast<size_t>(i) * size + j]; }
};

DistanceMatrix euclidean_distances(const SpatialFrame& frame);
DistanceMatrix great_circle_distances(const SpatialFrame& frame, double radius);
// Shortest-path edge counts via BFS; +inf for disconnected pairs.
DistanceMatrix graph_distances(const SpatialFrame& frame);

DistanceMatrix compute_distances(const SpatialFrame& frame, DistanceMetric metric,
                                 double sphere_radius = 6371.0);

// CSV ingestion: frame file has columns region_id,x,y (or region_id,lat,lon);
// adjacency file is an edge list region_id_a,region_id_b.
SpatialFrame read_frame_csv(const std::string& path, CoordinateMode mode);
void read_adjacency_csv(const std::string& path, SpatialFrame& frame);

}  // namespace bcgwr
