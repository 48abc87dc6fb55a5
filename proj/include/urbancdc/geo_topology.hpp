#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "urbancdc/common.hpp"

namespace urbancdc {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

enum class DistanceMetric {
  Haversine,  // great-circle distance on lat/lon
  Planar,     // straight-line distance treating (lat, lon) degrees as a flat grid
};

/// Haversine great-circle distance in meters.
double geo_distance(GeoPoint a, GeoPoint b);

/// Euclidean distance of the raw coordinates, scaled by meters per degree of arc.
double planar_distance(GeoPoint a, GeoPoint b);

double distance(GeoPoint a, GeoPoint b, DistanceMetric metric);

/// Geolocated cloudlets addressed by dense ids [0, N).
///
/// Input files may use any integer ids. When they are exactly {0..N-1} the
/// node with id k lands at index k; otherwise nodes are re-indexed in input
/// order. The original ids are retained as source ids for export.
class NodeSet {
 public:
  explicit NodeSet(std::vector<GeoPoint> points, std::vector<std::int64_t> source_ids = {});

  std::size_t size() const noexcept { return points_.size(); }
  GeoPoint point(NodeId id) const { return points_.at(id); }
  std::span<const GeoPoint> points() const noexcept { return points_; }
  std::int64_t source_id(NodeId id) const { return source_ids_.at(id); }
  std::span<const std::int64_t> source_ids() const noexcept { return source_ids_; }
  std::optional<NodeId> find_source(std::int64_t source_id) const;

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

 private:
  std::vector<GeoPoint> points_;
  std::vector<std::int64_t> source_ids_;
};

/// A parsed node file. The density column is optional.
struct NodeFile {
  NodeSet nodes;
  std::optional<std::vector<double>> density;
};

/// Reads `id,lat,lon[,density]` text with a header row.
NodeFile read_nodes(std::istream& in);
NodeFile load_nodes(const std::filesystem::path& path);
void write_nodes(std::ostream& out, const NodeSet& nodes, std::span<const double> density = {});

/// Uniformly scattered nodes inside a lat/lon box; used as a stand-in borough.
struct BoundingBox {
  double lat_min = 40.57;
  double lat_max = 40.74;
  double lon_min = -74.04;
  double lon_max = -73.86;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};
NodeSet synth_nodes(std::size_t n, const BoundingBox& box, std::uint64_t seed);

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight_m = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// A backhaul tree over N nodes.
class Topology {
 public:
  /// Throws ValidationError unless the edges form a spanning tree with positive weights.
  Topology(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return node_count_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const NodeId> neighbors(NodeId u) const;
  double total_weight() const;

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacent_;
};

/// Euclidean minimum spanning tree by dense Prim's. Among equal weights the
/// edge with the lexicographically smaller (min(u,v), max(u,v)) wins, which
/// makes the tree unique. Throws ValidationError for coincident nodes.
Topology build_emst(const NodeSet& nodes, DistanceMetric metric = DistanceMetric::Haversine);

/// `u,v,weight_m` rows using the node set's source ids.
void write_edges(std::ostream& out, const Topology& topology, const NodeSet& nodes);

/// All-pairs hop counts over a tree.
class HopMatrix {
 public:
  HopMatrix() = default;
  HopMatrix(std::size_t n, std::vector<std::uint32_t> hops);

  std::size_t size() const noexcept { return n_; }
  std::uint32_t operator()(NodeId u, NodeId v) const { return hops_[std::size_t{u} * n_ + v]; }
  std::span<const std::uint32_t> row(NodeId u) const {
    return {hops_.data() + std::size_t{u} * n_, n_};
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> hops_;
};

/// Breadth-first search from every node.
HopMatrix hop_matrix(const Topology& topology);

}  // namespace urbancdc
