#include "urbancdc/geo_topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_set>

#include "text_util.hpp"
#include "urbancdc/random.hpp"

namespace urbancdc {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

double geo_distance(GeoPoint a, GeoPoint b) {
  if (a == b) return 0.0;
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

double planar_distance(GeoPoint a, GeoPoint b) {
  return std::hypot(b.lat - a.lat, b.lon - a.lon) * kEarthRadiusM * kDegToRad;
}

double distance(GeoPoint a, GeoPoint b, DistanceMetric metric) {
  return metric == DistanceMetric::Haversine ? geo_distance(a, b) : planar_distance(a, b);
}

NodeSet::NodeSet(std::vector<GeoPoint> points, std::vector<std::int64_t> source_ids)
    : points_(std::move(points)), source_ids_(std::move(source_ids)) {
  if (points_.empty()) throw ValidationError("node set is empty");
  if (source_ids_.empty()) {
    source_ids_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) source_ids_[i] = static_cast<std::int64_t>(i);
  }
  if (source_ids_.size() != points_.size()) {
    throw ValidationError("source id count does not match node count");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0)) {
      throw ValidationError("node " + std::to_string(source_ids_[i]) + " has coordinates out of range");
    }
  }
  std::unordered_set<std::int64_t> seen;
  for (auto id : source_ids_) {
    if (!seen.insert(id).second) throw ValidationError("duplicate node id " + std::to_string(id));
  }
}

std::optional<NodeId> NodeSet::find_source(std::int64_t source_id) const {
  const auto it = std::find(source_ids_.begin(), source_ids_.end(), source_id);
  if (it == source_ids_.end()) return std::nullopt;
  return static_cast<NodeId>(it - source_ids_.begin());
}

NodeFile read_nodes(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool has_density = false;
  std::vector<std::int64_t> ids;
  std::vector<GeoPoint> points;
  std::vector<double> density;

  while (std::getline(in, line)) {
    ++line_no;
    const auto content = text::trim(line);
    if (content.empty()) continue;
    const auto fields = text::split(content, ',');
    if (!have_header) {
      if (fields.size() < 3 || fields.size() > 4 || fields[0] != "id" || fields[1] != "lat" ||
          fields[2] != "lon" || (fields.size() == 4 && fields[3] != "density")) {
        throw ParseError("expected header id,lat,lon[,density]", line_no);
      }
      has_density = fields.size() == 4;
      have_header = true;
      continue;
    }
    const std::size_t expected = has_density ? 4 : 3;
    if (fields.size() != expected) {
      throw ParseError("expected " + std::to_string(expected) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const auto id = text::parse_number<std::int64_t>(fields[0]);
    const auto lat = text::parse_number<double>(fields[1]);
    const auto lon = text::parse_number<double>(fields[2]);
    if (!id) throw ParseError("bad id '" + std::string(fields[0]) + "'", line_no);
    if (!lat || !(*lat >= -90.0 && *lat <= 90.0)) {
      throw ParseError("bad latitude '" + std::string(fields[1]) + "'", line_no);
    }
    if (!lon || !(*lon >= -180.0 && *lon <= 180.0)) {
      throw ParseError("bad longitude '" + std::string(fields[2]) + "'", line_no);
    }
    if (has_density) {
      const auto d = text::parse_number<double>(fields[3]);
      if (!d || !std::isfinite(*d)) {
        throw ParseError("bad density '" + std::string(fields[3]) + "'", line_no);
      }
      density.push_back(*d);
    }
    ids.push_back(*id);
    points.push_back({*lat, *lon});
  }
  if (ids.empty()) throw ValidationError("node file has no records");

  // Dense ids in any order are kept as-is; anything else is re-indexed in input order.
  const auto n = ids.size();
  const bool dense = std::all_of(ids.begin(), ids.end(), [n](std::int64_t id) {
    return id >= 0 && static_cast<std::uint64_t>(id) < n;
  });
  if (dense) {
    std::vector<int> placed(n, 0);
    for (auto id : ids) {
      if (placed[static_cast<std::size_t>(id)]++) {
        throw ValidationError("duplicate node id " + std::to_string(id));
      }
    }
    std::vector<GeoPoint> ordered(n);
    std::vector<std::int64_t> ordered_ids(n);
    std::vector<double> ordered_density(has_density ? n : 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto slot = static_cast<std::size_t>(ids[i]);
      ordered[slot] = points[i];
      ordered_ids[slot] = ids[i];
      if (has_density) ordered_density[slot] = density[i];
    }
    points = std::move(ordered);
    ids = std::move(ordered_ids);
    density = std::move(ordered_density);
  }

  NodeFile file{NodeSet(std::move(points), std::move(ids)), std::nullopt};
  if (has_density) file.density = std::move(density);
  return file;
}

NodeFile load_nodes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open node file " + path.string());
  return read_nodes(in);
}

void write_nodes(std::ostream& out, const NodeSet& nodes, std::span<const double> density) {
  const bool with_density = !density.empty();
  if (with_density && density.size() != nodes.size()) {
    throw ValidationError("density length does not match node count");
  }
  out << (with_density ? "id,lat,lon,density\n" : "id,lat,lon\n");
  for (NodeId i = 0; i < nodes.size(); ++i) {
    const auto p = nodes.point(i);
    out << nodes.source_id(i) << ',' << text::format_exact(p.lat) << ','
        << text::format_exact(p.lon);
    if (with_density) out << ',' << text::format_exact(density[i]);
    out << '\n';
  }
}

NodeSet synth_nodes(std::size_t n, const BoundingBox& box, std::uint64_t seed) {
  if (n == 0) throw ValidationError("synthetic node count must be at least 1");
  Rng rng(derive_seed(seed, 0x6e6f646573ULL));
  std::vector<GeoPoint> points(n);
  for (auto& p : points) {
    p.lat = rng.uniform(box.lat_min, box.lat_max);
    p.lon = rng.uniform(box.lon_min, box.lon_max);
  }
  return NodeSet(std::move(points));
}

Topology::Topology(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ == 0) throw ValidationError("topology needs at least one node");
  if (edges_.size() != node_count_ - 1) {
    throw ValidationError("a spanning tree over " + std::to_string(node_count_) + " nodes needs " +
                          std::to_string(node_count_ - 1) + " edges");
  }
  std::vector<std::size_t> degree(node_count_, 0);
  for (const auto& e : edges_) {
    if (e.u >= node_count_ || e.v >= node_count_ || e.u == e.v) {
      throw ValidationError("edge endpoint out of range");
    }
    if (!(e.weight_m > 0.0)) throw ValidationError("edge weights must be positive");
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets_.assign(node_count_ + 1, 0);
  for (std::size_t i = 0; i < node_count_; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adjacent_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacent_[fill[e.u]++] = e.v;
    adjacent_[fill[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < node_count_; ++i) {
    std::sort(adjacent_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacent_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }

  // N-1 edges plus connectivity implies acyclic.
  std::vector<char> seen(node_count_, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  if (reached != node_count_) throw ValidationError("topology is not connected");
}

std::span<const NodeId> Topology::neighbors(NodeId u) const {
  return {adjacent_.data() + offsets_.at(u), offsets_.at(u + 1) - offsets_.at(u)};
}

double Topology::total_weight() const {
  double total = 0.0;
  for (const auto& e : edges_) total += e.weight_m;
  return total;
}

Topology build_emst(const NodeSet& nodes, DistanceMetric metric) {
  const std::size_t n = nodes.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Candidate edge into the tree for every outside node: (weight, lo, hi).
  using Key = std::tuple<double, NodeId, NodeId>;
  std::vector<Key> best(n, Key{kInf, 0, 0});
  std::vector<char> in_tree(n, 0);
  std::vector<Edge> edges;
  edges.reserve(n - 1);

  NodeId current = 0;
  in_tree[0] = 1;
  for (std::size_t added = 1; added < n; ++added) {
    const auto from = nodes.point(current);
    std::size_t pick = n;
    for (NodeId v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const Key cand{distance(from, nodes.point(v), metric), std::min(current, v),
                     std::max(current, v)};
      if (cand < best[v]) best[v] = cand;
      if (pick == n || best[v] < best[pick]) pick = v;
    }
    const auto [w, lo, hi] = best[pick];
    if (!(w > 0.0)) {
      throw ValidationError("nodes " + std::to_string(nodes.source_id(lo)) + " and " +
                            std::to_string(nodes.source_id(hi)) + " share coordinates");
    }
    edges.push_back({lo, hi, w});
    in_tree[pick] = 1;
    current = static_cast<NodeId>(pick);
  }
  return Topology(n, std::move(edges));
}

void write_edges(std::ostream& out, const Topology& topology, const NodeSet& nodes) {
  out << "u,v,weight_m\n";
  for (const auto& e : topology.edges()) {
    out << nodes.source_id(e.u) << ',' << nodes.source_id(e.v) << ','
        << text::format_fixed(e.weight_m, 3) << '\n';
  }
}

HopMatrix::HopMatrix(std::size_t n, std::vector<std::uint32_t> hops) : n_(n), hops_(std::move(hops)) {
  if (hops_.size() != n_ * n_) throw ValidationError("hop matrix must be n x n");
}

HopMatrix hop_matrix(const Topology& topology) {
  const std::size_t n = topology.node_count();
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> hops(n * n, kUnset);
  std::vector<NodeId> queue(n);
  for (NodeId src = 0; src < n; ++src) {
    auto* row = hops.data() + std::size_t{src} * n;
    row[src] = 0;
    std::size_t head = 0;
    std::size_t tail = 0;
    queue[tail++] = src;
    while (head < tail) {
      const auto u = queue[head++];
      for (auto v : topology.neighbors(u)) {
        if (row[v] == kUnset) {
          row[v] = row[u] + 1;
          queue[tail++] = v;
        }
      }
    }
  }
  return HopMatrix(n, std::move(hops));
}

}  // namespace urbancdc
