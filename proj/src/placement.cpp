#include "urbancdc/placement.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "text_util.hpp"

namespace urbancdc {

bool Community::contains(NodeId id) const {
  return std::binary_search(members.begin(), members.end(), id);
}

Community whole_network(const Topology& topology) {
  Community c;
  c.members.resize(topology.node_count());
  for (NodeId i = 0; i < c.members.size(); ++i) c.members[i] = i;
  c.edges.assign(topology.edges().begin(), topology.edges().end());
  return c;
}

std::vector<double> weighted_hop_vector(const Community& community, const HopMatrix& hops,
                                        const RequestVector& r) {
  const auto& m = community.members;
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t a = 0; a < m.size(); ++a) {
    const auto row = hops.row(m[a]);
    double sum = 0.0;
    for (auto j : m) sum += row[j] * r[j];
    out[a] = sum;
  }
  return out;
}

namespace {

// Members are ascending, so the first minimum is the smallest id.
std::size_t argmin_position(std::span<const double> weighted) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < weighted.size(); ++a) {
    if (weighted[a] < weighted[best]) best = a;
  }
  return best;
}

std::size_t position_of(const Community& community, NodeId id) {
  const auto it = std::lower_bound(community.members.begin(), community.members.end(), id);
  if (it == community.members.end() || *it != id) {
    throw ValidationError("node " + std::to_string(id) + " is not a community member");
  }
  return static_cast<std::size_t>(it - community.members.begin());
}

}  // namespace

NodeId select_cdc(const Community& community, const HopMatrix& hops, const RequestVector& r) {
  if (community.members.empty()) throw ValidationError("cannot select a CDC in an empty community");
  const auto weighted = weighted_hop_vector(community, hops, r);
  return community.members[argmin_position(weighted)];
}

Split split_community(const Community& community, NodeId cdc, std::span<const double> weighted) {
  if (community.members.size() < 2) throw ValidationError("cannot split a singleton community");
  if (weighted.size() != community.members.size()) {
    throw ValidationError("weighted hop vector does not match community size");
  }
  position_of(community, cdc);

  // Neighbour of the CDC with the smallest weighted value.
  std::optional<std::size_t> removed_edge;
  NodeId partner = 0;
  double partner_value = 0.0;
  for (std::size_t e = 0; e < community.edges.size(); ++e) {
    const auto& edge = community.edges[e];
    if (edge.u != cdc && edge.v != cdc) continue;
    const NodeId other = edge.u == cdc ? edge.v : edge.u;
    const double value = weighted[position_of(community, other)];
    if (!removed_edge || value < partner_value || (value == partner_value && other < partner)) {
      removed_edge = e;
      partner = other;
      partner_value = value;
    }
  }
  if (!removed_edge) throw ValidationError("CDC has no incident edge inside its community");

  const std::size_t n = community.members.size();
  std::vector<std::vector<std::size_t>> adjacent(n);
  for (std::size_t e = 0; e < community.edges.size(); ++e) {
    if (e == *removed_edge) continue;
    const auto a = position_of(community, community.edges[e].u);
    const auto b = position_of(community, community.edges[e].v);
    adjacent[a].push_back(b);
    adjacent[b].push_back(a);
  }
  std::vector<char> side(n, 0);  // 1 = reachable from the CDC
  std::vector<std::size_t> stack{position_of(community, cdc)};
  side[stack.back()] = 1;
  while (!stack.empty()) {
    const auto a = stack.back();
    stack.pop_back();
    for (auto b : adjacent[a]) {
      if (!side[b]) {
        side[b] = 1;
        stack.push_back(b);
      }
    }
  }

  Split out{{}, {}, community.edges[*removed_edge]};
  for (std::size_t a = 0; a < n; ++a) {
    (side[a] ? out.with_cdc : out.detached).members.push_back(community.members[a]);
  }
  for (std::size_t e = 0; e < community.edges.size(); ++e) {
    if (e == *removed_edge) continue;
    const auto& edge = community.edges[e];
    (side[position_of(community, edge.u)] ? out.with_cdc : out.detached).edges.push_back(edge);
  }
  return out;
}

PlacementResult::PlacementResult(const Topology& topology, std::vector<PlacementLevel> levels,
                                 std::vector<std::pair<NodeId, std::size_t>> selection_order)
    : edges_(topology.edges().begin(), topology.edges().end()),
      levels_(std::move(levels)),
      selection_order_(std::move(selection_order)) {}

std::vector<Community> PlacementResult::communities(std::size_t k) const {
  const auto& lvl = level(k);
  std::vector<Community> out(lvl.cdcs.size());
  for (NodeId i = 0; i < lvl.community_of.size(); ++i) out[lvl.community_of[i]].members.push_back(i);
  for (const auto& e : edges_) {
    if (lvl.community_of[e.u] == lvl.community_of[e.v]) out[lvl.community_of[e.u]].edges.push_back(e);
  }
  for (std::size_t c = 0; c < out.size(); ++c) out[c].cdc = lvl.cdcs[c];
  return out;
}

namespace {

struct Working {
  Community community;
  std::vector<double> weighted;
  std::size_t cdc_pos = 0;

  double cdc_value() const { return weighted[cdc_pos]; }
};

Working make_working(Community c, const HopMatrix& hops, const RequestVector& r) {
  Working w{std::move(c), {}, 0};
  w.weighted = weighted_hop_vector(w.community, hops, r);
  w.cdc_pos = argmin_position(w.weighted);
  w.community.cdc = w.community.members[w.cdc_pos];
  return w;
}

PlacementLevel snapshot(const std::vector<Working>& parts, std::size_t n, std::optional<Edge> split) {
  PlacementLevel lvl;
  lvl.community_of.assign(n, 0);
  lvl.split_edge = split;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    for (auto id : parts[c].community.members) lvl.community_of[id] = static_cast<std::uint32_t>(c);
    lvl.cdcs.push_back(*parts[c].community.cdc);
    lvl.avg_weighted_hops += parts[c].cdc_value();
  }
  return lvl;
}

}  // namespace

PlacementResult hierarchical_placement(const Topology& topology, const HopMatrix& hops,
                                       const RequestVector& r, std::size_t k_max) {
  const std::size_t n = topology.node_count();
  if (k_max < 1 || k_max > n) {
    throw ValidationError("k_max must lie in [1, " + std::to_string(n) + "]");
  }
  if (r.size() != n || hops.size() != n) {
    throw ValidationError("request vector and hop matrix must match the topology");
  }

  std::vector<Working> parts;
  parts.push_back(make_working(whole_network(topology), hops, r));
  std::vector<PlacementLevel> levels;
  levels.push_back(snapshot(parts, n, std::nullopt));
  std::vector<std::pair<NodeId, std::size_t>> order{{*parts[0].community.cdc, 1}};

  while (levels.size() < k_max) {
    // Parts stay sorted by smallest member, so the first maximum wins ties.
    std::optional<std::size_t> target;
    for (std::size_t c = 0; c < parts.size(); ++c) {
      if (parts[c].community.size() < 2) continue;
      if (!target || parts[c].cdc_value() > parts[*target].cdc_value()) target = c;
    }
    if (!target) break;  // unreachable while k_max <= n

    auto split = split_community(parts[*target].community, *parts[*target].community.cdc,
                                 parts[*target].weighted);
    const std::size_t k = levels.size() + 1;
    std::vector<NodeId> before;
    for (const auto& p : parts) before.push_back(*p.community.cdc);

    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(*target));
    parts.push_back(make_working(std::move(split.with_cdc), hops, r));
    parts.push_back(make_working(std::move(split.detached), hops, r));
    std::sort(parts.begin(), parts.end(), [](const Working& a, const Working& b) {
      return a.community.members.front() < b.community.members.front();
    });
    for (const auto& p : parts) {
      if (std::find(before.begin(), before.end(), *p.community.cdc) == before.end()) {
        order.emplace_back(*p.community.cdc, k);
      }
    }
    levels.push_back(snapshot(parts, n, split.removed));
  }
  return PlacementResult(topology, std::move(levels), std::move(order));
}

double avg_weighted_hops(std::span<const Community> communities, const HopMatrix& hops,
                         const RequestVector& r) {
  double total = 0.0;
  for (const auto& c : communities) {
    if (!c.cdc) throw ValidationError("community has no CDC");
    const auto row = hops.row(*c.cdc);
    for (auto i : c.members) total += r[i] * row[i];
  }
  return total;
}

std::size_t elbow_estimate(std::span<const CurvePoint> curve) {
  if (curve.size() < 3) throw ValidationError("elbow estimate needs at least three points");
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (!(curve[i].k > curve[i - 1].k)) throw ValidationError("curve k must be strictly increasing");
  }
  const auto& a = curve.front();
  const auto& b = curve.back();
  const double dx = b.k - a.k;
  const double dy = b.value - a.value;
  const double norm = std::hypot(dx, dy);
  std::size_t best = 1;
  double best_distance = -1.0;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double cross = dx * (curve[i].value - a.value) - dy * (curve[i].k - a.k);
    const double d = std::abs(cross) / norm;
    if (d > best_distance) {
      best_distance = d;
      best = i;
    }
  }
  return static_cast<std::size_t>(std::llround(curve[best].k));
}

std::vector<CurvePoint> placement_curve(const PlacementResult& placement) {
  std::vector<CurvePoint> curve;
  for (std::size_t k = 1; k <= placement.max_k(); ++k) {
    curve.push_back({static_cast<double>(k), placement.level(k).avg_weighted_hops});
  }
  return curve;
}

void write_placement(std::ostream& out, const PlacementResult& placement, std::size_t k,
                     const NodeSet& nodes) {
  const auto& lvl = placement.level(k);
  out << "node_id,community_id,cdc_id\n";
  for (NodeId i = 0; i < lvl.community_of.size(); ++i) {
    const auto c = lvl.community_of[i];
    out << nodes.source_id(i) << ',' << c << ',' << nodes.source_id(lvl.cdcs[c]) << '\n';
  }
}

void write_curve(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "k,avg_hops\n";
  for (const auto& p : curve) {
    out << std::llround(p.k) << ',' << text::format_fixed(p.value, 6) << '\n';
  }
}

}  // namespace urbancdc
