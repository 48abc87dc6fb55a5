#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "urbancdc/geo_topology.hpp"
#include "urbancdc/population.hpp"

namespace urbancdc {

/// A connected subtree of the backhaul served by one CDC.
struct Community {
  std::vector<NodeId> members;  // ascending
  std::optional<NodeId> cdc;
  std::vector<Edge> edges;      // tree edges with both endpoints in `members`

  bool contains(NodeId id) const;
  std::size_t size() const noexcept { return members.size(); }
};

/// The whole topology as one community, without a CDC.
Community whole_network(const Topology& topology);

/// Entry i is sum_j hops(members[i], j) * r_j over the community's members,
/// using the global (not renormalised) request vector. Tree paths between two
/// members of a connected subtree never leave it, so the global hop matrix
/// gives community-internal distances.
std::vector<double> weighted_hop_vector(const Community& community, const HopMatrix& hops,
                                        const RequestVector& r);

/// argmin of the weighted hop vector; ties go to the smaller node id.
NodeId select_cdc(const Community& community, const HopMatrix& hops, const RequestVector& r);

struct Split {
  Community with_cdc;
  Community detached;
  Edge removed;
};

/// Removes the edge between `cdc` and its in-community neighbour with the
/// smallest weighted hop value (ties: smaller id). `weighted` must be aligned
/// with `community.members`. Throws ValidationError on a singleton community.
Split split_community(const Community& community, NodeId cdc, std::span<const double> weighted);

struct PlacementLevel {
  std::vector<std::uint32_t> community_of;  // node -> community index at this level
  std::vector<NodeId> cdcs;                 // community index -> CDC node
  std::optional<Edge> split_edge;           // edge removed to reach this level
  double avg_weighted_hops = 0.0;
};

/// Every level of the hierarchical split, from one community up to k_max.
/// Community indices within a level are ordered by their smallest member.
class PlacementResult {
 public:
  PlacementResult(const Topology& topology, std::vector<PlacementLevel> levels,
                  std::vector<std::pair<NodeId, std::size_t>> selection_order);

  std::size_t max_k() const noexcept { return levels_.size(); }
  const PlacementLevel& level(std::size_t k) const { return levels_.at(k - 1); }
  std::vector<Community> communities(std::size_t k) const;
  /// (CDC node, level at which it first appears)
  std::span<const std::pair<NodeId, std::size_t>> selection_order() const noexcept {
    return selection_order_;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<PlacementLevel> levels_;
  std::vector<std::pair<NodeId, std::size_t>> selection_order_;
};

/// Population-weighted hierarchical splitting. Each round splits the
/// multi-node community whose CDC has the largest weighted hop value (ties:
/// the community holding the smaller node id), then re-selects the CDCs of
/// both children. Requires 1 <= k_max <= N.
PlacementResult hierarchical_placement(const Topology& topology, const HopMatrix& hops,
                                       const RequestVector& r, std::size_t k_max);

/// sum_i r_i * hops(i, cdc(i)) for communities that partition the nodes.
double avg_weighted_hops(std::span<const Community> communities, const HopMatrix& hops,
                         const RequestVector& r);

struct CurvePoint {
  double k = 0.0;
  double value = 0.0;
};

/// The k of the point farthest from the chord joining the first and last
/// points (ties: smaller k). Needs at least three points with increasing k.
std::size_t elbow_estimate(std::span<const CurvePoint> curve);

std::vector<CurvePoint> placement_curve(const PlacementResult& placement);

/// `node_id,community_id,cdc_id` using source ids for nodes and CDCs.
void write_placement(std::ostream& out, const PlacementResult& placement, std::size_t k,
                     const NodeSet& nodes);
/// `k,avg_hops`
void write_curve(std::ostream& out, std::span<const CurvePoint> curve);

}  // namespace urbancdc
