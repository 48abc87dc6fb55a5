#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "urbancdc/cache_policies.hpp"
#include "urbancdc/geo_topology.hpp"
#include "urbancdc/population.hpp"
#include "urbancdc/random.hpp"

namespace testing {

using namespace urbancdc;

inline Topology chain(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Topology(n, edges);
}

inline Topology star(std::size_t leaves, NodeId hub = 0) {
  std::vector<Edge> edges;
  for (NodeId v = 0; v <= leaves; ++v) {
    if (v != hub) edges.push_back({hub, v, 1.0});
  }
  return Topology(leaves + 1, edges);
}

// Random labelled tree: each node attaches to an earlier node of a shuffled order.
inline Topology random_tree(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0U);
  rng.shuffle(std::span<NodeId>(order));
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    const auto parent = order[rng.below(i)];
    edges.push_back({parent, order[i], 1.0 + rng.uniform()});
  }
  return Topology(n, edges);
}

inline RequestVector uniform_r(std::size_t n) {
  return RequestVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

inline RequestVector random_r(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> gamma(n);
  for (auto& g : gamma) g = 0.05 + rng.uniform();
  return request_probabilities(PopulationMap(gamma));
}

// Unit-weight all-pairs shortest paths, independent of the BFS implementation.
inline std::vector<std::vector<std::uint32_t>> floyd_warshall(const Topology& t) {
  const std::size_t n = t.node_count();
  constexpr std::uint32_t inf = 1U << 30;
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : t.edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// Kruskal over the complete graph with a plain union-find.
inline double kruskal_weight(const NodeSet& nodes, DistanceMetric metric) {
  const std::size_t n = nodes.size();
  struct Cand {
    double w;
    std::size_t u, v;
  };
  std::vector<Cand> all;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      all.push_back({distance(nodes.point(u), nodes.point(v), metric), u, v});
  std::sort(all.begin(), all.end(), [](const Cand& a, const Cand& b) { return a.w < b.w; });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  double total = 0.0;
  for (const auto& c : all) {
    const auto a = find(c.u), b = find(c.v);
    if (a != b) {
      parent[a] = b;
      total += c.w;
    }
  }
  return total;
}

// Brute-force weighted 1-median over all nodes.
inline NodeId one_median(const Topology& t, const RequestVector& r) {
  const auto d = testing::floyd_warshall(t);
  NodeId best = 0;
  double best_value = INFINITY;
  for (NodeId v = 0; v < t.node_count(); ++v) {
    double value = 0.0;
    for (NodeId j = 0; j < t.node_count(); ++j) value += r[j] * d[v][j];
    if (value < best_value) {
      best_value = value;
      best = v;
    }
  }
  return best;
}

// Reference replacement caches kept as plain vectors and counters.
class ReferenceCache {
 public:
  ReferenceCache(PolicyKind kind, std::size_t capacity) : kind_(kind), capacity_(capacity) {}

  bool access(ContentId f) {
    ++clock_;
    auto it = std::find(items_.begin(), items_.end(), f);
    if (it != items_.end()) {
      ++freq_[f];
      last_[f] = clock_;
      if (kind_ != PolicyKind::Fifo) {
        items_.erase(it);
        items_.push_back(f);  // back = most recent
      }
      return true;
    }
    if (items_.size() == capacity_) {
      std::size_t victim = 0;
      switch (kind_) {
        case PolicyKind::Fifo:
        case PolicyKind::Lru:
          victim = 0;
          break;
        case PolicyKind::Mru:
          victim = items_.size() - 1;
          break;
        case PolicyKind::Lfu:
          for (std::size_t i = 1; i < items_.size(); ++i) {
            const auto a = items_[i], b = items_[victim];
            if (freq_[a] < freq_[b] || (freq_[a] == freq_[b] && last_[a] < last_[b])) victim = i;
          }
          break;
        default:
          break;
      }
      freq_.erase(items_[victim]);
      items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    items_.push_back(f);
    freq_[f] = 1;
    last_[f] = clock_;
    return false;
  }

  std::vector<ContentId> resident() const {
    auto out = items_;
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  PolicyKind kind_;
  std::size_t capacity_;
  std::uint64_t clock_ = 0;
  std::vector<ContentId> items_;
  std::map<ContentId, std::uint64_t> freq_, last_;
};

}  // namespace testing
