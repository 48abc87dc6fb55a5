#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "urbancdc/cache_policies.hpp"
#include "urbancdc/geo_topology.hpp"
#include "urbancdc/placement.hpp"
#include "urbancdc/population.hpp"
#include "urbancdc/workload.hpp"

namespace urbancdc {

/// Immutable network description shared by runs: hop counts, request
/// probabilities and the communities with their CDCs.
class NetworkLayout {
 public:
  NetworkLayout(std::shared_ptr<const HopMatrix> hops, RequestVector r,
                std::vector<Community> communities);

  const HopMatrix& hops() const noexcept { return *hops_; }
  const RequestVector& requests() const noexcept { return r_; }
  std::size_t node_count() const noexcept { return community_of_.size(); }
  std::size_t cdc_count() const noexcept { return communities_.size(); }
  std::span<const Community> communities() const noexcept { return communities_; }
  NodeId cdc(std::size_t c) const { return *communities_.at(c).cdc; }
  std::uint32_t community_of(NodeId node) const { return community_of_.at(node); }
  std::span<const std::uint32_t> community_map() const noexcept { return community_of_; }

  /// Sum of r over the community: the share of requests its CDC serves.
  double request_share(std::size_t c) const { return share_.at(c); }
  /// r-weighted mean hops from members to their CDC, at least one hop.
  double intra_hops(std::size_t c) const { return intra_.at(c); }

 private:
  std::shared_ptr<const HopMatrix> hops_;
  RequestVector r_;
  std::vector<Community> communities_;
  std::vector<std::uint32_t> community_of_;
  std::vector<double> share_;
  std::vector<double> intra_;
};

struct NeighborLink {
  std::size_t cdc_index = 0;
  std::uint32_t hops = 0;
};

/// For every CDC, the `size` nearest other CDCs by hop distance (ties:
/// smaller CDC node id). Throws ValidationError when size >= CDC count.
std::vector<std::vector<NeighborLink>> neighborhood(const NetworkLayout& layout, std::size_t size);

struct OriginRange {
  std::uint32_t min_hops = 250;
  std::uint32_t max_hops = 500;

  friend bool operator==(const OriginRange&, const OriginRange&) = default;
};

enum class BetaMode { Fixed, SkewFormula };

struct BetaSetting {
  BetaMode mode = BetaMode::SkewFormula;
  double fixed = 0.5;

  friend bool operator==(const BetaSetting&, const BetaSetting&) = default;
};

struct EngineConfig {
  PolicyKind policy = PolicyKind::ScoreLfu;
  std::size_t catalog_size = 600;
  std::size_t capacity = 20;
  std::size_t window = 100;
  std::size_t neighborhood = 24;
  std::size_t mle_observations = 1000;
  std::uint64_t epoch_len = 100000;
  std::uint64_t requests = 1000000;
  std::uint64_t seed = 1;
  double alpha = 0.2;
  BetaSetting beta;
  SkewRange skew;
  OriginRange origin;
  bool cooperative_lookup = false;  // neighbour lookup for non-cooperative policies too

  /// Throws ValidationError.
  void validate(std::size_t cdc_count) const;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

enum class ServedBy { LocalCdc, NeighborCdc, Origin };

struct CacheEvent {
  enum class Kind { Admit, Evict };
  Kind kind = Kind::Admit;
  std::size_t cdc = 0;
  ContentId content = 0;
};

struct RequestOutcome {
  Request request;
  ServedBy served_by = ServedBy::Origin;
  std::size_t cdc = 0;                 // the requester's community CDC index
  std::optional<std::size_t> neighbor;  // neighbour contacted, including stale lookups
  std::uint32_t access_hops = 0;       // requester to its CDC
  std::uint32_t neighbor_hops = 0;     // CDC to the contacted neighbour
  std::uint32_t origin_hops = 0;       // origin penalty paid
  std::uint32_t latency = 0;
  std::vector<CacheEvent> cache_events;
};

struct WindowMetrics {
  std::uint64_t window = 0;
  std::uint64_t requests = 0;
  std::uint64_t local_hits = 0;
  std::uint64_t neighbor_hits = 0;
  std::uint64_t origin_fetches = 0;
  std::uint64_t latency_sum = 0;
  std::uint64_t exchanged_records = 0;

  double avg_latency() const;
  double hit_local() const;
  double hit_neighbor() const;
  double origin_ratio() const;
  double hit_ratio() const { return hit_local() + hit_neighbor(); }
};

struct MetricsSeries {
  std::vector<WindowMetrics> windows;
  WindowMetrics total;
};

/// `window,requests,avg_latency_hops,hit_local,hit_neighbor,origin_ratio,exchanged_records`
/// plus a TOTAL row when any request was served.
void write_metrics(std::ostream& out, const MetricsSeries& metrics);

/// Request-level simulation of one scenario. Deterministic per seed: the
/// workload and the policy draw from separate streams, so every policy sees
/// the same request sequence.
class Simulator {
 public:
  Simulator(std::shared_ptr<const NetworkLayout> layout, EngineConfig config);

  /// Serves one request and applies the caching decision at the requester's CDC.
  RequestOutcome route_request(const Request& request);

  MetricsSeries run();
  MetricsSeries replay(std::span<const Request> trace);

  void set_observer(std::function<void(const RequestOutcome&)> observer) {
    observer_ = std::move(observer);
  }

  const NetworkLayout& layout() const noexcept { return *layout_; }
  const EngineConfig& config() const noexcept { return config_; }
  const WorkloadModel& workload() const noexcept { return workload_; }
  std::span<const NeighborLink> neighbors(std::size_t cdc) const { return neighbors_.at(cdc); }
  bool holds(std::size_t cdc, ContentId f) const;
  std::vector<ContentId> resident(std::size_t cdc) const;
  std::uint32_t origin_hops(std::size_t cdc) const { return cdcs_.at(cdc).origin_hops; }
  double beta(std::size_t cdc) const { return cdcs_.at(cdc).beta; }
  std::optional<double> estimated_skew(std::size_t cdc) const { return cdcs_.at(cdc).s_hat; }
  const PopularityTracker& tracker(std::size_t cdc) const { return cdcs_.at(cdc).tracker; }
  /// Scores from the last refresh, with local availability as of now.
  std::vector<double> scores(std::size_t cdc) const;

  /// Exchanges availability and popularity snapshots and refreshes scores.
  /// run() and replay() call this every `window` requests. Popularity
  /// windows close per CDC after `window` requests seen at that CDC.
  std::uint64_t close_window();

  /// Test hook: place content directly into a CDC cache, bypassing policy.
  void preload(std::size_t cdc, ContentId f);

 private:
  struct CdcState {
    explicit CdcState(double alpha) : tracker(alpha) {}

    std::optional<ReplacementCache> replacement;
    std::optional<RankedCache> ranked;
    PopularityTracker tracker;
    std::vector<char> snapshot_available;
    std::vector<double> snapshot_popularity;
    std::vector<double> weighted_popularity;  // r_i * p_{f,i} from the last snapshot
    std::vector<double> miss_penalty;         // r_i * p_{f,i} * l_{i,origin} where f was absent
    // Score parts from the last refresh. The local part is divided by the
    // intra-CDC delay, plus the origin penalty when absent at decision time.
    std::vector<double> neighbor_part;
    std::vector<double> local_part;
    std::vector<ContentId> observations;
    std::optional<double> s_hat;
    double beta = 0.5;
    std::uint32_t origin_hops = 0;
  };

  bool exchanges_snapshots() const;
  void apply_caching(std::size_t c, ContentId f, RequestOutcome& outcome);
  void refresh_scores(std::size_t c);
  double score_now(std::size_t c, ContentId f) const;
  MetricsSeries drive(std::uint64_t count, const std::function<Request()>& next);

  std::shared_ptr<const NetworkLayout> layout_;
  EngineConfig config_;
  Rng workload_rng_;
  Rng policy_rng_;
  WorkloadModel workload_;
  std::vector<std::vector<NeighborLink>> neighbors_;
  std::vector<CdcState> cdcs_;
  std::function<void(const RequestOutcome&)> observer_;
};

}  // namespace urbancdc
