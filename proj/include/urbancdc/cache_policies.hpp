#pragma once

#include <cstdint>
#include <list>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "urbancdc/common.hpp"
#include "urbancdc/random.hpp"

namespace urbancdc {

enum class PolicyKind {
  Fifo,
  RandomReplacement,
  Mru,
  Lru,
  Lfu,
  PopularityLfu,     // pLFU
  ScoreLfu,          // sLFU
  AdaptiveScoreLfu,  // sLFU with beta tuned from an estimated skew
};

/// Config names: fifo rr mru lru lfu plfu slfu shat_lfu
std::string_view policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);
bool is_baseline(PolicyKind kind);
bool is_cooperative(PolicyKind kind);

enum class AccessKind { Hit, MissEvicted, MissInserted };

struct AccessResult {
  AccessKind kind = AccessKind::Hit;
  std::optional<ContentId> evicted;
};

/// Textbook replacement caches: FIFO, random, MRU, LRU and in-cache LFU.
/// Every miss admits the requested content.
class ReplacementCache {
 public:
  ReplacementCache(PolicyKind kind, std::size_t capacity);

  /// `rng` is only consumed by random replacement.
  AccessResult access(ContentId f, Rng& rng);

  bool contains(ContentId f) const { return entries_.contains(f); }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  PolicyKind kind() const noexcept { return kind_; }
  std::vector<ContentId> resident() const;  // ascending

 private:
  struct Entry {
    std::list<ContentId>::iterator position;
    std::uint64_t frequency = 0;
    std::uint64_t last_use = 0;
    std::size_t slot = 0;
  };

  ContentId choose_victim(Rng& rng) const;
  void erase(ContentId f);
  void insert(ContentId f);
  void touch(ContentId f);

  PolicyKind kind_;
  std::size_t capacity_;
  std::uint64_t clock_ = 0;
  std::unordered_map<ContentId, Entry> entries_;
  std::list<ContentId> order_;  // front = most recently used (LRU/MRU) or newest (FIFO)
  std::vector<ContentId> slots_;  // random replacement
  std::set<std::tuple<std::uint64_t, std::uint64_t, ContentId>> by_frequency_;  // LFU
};

/// Windowed request counts with an exponentially smoothed average per content.
class PopularityTracker {
 public:
  explicit PopularityTracker(double alpha);

  void record(ContentId f);
  /// smoothed <- alpha * smoothed + (1 - alpha) * window count, then clears the window.
  void close_window();

  double alpha() const noexcept { return alpha_; }
  std::uint64_t window_count(ContentId f) const { return f < counts_.size() ? counts_[f] : 0; }
  double smoothed(ContentId f) const { return f < smoothed_.size() ? smoothed_[f] : 0.0; }
  std::size_t window_index() const noexcept { return window_index_; }
  std::uint64_t window_requests() const noexcept { return window_requests_; }
  bool encountered(ContentId f) const { return f < seen_.size() && seen_[f]; }
  std::span<const ContentId> encountered_set() const noexcept { return encountered_; }

  /// Share of the smoothed counts; uniform over the encountered set when all are zero.
  double popularity(ContentId f) const;
  std::vector<std::pair<ContentId, double>> popularity_index() const;

  /// Overrides a smoothed value, e.g. when restoring state.
  void set_smoothed(ContentId f, double value);

 private:
  void ensure(ContentId f);

  double alpha_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> smoothed_;
  std::vector<char> seen_;
  std::vector<ContentId> encountered_;
  double smoothed_total_ = 0.0;
  std::size_t window_index_ = 0;
  std::uint64_t window_requests_ = 0;
};

enum class AdmissionKind { Resident, Admitted, AdmittedEvicting, Rejected };

struct Admission {
  AdmissionKind kind = AdmissionKind::Rejected;
  std::optional<ContentId> evicted;
};

/// A resident set whose admissions are decided by an external ranking value.
class RankedCache {
 public:
  explicit RankedCache(std::size_t capacity);

  bool contains(ContentId f) const { return f < member_.size() && member_[f]; }
  std::size_t size() const noexcept { return resident_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool full() const noexcept { return resident_.size() >= capacity_; }
  std::span<const ContentId> resident() const noexcept { return resident_; }

  /// Admits when there is room. When full, admits iff `value_f` beats the
  /// lowest resident value, evicting that resident (ties: larger id leaves).
  template <class ValueOf>
  Admission admit(ContentId f, double value_f, ValueOf&& value_of) {
    if (contains(f)) return {AdmissionKind::Resident, std::nullopt};
    if (!full()) {
      insert(f);
      return {AdmissionKind::Admitted, std::nullopt};
    }
    std::size_t victim = 0;
    double victim_value = value_of(resident_[0]);
    for (std::size_t i = 1; i < resident_.size(); ++i) {
      const double v = value_of(resident_[i]);
      if (v < victim_value || (v == victim_value && resident_[i] > resident_[victim])) {
        victim = i;
        victim_value = v;
      }
    }
    if (!(value_f > victim_value)) return {AdmissionKind::Rejected, std::nullopt};
    const ContentId evicted = resident_[victim];
    erase_at(victim);
    insert(f);
    return {AdmissionKind::AdmittedEvicting, evicted};
  }

 private:
  void insert(ContentId f);
  void erase_at(std::size_t index);

  std::size_t capacity_;
  std::vector<ContentId> resident_;
  std::vector<char> member_;
};

/// pLFU: rank by popularity index.
Admission plfu_admit(RankedCache& cache, const PopularityTracker& tracker, ContentId f);

/// sLFU: rank by score. `scores` is indexed by content id.
Admission slfu_admit_evict(RankedCache& cache, std::span<const double> scores, ContentId f);

/// beta = 1 - 1 / (1 + exp(-20 (s - 0.5)))
double beta_from_s(double s_hat);

/// Delay from CDC i to neighbour j for one content: l_ij when j holds it,
/// otherwise l_ij plus j's origin penalty. Throws std::invalid_argument when i == j.
double inter_cdc_delay(std::size_t i, std::size_t j, bool available_at_j, double hops_ij,
                       double origin_hops_j);

struct NeighborScoreTerm {
  double request_share = 0.0;  // r_j
  double popularity = 0.0;     // p_{f,j}
  double hops = 0.0;           // l_ij
  double origin_hops = 0.0;    // l_{j,origin}
  bool available = false;      // a_{f,j}
};

struct ScoreInputs {
  std::vector<NeighborScoreTerm> neighbors;
  double request_share = 0.0;      // r_i
  double popularity = 0.0;         // p_{f,i}
  double intra_hops = 1.0;         // l_i
  double origin_hops = 0.0;        // l_{i,origin}
  bool available_locally = false;  // a_{f,i}
  double beta = 0.0;
};

/// beta * S_neigh + (1 - beta) * S_local, with
/// S_neigh = sum_j r_j p_{f,j} l_ij(f) / |N_i| and S_local = r_i p_{f,i} / l_i.
/// l_i gains the local origin penalty when f is not held locally. With no
/// neighbours only the local term is used.
double score(const ScoreInputs& inputs);

}  // namespace urbancdc
