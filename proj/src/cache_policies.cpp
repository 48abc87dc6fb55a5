#include "urbancdc/cache_policies.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace urbancdc {

namespace {

constexpr std::array<std::pair<PolicyKind, std::string_view>, 8> kPolicyNames{{
    {PolicyKind::Fifo, "fifo"},
    {PolicyKind::RandomReplacement, "rr"},
    {PolicyKind::Mru, "mru"},
    {PolicyKind::Lru, "lru"},
    {PolicyKind::Lfu, "lfu"},
    {PolicyKind::PopularityLfu, "plfu"},
    {PolicyKind::ScoreLfu, "slfu"},
    {PolicyKind::AdaptiveScoreLfu, "shat_lfu"},
}};

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  for (const auto& [k, name] : kPolicyNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (const auto& [k, n] : kPolicyNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

bool is_baseline(PolicyKind kind) {
  return kind != PolicyKind::PopularityLfu && kind != PolicyKind::ScoreLfu &&
         kind != PolicyKind::AdaptiveScoreLfu;
}

bool is_cooperative(PolicyKind kind) {
  return kind == PolicyKind::ScoreLfu || kind == PolicyKind::AdaptiveScoreLfu;
}

// ---------------------------------------------------------------------------

ReplacementCache::ReplacementCache(PolicyKind kind, std::size_t capacity)
    : kind_(kind), capacity_(capacity) {
  if (!is_baseline(kind)) throw std::invalid_argument("not a replacement policy");
  if (capacity_ == 0) throw ValidationError("cache capacity must be at least 1");
}

AccessResult ReplacementCache::access(ContentId f, Rng& rng) {
  ++clock_;
  if (contains(f)) {
    touch(f);
    return {AccessKind::Hit, std::nullopt};
  }
  AccessResult result{AccessKind::MissInserted, std::nullopt};
  if (entries_.size() >= capacity_) {
    const auto victim = choose_victim(rng);
    erase(victim);
    result = {AccessKind::MissEvicted, victim};
  }
  insert(f);
  return result;
}

std::vector<ContentId> ReplacementCache::resident() const {
  std::vector<ContentId> out;
  out.reserve(entries_.size());
  for (const auto& [f, entry] : entries_) out.push_back(f);
  std::sort(out.begin(), out.end());
  return out;
}

ContentId ReplacementCache::choose_victim(Rng& rng) const {
  switch (kind_) {
    case PolicyKind::Fifo:
    case PolicyKind::Lru:
      return order_.back();
    case PolicyKind::Mru:
      return order_.front();
    case PolicyKind::Lfu:
      return std::get<2>(*by_frequency_.begin());
    case PolicyKind::RandomReplacement:
      return slots_[rng.below(slots_.size())];
    default:
      throw std::logic_error("unreachable policy");
  }
}

void ReplacementCache::erase(ContentId f) {
  const auto it = entries_.find(f);
  const Entry& e = it->second;
  order_.erase(e.position);
  if (kind_ == PolicyKind::Lfu) by_frequency_.erase({e.frequency, e.last_use, f});
  if (kind_ == PolicyKind::RandomReplacement) {
    const ContentId moved = slots_.back();
    slots_[e.slot] = moved;
    entries_[moved].slot = e.slot;
    slots_.pop_back();
  }
  entries_.erase(it);
}

void ReplacementCache::insert(ContentId f) {
  order_.push_front(f);
  Entry e{order_.begin(), 1, clock_, slots_.size()};
  if (kind_ == PolicyKind::Lfu) by_frequency_.insert({e.frequency, e.last_use, f});
  if (kind_ == PolicyKind::RandomReplacement) slots_.push_back(f);
  entries_.emplace(f, e);
}

void ReplacementCache::touch(ContentId f) {
  Entry& e = entries_.at(f);
  if (kind_ == PolicyKind::Lru || kind_ == PolicyKind::Mru) {
    order_.splice(order_.begin(), order_, e.position);
  }
  if (kind_ == PolicyKind::Lfu) {
    by_frequency_.erase({e.frequency, e.last_use, f});
    ++e.frequency;
    e.last_use = clock_;
    by_frequency_.insert({e.frequency, e.last_use, f});
  }
}

// ---------------------------------------------------------------------------

PopularityTracker::PopularityTracker(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
}

void PopularityTracker::ensure(ContentId f) {
  if (f >= counts_.size()) {
    const std::size_t n = std::size_t{f} + 1;
    counts_.resize(n, 0);
    smoothed_.resize(n, 0.0);
    seen_.resize(n, 0);
  }
  if (!seen_[f]) {
    seen_[f] = 1;
    encountered_.push_back(f);
  }
}

void PopularityTracker::record(ContentId f) {
  ensure(f);
  ++counts_[f];
  ++window_requests_;
}

void PopularityTracker::close_window() {
  double total = 0.0;
  for (auto f : encountered_) {
    smoothed_[f] = alpha_ * smoothed_[f] + (1.0 - alpha_) * static_cast<double>(counts_[f]);
    counts_[f] = 0;
    total += smoothed_[f];
  }
  smoothed_total_ = total;
  ++window_index_;
  window_requests_ = 0;
}

double PopularityTracker::popularity(ContentId f) const {
  if (!encountered(f)) return 0.0;
  if (smoothed_total_ > 0.0) return smoothed_[f] / smoothed_total_;
  return 1.0 / static_cast<double>(encountered_.size());
}

std::vector<std::pair<ContentId, double>> PopularityTracker::popularity_index() const {
  std::vector<std::pair<ContentId, double>> out;
  out.reserve(encountered_.size());
  for (auto f : encountered_) out.emplace_back(f, popularity(f));
  std::sort(out.begin(), out.end());
  return out;
}

void PopularityTracker::set_smoothed(ContentId f, double value) {
  if (!(value >= 0.0)) throw ValidationError("smoothed count must be >= 0");
  ensure(f);
  smoothed_total_ += value - smoothed_[f];
  smoothed_[f] = value;
}

// ---------------------------------------------------------------------------

RankedCache::RankedCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ValidationError("cache capacity must be at least 1");
  resident_.reserve(capacity_);
}

void RankedCache::insert(ContentId f) {
  if (f >= member_.size()) member_.resize(std::size_t{f} + 1, 0);
  member_[f] = 1;
  resident_.push_back(f);
}

void RankedCache::erase_at(std::size_t index) {
  member_[resident_[index]] = 0;
  resident_[index] = resident_.back();
  resident_.pop_back();
}

Admission plfu_admit(RankedCache& cache, const PopularityTracker& tracker, ContentId f) {
  return cache.admit(f, tracker.popularity(f),
                     [&](ContentId g) { return tracker.popularity(g); });
}

Admission slfu_admit_evict(RankedCache& cache, std::span<const double> scores, ContentId f) {
  const auto value = [&](ContentId g) { return g < scores.size() ? scores[g] : 0.0; };
  return cache.admit(f, value(f), value);
}

// ---------------------------------------------------------------------------

double beta_from_s(double s_hat) {
  return 1.0 - 1.0 / (1.0 + std::exp(-20.0 * (s_hat - 0.5)));
}

double inter_cdc_delay(std::size_t i, std::size_t j, bool available_at_j, double hops_ij,
                       double origin_hops_j) {
  if (i == j) throw std::invalid_argument("inter-CDC delay needs two distinct CDCs");
  return available_at_j ? hops_ij : hops_ij + origin_hops_j;
}

double score(const ScoreInputs& in) {
  const double intra = in.available_locally ? in.intra_hops : in.intra_hops + in.origin_hops;
  const double local = in.request_share * in.popularity / intra;
  if (in.neighbors.empty()) return local;
  double neigh = 0.0;
  for (std::size_t j = 0; j < in.neighbors.size(); ++j) {
    const auto& t = in.neighbors[j];
    neigh += t.request_share * t.popularity *
             (t.available ? t.hops : t.hops + t.origin_hops);
  }
  neigh /= static_cast<double>(in.neighbors.size());
  return in.beta * neigh + (1.0 - in.beta) * local;
}

}  // namespace urbancdc
