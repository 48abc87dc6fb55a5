#include "urbancdc/simulator.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "text_util.hpp"

namespace urbancdc {

namespace {

constexpr std::uint64_t kWorkloadStream = 1;
constexpr std::uint64_t kPolicyStream = 2;
constexpr std::uint64_t kScenarioStream = 3;

double ratio(std::uint64_t part, std::uint64_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

NetworkLayout::NetworkLayout(std::shared_ptr<const HopMatrix> hops, RequestVector r,
                             std::vector<Community> communities)
    : hops_(std::move(hops)), r_(std::move(r)), communities_(std::move(communities)) {
  if (!hops_) throw ValidationError("layout needs a hop matrix");
  const std::size_t n = hops_->size();
  if (r_.size() != n) throw ValidationError("request vector does not match the hop matrix");
  if (communities_.empty()) throw ValidationError("layout needs at least one community");
  constexpr auto kUnassigned = ~std::uint32_t{0};
  community_of_.assign(n, kUnassigned);
  for (std::size_t c = 0; c < communities_.size(); ++c) {
    const auto& community = communities_[c];
    if (!community.cdc || !community.contains(*community.cdc)) {
      throw ValidationError("every community needs a CDC among its members");
    }
    for (auto id : community.members) {
      if (id >= n || community_of_[id] != kUnassigned) {
        throw ValidationError("communities must partition the nodes");
      }
      community_of_[id] = static_cast<std::uint32_t>(c);
    }
  }
  if (std::find(community_of_.begin(), community_of_.end(), kUnassigned) != community_of_.end()) {
    throw ValidationError("communities must cover every node");
  }
  for (const auto& community : communities_) {
    double share = 0.0;
    double weighted = 0.0;
    double plain = 0.0;
    const auto row = hops_->row(*community.cdc);
    for (auto id : community.members) {
      share += r_[id];
      weighted += r_[id] * row[id];
      plain += row[id];
    }
    const double mean =
        share > 0.0 ? weighted / share : plain / static_cast<double>(community.members.size());
    share_.push_back(share);
    intra_.push_back(std::max(1.0, mean));
  }
}

std::vector<std::vector<NeighborLink>> neighborhood(const NetworkLayout& layout, std::size_t size) {
  const std::size_t k = layout.cdc_count();
  if (size >= k && size > 0) {
    throw ValidationError("neighbourhood size " + std::to_string(size) + " needs more than " +
                          std::to_string(size) + " CDCs, have " + std::to_string(k));
  }
  std::vector<std::vector<NeighborLink>> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<NeighborLink> all;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) all.push_back({j, layout.hops()(layout.cdc(i), layout.cdc(j))});
    }
    std::sort(all.begin(), all.end(), [&](const NeighborLink& a, const NeighborLink& b) {
      if (a.hops != b.hops) return a.hops < b.hops;
      return layout.cdc(a.cdc_index) < layout.cdc(b.cdc_index);
    });
    all.resize(size);
    out[i] = std::move(all);
  }
  return out;
}

void EngineConfig::validate(std::size_t cdc_count) const {
  const auto fail = [](const std::string& what) { throw ValidationError(what); };
  if (catalog_size < 1) fail("catalog_size must be at least 1");
  if (capacity < 1) fail("capacity must be at least 1");
  if (window < 1) fail("window must be at least 1");
  if (epoch_len < 1) fail("epoch_len must be at least 1");
  if (mle_observations < 1) fail("mle_observations must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (beta.mode == BetaMode::Fixed && !(beta.fixed >= 0.0 && beta.fixed <= 1.0)) {
    fail("beta must lie in [0, 1]");
  }
  if (!(skew.min >= 0.0 && skew.min <= skew.max && skew.max <= 4.0)) {
    fail("s range must satisfy 0 <= s_min <= s_max <= 4");
  }
  if (origin.min_hops < 1 || origin.min_hops > origin.max_hops) {
    fail("origin range must satisfy 1 <= origin_min <= origin_max");
  }
  if (cdc_count < 1) fail("at least one CDC is required");
  if (neighborhood > 0 && neighborhood >= cdc_count) {
    fail("neighborhood must be smaller than the CDC count (" + std::to_string(cdc_count) + ")");
  }
}

double WindowMetrics::avg_latency() const {
  return requests == 0 ? 0.0 : static_cast<double>(latency_sum) / static_cast<double>(requests);
}
double WindowMetrics::hit_local() const { return ratio(local_hits, requests); }
double WindowMetrics::hit_neighbor() const { return ratio(neighbor_hits, requests); }
double WindowMetrics::origin_ratio() const { return ratio(origin_fetches, requests); }

void write_metrics(std::ostream& out, const MetricsSeries& metrics) {
  out << "window,requests,avg_latency_hops,hit_local,hit_neighbor,origin_ratio,exchanged_records\n";
  const auto row = [&out](const std::string& label, const WindowMetrics& w) {
    out << label << ',' << w.requests << ',' << text::format_fixed(w.avg_latency(), 6) << ','
        << text::format_fixed(w.hit_local(), 6) << ',' << text::format_fixed(w.hit_neighbor(), 6)
        << ',' << text::format_fixed(w.origin_ratio(), 6) << ',' << w.exchanged_records << '\n';
  };
  for (const auto& w : metrics.windows) row(std::to_string(w.window), w);
  if (metrics.total.requests > 0) row("TOTAL", metrics.total);
}

namespace {

std::vector<CommunityInterest> initial_interests(std::size_t communities, std::size_t catalog,
                                                 const SkewRange& skew, Rng& rng) {
  std::vector<CommunityInterest> out;
  out.reserve(communities);
  for (std::size_t c = 0; c < communities; ++c) out.push_back(random_interest(catalog, skew, rng));
  return out;
}

std::vector<std::uint32_t> to_vector(std::span<const std::uint32_t> s) {
  return {s.begin(), s.end()};
}

}  // namespace

Simulator::Simulator(std::shared_ptr<const NetworkLayout> layout, EngineConfig config)
    : layout_(std::move(layout)),
      config_((config.validate(layout_ ? layout_->cdc_count() : 0), config)),
      workload_rng_(derive_seed(config_.seed, kWorkloadStream)),
      policy_rng_(derive_seed(config_.seed, kPolicyStream)),
      workload_(layout_->requests(), to_vector(layout_->community_map()),
                initial_interests(layout_->cdc_count(), config_.catalog_size, config_.skew,
                                  workload_rng_),
                config_.catalog_size),
      neighbors_(neighborhood(*layout_, config_.neighborhood)) {
  Rng scenario_rng(derive_seed(config_.seed, kScenarioStream));
  const std::size_t m = config_.catalog_size;
  cdcs_.reserve(layout_->cdc_count());
  for (std::size_t c = 0; c < layout_->cdc_count(); ++c) {
    CdcState state(config_.alpha);
    if (is_baseline(config_.policy)) {
      state.replacement.emplace(config_.policy, config_.capacity);
    } else {
      state.ranked.emplace(config_.capacity);
    }
    state.snapshot_available.assign(m, 0);
    state.snapshot_popularity.assign(m, 0.0);
    state.neighbor_part.assign(m, 0.0);
    state.local_part.assign(m, 0.0);
    state.weighted_popularity.assign(m, 0.0);
    state.miss_penalty.assign(m, 0.0);
    const auto span = config_.origin.max_hops - config_.origin.min_hops;
    state.origin_hops = config_.origin.min_hops + static_cast<std::uint32_t>(scenario_rng.below(span + 1ULL));
    cdcs_.push_back(std::move(state));
  }
  for (std::size_t c = 0; c < cdcs_.size(); ++c) {
    auto& state = cdcs_[c];
    if (config_.policy == PolicyKind::AdaptiveScoreLfu) {
      state.beta = 0.5;  // sigmoid midpoint until the first estimate
    } else if (config_.beta.mode == BetaMode::Fixed) {
      state.beta = config_.beta.fixed;
    } else {
      state.beta = beta_from_s(workload_.interests()[c].s);
    }
  }
}

bool Simulator::holds(std::size_t cdc, ContentId f) const {
  const auto& state = cdcs_.at(cdc);
  return state.replacement ? state.replacement->contains(f) : state.ranked->contains(f);
}

std::vector<ContentId> Simulator::resident(std::size_t cdc) const {
  const auto& state = cdcs_.at(cdc);
  if (state.replacement) return state.replacement->resident();
  std::vector<ContentId> out(state.ranked->resident().begin(), state.ranked->resident().end());
  std::sort(out.begin(), out.end());
  return out;
}

void Simulator::preload(std::size_t cdc, ContentId f) {
  auto& state = cdcs_.at(cdc);
  if (state.replacement) {
    state.replacement->access(f, policy_rng_);
  } else {
    state.ranked->admit(f, 0.0, [](ContentId) { return 1.0; });
  }
}

bool Simulator::exchanges_snapshots() const {
  return !neighbors_.empty() && !neighbors_[0].empty() &&
         (is_cooperative(config_.policy) || config_.cooperative_lookup);
}

RequestOutcome Simulator::route_request(const Request& request) {
  const auto& lay = *layout_;
  if (request.origin >= lay.node_count() || request.content >= config_.catalog_size) {
    throw ValidationError("request references an unknown node or content");
  }
  const ContentId f = request.content;
  const std::size_t c = lay.community_of(request.origin);
  RequestOutcome out;
  out.request = request;
  out.cdc = c;
  out.access_hops = lay.hops()(request.origin, lay.cdc(c));

  if (holds(c, f)) {
    out.served_by = ServedBy::LocalCdc;
  } else {
    std::optional<NeighborLink> chosen;
    if (exchanges_snapshots()) {
      // Links are sorted by hops, so the first advertised holder is the closest.
      for (const auto& link : neighbors_[c]) {
        if (cdcs_[link.cdc_index].snapshot_available[f]) {
          chosen = link;
          break;
        }
      }
    }
    if (chosen) {
      out.neighbor = chosen->cdc_index;
      out.neighbor_hops = chosen->hops;
      if (holds(chosen->cdc_index, f)) {
        out.served_by = ServedBy::NeighborCdc;
      } else {
        out.served_by = ServedBy::Origin;
        out.origin_hops = cdcs_[chosen->cdc_index].origin_hops;
      }
    } else {
      out.served_by = ServedBy::Origin;
      out.origin_hops = cdcs_[c].origin_hops;
    }
  }
  out.latency = out.access_hops + out.neighbor_hops + out.origin_hops;

  apply_caching(c, f, out);
  if (observer_) observer_(out);
  return out;
}

void Simulator::apply_caching(std::size_t c, ContentId f, RequestOutcome& outcome) {
  auto& state = cdcs_[c];
  // A CDC's popularity window spans the requests it has itself encountered.
  state.tracker.record(f);
  if (state.tracker.window_requests() >= config_.window) state.tracker.close_window();

  const auto note = [&](bool admitted, std::optional<ContentId> evicted) {
    if (evicted) outcome.cache_events.push_back({CacheEvent::Kind::Evict, c, *evicted});
    if (admitted) outcome.cache_events.push_back({CacheEvent::Kind::Admit, c, f});
  };

  switch (config_.policy) {
    case PolicyKind::PopularityLfu: {
      const auto a = plfu_admit(*state.ranked, state.tracker, f);
      note(a.kind == AdmissionKind::Admitted || a.kind == AdmissionKind::AdmittedEvicting, a.evicted);
      break;
    }
    case PolicyKind::AdaptiveScoreLfu:
      state.observations.push_back(f);
      if (state.observations.size() >= config_.mle_observations) {
        state.s_hat = mle_estimate_s(state.observations, config_.catalog_size);
        state.beta = beta_from_s(*state.s_hat);
        state.observations.clear();
      }
      [[fallthrough]];
    case PolicyKind::ScoreLfu: {
      const auto value = [&](ContentId g) { return score_now(c, g); };
      const auto a = state.ranked->admit(f, value(f), value);
      note(a.kind == AdmissionKind::Admitted || a.kind == AdmissionKind::AdmittedEvicting, a.evicted);
      break;
    }
    default: {
      const auto a = state.replacement->access(f, policy_rng_);
      note(a.kind != AccessKind::Hit, a.evicted);
      break;
    }
  }
}

void Simulator::refresh_scores(std::size_t c) {
  auto& state = cdcs_[c];
  const auto& lay = *layout_;
  const std::size_t m = config_.catalog_size;
  const auto& links = neighbors_[c];
  // With no neighbours the score reduces to its local term.
  const double beta = links.empty() ? 0.0 : state.beta;
  const double share = lay.request_share(c);

  // S_neigh splits into sum_j l_ij * r_j p_j + sum_j r_j p_j (1 - a_j) l_{j,origin}.
  std::vector<double> neigh(m, 0.0);
  for (const auto& link : links) {
    const auto& other = cdcs_[link.cdc_index];
    const double hops = link.hops;
    const double* weighted = other.weighted_popularity.data();
    const double* miss = other.miss_penalty.data();
    for (std::size_t f = 0; f < m; ++f) neigh[f] += hops * weighted[f] + miss[f];
  }
  const double inv_links = links.empty() ? 0.0 : 1.0 / static_cast<double>(links.size());
  for (ContentId f = 0; f < m; ++f) {
    state.neighbor_part[f] = beta * neigh[f] * inv_links;
    state.local_part[f] = (1.0 - beta) * share * state.snapshot_popularity[f];
  }
}

double Simulator::score_now(std::size_t c, ContentId f) const {
  const auto& state = cdcs_[c];
  const double intra = layout_->intra_hops(c);
  const double local_hops = state.ranked->contains(f) ? intra : intra + state.origin_hops;
  return state.neighbor_part[f] + state.local_part[f] / local_hops;
}

std::vector<double> Simulator::scores(std::size_t cdc) const {
  if (!is_cooperative(config_.policy)) return {};
  (void)cdcs_.at(cdc);
  std::vector<double> out(config_.catalog_size);
  for (ContentId f = 0; f < out.size(); ++f) out[f] = score_now(cdc, f);
  return out;
}

std::uint64_t Simulator::close_window() {
  const bool scored = is_cooperative(config_.policy);
  if (!exchanges_snapshots() && !scored) return 0;

  const std::size_t m = config_.catalog_size;
  for (std::size_t c = 0; c < cdcs_.size(); ++c) {
    auto& state = cdcs_[c];
    std::fill(state.snapshot_available.begin(), state.snapshot_available.end(), 0);
    for (auto f : resident(c)) state.snapshot_available[f] = 1;
    std::fill(state.snapshot_popularity.begin(), state.snapshot_popularity.end(), 0.0);
    for (auto f : state.tracker.encountered_set()) {
      if (f < m) state.snapshot_popularity[f] = state.tracker.popularity(f);
    }
    const double share = layout_->request_share(c);
    const double origin = state.origin_hops;
    for (std::size_t f = 0; f < m; ++f) {
      state.weighted_popularity[f] = share * state.snapshot_popularity[f];
      state.miss_penalty[f] = state.snapshot_available[f] ? 0.0 : state.weighted_popularity[f] * origin;
    }
  }
  if (scored) {
    for (std::size_t c = 0; c < cdcs_.size(); ++c) {
      if (config_.policy == PolicyKind::ScoreLfu && config_.beta.mode == BetaMode::SkewFormula) {
        cdcs_[c].beta = beta_from_s(workload_.interests()[c].s);
      }
      refresh_scores(c);
    }
  }

  std::uint64_t exchanged = 0;
  if (exchanges_snapshots()) {
    for (const auto& links : neighbors_) {
      for (const auto& link : links) exchanged += cdcs_[link.cdc_index].tracker.encountered_set().size();
    }
  }
  return exchanged;
}

MetricsSeries Simulator::drive(std::uint64_t count, const std::function<Request()>& next) {
  MetricsSeries series;
  WindowMetrics current;
  current.window = 0;
  const auto tally = [](WindowMetrics& w, const RequestOutcome& o) {
    ++w.requests;
    w.latency_sum += o.latency;
    switch (o.served_by) {
      case ServedBy::LocalCdc: ++w.local_hits; break;
      case ServedBy::NeighborCdc: ++w.neighbor_hits; break;
      case ServedBy::Origin: ++w.origin_fetches; break;
    }
  };
  for (std::uint64_t n = 0; n < count; ++n) {
    const auto outcome = route_request(next());
    tally(current, outcome);
    tally(series.total, outcome);
    if ((n + 1) % config_.window == 0) {
      current.exchanged_records = close_window();
      series.total.exchanged_records += current.exchanged_records;
      series.windows.push_back(current);
      current = WindowMetrics{};
      current.window = series.windows.size();
    }
  }
  if (current.requests > 0) series.windows.push_back(current);
  return series;
}

MetricsSeries Simulator::run() {
  std::uint64_t issued = 0;
  return drive(config_.requests, [&] {
    if (issued > 0 && issued % config_.epoch_len == 0) {
      workload_.shuffle_epoch(workload_rng_, config_.skew);
    }
    ++issued;
    return workload_.sample(workload_rng_);
  });
}

MetricsSeries Simulator::replay(std::span<const Request> trace) {
  std::size_t position = 0;
  return drive(trace.size(), [&] { return trace[position++]; });
}

}  // namespace urbancdc
