// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/helpers.hpp"
#include "urbancdc/experiments.hpp"
#include "urbancdc/placement.hpp"
#include "urbancdc/workload.hpp"

using namespace urbancdc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* pattern, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, pattern, args...);
  return buffer;
}

int failures = 0;

std::vector<ContentId> sorted(std::span<const ContentId> items) {
  std::vector<ContentId> out(items.begin(), items.end());
  std::sort(out.begin(), out.end());
  return out;
}

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = outcome.pass && elapsed < limit_s;
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              outcome.detail.c_str(), elapsed, limit_s);
  std::fflush(stdout);
}

// The desk-scale borough shared by the trend criteria.
SimConfig borough_config() {
  SimConfig c;
  c.synthetic = {200, 1, 4};
  c.k = {false, 10};
  c.curve_k_max = 40;
  c.engine.catalog_size = 600;
  c.engine.capacity = 20;
  c.engine.requests = 100000;
  c.engine.neighborhood = 9;
  c.engine.seed = 1;
  return c;
}

const Scenario& borough() {
  static const Scenario s = build_scenario(borough_config());
  return s;
}

std::map<std::string, SweepRow> by_policy(const std::vector<SweepRow>& rows) {
  std::map<std::string, SweepRow> out;
  for (const auto& row : rows) out[row.policy] = row;
  return out;
}

Outcome emst_oracle() {
  int mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const std::size_t n = 2 + seed % 49;
    const auto nodes = synth_nodes(n, BoundingBox{}, seed);
    const auto edges = build_emst(nodes, DistanceMetric::Haversine);
    double total = 0.0;
    for (const auto& e : edges.edges()) total += e.weight_m;
    // Same edge set, so the sums agree up to summation order.
    if (std::abs(total - testing::kruskal_weight(nodes, DistanceMetric::Haversine)) > 1e-9 * total) ++mismatches;
  }
  return {mismatches == 0, format("%d of 50 instances differ from Kruskal", mismatches)};
}

Outcome placement_monotonicity() {
  const auto& s = borough();
  const auto placement = hierarchical_placement(s.topology, *s.hops, s.r, 40);
  int rises = 0;
  for (std::size_t k = 2; k <= 40; ++k) {
    if (placement.level(k).avg_weighted_hops > placement.level(k - 1).avg_weighted_hops) ++rises;
  }
  const auto median = testing::one_median(s.topology, s.r);
  const auto chosen = placement.level(1).cdcs.front();
  // Ties between equally good medians are allowed; compare objective values.
  auto objective = [&](NodeId v) {
    double sum = 0.0;
    for (NodeId j = 0; j < s.nodes.size(); ++j) sum += s.r[j] * (*s.hops)(v, j);
    return sum;
  };
  const bool same = std::abs(objective(chosen) - objective(median)) <= 1e-12;
  return {rises == 0 && same, format("%d increases over k=1..40, k=1 CDC %u vs brute-force 1-median %u", rises,
                                     chosen, median)};
}

Outcome elbow_sanity() {
  // Planted knee at k = 7: steep linear drop, then nearly flat.
  std::vector<CurvePoint> planted;
  for (std::size_t k = 1; k <= 30; ++k) {
    const double v = k <= 7 ? 100.0 - 14.0 * (k - 1) : 16.0 - 0.2 * (k - 7);
    planted.push_back({static_cast<double>(k), v});
  }
  const auto knee = elbow_estimate(planted);

  const auto& s = borough();
  const auto placement = hierarchical_placement(s.topology, *s.hops, s.r, 40);
  const auto curve = placement_curve(placement);
  // Convex-decreasing in the large: slope magnitude over the first quarter
  // beats the last quarter, and the curve lies below its end-point chord.
  const double first = (curve[0].value - curve[9].value) / 9.0;
  const double last = (curve[30].value - curve[39].value) / 9.0;
  int above_chord = 0;
  for (const auto& p : curve) {
    const double t = static_cast<double>(p.k - 1.0) / 39.0;
    const double chord = (1.0 - t) * curve.front().value + t * curve.back().value;
    if (p.value > chord + 1e-12) ++above_chord;
  }
  const bool pass = knee == 7 && first > last && above_chord == 0;
  return {pass, format("planted knee 7 -> %zu; slope %.3f then %.3f hops per CDC; %d points above chord", knee,
                       first, last, above_chord)};
}

Outcome zipf_mle() {
  double worst_norm = 0.0;
  for (double s : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const auto pmf = zipf_pmf(s, 600);
    double sum = 0.0;
    for (double p : pmf) sum += p;
    worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
  }
  std::string detail = format("pmf sum error %.1e;", worst_norm);
  bool pass = worst_norm <= 1e-12;
  for (double s : {0.5, 1.0, 1.5}) {
    std::vector<double> estimates;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      std::vector<std::uint32_t> ranks(600);
      std::iota(ranks.begin(), ranks.end(), 0U);
      WorkloadModel model(RequestVector({1.0}), {0}, {CommunityInterest{s, ranks}}, 600);
      Rng rng(seed);
      std::vector<ContentId> samples(1000);
      for (auto& f : samples) f = model.sample(rng).content;
      estimates.push_back(mle_estimate_s(samples, 600));
    }
    std::nth_element(estimates.begin(), estimates.begin() + 10, estimates.end());
    const double upper = estimates[10];
    const double lower = *std::max_element(estimates.begin(), estimates.begin() + 10);
    const double median = 0.5 * (lower + upper);
    pass &= std::abs(median - s) <= 0.15;
    detail += format(" s=%.1f median %.3f;", s, median);
  }
  return {pass, detail};
}

Outcome policy_oracles() {
  int mismatches = 0;
  for (auto kind : {PolicyKind::Lru, PolicyKind::Lfu, PolicyKind::Fifo}) {
    for (std::size_t capacity : {1U, 2U, 20U}) {
      ReplacementCache cache(kind, capacity);
      testing::ReferenceCache reference(kind, capacity);
      Rng rng(capacity * 13 + static_cast<std::size_t>(kind)), policy_rng(0);
      for (int i = 0; i < 10000; ++i) {
        const auto f = static_cast<ContentId>(rng.uniform() < 0.5 ? rng.below(capacity + 2) : rng.below(60));
        const bool hit = cache.access(f, policy_rng).kind == AccessKind::Hit;
        if (hit != reference.access(f) || cache.resident() != reference.resident()) {
          ++mismatches;
          break;
        }
      }
    }
  }

  // pLFU at alpha = 0 ranks by the last window's counts: replay every decision
  // against counts kept here. sLFU at beta = 0 with uniform availability keeps
  // the same set.
  const std::size_t m = 100, capacity = 10, window = 200;
  PopularityTracker tracker(0.0);
  RankedCache plfu(capacity), slfu(capacity);
  Rng rng(4);
  std::vector<std::uint32_t> ranks(m);
  std::iota(ranks.begin(), ranks.end(), 0U);
  WorkloadModel model(RequestVector({1.0}), {0}, {CommunityInterest{0.9, ranks}}, m);
  std::vector<std::uint64_t> current(m, 0), last(m, 0);
  std::vector<ContentId> expected;
  std::vector<double> scores(m, 0.0);
  int plfu_decision_errors = 0, set_differences = 0;
  for (int i = 1; i <= 40000; ++i) {
    const auto f = model.sample(rng).content;
    ++current[f];
    tracker.record(f);
    plfu_admit(plfu, tracker, f);
    slfu_admit_evict(slfu, scores, f);

    if (std::find(expected.begin(), expected.end(), f) == expected.end()) {
      if (expected.size() < capacity) {
        expected.push_back(f);
      } else {
        auto victim = expected.begin();
        for (auto it = expected.begin(); it != expected.end(); ++it) {
          if (last[*it] < last[*victim] || (last[*it] == last[*victim] && *it > *victim)) victim = it;
        }
        if (last[f] > last[*victim]) *victim = f;
      }
    }
    if (sorted(plfu.resident()) != sorted(expected)) {
      ++plfu_decision_errors;
      expected.assign(plfu.resident().begin(), plfu.resident().end());
    }

    if (i % window == 0) {
      tracker.close_window();
      last = current;
      std::fill(current.begin(), current.end(), 0);
      ScoreInputs in;
      in.beta = 0.0;
      in.request_share = 1.0;
      in.intra_hops = 1.0;
      in.origin_hops = 300.0;
      for (ContentId g = 0; g < m; ++g) {
        in.popularity = tracker.popularity(g);
        scores[g] = score(in);
      }
      if (sorted(plfu.resident()) != sorted(slfu.resident())) ++set_differences;
    }
  }
  const bool pass = mismatches == 0 && plfu_decision_errors == 0 && set_differences == 0;
  return {pass, format("%d reference mismatches; %d pLFU decisions off the last-window ranking; "
                       "%d windows where sLFU(beta=0) != pLFU",
                       mismatches, plfu_decision_errors, set_differences)};
}

Outcome beta_formula() {
  const double mid = beta_from_s(0.5);
  int non_decreasing = 0;
  for (int i = 1; i <= 8; ++i) {
    if (!(beta_from_s(0.25 * i) < beta_from_s(0.25 * (i - 1)))) ++non_decreasing;
  }
  return {std::abs(mid - 0.5) <= 1e-12 && non_decreasing == 0,
          format("beta(0.5) = %.15f; %d non-decreasing steps on [0, 2]", mid, non_decreasing)};
}

Outcome multi_cdc_benefit() {
  auto c = borough_config();
  c.engine.policy = PolicyKind::Lru;
  c.engine.neighborhood = 0;
  // Unit origin cost isolates the access-path saving of placement.
  c.engine.origin = {1, 1};
  const auto rows = run_sweep(borough(), c, SweepAxis::CdcCount, {"1", "10"}, {PolicyKind::Lru});
  const double gain = 1.0 - rows[1].avg_latency / rows[0].avg_latency;
  return {gain >= 0.5, format("LRU latency k=1 %.3f, k=10 %.3f hops: %.1f%% lower (need >= 50%%)",
                              rows[0].avg_latency, rows[1].avg_latency, 100.0 * gain)};
}

Outcome cooperative_low_skew() {
  auto c = borough_config();
  c.engine.skew = {0.0, 0.0};
  const auto rows = by_policy(run_sweep(borough(), c, SweepAxis::Policy, {"lru", "lfu", "plfu", "slfu"}, {}));
  const double s = rows.at("slfu").avg_latency;
  const double vs_lru = 1.0 - s / rows.at("lru").avg_latency;
  const double vs_lfu = 1.0 - s / rows.at("lfu").avg_latency;
  const double vs_plfu = 1.0 - s / rows.at("plfu").avg_latency;
  return {vs_lru >= 0.20 && vs_lfu >= 0.15 && vs_plfu >= 0.15,
          format("sLFU %.2f hops; below LRU %.1f%% (>= 20), LFU %.1f%% (>= 15), pLFU %.1f%% (>= 15)", s,
                 100.0 * vs_lru, 100.0 * vs_lfu, 100.0 * vs_plfu)};
}

Outcome high_skew() {
  auto c = borough_config();
  c.engine.skew = {2.0, 2.0};
  const auto rows = by_policy(run_sweep(borough(), c, SweepAxis::Policy, {"lfu", "plfu", "slfu"}, {}));
  const double s = rows.at("slfu").avg_latency;
  const double best = std::min(rows.at("lfu").avg_latency, rows.at("plfu").avg_latency);
  return {s <= 1.05 * best, format("sLFU %.3f, LFU %.3f, pLFU %.3f hops (need sLFU <= 1.05 x best)", s,
                                   rows.at("lfu").avg_latency, rows.at("plfu").avg_latency)};
}

Outcome hit_ratio_dominance() {
  const std::vector<std::string> grid{"0", "0.5", "1", "1.5", "2"};
  const auto rows = run_sweep(borough(), borough_config(), SweepAxis::Skew, grid,
                              {PolicyKind::Lfu, PolicyKind::ScoreLfu});
  bool dominates = true;
  std::string detail;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lfu = rows[2 * i].hit_ratio, slfu = rows[2 * i + 1].hit_ratio;
    dominates &= slfu >= lfu;
    detail += format(" s=%s %.3f/%.3f;", grid[i].c_str(), slfu, lfu);
  }
  const double top = rows.back().hit_ratio;
  return {dominates && top >= 0.6, "sLFU/LFU hit ratio" + detail + " need >= 0.6 at s=2"};
}

Outcome neighborhood_trend() {
  const std::vector<std::string> sizes{"0", "2", "4", "8", "9"};
  const auto rows = run_sweep(borough(), borough_config(), SweepAxis::Neighborhood, sizes, {PolicyKind::ScoreLfu});
  int rises = 0;
  std::string detail = "sLFU latency";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].avg_latency > rows[i - 1].avg_latency) ++rises;
    detail += format(" n=%s %.2f;", sizes[i].c_str(), rows[i].avg_latency);
  }
  return {rises == 0, detail + format(" %d increases", rises)};
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "urbancdc_acceptance";
  std::filesystem::create_directories(dir);
  auto c = borough_config();
  c.engine.requests = 30000;
  const auto placed = place(borough(), c);
  const auto layout = make_layout(borough(), placed.placement, placed.k);
  int differ = 0;
  for (auto policy : {PolicyKind::RandomReplacement, PolicyKind::ScoreLfu, PolicyKind::AdaptiveScoreLfu}) {
    c.engine.policy = policy;
    std::string text[2];
    for (int run = 0; run < 2; ++run) {
      const auto path = dir / format("metrics_%d.csv", run);
      {
        std::ofstream out(path, std::ios::binary);
        write_metrics(out, simulate(layout, c));
      }
      std::ifstream in(path, std::ios::binary);
      text[run].assign(std::istreambuf_iterator<char>(in), {});
    }
    if (text[0] != text[1] || text[0].empty()) ++differ;
  }
  std::filesystem::remove_all(dir);
  return {differ == 0, format("%d of 3 policies gave differing metrics files", differ)};
}

}  // namespace

int main() {
  criterion(1, "EMST oracle equivalence", 5, emst_oracle);
  criterion(2, "placement monotonicity", 10, placement_monotonicity);
  criterion(3, "elbow sanity", 5, elbow_sanity);
  criterion(4, "Zipf and MLE", 30, zipf_mle);
  criterion(5, "policy oracles", 10, policy_oracles);
  criterion(6, "beta formula", 1, beta_formula);
  criterion(7, "multi-CDC benefit", 120, multi_cdc_benefit);
  criterion(8, "cooperative benefit at low skew", 300, cooperative_low_skew);
  criterion(9, "high-skew convergence", 300, high_skew);
  criterion(10, "hit-ratio dominance", 600, hit_ratio_dominance);
  criterion(11, "neighbourhood-size trend", 300, neighborhood_trend);
  criterion(12, "determinism", 60, determinism);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
