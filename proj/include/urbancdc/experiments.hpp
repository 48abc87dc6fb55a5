#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "urbancdc/config.hpp"
#include "urbancdc/placement.hpp"
#include "urbancdc/simulator.hpp"

namespace urbancdc {

/// Nodes, backhaul tree, hop counts and request vector of one configured borough.
struct Scenario {
  NodeSet nodes;
  Topology topology;
  std::shared_ptr<const HopMatrix> hops;
  PopulationMap population;
  RequestVector r;
};

/// Loads or synthesises the nodes and densities named by the config.
Scenario build_scenario(const SimConfig& config);

struct PlacementRun {
  PlacementResult placement;
  std::vector<CurvePoint> curve;
  std::size_t k = 0;  // chosen CDC count
};

/// Runs the hierarchical split far enough for the configured k and the
/// curve, then resolves `k = elbow`. Throws ValidationError when k > N.
PlacementRun place(const Scenario& scenario, const SimConfig& config);

std::shared_ptr<const NetworkLayout> make_layout(const Scenario& scenario,
                                                 const PlacementResult& placement, std::size_t k);

/// One simulation, replaying the configured trace when there is one.
MetricsSeries simulate(std::shared_ptr<const NetworkLayout> layout, const SimConfig& config);

enum class SweepAxis { CdcCount, Capacity, Neighborhood, Skew, Policy };

/// Names: cdc_count capacity neighborhood s policy
SweepAxis parse_sweep_axis(std::string_view name);

struct SweepRow {
  std::string axis_value;
  std::string policy;
  double avg_latency = 0.0;
  double hit_ratio = 0.0;
};

/// One run per (value, policy) pair, `workers` at a time, rows in value
/// then policy order. For the policy axis the values are the policies.
std::vector<SweepRow> run_sweep(const Scenario& scenario, const SimConfig& base, SweepAxis axis,
                                const std::vector<std::string>& values,
                                const std::vector<PolicyKind>& policies);

/// `axis_value,policy,avg_latency,hit_ratio`
void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows);

/// Average latency per window against requests served, as an SVG line chart.
void write_latency_svg(std::ostream& out, const MetricsSeries& metrics, std::size_t window,
                       const std::string& title);

}  // namespace urbancdc
