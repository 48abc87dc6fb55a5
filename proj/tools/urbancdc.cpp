// urbancdc: topology, placement, simulation and sweep runs from the shell.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "urbancdc/experiments.hpp"

namespace fs = std::filesystem;
using namespace urbancdc;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct Overrides {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> flags;
  std::vector<std::string> sets;
};

void add_flag(CLI::App& app, Overrides& o, const std::string& flag, const std::string& key,
              const std::string& help) {
  app.add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.flags.emplace_back(key, v); }, help);
}

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_path, "key = value scenario file");
  add_flag(app, o, "--nodes", "nodes", "node file (id,lat,lon[,density])");
  add_flag(app, o, "--synthetic", "synthetic", "n=<N>,seed=<S>,hotspots=<H>");
  add_flag(app, o, "--density", "density", "density file (id,density)");
  add_flag(app, o, "--distance", "distance", "haversine or planar");
  add_flag(app, o, "--seed", "seed", "master seed");
  add_flag(app, o, "--out", "out", "output directory");
  app.add_option("--set", o.sets, "extra key=value overrides")->take_all();
}

void add_placement(CLI::App& app, Overrides& o) {
  add_flag(app, o, "--k", "k", "CDC count or 'elbow'");
  add_flag(app, o, "--curve-k-max", "curve_k_max", "largest k on the placement curve");
}

void add_engine(CLI::App& app, Overrides& o) {
  add_flag(app, o, "--policy", "policy", "lru lfu fifo rr mru plfu slfu shat_lfu");
  add_flag(app, o, "--neighborhood", "neighborhood", "neighbour CDCs per CDC");
  add_flag(app, o, "--requests", "requests", "request count");
  add_flag(app, o, "--capacity", "capacity", "cache slots per CDC");
  add_flag(app, o, "--catalog", "catalog_size", "number of contents");
  add_flag(app, o, "--window", "window", "requests per popularity window");
  add_flag(app, o, "--beta", "beta", "'auto' or a fixed value in [0, 1]");
  add_flag(app, o, "--trace", "trace", "replay this request trace");
  add_flag(app, o, "--workers", "workers", "parallel runs (0: all cores)");
}

SimConfig resolve(const Overrides& o) {
  SimConfig config = o.config_path.empty() ? SimConfig{} : load_config(o.config_path);
  for (const auto& [key, value] : o.flags) set_option(config, key, value);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
    set_option(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  config.validate();
  return config;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw InputError("cannot write " + (dir / name).string());
  return out;
}

void cmd_topology(const SimConfig& config) {
  const auto scenario = build_scenario(config);
  {
    auto out = open_output(config.out, "edges.csv");
    write_edges(out, scenario.topology, scenario.nodes);
  }
  const auto edges = scenario.topology.edges().size();
  const double total = scenario.topology.total_weight();
  std::ostringstream summary;
  summary << "nodes," << scenario.nodes.size() << '\n'
          << "edges," << edges << '\n'
          << "total_length_m," << std::fixed << std::setprecision(3) << total << '\n'
          << "avg_edge_length_m," << (edges ? total / static_cast<double>(edges) : 0.0) << '\n';
  open_output(config.out, "topology_summary.csv") << summary.str();
  std::cout << summary.str();
}

void cmd_place(const SimConfig& config) {
  const auto scenario = build_scenario(config);
  const auto run = place(scenario, config);
  {
    auto out = open_output(config.out, "placement.csv");
    write_placement(out, run.placement, run.k, scenario.nodes);
  }
  {
    auto out = open_output(config.out, "curve.csv");
    write_curve(out, run.curve);
  }
  std::cout << "k," << run.k << '\n'
            << "avg_weighted_hops," << run.placement.level(run.k).avg_weighted_hops << '\n';
}

void cmd_simulate(const SimConfig& config) {
  const auto scenario = build_scenario(config);
  const auto run = place(scenario, config);
  config.engine.validate(run.k);
  const auto metrics = simulate(make_layout(scenario, run.placement, run.k), config);
  {
    auto out = open_output(config.out, "metrics.csv");
    write_metrics(out, metrics);
  }
  {
    auto out = open_output(config.out, "config.txt");
    write_config(out, config);
  }
  if (config.svg) {
    auto out = open_output(config.out, "latency.svg");
    write_latency_svg(out, metrics, config.engine.window,
                      std::string(policy_name(config.engine.policy)) + ", k = " + std::to_string(run.k));
  }
  const auto& t = metrics.total;
  std::cout << "k," << run.k << '\n'
            << "requests," << t.requests << '\n'
            << "avg_latency_hops," << t.avg_latency() << '\n'
            << "hit_ratio," << t.hit_ratio() << '\n';
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void cmd_sweep(const SimConfig& config, const std::string& axis, const std::string& values,
               const std::string& policies) {
  const auto sweep_axis = parse_sweep_axis(axis);
  std::vector<PolicyKind> kinds;
  for (const auto& name : split_list(policies)) {
    const auto kind = parse_policy(name);
    if (!kind) throw ValidationError("unknown policy '" + name + "'");
    kinds.push_back(*kind);
  }
  if (kinds.empty()) kinds.push_back(config.engine.policy);
  const auto scenario = build_scenario(config);
  const auto rows = run_sweep(scenario, config, sweep_axis, split_list(values), kinds);
  auto out = open_output(config.out, "sweep.csv");
  write_sweep(out, rows);
  write_sweep(std::cout, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Urban CDC placement and cooperative caching simulator"};
  app.require_subcommand(1);

  Overrides topo_o, place_o, sim_o, sweep_o;
  auto* topology = app.add_subcommand("topology", "build the backhaul tree");
  add_common(*topology, topo_o);

  auto* placement = app.add_subcommand("place", "place CDCs and write the placement curve");
  add_common(*placement, place_o);
  add_placement(*placement, place_o);

  auto* simulate_cmd = app.add_subcommand("simulate", "run one caching scenario");
  add_common(*simulate_cmd, sim_o);
  add_placement(*simulate_cmd, sim_o);
  add_engine(*simulate_cmd, sim_o);
  simulate_cmd->add_flag_callback("--svg", [&] { sim_o.flags.emplace_back("svg", "true"); },
                                  "also write latency.svg");

  auto* sweep = app.add_subcommand("sweep", "run one scenario per axis value");
  add_common(*sweep, sweep_o);
  add_placement(*sweep, sweep_o);
  add_engine(*sweep, sweep_o);
  std::string axis, values, policies;
  sweep->add_option("--axis", axis, "cdc_count, capacity, neighborhood, s or policy")->required();
  sweep->add_option("--values", values, "comma-separated axis values")->required();
  sweep->add_option("--policies", policies, "comma-separated policies (default: --policy)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*topology) cmd_topology(resolve(topo_o));
    if (*placement) cmd_place(resolve(place_o));
    if (*simulate_cmd) cmd_simulate(resolve(sim_o));
    if (*sweep) cmd_sweep(resolve(sweep_o), axis, values, policies);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return 0;
}
