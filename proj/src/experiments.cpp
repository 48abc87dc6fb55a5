#include "urbancdc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <ostream>
#include <thread>

#include "text_util.hpp"

namespace urbancdc {

Scenario build_scenario(const SimConfig& config) {
  config.validate();
  std::optional<NodeFile> file;
  if (config.nodes) file = load_nodes(*config.nodes);
  NodeSet nodes = file ? file->nodes : synth_nodes(config.synthetic.n, config.box, config.synthetic.seed);

  std::optional<PopulationMap> population;
  if (config.density) {
    population = assign_density(nodes, *config.density);
  } else if (file && file->density) {
    population = assign_density(nodes, *file->density);
  } else {
    auto spec = config.hotspot;
    spec.hotspots = config.synthetic.hotspots;
    population = assign_density(nodes, spec, config.synthetic.seed, config.metric);
  }

  Topology topology = build_emst(nodes, config.metric);
  auto hops = std::make_shared<const HopMatrix>(hop_matrix(topology));
  RequestVector r = request_probabilities(*population);
  return {std::move(nodes), std::move(topology), std::move(hops), std::move(*population),
          std::move(r)};
}

PlacementRun place(const Scenario& scenario, const SimConfig& config) {
  const std::size_t n = scenario.nodes.size();
  if (!config.k.elbow && config.k.k > n) {
    throw ValidationError("k = " + std::to_string(config.k.k) + " exceeds the node count " +
                          std::to_string(n));
  }
  std::size_t k_max = std::min(config.curve_k_max, n);
  if (!config.k.elbow) k_max = std::max(k_max, config.k.k);
  auto placement = hierarchical_placement(scenario.topology, *scenario.hops, scenario.r, k_max);
  auto curve = placement_curve(placement);
  if (curve.size() > config.curve_k_max) curve.resize(config.curve_k_max);
  const std::size_t k = config.k.elbow ? elbow_estimate(curve) : config.k.k;
  return {std::move(placement), std::move(curve), k};
}

std::shared_ptr<const NetworkLayout> make_layout(const Scenario& scenario,
                                                 const PlacementResult& placement, std::size_t k) {
  return std::make_shared<const NetworkLayout>(scenario.hops, scenario.r, placement.communities(k));
}

MetricsSeries simulate(std::shared_ptr<const NetworkLayout> layout, const SimConfig& config) {
  Simulator sim(std::move(layout), config.engine);
  if (config.trace) {
    const auto trace = load_trace(*config.trace);
    return sim.replay(trace);
  }
  return sim.run();
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "cdc_count") return SweepAxis::CdcCount;
  if (name == "capacity") return SweepAxis::Capacity;
  if (name == "neighborhood") return SweepAxis::Neighborhood;
  if (name == "s") return SweepAxis::Skew;
  if (name == "policy") return SweepAxis::Policy;
  throw ValidationError("unknown sweep axis '" + std::string(name) +
                        "': expected cdc_count, capacity, neighborhood, s or policy");
}

namespace {

struct SweepTask {
  std::string axis_value;
  SimConfig config;
  std::size_t k = 0;
};

std::size_t parse_count(std::string_view axis, std::string_view value) {
  const auto v = text::parse_number<std::size_t>(value);
  if (!v) throw ValidationError("bad " + std::string(axis) + " value '" + std::string(value) + "'");
  return *v;
}

}  // namespace

std::vector<SweepRow> run_sweep(const Scenario& scenario, const SimConfig& base, SweepAxis axis,
                                const std::vector<std::string>& values,
                                const std::vector<PolicyKind>& policies) {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  if (axis != SweepAxis::Policy && policies.empty()) {
    throw ValidationError("sweep needs at least one policy");
  }

  std::vector<SweepTask> tasks;
  const auto add = [&](const std::string& label, SimConfig config) {
    if (axis == SweepAxis::Policy) {
      tasks.push_back({label, std::move(config), 0});
      return;
    }
    for (auto policy : policies) {
      config.engine.policy = policy;
      tasks.push_back({label, config, 0});
    }
  };
  for (const auto& value : values) {
    SimConfig config = base;
    switch (axis) {
      case SweepAxis::CdcCount:
        config.k = {false, parse_count("cdc_count", value)};
        break;
      case SweepAxis::Capacity:
        config.engine.capacity = parse_count("capacity", value);
        break;
      case SweepAxis::Neighborhood:
        config.engine.neighborhood = parse_count("neighborhood", value);
        break;
      case SweepAxis::Skew: {
        const auto s = text::parse_number<double>(value);
        if (!s) throw ValidationError("bad s value '" + value + "'");
        config.engine.skew = {*s, *s};
        break;
      }
      case SweepAxis::Policy: {
        const auto kind = parse_policy(value);
        if (!kind) throw ValidationError("unknown policy '" + value + "'");
        config.engine.policy = *kind;
        break;
      }
    }
    config.validate();
    add(value, std::move(config));
  }

  // One placement covers every k in the sweep.
  SimConfig placement_config = base;
  std::size_t k_needed = base.k.elbow ? 1 : base.k.k;
  for (const auto& t : tasks) k_needed = std::max(k_needed, t.config.k.k);
  if (axis == SweepAxis::CdcCount) {
    placement_config.k = {false, k_needed};
  } else if (!base.k.elbow) {
    placement_config.k.k = k_needed;
  }
  const auto placed = place(scenario, placement_config);
  std::map<std::size_t, std::shared_ptr<const NetworkLayout>> layouts;
  for (auto& t : tasks) {
    t.k = axis == SweepAxis::CdcCount ? t.config.k.k : placed.k;
    if (!layouts.contains(t.k)) layouts[t.k] = make_layout(scenario, placed.placement, t.k);
    t.config.engine.validate(t.k);
  }

  std::vector<SweepRow> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const auto metrics = simulate(layouts.at(tasks[i].k), tasks[i].config);
        rows[i] = {tasks[i].axis_value, std::string(policy_name(tasks[i].config.engine.policy)),
                   metrics.total.avg_latency(), metrics.total.hit_ratio()};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t workers = base.workers;
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, tasks.size());
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "axis_value,policy,avg_latency,hit_ratio\n";
  for (const auto& row : rows) {
    out << row.axis_value << ',' << row.policy << ',' << text::format_fixed(row.avg_latency, 6)
        << ',' << text::format_fixed(row.hit_ratio, 6) << '\n';
  }
}

void write_latency_svg(std::ostream& out, const MetricsSeries& metrics, std::size_t window,
                       const std::string& title) {
  constexpr double kWidth = 720, kHeight = 360, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::vector<std::pair<double, double>> points;
  double served = 0.0;
  for (const auto& w : metrics.windows) {
    served += static_cast<double>(w.requests);
    points.emplace_back(served, w.avg_latency());
  }
  const double x_max = std::max(served, static_cast<double>(window));
  double y_max = 1.0;
  for (const auto& p : points) y_max = std::max(y_max, p.second);
  y_max *= 1.05;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double frac = tick / 4.0;
    const double y = kTop + plot_h * (1.0 - frac);
    const double x = kLeft + plot_w * frac;
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << text::format_fixed(y_max * frac, 1) << "</text>\n";
    out << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">"
        << text::format_fixed(x_max * frac, 0) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">requests</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\">avg latency (hops)</text>\n";
  if (!points.empty()) {
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : points) {
      out << text::format_fixed(kLeft + plot_w * x / x_max, 2) << ','
          << text::format_fixed(kTop + plot_h * (1.0 - y / y_max), 2) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace urbancdc
