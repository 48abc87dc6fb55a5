#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "urbancdc/experiments.hpp"

namespace py = pybind11;
using namespace urbancdc;

namespace {

py::dict window_dict(const WindowMetrics& w) {
  py::dict d;
  d["window"] = w.window;
  d["requests"] = w.requests;
  d["avg_latency"] = w.avg_latency();
  d["hit_local"] = w.hit_local();
  d["hit_neighbor"] = w.hit_neighbor();
  d["origin_ratio"] = w.origin_ratio();
  d["hit_ratio"] = w.hit_ratio();
  d["exchanged_records"] = w.exchanged_records;
  return d;
}

std::vector<PolicyKind> policies_from(const std::vector<std::string>& names) {
  std::vector<PolicyKind> out;
  for (const auto& name : names) {
    const auto kind = parse_policy(name);
    if (!kind) throw ValidationError("unknown policy '" + name + "'");
    out.push_back(*kind);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_urbancdc, m) {
  m.doc() = "Urban CDC placement and cooperative caching simulator";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", validation.ptr());
  py::register_exception<InputError>(m, "InputError", PyExc_OSError);

  m.def("haversine_m", [](double lat1, double lon1, double lat2, double lon2) {
    return geo_distance({lat1, lon1}, {lat2, lon2});
  });
  m.def("zipf_pmf", &zipf_pmf, py::arg("s"), py::arg("m"));
  m.def("mle_estimate_s", [](const std::vector<ContentId>& samples, std::size_t m) {
    return mle_estimate_s(samples, m);
  }, py::arg("samples"), py::arg("m"));
  m.def("beta_from_s", &beta_from_s, py::arg("s"));
  m.def("policies", [] {
    std::vector<std::string> out;
    for (auto kind : {PolicyKind::Lru, PolicyKind::Lfu, PolicyKind::Fifo, PolicyKind::RandomReplacement,
                      PolicyKind::Mru, PolicyKind::PopularityLfu, PolicyKind::ScoreLfu,
                      PolicyKind::AdaptiveScoreLfu}) {
      out.emplace_back(policy_name(kind));
    }
    return out;
  });

  py::class_<SimConfig>(m, "Config")
      .def(py::init<>())
      .def(py::init([](const py::kwargs& kwargs) {
        SimConfig c;
        for (const auto& [key, value] : kwargs) set_option(c, py::str(key).cast<std::string>(),
                                                           py::str(value).cast<std::string>());
        return c;
      }))
      .def_static("from_text", [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
      })
      .def_static("load", &load_config)
      .def("set", [](SimConfig& c, const std::string& key, const py::object& value) {
        set_option(c, key, py::str(value).cast<std::string>());
        return &c;
      }, py::return_value_policy::reference_internal)
      .def("to_text", [](const SimConfig& c) {
        std::ostringstream out;
        write_config(out, c);
        return out.str();
      })
      .def("validate", &SimConfig::validate)
      .def("__eq__", [](const SimConfig& a, const SimConfig& b) { return a == b; })
      .def("__repr__", [](const SimConfig& c) {
        return "Config(policy=" + std::string(policy_name(c.engine.policy)) +
               ", synthetic=" + format_synthetic(c.synthetic) + ")";
      });

  m.def("topology", [](const SimConfig& config) {
    const auto s = build_scenario(config);
    py::list edges;
    double total = 0.0;
    for (const auto& e : s.topology.edges()) {
      edges.append(py::make_tuple(s.nodes.source_id(e.u), s.nodes.source_id(e.v), e.weight_m));
      total += e.weight_m;
    }
    py::dict d;
    d["nodes"] = s.nodes.size();
    d["edges"] = edges;
    d["total_length_m"] = total;
    d["request_probability"] = std::vector<double>(s.r.values().begin(), s.r.values().end());
    return d;
  }, py::arg("config"));

  m.def("place", [](const SimConfig& config) {
    config.validate();
    const auto s = build_scenario(config);
    const auto run = place(s, config);
    const auto& level = run.placement.level(run.k);
    std::vector<std::int64_t> cdcs, community_of;
    for (auto c : level.cdcs) cdcs.push_back(s.nodes.source_id(c));
    for (auto c : level.community_of) community_of.push_back(c);
    py::list curve;
    for (const auto& p : run.curve) curve.append(py::make_tuple(static_cast<std::size_t>(p.k), p.value));
    py::dict d;
    d["k"] = run.k;
    d["cdcs"] = cdcs;
    d["community_of"] = community_of;
    d["avg_weighted_hops"] = level.avg_weighted_hops;
    d["curve"] = curve;
    return d;
  }, py::arg("config"));

  m.def("simulate", [](const SimConfig& config) {
    config.validate();
    MetricsSeries metrics;
    {
      py::gil_scoped_release release;
      const auto s = build_scenario(config);
      const auto run = place(s, config);
      metrics = simulate(make_layout(s, run.placement, run.k), config);
    }
    py::list windows;
    for (const auto& w : metrics.windows) windows.append(window_dict(w));
    py::dict d;
    d["windows"] = windows;
    d["total"] = window_dict(metrics.total);
    std::ostringstream csv;
    write_metrics(csv, metrics);
    d["csv"] = csv.str();
    return d;
  }, py::arg("config"));

  m.def("sweep", [](const SimConfig& config, const std::string& axis, const std::vector<std::string>& values,
                    const std::vector<std::string>& policies) {
    config.validate();
    const auto parsed_axis = parse_sweep_axis(axis);
    const auto kinds = policies_from(policies);
    std::vector<SweepRow> rows;
    {
      py::gil_scoped_release release;
      rows = run_sweep(build_scenario(config), config, parsed_axis, values, kinds);
    }
    py::list out;
    for (const auto& r : rows) {
      py::dict d;
      d["axis_value"] = r.axis_value;
      d["policy"] = r.policy;
      d["avg_latency"] = r.avg_latency;
      d["hit_ratio"] = r.hit_ratio;
      out.append(d);
    }
    return out;
  }, py::arg("config"), py::arg("axis"), py::arg("values"), py::arg("policies") = std::vector<std::string>{});
}
