#include "urbancdc/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <type_traits>

#include "text_util.hpp"

namespace urbancdc {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ValidationError("bad value '" + std::string(value) + "' for " + std::string(key) +
                        ": expected " + std::string(expected));
}

template <class T>
T number(std::string_view key, std::string_view value) {
  const auto parsed = text::parse_number<T>(value);
  if (!parsed) {
    bad_value(key, value, std::is_floating_point_v<T> ? "a number" : "a non-negative integer");
  }
  return *parsed;
}

bool boolean(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "true or false");
}

std::optional<std::filesystem::path> optional_path(std::string_view value) {
  if (value.empty()) return std::nullopt;
  return std::filesystem::path(std::string(value));
}

std::string path_text(const std::optional<std::filesystem::path>& p) {
  return p ? p->string() : std::string();
}

struct Option {
  std::string_view key;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <class T>
Option integer_option(std::string_view key, T SimConfig::*field) {
  return {key, [key, field](SimConfig& c, std::string_view v) { c.*field = number<T>(key, v); },
          [field](const SimConfig& c) { return std::to_string(c.*field); }};
}

template <class T>
Option engine_integer(std::string_view key, T EngineConfig::*field) {
  return {key,
          [key, field](SimConfig& c, std::string_view v) { c.engine.*field = number<T>(key, v); },
          [field](const SimConfig& c) { return std::to_string(c.engine.*field); }};
}

// `field` is a generic lambda returning a reference into either constness.
template <class Field>
Option real_option(std::string_view key, Field field) {
  return {key, [key, field](SimConfig& c, std::string_view v) { field(c) = number<double>(key, v); },
          [field](const SimConfig& c) { return text::format_exact(field(c)); }};
}

const std::vector<Option>& options() {
  static const std::vector<Option> table = {
      {"nodes", [](SimConfig& c, std::string_view v) { c.nodes = optional_path(v); },
       [](const SimConfig& c) { return path_text(c.nodes); }},
      {"synthetic",
       [](SimConfig& c, std::string_view v) { c.synthetic = parse_synthetic(v); },
       [](const SimConfig& c) { return format_synthetic(c.synthetic); }},
      real_option("lat_min", [](auto& c) -> auto& { return c.box.lat_min; }),
      real_option("lat_max", [](auto& c) -> auto& { return c.box.lat_max; }),
      real_option("lon_min", [](auto& c) -> auto& { return c.box.lon_min; }),
      real_option("lon_max", [](auto& c) -> auto& { return c.box.lon_max; }),
      {"density", [](SimConfig& c, std::string_view v) { c.density = optional_path(v); },
       [](const SimConfig& c) { return path_text(c.density); }},
      real_option("hotspot_amplitude", [](auto& c) -> auto& { return c.hotspot.amplitude; }),
      real_option("hotspot_spread_m", [](auto& c) -> auto& { return c.hotspot.spread_m; }),
      real_option("density_floor", [](auto& c) -> auto& { return c.hotspot.floor; }),
      {"distance",
       [](SimConfig& c, std::string_view v) {
         if (v == "haversine") {
           c.metric = DistanceMetric::Haversine;
         } else if (v == "planar") {
           c.metric = DistanceMetric::Planar;
         } else {
           bad_value("distance", v, "haversine or planar");
         }
       },
       [](const SimConfig& c) {
         return std::string(c.metric == DistanceMetric::Haversine ? "haversine" : "planar");
       }},
      {"k",
       [](SimConfig& c, std::string_view v) {
         if (v == "elbow") {
           c.k.elbow = true;
         } else {
           c.k = {false, number<std::size_t>("k", v)};
         }
       },
       [](const SimConfig& c) { return c.k.elbow ? std::string("elbow") : std::to_string(c.k.k); }},
      integer_option("curve_k_max", &SimConfig::curve_k_max),
      {"policy",
       [](SimConfig& c, std::string_view v) {
         const auto kind = parse_policy(v);
         if (!kind) bad_value("policy", v, "lru, lfu, fifo, rr, mru, plfu, slfu or shat_lfu");
         c.engine.policy = *kind;
       },
       [](const SimConfig& c) { return std::string(policy_name(c.engine.policy)); }},
      engine_integer("catalog_size", &EngineConfig::catalog_size),
      engine_integer("capacity", &EngineConfig::capacity),
      engine_integer("window", &EngineConfig::window),
      engine_integer("neighborhood", &EngineConfig::neighborhood),
      engine_integer("mle_observations", &EngineConfig::mle_observations),
      engine_integer("epoch_len", &EngineConfig::epoch_len),
      engine_integer("requests", &EngineConfig::requests),
      engine_integer("seed", &EngineConfig::seed),
      real_option("alpha", [](auto& c) -> auto& { return c.engine.alpha; }),
      {"beta",
       [](SimConfig& c, std::string_view v) {
         if (v == "auto") {
           c.engine.beta.mode = BetaMode::SkewFormula;
         } else {
           c.engine.beta = {BetaMode::Fixed, number<double>("beta", v)};
         }
       },
       [](const SimConfig& c) {
         return c.engine.beta.mode == BetaMode::SkewFormula ? std::string("auto")
                                                             : text::format_exact(c.engine.beta.fixed);
       }},
      real_option("s_min", [](auto& c) -> auto& { return c.engine.skew.min; }),
      real_option("s_max", [](auto& c) -> auto& { return c.engine.skew.max; }),
      {"origin_min",
       [](SimConfig& c, std::string_view v) {
         c.engine.origin.min_hops = number<std::uint32_t>("origin_min", v);
       },
       [](const SimConfig& c) { return std::to_string(c.engine.origin.min_hops); }},
      {"origin_max",
       [](SimConfig& c, std::string_view v) {
         c.engine.origin.max_hops = number<std::uint32_t>("origin_max", v);
       },
       [](const SimConfig& c) { return std::to_string(c.engine.origin.max_hops); }},
      {"cooperative_lookup",
       [](SimConfig& c, std::string_view v) {
         c.engine.cooperative_lookup = boolean("cooperative_lookup", v);
       },
       [](const SimConfig& c) { return std::string(c.engine.cooperative_lookup ? "true" : "false"); }},
      {"trace", [](SimConfig& c, std::string_view v) { c.trace = optional_path(v); },
       [](const SimConfig& c) { return path_text(c.trace); }},
      {"out", [](SimConfig& c, std::string_view v) { c.out = std::string(v); },
       [](const SimConfig& c) { return c.out.string(); }},
      integer_option("workers", &SimConfig::workers),
      {"svg", [](SimConfig& c, std::string_view v) { c.svg = boolean("svg", v); },
       [](const SimConfig& c) { return std::string(c.svg ? "true" : "false"); }},
  };
  return table;
}

}  // namespace

SyntheticTopology parse_synthetic(std::string_view text) {
  SyntheticTopology spec;
  if (text::trim(text).empty()) return spec;
  for (const auto item : text::split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) bad_value("synthetic", text, "n=<N>,seed=<S>,hotspots=<H>");
    const auto key = text::trim(item.substr(0, eq));
    const auto value = text::trim(item.substr(eq + 1));
    if (key == "n") {
      spec.n = number<std::size_t>("synthetic n", value);
      if (spec.n < 1) bad_value("synthetic n", value, "at least 1");
    } else if (key == "seed") {
      spec.seed = number<std::uint64_t>("synthetic seed", value);
    } else if (key == "hotspots") {
      spec.hotspots = number<std::size_t>("synthetic hotspots", value);
    } else {
      bad_value("synthetic", key, "n, seed or hotspots");
    }
  }
  return spec;
}

std::string format_synthetic(const SyntheticTopology& spec) {
  return "n=" + std::to_string(spec.n) + ",seed=" + std::to_string(spec.seed) +
         ",hotspots=" + std::to_string(spec.hotspots);
}

void SimConfig::validate() const {
  const auto fail = [](const std::string& what) { throw ValidationError(what); };
  if (!nodes && synthetic.n < 1) fail("synthetic node count must be at least 1");
  if (!(box.lat_min < box.lat_max && box.lon_min < box.lon_max)) fail("bounding box is empty");
  if (!(hotspot.amplitude >= 0.0 && hotspot.spread_m > 0.0 && hotspot.floor >= 0.0)) {
    fail("hotspot amplitude and floor must be >= 0 and spread > 0");
  }
  if (!k.elbow && k.k < 1) fail("k must be at least 1");
  if (!k.elbow && engine.neighborhood > 0 && engine.neighborhood >= k.k) {
    fail("neighborhood must be smaller than k");
  }
  if (curve_k_max < 1) fail("curve_k_max must be at least 1");
  if (out.empty()) fail("out must name a directory");
  // Everything but the CDC-count bound on the neighbourhood.
  engine.validate(engine.neighborhood + 1);
}

void set_option(SimConfig& config, std::string_view key, std::string_view value) {
  for (const auto& option : options()) {
    if (option.key == key) {
      option.set(config, text::trim(value));
      return;
    }
  }
  throw ValidationError("unknown config key '" + std::string(key) + "'");
}

SimConfig parse_config(std::istream& in) {
  SimConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view content = line;
    if (const auto hash = content.find('#'); hash != std::string_view::npos) {
      content = content.substr(0, hash);
    }
    content = text::trim(content);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    try {
      set_option(config, text::trim(content.substr(0, eq)), content.substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return config;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& out, const SimConfig& config) {
  for (const auto& option : options()) out << option.key << " = " << option.get(config) << '\n';
}

}  // namespace urbancdc
