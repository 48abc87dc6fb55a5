#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "urbancdc/geo_topology.hpp"
#include "urbancdc/population.hpp"
#include "urbancdc/simulator.hpp"

namespace urbancdc {

/// Desk-scale stand-in for a borough: node count, seed and hotspot count.
struct SyntheticTopology {
  std::size_t n = 1004;
  std::uint64_t seed = 1;
  std::size_t hotspots = 4;

  friend bool operator==(const SyntheticTopology&, const SyntheticTopology&) = default;
};

/// Parses `n=<N>,seed=<S>,hotspots=<H>`; omitted keys keep their defaults.
SyntheticTopology parse_synthetic(std::string_view text);
std::string format_synthetic(const SyntheticTopology& spec);

/// A fixed CDC count or the elbow of the placement curve.
struct CdcChoice {
  bool elbow = false;
  std::size_t k = 25;

  friend bool operator==(const CdcChoice&, const CdcChoice&) = default;
};

struct SimConfig {
  std::optional<std::filesystem::path> nodes;  // overrides the synthetic topology
  SyntheticTopology synthetic;
  BoundingBox box;
  std::optional<std::filesystem::path> density;  // else the node file column, else hotspots
  SyntheticDensitySpec hotspot;
  DistanceMetric metric = DistanceMetric::Haversine;
  CdcChoice k;
  std::size_t curve_k_max = 100;
  EngineConfig engine;
  std::optional<std::filesystem::path> trace;
  std::filesystem::path out = "out";
  std::size_t workers = 0;  // 0: one per hardware thread
  bool svg = false;

  /// Throws ValidationError. The CDC-dependent checks run with the engine.
  void validate() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Sets one key from its text form. Throws ValidationError for unknown keys
/// and malformed values.
void set_option(SimConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` text; `#` starts a comment. Throws ParseError with the
/// offending line.
SimConfig parse_config(std::istream& in);
SimConfig load_config(const std::filesystem::path& path);

/// Every key, one per line, in a fixed order. Parsing the output gives back
/// an equal config.
void write_config(std::ostream& out, const SimConfig& config);

}  // namespace urbancdc
