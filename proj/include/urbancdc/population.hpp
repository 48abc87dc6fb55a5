#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "urbancdc/geo_topology.hpp"

namespace urbancdc {

/// Persons per km² around each node.
class PopulationMap {
 public:
  /// Throws ValidationError on negative or non-finite entries, or when every entry is zero.
  explicit PopulationMap(std::vector<double> density);

  std::size_t size() const noexcept { return density_.size(); }
  std::span<const double> density() const noexcept { return density_; }
  double operator[](NodeId i) const { return density_.at(i); }

 private:
  std::vector<double> density_;
};

/// Per-node probability that a request originates there. Sums to one.
class RequestVector {
 public:
  RequestVector() = default;
  explicit RequestVector(std::vector<double> probabilities) : r_(std::move(probabilities)) {}

  std::size_t size() const noexcept { return r_.size(); }
  std::span<const double> values() const noexcept { return r_; }
  double operator[](NodeId i) const { return r_[i]; }

 private:
  std::vector<double> r_;
};

/// r_i = gamma_i / sum_j gamma_j
RequestVector request_probabilities(const PopulationMap& population);

/// A Gaussian bump of density centred on a node.
struct Hotspot {
  NodeId center = 0;
  double amplitude = 0.0;  // persons per km² at the centre
  double spread_m = 1.0;   // standard deviation
};

struct SyntheticDensitySpec {
  std::size_t hotspots = 4;
  double amplitude = 20000.0;
  double spread_m = 1500.0;
  double floor = 500.0;

  friend bool operator==(const SyntheticDensitySpec&, const SyntheticDensitySpec&) = default;
};

/// floor + sum_h amplitude_h * exp(-d(node, centre_h)^2 / (2 spread_h^2))
std::vector<double> hotspot_density(const NodeSet& nodes, std::span<const Hotspot> hotspots,
                                    double floor, DistanceMetric metric = DistanceMetric::Haversine);

/// Hotspot centres, amplitudes in [0.5, 1] x amplitude and spreads in
/// [0.5, 1.5] x spread, all drawn from `seed`.
std::vector<Hotspot> draw_hotspots(const NodeSet& nodes, const SyntheticDensitySpec& spec,
                                   std::uint64_t seed);

std::vector<double> synth_density(const NodeSet& nodes, const SyntheticDensitySpec& spec,
                                  std::uint64_t seed,
                                  DistanceMetric metric = DistanceMetric::Haversine);

/// `id,density` rows keyed by the node set's source ids. Every node must be
/// covered; missing ids are listed in the error.
std::vector<double> read_density(std::istream& in, const NodeSet& nodes);
std::vector<double> load_density(const std::filesystem::path& path, const NodeSet& nodes);

PopulationMap assign_density(const NodeSet& nodes, std::vector<double> per_node);
PopulationMap assign_density(const NodeSet& nodes, const std::filesystem::path& density_file);
PopulationMap assign_density(const NodeSet& nodes, const SyntheticDensitySpec& spec,
                             std::uint64_t seed, DistanceMetric metric = DistanceMetric::Haversine);

}  // namespace urbancdc
