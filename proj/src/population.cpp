#include "urbancdc/population.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <unordered_map>

#include "text_util.hpp"
#include "urbancdc/random.hpp"

namespace urbancdc {

PopulationMap::PopulationMap(std::vector<double> density) : density_(std::move(density)) {
  if (density_.empty()) throw ValidationError("population map is empty");
  bool any_positive = false;
  for (std::size_t i = 0; i < density_.size(); ++i) {
    const double d = density_[i];
    if (!std::isfinite(d) || d < 0.0) {
      throw ValidationError("density at node " + std::to_string(i) + " must be finite and >= 0");
    }
    any_positive = any_positive || d > 0.0;
  }
  if (!any_positive) throw ValidationError("all densities are zero");
}

RequestVector request_probabilities(const PopulationMap& population) {
  const auto gamma = population.density();
  double total = 0.0;
  for (double g : gamma) total += g;
  std::vector<double> r(gamma.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = gamma[i] / total;
  return RequestVector(std::move(r));
}

std::vector<double> hotspot_density(const NodeSet& nodes, std::span<const Hotspot> hotspots,
                                    double floor, DistanceMetric metric) {
  if (floor < 0.0) throw ValidationError("density floor must be >= 0");
  for (const auto& h : hotspots) {
    if (h.amplitude < 0.0 || !(h.spread_m > 0.0)) {
      throw ValidationError("hotspot amplitude must be >= 0 and spread > 0");
    }
    if (h.center >= nodes.size()) throw ValidationError("hotspot centre out of range");
  }
  std::vector<double> density(nodes.size(), floor);
  for (const auto& h : hotspots) {
    const auto c = nodes.point(h.center);
    const double denom = 2.0 * h.spread_m * h.spread_m;
    for (NodeId i = 0; i < nodes.size(); ++i) {
      const double d = distance(c, nodes.point(i), metric);
      density[i] += h.amplitude * std::exp(-(d * d) / denom);
    }
  }
  return density;
}

std::vector<Hotspot> draw_hotspots(const NodeSet& nodes, const SyntheticDensitySpec& spec,
                                   std::uint64_t seed) {
  if (spec.amplitude < 0.0 || spec.spread_m < 0.0 || spec.floor < 0.0) {
    throw ValidationError("synthetic density amplitude, spread and floor must be >= 0");
  }
  Rng rng(derive_seed(seed, 0x686f74ULL));
  std::vector<Hotspot> out(spec.hotspots);
  for (auto& h : out) {
    h.center = static_cast<NodeId>(rng.below(nodes.size()));
    h.amplitude = spec.amplitude * rng.uniform(0.5, 1.0);
    h.spread_m = std::max(1.0, spec.spread_m * rng.uniform(0.5, 1.5));
  }
  return out;
}

std::vector<double> synth_density(const NodeSet& nodes, const SyntheticDensitySpec& spec,
                                  std::uint64_t seed, DistanceMetric metric) {
  const auto hotspots = draw_hotspots(nodes, spec, seed);
  return hotspot_density(nodes, hotspots, spec.floor, metric);
}

std::vector<double> read_density(std::istream& in, const NodeSet& nodes) {
  std::unordered_map<std::int64_t, NodeId> index;
  for (NodeId i = 0; i < nodes.size(); ++i) index.emplace(nodes.source_id(i), i);

  std::vector<double> density(nodes.size(), 0.0);
  std::vector<char> covered(nodes.size(), 0);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = text::trim(line);
    if (content.empty()) continue;
    const auto fields = text::split(content, ',');
    if (!have_header) {
      if (fields.size() != 2 || fields[0] != "id" || fields[1] != "density") {
        throw ParseError("expected header id,density", line_no);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 2) throw ParseError("expected 2 fields", line_no);
    const auto id = text::parse_number<std::int64_t>(fields[0]);
    const auto d = text::parse_number<double>(fields[1]);
    if (!id) throw ParseError("bad id '" + std::string(fields[0]) + "'", line_no);
    if (!d || !std::isfinite(*d) || *d < 0.0) {
      throw ParseError("bad density '" + std::string(fields[1]) + "'", line_no);
    }
    const auto it = index.find(*id);
    if (it == index.end()) {
      throw ValidationError("density file names unknown node id " + std::to_string(*id));
    }
    if (covered[it->second]) {
      throw ValidationError("density file repeats node id " + std::to_string(*id));
    }
    covered[it->second] = 1;
    density[it->second] = *d;
  }

  std::string missing;
  std::size_t missing_count = 0;
  for (NodeId i = 0; i < nodes.size(); ++i) {
    if (covered[i]) continue;
    if (missing_count++ < 20) {
      if (!missing.empty()) missing += ", ";
      missing += std::to_string(nodes.source_id(i));
    }
  }
  if (missing_count > 0) {
    if (missing_count > 20) missing += ", ...";
    throw ValidationError("density file is missing " + std::to_string(missing_count) +
                          " node id(s): " + missing);
  }
  return density;
}

std::vector<double> load_density(const std::filesystem::path& path, const NodeSet& nodes) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open density file " + path.string());
  return read_density(in, nodes);
}

PopulationMap assign_density(const NodeSet& nodes, std::vector<double> per_node) {
  if (per_node.size() != nodes.size()) {
    throw ValidationError("density length does not match node count");
  }
  return PopulationMap(std::move(per_node));
}

PopulationMap assign_density(const NodeSet& nodes, const std::filesystem::path& density_file) {
  return PopulationMap(load_density(density_file, nodes));
}

PopulationMap assign_density(const NodeSet& nodes, const SyntheticDensitySpec& spec,
                             std::uint64_t seed, DistanceMetric metric) {
  return PopulationMap(synth_density(nodes, spec, seed, metric));
}

}  // namespace urbancdc
