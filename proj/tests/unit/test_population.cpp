#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "helpers.hpp"
#include "urbancdc/population.hpp"

using namespace urbancdc;

namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

NodeSet five_nodes() {
  return NodeSet({{40.60, -74.00}, {40.61, -74.00}, {40.62, -73.99}, {40.63, -73.98}, {40.64, -73.97}});
}

}  // namespace

TEST_CASE("request probabilities") {
  const auto r = request_probabilities(PopulationMap({2, 3, 5}));
  CHECK(r[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(r[2] == doctest::Approx(0.5).epsilon(1e-15));

  const auto u = request_probabilities(PopulationMap(std::vector<double>(8, 42.0)));
  for (std::size_t i = 0; i < 8; ++i) CHECK(u[i] == doctest::Approx(0.125).epsilon(1e-15));

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> gamma(50);
    for (auto& g : gamma) g = rng.uniform() * 1000.0;
    const auto base = request_probabilities(PopulationMap(gamma));
    CHECK(std::abs(sum(base.values()) - 1.0) <= 1e-12);
    for (double c : {1e-6, 1.0, 1e6}) {
      std::vector<double> scaled = gamma;
      for (auto& g : scaled) g *= c;
      const auto r2 = request_probabilities(PopulationMap(scaled));
      for (std::size_t i = 0; i < gamma.size(); ++i) CHECK(std::abs(r2[i] - base[i]) <= 1e-12);
    }
  }
}

TEST_CASE("population map validation") {
  CHECK_THROWS_AS(PopulationMap({}), ValidationError);
  CHECK_THROWS_AS(PopulationMap({0, 0}), ValidationError);
  CHECK_THROWS_AS(PopulationMap({1, -1}), ValidationError);
  CHECK_THROWS_AS(PopulationMap({1, std::nan("")}), ValidationError);
  CHECK_NOTHROW(PopulationMap({0, 1}));
}

TEST_CASE("density files") {
  const auto nodes = five_nodes();
  SUBCASE("uniform") {
    std::istringstream in("id,density\n0,100\n1,100\n2,100\n3,100\n4,100\n");
    const auto map = assign_density(nodes, read_density(in, nodes));
    for (NodeId i = 0; i < 5; ++i) CHECK(map[i] == 100.0);
  }
  SUBCASE("missing id is named") {
    std::istringstream in("id,density\n0,1\n1,1\n2,1\n3,1\n");
    try {
      read_density(in, nodes);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("4") != std::string::npos);
    }
  }
  SUBCASE("unknown id") {
    std::istringstream in("id,density\n0,1\n1,1\n2,1\n3,1\n4,1\n5,1\n");
    CHECK_THROWS_AS(read_density(in, nodes), ValidationError);
  }
  SUBCASE("bad value") {
    std::istringstream in("id,density\n0,lots\n");
    CHECK_THROWS_AS(read_density(in, nodes), ParseError);
  }
  SUBCASE("day and night files give independent request vectors") {
    const auto dir = std::filesystem::temp_directory_path() / "urbancdc_density_test";
    std::filesystem::create_directories(dir);
    {
      std::ofstream day(dir / "day.csv");
      day << "id,density\n0,10\n1,10\n2,10\n3,10\n4,60\n";
      std::ofstream night(dir / "night.csv");
      night << "id,density\n0,60\n1,10\n2,10\n3,10\n4,10\n";
    }
    const auto r_day = request_probabilities(assign_density(nodes, dir / "day.csv"));
    const auto r_night = request_probabilities(assign_density(nodes, dir / "night.csv"));
    CHECK(r_day[4] == doctest::Approx(0.6));
    CHECK(r_night[0] == doctest::Approx(0.6));
    CHECK(r_day[0] == doctest::Approx(0.1));
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(assign_density(nodes, dir / "day.csv"), InputError);
  }
}

TEST_CASE("hotspot densities") {
  const auto nodes = synth_nodes(60, BoundingBox{}, 4);

  const auto flat = hotspot_density(nodes, {}, 1.0);
  for (double d : flat) CHECK(d == 1.0);

  for (NodeId center : {0U, 17U, 59U}) {
    const Hotspot h{center, 5000.0, 800.0};
    const auto d = hotspot_density(nodes, std::span(&h, 1), 10.0);
    // Evaluate the bump independently at every node.
    std::vector<double> expected(nodes.size());
    for (NodeId i = 0; i < nodes.size(); ++i) {
      const double dist = geo_distance(nodes.point(i), nodes.point(center));
      expected[i] = 10.0 + 5000.0 * std::exp(-dist * dist / (2.0 * 800.0 * 800.0));
      CHECK(d[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
    CHECK(std::max_element(d.begin(), d.end()) - d.begin() == center);
  }

  const SyntheticDensitySpec spec;
  const auto a = synth_density(nodes, spec, 42);
  CHECK(a == synth_density(nodes, spec, 42));
  CHECK_FALSE(a == synth_density(nodes, spec, 43));
  for (double d : a) CHECK(d >= spec.floor);
}
