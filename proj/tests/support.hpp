#pragma once

#include <cstdint>
#include <string>

#include "qag/graph.hpp"
#include "qag/rng.hpp"
#include "qag/scenario.hpp"

namespace qag::test {

inline VertexId H(std::size_t i) { return {VertexClass::Application, i - 1}; }
inline VertexId S(std::size_t i) { return {VertexClass::Configuration, i - 1}; }
inline VertexId N(std::size_t i) { return {VertexClass::ComputeNode, i - 1}; }

// Arbitrary valid scenario: random sizes, catalogue nodes, uniform profiles
// and targets. Used for fuzzing invariants, not for realistic workloads.
inline Scenario fuzz_scenario(std::uint64_t seed, std::size_t max_apps = 3,
                              std::size_t max_configs = 4, std::size_t max_nodes = 3) {
  Rng rng(seed);
  Scenario s;
  const auto apps = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(max_apps)));
  const auto configs =
      static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(max_configs)));
  const auto nodes = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(max_nodes)));
  for (std::size_t h = 0; h < apps; ++h) {
    s.applications.push_back(
        {"h" + std::to_string(h + 1), uniform(rng, 5.0, 60.0), uniform(rng, 0.5, 20.0), ""});
  }
  for (std::size_t c = 0; c < configs; ++c) {
    s.configurations.push_back({"s" + std::to_string(c + 1), "GEANT",
                                static_cast<int>(uniform_int(rng, 1, 50)),
                                static_cast<int>(uniform_int(rng, 1, 2000)),
                                static_cast<int>(uniform_int(rng, 0, 1))});
  }
  const auto catalogue = node_catalogue();
  for (std::size_t n = 0; n < nodes; ++n) {
    auto spec = catalogue[static_cast<std::size_t>(uniform_int(rng, 0, 2))];
    spec.id = "n" + std::to_string(n + 1);
    s.nodes.push_back(spec);
  }
  s.profiles = ProfileTable(apps, configs);
  for (std::size_t h = 0; h < apps; ++h) {
    for (std::size_t c = 0; c < configs; ++c) {
      s.profiles.set(h, c, {uniform(rng, 0.5, 400.0), uniform(rng, 2.0, 80.0)});
    }
  }
  return s;
}

}  // namespace qag::test
