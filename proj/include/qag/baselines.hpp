#pragma once

#include <cstddef>
#include <vector>

#include "qag/orchestrator.hpp"
#include "qag/scenario.hpp"

namespace qag {

// Largest |configs|^H * |nodes|^H * H the exhaustive optimum will take on.
inline constexpr double kDefaultOracleBudget = 1e7;

double oracle_search_space(const Scenario& scenario);

// Exhaustive optimum. Every application either churns or takes one
// individually feasible (configuration, node) pair; a joint choice is kept
// when each node can cover the minimum rates cost / latency_max of its
// applications. Among joint choices serving the most applications, the one
// of least energy wins, with spare node capacity split to minimize energy.
// Throws Error(Budget) when the search space exceeds `budget`.
OrchestrationResult optimal_solve(const Scenario& scenario, double budget = kDefaultOracleBudget);

// Energy-optimal split of `capacity` TOPS among applications with costs
// `costs` and minimum rates `min_rates`: rate_i = max(min_rate_i, mu sqrt(cost_i)).
// Requires sum(min_rates) <= capacity.
std::vector<double> water_fill(const std::vector<double>& costs,
                               const std::vector<double>& min_rates, double capacity);

// Fixed-configuration baseline. `fixed_configs[h]` is the configuration
// deployed for application h whatever its targets; empty uses
// fixed_config_selection. Each application takes all spare capacity of the
// first node (by index) that meets its latency target, or else of the first
// node with any spare capacity. Deployed applications missing a target are
// churned but still consume energy.
OrchestrationResult rnf_solve(const Scenario& scenario,
                              std::vector<std::size_t> fixed_configs = {});

}  // namespace qag
