#include "qag/baselines.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "qag/cost.hpp"
#include "qag/error.hpp"
#include "qag/graph.hpp"

namespace qag {

namespace {

constexpr double kRelTol = 1e-9;

struct Option {
  std::size_t config = 0;
  std::size_t node = 0;
  double cost = 0.0;
  double min_rate = 0.0;
};

}  // namespace

double oracle_search_space(const Scenario& scenario) {
  const double h = static_cast<double>(scenario.applications.size());
  return std::pow(static_cast<double>(scenario.configurations.size()), h) *
         std::pow(static_cast<double>(scenario.nodes.size()), h) * h;
}

std::vector<double> water_fill(const std::vector<double>& costs,
                               const std::vector<double>& min_rates, double capacity) {
  if (costs.size() != min_rates.size()) throw invalid_argument("water_fill: size mismatch");
  const std::size_t k = costs.size();
  std::vector<double> rates(k, 0.0);
  std::vector<bool> pinned(k, false);
  // A zero-cost application spends no energy at any rate but still needs a
  // positive one; it gets a sliver of the node and drops out of the fill.
  const double sliver = capacity * 1e-9;
  double reserved = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (costs[i] == 0.0 && min_rates[i] == 0.0) {
      pinned[i] = true;
      reserved += sliver;
    }
  }
  for (;;) {
    double budget = capacity - reserved;
    double weight = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (pinned[i]) {
        budget -= min_rates[i];
      } else {
        weight += std::sqrt(costs[i]);
      }
    }
    if (weight == 0.0) break;
    bool changed = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (pinned[i]) continue;
      rates[i] = budget * std::sqrt(costs[i]) / weight;
      if (rates[i] < min_rates[i]) {
        pinned[i] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (pinned[i]) rates[i] = costs[i] == 0.0 && min_rates[i] == 0.0 ? sliver : min_rates[i];
  }
  return rates;
}

OrchestrationResult optimal_solve(const Scenario& scenario, double budget) {
  scenario.validate();
  const double space = oracle_search_space(scenario);
  if (space > budget) {
    std::ostringstream msg;
    msg << "exhaustive search space " << space << " exceeds the oracle budget " << budget;
    throw Error(ErrorCode::Budget, msg.str());
  }
  const auto graph = build_graph(scenario);
  const std::size_t apps = scenario.applications.size();
  const auto& nodes = scenario.nodes;

  std::vector<std::vector<Option>> options(apps);
  for (std::size_t h = 0; h < apps; ++h) {
    const auto& req = scenario.applications[h];
    for (std::size_t c = 0; c < scenario.configurations.size(); ++c) {
      const auto& p = scenario.profile(h, c);
      if (p.loss > req.loss_max * (1.0 + kRelTol)) continue;
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        const double min_rate = p.cost / req.latency_max;
        if (min_rate > nodes[n].capacity * (1.0 + kRelTol)) continue;
        options[h].push_back(Option{c, n, p.cost, min_rate});
      }
    }
  }

  // Odometer over choice[h] in [0, options[h].size()], the last value = churn.
  std::vector<std::size_t> choice(apps, 0);
  std::vector<std::size_t> best_choice;
  std::size_t best_served = 0;
  double best_energy = 0.0;
  std::vector<double> demand(nodes.size());
  std::vector<std::vector<std::size_t>> on_node(nodes.size());

  for (;;) {
    std::fill(demand.begin(), demand.end(), 0.0);
    std::size_t served = 0;
    for (std::size_t h = 0; h < apps; ++h) {
      if (choice[h] == options[h].size()) continue;
      const auto& o = options[h][choice[h]];
      demand[o.node] += o.min_rate;
      ++served;
    }
    bool fits = true;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (demand[n] > nodes[n].capacity * (1.0 + kRelTol)) fits = false;
    }
    if (fits && served >= best_served) {
      for (auto& list : on_node) list.clear();
      for (std::size_t h = 0; h < apps; ++h) {
        if (choice[h] < options[h].size()) on_node[options[h][choice[h]].node].push_back(h);
      }
      double energy = 0.0;
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (on_node[n].empty()) continue;
        std::vector<double> costs, mins;
        for (auto h : on_node[n]) {
          costs.push_back(options[h][choice[h]].cost);
          mins.push_back(options[h][choice[h]].min_rate);
        }
        const auto rates = water_fill(costs, mins, nodes[n].capacity);
        for (std::size_t i = 0; i < rates.size(); ++i) {
          energy += costs[i] / rates[i] * nodes[n].max_power;
        }
      }
      if (best_choice.empty() || served > best_served || energy < best_energy) {
        best_choice = choice;
        best_served = served;
        best_energy = energy;
      }
    }

    std::size_t h = 0;
    while (h < apps && choice[h] == options[h].size()) {
      choice[h] = 0;
      ++h;
    }
    if (h == apps) break;
    ++choice[h];
  }

  Assignment assignment;
  assignment.rows.resize(apps);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    std::vector<std::size_t> members;
    std::vector<double> costs, mins;
    for (std::size_t h = 0; h < apps; ++h) {
      if (best_choice[h] == options[h].size()) continue;
      const auto& o = options[h][best_choice[h]];
      if (o.node != n) continue;
      members.push_back(h);
      costs.push_back(o.cost);
      mins.push_back(o.min_rate);
    }
    if (members.empty()) continue;
    const auto rates = water_fill(costs, mins, nodes[n].capacity);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto& o = options[members[i]][best_choice[members[i]]];
      assignment.rows[members[i]] = Placement{o.config, o.node, rates[i]};
    }
  }
  return summarize(scenario, graph, std::move(assignment));
}

OrchestrationResult rnf_solve(const Scenario& scenario, std::vector<std::size_t> fixed_configs) {
  scenario.validate();
  if (fixed_configs.empty()) fixed_configs = fixed_config_selection(scenario);
  const std::size_t apps = scenario.applications.size();
  if (fixed_configs.size() != apps) {
    throw invalid_argument("rnf_solve: one fixed configuration per application required");
  }
  for (auto c : fixed_configs) {
    if (c >= scenario.configurations.size()) {
      throw invalid_argument("rnf_solve: fixed configuration out of range");
    }
  }

  const auto graph = build_graph(scenario);
  std::vector<double> remaining;
  for (const auto& n : scenario.nodes) remaining.push_back(n.capacity);

  Assignment assignment;
  assignment.rows.resize(apps);
  for (std::size_t h = 0; h < apps; ++h) {
    const double cost = scenario.profile(h, fixed_configs[h]).cost;
    const double tau = scenario.applications[h].latency_max;
    std::optional<std::size_t> pick;
    for (std::size_t n = 0; n < remaining.size() && !pick; ++n) {
      if (remaining[n] > 0.0 && cost / remaining[n] <= tau * (1.0 + kRelTol)) pick = n;
    }
    for (std::size_t n = 0; n < remaining.size() && !pick; ++n) {
      if (remaining[n] > 0.0) pick = n;
    }
    if (!pick) continue;
    assignment.rows[h] = Placement{fixed_configs[h], *pick, remaining[*pick]};
    remaining[*pick] = 0.0;
  }
  return summarize(scenario, graph, std::move(assignment));
}

}  // namespace qag
