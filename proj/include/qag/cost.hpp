#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qag/graph.hpp"
#include "qag/scenario.hpp"

namespace qag {

// Rate of application and configuration vertices: no compute limit.
inline constexpr double kUnboundedRate = std::numeric_limits<double>::infinity();

// Seconds to process `cost` tera-operations at `rate` TOPS; zero for an
// unbounded rate. Throws on a zero or negative rate.
double edge_time(double cost, double rate);

struct Placement {
  std::size_t config = 0;
  std::size_t node = 0;
  double rate = 0.0;  // TOPS granted on `node`

  bool operator==(const Placement&) const = default;
};

// One row per application, indexed like Scenario::applications. An empty row
// means the application is not deployed.
struct Assignment {
  std::vector<std::optional<Placement>> rows;

  bool operator==(const Assignment&) const = default;
};

// Latency of the (h, s) and (s, n) hops; weights are read from `graph`, which
// must still hold both edges for `app` (normally the unpruned graph).
double app_latency(std::size_t app, const Placement& placement, const TripartiteGraph& graph);

// Only the compute-node endpoint draws power, at its maximum rating.
double app_energy(std::size_t app, const Placement& placement, const TripartiteGraph& graph,
                  std::span<const ComputeNodeSpec> nodes);

double app_loss(std::size_t app, const Placement& placement, const TripartiteGraph& graph);

struct AppVerdict {
  bool deployed = false;
  bool latency_ok = false;      // tau <= tau_max
  bool loss_ok = false;         // loss of chosen configuration <= loss_max
  bool resource_ok = false;     // demanded rate covered, node not oversubscribed
  bool cardinality_ok = false;  // exactly one configuration and one node

  bool feasible() const { return deployed && latency_ok && loss_ok && resource_ok && cardinality_ok; }
};

struct FeasibilityReport {
  std::vector<AppVerdict> apps;

  // True when every deployed application passes all checks.
  bool feasible() const;
};

FeasibilityReport check_feasibility(const Assignment& assignment, const TripartiteGraph& graph,
                                    std::span<const AppRequirements> requirements,
                                    std::span<const ComputeNodeSpec> nodes);

double system_energy(const Assignment& assignment, const TripartiteGraph& graph,
                     std::span<const ComputeNodeSpec> nodes);

}  // namespace qag
