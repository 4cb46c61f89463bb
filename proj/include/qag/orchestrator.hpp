#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "qag/cost.hpp"
#include "qag/graph.hpp"
#include "qag/qaoa.hpp"
#include "qag/scenario.hpp"

namespace qag {

enum class SplitMethod {
  Qaoa,       // statevector simulation of the cut circuit
  Classical,  // problem above the qubit budget
  Direct,     // no admissible split; one leaf per application by candidate restriction
};

const char* to_string(SplitMethod method);

struct PartitionStep {
  std::vector<VertexId> vertices;
  std::string bitstring;  // empty for Direct
  SplitMethod method = SplitMethod::Qaoa;
  std::size_t depth = 0;
  std::vector<double> trace;
};

// Recursive bisection of the pruned graph. Each leaf holds exactly one
// application vertex; a leaf without a configuration or compute node is a
// churn leaf.
struct PartitionTree {
  std::vector<TripartiteGraph> leaves;
  std::vector<PartitionStep> steps;  // internal nodes, pre-order
  std::size_t depth = 0;

  std::size_t leaf_of(std::size_t app) const;
  bool is_churn_leaf(std::size_t leaf) const;
};

PartitionTree partition_recursive(const TripartiteGraph& pruned, const QaoaConfig& config,
                                  std::uint64_t seed);

struct Candidate {
  std::size_t config = 0;
  std::size_t node = 0;
  double energy = 0.0;   // J at full node capacity
  double latency = 0.0;  // s at full node capacity

  bool operator==(const Candidate&) const = default;
};

// Surviving (configuration, node) pairs of the leaf's application, cheapest
// first (ties: lower latency, then smaller indices). Empty means churn.
std::vector<Candidate> min_energy_path(const TripartiteGraph& leaf,
                                       std::span<const AppRequirements> requirements,
                                       std::span<const ComputeNodeSpec> nodes);

// Grants capacity in ascending application order; each application takes all
// remaining capacity of its node and falls through its ranked candidates while
// the grant would break its latency target. `ranked[h]` empty = churned.
Assignment resolve_contention(const std::vector<std::vector<Candidate>>& ranked,
                              const TripartiteGraph& graph,
                              std::span<const AppRequirements> requirements,
                              std::span<const ComputeNodeSpec> nodes);

struct AppOutcome {
  double energy = 0.0;   // J
  double latency = 0.0;  // s
  double loss = 0.0;     // MAPE %
  bool feasible = false;
};

struct OrchestrationResult {
  Assignment assignment;
  std::vector<AppOutcome> per_app;
  std::set<std::size_t> churned;
  double system_energy = 0.0;
  PartitionTree tree;  // empty for the baselines

  std::size_t served() const { return per_app.size() - churned.size(); }
};

// Fills per-app outcomes, churn set and system energy from an assignment.
// Deployed applications that miss a target are reported as churned.
OrchestrationResult summarize(const Scenario& scenario, const TripartiteGraph& graph,
                              Assignment assignment);

OrchestrationResult solve(const Scenario& scenario, const QaoaConfig& config, std::uint64_t seed);

}  // namespace qag
