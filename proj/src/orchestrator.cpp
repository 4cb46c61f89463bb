#include "qag/orchestrator.hpp"

#include <algorithm>
#include <tuple>

#include "qag/error.hpp"
#include "qag/rng.hpp"

namespace qag {

const char* to_string(SplitMethod method) {
  switch (method) {
    case SplitMethod::Qaoa:
      return "qaoa";
    case SplitMethod::Classical:
      return "classical";
    case SplitMethod::Direct:
      return "direct";
  }
  return "?";
}

std::size_t PartitionTree::leaf_of(std::size_t app) const {
  const VertexId v{VertexClass::Application, app};
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i].contains(v)) return i;
  }
  throw invalid_argument("application " + std::to_string(app + 1) + " is in no leaf");
}

bool PartitionTree::is_churn_leaf(std::size_t leaf) const {
  const auto& g = leaves.at(leaf);
  return g.count(VertexClass::Configuration) == 0 || g.count(VertexClass::ComputeNode) == 0;
}

namespace {

constexpr double kLatencySlack = 1e-9;

class Partitioner {
 public:
  Partitioner(const QaoaConfig& config, PartitionTree& tree) : config_(config), tree_(tree) {}

  void run(const TripartiteGraph& graph, std::size_t depth, std::uint64_t seed) {
    tree_.depth = std::max(tree_.depth, depth);
    const auto apps = graph.vertices_of(VertexClass::Application);
    if (apps.size() <= 1) {
      if (apps.size() == 1) tree_.leaves.push_back(graph);
      return;
    }

    const auto problem = make_cut_problem(complement(graph));
    PartitionChoice choice;
    try {
      choice = choose_partition(problem, config_, seed);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Partition) throw;
      split_directly(graph, depth);
      return;
    }

    std::vector<VertexId> sides[2];
    for (std::size_t q = 0; q < problem.n; ++q) {
      sides[choice.bitstring[q] == '1' ? 1 : 0].push_back(graph.vertices()[q]);
    }
    const auto apps_on = [](const std::vector<VertexId>& side) {
      return std::count_if(side.begin(), side.end(),
                           [](VertexId v) { return v.cls == VertexClass::Application; });
    };
    // An application-free side would be merged back into its sibling, which
    // just reproduces this graph; treat it like a failed split.
    if (apps_on(sides[0]) == 0 || apps_on(sides[1]) == 0) {
      split_directly(graph, depth);
      return;
    }

    tree_.steps.push_back(PartitionStep{graph.vertices(), choice.bitstring,
                                        choice.method == CutMethod::Qaoa ? SplitMethod::Qaoa
                                                                         : SplitMethod::Classical,
                                        depth, std::move(choice.trace)});
    for (int side = 0; side < 2; ++side) {
      run(induced_subgraph(graph, sides[side]), depth + 1,
          derive_seed(seed, static_cast<std::uint64_t>(side) + 1));
    }
  }

 private:
  // Every application keeps exactly the configurations and nodes it still
  // has candidate edges to.
  void split_directly(const TripartiteGraph& graph, std::size_t depth) {
    tree_.steps.push_back(PartitionStep{graph.vertices(), "", SplitMethod::Direct, depth, {}});
    tree_.depth = std::max(tree_.depth, depth + 1);
    const auto configs = graph.vertices_of(VertexClass::Configuration);
    const auto nodes = graph.vertices_of(VertexClass::ComputeNode);
    for (const auto& app : graph.vertices_of(VertexClass::Application)) {
      std::vector<VertexId> keep{app};
      for (const auto& c : configs) {
        if (graph.find_weight(app, c, app.index) == nullptr) continue;
        keep.push_back(c);
        for (const auto& n : nodes) {
          if (graph.find_weight(c, n, app.index) != nullptr) keep.push_back(n);
        }
      }
      tree_.leaves.push_back(induced_subgraph(graph, keep));
    }
  }

  const QaoaConfig& config_;
  PartitionTree& tree_;
};

}  // namespace

PartitionTree partition_recursive(const TripartiteGraph& pruned, const QaoaConfig& config,
                                  std::uint64_t seed) {
  if (pruned.count(VertexClass::Application) == 0) {
    throw invalid_argument("partition_recursive: graph has no application vertex");
  }
  PartitionTree tree;
  Partitioner(config, tree).run(pruned, 0, seed);
  return tree;
}

std::vector<Candidate> min_energy_path(const TripartiteGraph& leaf,
                                       std::span<const AppRequirements> requirements,
                                       std::span<const ComputeNodeSpec> nodes) {
  const auto apps = leaf.vertices_of(VertexClass::Application);
  if (apps.size() != 1) throw invalid_argument("min_energy_path: leaf must hold one application");
  const auto app = apps.front();
  const auto& req = requirements[app.index];

  std::vector<Candidate> out;
  for (const auto& c : leaf.vertices_of(VertexClass::Configuration)) {
    const auto* first = leaf.find_weight(app, c, app.index);
    if (first == nullptr || first->loss > req.loss_max * (1.0 + kLatencySlack)) continue;
    for (const auto& n : leaf.vertices_of(VertexClass::ComputeNode)) {
      const auto* second = leaf.find_weight(c, n, app.index);
      if (second == nullptr) continue;
      const auto& spec = nodes[n.index];
      const double latency = edge_time(second->cost, spec.capacity);
      if (latency > req.latency_max * (1.0 + kLatencySlack)) continue;
      out.push_back(Candidate{c.index, n.index, latency * spec.max_power, latency});
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.energy, a.latency, a.config, a.node) <
           std::tie(b.energy, b.latency, b.config, b.node);
  });
  return out;
}

Assignment resolve_contention(const std::vector<std::vector<Candidate>>& ranked,
                              const TripartiteGraph& graph,
                              std::span<const AppRequirements> requirements,
                              std::span<const ComputeNodeSpec> nodes) {
  std::vector<double> remaining;
  for (const auto& n : nodes) remaining.push_back(n.capacity);

  Assignment assignment;
  assignment.rows.resize(ranked.size());
  for (std::size_t h = 0; h < ranked.size(); ++h) {
    for (const auto& cand : ranked[h]) {
      const double rate = std::min(remaining.at(cand.node), nodes[cand.node].capacity);
      if (!(rate > 0.0)) continue;
      const Placement placement{cand.config, cand.node, rate};
      if (app_latency(h, placement, graph) > requirements[h].latency_max * (1.0 + kLatencySlack)) {
        continue;
      }
      assignment.rows[h] = placement;
      remaining[cand.node] -= rate;
      break;
    }
  }
  return assignment;
}

OrchestrationResult summarize(const Scenario& scenario, const TripartiteGraph& graph,
                              Assignment assignment) {
  OrchestrationResult result;
  const auto report =
      check_feasibility(assignment, graph, scenario.applications, scenario.nodes);
  result.per_app.resize(assignment.rows.size());
  for (std::size_t h = 0; h < assignment.rows.size(); ++h) {
    const auto& row = assignment.rows[h];
    auto& out = result.per_app[h];
    if (row) {
      out.energy = app_energy(h, *row, graph, scenario.nodes);
      out.latency = app_latency(h, *row, graph);
      out.loss = app_loss(h, *row, graph);
    }
    out.feasible = report.apps[h].feasible();
    if (!out.feasible) result.churned.insert(h);
  }
  result.system_energy = system_energy(assignment, graph, scenario.nodes);
  result.assignment = std::move(assignment);
  return result;
}

OrchestrationResult solve(const Scenario& scenario, const QaoaConfig& config, std::uint64_t seed) {
  const auto full = build_graph(scenario);
  const auto pruned = prune_edges(full, scenario.applications, scenario.nodes);
  auto tree = partition_recursive(pruned, config, seed);

  std::vector<std::vector<Candidate>> ranked(scenario.applications.size());
  for (std::size_t h = 0; h < ranked.size(); ++h) {
    ranked[h] = min_energy_path(tree.leaves[tree.leaf_of(h)], scenario.applications, scenario.nodes);
  }
  auto result = summarize(scenario, full,
                          resolve_contention(ranked, full, scenario.applications, scenario.nodes));
  result.tree = std::move(tree);
  return result;
}

}  // namespace qag
