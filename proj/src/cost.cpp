#include "qag/cost.hpp"

#include <cmath>
#include <map>

#include "qag/error.hpp"

namespace qag {

namespace {

// Relative slack for comparisons against targets and capacities, so that a
// rate of exactly cost / latency_max is not rejected by rounding.
constexpr double kRelTol = 1e-9;

bool within(double value, double limit) { return value <= limit * (1.0 + kRelTol); }

const AppWeight& weight_or_throw(const TripartiteGraph& graph, VertexId a, VertexId b,
                                 std::size_t app) {
  const auto* w = graph.find_weight(a, b, app);
  if (w == nullptr) {
    throw invalid_argument("no weight for application " + std::to_string(app + 1) + " on edge " +
                           to_string(a) + "-" + to_string(b));
  }
  return *w;
}

VertexId app_vertex(std::size_t app) { return {VertexClass::Application, app}; }
VertexId config_vertex(std::size_t c) { return {VertexClass::Configuration, c}; }
VertexId node_vertex(std::size_t n) { return {VertexClass::ComputeNode, n}; }

}  // namespace

double edge_time(double cost, double rate) {
  if (!(rate > 0.0)) throw invalid_argument("edge_time: rate must be positive");
  if (std::isinf(rate)) return 0.0;
  return cost / rate;
}

double app_latency(std::size_t app, const Placement& placement, const TripartiteGraph& graph) {
  const auto& first = weight_or_throw(graph, app_vertex(app), config_vertex(placement.config), app);
  const auto& second =
      weight_or_throw(graph, config_vertex(placement.config), node_vertex(placement.node), app);
  return edge_time(first.cost, kUnboundedRate) + edge_time(second.cost, placement.rate);
}

double app_energy(std::size_t app, const Placement& placement, const TripartiteGraph& graph,
                  std::span<const ComputeNodeSpec> nodes) {
  weight_or_throw(graph, app_vertex(app), config_vertex(placement.config), app);
  const auto& second =
      weight_or_throw(graph, config_vertex(placement.config), node_vertex(placement.node), app);
  if (placement.node >= nodes.size()) throw invalid_argument("app_energy: unknown node");
  // The (h, s) hop has unbounded rate and a powerless endpoint, so only the
  // compute node contributes.
  return edge_time(second.cost, placement.rate) * nodes[placement.node].max_power;
}

double app_loss(std::size_t app, const Placement& placement, const TripartiteGraph& graph) {
  return weight_or_throw(graph, app_vertex(app), config_vertex(placement.config), app).loss;
}

bool FeasibilityReport::feasible() const {
  for (const auto& v : apps) {
    if (v.deployed && !v.feasible()) return false;
  }
  return true;
}

FeasibilityReport check_feasibility(const Assignment& assignment, const TripartiteGraph& graph,
                                    std::span<const AppRequirements> requirements,
                                    std::span<const ComputeNodeSpec> nodes) {
  if (assignment.rows.size() != requirements.size()) {
    throw invalid_argument("check_feasibility: assignment and requirements differ in size");
  }
  std::map<std::size_t, double> granted;
  for (const auto& row : assignment.rows) {
    if (row && row->node < nodes.size()) granted[row->node] += row->rate;
  }

  FeasibilityReport report;
  report.apps.resize(assignment.rows.size());
  for (std::size_t h = 0; h < assignment.rows.size(); ++h) {
    const auto& row = assignment.rows[h];
    auto& verdict = report.apps[h];
    if (!row) continue;
    verdict.deployed = true;
    const auto* first = graph.find_weight(app_vertex(h), config_vertex(row->config), h);
    const auto* second =
        graph.find_weight(config_vertex(row->config), node_vertex(row->node), h);
    verdict.cardinality_ok = first != nullptr && second != nullptr && row->node < nodes.size();
    if (!verdict.cardinality_ok) continue;

    const auto& req = requirements[h];
    const auto& node = nodes[row->node];
    verdict.loss_ok = within(first->loss, req.loss_max);
    const bool rate_positive = row->rate > 0.0;
    verdict.latency_ok = rate_positive && within(app_latency(h, *row, graph), req.latency_max);
    const double demanded = second->cost / req.latency_max;
    verdict.resource_ok = rate_positive && within(demanded, row->rate) &&
                          within(row->rate, node.capacity) &&
                          within(granted[row->node], node.capacity);
  }
  return report;
}

double system_energy(const Assignment& assignment, const TripartiteGraph& graph,
                     std::span<const ComputeNodeSpec> nodes) {
  double total = 0.0;
  for (std::size_t h = 0; h < assignment.rows.size(); ++h) {
    if (assignment.rows[h]) total += app_energy(h, *assignment.rows[h], graph, nodes);
  }
  return total;
}

}  // namespace qag
