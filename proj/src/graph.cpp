#include "qag/graph.hpp"

#include <algorithm>

#include "qag/error.hpp"

namespace qag {

const char* to_string(VertexClass cls) {
  switch (cls) {
    case VertexClass::Application:
      return "application";
    case VertexClass::Configuration:
      return "configuration";
    case VertexClass::ComputeNode:
      return "compute-node";
  }
  return "?";
}

std::string to_string(VertexId v) {
  static constexpr char kPrefix[] = {'h', 's', 'n'};
  return kPrefix[static_cast<int>(v.cls)] + std::to_string(v.index + 1);
}

EdgeKey make_edge_key(VertexId a, VertexId b) {
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

namespace {

bool admitted_pair(const EdgeKey& key) {
  return (key.first.cls == VertexClass::Application &&
          key.second.cls == VertexClass::Configuration) ||
         (key.first.cls == VertexClass::Configuration &&
          key.second.cls == VertexClass::ComputeNode);
}

}  // namespace

TripartiteGraph::TripartiteGraph(std::vector<VertexId> vertices,
                                 std::map<EdgeKey, EdgeWeight> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  std::sort(vertices_.begin(), vertices_.end());
  if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end()) {
    throw invalid_argument("duplicate vertex in graph");
  }
  for (const auto& [key, weight] : edges_) {
    if (!admitted_pair(key)) {
      throw invalid_argument("edge " + to_string(key.first) + "-" + to_string(key.second) +
                             " joins a pair of classes that cannot be adjacent");
    }
    if (!contains(key.first) || !contains(key.second)) {
      throw invalid_argument("edge " + to_string(key.first) + "-" + to_string(key.second) +
                             " references a vertex outside the graph");
    }
    for (const auto& [app, w] : weight.per_app) {
      if (w.cost < 0.0 || w.loss < 0.0) {
        throw invalid_argument("negative edge weight on " + to_string(key.first) + "-" +
                               to_string(key.second));
      }
    }
  }
}

bool TripartiteGraph::contains(VertexId v) const {
  return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

bool TripartiteGraph::has_edge(VertexId a, VertexId b) const {
  return edges_.count(make_edge_key(a, b)) != 0;
}

const EdgeWeight* TripartiteGraph::find_edge(VertexId a, VertexId b) const {
  const auto it = edges_.find(make_edge_key(a, b));
  return it == edges_.end() ? nullptr : &it->second;
}

const AppWeight* TripartiteGraph::find_weight(VertexId a, VertexId b, std::size_t app) const {
  const auto* edge = find_edge(a, b);
  if (edge == nullptr) return nullptr;
  const auto it = edge->per_app.find(app);
  return it == edge->per_app.end() ? nullptr : &it->second;
}

std::vector<VertexId> TripartiteGraph::vertices_of(VertexClass cls) const {
  std::vector<VertexId> out;
  for (const auto& v : vertices_) {
    if (v.cls == cls) out.push_back(v);
  }
  return out;
}

std::size_t TripartiteGraph::count(VertexClass cls) const {
  return static_cast<std::size_t>(
      std::count_if(vertices_.begin(), vertices_.end(), [cls](VertexId v) { return v.cls == cls; }));
}

TripartiteGraph build_graph(const Scenario& scenario) {
  scenario.validate();
  const auto apps = scenario.applications.size();
  const auto configs = scenario.configurations.size();
  const auto nodes = scenario.nodes.size();

  std::vector<VertexId> vertices;
  vertices.reserve(apps + configs + nodes);
  for (std::size_t i = 0; i < apps; ++i) vertices.push_back({VertexClass::Application, i});
  for (std::size_t i = 0; i < configs; ++i) vertices.push_back({VertexClass::Configuration, i});
  for (std::size_t i = 0; i < nodes; ++i) vertices.push_back({VertexClass::ComputeNode, i});

  std::map<EdgeKey, EdgeWeight> edges;
  for (std::size_t a = 0; a < apps; ++a) {
    for (std::size_t c = 0; c < configs; ++c) {
      const auto& p = scenario.profile(a, c);
      edges[make_edge_key({VertexClass::Application, a}, {VertexClass::Configuration, c})]
          .per_app[a] = AppWeight{p.cost, p.loss};
    }
  }
  // Configuration-node edges carry every application's weight for that
  // configuration.
  for (std::size_t c = 0; c < configs; ++c) {
    for (std::size_t n = 0; n < nodes; ++n) {
      auto& weight =
          edges[make_edge_key({VertexClass::Configuration, c}, {VertexClass::ComputeNode, n})];
      for (std::size_t a = 0; a < apps; ++a) {
        const auto& p = scenario.profile(a, c);
        weight.per_app[a] = AppWeight{p.cost, p.loss};
      }
    }
  }
  return TripartiteGraph(std::move(vertices), std::move(edges));
}

TripartiteGraph prune_edges(const TripartiteGraph& graph,
                            std::span<const AppRequirements> requirements,
                            std::span<const ComputeNodeSpec> nodes) {
  std::map<EdgeKey, EdgeWeight> kept;
  for (const auto& [key, weight] : graph.edges()) {
    EdgeWeight survivor;
    for (const auto& [app, w] : weight.per_app) {
      if (app >= requirements.size()) {
        throw invalid_argument("prune_edges: no requirements for application " +
                               std::to_string(app));
      }
      if (key.second.cls == VertexClass::ComputeNode && key.second.index >= nodes.size()) {
        throw invalid_argument("prune_edges: no spec for node " + to_string(key.second));
      }
      const auto& req = requirements[app];
      bool feasible = true;
      if (key.first.cls == VertexClass::Application) {
        feasible = !(w.loss > req.loss_max);
      } else {
        const auto& node = nodes[key.second.index];
        if (!(node.capacity > 0.0)) {
          throw invalid_argument("node " + node.id + " has non-positive capacity");
        }
        feasible = !(w.cost / node.capacity > req.latency_max);
      }
      if (feasible) survivor.per_app.emplace(app, w);
    }
    if (!survivor.per_app.empty()) kept.emplace(key, std::move(survivor));
  }
  return TripartiteGraph(graph.vertices(), std::move(kept));
}

ComplementEdgeList complement(const TripartiteGraph& graph) {
  ComplementEdgeList out;
  out.vertices = graph.vertices();
  const auto n = out.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!graph.has_edge(out.vertices[i], out.vertices[j])) out.edges.emplace_back(i, j);
    }
  }
  return out;
}

TripartiteGraph induced_subgraph(const TripartiteGraph& graph, std::span<const VertexId> subset) {
  if (subset.empty()) throw invalid_argument("induced_subgraph: empty vertex subset");
  std::vector<VertexId> vertices(subset.begin(), subset.end());
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  for (const auto& v : vertices) {
    if (!graph.contains(v)) {
      throw invalid_argument("induced_subgraph: vertex " + to_string(v) + " is not in the graph");
    }
  }
  std::map<EdgeKey, EdgeWeight> edges;
  for (const auto& [key, weight] : graph.edges()) {
    if (std::binary_search(vertices.begin(), vertices.end(), key.first) &&
        std::binary_search(vertices.begin(), vertices.end(), key.second)) {
      edges.emplace(key, weight);
    }
  }
  return TripartiteGraph(std::move(vertices), std::move(edges));
}

}  // namespace qag
