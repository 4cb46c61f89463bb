#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qag/scenario.hpp"

namespace qag {

enum class VertexClass : unsigned char { Application = 0, Configuration = 1, ComputeNode = 2 };

const char* to_string(VertexClass cls);

// A vertex is identified by its class and its index within that class in the
// source scenario. Ordering (class first, then index) is the global qubit
// order: applications, then configurations, then compute nodes.
struct VertexId {
  VertexClass cls = VertexClass::Application;
  std::size_t index = 0;

  auto operator<=>(const VertexId&) const = default;
};

std::string to_string(VertexId v);

struct AppWeight {
  double cost = 0.0;  // tera-operations
  double loss = 0.0;  // MAPE percent

  bool operator==(const AppWeight&) const = default;
};

// Per-application weights carried by one edge. An application missing from
// the map has had this edge pruned from its candidate set.
struct EdgeWeight {
  std::map<std::size_t, AppWeight> per_app;

  bool operator==(const EdgeWeight&) const = default;
};

// Endpoints ordered so that first < second.
using EdgeKey = std::pair<VertexId, VertexId>;

EdgeKey make_edge_key(VertexId a, VertexId b);

// Application / configuration / compute-node graph. Edges only join
// (application, configuration) and (configuration, compute node) pairs.
class TripartiteGraph {
 public:
  TripartiteGraph() = default;
  // Vertices are sorted into global order; edges must join admitted class
  // pairs between listed vertices.
  TripartiteGraph(std::vector<VertexId> vertices, std::map<EdgeKey, EdgeWeight> edges);

  const std::vector<VertexId>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const std::map<EdgeKey, EdgeWeight>& edges() const { return edges_; }

  bool contains(VertexId v) const;
  bool has_edge(VertexId a, VertexId b) const;
  const EdgeWeight* find_edge(VertexId a, VertexId b) const;
  // Weight of edge (a, b) for `app`, or nullptr when absent or pruned for it.
  const AppWeight* find_weight(VertexId a, VertexId b, std::size_t app) const;

  std::vector<VertexId> vertices_of(VertexClass cls) const;
  std::size_t count(VertexClass cls) const;

  bool operator==(const TripartiteGraph&) const = default;

 private:
  std::vector<VertexId> vertices_;
  std::map<EdgeKey, EdgeWeight> edges_;
};

// Complement over the same vertex set. `edges` holds positions into
// `vertices`, which is the qubit numbering used by the cut engine.
struct ComplementEdgeList {
  std::vector<VertexId> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

TripartiteGraph build_graph(const Scenario& scenario);

// Removes each edge from the candidate set of every application it is
// infeasible for: (h, s) when loss exceeds loss_max, (s, n) when
// cost / capacity(n) exceeds latency_max. An edge is deleted once no
// application keeps it.
TripartiteGraph prune_edges(const TripartiteGraph& graph,
                            std::span<const AppRequirements> requirements,
                            std::span<const ComputeNodeSpec> nodes);

ComplementEdgeList complement(const TripartiteGraph& graph);

TripartiteGraph induced_subgraph(const TripartiteGraph& graph, std::span<const VertexId> subset);

}  // namespace qag
