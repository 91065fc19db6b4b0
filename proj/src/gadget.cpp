#include "segra/gadget.hpp"

#include <algorithm>

namespace segra {

namespace {

// Relay/sink relevance is slightly below the structural edges so the top-2
// selection reproduces the construction exactly, while vertex-node rewirings
// toward the sinks stay feasible at tau up to 0.95.
constexpr Real kStructureScore = 1.0;
constexpr Real kSinkScore = 0.95;

}  // namespace

GadgetGraph build_vertex_cover_gadget(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::vector<std::string>& extra_vertices) {
  GadgetGraph gadget;
  std::vector<std::pair<NodeId, NodeId>> endpoints;
  for (const auto& [a, b] : edges) {
    if (a == b) throw Error("gadget input has a self-loop at '" + a + "'");
    NodeId va = gadget.ids.intern(a);
    NodeId vb = gadget.ids.intern(b);
    endpoints.emplace_back(va, vb);
  }
  for (const auto& name : extra_vertices) gadget.ids.intern(name);
  const NodeId n_vertices = gadget.ids.size();
  for (NodeId v = 0; v < n_vertices; ++v) gadget.vertex_nodes.push_back(v);
  for (std::size_t e = 0; e < endpoints.size(); ++e)
    gadget.edge_nodes.push_back(gadget.ids.intern("e:" + gadget.ids.name(endpoints[e].first) +
                                                  "~" + gadget.ids.name(endpoints[e].second)));
  gadget.edge_endpoints = endpoints;
  gadget.relay_a = gadget.ids.intern("h1");
  gadget.relay_b = gadget.ids.intern("h2");
  gadget.sink_a = gadget.ids.intern("n1");
  gadget.sink_b = gadget.ids.intern("n2");

  const NodeId n = gadget.ids.size();
  std::vector<NodeLabel> labels(static_cast<std::size_t>(n), NodeLabel::Harmful);
  labels[static_cast<std::size_t>(gadget.sink_a)] = NodeLabel::Neutral;
  labels[static_cast<std::size_t>(gadget.sink_b)] = NodeLabel::Neutral;

  RelevanceStore relevance(n);
  for (NodeId v : gadget.vertex_nodes) {
    relevance.add(v, gadget.relay_a, kStructureScore);
    relevance.add(v, gadget.relay_b, kStructureScore);
    relevance.add(v, gadget.sink_a, kSinkScore);
    relevance.add(v, gadget.sink_b, kSinkScore);
  }
  for (std::size_t e = 0; e < gadget.edge_nodes.size(); ++e) {
    // edge nodes have no sink relevance: their lists are never rewired
    relevance.add(gadget.edge_nodes[e], endpoints[e].first, kStructureScore);
    relevance.add(gadget.edge_nodes[e], endpoints[e].second, kStructureScore);
  }
  relevance.add(gadget.relay_a, gadget.sink_a, kStructureScore);
  relevance.add(gadget.relay_a, gadget.sink_b, kStructureScore);
  relevance.add(gadget.relay_b, gadget.sink_a, kStructureScore);
  relevance.add(gadget.relay_b, gadget.sink_b, kStructureScore);
  // sink lists are arbitrary; sinks absorb every walk
  relevance.add(gadget.sink_a, gadget.sink_b, kStructureScore);
  relevance.add(gadget.sink_a, gadget.relay_a, kSinkScore);
  relevance.add(gadget.sink_b, gadget.sink_a, kStructureScore);
  relevance.add(gadget.sink_b, gadget.relay_a, kSinkScore);
  relevance.finalize();

  RecGraph graph = build_top_d_graph(relevance, labels, 2, RankDiscount::make(DiscountKind::Uniform, 2));
  gadget.relevance = std::move(relevance);
  gadget.graph = std::move(graph);
  return gadget;
}

std::vector<RewiringOp> cover_rewirings(const GadgetGraph& gadget,
                                        const std::vector<NodeId>& cover_vertices) {
  std::vector<RewiringOp> ops;
  ops.reserve(cover_vertices.size());
  for (NodeId v : cover_vertices) {
    int rank = gadget.graph.out_list(v).rank_of(gadget.relay_a);
    if (rank == 0) throw Error("cover vertex " + std::to_string(v) + " no longer lists relay h1");
    ops.push_back({v, gadget.relay_a, gadget.sink_a, gadget.graph.discount().at(rank), rank});
  }
  return ops;
}

namespace {

void cover_search(const std::vector<std::pair<int, int>>& edges, std::vector<char>& in_cover,
                  std::size_t edge_index, int used, int& best, std::vector<int>& best_cover,
                  int n_vertices) {
  if (used >= best) return;
  // find the first uncovered edge
  while (edge_index < edges.size()) {
    const auto& [a, b] = edges[edge_index];
    if (!in_cover[static_cast<std::size_t>(a)] && !in_cover[static_cast<std::size_t>(b)]) break;
    ++edge_index;
  }
  if (edge_index == edges.size()) {
    best = used;
    best_cover.clear();
    for (int v = 0; v < n_vertices; ++v)
      if (in_cover[static_cast<std::size_t>(v)]) best_cover.push_back(v);
    return;
  }
  const auto& [a, b] = edges[edge_index];
  in_cover[static_cast<std::size_t>(a)] = 1;
  cover_search(edges, in_cover, edge_index + 1, used + 1, best, best_cover, n_vertices);
  in_cover[static_cast<std::size_t>(a)] = 0;
  in_cover[static_cast<std::size_t>(b)] = 1;
  cover_search(edges, in_cover, edge_index + 1, used + 1, best, best_cover, n_vertices);
  in_cover[static_cast<std::size_t>(b)] = 0;
}

}  // namespace

std::vector<int> minimum_vertex_cover(int n_vertices,
                                      const std::vector<std::pair<int, int>>& edges) {
  std::vector<char> in_cover(static_cast<std::size_t>(n_vertices), 0);
  int best = n_vertices + 1;
  std::vector<int> best_cover;
  cover_search(edges, in_cover, 0, 0, best, best_cover, n_vertices);
  if (best > n_vertices) best_cover.clear();  // no edges
  return best_cover;
}

}  // namespace segra
