#pragma once

#include <string>
#include <utility>
#include <vector>

#include "segra/graph.hpp"
#include "segra/io.hpp"
#include "segra/rewire.hpp"

namespace segra {

// Reduction fixture built from a small undirected graph: one harmful node per
// vertex and per edge, two harmful relay nodes, two neutral sinks. Every node
// has out-degree 2 with uniform probability 0.5, so the segregation pattern
// is exactly z(relay)=1, z(vertex)=2, z(edge)=3.
struct GadgetGraph {
  RecGraph graph;
  RelevanceStore relevance;
  IdMap ids;
  std::vector<NodeId> vertex_nodes;
  std::vector<NodeId> edge_nodes;
  std::vector<std::pair<NodeId, NodeId>> edge_endpoints;  // per edge node
  NodeId relay_a = -1, relay_b = -1;
  NodeId sink_a = -1, sink_b = -1;
};

// Vertices are interned in order of first appearance; isolated vertices may
// be listed as a self-free token list.
GadgetGraph build_vertex_cover_gadget(const std::vector<std::pair<std::string, std::string>>& edges,
                                      const std::vector<std::string>& extra_vertices = {});

// One rewiring per covered vertex: its relay_a slot is redirected to sink_a.
std::vector<RewiringOp> cover_rewirings(const GadgetGraph& gadget,
                                        const std::vector<NodeId>& cover_vertices);

// Exact minimum vertex cover by branch and bound; vertices are 0..n-1.
// Intended for fixture-sized graphs.
std::vector<int> minimum_vertex_cover(int n_vertices,
                                      const std::vector<std::pair<int, int>>& edges);

}  // namespace segra
