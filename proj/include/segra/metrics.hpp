#pragma once

#include <string>
#include <utility>
#include <vector>

#include "segra/absorbing.hpp"
#include "segra/graph.hpp"
#include "segra/io.hpp"
#include "segra/rewire.hpp"

namespace segra {

// Per-harmful-node z normalized by the initial graph segregation.
struct DistributionSnapshot {
  std::vector<std::pair<NodeId, Real>> values;  // ascending node id
  Real mean = 0;
  Real median = 0;
  Real p90 = 0;
  Real max = 0;
  std::size_t count = 0;
};

DistributionSnapshot snapshot_distribution(const SegregationState& state, Real z0_max);

enum class NodeSubset { Harmful, Neutral, All };

// Gini of the in-degree multiset over the subset, sorted-rank formula
// g = 2 * sum(i * x_i) / (n * sum(x)) - (n + 1) / n with zero-degree nodes
// included; 0 on a zero sum.
Real gini_in_degree(const RecGraph& graph, NodeSubset subset);

struct QualityAudit {
  std::vector<std::pair<NodeId, Real>> loss;  // per node, ascending id
  Real min_loss = 1.0;
  std::size_t violations = 0;
  std::vector<NodeId> violating;
};

// Recomputes every node's quality loss from the relevance store.
QualityAudit quality_audit(const RecGraph& graph, const RelevanceStore& relevance, Real tau);

// CSV `step,u,v,w,rank,p_o,delta,Z,ratio,wall_time_ms`; byte-stable for a
// fixed trace.
void export_trace(const OptimizationTrace& trace, const IdMap& ids, const std::string& path);

// CSV `node,z_normalized` plus a JSON summary {mean, median, p90, max, count}.
void export_distribution(const DistributionSnapshot& snapshot, const IdMap& ids,
                         const std::string& csv_path, const std::string& json_path);

}  // namespace segra
