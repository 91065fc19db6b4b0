#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "segra/absorbing.hpp"
#include "segra/graph.hpp"
#include "segra/rewire.hpp"
#include "segra/synthetic.hpp"

namespace segra::testing {

struct Instance {
  std::vector<NodeLabel> labels;
  RelevanceStore relevance;
  RecGraph graph;
};

inline Instance build_instance(NodeId n, int d, Real harmful_fraction, int pool,
                               std::uint64_t seed,
                               DiscountKind kind = DiscountKind::Uniform) {
  SyntheticInstance raw = make_random_instance(n, d, harmful_fraction, pool, seed);
  RecGraph graph = build_top_d_graph(raw.relevance, raw.labels, d, RankDiscount::make(kind, d));
  return {std::move(raw.labels), std::move(raw.relevance), std::move(graph)};
}

// Some random seeds produce closed harmful components; tests skip those.
inline std::optional<Instance> build_valid_instance(NodeId n, int d, Real harmful_fraction,
                                                    int pool, std::uint64_t seed,
                                                    DiscountKind kind = DiscountKind::Uniform) {
  Instance instance = build_instance(n, d, harmful_fraction, pool, seed, kind);
  if (!unreachable_harmful_nodes(instance.graph).empty()) return std::nullopt;
  return instance;
}

inline Instance build_homophilous(NodeId n, int d, Real within, int pool, std::uint64_t seed) {
  SyntheticInstance raw = make_homophilous_instance(n, d, within, pool, seed);
  RecGraph graph = build_top_d_graph(raw.relevance, raw.labels, d,
                                     RankDiscount::make(DiscountKind::Uniform, d));
  return {std::move(raw.labels), std::move(raw.relevance), std::move(graph)};
}

// Dense fundamental matrix (I - M)^-1; the independent oracle for columns,
// rows and hitting lengths on small graphs.
inline Eigen::MatrixXd dense_fundamental(const AbsorbingView& view) {
  Eigen::Index n = view.transitions.rows();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  system -= Eigen::MatrixXd(view.transitions);
  return system.inverse();
}

// Unpruned objective: probe every harmful node.
inline Real full_delta(const RewiringOp& op, SegregationState& state) {
  const auto& view = state.view();
  const auto& z = state.z();
  const Eigen::VectorXd& col = state.column(op.source);
  int lv = view.local_of(op.removed);
  Real denom = 1.0 / op.prob + col[lv];
  Real z_v = z[lv];
  Real before = 0, after = 0;
  for (int i = 0; i < view.count(); ++i) {
    before = std::max(before, z[i]);
    after = std::max(after, z[i] - col[i] * z_v / denom);
  }
  return before - after;
}

}  // namespace segra::testing
