#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "segra/discount.hpp"
#include "segra/relevance.hpp"
#include "segra/types.hpp"

namespace segra {

// One rewiring: drop edge (source, removed), insert (source, inserted) at the
// same list rank, transferring the slot probability. source and removed are
// harmful, inserted is neutral.
struct RewiringOp {
  NodeId source = -1;
  NodeId removed = -1;
  NodeId inserted = -1;
  Real prob = 0;
  int rank = 0;
};

inline bool lex_less(const RewiringOp& a, const RewiringOp& b) {
  return std::tie(a.source, a.removed, a.inserted) < std::tie(b.source, b.removed, b.inserted);
}

std::string to_string(const RewiringOp& op);

struct Slot {
  NodeId item;
  Real score;
};

// Ranks are 1-based slot indices. The original list is score-descending;
// rewired lists keep the replaced slot's rank, so order may break later.
struct RecommendationList {
  NodeId owner = -1;
  std::vector<Slot> slots;

  bool contains(NodeId item) const;
  // 1-based rank, or 0 when absent.
  int rank_of(NodeId item) const;
};

class RecGraph {
 public:
  RecGraph() = default;  // empty graph
  RecGraph(std::vector<NodeLabel> labels, std::vector<RecommendationList> lists,
           RankDiscount discount);

  NodeId node_count() const { return static_cast<NodeId>(labels_.size()); }
  int degree() const { return discount_.degree(); }
  const RankDiscount& discount() const { return discount_; }

  NodeLabel label(NodeId node) const { return labels_[static_cast<std::size_t>(node)]; }
  bool is_harmful(NodeId node) const { return label(node) == NodeLabel::Harmful; }
  const std::vector<NodeLabel>& labels() const { return labels_; }

  const RecommendationList& out_list(NodeId node) const {
    return lists_[static_cast<std::size_t>(node)];
  }
  Real ideal_dcg(NodeId node) const { return ideal_dcg_[static_cast<std::size_t>(node)]; }

  std::vector<NodeId> harmful_nodes() const;  // ascending
  NodeId harmful_count() const;
  std::vector<NodeId> in_degrees() const;

  // Exclusive access required; all read paths are safe concurrently.
  friend void apply_rewiring(RecGraph& graph, const RelevanceStore& relevance,
                             const RewiringOp& op);

 private:
  friend void detail_replace_slot(RecGraph&, NodeId, int, NodeId, Real);
  std::vector<NodeLabel> labels_;
  std::vector<RecommendationList> lists_;
  RankDiscount discount_;
  std::vector<Real> ideal_dcg_;
};

// Builds the graph whose lists are the d highest-scored items per node,
// score-descending, ties broken by ascending node id. Every node needs at
// least d positive-relevance candidates.
RecGraph build_top_d_graph(const RelevanceStore& relevance, const std::vector<NodeLabel>& labels,
                           int d, const RankDiscount& discount);

Real transition_probability(const RecGraph& graph, NodeId u, NodeId v);

// Sum over slots of score / (1 + log2(1 + rank)).
Real dcg(const RecommendationList& list);

// nDCG of the current list against the node's original list; 1.0 when unrewired.
Real quality_loss(const RecommendationList& list, const RecGraph& graph);

void apply_rewiring(RecGraph& graph, const RelevanceStore& relevance, const RewiringOp& op);

struct ValidationReport {
  std::vector<std::string> issues;
  std::vector<NodeId> unreachable_harmful;
  bool degrees_ok = true;
  bool probabilities_ok = true;
  bool reachability_ok = true;

  bool ok() const { return degrees_ok && probabilities_ok && reachability_ok && issues.empty(); }
  std::string to_string() const;
};

ValidationReport validate_graph(const RecGraph& graph);

// Harmful nodes with no path to any neutral node (empty when reachability holds).
std::vector<NodeId> unreachable_harmful_nodes(const RecGraph& graph);

// Raw slot replacement without rewiring preconditions; graph loading and
// structural tests only.
void detail_replace_slot(RecGraph& graph, NodeId u, int rank, NodeId item, Real score);

}  // namespace segra
