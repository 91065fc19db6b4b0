#include "segra/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace segra {

std::string to_string(const RewiringOp& op) {
  std::ostringstream out;
  out << "(" << op.source << "," << op.removed << "," << op.inserted << ")@rank" << op.rank;
  return out.str();
}

bool RecommendationList::contains(NodeId item) const {
  for (const auto& slot : slots)
    if (slot.item == item) return true;
  return false;
}

int RecommendationList::rank_of(NodeId item) const {
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (slots[i].item == item) return static_cast<int>(i) + 1;
  return 0;
}

Real dcg(const RecommendationList& list) {
  Real total = 0;
  for (std::size_t i = 0; i < list.slots.size(); ++i)
    total += list.slots[i].score * dcg_weight(static_cast<int>(i) + 1);
  return total;
}

Real quality_loss(const RecommendationList& list, const RecGraph& graph) {
  Real ideal = graph.ideal_dcg(list.owner);
  if (!(ideal > 0)) throw ZeroIdealDcg(list.owner);
  return dcg(list) / ideal;
}

RecGraph::RecGraph(std::vector<NodeLabel> labels, std::vector<RecommendationList> lists,
                   RankDiscount discount)
    : labels_(std::move(labels)), lists_(std::move(lists)), discount_(std::move(discount)) {
  if (labels_.size() != lists_.size())
    throw Error("label and list counts differ: " + std::to_string(labels_.size()) + " vs " +
                std::to_string(lists_.size()));
  ideal_dcg_.reserve(lists_.size());
  for (const auto& list : lists_) ideal_dcg_.push_back(dcg(list));
}

std::vector<NodeId> RecGraph::harmful_nodes() const {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < node_count(); ++u)
    if (is_harmful(u)) out.push_back(u);
  return out;
}

NodeId RecGraph::harmful_count() const {
  NodeId count = 0;
  for (auto label : labels_)
    if (label == NodeLabel::Harmful) ++count;
  return count;
}

std::vector<NodeId> RecGraph::in_degrees() const {
  std::vector<NodeId> degrees(labels_.size(), 0);
  for (const auto& list : lists_)
    for (const auto& slot : list.slots) ++degrees[static_cast<std::size_t>(slot.item)];
  return degrees;
}

RecGraph build_top_d_graph(const RelevanceStore& relevance, const std::vector<NodeLabel>& labels,
                           int d, const RankDiscount& discount) {
  if (discount.degree() != d) throw ConfigError("discount table size does not match d");
  const NodeId n = static_cast<NodeId>(labels.size());
  std::vector<RecommendationList> lists(static_cast<std::size_t>(n));
  std::vector<RelevanceStore::Entry> pool;
  for (NodeId u = 0; u < n; ++u) {
    pool.clear();
    for (const auto& entry : relevance.row(u)) {
      if (entry.item >= n)
        throw Error("relevance entry (" + std::to_string(u) + "," + std::to_string(entry.item) +
                    ") references an unlabeled node");
      if (entry.score > 0) pool.push_back(entry);
    }
    if (static_cast<int>(pool.size()) < d)
      throw TooFewCandidates(u, static_cast<int>(pool.size()), d);
    std::partial_sort(pool.begin(), pool.begin() + d, pool.end(),
                      [](const RelevanceStore::Entry& a, const RelevanceStore::Entry& b) {
                        if (a.score != b.score) return a.score > b.score;
                        return a.item < b.item;
                      });
    auto& list = lists[static_cast<std::size_t>(u)];
    list.owner = u;
    list.slots.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) list.slots.push_back({pool[static_cast<std::size_t>(i)].item,
                                                      pool[static_cast<std::size_t>(i)].score});
  }
  return RecGraph(labels, std::move(lists), discount);
}

Real transition_probability(const RecGraph& graph, NodeId u, NodeId v) {
  int rank = graph.out_list(u).rank_of(v);
  if (rank == 0) throw EdgeNotFound(u, v);
  return graph.discount().at(rank);
}

void apply_rewiring(RecGraph& graph, const RelevanceStore& relevance, const RewiringOp& op) {
  const NodeId n = graph.node_count();
  if (op.source < 0 || op.source >= n || op.removed < 0 || op.removed >= n || op.inserted < 0 ||
      op.inserted >= n)
    throw RewiringPrecondition("rewiring " + to_string(op) + ": node id out of range");
  if (!graph.is_harmful(op.source))
    throw RewiringPrecondition("rewiring " + to_string(op) + ": source is not harmful");
  if (!graph.is_harmful(op.removed))
    throw RewiringPrecondition("rewiring " + to_string(op) + ": removed target is not harmful");
  if (graph.is_harmful(op.inserted))
    throw RewiringPrecondition("rewiring " + to_string(op) + ": inserted target is not neutral");
  if (op.inserted == op.source)
    throw RewiringPrecondition("rewiring " + to_string(op) + ": self insertion");
  auto& list = graph.lists_[static_cast<std::size_t>(op.source)];
  if (op.rank < 1 || op.rank > static_cast<int>(list.slots.size()))
    throw RewiringPrecondition("rewiring " + to_string(op) + ": rank out of range");
  if (list.slots[static_cast<std::size_t>(op.rank - 1)].item != op.removed)
    throw RewiringPrecondition("rewiring " + to_string(op) +
                               ": removed target is not at the stated rank");
  if (list.contains(op.inserted))
    throw RewiringPrecondition("rewiring " + to_string(op) + ": inserted target already listed");
  if (op.prob != graph.discount().at(op.rank))
    throw RewiringPrecondition("rewiring " + to_string(op) +
                               ": transferred probability does not match the rank");
  list.slots[static_cast<std::size_t>(op.rank - 1)] = {op.inserted,
                                                       relevance.score(op.source, op.inserted)};
}

void detail_replace_slot(RecGraph& graph, NodeId u, int rank, NodeId item, Real score) {
  graph.lists_[static_cast<std::size_t>(u)].slots[static_cast<std::size_t>(rank - 1)] = {item,
                                                                                         score};
}

std::vector<NodeId> unreachable_harmful_nodes(const RecGraph& graph) {
  const NodeId n = graph.node_count();
  // reverse adjacency restricted to harmful-to-harmful edges
  std::vector<std::vector<NodeId>> reverse(static_cast<std::size_t>(n));
  std::deque<NodeId> frontier;
  std::vector<char> escapes(static_cast<std::size_t>(n), 0);
  for (NodeId u = 0; u < n; ++u) {
    if (!graph.is_harmful(u)) continue;
    for (const auto& slot : graph.out_list(u).slots) {
      if (graph.is_harmful(slot.item))
        reverse[static_cast<std::size_t>(slot.item)].push_back(u);
      else
        escapes[static_cast<std::size_t>(u)] = 1;
    }
  }
  std::vector<char> reached(static_cast<std::size_t>(n), 0);
  for (NodeId u = 0; u < n; ++u)
    if (escapes[static_cast<std::size_t>(u)]) {
      reached[static_cast<std::size_t>(u)] = 1;
      frontier.push_back(u);
    }
  while (!frontier.empty()) {
    NodeId v = frontier.front();
    frontier.pop_front();
    for (NodeId u : reverse[static_cast<std::size_t>(v)])
      if (!reached[static_cast<std::size_t>(u)]) {
        reached[static_cast<std::size_t>(u)] = 1;
        frontier.push_back(u);
      }
  }
  std::vector<NodeId> unreachable;
  for (NodeId u = 0; u < n; ++u)
    if (graph.is_harmful(u) && !reached[static_cast<std::size_t>(u)]) unreachable.push_back(u);
  return unreachable;
}

ValidationReport validate_graph(const RecGraph& graph) {
  ValidationReport report;
  const NodeId n = graph.node_count();
  const int d = graph.degree();

  Real table_sum = 0;
  Real prev = std::numeric_limits<Real>::infinity();
  bool non_increasing = true;
  for (Real p : graph.discount().table) {
    table_sum += p;
    if (p > prev) non_increasing = false;
    prev = p;
  }
  if (std::abs(table_sum - 1.0) > 1e-9) {
    report.probabilities_ok = false;
    report.issues.push_back("rank probability table sums to " + std::to_string(table_sum));
  }
  if (!non_increasing) {
    report.probabilities_ok = false;
    report.issues.push_back("rank probability table is not non-increasing");
  }

  for (NodeId u = 0; u < n; ++u) {
    const auto& list = graph.out_list(u);
    bool bad = false;
    if (static_cast<int>(list.slots.size()) != d) bad = true;
    if (list.owner != u) bad = true;
    for (std::size_t i = 0; i < list.slots.size() && !bad; ++i) {
      NodeId item = list.slots[i].item;
      if (item < 0 || item >= n || item == u) bad = true;
      for (std::size_t j = i + 1; j < list.slots.size() && !bad; ++j)
        if (list.slots[j].item == item) bad = true;
    }
    if (bad) {
      report.degrees_ok = false;
      report.issues.push_back("node " + std::to_string(u) + " has a malformed out-list");
    }
  }

  report.unreachable_harmful = unreachable_harmful_nodes(graph);
  if (!report.unreachable_harmful.empty()) {
    report.reachability_ok = false;
    report.issues.push_back(std::to_string(report.unreachable_harmful.size()) +
                            " harmful node(s) cannot reach any neutral node");
  }
  return report;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  if (ok()) {
    out << "OK\n";
    return out.str();
  }
  for (const auto& issue : issues) out << issue << "\n";
  if (!unreachable_harmful.empty()) {
    out << "unreachable harmful nodes:";
    for (NodeId u : unreachable_harmful) out << " " << u;
    out << "\n";
  }
  return out.str();
}

}  // namespace segra
