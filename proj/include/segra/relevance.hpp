#pragma once

#include <span>
#include <vector>

#include "segra/types.hpp"

namespace segra {

// Sparse relevance scores s(u, v) in [0, 1]. Absent pairs read as 0; self
// pairs are rejected. Rows are sorted by item id once finalized.
class RelevanceStore {
 public:
  struct Entry {
    NodeId item;
    Real score;
  };

  RelevanceStore() = default;
  explicit RelevanceStore(NodeId node_count) { rows_.resize(static_cast<std::size_t>(node_count)); }

  void add(NodeId u, NodeId v, Real score);
  // Sorts rows and rejects duplicate (u, v) pairs.
  void finalize();

  bool finalized() const { return finalized_; }
  Real score(NodeId u, NodeId v) const;
  std::span<const Entry> row(NodeId u) const;
  NodeId node_capacity() const { return static_cast<NodeId>(rows_.size()); }
  std::size_t entry_count() const;

 private:
  std::vector<std::vector<Entry>> rows_;
  bool finalized_ = false;
};

}  // namespace segra
