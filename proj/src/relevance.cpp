#include "segra/relevance.hpp"

#include <algorithm>

namespace segra {

void RelevanceStore::add(NodeId u, NodeId v, Real score) {
  if (u < 0 || v < 0) throw InvalidScore("negative node id in relevance entry");
  if (u == v) throw InvalidScore("self-relevance entry for node " + std::to_string(u));
  if (!(score >= 0.0 && score <= 1.0))
    throw InvalidScore("score " + std::to_string(score) + " outside [0,1] for (" +
                       std::to_string(u) + "," + std::to_string(v) + ")");
  std::size_t need = static_cast<std::size_t>(std::max(u, v)) + 1;
  if (rows_.size() < need) rows_.resize(need);
  rows_[static_cast<std::size_t>(u)].push_back({v, score});
  finalized_ = false;
}

void RelevanceStore::finalize() {
  for (std::size_t u = 0; u < rows_.size(); ++u) {
    auto& row = rows_[u];
    std::sort(row.begin(), row.end(),
              [](const Entry& a, const Entry& b) { return a.item < b.item; });
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i].item == row[i - 1].item)
        throw InvalidScore("duplicate relevance entry (" + std::to_string(u) + "," +
                           std::to_string(row[i].item) + ")");
    }
    row.shrink_to_fit();
  }
  finalized_ = true;
}

Real RelevanceStore::score(NodeId u, NodeId v) const {
  if (u < 0 || static_cast<std::size_t>(u) >= rows_.size()) return 0.0;
  const auto& row = rows_[static_cast<std::size_t>(u)];
  if (!finalized_) {
    for (const auto& e : row)
      if (e.item == v) return e.score;
    return 0.0;
  }
  auto it = std::lower_bound(row.begin(), row.end(), v,
                             [](const Entry& e, NodeId id) { return e.item < id; });
  if (it != row.end() && it->item == v) return it->score;
  return 0.0;
}

std::span<const RelevanceStore::Entry> RelevanceStore::row(NodeId u) const {
  if (u < 0 || static_cast<std::size_t>(u) >= rows_.size()) return {};
  const auto& row = rows_[static_cast<std::size_t>(u)];
  return {row.data(), row.size()};
}

std::size_t RelevanceStore::entry_count() const {
  std::size_t total = 0;
  for (const auto& row : rows_) total += row.size();
  return total;
}

}  // namespace segra
