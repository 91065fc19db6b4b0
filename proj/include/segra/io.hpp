#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "segra/discount.hpp"
#include "segra/graph.hpp"
#include "segra/relevance.hpp"
#include "segra/types.hpp"

namespace segra {

// External string ids mapped to dense node ids in order of first appearance
// in the labels file.
class IdMap {
 public:
  NodeId intern(const std::string& name);
  NodeId lookup(const std::string& name) const;  // throws IoError when unknown
  const std::string& name(NodeId id) const;
  NodeId size() const { return static_cast<NodeId>(names_.size()); }
  bool empty() const { return names_.empty(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
};

// Shortest round-trip decimal form; stable across runs.
std::string format_real(Real value);

struct LabelsFile {
  IdMap ids;
  std::vector<NodeLabel> labels;
};

// CSV `node,label`, label in {harmful, neutral} (case-insensitive).
LabelsFile read_labels_csv(const std::string& path);

// CSV `src,dst,score`, scores in [0,1]; node ids must appear in the labels file.
RelevanceStore read_relevance_csv(const std::string& path, const IdMap& ids);

// CSV `src,dst,rank,prob,score`, rows sorted by (src, rank).
void write_graph_csv(const RecGraph& graph, const IdMap& ids, const std::string& path);

// Rebuilds a graph from a dump. The relevance store is the source of truth
// for scores; a dump score drifting from it by more than 1e-9 is an error.
RecGraph read_graph_csv(const std::string& path, const IdMap& ids,
                        const std::vector<NodeLabel>& labels, const RelevanceStore& relevance,
                        DiscountKind kind);

// CSV `external_id,node_id`.
void write_remap_csv(const IdMap& ids, const std::string& path);

// CSV `node,z` over harmful nodes, ascending id.
void write_z_csv(const std::vector<std::pair<NodeId, Real>>& z, const IdMap& ids,
                 const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

std::string external_name(const IdMap& ids, NodeId id);

}  // namespace segra
