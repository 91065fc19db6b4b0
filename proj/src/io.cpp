#include "segra/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace segra {

namespace {

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return text;
}

std::string strip(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(strip(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

Real parse_real(const std::string& text, const std::string& where) {
  Real value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw IoError(where + ": cannot parse number '" + text + "'");
  return value;
}

long parse_long(const std::string& text, const std::string& where) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw IoError(where + ": cannot parse integer '" + text + "'");
  return value;
}

class CsvReader {
 public:
  CsvReader(const std::string& path, const std::string& expected_header) : path_(path), in_(path) {
    if (!in_) throw IoError("cannot open " + path);
    std::string header;
    if (!std::getline(in_, header)) throw IoError(path + ": empty file");
    if (strip(header) != expected_header)
      throw IoError(path + ": expected header '" + expected_header + "', found '" +
                    strip(header) + "'");
    line_no_ = 1;
  }

  bool next(std::vector<std::string>& fields, std::size_t expected) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (strip(line).empty()) continue;
      fields = split_csv_line(line);
      if (fields.size() != expected)
        throw IoError(where() + ": expected " + std::to_string(expected) + " fields, found " +
                      std::to_string(fields.size()));
      return true;
    }
    return false;
  }

  std::string where() const { return path_ + ":" + std::to_string(line_no_); }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace

NodeId IdMap::intern(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  NodeId id = static_cast<NodeId>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

NodeId IdMap::lookup(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw IoError("unknown node id '" + name + "'");
  return it->second;
}

const std::string& IdMap::name(NodeId id) const { return names_[static_cast<std::size_t>(id)]; }

std::string external_name(const IdMap& ids, NodeId id) {
  if (id >= 0 && id < ids.size()) return ids.name(id);
  return std::to_string(id);
}

std::string format_real(Real value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

LabelsFile read_labels_csv(const std::string& path) {
  CsvReader reader(path, "node,label");
  LabelsFile out;
  std::vector<std::string> fields;
  while (reader.next(fields, 2)) {
    NodeId before = out.ids.size();
    NodeId id = out.ids.intern(fields[0]);
    if (id < before) throw IoError(reader.where() + ": duplicate node '" + fields[0] + "'");
    std::string label = lower(fields[1]);
    if (label == "harmful")
      out.labels.push_back(NodeLabel::Harmful);
    else if (label == "neutral")
      out.labels.push_back(NodeLabel::Neutral);
    else
      throw IoError(reader.where() + ": label must be harmful or neutral, found '" + fields[1] +
                    "'");
  }
  if (out.labels.empty()) throw IoError(path + ": no nodes");
  return out;
}

RelevanceStore read_relevance_csv(const std::string& path, const IdMap& ids) {
  CsvReader reader(path, "src,dst,score");
  RelevanceStore store(ids.size());
  std::vector<std::string> fields;
  while (reader.next(fields, 3)) {
    NodeId src, dst;
    try {
      src = ids.lookup(fields[0]);
      dst = ids.lookup(fields[1]);
    } catch (const IoError& e) {
      throw IoError(reader.where() + ": " + e.what());
    }
    Real score = parse_real(fields[2], reader.where());
    try {
      store.add(src, dst, score);
    } catch (const InvalidScore& e) {
      throw IoError(reader.where() + ": " + e.what());
    }
  }
  store.finalize();
  return store;
}

void write_graph_csv(const RecGraph& graph, const IdMap& ids, const std::string& path) {
  std::ostringstream out;
  out << "src,dst,rank,prob,score\n";
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    const auto& list = graph.out_list(u);
    for (std::size_t i = 0; i < list.slots.size(); ++i) {
      out << external_name(ids, u) << ',' << external_name(ids, list.slots[i].item) << ','
          << (i + 1) << ',' << format_real(graph.discount().at(static_cast<int>(i) + 1)) << ','
          << format_real(list.slots[i].score) << '\n';
    }
  }
  write_text_file(path, out.str());
}

RecGraph read_graph_csv(const std::string& path, const IdMap& ids,
                        const std::vector<NodeLabel>& labels, const RelevanceStore& relevance,
                        DiscountKind kind) {
  CsvReader reader(path, "src,dst,rank,prob,score");
  const NodeId n = static_cast<NodeId>(labels.size());
  std::vector<std::vector<Slot>> slots(static_cast<std::size_t>(n));
  std::vector<Real> probs;  // by rank-1, first row group defines them
  std::vector<std::string> fields;
  int d = 0;
  while (reader.next(fields, 5)) {
    NodeId src, dst;
    try {
      src = ids.lookup(fields[0]);
      dst = ids.lookup(fields[1]);
    } catch (const IoError& e) {
      throw IoError(reader.where() + ": " + e.what());
    }
    long rank = parse_long(fields[2], reader.where());
    Real prob = parse_real(fields[3], reader.where());
    Real score = parse_real(fields[4], reader.where());
    auto& row = slots[static_cast<std::size_t>(src)];
    if (rank != static_cast<long>(row.size()) + 1)
      throw IoError(reader.where() + ": ranks must be contiguous per source, sorted by (src, rank)");
    Real stored = relevance.score(src, dst);
    if (std::abs(stored - score) > 1e-9)
      throw IoError(reader.where() + ": score drifts from the relevance store (" +
                    format_real(score) + " vs " + format_real(stored) + ")");
    row.push_back({dst, stored});
    d = std::max(d, static_cast<int>(rank));
    if (static_cast<long>(probs.size()) < rank) probs.resize(static_cast<std::size_t>(rank), -1);
    if (probs[static_cast<std::size_t>(rank - 1)] < 0)
      probs[static_cast<std::size_t>(rank - 1)] = prob;
    else if (std::abs(probs[static_cast<std::size_t>(rank - 1)] - prob) > 1e-12)
      throw IoError(reader.where() + ": inconsistent probability for rank " +
                    std::to_string(rank));
  }
  if (d == 0) throw IoError(path + ": no edges");
  RankDiscount discount = RankDiscount::make(kind, d);
  for (int rank = 1; rank <= d; ++rank) {
    if (std::abs(discount.at(rank) - probs[static_cast<std::size_t>(rank - 1)]) > 1e-9)
      throw IoError(path + ": rank " + std::to_string(rank) +
                    " probability does not match the " + std::string(to_string(kind)) +
                    " discount");
  }
  std::vector<RecommendationList> lists(static_cast<std::size_t>(n));
  for (NodeId u = 0; u < n; ++u) {
    if (static_cast<int>(slots[static_cast<std::size_t>(u)].size()) != d)
      throw IoError(path + ": node '" + external_name(ids, u) + "' has " +
                    std::to_string(slots[static_cast<std::size_t>(u)].size()) + " edges, expected " +
                    std::to_string(d));
    lists[static_cast<std::size_t>(u)].owner = u;
    lists[static_cast<std::size_t>(u)].slots = std::move(slots[static_cast<std::size_t>(u)]);
  }
  return RecGraph(labels, std::move(lists), std::move(discount));
}

void write_remap_csv(const IdMap& ids, const std::string& path) {
  std::ostringstream out;
  out << "external_id,node_id\n";
  for (NodeId id = 0; id < ids.size(); ++id) out << ids.name(id) << ',' << id << '\n';
  write_text_file(path, out.str());
}

void write_z_csv(const std::vector<std::pair<NodeId, Real>>& z, const IdMap& ids,
                 const std::string& path) {
  std::ostringstream out;
  out << "node,z\n";
  for (const auto& [node, value] : z) out << external_name(ids, node) << ',' << format_real(value)
                                          << '\n';
  write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace segra
