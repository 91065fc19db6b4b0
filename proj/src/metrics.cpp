#include "segra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace segra {

DistributionSnapshot snapshot_distribution(const SegregationState& state, Real z0_max) {
  if (!(z0_max > 0)) throw Error("snapshot_distribution: z0_max must be positive");
  DistributionSnapshot snapshot;
  const auto& view = state.view();
  const auto& z = state.z();
  snapshot.count = static_cast<std::size_t>(view.count());
  snapshot.values.reserve(snapshot.count);
  for (int i = 0; i < view.count(); ++i)
    snapshot.values.emplace_back(view.harmful[static_cast<std::size_t>(i)], z[i] / z0_max);
  if (snapshot.count == 0) return snapshot;

  std::vector<Real> sorted;
  sorted.reserve(snapshot.count);
  Real sum = 0;
  for (const auto& [_, value] : snapshot.values) {
    sorted.push_back(value);
    sum += value;
  }
  std::sort(sorted.begin(), sorted.end());
  snapshot.mean = sum / static_cast<Real>(snapshot.count);
  std::size_t n = sorted.size();
  snapshot.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  std::size_t p90_index = static_cast<std::size_t>(
      std::ceil(0.9 * static_cast<Real>(n)));
  snapshot.p90 = sorted[std::min(n - 1, p90_index == 0 ? 0 : p90_index - 1)];
  snapshot.max = sorted.back();
  return snapshot;
}

Real gini_in_degree(const RecGraph& graph, NodeSubset subset) {
  auto degrees = graph.in_degrees();
  std::vector<Real> values;
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    bool keep = subset == NodeSubset::All ||
                (subset == NodeSubset::Harmful && graph.is_harmful(u)) ||
                (subset == NodeSubset::Neutral && !graph.is_harmful(u));
    if (keep) values.push_back(static_cast<Real>(degrees[static_cast<std::size_t>(u)]));
  }
  if (values.empty()) throw EmptySubset("gini_in_degree: empty node subset");
  std::sort(values.begin(), values.end());
  Real sum = 0, weighted = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    weighted += static_cast<Real>(i + 1) * values[i];
  }
  if (!(sum > 0)) return 0.0;
  Real n = static_cast<Real>(values.size());
  return 2.0 * weighted / (n * sum) - (n + 1.0) / n;
}

QualityAudit quality_audit(const RecGraph& graph, const RelevanceStore& relevance, Real tau) {
  QualityAudit audit;
  audit.loss.reserve(static_cast<std::size_t>(graph.node_count()));
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    const auto& list = graph.out_list(u);
    Real actual = 0;
    for (std::size_t i = 0; i < list.slots.size(); ++i)
      actual += relevance.score(u, list.slots[i].item) * dcg_weight(static_cast<int>(i) + 1);
    Real ideal = graph.ideal_dcg(u);
    Real loss = ideal > 0 ? actual / ideal : 1.0;
    audit.loss.emplace_back(u, loss);
    audit.min_loss = std::min(audit.min_loss, loss);
    if (loss < tau) {
      ++audit.violations;
      audit.violating.push_back(u);
    }
  }
  return audit;
}

void export_trace(const OptimizationTrace& trace, const IdMap& ids, const std::string& path) {
  std::ostringstream out;
  out << "step,u,v,w,rank,p_o,delta,Z,ratio,wall_time_ms\n";
  for (const auto& step : trace.steps) {
    out << step.index << ',' << external_name(ids, step.op.source) << ','
        << external_name(ids, step.op.removed) << ',' << external_name(ids, step.op.inserted)
        << ',' << step.op.rank << ',' << format_real(step.op.prob) << ','
        << format_real(step.delta) << ',' << format_real(step.z_after) << ','
        << format_real(step.ratio) << ',' << format_real(step.wall_ms) << '\n';
  }
  write_text_file(path, out.str());
}

void export_distribution(const DistributionSnapshot& snapshot, const IdMap& ids,
                         const std::string& csv_path, const std::string& json_path) {
  std::ostringstream out;
  out << "node,z_normalized\n";
  for (const auto& [node, value] : snapshot.values)
    out << external_name(ids, node) << ',' << format_real(value) << '\n';
  write_text_file(csv_path, out.str());

  nlohmann::ordered_json summary;
  summary["mean"] = snapshot.mean;
  summary["median"] = snapshot.median;
  summary["p90"] = snapshot.p90;
  summary["max"] = snapshot.max;
  summary["count"] = snapshot.count;
  write_text_file(json_path, summary.dump(2) + "\n");
}

}  // namespace segra
