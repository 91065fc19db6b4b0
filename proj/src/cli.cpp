#include "segra/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "segra/absorbing.hpp"
#include "segra/gadget.hpp"
#include "segra/graph.hpp"
#include "segra/io.hpp"
#include "segra/log.hpp"
#include "segra/metrics.hpp"
#include "segra/rewire.hpp"
#include "segra/rng.hpp"

namespace segra {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string joined(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

struct LoadedGraph {
  IdMap ids;
  std::vector<NodeLabel> labels;
  RelevanceStore relevance;
  RecGraph graph;
};

LoadedGraph load_graph_inputs(const RunConfig& config) {
  if (config.labels_path.empty() || config.relevance_path.empty() || config.graph_path.empty())
    throw ConfigError("graph, relevance and labels files are all required");
  LabelsFile labels = read_labels_csv(config.labels_path);
  RelevanceStore relevance = read_relevance_csv(config.relevance_path, labels.ids);
  RecGraph graph =
      read_graph_csv(config.graph_path, labels.ids, labels.labels, relevance, config.discount);
  return {std::move(labels.ids), std::move(labels.labels), std::move(relevance),
          std::move(graph)};
}

void zero_timing(OptimizationTrace& trace) {
  for (auto& step : trace.steps) step.wall_ms = 0.0;
}

std::vector<std::pair<NodeId, Real>> z_pairs(const SegregationState& state) {
  std::vector<std::pair<NodeId, Real>> out;
  const auto& view = state.view();
  out.reserve(static_cast<std::size_t>(view.count()));
  for (int i = 0; i < view.count(); ++i)
    out.emplace_back(view.harmful[static_cast<std::size_t>(i)], state.z()[i]);
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0,1)");
  if (k < 0) throw ConfigError("k must be >= 0");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_iter < 0) throw ConfigError("max-iter must be >= 0");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (algorithm != "heu" && algorithm != "bsl1" && algorithm != "bsl2" && algorithm != "rnd" &&
      algorithm != "brute")
    throw ConfigError("algorithm must be one of heu, bsl1, bsl2, rnd, brute");
}

int RunConfig::resolved_threads() const {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int run_build(const RunConfig& config) {
  config.validate();
  if (config.d < 1) throw ConfigError("build requires --d >= 1");
  if (config.labels_path.empty() || config.relevance_path.empty())
    throw ConfigError("build requires --labels and --relevance");
  ensure_out_dir(config.out_dir);

  LabelsFile labels = read_labels_csv(config.labels_path);
  RelevanceStore relevance = read_relevance_csv(config.relevance_path, labels.ids);
  RecGraph graph = build_top_d_graph(relevance, labels.labels, config.d,
                                     RankDiscount::make(config.discount, config.d));

  write_graph_csv(graph, labels.ids, joined(config.out_dir, "graph.csv"));
  write_remap_csv(labels.ids, joined(config.out_dir, "remap.csv"));
  ValidationReport report = validate_graph(graph);
  write_text_file(joined(config.out_dir, "validation.txt"), report.to_string());
  SEGRA_LOG_INFO("build: %d nodes, %d harmful, d=%d, validation %s",
                 static_cast<int>(graph.node_count()), static_cast<int>(graph.harmful_count()),
                 config.d, report.ok() ? "ok" : "FAILED");
  if (!report.ok()) {
    SEGRA_LOG_ERROR("validation failed:\n%s", report.to_string().c_str());
    return kExitValidation;
  }
  return kExitOk;
}

int run_optimize(const RunConfig& config) {
  config.validate();
  ensure_out_dir(config.out_dir);
  LoadedGraph loaded = load_graph_inputs(config);

  ValidationReport report = validate_graph(loaded.graph);
  if (!report.ok()) {
    SEGRA_LOG_ERROR("validation failed:\n%s", report.to_string().c_str());
    write_text_file(joined(config.out_dir, "validation.txt"), report.to_string());
    return kExitValidation;
  }

  SolveOptions opts{config.tol, config.max_iter};
  const int threads = config.resolved_threads();
  auto started = Clock::now();

  SegregationState before(loaded.graph, opts);
  const Real z0 = before.segregation();
  if (before.view().count() == 0) {
    SEGRA_LOG_ERROR("no harmful nodes; nothing to optimize");
    return kExitNoCandidates;
  }
  DistributionSnapshot before_snapshot = snapshot_distribution(before, z0);
  if (config.dump_z) write_z_csv(z_pairs(before), loaded.ids, joined(config.out_dir, "z_before.csv"));

  if (generate_candidates(loaded.graph, loaded.relevance, config.tau).size() == 0) {
    SEGRA_LOG_ERROR("no feasible rewiring candidates at tau=%.6g", config.tau);
    export_trace(OptimizationTrace{config.algorithm, z0, {}, TerminalReason::CandidatesExhausted, {}},
                 loaded.ids, joined(config.out_dir, "trace.csv"));
    export_distribution(before_snapshot, loaded.ids, joined(config.out_dir, "dist_before.csv"),
                        joined(config.out_dir, "dist_before.json"));
    return kExitNoCandidates;
  }

  OptimizationTrace trace;
  if (config.algorithm == "heu")
    trace = heuristic_k_rewiring(loaded.graph, loaded.relevance, config.tau, config.k, opts, threads);
  else if (config.algorithm == "bsl1")
    trace = baseline_bsl1(loaded.graph, loaded.relevance, config.tau, config.k, opts, threads);
  else if (config.algorithm == "bsl2")
    trace = baseline_bsl2(loaded.graph, loaded.relevance, config.tau, config.k, opts, threads);
  else if (config.algorithm == "rnd")
    trace = baseline_rnd(loaded.graph, loaded.relevance, config.tau, config.k, config.seed, opts);
  else
    trace = brute_force_k_rewiring(loaded.graph, loaded.relevance, config.tau, config.k,
                                   config.guard);
  if (config.no_timing) zero_timing(trace);

  SegregationState after(loaded.graph, opts);
  DistributionSnapshot after_snapshot = snapshot_distribution(after, z0);
  if (config.dump_z) write_z_csv(z_pairs(after), loaded.ids, joined(config.out_dir, "z_after.csv"));

  export_trace(trace, loaded.ids, joined(config.out_dir, "trace.csv"));
  export_distribution(before_snapshot, loaded.ids, joined(config.out_dir, "dist_before.csv"),
                      joined(config.out_dir, "dist_before.json"));
  export_distribution(after_snapshot, loaded.ids, joined(config.out_dir, "dist_after.csv"),
                      joined(config.out_dir, "dist_after.json"));

  QualityAudit audit = quality_audit(loaded.graph, loaded.relevance, config.tau);
  double runtime_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - started).count();
  nlohmann::ordered_json summary;
  summary["algorithm"] = trace.algorithm;
  summary["n"] = loaded.graph.node_count();
  summary["harmful"] = loaded.graph.harmful_count();
  summary["d"] = loaded.graph.degree();
  summary["tau"] = config.tau;
  summary["k_requested"] = config.k;
  summary["ops_applied"] = trace.steps.size();
  summary["initial_Z"] = trace.initial_segregation;
  summary["final_Z"] = trace.final_segregation();
  summary["ratio"] = trace.final_ratio();
  summary["terminal"] = to_string(trace.terminal);
  summary["zero_progress_steps"] = trace.zero_progress_steps();
  summary["candidates_scanned"] = trace.stats.candidates;
  summary["candidates_evaluated"] = trace.stats.evaluated;
  summary["delta_probes"] = trace.stats.probes;
  summary["quality_min_loss"] = audit.min_loss;
  summary["quality_violations"] = audit.violations;
  summary["runtime_ms"] = config.no_timing ? 0.0 : runtime_ms;
  write_text_file(joined(config.out_dir, "summary.json"), summary.dump(2) + "\n");

  SEGRA_LOG_INFO("optimize: %s applied %zu op(s), Z %.8g -> %.8g (ratio %.6f)",
                 trace.algorithm.c_str(), trace.steps.size(), trace.initial_segregation,
                 trace.final_segregation(), trace.final_ratio());
  return kExitOk;
}

int run_verify(const RunConfig& config) {
  config.validate();
  LoadedGraph loaded = load_graph_inputs(config);
  ValidationReport report = validate_graph(loaded.graph);
  if (!report.ok()) {
    SEGRA_LOG_ERROR("validation failed:\n%s", report.to_string().c_str());
    return kExitValidation;
  }
  SolveOptions opts{config.tol, config.max_iter};
  const int threads = config.resolved_threads();
  std::ostringstream out;
  bool all_ok = true;

  SegregationState state(loaded.graph, opts);
  const auto& view = state.view();
  const int nh = view.count();

  // iterative z against the dense solve
  if (static_cast<std::size_t>(nh) <= config.guard) {
    Eigen::VectorXd dense = dense_oracle_z(view, config.guard);
    Real max_diff = nh > 0 ? (state.z() - dense).lpNorm<Eigen::Infinity>() : 0.0;
    bool ok = max_diff <= 10.0 * config.tol;
    all_ok = all_ok && ok;
    out << "power-vs-dense: max |dz| = " << format_real(max_diff) << (ok ? " PASS" : " FAIL")
        << "\n";
  } else {
    out << "power-vs-dense: skipped (harmful count " << nh << " above guard " << config.guard
        << ")\n";
  }

  // closed-form per-op decrease against a full recomputation
  auto ops = generate_candidates(loaded.graph, loaded.relevance, config.tau).flatten();
  std::size_t checked = 0, ok_count = 0;
  if (!ops.empty() && nh > 0) {
    std::size_t stride = std::max<std::size_t>(1, ops.size() / static_cast<std::size_t>(config.samples));
    auto sorted = state.harmful_sorted_by_z();
    NodeId top = view.harmful[static_cast<std::size_t>(sorted[0])];
    for (std::size_t i = 0; i < ops.size() && checked < static_cast<std::size_t>(config.samples);
         i += stride) {
      const auto& op = ops[i];
      Real predicted = state.delta_segregation(top, op);
      RecGraph edited = loaded.graph;
      apply_rewiring(edited, loaded.relevance, op);
      SegregationState recomputed(edited, opts);
      Real actual = state.z_of(top) - recomputed.z_of(top);
      ++checked;
      Real scale = std::max({1.0, std::abs(predicted), std::abs(actual)});
      if (std::abs(predicted - actual) <= 1e-6 * scale) ++ok_count;
    }
    bool ok = ok_count == checked;
    all_ok = all_ok && ok;
    out << "rank-one-vs-recompute: " << ok_count << "/" << checked << " within 1e-6"
        << (ok ? " PASS" : " FAIL") << "\n";
  } else {
    out << "rank-one-vs-recompute: skipped (no candidates)\n";
  }

  // Monte-Carlo walks against analytic hitting lengths
  if (nh > 0) {
    Rng rng(config.seed);
    std::size_t sample_count = std::min<std::size_t>(static_cast<std::size_t>(config.samples),
                                                     static_cast<std::size_t>(nh));
    std::size_t mc_ok = 0;
    for (std::size_t i = 0; i < sample_count; ++i) {
      NodeId node = view.harmful[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(nh)))];
      long cap = static_cast<long>(100.0 * std::max(1.0, state.segregation()));
      HittingEstimate estimate =
          monte_carlo_hitting(loaded.graph, node, config.trials, config.seed + i, cap, threads);
      Real z_ref = state.z_of(node);
      Real band = 4.0 * estimate.std_error;
      if (std::abs(estimate.mean - z_ref) <= std::max(band, 1e-9)) ++mc_ok;
    }
    bool ok = mc_ok * 100 >= sample_count * 95;
    all_ok = all_ok && ok;
    out << "monte-carlo-vs-analytic: " << mc_ok << "/" << sample_count
        << " within 4 standard errors" << (ok ? " PASS" : " FAIL") << "\n";
  }

  out << (all_ok ? "verify PASS\n" : "verify FAIL\n");
  std::fputs(out.str().c_str(), stdout);
  return all_ok ? kExitOk : kExitValidation;
}

int run_gadget(const RunConfig& config) {
  config.validate();
  if (config.edges_path.empty()) throw ConfigError("gadget requires --edges");
  ensure_out_dir(config.out_dir);

  std::ifstream in(config.edges_path);
  if (!in) throw IoError("cannot open " + config.edges_path);
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> singletons;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string a, b;
    if (!(fields >> a)) continue;
    if (fields >> b)
      edges.emplace_back(a, b);
    else
      singletons.push_back(a);
  }

  GadgetGraph gadget = build_vertex_cover_gadget(edges, singletons);
  ValidationReport report = validate_graph(gadget.graph);
  if (!report.ok()) {
    SEGRA_LOG_ERROR("gadget validation failed:\n%s", report.to_string().c_str());
    return kExitValidation;
  }

  SolveOptions opts{config.tol, config.max_iter};
  SegregationState initial(gadget.graph, opts);
  const Real z0 = initial.segregation();
  OptimizationTrace trace = heuristic_k_rewiring(gadget.graph, gadget.relevance, config.tau,
                                                 config.k, opts, config.resolved_threads());
  if (config.no_timing) zero_timing(trace);
  SegregationState final_state(gadget.graph, opts);

  std::ostringstream out;
  out << "gadget: " << gadget.vertex_nodes.size() << " vertex node(s), "
      << gadget.edge_nodes.size() << " edge node(s)\n";
  out << "initial Z = " << format_real(z0) << "\n";
  std::size_t at_25 = 0, at_275 = 0, at_3 = 0, other = 0;
  for (NodeId e : gadget.edge_nodes) {
    Real z = final_state.z_of(e);
    if (std::abs(z - 2.5) <= 1e-9)
      ++at_25;
    else if (std::abs(z - 2.75) <= 1e-9)
      ++at_275;
    else if (std::abs(z - 3.0) <= 1e-9)
      ++at_3;
    else
      ++other;
  }
  Real final_z = final_state.segregation();
  out << "after " << trace.steps.size() << " op(s): Z = " << format_real(final_z) << "\n";
  out << "edge nodes at 2.5: " << at_25 << ", at 2.75: " << at_275 << ", at 3: " << at_3
      << ", other: " << other << "\n";
  out << "Z <= 2.75 (some edge singly covered): " << (final_z <= 2.75 + 1e-9 ? "yes" : "no")
      << "\n";
  out << "Z == 2.5 (every edge doubly covered): " << (std::abs(final_z - 2.5) <= 1e-9 ? "yes" : "no")
      << "\n";
  std::fputs(out.str().c_str(), stdout);
  write_text_file(joined(config.out_dir, "gadget_report.txt"), out.str());
  export_trace(trace, gadget.ids, joined(config.out_dir, "trace.csv"));
  return kExitOk;
}

}  // namespace segra
