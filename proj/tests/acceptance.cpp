// Acceptance suite: one criterion per invocation argument (1..9), or "all".
// Each criterion prints a single PASS/FAIL line; the exit code is the number
// of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "segra/absorbing.hpp"
#include "segra/gadget.hpp"
#include "segra/log.hpp"
#include "segra/metrics.hpp"
#include "segra/rewire.hpp"
#include "segra/rng.hpp"
#include "segra/synthetic.hpp"

using namespace segra;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::vector<std::pair<std::string, std::string>>> gadget_inputs() {
  return {
      {{"x", "y"}},                          // single edge
      {{"x", "y"}, {"x", "z"}, {"y", "z"}},  // triangle
      {{"a", "b"}, {"b", "c"}},              // path
      {{"h", "l1"}, {"h", "l2"}, {"h", "l3"}},  // star
  };
}

// ---------------------------------------------------------------- criterion 1
bool criterion_gadget_exactness(std::string& detail) {
  Check check;
  auto start = Clock::now();
  for (const auto& edges : gadget_inputs()) {
    GadgetGraph g = build_vertex_cover_gadget(edges);
    auto view = absorbing_view(g.graph);
    auto z_iter = segregation_vector(view, SolveOptions{1e-8, 0});
    auto z_exact = dense_oracle_z(view);
    for (NodeId relay : {g.relay_a, g.relay_b}) {
      check.expect(std::abs(z_iter[view.local_of(relay)] - 1.0) <= 1e-6, "relay z (iterative)");
      check.expect(std::abs(z_exact[view.local_of(relay)] - 1.0) <= 1e-10, "relay z (dense)");
    }
    for (NodeId v : g.vertex_nodes) {
      check.expect(std::abs(z_iter[view.local_of(v)] - 2.0) <= 1e-6, "vertex z (iterative)");
      check.expect(std::abs(z_exact[view.local_of(v)] - 2.0) <= 1e-10, "vertex z (dense)");
    }
    for (NodeId e : g.edge_nodes) {
      check.expect(std::abs(z_iter[view.local_of(e)] - 3.0) <= 1e-6, "edge z (iterative)");
      check.expect(std::abs(z_exact[view.local_of(e)] - 3.0) <= 1e-10, "edge z (dense)");
    }
    check.expect(std::abs(graph_segregation(z_exact, view).value - 3.0) <= 1e-10, "Z == 3");
  }
  double elapsed = seconds_since(start);
  check.expect(elapsed < 1.0, "runtime " + std::to_string(elapsed) + "s >= 1s");
  detail = check.ok ? "z = (1, 2, 3) exact on 4 gadgets in " + std::to_string(elapsed) + "s"
                    : check.detail;
  return check.ok;
}

// ---------------------------------------------------------------- criterion 2
bool criterion_cover_arithmetic(std::string& detail) {
  Check check;
  for (const auto& edges : gadget_inputs()) {
    // translate the external edge list into vertex indices
    GadgetGraph probe = build_vertex_cover_gadget(edges);
    std::vector<std::pair<int, int>> index_edges;
    for (const auto& [a, b] : probe.edge_endpoints)
      index_edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
    int n_vertices = static_cast<int>(probe.vertex_nodes.size());

    for (bool full_cover : {false, true}) {
      GadgetGraph g = build_vertex_cover_gadget(edges);
      std::vector<NodeId> cover;
      if (full_cover) {
        cover = g.vertex_nodes;
      } else {
        for (int v : minimum_vertex_cover(n_vertices, index_edges))
          cover.push_back(g.vertex_nodes[static_cast<std::size_t>(v)]);
      }
      std::vector<char> covered(static_cast<std::size_t>(n_vertices), 0);
      for (NodeId v : cover) covered[static_cast<std::size_t>(v)] = 1;

      for (const auto& op : cover_rewirings(g, cover)) apply_rewiring(g.graph, g.relevance, op);
      auto view = absorbing_view(g.graph);
      auto z = dense_oracle_z(view);

      bool any_single = false;
      for (std::size_t e = 0; e < g.edge_nodes.size(); ++e) {
        int hits = covered[static_cast<std::size_t>(g.edge_endpoints[e].first)] +
                   covered[static_cast<std::size_t>(g.edge_endpoints[e].second)];
        Real expected = hits == 2 ? 2.5 : 2.75;  // a cover leaves no uncovered edge
        check.expect(hits >= 1, "cover property");
        if (hits == 1) any_single = true;
        check.expect(std::abs(z[view.local_of(g.edge_nodes[e])] - expected) <= 1e-9,
                     "edge-node z after cover ops");
      }
      if (!g.edge_nodes.empty()) {
        Real expected_max = any_single ? 2.75 : 2.5;
        check.expect(std::abs(graph_segregation(z, view).value - expected_max) <= 1e-9,
                     "final Z after cover ops");
      }
    }
  }
  detail = check.ok ? "edge nodes land on 2.75 / 2.5 exactly as covered" : check.detail;
  return check.ok;
}

// ---------------------------------------------------------------- criterion 3
bool criterion_one_rewiring_optimality(std::string& detail) {
  Check check;
  auto start = Clock::now();
  int compared = 0;
  long mismatches = 0;
  for (std::uint64_t seed = 1; compared < 102 && seed <= 60; ++seed) {
    for (int d : {2, 3, 5}) {
      for (Real tau : {0.5, 0.9}) {
        auto maybe = segra::testing::build_valid_instance(40, d, 0.5, 4 * d, seed * 131 + d);
        if (!maybe) continue;
        auto& fx = *maybe;
        SegregationState state(fx.graph, SolveOptions{1e-12, 0});
        auto fast = optimal_one_rewiring(fx.graph, fx.relevance, state, tau);
        auto brute = brute_force_one_rewiring(fx.graph, fx.relevance, tau);
        if (fast.has_value() != brute.has_value()) {
          ++mismatches;
          continue;
        }
        if (fast) {
          Real scale = std::max({1.0, fast->delta, brute->delta});
          if (std::abs(fast->delta - brute->delta) > 1e-8 * scale) ++mismatches;
        }
        ++compared;
      }
    }
  }
  double elapsed = seconds_since(start);
  check.expect(compared >= 100, "only " + std::to_string(compared) + " instances compared");
  check.expect(mismatches == 0, std::to_string(mismatches) + " delta mismatches");
  check.expect(elapsed < 120.0, "runtime " + std::to_string(elapsed) + "s >= 2min");
  detail = check.ok ? std::to_string(compared) + " instances, deltas identical, " +
                          std::to_string(elapsed) + "s"
                    : check.detail;
  return check.ok;
}

// ---------------------------------------------------------------- criterion 4
bool criterion_incremental_fidelity(std::string& detail) {
  Check check;
  int applied_total = 0;
  for (std::uint64_t seed = 1; seed <= 10 && applied_total < 20; ++seed) {
    auto maybe = segra::testing::build_valid_instance(400, 5, 0.5, 20, seed * 7);
    if (!maybe) continue;
    auto& fx = *maybe;
    Real tau = 0.8;
    SegregationState state(fx.graph, SolveOptions{1e-10, 0});
    auto candidates = generate_candidates(fx.graph, fx.relevance, tau);
    int ops_here = 0;
    while (ops_here < 20 && applied_total < 20 && candidates.size() > 0) {
      auto selected = select_best_rewiring(state, candidates, 4);
      if (!selected) break;
      state.column(selected->op.source);
      apply_rewiring(fx.graph, fx.relevance, selected->op);
      state.update_after_rewiring(selected->op);
      ++ops_here;
      ++applied_total;

      auto view = absorbing_view(fx.graph);
      auto z_ref = segregation_vector(view, SolveOptions{1e-12, 0});
      Real z_scale = std::max(1.0, z_ref.lpNorm<Eigen::Infinity>());
      check.expect((state.z() - z_ref).lpNorm<Eigen::Infinity>() <= 1e-8 * z_scale,
                   "z drifted after op " + std::to_string(applied_total));

      auto dense = segra::testing::dense_fundamental(view);
      for (NodeId cached : state.cached_columns()) {
        Eigen::VectorXd ref = dense.col(view.local_of(cached));
        Real scale = std::max(1.0, ref.lpNorm<Eigen::Infinity>());
        check.expect((state.column(cached) - ref).lpNorm<Eigen::Infinity>() <= 1e-8 * scale,
                     "column " + std::to_string(cached) + " drifted");
      }
      candidates.set_bucket(selected->op.source,
                            candidate_ops_for(fx.graph, fx.relevance, selected->op.source, tau));
    }
  }
  check.expect(applied_total >= 20, "only " + std::to_string(applied_total) + " ops applied");
  detail = check.ok
               ? "z and every cached column within 1e-8 of recomputation over " +
                     std::to_string(applied_total) + " ops"
               : check.detail;
  return check.ok;
}

struct AlgoRun {
  std::string name;
  OptimizationTrace trace;
  RecGraph graph;
};

std::vector<AlgoRun> run_all_algorithms(const segra::testing::Instance& fx, Real tau, int k,
                                        const SolveOptions& opts, std::uint64_t seed) {
  std::vector<AlgoRun> runs;
  {
    AlgoRun run{"heu", {}, fx.graph};
    run.trace = heuristic_k_rewiring(run.graph, fx.relevance, tau, k, opts, 4);
    runs.push_back(std::move(run));
  }
  {
    AlgoRun run{"bsl1", {}, fx.graph};
    run.trace = baseline_bsl1(run.graph, fx.relevance, tau, k, opts, 4);
    runs.push_back(std::move(run));
  }
  {
    AlgoRun run{"bsl2", {}, fx.graph};
    run.trace = baseline_bsl2(run.graph, fx.relevance, tau, k, opts, 4);
    runs.push_back(std::move(run));
  }
  {
    AlgoRun run{"rnd", {}, fx.graph};
    run.trace = baseline_rnd(run.graph, fx.relevance, tau, k, seed, opts);
    runs.push_back(std::move(run));
  }
  return runs;
}

// ---------------------------------------------------------------- criterion 5
bool criterion_constraint_compliance(std::string& detail) {
  Check check;
  std::size_t audited_runs = 0;
  auto audit_run = [&](const AlgoRun& run, const RelevanceStore& relevance, Real tau, int d) {
    auto audit = quality_audit(run.graph, relevance, tau);
    check.expect(audit.violations == 0,
                 run.name + ": " + std::to_string(audit.violations) + " quality violations");
    check.expect(audit.min_loss >= tau, run.name + ": min loss below tau");
    for (NodeId u = 0; u < run.graph.node_count(); ++u) {
      const auto& slots = run.graph.out_list(u).slots;
      check.expect(static_cast<int>(slots.size()) == d, run.name + ": degree changed");
      for (std::size_t i = 0; i < slots.size(); ++i)
        for (std::size_t j = i + 1; j < slots.size(); ++j)
          check.expect(slots[i].item != slots[j].item, run.name + ": duplicate edge");
    }
    ++audited_runs;
  };

  for (std::uint64_t seed : {11u, 23u}) {
    for (Real tau : {0.8, 0.9}) {
      auto maybe = segra::testing::build_valid_instance(200, 5, 0.5, 20, seed);
      if (!maybe) continue;
      for (const auto& run : run_all_algorithms(*maybe, tau, 10, SolveOptions{}, seed))
        audit_run(run, maybe->relevance, tau, 5);
    }
  }
  auto homophilous = segra::testing::build_homophilous(2000, 10, 0.9, 40, 5);
  check.expect(unreachable_harmful_nodes(homophilous.graph).empty(), "homophilous reachability");
  for (const auto& run : run_all_algorithms(homophilous, 0.9, 20, SolveOptions{}, 5))
    audit_run(run, homophilous.relevance, 0.9, 10);

  check.expect(audited_runs >= 16, "only " + std::to_string(audited_runs) + " runs audited");
  detail = check.ok ? "zero violations across " + std::to_string(audited_runs) + " runs"
                    : check.detail;
  return check.ok;
}

// ---------------------------------------------------------------- criterion 6
bool criterion_monotonicity_dominance(std::string& detail) {
  Check check;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto fx = segra::testing::build_homophilous(2000, 10, 0.9, 40, seed);
    if (!unreachable_harmful_nodes(fx.graph).empty()) {
      check.expect(false, "homophilous instance not reachable");
      continue;
    }
    auto runs = run_all_algorithms(fx, 0.9, 20, SolveOptions{}, seed);
    Real heu_first_delta = -1, heu_final = -1;
    for (const auto& run : runs) {
      Real prev = run.trace.initial_segregation;
      for (const auto& step : run.trace.steps) {
        check.expect(step.z_after <= prev + 1e-9, run.name + ": Z increased");
        prev = step.z_after;
      }
      if (run.name == "heu") {
        heu_final = run.trace.final_segregation();
        heu_first_delta = run.trace.steps.empty() ? 0 : run.trace.steps.front().delta;
      }
    }
    for (const auto& run : runs) {
      if (run.name == "heu") continue;
      Real first = run.trace.steps.empty() ? 0 : run.trace.steps.front().delta;
      check.expect(heu_first_delta + 1e-9 >= first,
                   run.name + ": first-step delta beats the greedy first step");
      if (run.name == "bsl2" || run.name == "rnd")
        check.expect(heu_final <= run.trace.final_segregation() + 1e-9,
                     run.name + ": final Z below the greedy final Z");
    }
  }
  detail = check.ok ? "traces monotone; greedy dominates first steps and bsl2/rnd finals on 3 seeds"
                    : check.detail;
  return check.ok;
}

// ---------------------------------------------------------------- criterion 7
bool criterion_tau_sensitivity(std::string& detail) {
  Check check;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto fx = segra::testing::build_homophilous(2000, 5, 0.9, 30, seed);
    if (!unreachable_harmful_nodes(fx.graph).empty()) {
      check.expect(false, "homophilous instance not reachable");
      continue;
    }
    RecGraph loose_graph = fx.graph;
    auto loose = heuristic_k_rewiring(loose_graph, fx.relevance, 0.5, 20, SolveOptions{}, 4);
    RecGraph tight_graph = fx.graph;
    auto tight = heuristic_k_rewiring(tight_graph, fx.relevance, 0.99, 20, SolveOptions{}, 4);

    check.expect(!tight.steps.empty(), "tau=0.99 admits no ops at all");
    check.expect(tight.final_ratio() < 1.0, "no strict decrease at tau=0.99");
    bool plateau = tight.zero_progress_steps() > 0 ||
                   tight.terminal == TerminalReason::CandidatesExhausted;
    check.expect(plateau, "tau=0.99 trace shows no plateau");
    check.expect(loose.final_ratio() <= tight.final_ratio() + 1e-12,
                 "looser floor did not dominate: seed " + std::to_string(seed));
  }
  detail = check.ok ? "ratio(tau=0.5) <= ratio(tau=0.99) with plateaus flagged on 3 seeds"
                    : check.detail;
  return check.ok;
}

// ---------------------------------------------------------------- criterion 8
bool criterion_monte_carlo_agreement(std::string& detail) {
  Check check;
  auto maybe = segra::testing::build_valid_instance(500, 5, 0.5, 20, 17);
  check.expect(maybe.has_value(), "no valid 500-node instance");
  if (!maybe) {
    detail = check.detail;
    return false;
  }
  SegregationState state(maybe->graph, SolveOptions{1e-10, 0});
  const auto& view = state.view();
  int within = 0, sampled = 0;
  Rng rng(99);
  while (sampled < 20) {
    NodeId node =
        view.harmful[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(view.count())))];
    long cap = static_cast<long>(100.0 * std::max(1.0, state.segregation()));
    auto estimate = monte_carlo_hitting(maybe->graph, node, 100000, 1000 + sampled, cap, 4);
    Real band = 4.0 * estimate.std_error;
    if (std::abs(estimate.mean - state.z_of(node)) <= std::max(band, 1e-9)) ++within;
    ++sampled;
  }
  check.expect(within >= 19, "only " + std::to_string(within) + "/20 within 4 standard errors");
  detail = check.ok ? std::to_string(within) + "/20 nodes within 4 standard errors" : check.detail;
  return check.ok;
}

// ---------------------------------------------------------------- criterion 9
bool criterion_scaling(std::string& detail) {
  Check check;
  std::vector<NodeId> sizes{1000, 10000, 100000};
  std::vector<double> per_iteration;
  std::vector<double> probe_rates;
  for (NodeId n : sizes) {
    auto raw = make_skewed_instance(n, 10, 32, 41);
    RecGraph graph = build_top_d_graph(raw.relevance, raw.labels, 10,
                                       RankDiscount::make(DiscountKind::Uniform, 10));
    check.expect(unreachable_harmful_nodes(graph).empty(),
                 "skewed instance unreachable at n=" + std::to_string(n));
    auto trace = heuristic_k_rewiring(graph, raw.relevance, 0.9, 6, SolveOptions{}, 4);
    check.expect(trace.steps.size() == 6, "expected 6 ops at n=" + std::to_string(n));
    double mean_ms = 0;
    for (const auto& step : trace.steps) mean_ms += step.wall_ms;
    mean_ms /= std::max<std::size_t>(1, trace.steps.size());
    per_iteration.push_back(mean_ms);
    probe_rates.push_back(static_cast<double>(trace.stats.probes) /
                          std::max<std::size_t>(1, trace.stats.candidates));
  }
  double slope = std::log(per_iteration.back() / per_iteration.front()) /
                 std::log(static_cast<double>(sizes.back()) / static_cast<double>(sizes.front()));
  check.expect(slope < 1.5, "log-log slope " + std::to_string(slope) + " >= 1.5");
  check.expect(probe_rates.back() < 50.0, "probe rate not small");
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer),
                "per-iteration ms {%.2f, %.2f, %.2f}, slope %.3f, probes/candidate {%.3f, %.3f, %.3f}",
                per_iteration[0], per_iteration[1], per_iteration[2], slope, probe_rates[0],
                probe_rates[1], probe_rates[2]);
  detail = check.ok ? buffer : check.detail + " [" + buffer + "]";
  return check.ok;
}

struct Criterion {
  int number;
  const char* name;
  bool (*run)(std::string&);
};

const Criterion kCriteria[] = {
    {1, "gadget exactness", criterion_gadget_exactness},
    {2, "cover arithmetic", criterion_cover_arithmetic},
    {3, "1-rewiring optimality", criterion_one_rewiring_optimality},
    {4, "incremental-update fidelity", criterion_incremental_fidelity},
    {5, "constraint compliance", criterion_constraint_compliance},
    {6, "monotonicity and dominance", criterion_monotonicity_dominance},
    {7, "tau sensitivity at scale", criterion_tau_sensitivity},
    {8, "Monte-Carlo agreement", criterion_monte_carlo_agreement},
    {9, "scaling sanity", criterion_scaling},
};

}  // namespace

int main(int argc, char** argv) {
  set_log_level(LogLevel::Error);
  int selected = 0;
  if (argc > 1 && std::strcmp(argv[1], "all") != 0) selected = std::atoi(argv[1]);

  int failures = 0;
  for (const auto& criterion : kCriteria) {
    if (selected != 0 && criterion.number != selected) continue;
    std::string note;
    bool ok = criterion.run(note);
    std::printf("[%s] criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", criterion.number,
                criterion.name, note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
