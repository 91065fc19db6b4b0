#include "segra/rewire.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

#include "segra/log.hpp"
#include "segra/rng.hpp"

namespace segra {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Structural preconditions only; quality was checked at candidate time and a
// source's feasible ops share one insertion target, so at most one of them
// can ever apply.
bool rewiring_applicable(const RecGraph& graph, const RewiringOp& op) {
  const NodeId n = graph.node_count();
  if (op.source < 0 || op.source >= n || op.removed < 0 || op.removed >= n || op.inserted < 0 ||
      op.inserted >= n)
    return false;
  if (!graph.is_harmful(op.source) || !graph.is_harmful(op.removed) ||
      graph.is_harmful(op.inserted))
    return false;
  const auto& list = graph.out_list(op.source);
  if (op.rank < 1 || op.rank > static_cast<int>(list.slots.size())) return false;
  if (list.slots[static_cast<std::size_t>(op.rank - 1)].item != op.removed) return false;
  if (list.contains(op.inserted)) return false;
  return op.prob == graph.discount().at(op.rank);
}

void parallel_chunks(int threads, long total, const std::function<void(long, long)>& chunk) {
  if (threads <= 1 || total <= 1) {
    chunk(0, total);
    return;
  }
  long parts = std::min<long>(threads, total);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(parts));
  long base = total / parts, extra = total % parts, begin = 0;
  for (long p = 0; p < parts; ++p) {
    long size = base + (p < extra ? 1 : 0);
    pool.emplace_back(chunk, begin, begin + size);
    begin += size;
  }
  for (auto& t : pool) t.join();
}

struct ScoredOp {
  RewiringOp op;
  Real delta;
  int probes;
};

// Exact deltas for every op; columns are prefetched so evaluation is a pure
// read fan-out.
std::vector<ScoredOp> score_all(SegregationState& state, const std::vector<RewiringOp>& ops,
                                int threads, SearchStats* stats) {
  std::vector<NodeId> sources;
  sources.reserve(ops.size());
  for (const auto& op : ops) sources.push_back(op.source);
  state.prefetch_columns(sources, threads);
  const auto sorted = state.harmful_sorted_by_z();
  std::vector<ScoredOp> scored(ops.size());
  parallel_chunks(threads, static_cast<long>(ops.size()), [&](long begin, long end) {
    for (long i = begin; i < end; ++i) {
      const auto& op = ops[static_cast<std::size_t>(i)];
      DeltaResult r = evaluate_delta(op, state, sorted);
      scored[static_cast<std::size_t>(i)] = {op, r.delta, r.probes};
    }
  });
  if (stats) {
    stats->candidates += ops.size();
    stats->evaluated += ops.size();
    for (const auto& s : scored) stats->probes += s.probes;
  }
  return scored;
}

struct StepTimer {
  Clock::time_point start = Clock::now();
};

void record_step(OptimizationTrace& trace, SegregationState& state, const RewiringOp& op,
                 Real delta, Real z_before, const StepTimer& timer) {
  TraceStep step;
  step.index = static_cast<int>(trace.steps.size()) + 1;
  step.op = op;
  step.delta = delta;
  step.z_before = z_before;
  step.z_after = state.segregation();
  step.ratio = trace.initial_segregation > 0 ? step.z_after / trace.initial_segregation : 1.0;
  step.argmax = state.argmax();
  step.wall_ms = elapsed_ms(timer.start);
  step.zero_progress = !(delta > 0);
  trace.steps.push_back(step);
  SEGRA_LOG_INFO("step %d: rewire %s delta=%.8g Z=%.8g ratio=%.6f", step.index,
                 to_string(op).c_str(), delta, step.z_after, step.ratio);
}

// Applies ops in the given order until k succeed, skipping ops whose
// structural preconditions no longer hold.
void apply_sequence(RecGraph& graph, const RelevanceStore& relevance,
                    const std::vector<RewiringOp>& ordered, int k, SegregationState& state,
                    OptimizationTrace& trace) {
  int applied = 0;
  for (const auto& op : ordered) {
    if (applied >= k) break;
    if (!rewiring_applicable(graph, op)) continue;
    StepTimer timer;
    state.column(op.source);
    Real z_before = state.segregation();
    apply_rewiring(graph, relevance, op);
    state.update_after_rewiring(op);
    record_step(trace, state, op, z_before - state.segregation(), z_before, timer);
    ++applied;
  }
  trace.terminal = applied >= k ? TerminalReason::KReached : TerminalReason::CandidatesExhausted;
}

void require_tau(Real tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0,1)");
}

}  // namespace

const char* to_string(TerminalReason reason) {
  return reason == TerminalReason::KReached ? "k reached" : "candidates exhausted";
}

std::size_t OptimizationTrace::zero_progress_steps() const {
  std::size_t count = 0;
  for (const auto& step : steps)
    if (step.zero_progress) ++count;
  return count;
}

void CandidateSet::set_bucket(NodeId source, std::vector<RewiringOp> ops) {
  auto& bucket = buckets_[static_cast<std::size_t>(source)];
  total_ -= bucket.size();
  bucket = std::move(ops);
  total_ += bucket.size();
}

std::vector<RewiringOp> CandidateSet::flatten() const {
  std::vector<RewiringOp> out;
  out.reserve(total_);
  for (const auto& bucket : buckets_) out.insert(out.end(), bucket.begin(), bucket.end());
  return out;
}

std::optional<NodeId> find_best_target(const RecGraph& graph, const RelevanceStore& relevance,
                                       NodeId u) {
  const auto& list = graph.out_list(u);
  NodeId best = -1;
  Real best_score = 0.0;
  for (const auto& entry : relevance.row(u)) {
    if (!(entry.score > 0.0)) continue;
    if (entry.item >= graph.node_count()) continue;
    if (graph.is_harmful(entry.item)) continue;
    if (entry.item == u || list.contains(entry.item)) continue;
    // rows are id-ascending, so a strict improvement keeps the lowest id on ties
    if (entry.score > best_score) {
      best_score = entry.score;
      best = entry.item;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

NodeId best_target(const RecGraph& graph, const RelevanceStore& relevance, NodeId u) {
  auto target = find_best_target(graph, relevance, u);
  if (!target) throw NoFeasibleTarget(u);
  return *target;
}

bool swap_keeps_quality(const RecGraph& graph, NodeId u, int rank, Real new_score, Real tau) {
  Real ideal = graph.ideal_dcg(u);
  if (!(ideal > 0)) return false;
  const auto& list = graph.out_list(u);
  Real current = dcg(list);
  Real weight = dcg_weight(rank);
  Real hypothetical =
      current - list.slots[static_cast<std::size_t>(rank - 1)].score * weight + new_score * weight;
  return hypothetical / ideal >= tau;
}

std::vector<RewiringOp> candidate_ops_for(const RecGraph& graph, const RelevanceStore& relevance,
                                          NodeId u, Real tau) {
  std::vector<RewiringOp> ops;
  if (!graph.is_harmful(u)) return ops;
  auto target = find_best_target(graph, relevance, u);
  if (!target) return ops;
  Real target_score = relevance.score(u, *target);
  const auto& list = graph.out_list(u);
  for (std::size_t i = 0; i < list.slots.size(); ++i) {
    NodeId v = list.slots[i].item;
    if (!graph.is_harmful(v)) continue;
    int rank = static_cast<int>(i) + 1;
    if (!swap_keeps_quality(graph, u, rank, target_score, tau)) continue;
    ops.push_back({u, v, *target, graph.discount().at(rank), rank});
  }
  return ops;
}

CandidateSet generate_candidates(const RecGraph& graph, const RelevanceStore& relevance,
                                 Real tau) {
  require_tau(tau);
  CandidateSet set(graph.node_count());
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    if (!graph.is_harmful(u)) continue;
    auto ops = candidate_ops_for(graph, relevance, u, tau);
    if (!ops.empty()) set.set_bucket(u, std::move(ops));
  }
  return set;
}

DeltaResult evaluate_delta(const RewiringOp& op, SegregationState& state,
                           const std::vector<int>& sorted_harmful) {
  const auto& view = state.view();
  const auto& z = state.z();
  const Eigen::VectorXd& col = state.column(op.source);
  const int lv = view.local_of(op.removed);
  const Real z_v = z[lv];
  const Real denom = 1.0 / op.prob + col[lv];

  const int h1 = sorted_harmful[0];
  const Real drop1 = col[h1] * z_v / denom;
  const Real top_after = z[h1] - drop1;
  if (sorted_harmful.size() == 1 || top_after > z[sorted_harmful[1]]) return {drop1, 1};

  // nodes whose z exceeds the dropped top value could now carry the max
  auto boundary = std::lower_bound(sorted_harmful.begin() + 1, sorted_harmful.end(), top_after,
                                   [&](int local, Real value) { return z[local] > value; });
  Real new_max = top_after;
  int probes = 1;
  for (auto it = sorted_harmful.begin() + 1; it != boundary; ++it) {
    const Real drop = col[*it] * z_v / denom;
    new_max = std::max(new_max, z[*it] - drop);
    ++probes;
  }
  return {z[h1] - new_max, probes};
}

std::optional<Selected> select_best_rewiring(SegregationState& state,
                                             const CandidateSet& candidates, int threads,
                                             SearchStats* stats) {
  if (candidates.size() == 0 || state.view().count() == 0) return std::nullopt;
  const auto sorted = state.harmful_sorted_by_z();
  const auto& z = state.z();
  const int h1 = sorted[0];
  const NodeId h1_node = state.view().harmful[static_cast<std::size_t>(h1)];
  const Eigen::VectorXd reach = fundamental_row(state.view(), h1_node, state.options());

  auto ops = candidates.flatten();
  if (stats) stats->candidates += ops.size();
  RewiringOp lex_min = ops.front();
  for (const auto& op : ops)
    if (lex_less(op, lex_min)) lex_min = op;

  // delta(o) <= f[h1,u] * z_v * p: screen on the bound, evaluate survivors
  struct Screened {
    Real bound;
    RewiringOp op;
  };
  std::vector<Screened> screened;
  screened.reserve(ops.size());
  for (const auto& op : ops) {
    Real bound = reach[state.view().local_of(op.source)] * z[state.view().local_of(op.removed)] *
                 op.prob;
    screened.push_back({bound, op});
  }
  std::sort(screened.begin(), screened.end(), [](const Screened& a, const Screened& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return lex_less(a.op, b.op);
  });
  if (!(screened.front().bound > 0)) return Selected{lex_min, 0.0};

  Real best_delta = -1.0;
  RewiringOp best_op;
  const std::size_t wave = static_cast<std::size_t>(std::max(8, threads * 2));
  std::vector<NodeId> wave_sources;
  std::size_t i = 0;
  while (i < screened.size()) {
    if (!(screened[i].bound > 0)) break;
    if (best_delta >= 0 && screened[i].bound < best_delta) break;
    std::size_t end = std::min(i + wave, screened.size());
    wave_sources.clear();
    for (std::size_t j = i; j < end; ++j) {
      if (!(screened[j].bound > 0)) {
        end = j;
        break;
      }
      wave_sources.push_back(screened[j].op.source);
    }
    state.prefetch_columns(wave_sources, threads);
    for (; i < end; ++i) {
      if (best_delta >= 0 && screened[i].bound < best_delta) {
        i = screened.size();
        break;
      }
      DeltaResult r = evaluate_delta(screened[i].op, state, sorted);
      if (stats) {
        ++stats->evaluated;
        stats->probes += r.probes;
      }
      if (r.delta > best_delta ||
          (r.delta == best_delta && lex_less(screened[i].op, best_op))) {
        best_delta = r.delta;
        best_op = screened[i].op;
      }
    }
  }
  if (!(best_delta > 0)) return Selected{lex_min, 0.0};
  return Selected{best_op, best_delta};
}

std::optional<Selected> optimal_one_rewiring(const RecGraph& graph,
                                             const RelevanceStore& relevance,
                                             SegregationState& state, Real tau, int threads) {
  auto candidates = generate_candidates(graph, relevance, tau);
  return select_best_rewiring(state, candidates, threads);
}

std::optional<Selected> brute_force_one_rewiring(const RecGraph& graph,
                                                 const RelevanceStore& relevance, Real tau,
                                                 std::size_t guard) {
  require_tau(tau);
  AbsorbingView view = absorbing_view(graph);
  Eigen::VectorXd z0 = dense_oracle_z(view, guard);
  Real big_z = graph_segregation(z0, view).value;

  std::optional<Selected> best;
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    if (!graph.is_harmful(u)) continue;
    const auto& list = graph.out_list(u);
    for (std::size_t i = 0; i < list.slots.size(); ++i) {
      NodeId v = list.slots[i].item;
      if (!graph.is_harmful(v)) continue;
      int rank = static_cast<int>(i) + 1;
      for (const auto& entry : relevance.row(u)) {
        if (!(entry.score > 0.0)) continue;
        NodeId w = entry.item;
        if (w >= graph.node_count() || graph.is_harmful(w)) continue;
        if (w == u || list.contains(w)) continue;
        if (!swap_keeps_quality(graph, u, rank, entry.score, tau)) continue;
        RewiringOp op{u, v, w, graph.discount().at(rank), rank};
        RecGraph edited = graph;
        apply_rewiring(edited, relevance, op);
        AbsorbingView edited_view = absorbing_view(edited);
        Real new_z = graph_segregation(dense_oracle_z(edited_view, guard), edited_view).value;
        Real delta = big_z - new_z;
        if (!best || delta > best->delta ||
            (delta == best->delta && lex_less(op, best->op)))
          best = Selected{op, delta};
      }
    }
  }
  return best;
}

OptimizationTrace heuristic_k_rewiring(RecGraph& graph, const RelevanceStore& relevance, Real tau,
                                       int k, const SolveOptions& opts, int threads) {
  require_tau(tau);
  OptimizationTrace trace;
  trace.algorithm = "heu";
  SegregationState state(graph, opts);
  trace.initial_segregation = state.segregation();
  SEGRA_LOG_INFO("heu: initial Z=%.8g over %d harmful nodes", trace.initial_segregation,
                 state.view().count());

  auto candidates = generate_candidates(graph, relevance, tau);
  for (int step = 0; step < k; ++step) {
    if (candidates.size() == 0) {
      trace.terminal = TerminalReason::CandidatesExhausted;
      return trace;
    }
    StepTimer timer;
    auto selected = select_best_rewiring(state, candidates, threads, &trace.stats);
    if (!selected) {
      trace.terminal = TerminalReason::CandidatesExhausted;
      return trace;
    }
    const RewiringOp op = selected->op;
    state.column(op.source);
    Real z_before = state.segregation();
    apply_rewiring(graph, relevance, op);
    state.update_after_rewiring(op);
    record_step(trace, state, op, selected->delta, z_before, timer);
    candidates.set_bucket(op.source, candidate_ops_for(graph, relevance, op.source, tau));
  }
  trace.terminal = TerminalReason::KReached;
  return trace;
}

OptimizationTrace baseline_bsl1(RecGraph& graph, const RelevanceStore& relevance, Real tau, int k,
                                const SolveOptions& opts, int threads) {
  require_tau(tau);
  OptimizationTrace trace;
  trace.algorithm = "bsl1";
  SegregationState state(graph, opts);
  trace.initial_segregation = state.segregation();
  auto ops = generate_candidates(graph, relevance, tau).flatten();
  auto scored = score_all(state, ops, threads, &trace.stats);
  std::sort(scored.begin(), scored.end(), [](const ScoredOp& a, const ScoredOp& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    return lex_less(a.op, b.op);
  });
  std::vector<RewiringOp> ordered;
  ordered.reserve(scored.size());
  for (const auto& s : scored) ordered.push_back(s.op);
  apply_sequence(graph, relevance, ordered, k, state, trace);
  return trace;
}

OptimizationTrace baseline_bsl2(RecGraph& graph, const RelevanceStore& relevance, Real tau, int k,
                                const SolveOptions& opts, int threads) {
  require_tau(tau);
  OptimizationTrace trace;
  trace.algorithm = "bsl2";
  SegregationState state(graph, opts);
  trace.initial_segregation = state.segregation();

  auto sorted = state.harmful_sorted_by_z();
  std::vector<char> chosen(static_cast<std::size_t>(graph.node_count()), 0);
  for (int i = 0; i < std::min<int>(k, static_cast<int>(sorted.size())); ++i)
    chosen[static_cast<std::size_t>(
        state.view().harmful[static_cast<std::size_t>(sorted[static_cast<std::size_t>(i)])])] = 1;

  auto all = generate_candidates(graph, relevance, tau).flatten();
  std::vector<RewiringOp> restricted;
  for (const auto& op : all)
    if (chosen[static_cast<std::size_t>(op.source)]) restricted.push_back(op);

  auto scored = score_all(state, restricted, threads, &trace.stats);
  std::sort(scored.begin(), scored.end(), [](const ScoredOp& a, const ScoredOp& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    return lex_less(a.op, b.op);
  });
  std::vector<RewiringOp> ordered;
  ordered.reserve(scored.size());
  for (const auto& s : scored) ordered.push_back(s.op);
  apply_sequence(graph, relevance, ordered, k, state, trace);
  return trace;
}

OptimizationTrace baseline_rnd(RecGraph& graph, const RelevanceStore& relevance, Real tau, int k,
                               std::uint64_t seed, const SolveOptions& opts) {
  require_tau(tau);
  OptimizationTrace trace;
  trace.algorithm = "rnd";
  SegregationState state(graph, opts);
  trace.initial_segregation = state.segregation();
  auto ordered = generate_candidates(graph, relevance, tau).flatten();
  Rng rng(seed);
  shuffle(ordered, rng);
  apply_sequence(graph, relevance, ordered, k, state, trace);
  return trace;
}

OptimizationTrace brute_force_k_rewiring(RecGraph& graph, const RelevanceStore& relevance,
                                         Real tau, int k, std::size_t guard) {
  require_tau(tau);
  OptimizationTrace trace;
  trace.algorithm = "brute";
  {
    AbsorbingView view = absorbing_view(graph);
    trace.initial_segregation = graph_segregation(dense_oracle_z(view, guard), view).value;
  }
  for (int step = 0; step < k; ++step) {
    StepTimer timer;
    auto selected = brute_force_one_rewiring(graph, relevance, tau, guard);
    if (!selected) {
      trace.terminal = TerminalReason::CandidatesExhausted;
      return trace;
    }
    Real z_before = trace.steps.empty() ? trace.initial_segregation : trace.steps.back().z_after;
    apply_rewiring(graph, relevance, selected->op);
    AbsorbingView view = absorbing_view(graph);
    Segregation now = graph_segregation(dense_oracle_z(view, guard), view);
    TraceStep record;
    record.index = static_cast<int>(trace.steps.size()) + 1;
    record.op = selected->op;
    record.delta = selected->delta;
    record.z_before = z_before;
    record.z_after = now.value;
    record.ratio = trace.initial_segregation > 0 ? now.value / trace.initial_segregation : 1.0;
    record.argmax = now.argmax;
    record.wall_ms = elapsed_ms(timer.start);
    record.zero_progress = !(selected->delta > 0);
    trace.steps.push_back(record);
  }
  trace.terminal = TerminalReason::KReached;
  return trace;
}

}  // namespace segra
