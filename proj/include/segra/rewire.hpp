#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "segra/absorbing.hpp"
#include "segra/graph.hpp"

namespace segra {

// Feasible rewirings bucketed by source node. Every contained op keeps the
// source's nDCG at or above tau against its original ideal DCG, with the
// insertion target fixed to the source's best feasible neutral non-neighbor.
class CandidateSet {
 public:
  explicit CandidateSet(NodeId node_count)
      : buckets_(static_cast<std::size_t>(node_count)) {}

  const std::vector<RewiringOp>& bucket(NodeId source) const {
    return buckets_[static_cast<std::size_t>(source)];
  }
  void set_bucket(NodeId source, std::vector<RewiringOp> ops);
  std::size_t size() const { return total_; }
  // All ops ordered by (source asc, rank asc).
  std::vector<RewiringOp> flatten() const;

 private:
  std::vector<std::vector<RewiringOp>> buckets_;
  std::size_t total_ = 0;
};

// Neutral non-neighbor of u with maximal positive relevance, ties to the
// lowest id. nullopt when none exists.
std::optional<NodeId> find_best_target(const RecGraph& graph, const RelevanceStore& relevance,
                                       NodeId u);
// Throwing variant (NoFeasibleTarget).
NodeId best_target(const RecGraph& graph, const RelevanceStore& relevance, NodeId u);

// Would replacing the slot at `rank` with an item scored `new_score` keep the
// owner's quality loss at or above tau?
bool swap_keeps_quality(const RecGraph& graph, NodeId u, int rank, Real new_score, Real tau);

// Feasible ops for one source against its current list (original ideal DCG
// stays the quality denominator).
std::vector<RewiringOp> candidate_ops_for(const RecGraph& graph, const RelevanceStore& relevance,
                                          NodeId u, Real tau);

CandidateSet generate_candidates(const RecGraph& graph, const RelevanceStore& relevance, Real tau);

struct DeltaResult {
  Real delta = 0;
  int probes = 0;  // per-node decrease evaluations spent on this op
};

// Decrease of max segregation if `op` executes, probing top-z nodes only:
// evaluate the top node; when its new value stays above the runner-up that is
// the answer, otherwise probe every node whose z exceeds the new top value.
DeltaResult evaluate_delta(const RewiringOp& op, SegregationState& state,
                           const std::vector<int>& sorted_harmful);

struct SearchStats {
  std::size_t candidates = 0;  // ops scanned across selection passes
  std::size_t evaluated = 0;   // ops given an exact delta
  long long probes = 0;        // per-node decrease evaluations
};

struct Selected {
  RewiringOp op;
  Real delta = 0;
};

// Exact argmax-delta op, ties to the lexicographically smallest (u, v, w).
// Candidates are screened by the bound delta <= f[h1,u] * z_v * p, so only
// ops that can still win are evaluated exactly. nullopt iff no candidates.
std::optional<Selected> select_best_rewiring(SegregationState& state,
                                             const CandidateSet& candidates, int threads = 1,
                                             SearchStats* stats = nullptr);

std::optional<Selected> optimal_one_rewiring(const RecGraph& graph,
                                             const RelevanceStore& relevance,
                                             SegregationState& state, Real tau, int threads = 1);

// Exhaustive search: every harmful out-edge times every feasible neutral
// target, scoring each op by a dense recomputation of Z.
std::optional<Selected> brute_force_one_rewiring(const RecGraph& graph,
                                                 const RelevanceStore& relevance, Real tau,
                                                 std::size_t guard = 2000);

struct TraceStep {
  int index = 0;  // 1-based
  RewiringOp op;
  Real delta = 0;
  Real z_before = 0;
  Real z_after = 0;
  Real ratio = 0;  // z_after / initial segregation
  std::optional<NodeId> argmax;
  double wall_ms = 0;
  bool zero_progress = false;
};

enum class TerminalReason { KReached, CandidatesExhausted };

const char* to_string(TerminalReason reason);

struct OptimizationTrace {
  std::string algorithm;
  Real initial_segregation = 0;
  std::vector<TraceStep> steps;
  TerminalReason terminal = TerminalReason::KReached;
  SearchStats stats;

  Real final_segregation() const {
    return steps.empty() ? initial_segregation : steps.back().z_after;
  }
  Real final_ratio() const {
    return initial_segregation > 0 ? final_segregation() / initial_segregation : 1.0;
  }
  std::size_t zero_progress_steps() const;
};

// Greedy k-rewiring: repeatedly applies the best single op, updating z and
// cached columns incrementally and regenerating the rewired source's
// candidates against its updated list.
OptimizationTrace heuristic_k_rewiring(RecGraph& graph, const RelevanceStore& relevance, Real tau,
                                       int k, const SolveOptions& opts = {}, int threads = 1);

// Scores all candidates once against the initial state, then applies the top
// k by delta (ties lexicographic), skipping ops whose preconditions fail.
OptimizationTrace baseline_bsl1(RecGraph& graph, const RelevanceStore& relevance, Real tau, int k,
                                const SolveOptions& opts = {}, int threads = 1);

// Restricts sources to the k harmful nodes with the largest initial z, then
// proceeds like bsl1.
OptimizationTrace baseline_bsl2(RecGraph& graph, const RelevanceStore& relevance, Real tau, int k,
                                const SolveOptions& opts = {}, int threads = 1);

// Uniform sample without replacement from the candidate set.
OptimizationTrace baseline_rnd(RecGraph& graph, const RelevanceStore& relevance, Real tau, int k,
                               std::uint64_t seed, const SolveOptions& opts = {});

// Repeated brute-force 1-rewiring with dense recomputation; small graphs only.
OptimizationTrace brute_force_k_rewiring(RecGraph& graph, const RelevanceStore& relevance,
                                         Real tau, int k, std::size_t guard = 2000);

}  // namespace segra
