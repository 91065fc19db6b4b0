#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "segra/graph.hpp"
#include "segra/types.hpp"

namespace segra {

struct SolveOptions {
  Real tol = 1e-8;    // max-norm step change
  long max_iter = 0;  // 0 = auto, capped from an upper estimate of the walk length
};

struct SolveStats {
  long iterations = 0;
};

// Transition structure restricted to harmful-to-harmful edges. Neutral nodes
// are absorbing, so their rows are dropped rather than stored.
struct AbsorbingView {
  std::vector<NodeId> harmful;   // local index -> node id, ascending
  std::vector<int32_t> local;    // node id -> local index, -1 for neutral
  Eigen::SparseMatrix<Real, Eigen::RowMajor> transitions;  // n_h x n_h

  int count() const { return static_cast<int>(harmful.size()); }
  bool is_harmful(NodeId node) const { return local[static_cast<std::size_t>(node)] >= 0; }
  int local_of(NodeId node) const { return local[static_cast<std::size_t>(node)]; }
  // Zeroes the (u, v) coefficient; both must be harmful.
  void drop_edge(NodeId u, NodeId v);
};

// Throws UnreachableHarmfulComponent when some harmful node cannot be absorbed.
AbsorbingView absorbing_view(const RecGraph& graph);

// Expected steps to absorption per harmful node (local indexing):
// z = 1 + M z, solved by fixed-point iteration from zero.
Eigen::VectorXd segregation_vector(const AbsorbingView& view, const SolveOptions& opts = {},
                                   SolveStats* stats = nullptr);

// Column u of the fundamental matrix (I - M)^-1: x = e_u + M x. Entry at
// local row r is the expected visit count to u for a walk started at r.
Eigen::VectorXd fundamental_column(const AbsorbingView& view, NodeId u,
                                   const SolveOptions& opts = {}, SolveStats* stats = nullptr);

// Row h of the fundamental matrix: expected visit counts from h to every
// harmful node; solves the transposed system. Row entries sum to z_h.
Eigen::VectorXd fundamental_row(const AbsorbingView& view, NodeId h,
                                const SolveOptions& opts = {}, SolveStats* stats = nullptr);

struct Segregation {
  Real value = 0;                 // 0 when there are no harmful nodes
  std::optional<NodeId> argmax;   // lowest node id on ties
};

Segregation graph_segregation(const Eigen::VectorXd& z, const AbsorbingView& view);

// Exact z by dense LU on (I - M) z = 1. Guard bounds the harmful-node count.
Eigen::VectorXd dense_oracle_z(const RecGraph& graph, std::size_t guard = 2000);
Eigen::VectorXd dense_oracle_z(const AbsorbingView& view, std::size_t guard = 2000);

struct HittingEstimate {
  Real mean = 0;
  long trials = 0;
  Real std_error = 0;
  long capped = 0;  // walks stopped at step_cap, counted at the cap
};

// Simulated walks from u until a neutral node is hit. Deterministic for a
// fixed seed regardless of thread count. step_cap 0 means 10^6.
HittingEstimate monte_carlo_hitting(const RecGraph& graph, NodeId u, long trials,
                                    std::uint64_t seed, long step_cap = 0, int threads = 1);

// Segregation vector plus a lazily materialized fundamental-matrix column
// cache, kept consistent across rewirings by rank-one updates. Reads are safe
// concurrently once columns are materialized; update_after_rewiring needs
// exclusive access.
class SegregationState {
 public:
  SegregationState(const RecGraph& graph, SolveOptions opts = {});

  const AbsorbingView& view() const { return view_; }
  const Eigen::VectorXd& z() const { return z_; }
  Real z_of(NodeId node) const { return z_[view_.local_of(node)]; }
  Real segregation() const { return max_.value; }
  std::optional<NodeId> argmax() const { return max_.argmax; }
  const SolveOptions& options() const { return opts_; }

  // Materializes (or returns) column `source` of the fundamental matrix.
  const Eigen::VectorXd& column(NodeId source);
  bool has_column(NodeId source) const;
  std::vector<NodeId> cached_columns() const;  // ascending
  // Bounds the cache (least-recently-materialized eviction); 0 = unbounded.
  void set_cache_cap(std::size_t cap);
  // Fills missing columns for a batch in parallel; results are identical to
  // sequential materialization.
  void prefetch_columns(std::span<const NodeId> sources, int threads);

  // Decrease of z_h when op executes: f[h,u] * z_v / (1/p + f[v,u]). Always >= 0.
  Real delta_segregation(NodeId h, const RewiringOp& op);

  // Applies the rank-one update to z and every cached column, then drops the
  // rewired edge from the view. Call with the pre-op state; the op must have
  // been validated against the graph.
  void update_after_rewiring(const RewiringOp& op);

  // Local indices sorted by z descending, ties by ascending node id.
  std::vector<int> harmful_sorted_by_z() const;

 private:
  void note_use(NodeId source);
  void evict_if_needed();

  AbsorbingView view_;
  Eigen::VectorXd z_;
  Segregation max_;
  SolveOptions opts_;
  std::unordered_map<NodeId, Eigen::VectorXd> columns_;
  std::vector<NodeId> use_order_;  // maintained only when cap_ > 0
  std::size_t cap_ = 0;
  mutable std::mutex mutex_;
};

}  // namespace segra
