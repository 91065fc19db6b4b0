#include "segra/absorbing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "segra/rng.hpp"

namespace segra {

namespace {

constexpr long kHardIterationCeiling = 50'000'000;

// x = b + M x from x = 0. Iterates are monotone non-decreasing, so entries
// stay >= b. Stops once the max-norm step is below tol AND the geometric tail
// estimate step * r / (1 - r) is below tol, which keeps the converged error
// itself near tol even on slowly mixing chains (a bare step test leaves an
// error of roughly tol times the walk length).
//
// The automatic cap is fitted after a 100-iteration warmup from the observed
// contraction ratio: remaining iterations are bounded by ln(step/tol)/(1-r),
// doubled as a safety margin. A floor of ten times the extrapolated limit
// value keeps the cap scaled to the walk length even when the warmup ratio is
// noisy.
template <class MatVec>
Eigen::VectorXd fixed_point_solve(Eigen::Index n, const MatVec& mul, const Eigen::VectorXd& b,
                                  const SolveOptions& opts, SolveStats* stats) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (n == 0) {
    if (stats) stats->iterations = 0;
    return x;
  }
  Eigen::VectorXd next(n);
  long cap = opts.max_iter > 0 ? opts.max_iter : -1;
  Real prev_step = std::numeric_limits<Real>::infinity();
  Real ratio_high = 0.0;  // running upper estimate of the contraction ratio
  for (long iter = 1;; ++iter) {
    mul(x, next);
    next += b;
    Real step = (next - x).lpNorm<Eigen::Infinity>();
    x.swap(next);
    if (stats) stats->iterations = iter;
    Real ratio = std::isfinite(prev_step) && prev_step > 0
                     ? std::clamp(step / prev_step, 0.0, 1.0 - 1e-9)
                     : 0.0;
    ratio_high = std::max(ratio, 0.95 * ratio_high);
    if (step < opts.tol && step * ratio_high / (1.0 - ratio_high) < opts.tol) return x;
    if (cap < 0 && iter == 100) {
      Real remaining = std::log(std::max(step / opts.tol, 2.0)) / (1.0 - std::max(ratio, 0.5));
      Real tail = step * ratio / (1.0 - ratio);
      Real value_upper = 2.0 * (x.maxCoeff() + tail);
      cap = std::max<long>({200, 10 * static_cast<long>(std::ceil(value_upper)),
                            iter + 2 * static_cast<long>(std::ceil(remaining))});
      cap = std::min(cap, kHardIterationCeiling);
    }
    if (cap > 0 && iter >= cap) throw NotConverged(iter);
    prev_step = step;
  }
}

void run_parallel(int threads, long total, const std::function<void(long, long)>& chunk) {
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

}  // namespace

void AbsorbingView::drop_edge(NodeId u, NodeId v) {
  int lu = local_of(u), lv = local_of(v);
  transitions.coeffRef(lu, lv) = 0.0;
}

AbsorbingView absorbing_view(const RecGraph& graph) {
  auto unreachable = unreachable_harmful_nodes(graph);
  if (!unreachable.empty()) throw UnreachableHarmfulComponent(std::move(unreachable));

  AbsorbingView view;
  const NodeId n = graph.node_count();
  view.local.assign(static_cast<std::size_t>(n), -1);
  for (NodeId u = 0; u < n; ++u)
    if (graph.is_harmful(u)) {
      view.local[static_cast<std::size_t>(u)] = static_cast<int32_t>(view.harmful.size());
      view.harmful.push_back(u);
    }
  const int nh = view.count();
  std::vector<Eigen::Triplet<Real>> triplets;
  triplets.reserve(static_cast<std::size_t>(nh) * static_cast<std::size_t>(graph.degree()));
  for (int lu = 0; lu < nh; ++lu) {
    NodeId u = view.harmful[static_cast<std::size_t>(lu)];
    const auto& list = graph.out_list(u);
    for (std::size_t i = 0; i < list.slots.size(); ++i) {
      NodeId v = list.slots[i].item;
      int lv = view.local_of(v);
      if (lv >= 0)
        triplets.emplace_back(lu, lv, graph.discount().at(static_cast<int>(i) + 1));
    }
  }
  view.transitions.resize(nh, nh);
  view.transitions.setFromTriplets(triplets.begin(), triplets.end());
  view.transitions.makeCompressed();
  return view;
}

Eigen::VectorXd segregation_vector(const AbsorbingView& view, const SolveOptions& opts,
                                   SolveStats* stats) {
  const Eigen::Index n = view.transitions.rows();
  auto mul = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out.noalias() = view.transitions * x;
  };
  return fixed_point_solve(n, mul, Eigen::VectorXd::Ones(n), opts, stats);
}

Eigen::VectorXd fundamental_column(const AbsorbingView& view, NodeId u, const SolveOptions& opts,
                                   SolveStats* stats) {
  const Eigen::Index n = view.transitions.rows();
  int lu = view.local_of(u);
  if (lu < 0) throw Error("fundamental_column: node " + std::to_string(u) + " is not harmful");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[lu] = 1.0;
  auto mul = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out.noalias() = view.transitions * x;
  };
  return fixed_point_solve(n, mul, b, opts, stats);
}

Eigen::VectorXd fundamental_row(const AbsorbingView& view, NodeId h, const SolveOptions& opts,
                                SolveStats* stats) {
  const Eigen::Index n = view.transitions.rows();
  int lh = view.local_of(h);
  if (lh < 0) throw Error("fundamental_row: node " + std::to_string(h) + " is not harmful");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[lh] = 1.0;
  auto mul = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out.noalias() = view.transitions.transpose() * x;
  };
  return fixed_point_solve(n, mul, b, opts, stats);
}

Segregation graph_segregation(const Eigen::VectorXd& z, const AbsorbingView& view) {
  Segregation result;
  if (z.size() == 0) return result;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < z.size(); ++i)
    if (z[i] > z[best]) best = i;  // strict: keeps the lowest id on ties
  result.value = z[best];
  result.argmax = view.harmful[static_cast<std::size_t>(best)];
  return result;
}

Eigen::VectorXd dense_oracle_z(const AbsorbingView& view, std::size_t guard) {
  const std::size_t nh = static_cast<std::size_t>(view.count());
  if (nh > guard) throw TooLargeForDenseOracle(nh, guard);
  if (nh == 0) return Eigen::VectorXd();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(nh),
                                                     static_cast<Eigen::Index>(nh));
  system -= Eigen::MatrixXd(view.transitions);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(nh));
  Eigen::VectorXd z = lu.solve(ones);
  Real residual = (system * z - ones).lpNorm<Eigen::Infinity>();
  if (!std::isfinite(residual) || residual > 1e-6 * std::max(1.0, z.lpNorm<Eigen::Infinity>()))
    throw SingularSystem("dense hitting-time system is numerically singular");
  return z;
}

Eigen::VectorXd dense_oracle_z(const RecGraph& graph, std::size_t guard) {
  return dense_oracle_z(absorbing_view(graph), guard);
}

HittingEstimate monte_carlo_hitting(const RecGraph& graph, NodeId u, long trials,
                                    std::uint64_t seed, long step_cap, int threads) {
  if (!graph.is_harmful(u))
    throw Error("monte_carlo_hitting: node " + std::to_string(u) + " is not harmful");
  if (trials < 1) throw Error("monte_carlo_hitting: trials must be >= 1");
  if (step_cap <= 0) step_cap = 1'000'000;

  const auto& table = graph.discount().table;
  const int d = graph.degree();
  std::vector<long long> sums(static_cast<std::size_t>(std::max(threads, 1)), 0);
  std::vector<long long> squares(sums.size(), 0);
  std::vector<long long> capped(sums.size(), 0);
  std::atomic<int> worker{0};

  auto chunk = [&](long begin, long end) {
    int slot = worker.fetch_add(1);
    long long sum = 0, sq = 0, cap_hits = 0;
    for (long trial = begin; trial < end; ++trial) {
      Rng rng = rng_stream(seed, static_cast<std::uint64_t>(trial));
      NodeId at = u;
      long steps = 0;
      for (;;) {
        ++steps;
        Real draw = rng.uniform01();
        const auto& slots = graph.out_list(at).slots;
        NodeId next = slots[static_cast<std::size_t>(d - 1)].item;
        Real acc = 0;
        for (int i = 0; i < d; ++i) {
          acc += table[static_cast<std::size_t>(i)];
          if (draw < acc) {
            next = slots[static_cast<std::size_t>(i)].item;
            break;
          }
        }
        at = next;
        if (!graph.is_harmful(at)) break;
        if (steps >= step_cap) {
          ++cap_hits;
          break;
        }
      }
      sum += steps;
      sq += steps * steps;
    }
    sums[static_cast<std::size_t>(slot)] = sum;
    squares[static_cast<std::size_t>(slot)] = sq;
    capped[static_cast<std::size_t>(slot)] = cap_hits;
  };
  run_parallel(std::max(threads, 1), trials, chunk);

  long long sum = 0, sq = 0;
  HittingEstimate estimate;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    sum += sums[i];
    sq += squares[i];
    estimate.capped += capped[i];
  }
  estimate.trials = trials;
  estimate.mean = static_cast<Real>(sum) / static_cast<Real>(trials);
  if (trials > 1) {
    Real variance = (static_cast<Real>(sq) - static_cast<Real>(trials) * estimate.mean *
                                                 estimate.mean) /
                    static_cast<Real>(trials - 1);
    estimate.std_error = std::sqrt(std::max(variance, 0.0) / static_cast<Real>(trials));
  }
  return estimate;
}

SegregationState::SegregationState(const RecGraph& graph, SolveOptions opts)
    : view_(absorbing_view(graph)), opts_(opts) {
  z_ = segregation_vector(view_, opts_);
  max_ = graph_segregation(z_, view_);
}

const Eigen::VectorXd& SegregationState::column(NodeId source) {
  {
    std::unique_lock lock(mutex_);
    auto it = columns_.find(source);
    if (it != columns_.end()) {
      note_use(source);
      return it->second;
    }
  }
  Eigen::VectorXd col = fundamental_column(view_, source, opts_);
  std::unique_lock lock(mutex_);
  // another thread may have filled the slot meanwhile; identical values either way
  auto [pos, inserted] = columns_.try_emplace(source, std::move(col));
  if (inserted) {
    note_use(source);
    evict_if_needed();
  }
  return pos->second;
}

bool SegregationState::has_column(NodeId source) const {
  std::unique_lock lock(mutex_);
  return columns_.count(source) > 0;
}

std::vector<NodeId> SegregationState::cached_columns() const {
  std::unique_lock lock(mutex_);
  std::vector<NodeId> out;
  out.reserve(columns_.size());
  for (const auto& [id, _] : columns_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

void SegregationState::set_cache_cap(std::size_t cap) {
  std::unique_lock lock(mutex_);
  cap_ = cap;
  if (cap_ > 0) {
    use_order_.clear();
    for (const auto& [id, _] : columns_) use_order_.push_back(id);
    std::sort(use_order_.begin(), use_order_.end());
    evict_if_needed();
  }
}

void SegregationState::note_use(NodeId source) {
  if (cap_ == 0) return;
  auto it = std::find(use_order_.begin(), use_order_.end(), source);
  if (it != use_order_.end()) use_order_.erase(it);
  use_order_.push_back(source);
}

void SegregationState::evict_if_needed() {
  if (cap_ == 0) return;
  while (columns_.size() > cap_ && !use_order_.empty()) {
    columns_.erase(use_order_.front());
    use_order_.erase(use_order_.begin());
  }
}

void SegregationState::prefetch_columns(std::span<const NodeId> sources, int threads) {
  std::vector<NodeId> missing;
  {
    std::unique_lock lock(mutex_);
    for (NodeId s : sources)
      if (!columns_.count(s)) missing.push_back(s);
  }
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  if (missing.empty()) return;
  std::vector<Eigen::VectorXd> solved(missing.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  run_parallel(threads, static_cast<long>(missing.size()), [&](long begin, long end) {
    for (long i = begin; i < end; ++i) {
      try {
        solved[static_cast<std::size_t>(i)] =
            fundamental_column(view_, missing[static_cast<std::size_t>(i)], opts_);
      } catch (...) {
        std::unique_lock lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  });
  if (failure) std::rethrow_exception(failure);
  std::unique_lock lock(mutex_);
  for (std::size_t i = 0; i < missing.size(); ++i) {
    auto [pos, inserted] = columns_.try_emplace(missing[i], std::move(solved[i]));
    if (inserted) note_use(missing[i]);
  }
  evict_if_needed();
}

Real SegregationState::delta_segregation(NodeId h, const RewiringOp& op) {
  int lh = view_.local_of(h);
  int lv = view_.local_of(op.removed);
  if (lh < 0 || lv < 0) throw Error("delta_segregation: node outside the harmful set");
  const Eigen::VectorXd& col = column(op.source);
  return col[lh] * z_[lv] / (1.0 / op.prob + col[lv]);
}

void SegregationState::update_after_rewiring(const RewiringOp& op) {
  int lu = view_.local_of(op.source);
  int lv = view_.local_of(op.removed);
  if (lu < 0 || lv < 0) throw Error("update_after_rewiring: op outside the harmful set");
  const Eigen::VectorXd col_u = column(op.source);  // pre-op snapshot
  const Real f_vu = col_u[lv];
  const Real denom = 1.0 + op.prob * f_vu;

  {
    std::unique_lock lock(mutex_);
    for (auto& [id, col] : columns_) {
      Real f_vx = col[lv];
      if (f_vx != 0.0) col.noalias() -= col_u * (op.prob * f_vx / denom);
    }
  }
  const Real z_v = z_[lv];
  z_.noalias() -= col_u * (z_v / (1.0 / op.prob + f_vu));
  view_.drop_edge(op.source, op.removed);
  max_ = graph_segregation(z_, view_);
}

std::vector<int> SegregationState::harmful_sorted_by_z() const {
  std::vector<int> order(static_cast<std::size_t>(view_.count()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (z_[a] != z_[b]) return z_[a] > z_[b];
    return a < b;  // locals are in ascending node-id order
  });
  return order;
}

}  // namespace segra
