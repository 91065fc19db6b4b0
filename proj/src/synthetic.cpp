#include "segra/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "segra/rng.hpp"

namespace segra {

namespace {

// Draws `count` distinct candidates for `u`, block-biased when cross > 0.
void sample_candidates(NodeId u, NodeId n, int count, Real cross_prob, NodeId block_split,
                       Rng& rng, std::vector<NodeId>& out) {
  out.clear();
  if (count > n - 1) count = n - 1;
  const bool harmful_side = u < block_split;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count && attempts < count * 40) {
    ++attempts;
    NodeId candidate;
    if (block_split > 0) {
      bool cross = rng.uniform01() < cross_prob;
      bool pick_harmful = harmful_side ? !cross : cross;
      if (pick_harmful)
        candidate = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(block_split)));
      else
        candidate = block_split +
                    static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n - block_split)));
    } else {
      candidate = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
    }
    if (candidate == u) continue;
    if (std::find(out.begin(), out.end(), candidate) != out.end()) continue;
    out.push_back(candidate);
  }
  // deterministic fill when a small block exhausts the rejection loop
  for (NodeId step = 1; static_cast<int>(out.size()) < count && step < n; ++step) {
    NodeId candidate = static_cast<NodeId>((u + step) % n);
    if (candidate == u) continue;
    if (std::find(out.begin(), out.end(), candidate) != out.end()) continue;
    out.push_back(candidate);
  }
}

}  // namespace

SyntheticInstance make_random_instance(NodeId n, int d, Real harmful_fraction, int pool,
                                       std::uint64_t seed) {
  if (pool < d) pool = d;
  SyntheticInstance instance;
  Rng rng(seed);

  std::vector<NodeId> order(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  shuffle(order, rng);
  NodeId harmful = static_cast<NodeId>(std::lround(harmful_fraction * static_cast<Real>(n)));
  instance.labels.assign(static_cast<std::size_t>(n), NodeLabel::Neutral);
  for (NodeId i = 0; i < harmful; ++i)
    instance.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
        NodeLabel::Harmful;

  instance.relevance = RelevanceStore(n);
  std::vector<NodeId> candidates;
  for (NodeId u = 0; u < n; ++u) {
    sample_candidates(u, n, pool, 0.0, 0, rng, candidates);
    for (NodeId v : candidates) instance.relevance.add(u, v, 1.0 - rng.uniform01());
  }
  instance.relevance.finalize();
  return instance;
}

SyntheticInstance make_homophilous_instance(NodeId n, int d, Real within, int pool,
                                            std::uint64_t seed) {
  if (pool < d) pool = d;
  SyntheticInstance instance;
  Rng rng(seed);
  const NodeId split = n / 2;  // block 0 = harmful
  instance.labels.assign(static_cast<std::size_t>(n), NodeLabel::Neutral);
  for (NodeId u = 0; u < split; ++u) instance.labels[static_cast<std::size_t>(u)] = NodeLabel::Harmful;

  // The harmful block splits into topic clusters with log-spread escape mass
  // (mean kept at 1 - within). Clusters skew the hitting-length spectrum and
  // keep candidates local, the shape relevance-driven graphs take.
  const int clusters = split >= 64 ? 8 : 1;
  const NodeId cluster_size = clusters > 0 ? std::max<NodeId>(1, split / clusters) : 1;
  std::vector<Real> escape(static_cast<std::size_t>(clusters));
  Real mean = 0;
  for (int c = 0; c < clusters; ++c) {
    escape[static_cast<std::size_t>(c)] =
        clusters == 1 ? 1.0
                      : std::pow(10.0, -0.8 + 1.6 * static_cast<Real>(c) /
                                            static_cast<Real>(clusters - 1));
    mean += escape[static_cast<std::size_t>(c)];
  }
  mean /= static_cast<Real>(clusters);
  for (auto& e : escape) e *= (1.0 - within) / mean;

  instance.relevance = RelevanceStore(n);
  std::vector<NodeId> candidates;
  for (NodeId u = 0; u < n; ++u) {
    if (u < split) {
      int c = std::min<int>(clusters - 1, static_cast<int>(u / cluster_size));
      NodeId lo = static_cast<NodeId>(c) * cluster_size;
      NodeId hi = c == clusters - 1 ? split : lo + cluster_size;
      Real cross = std::min(0.9, escape[static_cast<std::size_t>(c)]);
      // harmful candidates stay inside the cluster, the rest are neutral
      candidates.clear();
      int attempts = 0;
      while (static_cast<int>(candidates.size()) < pool && attempts < pool * 40) {
        ++attempts;
        NodeId v;
        if (rng.uniform01() < cross)
          v = split + static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n - split)));
        else
          v = lo + static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(hi - lo)));
        if (v == u || std::find(candidates.begin(), candidates.end(), v) != candidates.end())
          continue;
        candidates.push_back(v);
      }
      for (NodeId step = 1; static_cast<int>(candidates.size()) < pool && step < n; ++step) {
        NodeId v = static_cast<NodeId>((u + step) % n);
        if (v == u || std::find(candidates.begin(), candidates.end(), v) != candidates.end())
          continue;
        candidates.push_back(v);
      }
    } else {
      sample_candidates(u, n, pool, 1.0 - within, split, rng, candidates);
    }
    for (NodeId v : candidates) instance.relevance.add(u, v, rng.uniform(0.2, 1.0));
  }
  instance.relevance.finalize();
  return instance;
}

SyntheticInstance make_skewed_instance(NodeId n, int d, int pool, std::uint64_t seed) {
  if (pool < d + 2) pool = d + 2;
  SyntheticInstance instance;
  Rng rng(seed);
  const NodeId split = n / 2;
  instance.labels.assign(static_cast<std::size_t>(n), NodeLabel::Neutral);
  for (NodeId u = 0; u < split; ++u) instance.labels[static_cast<std::size_t>(u)] = NodeLabel::Harmful;

  // Harmful candidates are drawn preferentially toward low ids (hub-heavy
  // in-degree) and per-node escape mass is log-uniform in [0.01, 0.3]; both
  // skews are what relevance-driven graphs show.
  auto preferential = [&](Rng& r) {
    Real t = r.uniform01();
    return static_cast<NodeId>(static_cast<Real>(split) * t * t * t);
  };
  instance.relevance = RelevanceStore(n);
  std::vector<NodeId> candidates;
  for (NodeId u = 0; u < n; ++u) {
    Real cross = u < split ? std::pow(10.0, -(0.52 + 1.48 * rng.uniform01())) : 0.5;
    candidates.clear();
    int attempts = 0;
    while (static_cast<int>(candidates.size()) < pool - 2 && attempts < pool * 40) {
      ++attempts;
      NodeId v;
      if (u < split)
        v = rng.uniform01() < cross
                ? split + static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n - split)))
                : preferential(rng);
      else
        v = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
      if (v == u || v >= n || std::find(candidates.begin(), candidates.end(), v) != candidates.end())
        continue;
      candidates.push_back(v);
    }
    for (NodeId step = 1; static_cast<int>(candidates.size()) < pool - 2 && step < n; ++step) {
      NodeId v = static_cast<NodeId>((u + step) % n);
      if (v == u || std::find(candidates.begin(), candidates.end(), v) != candidates.end())
        continue;
      candidates.push_back(v);
    }
    for (NodeId v : candidates) instance.relevance.add(u, v, rng.uniform(0.2, 1.0));
    // two guaranteed cross-block entries keep rewiring targets available
    for (int extra = 0; extra < 2; ++extra) {
      for (int tries = 0; tries < 64; ++tries) {
        NodeId v = u < split
                       ? split + static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n - split)))
                       : static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(split)));
        if (v == u || std::find(candidates.begin(), candidates.end(), v) != candidates.end())
          continue;
        candidates.push_back(v);
        instance.relevance.add(u, v, rng.uniform(0.05, 0.2));
        break;
      }
    }
  }
  instance.relevance.finalize();
  return instance;
}

}  // namespace segra
