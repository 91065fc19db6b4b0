#pragma once

#include <cstdint>
#include <vector>

#include "segra/relevance.hpp"
#include "segra/types.hpp"

namespace segra {

struct SyntheticInstance {
  std::vector<NodeLabel> labels;
  RelevanceStore relevance;
};

// Uniform random instance: labels assigned by a shuffled harmful fraction,
// each node scored against `pool` distinct candidates.
SyntheticInstance make_random_instance(NodeId n, int d, Real harmful_fraction, int pool,
                                       std::uint64_t seed);

// Two equal blocks, block 0 harmful; each candidate falls inside the own
// block with probability `within`. Scores uniform in (0.2, 1].
SyntheticInstance make_homophilous_instance(NodeId n, int d, Real within, int pool,
                                            std::uint64_t seed);

// Homophilous structure with per-node escape mass drawn log-uniformly, which
// skews the segregation spectrum the way relevance-driven graphs do.
SyntheticInstance make_skewed_instance(NodeId n, int d, int pool, std::uint64_t seed);

}  // namespace segra
