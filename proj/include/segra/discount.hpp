#pragma once

#include <string>
#include <vector>

#include "segra/types.hpp"

namespace segra {

enum class DiscountKind { Uniform, InverseLog };

const char* to_string(DiscountKind kind);
DiscountKind discount_kind_from_string(const std::string& name);

// DCG rank weight 1 / (1 + log2(1 + rank)), ranks 1-based.
Real dcg_weight(int rank);

// Maps list ranks to selection probabilities. table[i] is the probability of
// rank i+1; the table is non-increasing and sums to 1.
struct RankDiscount {
  DiscountKind kind = DiscountKind::Uniform;
  std::vector<Real> table;

  static RankDiscount make(DiscountKind kind, int d);

  Real at(int rank) const { return table[static_cast<std::size_t>(rank) - 1]; }
  int degree() const { return static_cast<int>(table.size()); }
};

}  // namespace segra
