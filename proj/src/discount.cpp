#include "segra/discount.hpp"

#include <cmath>

namespace segra {

const char* to_string(DiscountKind kind) {
  return kind == DiscountKind::Uniform ? "uniform" : "invlog";
}

DiscountKind discount_kind_from_string(const std::string& name) {
  if (name == "uniform") return DiscountKind::Uniform;
  if (name == "invlog") return DiscountKind::InverseLog;
  throw ConfigError("unknown discount kind: " + name);
}

Real dcg_weight(int rank) { return 1.0 / (1.0 + std::log2(1.0 + static_cast<Real>(rank))); }

RankDiscount RankDiscount::make(DiscountKind kind, int d) {
  if (d < 1) throw ConfigError("out-degree must be >= 1");
  RankDiscount discount;
  discount.kind = kind;
  discount.table.resize(static_cast<std::size_t>(d));
  if (kind == DiscountKind::Uniform) {
    for (auto& p : discount.table) p = 1.0 / static_cast<Real>(d);
  } else {
    Real sum = 0;
    for (int rank = 1; rank <= d; ++rank) sum += dcg_weight(rank);
    for (int rank = 1; rank <= d; ++rank)
      discount.table[static_cast<std::size_t>(rank - 1)] = dcg_weight(rank) / sum;
  }
  return discount;
}

}  // namespace segra
