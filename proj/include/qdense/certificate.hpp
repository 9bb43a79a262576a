#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qdense/padic.hpp"

namespace qdense {

/// No quotient of form values has valuation congruent to a forbidden class mod n.
struct ValuationGap {
  std::vector<int> forbidden;

  friend bool operator==(const ValuationGap&, const ValuationGap&) = default;
};

/**
 * No quotient whose valuation is congruent to `level` mod n has a unit part
 * u with u * m^-1 an n-th power residue modulo p^exponent.
 */
struct ResidueGap {
  int level = 0;
  BigInt m;
  int exponent = 1;

  friend bool operator==(const ResidueGap&, const ResidueGap&) = default;
};

struct ObstructionCertificate {
  int n = 0;
  std::uint64_t p = 0;
  std::variant<ValuationGap, ResidueGap> gap;

  std::string kind() const {
    return std::holds_alternative<ValuationGap>(gap) ? "ValuationGap" : "ResidueGap";
  }

  friend bool operator==(const ObstructionCertificate&, const ObstructionCertificate&) = default;
};

}  // namespace qdense
