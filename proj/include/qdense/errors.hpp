#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdense {

enum class errc {
  invalid_argument,
  not_prime,
  not_invertible,
  division_by_zero,
  precondition_failed,
  budget_exceeded,
  not_a_unit,
  negative_valuation,
  dimension_mismatch,
  not_found,
  unsupported_degree,
  parameter_mismatch,
  no_root,
};

constexpr std::string_view to_string(errc code) {
  switch (code) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::not_prime: return "NotPrime";
    case errc::not_invertible: return "NotInvertible";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::precondition_failed: return "PreconditionFailed";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::not_a_unit: return "NotAUnit";
    case errc::negative_valuation: return "NegativeValuation";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::not_found: return "NotFound";
    case errc::unsupported_degree: return "UnsupportedDegree";
    case errc::parameter_mismatch: return "ParameterMismatch";
    case errc::no_root: return "NoRoot";
  }
  return "Unknown";
}

/// All library failures surface as this exception; `code()` identifies the kind.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace qdense
