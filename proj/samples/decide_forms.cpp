// Decides a few forms and checks each NotDense certificate against the oracle.
#include <iostream>

#include "qdense/qdense.hpp"

int main() {
  using namespace qdense;
  struct Case {
    int n;
    std::vector<BigInt> coeffs;
    std::uint64_t p;
  };
  const std::vector<Case> cases = {
      {3, {1, 1}, 7}, {3, {1, 2}, 7}, {4, {1, 1}, 2}, {6, {1, 5, 25}, 5}, {3, {1, 1, 1}, 3},
  };
  for (const auto& c : cases) {
    const DiagonalForm F(c.n, c.coeffs);
    const PrimeModulus p(c.p);
    const auto v = decide(F, p);
    std::cout << F.to_string() << " at p = " << c.p << ": " << to_string(v.status) << " via "
              << to_string(v.rule()) << "\n";
    if (v.certificate) {
      const auto report = quotient_coverage(F, p, {c.coeffs.size() == 2 ? 40 : 8, 2, 0});
      const auto check = check_certificate(*v.certificate, report);
      std::cout << "  certificate " << v.certificate->kind() << ": "
                << (std::holds_alternative<Consistent>(check) ? "consistent" : "contradicted") << "\n";
    }
  }
}
