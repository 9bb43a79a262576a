#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdense/errors.hpp"
#include "qdense/padic.hpp"
#include "qdense/residues.hpp"

namespace qdense {

using Params = std::vector<std::pair<std::string, std::string>>;

/// a_1 x_1^n + ... + a_r x_r^n with nonzero integer coefficients.
class DiagonalForm {
 public:
  DiagonalForm(int n, std::vector<BigInt> coeffs) : n_(n), coeffs_(std::move(coeffs)) {
    if (n_ < 2) throw error(errc::unsupported_degree, "degree must be at least 2");
    if (coeffs_.empty()) throw error(errc::invalid_argument, "a form needs at least one variable");
    for (const auto& a : coeffs_) {
      if (a == 0) throw error(errc::invalid_argument, "coefficients must be nonzero");
    }
  }

  int n() const noexcept { return n_; }
  std::size_t r() const noexcept { return coeffs_.size(); }
  const std::vector<BigInt>& coeffs() const noexcept { return coeffs_; }
  const BigInt& coeff(std::size_t i) const { return coeffs_.at(i); }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const BigInt& a = coeffs_[i];
      if (i > 0) s += a < 0 ? " - " : " + ";
      else if (a < 0) s += "-";
      const BigInt mag = abs(a);
      if (mag != 1) s += mag.str() + "*";
      s += "x" + std::to_string(i + 1) + "^" + std::to_string(n_);
    }
    return s;
  }

  friend bool operator==(const DiagonalForm&, const DiagonalForm&) = default;

 private:
  int n_;
  std::vector<BigInt> coeffs_;
};

using FormPoint = std::vector<BigInt>;

template <class Int>
BigInt evaluate(const DiagonalForm& F, std::span<const Int> x) {
  if (x.size() != F.r()) {
    throw error(errc::dimension_mismatch, "point has " + std::to_string(x.size()) +
                                              " coordinates, form has " + std::to_string(F.r()));
  }
  BigInt sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += F.coeff(i) * boost::multiprecision::pow(BigInt(x[i]), static_cast<unsigned>(F.n()));
  }
  return sum;
}

inline BigInt evaluate(const DiagonalForm& F, const FormPoint& x) {
  return evaluate<BigInt>(F, std::span<const BigInt>(x));
}

inline BigInt content(const DiagonalForm& F) {
  BigInt g = 0;
  for (const auto& a : F.coeffs()) g = gcd(g, abs(a));
  return g;
}

inline bool is_primitive(const DiagonalForm& F) { return content(F) == 1; }

/// One quotient-preserving rewrite of a form, with the identity it instantiates.
struct TraceStep {
  std::string identity;
  std::string citation;
  Params params;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/**
 * a x^n + b y^n rewritten as F(x, y) = p^s * G(phi(x, y)) with
 * G = p^rho l_a X^n + l_b Y^n, 0 <= rho < n, where phi multiplies one
 * variable by p^|q| and delta = alpha - beta = n q + rho. Quotients of F and
 * G agree pointwise under phi, and R(F) = R(G).
 */
struct BinaryNormalization {
  PrimeModulus p;
  int n;
  std::int64_t alpha;
  std::int64_t beta;
  std::int64_t delta;
  int delta_class;
  std::int64_t shift;
  BigInt unit_a;
  BigInt unit_b;
  DiagonalForm reduced;
  std::int64_t scale_exponent;
  std::vector<TraceStep> trace;

  std::array<BigInt, 2> map_point(const BigInt& x, const BigInt& y) const {
    if (shift >= 0) return {x * prime_power(p, shift), y};
    return {x, y * prime_power(p, -shift)};
  }

  /// F(x, y) = scale() * reduced(map_point(x, y)).
  Rational scale() const {
    if (scale_exponent >= 0) return Rational(prime_power(p, scale_exponent));
    return Rational(BigInt(1), prime_power(p, -scale_exponent));
  }
};

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline int mod_class(std::int64_t a, int n) {
  const std::int64_t r = a % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

inline BinaryNormalization normalize_binary(const DiagonalForm& F, const PrimeModulus& p) {
  if (F.r() != 2) throw error(errc::dimension_mismatch, "normalize_binary needs a binary form");
  const int n = F.n();
  auto [alpha, unit_a] = split_prime_power(F.coeff(0), p);
  auto [beta, unit_b] = split_prime_power(F.coeff(1), p);
  const std::int64_t delta = alpha - beta;
  const std::int64_t q = floor_div(delta, n);
  const int rho = mod_class(delta, n);
  const BigInt lead = prime_power(p, rho) * unit_a;
  const std::int64_t scale = q >= 0 ? beta : beta + n * q;

  std::vector<TraceStep> trace;
  trace.push_back({"factor a = p^alpha l_a, b = p^beta l_b",
                   "Theorem 1.1(2) proof",
                   {{"alpha", std::to_string(alpha)},
                    {"beta", std::to_string(beta)},
                    {"l_a", unit_a.str()},
                    {"l_b", unit_b.str()}}});
  trace.push_back({"R(cF) = R(F): divide by the constant p^s",
                   "Theorem 1.1(2) proof, R(F) = R(b^-1 F)",
                   {{"s", std::to_string(scale)}}});
  if (q != 0) {
    trace.push_back({"substitute " + std::string(q > 0 ? "x -> p^q x" : "y -> p^-q y") +
                         " using F(x, p^k' y) / F(z, p^k' w) = G(x, y) / G(z, w)",
                     "Theorem 1.1(2) proof",
                     {{"q", std::to_string(q)}, {"delta", std::to_string(delta)}}});
  }
  trace.push_back({"reduced form p^rho l_a x^n + l_b y^n",
                   rho == 0 ? "Theorem 1.1(1)" : "Theorem 1.1(3)",
                   {{"rho", std::to_string(rho)}, {"n", std::to_string(n)}}});

  return BinaryNormalization{p,      n,     alpha, beta,  delta, rho, q, unit_a, unit_b,
                             DiagonalForm(n, {lead, unit_b}), scale, std::move(trace)};
}

/// A homogeneous form given as monomials: exponents[i] is the power of x_i.
struct FormTerm {
  std::vector<unsigned> exponents;
  BigInt coeff;
};

class GeneralForm {
 public:
  GeneralForm(std::size_t r, std::vector<FormTerm> terms) : r_(r), terms_(std::move(terms)) {
    if (r_ == 0) throw error(errc::invalid_argument, "a form needs at least one variable");
    std::optional<unsigned> degree;
    for (const auto& t : terms_) {
      if (t.exponents.size() != r_) throw error(errc::dimension_mismatch, "monomial arity");
      unsigned d = 0;
      for (unsigned e : t.exponents) d += e;
      if (degree && *degree != d) throw error(errc::invalid_argument, "form is not homogeneous");
      degree = d;
    }
  }

  static GeneralForm from_diagonal(const DiagonalForm& F) {
    std::vector<FormTerm> terms;
    for (std::size_t i = 0; i < F.r(); ++i) {
      std::vector<unsigned> e(F.r(), 0);
      e[i] = static_cast<unsigned>(F.n());
      terms.push_back({std::move(e), F.coeff(i)});
    }
    return GeneralForm(F.r(), std::move(terms));
  }

  std::size_t r() const noexcept { return r_; }
  const std::vector<FormTerm>& terms() const noexcept { return terms_; }

 private:
  std::size_t r_;
  std::vector<FormTerm> terms_;
};

using FieldVector = std::vector<std::uint64_t>;

/// True means no nonzero zero over F_p; otherwise `witness` is the first zero found.
struct AnisotropyResult {
  bool anisotropic = true;
  FieldVector witness;
};

namespace detail {

/// Colexicographic order: the last coordinate is most significant.
inline bool colex_less(const FieldVector& a, const FieldVector& b) {
  return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

/**
 * Visits projective representatives of F_p^r (first nonzero coordinate = 1)
 * in colex order and returns the first vector accepted by `pred`. Vectors
 * with pivot i have zeros below i, so each pivot block is walked separately
 * and the colex-least hit across blocks wins.
 */
template <class Pred>
std::optional<FieldVector> first_projective(std::size_t r, std::uint64_t p, std::uint64_t budget,
                                            Pred&& pred) {
  const auto total = prime_power_u64(p, static_cast<int>(r));
  if (!total || *total > budget) {
    throw error(errc::budget_exceeded, "p^r exceeds the enumeration budget");
  }
  std::optional<FieldVector> best;
  for (std::size_t pivot = 0; pivot < r; ++pivot) {
    FieldVector v(r, 0);
    v[pivot] = 1;
    for (;;) {
      if (pred(v)) {
        if (!best || colex_less(v, *best)) best = v;
        break;
      }
      std::size_t i = pivot + 1;
      while (i < r && v[i] == p - 1) v[i++] = 0;
      if (i == r) break;
      ++v[i];
    }
  }
  return best;
}

}  // namespace detail

inline AnisotropyResult is_anisotropic_mod_p(const GeneralForm& F, const PrimeModulus& p,
                                             std::uint64_t budget = default_budget) {
  const std::uint64_t pv = p.value();
  struct Term {
    std::vector<unsigned> e;
    std::uint64_t c;
  };
  std::vector<Term> terms;
  for (const auto& t : F.terms()) {
    const auto c = reduce(t.coeff, p.big()).convert_to<std::uint64_t>();
    if (c != 0) terms.push_back({t.exponents, c});
  }
  auto hit = detail::first_projective(F.r(), pv, budget, [&](const FieldVector& v) {
    std::uint64_t s = 0;
    for (const auto& t : terms) {
      std::uint64_t m = t.c;
      for (std::size_t i = 0; i < v.size(); ++i) {
        m = detail::mul_mod(m, detail::pow_mod_u64(v[i], t.e[i], pv), pv);
      }
      s = (s + m) % pv;
    }
    return s == 0;
  });
  if (!hit) return {};
  return {false, *hit};
}

namespace detail {

struct DiagonalModP {
  std::uint64_t p;
  std::vector<std::uint64_t> coeffs;
  std::vector<std::uint64_t> powers;  // x^n mod p for x in [0, p)

  DiagonalModP(const DiagonalForm& F, const PrimeModulus& pm, std::uint64_t budget) : p(pm.value()) {
    if (p > budget) throw error(errc::budget_exceeded, "p exceeds the enumeration budget");
    for (const auto& a : F.coeffs()) coeffs.push_back(reduce(a, pm.big()).convert_to<std::uint64_t>());
    powers.resize(p);
    for (std::uint64_t x = 0; x < p; ++x) powers[x] = pow_mod_u64(x, static_cast<std::uint64_t>(F.n()), p);
  }

  std::uint64_t eval(const FieldVector& v) const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s = (s + mul_mod(coeffs[i], powers[v[i]], p)) % p;
    return s;
  }
};

}  // namespace detail

inline AnisotropyResult is_anisotropic_mod_p(const DiagonalForm& F, const PrimeModulus& p,
                                             std::uint64_t budget = default_budget) {
  const detail::DiagonalModP table(F, p, budget);
  auto hit = detail::first_projective(F.r(), p.value(), budget,
                                      [&](const FieldVector& v) { return table.eval(v) == 0; });
  if (!hit) return {};
  return {false, *hit};
}

/**
 * First zero over F_p of a ternary diagonal cubic at which some partial
 * derivative 3 a_i z_i^2 is nonzero. Such a zero always exists when p != 3
 * and p does not divide a_1 a_2 a_3.
 */
inline FieldVector find_nonsingular_zero_mod_p(const DiagonalForm& F, const PrimeModulus& p,
                                               std::uint64_t budget = default_budget) {
  if (F.r() != 3 || F.n() != 3) {
    throw error(errc::precondition_failed, "needs a ternary diagonal cubic");
  }
  if (p.value() == 3) throw error(errc::precondition_failed, "p = 3 is excluded");
  for (const auto& a : F.coeffs()) {
    if (a % p.big() == 0) throw error(errc::precondition_failed, "p divides a coefficient");
  }
  const detail::DiagonalModP table(F, p, budget);
  const std::uint64_t pv = p.value();
  auto hit = detail::first_projective(3, pv, budget, [&](const FieldVector& v) {
    if (table.eval(v) != 0) return false;
    for (std::size_t i = 0; i < 3; ++i) {
      const std::uint64_t partial =
          detail::mul_mod(3 % pv, detail::mul_mod(table.coeffs[i], detail::mul_mod(v[i], v[i], pv), pv), pv);
      if (partial != 0) return true;
    }
    return false;
  });
  if (!hit) throw error(errc::not_found, "no non-singular zero found");
  return *hit;
}

/// Coefficient valuations mod n and unit cofactors of a diagonal form.
struct ValuationProfile {
  PrimeModulus p;
  int n;
  std::vector<std::int64_t> valuations;
  std::vector<int> residues;
  bool pairwise_distinct;
  std::vector<BigInt> unit_parts;
  /// When pairwise distinct, v_p(F(x)) mod n ranges exactly over these classes.
  std::vector<int> attainable;
};

inline ValuationProfile valuation_profile(const DiagonalForm& F, const PrimeModulus& p) {
  ValuationProfile out{p, F.n(), {}, {}, true, {}, {}};
  std::set<int> seen;
  for (const auto& a : F.coeffs()) {
    auto [v, u] = split_prime_power(a, p);
    const int res = mod_class(v, F.n());
    if (!seen.insert(res).second) out.pairwise_distinct = false;
    out.valuations.push_back(v);
    out.residues.push_back(res);
    out.unit_parts.push_back(std::move(u));
  }
  if (out.pairwise_distinct) out.attainable.assign(seen.begin(), seen.end());
  return out;
}

/**
 * Form with the same quotient set: content removed and every coefficient's
 * p-valuation reduced into [0, n) by the substitution x_i -> p^t x_i.
 */
inline DiagonalForm canonical_form(const DiagonalForm& F, const PrimeModulus& p) {
  std::vector<BigInt> c = F.coeffs();
  auto strip_content = [&c] {
    BigInt g = 0;
    for (const auto& a : c) g = gcd(g, abs(a));
    for (auto& a : c) a /= g;
  };
  strip_content();
  for (auto& a : c) {
    auto [v, u] = split_prime_power(a, p);
    a = u * prime_power(p, mod_class(v, F.n()));
  }
  strip_content();
  return DiagonalForm(F.n(), std::move(c));
}

}  // namespace qdense
