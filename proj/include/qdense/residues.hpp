#pragma once

/**
 * n-th power residues modulo prime powers.
 *
 * Membership u in ((Z/p^M)^x)^n is decided by group structure: for odd p the
 * unit group is cyclic of order phi = p^(M-1)(p-1); for p = 2 and M >= 3 it
 * splits as <-1> x <3>. A brute-force enumerator is kept alongside as the
 * oracle for the fast path.
 */

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "qdense/errors.hpp"
#include "qdense/padic.hpp"

namespace qdense {

inline constexpr std::uint64_t default_budget = 10'000'000;

/// Exponent data attached to (n, p): k = v_p(n) and M = v_p(n) + v_p(2^[2|n]) + 1.
struct LemmaOneExponent {
  PrimeModulus p;
  int n;
  int k;
  int M;
};

inline int valuation_small(std::uint64_t x, std::uint64_t p) {
  int v = 0;
  while (x != 0 && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

inline LemmaOneExponent lemma1_exponent(int n, const PrimeModulus& p) {
  if (n < 1) throw error(errc::invalid_argument, "degree must be positive");
  const int k = valuation_small(static_cast<std::uint64_t>(n), p.value());
  const int bracket = (p.value() == 2 && n % 2 == 0) ? 1 : 0;
  return {p, n, k, k + bracket + 1};
}

/// Exact residue set {a^n mod p^M : p does not divide a}, sorted.
struct ResidueSet {
  std::uint64_t modulus = 1;
  int n = 1;
  std::vector<std::uint64_t> members;

  bool contains(std::uint64_t u) const {
    return std::binary_search(members.begin(), members.end(), u % modulus);
  }
};

inline std::uint64_t checked_modulus(const PrimeModulus& p, int M, std::uint64_t budget) {
  auto mod = prime_power_u64(p.value(), M);
  if (!mod || *mod > budget) {
    throw error(errc::budget_exceeded, "p^M exceeds the enumeration budget");
  }
  return *mod;
}

inline ResidueSet nth_power_residues(int n, const PrimeModulus& p, int M,
                                     std::uint64_t budget = default_budget) {
  if (n < 1 || M < 1) throw error(errc::invalid_argument, "n and M must be positive");
  const std::uint64_t mod = checked_modulus(p, M, budget);
  std::vector<char> seen(mod, 0);
  for (std::uint64_t a = 1; a < mod; ++a) {
    if (a % p.value() == 0) continue;
    seen[detail::pow_mod_u64(a, static_cast<std::uint64_t>(n), mod)] = 1;
  }
  ResidueSet out{mod, n, {}};
  for (std::uint64_t r = 0; r < mod; ++r) {
    if (seen[r]) out.members.push_back(r);
  }
  return out;
}

/// u = (-1)^s * 3^t (mod 2^M), M >= 3, u odd.
struct TwoAdicLog {
  int s;
  BigInt t;
};

/**
 * Discrete log in (Z/2^M)^x = <-1> x <3>. The sign bit comes from u mod 8
 * (<3> reduces to {1, 3} mod 8); t is peeled one bit at a time, since an
 * element h of <3^(2^i)> has h^(2^(M-3-i)) = 1 exactly when bit i of its log
 * is clear.
 */
inline TwoAdicLog two_adic_log(const BigInt& u, int M) {
  if (M < 3) throw error(errc::invalid_argument, "two_adic_log needs M >= 3");
  const BigInt mod = BigInt(1) << M;
  BigInt y = reduce(u, mod);
  if (!bit_test(y, 0)) throw error(errc::not_a_unit, "even input to two_adic_log");
  const int s = (y % 8 == 5 || y % 8 == 7) ? 1 : 0;
  if (s) y = reduce(-y, mod);
  const BigInt inv3 = inverse_mod(3, mod);
  BigInt t = 0;
  for (int i = 0; i <= M - 3; ++i) {
    const BigInt h = y * mod_pow(inv3, t, mod) % mod;
    if (mod_pow(h, BigInt(1) << (M - 3 - i), mod) != 1) t += BigInt(1) << i;
  }
  return {s, t};
}

/// Is u (a unit mod p) congruent to some a^n modulo p^M?
inline bool is_nth_power_residue(const BigInt& u, int n, const PrimeModulus& p, int M) {
  if (n < 1 || M < 1) throw error(errc::invalid_argument, "n and M must be positive");
  const BigInt mod = prime_power(p, M);
  const BigInt ur = reduce(u, mod);
  if (ur % p.big() == 0) throw error(errc::not_a_unit, u.str() + " is divisible by p");
  if (p.value() != 2) {
    const BigInt phi = prime_power(p, M - 1) * (p.value() - 1);
    const BigInt g = gcd(BigInt(n), phi);
    return mod_pow(ur, phi / g, mod) == 1;
  }
  if (n % 2 == 1 || M == 1) return true;
  if (M == 2) return ur == 1;
  const auto [s, t] = two_adic_log(ur, M);
  if (s != 0) return false;
  const int e = std::min(valuation_small(static_cast<std::uint64_t>(n), 2), M - 2);
  return t % (BigInt(1) << e) == 0;
}

/**
 * Canonical coset labels for (Z/p^M)^x modulo its n-th powers. `key(u)` is
 * equal for u, u' exactly when u/u' is an n-th power residue mod p^M.
 */
class PowerClassGroup {
 public:
  PowerClassGroup(int n, PrimeModulus p, int M) : n_(n), p_(p), M_(M), mod_(prime_power(p, M)) {
    if (n < 1 || M < 1) throw error(errc::invalid_argument, "n and M must be positive");
    if (p_.value() != 2) {
      const BigInt phi = prime_power(p_, M - 1) * (p_.value() - 1);
      const BigInt g = gcd(BigInt(n), phi);
      exponent_ = phi / g;
      order_ = g;
    } else if (n % 2 == 1 || M == 1) {
      order_ = 1;
    } else if (M == 2) {
      order_ = 2;
    } else {
      two_bits_ = std::min(valuation_small(static_cast<std::uint64_t>(n), 2), M - 2);
      order_ = BigInt(2) << two_bits_;
    }
  }

  const BigInt& modulus() const noexcept { return mod_; }
  int exponent() const noexcept { return M_; }
  /// |U / U^n| where U is the unit group mod p^M.
  const BigInt& order() const noexcept { return order_; }

  BigInt key(const BigInt& u) const {
    const BigInt ur = reduce(u, mod_);
    if (ur % p_.big() == 0) throw error(errc::not_a_unit, "class of a non-unit");
    if (p_.value() != 2) return mod_pow(ur, exponent_, mod_);
    if (order_ == 1) return 0;
    if (M_ == 2) return ur == 1 ? 0 : 1;
    const auto [s, t] = two_adic_log(ur, M_);
    return (BigInt(s) << two_bits_) + (t % (BigInt(1) << two_bits_));
  }

 private:
  int n_;
  PrimeModulus p_;
  int M_;
  BigInt mod_;
  BigInt exponent_;
  BigInt order_;
  int two_bits_ = 0;
};

/// Is the rational c an n-th power of a p-adic integer?
inline bool is_nth_power_in_Zp(const Rational& c, int n, const PrimeModulus& p) {
  if (c == 0) throw error(errc::invalid_argument, "c must be nonzero");
  const std::int64_t v = valuation(c, p).value();
  if (v < 0) throw error(errc::negative_valuation, "c is not a p-adic integer");
  if (v % n != 0) return false;
  const auto ex = lemma1_exponent(n, p);
  const BigInt mod = prime_power(p, ex.M);
  const BigInt num = split_prime_power(numerator(c), p).second;
  const BigInt den = split_prime_power(denominator(c), p).second;
  return is_nth_power_residue(num * inverse_mod(den, mod), n, p, ex.M);
}

/**
 * Ladder check for p^k-th powers: residue status of u at modulus exponent
 * k + v_p(2) + 1 must equal its status `depth` steps higher. Both sides are
 * computed by enumeration. Returns whether they agree.
 */
inline bool stabilization_check(const BigInt& u, std::uint64_t pk, const PrimeModulus& p, int depth,
                                std::uint64_t budget = default_budget) {
  if (depth < 0) throw error(errc::invalid_argument, "depth must be nonnegative");
  if (u % p.big() == 0) throw error(errc::not_a_unit, "u divisible by p");
  const int k = valuation_small(pk, p.value());
  if (k < 1 || *prime_power_u64(p.value(), k) != pk) {
    throw error(errc::invalid_argument, "pk must be a positive power of p");
  }
  const int base = k + (p.value() == 2 ? 1 : 0) + 1;
  const int n = static_cast<int>(pk);
  const auto low = nth_power_residues(n, p, base, budget);
  const auto high = nth_power_residues(n, p, base + depth, budget);
  const bool at_low = low.contains(reduce(u, BigInt(low.modulus)).convert_to<std::uint64_t>());
  const bool at_high = high.contains(reduce(u, BigInt(high.modulus)).convert_to<std::uint64_t>());
  return at_low == at_high;
}

/**
 * Returns x with x^n = c (mod p^K) for a p-integral rational c that is an
 * n-th power in Z_p, or nullopt when it is not. The unit part is lifted by
 * Newton iteration from a start that satisfies the Hensel inequality for
 * x^n - c', i.e. a root mod p^(2 v_p(n) + 1).
 */
inline std::optional<BigInt> lift_nth_root(const Rational& c, int n, const PrimeModulus& p, int K,
                                           std::uint64_t budget = default_budget) {
  if (K < 1) throw error(errc::invalid_argument, "precision must be positive");
  if (!is_nth_power_in_Zp(c, n, p)) return std::nullopt;
  const BigInt target = prime_power(p, K);
  const std::int64_t v = valuation(c, p).value();
  const std::int64_t shift = v / n;
  if (shift >= K) return BigInt(0);
  const BigInt num = split_prime_power(numerator(c), p).second;
  const BigInt den = split_prime_power(denominator(c), p).second;

  const auto ex = lemma1_exponent(n, p);
  const int start_exp = 2 * ex.k + 1;
  const BigInt start_mod = prime_power(p, start_exp);
  const BigInt unit = reduce(num * inverse_mod(den, start_mod), start_mod);

  BigInt x0 = 0;
  const std::uint64_t pv = p.value();
  if (ex.k == 0 && std::gcd(static_cast<std::uint64_t>(n), pv - 1) == 1) {
    const BigInt e = inverse_mod(BigInt(n), BigInt(pv - 1));
    x0 = mod_pow(unit, e, p.big());
  } else {
    const std::uint64_t mod = checked_modulus(p, start_exp, budget);
    const auto u = unit.convert_to<std::uint64_t>();
    bool found = false;
    for (std::uint64_t a = 1; a < mod && !found; ++a) {
      if (a % pv == 0) continue;
      if (detail::pow_mod_u64(a, static_cast<std::uint64_t>(n), mod) == u) {
        x0 = a;
        found = true;
      }
    }
    if (!found) throw error(errc::not_found, "no start root although c is an n-th power");
  }

  const int lift_exp = std::max(K, start_exp);
  const BigInt lift_mod = prime_power(p, lift_exp);
  Polynomial f(static_cast<std::size_t>(n) + 1, BigInt(0));
  f[0] = -reduce(num * inverse_mod(den, lift_mod), lift_mod);
  f[static_cast<std::size_t>(n)] = 1;
  const BigInt root = hensel_lift_root(f, p, x0, lift_exp);
  return reduce(root * prime_power(p, shift), target);
}

}  // namespace qdense
