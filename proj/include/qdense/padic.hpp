#pragma once

/**
 * Exact p-adic plumbing: valuations and norms of rationals, modular
 * arithmetic at prime-power moduli, truncated p-adic numbers and Hensel
 * lifting of simple roots.
 *
 * Big integers are boost::multiprecision::cpp_int; primes are restricted to
 * machine words. Everything here is a pure function of its arguments.
 */

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qdense/errors.hpp"

namespace qdense {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Polynomial = std::vector<BigInt>;  // coefficient of x^i at index i

namespace detail {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  if (m == 1) return 0;
  std::uint64_t result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

inline bool miller_rabin_witness(std::uint64_t n, std::uint64_t a, std::uint64_t d, int s) {
  std::uint64_t x = pow_mod_u64(a % n, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int i = 1; i < s; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

}  // namespace detail

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for 64-bit inputs.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  constexpr std::uint64_t bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t b : bases) {
    if (n % b == 0) return n == b;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t b : bases) {
    if (detail::miller_rabin_witness(n, b, d, s)) return false;
  }
  return true;
}

/// A prime that fits in a machine word, certified at construction.
class PrimeModulus {
 public:
  explicit PrimeModulus(std::uint64_t p) : p_(p) {
    if (!is_prime_u64(p)) throw error(errc::not_prime, std::to_string(p) + " is not prime");
  }

  std::uint64_t value() const noexcept { return p_; }
  BigInt big() const { return BigInt(p_); }

  friend bool operator==(const PrimeModulus&, const PrimeModulus&) = default;

 private:
  std::uint64_t p_;
};

/// An integer valuation or +infinity (the valuation of zero).
class ExtendedValuation {
 public:
  ExtendedValuation(std::int64_t v) : v_(v) {}  // NOLINT(google-explicit-constructor)

  static ExtendedValuation infinity() {
    ExtendedValuation e(0);
    e.v_.reset();
    return e;
  }

  bool is_infinite() const noexcept { return !v_.has_value(); }

  std::int64_t value() const {
    if (!v_) throw error(errc::invalid_argument, "valuation is infinite");
    return *v_;
  }

  friend ExtendedValuation operator+(const ExtendedValuation& a, const ExtendedValuation& b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return ExtendedValuation(*a.v_ + *b.v_);
  }

  friend bool operator==(const ExtendedValuation& a, const ExtendedValuation& b) {
    return a.v_ == b.v_;
  }

  friend std::strong_ordering operator<=>(const ExtendedValuation& a, const ExtendedValuation& b) {
    if (a.is_infinite() && b.is_infinite()) return std::strong_ordering::equal;
    if (a.is_infinite()) return std::strong_ordering::greater;
    if (b.is_infinite()) return std::strong_ordering::less;
    return *a.v_ <=> *b.v_;
  }

  std::string to_string() const { return v_ ? std::to_string(*v_) : std::string("Infinity"); }

 private:
  std::optional<std::int64_t> v_;
};

/// Nonzero x = p^v * unit; returns {v, unit} with the sign kept on the unit.
inline std::pair<std::int64_t, BigInt> split_prime_power(BigInt x, const PrimeModulus& p) {
  if (x == 0) throw error(errc::invalid_argument, "split_prime_power of zero");
  const BigInt pb = p.big();
  std::int64_t v = 0;
  BigInt q, r;
  for (;;) {
    divide_qr(x, pb, q, r);
    if (r != 0) break;
    x = std::move(q);
    ++v;
  }
  return {v, x};
}

inline ExtendedValuation valuation(const BigInt& x, const PrimeModulus& p) {
  if (x == 0) return ExtendedValuation::infinity();
  return split_prime_power(x, p).first;
}

inline ExtendedValuation valuation(const Rational& x, const PrimeModulus& p) {
  if (x == 0) return ExtendedValuation::infinity();
  return split_prime_power(numerator(x), p).first - split_prime_power(denominator(x), p).first;
}

inline BigInt prime_power(const PrimeModulus& p, std::int64_t e) {
  if (e < 0) throw error(errc::invalid_argument, "negative exponent");
  return boost::multiprecision::pow(p.big(), static_cast<unsigned>(e));
}

/// p^e when it fits in 64 bits.
inline std::optional<std::uint64_t> prime_power_u64(std::uint64_t p, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / p) return std::nullopt;
    r *= p;
  }
  return r;
}

/// num/den with the sign moved to the numerator; the two-argument Boost
/// constructor rejects negative denominators.
inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den < 0) return Rational(BigInt(-num), BigInt(-den));
  return Rational(num, den);
}

/// ||x||_p = p^(-v); zero maps to zero.
inline Rational padic_norm(const Rational& x, const PrimeModulus& p) {
  const auto v = valuation(x, p);
  if (v.is_infinite()) return Rational(0);
  const std::int64_t k = v.value();
  if (k >= 0) return Rational(BigInt(1), prime_power(p, k));
  return Rational(prime_power(p, -k));
}

/// Representative of a in [0, m).
inline BigInt reduce(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

/// base^exp mod modulus by square-and-multiply; result in [0, modulus-1].
inline BigInt mod_pow(const BigInt& base, BigInt exp, const BigInt& modulus) {
  if (modulus < 1) throw error(errc::invalid_argument, "modulus must be positive");
  if (exp < 0) throw error(errc::invalid_argument, "negative exponent");
  if (modulus == 1) return 0;
  if (modulus <= std::numeric_limits<std::uint64_t>::max() &&
      exp <= std::numeric_limits<std::uint64_t>::max()) {
    const auto m = modulus.convert_to<std::uint64_t>();
    const auto b = reduce(base, modulus).convert_to<std::uint64_t>();
    return detail::pow_mod_u64(b, exp.convert_to<std::uint64_t>(), m);
  }
  BigInt result = 1;
  BigInt b = reduce(base, modulus);
  while (exp > 0) {
    if (bit_test(exp, 0)) result = result * b % modulus;
    b = b * b % modulus;
    exp >>= 1;
  }
  return result;
}

/// Unique x in [1, modulus-1] with a*x = 1 (mod modulus), by extended Euclid.
inline BigInt inverse_mod(const BigInt& a, const BigInt& modulus) {
  if (modulus < 1) throw error(errc::invalid_argument, "modulus must be positive");
  if (modulus == 1) return 0;
  BigInt old_r = reduce(a, modulus), r = modulus;
  BigInt old_s = 1, s = 0;
  while (r != 0) {
    const BigInt q = old_r / r;
    BigInt next_r = old_r - q * r;
    BigInt next_s = old_s - q * s;
    old_r = std::move(r);
    r = std::move(next_r);
    old_s = std::move(s);
    s = std::move(next_s);
  }
  if (old_r != 1) {
    throw error(errc::not_invertible,
                a.str() + " has no inverse modulo " + modulus.str());
  }
  return reduce(old_s, modulus);
}

inline std::uint64_t inverse_mod_u64(std::uint64_t a, std::uint64_t modulus) {
  return inverse_mod(BigInt(a), BigInt(modulus)).convert_to<std::uint64_t>();
}

/// The ball p^v * (u + O(p^K)) with p not dividing u, or the distinguished zero.
class TruncatedPAdic {
 public:
  TruncatedPAdic(PrimeModulus p, std::int64_t v, const BigInt& u, int precision)
      : p_(p), v_(v), K_(precision) {
    if (precision < 1) throw error(errc::invalid_argument, "precision must be positive");
    u_ = reduce(u, prime_power(p_, K_));
    if (u_ % p_.big() == 0) throw error(errc::not_a_unit, "unit part divisible by p");
  }

  static TruncatedPAdic zero(PrimeModulus p, int precision) {
    TruncatedPAdic z(p, 0, 1, precision);
    z.zero_ = true;
    z.u_ = 0;
    return z;
  }

  static TruncatedPAdic from_rational(const Rational& x, PrimeModulus p, int precision) {
    if (x == 0) return zero(p, precision);
    auto [vn, un] = split_prime_power(numerator(x), p);
    auto [vd, ud] = split_prime_power(denominator(x), p);
    const BigInt mod = prime_power(p, precision);
    return TruncatedPAdic(p, vn - vd, un * inverse_mod(ud, mod), precision);
  }

  const PrimeModulus& prime() const noexcept { return p_; }
  bool is_zero() const noexcept { return zero_; }
  ExtendedValuation valuation() const {
    return zero_ ? ExtendedValuation::infinity() : ExtendedValuation(v_);
  }
  const BigInt& unit() const noexcept { return u_; }
  int precision() const noexcept { return K_; }

  friend bool operator==(const TruncatedPAdic& a, const TruncatedPAdic& b) {
    if (a.p_ != b.p_ || a.zero_ != b.zero_) return false;
    if (a.zero_) return true;
    return a.v_ == b.v_ && a.K_ == b.K_ && a.u_ == b.u_;
  }

 private:
  PrimeModulus p_;
  std::int64_t v_ = 0;
  BigInt u_;
  int K_ = 1;
  bool zero_ = false;
};

enum class MulDiv { multiply, divide };

/// Product or quotient at the common precision min(K_x, K_y).
inline TruncatedPAdic truncated_mul_div(const TruncatedPAdic& x, const TruncatedPAdic& y, MulDiv op) {
  if (x.prime() != y.prime()) throw error(errc::parameter_mismatch, "operands use different primes");
  const int K = std::min(x.precision(), y.precision());
  if (op == MulDiv::divide && y.is_zero()) throw error(errc::division_by_zero, "divisor is zero");
  if (x.is_zero() || y.is_zero()) return TruncatedPAdic::zero(x.prime(), K);
  const BigInt mod = prime_power(x.prime(), K);
  const std::int64_t vx = x.valuation().value();
  const std::int64_t vy = y.valuation().value();
  if (op == MulDiv::multiply) return TruncatedPAdic(x.prime(), vx + vy, x.unit() * y.unit() % mod, K);
  return TruncatedPAdic(x.prime(), vx - vy, x.unit() * inverse_mod(y.unit() % mod, mod), K);
}

inline TruncatedPAdic operator*(const TruncatedPAdic& x, const TruncatedPAdic& y) {
  return truncated_mul_div(x, y, MulDiv::multiply);
}

inline TruncatedPAdic operator/(const TruncatedPAdic& x, const TruncatedPAdic& y) {
  return truncated_mul_div(x, y, MulDiv::divide);
}

inline BigInt evaluate_polynomial(const Polynomial& f, const BigInt& x) {
  BigInt acc = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline BigInt evaluate_polynomial(const Polynomial& f, const BigInt& x, const BigInt& modulus) {
  BigInt acc = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = (acc * x + *it) % modulus;
  return reduce(acc, modulus);
}

inline Polynomial derivative(const Polynomial& f) {
  Polynomial d;
  for (std::size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * static_cast<unsigned long long>(i));
  return d;
}

/**
 * Lifts x0 to the p-adic root alpha of f guaranteed by Hensel's lemma and
 * returns alpha mod p^K.
 *
 * With d = v(f'(x0)) the precondition is v(f(x0)) > 2d. Writing j for the
 * accuracy |x - alpha| = p^-j, each Newton step maps j to 2j - d and is
 * carried out modulo p^(j'+d) only, so the working precision roughly doubles
 * per iteration until it reaches K.
 */
inline BigInt hensel_lift_root(const Polynomial& f, const PrimeModulus& p, const BigInt& x0, int K) {
  if (K < 1) throw error(errc::invalid_argument, "precision must be positive");
  const Polynomial df = derivative(f);
  const BigInt fx0 = evaluate_polynomial(f, x0);
  const BigInt dfx0 = evaluate_polynomial(df, x0);
  const BigInt target = prime_power(p, K);
  if (dfx0 == 0) {
    throw error(errc::precondition_failed, "f'(x0) = 0, Hensel inequality cannot hold");
  }
  const std::int64_t d = split_prime_power(dfx0, p).first;
  if (fx0 == 0) return reduce(x0, target);
  const std::int64_t e = split_prime_power(fx0, p).first;
  if (e <= 2 * d) {
    throw error(errc::precondition_failed,
                "||f(x0)|| < ||f'(x0)||^2 fails: v(f) = " + std::to_string(e) +
                    ", v(f') = " + std::to_string(d));
  }

  BigInt x = x0;
  std::int64_t j = e - d;
  const BigInt pd = prime_power(p, d);
  while (j < K) {
    const std::int64_t next = std::min<std::int64_t>(2 * j - d, K);
    const BigInt work = prime_power(p, next + d);
    const BigInt low = prime_power(p, next);
    const BigInt xr = reduce(x, work);
    const BigInt fx = evaluate_polynomial(f, xr, work);
    const BigInt dfx = evaluate_polynomial(df, xr, work);
    const BigInt step = (fx / pd) * inverse_mod((dfx / pd) % low, low);
    x = reduce(xr - step, low);
    j = next;
  }
  return reduce(x, target);
}

}  // namespace qdense
