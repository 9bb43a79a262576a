#include <gtest/gtest.h>

#include <random>

#include "brute.hpp"
#include "qdense/padic.hpp"
#include "qdense/residues.hpp"

using namespace qdense;

TEST(LemmaOneExponent, Examples) {
  const auto a = lemma1_exponent(3, PrimeModulus(3));
  EXPECT_EQ(a.k, 1);
  EXPECT_EQ(a.M, 2);
  const auto b = lemma1_exponent(4, PrimeModulus(2));
  EXPECT_EQ(b.k, 2);
  EXPECT_EQ(b.M, 4);
  const auto c = lemma1_exponent(5, PrimeModulus(7));
  EXPECT_EQ(c.k, 0);
  EXPECT_EQ(c.M, 1);
}

TEST(LemmaOneExponent, BracketOnlyForEvenDegreeAtTwo) {
  for (int n = 2; n <= 40; ++n) {
    for (std::uint64_t p : {2, 3, 5, 7}) {
      const auto e = lemma1_exponent(n, PrimeModulus(p));
      EXPECT_EQ(e.k, brute::val(n, static_cast<std::int64_t>(p)));
      EXPECT_EQ(e.M, e.k + ((p == 2 && n % 2 == 0) ? 2 : 1));
    }
  }
}

TEST(NthPowerResidues, Examples) {
  EXPECT_EQ(nth_power_residues(3, PrimeModulus(7), 1).members, (std::vector<std::uint64_t>{1, 6}));
  EXPECT_EQ(nth_power_residues(3, PrimeModulus(3), 2).members, (std::vector<std::uint64_t>{1, 8}));
  EXPECT_EQ(nth_power_residues(1, PrimeModulus(5), 1).members, (std::vector<std::uint64_t>{1, 2, 3, 4}));
  EXPECT_THROW(nth_power_residues(3, PrimeModulus(7), 9, 1000), error);
}

TEST(NthPowerResidues, ClosedUnderMultiplicationAndContainsOne) {
  for (std::uint64_t p : {2, 3, 5, 7}) {
    for (int n = 1; n <= 8; ++n) {
      for (int M = 1; M <= 4; ++M) {
        const auto s = nth_power_residues(n, PrimeModulus(p), M);
        EXPECT_TRUE(s.contains(1));
        for (auto a : s.members) {
          EXPECT_NE(a % p, 0u);
          for (auto b : s.members) EXPECT_TRUE(s.contains(a * b % s.modulus));
        }
      }
    }
  }
}

TEST(IsNthPowerResidue, Examples) {
  EXPECT_TRUE(is_nth_power_residue(6, 3, PrimeModulus(7), 1));
  EXPECT_FALSE(is_nth_power_residue(5, 3, PrimeModulus(7), 1));
  EXPECT_FALSE(is_nth_power_residue(15, 4, PrimeModulus(2), 4));
  EXPECT_THROW(is_nth_power_residue(14, 3, PrimeModulus(7), 1), error);
}

TEST(IsNthPowerResidue, AgreesWithIndependentEnumeration) {
  for (std::uint64_t p : {2, 3, 5, 7}) {
    for (unsigned n = 1; n <= 12; ++n) {
      for (int M = 1; brute::ipow(p, static_cast<unsigned>(M)) <= 3000; ++M) {
        const std::uint64_t m = brute::ipow(p, static_cast<unsigned>(M));
        const auto ref = brute::residues(n, p, m);
        for (std::uint64_t u = 1; u < m; ++u) {
          if (u % p == 0) continue;
          ASSERT_EQ(is_nth_power_residue(u, static_cast<int>(n), PrimeModulus(p), M), ref.count(u) > 0)
              << "u=" << u << " n=" << n << " p=" << p << " M=" << M;
        }
      }
    }
  }
}

TEST(PowerClassGroup, KeysSeparateCosets) {
  for (std::uint64_t p : {2, 3, 5, 7}) {
    for (int n = 2; n <= 8; ++n) {
      for (int M = 1; brute::ipow(p, static_cast<unsigned>(M)) <= 400; ++M) {
        const PowerClassGroup g(n, PrimeModulus(p), M);
        const auto s = nth_power_residues(n, PrimeModulus(p), M);
        const std::uint64_t m = s.modulus;
        std::set<BigInt> keys;
        for (std::uint64_t u = 1; u < m; ++u) {
          if (u % p == 0) continue;
          keys.insert(g.key(u));
          for (std::uint64_t w = 1; w < m; w += 3) {
            if (w % p == 0) continue;
            const std::uint64_t ratio = u * inverse_mod_u64(w, m) % m;
            EXPECT_EQ(g.key(u) == g.key(w), s.contains(ratio));
          }
        }
        EXPECT_EQ(BigInt(keys.size()), g.order());
        EXPECT_EQ(BigInt((m / p * (p - 1)) / s.members.size()), g.order());
      }
    }
  }
}

TEST(TwoAdicLog, ReconstructsUnit) {
  for (int M = 3; M <= 12; ++M) {
    const BigInt mod = BigInt(1) << M;
    for (int u = 1; u < (1 << M); u += 2) {
      const auto [s, t] = two_adic_log(u, M);
      BigInt back = mod_pow(3, t, mod);
      if (s) back = reduce(-back, mod);
      EXPECT_EQ(back, u);
    }
  }
}

TEST(IsNthPowerInZp, Examples) {
  EXPECT_TRUE(is_nth_power_in_Zp(Rational(-1), 3, PrimeModulus(3)));
  EXPECT_FALSE(is_nth_power_in_Zp(Rational(5), 3, PrimeModulus(5)));
  EXPECT_TRUE(is_nth_power_in_Zp(Rational(8), 3, PrimeModulus(5)));
  EXPECT_THROW(is_nth_power_in_Zp(Rational(1, 5), 3, PrimeModulus(5)), error);
  EXPECT_TRUE(is_nth_power_in_Zp(Rational(8, 27), 3, PrimeModulus(5)));
}

TEST(IsNthPowerInZp, PowersAreRecognised) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5, 7, 11}[rng() % 5];
    const int n = 2 + static_cast<int>(rng() % 7);
    BigInt a = 1 + rng() % 1000;
    EXPECT_TRUE(is_nth_power_in_Zp(Rational(pow(a, static_cast<unsigned>(n))), n, PrimeModulus(p)));
  }
}

TEST(Stabilization, Examples) {
  EXPECT_TRUE(stabilization_check(8, 3, PrimeModulus(3), 2));
  EXPECT_TRUE(stabilization_check(1, 5, PrimeModulus(5), 3));
  EXPECT_TRUE(stabilization_check(15, 4, PrimeModulus(2), 2));
  EXPECT_FALSE(is_nth_power_residue(15, 4, PrimeModulus(2), 4));
  EXPECT_FALSE(is_nth_power_residue(15, 4, PrimeModulus(2), 6));
}

TEST(LiftNthRoot, RootsSatisfyTheEquation) {
  std::mt19937_64 rng(22);
  int count = 0;
  while (count < 300) {
    const std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5, 7, 13}[rng() % 5];
    const int n = 2 + static_cast<int>(rng() % 8);
    const Rational c(BigInt(static_cast<std::int64_t>(rng() % 2001) - 1000), BigInt(1 + rng() % 50));
    if (c == 0 || valuation(c, PrimeModulus(p)).value() < 0) continue;
    const PrimeModulus pm(p);
    const auto root = lift_nth_root(c, n, pm, 30);
    EXPECT_EQ(root.has_value(), is_nth_power_in_Zp(c, n, pm));
    if (!root) continue;
    ++count;
    const BigInt mod = prime_power(pm, 30);
    const BigInt lhs = pow(*root, static_cast<unsigned>(n)) * denominator(c) - numerator(c);
    EXPECT_EQ(reduce(lhs, mod), 0) << c << " n=" << n << " p=" << p;
  }
}

TEST(LiftNthRoot, CliExamples) {
  const auto r = lift_nth_root(Rational(-1), 3, PrimeModulus(3), 5);
  ASSERT_TRUE(r);
  EXPECT_EQ(reduce(pow(*r, 3) + 1, BigInt(243)), 0);
  EXPECT_EQ(*r % 3, 2);
  EXPECT_EQ(lift_nth_root(Rational(1), 5, PrimeModulus(7), 10), BigInt(1));
  EXPECT_FALSE(lift_nth_root(Rational(5), 3, PrimeModulus(5), 4));
}
