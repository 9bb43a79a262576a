#include <gtest/gtest.h>

#include <random>

#include "qdense/denseness.hpp"
#include "qdense/oracle.hpp"

using namespace qdense;

namespace {

DiagonalForm form(int n, std::vector<long> c) {
  std::vector<BigInt> b(c.begin(), c.end());
  return DiagonalForm(n, std::move(b));
}

std::pair<std::int64_t, BigInt> class_of(const BigInt& value, const PrimeModulus& p, int K) {
  auto [v, u] = split_prime_power(value, p);
  return {v, reduce(u, prime_power(p, K))};
}

}  // namespace

TEST(EnumerateValues, Examples) {
  const auto a = enumerate_values(form(3, {1, 2}), PrimeModulus(7), 2, 1);
  std::set<std::uint64_t> units;
  for (const auto& [cls, rank] : a.witness) {
    if (cls.first == 0) units.insert(cls.second);
  }
  EXPECT_EQ(units, (std::set<std::uint64_t>{1, 2, 3, 4, 5, 6}));

  const auto b = enumerate_values(form(3, {1}), PrimeModulus(5), 5, 1);
  EXPECT_EQ(b.valuations(), (std::set<std::int64_t>{0, 3}));

  const auto c = enumerate_values(form(2, {1, 1}), PrimeModulus(3), 12, 2);
  for (auto v : c.valuations()) EXPECT_EQ(v % 2, 0);

  EXPECT_THROW(enumerate_values(form(3, {1, 1}), PrimeModulus(7), 100000000, 1), error);
}

TEST(EnumerateValues, WitnessesReproduceTheirClass) {
  for (const auto& F : {form(3, {1, 2}), form(4, {3, -5, 2}), form(5, {7, 1})}) {
    const PrimeModulus p(7);
    const auto vals = enumerate_values(F, p, 6, 3);
    for (const auto& [cls, rank] : vals.witness) {
      const auto got = class_of(evaluate(F, vals.point(rank)), p, 3);
      EXPECT_EQ(got.first, cls.first);
      EXPECT_EQ(got.second, cls.second);
    }
  }
}

TEST(EnumerateValues, LeastWitnessUnderBoxOrder) {
  // Point ranks enumerate coordinates 0, 1, -1, 2, -2, ... with the last coordinate most significant.
  const BoxGeometry g{3, 2};
  EXPECT_EQ(g.point(0), (FormPoint{0, 0}));
  EXPECT_EQ(g.point(1), (FormPoint{1, 0}));
  EXPECT_EQ(g.point(2), (FormPoint{-1, 0}));
  EXPECT_EQ(g.point(7), (FormPoint{0, 1}));
  const auto vals = enumerate_values(form(3, {1, 1}), PrimeModulus(7), 3, 1);
  EXPECT_EQ(vals.witness.at({0, 1}), 1u);
}

TEST(EnumerateValues, WorkerCountDoesNotChangeResult) {
  const auto F = form(3, {1, 2, 5});
  const PrimeModulus p(5);
  const auto one = enumerate_values(F, p, 12, 2, default_budget, 1);
  const auto four = enumerate_values(F, p, 12, 2, default_budget, 4);
  EXPECT_EQ(one.witness, four.witness);
}

TEST(EnumerateValues, WideEvaluationPath) {
  // Coefficients large enough to leave the 128-bit path.
  const BigInt big = pow(BigInt(10), 40);
  const DiagonalForm F(3, {big, 1});
  const auto vals = enumerate_values(F, PrimeModulus(5), 3, 2);
  for (const auto& [cls, rank] : vals.witness) {
    const auto got = class_of(evaluate(F, vals.point(rank)), PrimeModulus(5), 2);
    EXPECT_EQ(got.first, cls.first);
    EXPECT_EQ(got.second, cls.second);
  }
}

TEST(QuotientCoverage, SumOfCubesCoversEverything) {
  const auto r = quotient_coverage(form(3, {1, 1}), PrimeModulus(7), {20, 1, 3});
  for (const auto& l : r.levels) EXPECT_DOUBLE_EQ(l.fraction, 1.0) << l.valuation;
  EXPECT_DOUBLE_EQ(r.overall, 1.0);
}

TEST(QuotientCoverage, ShiftedCubicHitsEveryResidue) {
  const auto r = quotient_coverage(form(3, {5, 1}), PrimeModulus(5), {20, 1, 3});
  EXPECT_EQ(r.observed_residues, (std::vector<int>{0, 1, 2}));
}

TEST(QuotientCoverage, ThresholdFormMissesResidueThree) {
  const auto r = quotient_coverage(form(6, {1, 5, 25}), PrimeModulus(5), {8, 1, 6});
  EXPECT_EQ(r.observed_residues, (std::vector<int>{0, 1, 2, 4, 5}));
  EXPECT_EQ(r.level(3).hits, 0u);
  EXPECT_EQ(r.level(-3).hits, 0u);
}

TEST(QuotientCoverage, WitnessPairsReproduceTheirClass) {
  const auto F = form(4, {1, 3});
  const PrimeModulus p(3);
  const auto r = quotient_coverage(F, p, {10, 2, 4});
  const std::uint64_t P = r.classes.modulus();
  for (std::int64_t v = -4; v <= 4; ++v) {
    for (std::uint64_t u = 1; u < P; ++u) {
      if (u % 3 == 0) continue;
      const auto w = r.classes.witness(v, u);
      EXPECT_EQ(w.has_value(), r.classes.hit(v, u));
      if (!w) continue;
      const Rational q(evaluate(F, w->first), evaluate(F, w->second));
      const auto t = TruncatedPAdic::from_rational(q, p, 2);
      EXPECT_EQ(t.valuation().value(), v);
      EXPECT_EQ(t.unit(), u);
    }
  }
}

TEST(QuotientCoverage, HitSetGrowsWithBox) {
  const auto F = form(3, {2, 7});
  const PrimeModulus p(7);
  const auto small = quotient_coverage(F, p, {4, 2, 3});
  const auto large = quotient_coverage(F, p, {9, 2, 3});
  for (std::int64_t v = -3; v <= 3; ++v) {
    for (std::uint64_t u = 1; u < 49; ++u) {
      if (u % 7 != 0 && small.classes.hit(v, u)) {
        EXPECT_TRUE(large.classes.hit(v, u));
      }
    }
  }
}

TEST(QuotientCoverage, ClassArithmeticMatchesTruncatedDivision) {
  std::mt19937_64 rng(51);
  const PrimeModulus p(5);
  const std::uint64_t P = 125;
  for (int i = 0; i < 10000; ++i) {
    const std::int64_t v1 = static_cast<std::int64_t>(rng() % 9), v2 = static_cast<std::int64_t>(rng() % 9);
    std::uint64_t u1 = 0, u2 = 0;
    while (u1 % 5 == 0) u1 = rng() % P;
    while (u2 % 5 == 0) u2 = rng() % P;
    const auto q = quotient_class(v1, u1, v2, u2, P);
    const auto t = TruncatedPAdic(p, v1, u1, 3) / TruncatedPAdic(p, v2, u2, 3);
    EXPECT_EQ(q.first, t.valuation().value());
    EXPECT_EQ(BigInt(q.second), t.unit());
  }
}

TEST(CheckCertificate, Examples) {
  const auto a = quotient_coverage(form(7, {1, 2, 4}), PrimeModulus(2), {6, 2, 7});
  const ObstructionCertificate gap{7, 2, ValuationGap{{3, 4}}};
  EXPECT_TRUE(std::holds_alternative<Consistent>(check_certificate(gap, a)));

  const auto b = quotient_coverage(form(3, {1, 1}), PrimeModulus(7), {5, 1, 3});
  const auto res = check_certificate(ObstructionCertificate{3, 7, ValuationGap{{0}}}, b);
  ASSERT_TRUE(std::holds_alternative<Contradiction>(res));
  const auto& c = std::get<Contradiction>(res);
  EXPECT_EQ(c.x, (FormPoint{1, 0}));
  EXPECT_EQ(c.y, (FormPoint{1, 0}));
  EXPECT_EQ(c.valuation, 0);
  EXPECT_EQ(c.unit, 1u);
}

TEST(CheckCertificate, ResidueGapAtLevelZero) {
  // m = 5 is not a cube mod 7, and x^3 + 2y^3 has unit values whose ratios reach 5 (54 = 5 mod 7).
  const auto F = form(3, {1, 2});
  const auto report = quotient_coverage(F, PrimeModulus(7), {30, 1, 3});
  const ObstructionCertificate bogus{3, 7, ResidueGap{0, 5, 1}};
  EXPECT_TRUE(std::holds_alternative<Contradiction>(check_certificate(bogus, report)));
  const auto engine = decide_binary(F, PrimeModulus(7));
  ASSERT_TRUE(engine.certificate);
  EXPECT_TRUE(std::holds_alternative<Consistent>(check_certificate(*engine.certificate, report)));
}

TEST(CheckCertificate, ParameterMismatch) {
  const auto r = quotient_coverage(form(3, {1, 1}), PrimeModulus(7), {3, 1, 3});
  try {
    check_certificate(ObstructionCertificate{3, 5, ValuationGap{{1}}}, r);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::parameter_mismatch);
  }
  try {
    check_certificate(ObstructionCertificate{3, 7, ResidueGap{0, 3, 2}}, r);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::parameter_mismatch);
  }
}

TEST(CoverageTrend, Examples) {
  const auto t = coverage_trend(form(3, {1, 1}), PrimeModulus(7), 2, 2, {5, 10, 20, 40});
  ASSERT_EQ(t.size(), 4u);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GE(t[i].overall, t[i - 1].overall);
  EXPECT_GE(t.back().overall, 0.99);

  EXPECT_TRUE(coverage_trend(form(3, {1, 1}), PrimeModulus(7), 2, 2, {}).empty());

  const auto plateau = coverage_trend(form(3, {1, 2}), PrimeModulus(7), 2, 2, {5, 10, 20, 40});
  for (std::size_t i = 1; i < plateau.size(); ++i) EXPECT_GE(plateau[i].overall, plateau[i - 1].overall);
  EXPECT_LT(plateau.back().overall, 1.0);
  // Regression baseline: levels +-1, +-2 stay empty, so coverage is at most 1/5.
  EXPECT_LE(plateau.back().overall, 0.2);
}
