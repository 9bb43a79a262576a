#include <gtest/gtest.h>

#include <random>

#include "brute.hpp"
#include "qdense/forms.hpp"

using namespace qdense;

namespace {

DiagonalForm form(int n, std::vector<long> c) {
  std::vector<BigInt> b(c.begin(), c.end());
  return DiagonalForm(n, std::move(b));
}

}  // namespace

TEST(DiagonalForm, Validation) {
  EXPECT_THROW(form(1, {1, 1}), error);
  EXPECT_THROW(form(3, {}), error);
  EXPECT_THROW(form(3, {1, 0}), error);
  EXPECT_EQ(form(3, {1, 2, -5}).to_string(), "x1^3 + 2*x2^3 - 5*x3^3");
}

TEST(Evaluate, Examples) {
  EXPECT_EQ(evaluate(form(3, {1, 2}), FormPoint{1, 1}), 3);
  EXPECT_EQ(evaluate(form(3, {1, 2}), FormPoint{0, 0}), 0);
  EXPECT_EQ(evaluate(form(3, {5, 1}), FormPoint{1, 2}), 13);
  try {
    evaluate(form(3, {1, 2}), FormPoint{1});
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::dimension_mismatch);
  }
}

TEST(IsPrimitive, Examples) {
  EXPECT_TRUE(is_primitive(form(3, {1, 2})));
  EXPECT_FALSE(is_primitive(form(3, {2, 4})));
  EXPECT_TRUE(is_primitive(form(2, {6, 10, 15})));
}

TEST(NormalizeBinary, Examples) {
  const auto a = normalize_binary(form(3, {1, 2}), PrimeModulus(7));
  EXPECT_EQ(a.delta, 0);
  EXPECT_EQ(a.unit_a, 1);
  EXPECT_EQ(a.unit_b, 2);
  const auto b = normalize_binary(form(3, {5, 1}), PrimeModulus(5));
  EXPECT_EQ(b.delta, 1);
  EXPECT_EQ(b.delta_class, 1);
  EXPECT_EQ(b.unit_a, 1);
  EXPECT_EQ(b.unit_b, 1);
  const auto c = normalize_binary(form(3, {125, 1}), PrimeModulus(5));
  EXPECT_EQ(c.delta, 3);
  EXPECT_EQ(c.delta_class, 0);
  EXPECT_EQ(c.reduced, form(3, {1, 1}));
  EXPECT_FALSE(c.trace.empty());
}

TEST(NormalizeBinary, QuotientInvariance) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> e(0, 7), u(-20, 20), pt(-9, 9);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t pv = std::vector<std::uint64_t>{2, 3, 5, 7}[rng() % 4];
    const int n = 3 + static_cast<int>(rng() % 4);
    auto coeff = [&]() -> BigInt {
      long x = 0;
      while (x == 0) x = u(rng);
      return BigInt(x) * pow(BigInt(pv), static_cast<unsigned>(e(rng)));
    };
    const DiagonalForm F(n, {coeff(), coeff()});
    const PrimeModulus p(pv);
    const auto N = normalize_binary(F, p);
    const BigInt x = pt(rng), y = pt(rng), z = pt(rng), w = pt(rng);
    const BigInt fxy = evaluate(F, FormPoint{x, y});
    const BigInt fzw = evaluate(F, FormPoint{z, w});
    const auto m1 = N.map_point(x, y), m2 = N.map_point(z, w);
    const BigInt gxy = evaluate(N.reduced, FormPoint{m1[0], m1[1]});
    const BigInt gzw = evaluate(N.reduced, FormPoint{m2[0], m2[1]});
    EXPECT_EQ(Rational(fxy), N.scale() * Rational(gxy));
    if (fzw != 0) {
      EXPECT_EQ(make_rational(fxy, fzw), make_rational(gxy, gzw));
    }
    EXPECT_GE(N.delta_class, 0);
    EXPECT_LT(N.delta_class, n);
    EXPECT_EQ(N.delta, N.alpha - N.beta);
  }
}

TEST(Anisotropy, Examples) {
  EXPECT_TRUE(is_anisotropic_mod_p(form(2, {1, 1}), PrimeModulus(3)).anisotropic);
  const auto b = is_anisotropic_mod_p(form(2, {1, -1}), PrimeModulus(3));
  EXPECT_FALSE(b.anisotropic);
  EXPECT_EQ(b.witness, (FieldVector{1, 1}));
  const auto c = is_anisotropic_mod_p(form(3, {1, 1, 1}), PrimeModulus(7));
  EXPECT_FALSE(c.anisotropic);
  EXPECT_EQ(c.witness, (FieldVector{1, 3, 0}));
  EXPECT_THROW(is_anisotropic_mod_p(form(3, {1, 1, 1}), PrimeModulus(101), 1000), error);
}

TEST(Anisotropy, AgreesWithFullEnumeration) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 400; ++i) {
    const std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13}[rng() % 6];
    const unsigned n = 2 + static_cast<unsigned>(rng() % 5);
    const std::size_t r = 1 + rng() % 3;
    std::vector<std::int64_t> a(r);
    for (auto& x : a) x = 1 + static_cast<std::int64_t>(rng() % 40);
    const DiagonalForm F(static_cast<int>(n), std::vector<BigInt>(a.begin(), a.end()));
    const auto res = is_anisotropic_mod_p(F, PrimeModulus(p));
    EXPECT_EQ(res.anisotropic, !brute::has_zero_mod_p(a, n, p));
    if (res.anisotropic) {
      for (auto x : a) EXPECT_NE(x % static_cast<std::int64_t>(p), 0);
    } else {
      BigInt s = 0;
      for (std::size_t j = 0; j < r; ++j) s += BigInt(a[j]) * pow(BigInt(res.witness[j]), n);
      EXPECT_EQ(s % p, 0);
    }
  }
}

TEST(Anisotropy, GeneralFormInput) {
  // x^2 + xy + y^2 has no nonzero zero mod 2, and x^2 + xy - 2y^2 = (x - y)(x + 2y) has one mod 5.
  const GeneralForm q(2, {{{2, 0}, 1}, {{1, 1}, 1}, {{0, 2}, 1}});
  EXPECT_TRUE(is_anisotropic_mod_p(q, PrimeModulus(2)).anisotropic);
  const GeneralForm h(2, {{{2, 0}, 1}, {{1, 1}, 1}, {{0, 2}, -2}});
  const auto res = is_anisotropic_mod_p(h, PrimeModulus(5));
  EXPECT_FALSE(res.anisotropic);
  EXPECT_EQ(res.witness, (FieldVector{1, 1}));
  EXPECT_EQ(is_anisotropic_mod_p(GeneralForm::from_diagonal(form(2, {1, 1})), PrimeModulus(3)).anisotropic, true);
  EXPECT_THROW(GeneralForm(2, {{{2, 0}, 1}, {{1, 0}, 1}}), error);
}

TEST(NonsingularZero, Examples) {
  EXPECT_EQ(find_nonsingular_zero_mod_p(form(3, {1, 1, 1}), PrimeModulus(7)), (FieldVector{1, 3, 0}));
  EXPECT_EQ(find_nonsingular_zero_mod_p(form(3, {1, 1, 1}), PrimeModulus(2)), (FieldVector{1, 1, 0}));
  const auto F = form(3, {1, 2, 3});
  const auto z = find_nonsingular_zero_mod_p(F, PrimeModulus(5));
  const BigInt v = evaluate(F, FormPoint{z[0], z[1], z[2]});
  EXPECT_EQ(v % 5, 0);
  bool nonsingular = false;
  for (int i = 0; i < 3; ++i) nonsingular |= (3 * F.coeff(i) * z[i] * z[i]) % 5 != 0;
  EXPECT_TRUE(nonsingular);
  EXPECT_THROW(find_nonsingular_zero_mod_p(form(3, {1, 1, 1}), PrimeModulus(3)), error);
  EXPECT_THROW(find_nonsingular_zero_mod_p(form(3, {5, 1, 1}), PrimeModulus(5)), error);
  EXPECT_THROW(find_nonsingular_zero_mod_p(form(3, {1, 1}), PrimeModulus(5)), error);
}

TEST(ValuationProfile, Examples) {
  const auto a = valuation_profile(form(5, {1, 7, 49}), PrimeModulus(7));
  EXPECT_EQ(a.residues, (std::vector<int>{0, 1, 2}));
  EXPECT_TRUE(a.pairwise_distinct);
  const auto b = valuation_profile(form(3, {1, 8}), PrimeModulus(2));
  EXPECT_EQ(b.residues, (std::vector<int>{0, 0}));
  EXPECT_FALSE(b.pairwise_distinct);
  const auto c = valuation_profile(form(6, {1, 5, 25}), PrimeModulus(5));
  EXPECT_EQ(c.residues, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(c.attainable, (std::vector<int>{0, 1, 2}));
}

TEST(ValuationProfile, AttainableSetBoundsObservedValuations) {
  const auto F = form(6, {1, 5, 25});
  const auto prof = valuation_profile(F, PrimeModulus(5));
  std::set<int> seen;
  for (long x = -6; x <= 6; ++x) {
    for (long y = -6; y <= 6; ++y) {
      for (long z = -6; z <= 6; ++z) {
        const BigInt v = evaluate(F, FormPoint{x, y, z});
        if (v == 0) continue;
        seen.insert(mod_class(valuation(v, PrimeModulus(5)).value(), 6));
      }
    }
  }
  EXPECT_EQ(std::vector<int>(seen.begin(), seen.end()), prof.attainable);
}

TEST(CanonicalForm, StripsContentAndReducesValuations) {
  EXPECT_EQ(canonical_form(form(3, {250, 10}), PrimeModulus(5)), form(3, {25, 1}));
  EXPECT_EQ(canonical_form(form(2, {9, 3}), PrimeModulus(3)), form(2, {3, 1}));
}
