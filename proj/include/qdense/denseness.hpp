#pragma once

/**
 * Decision engine for density of R(F) = {F(x)/F(y)} in Q_p.
 *
 * R(F) is a union of cosets of (Q_p^x)^n, which are open, so it is dense
 * exactly when it meets every class of H = Q_p^x / (Q_p^x)^n. H is finite:
 * Z/n (valuation mod n) times U/U^n, and a unit's class is already fixed by
 * its residue mod p^M with M from lemma1_exponent. For binary forms the value
 * classes S are computed exactly and R(F) is dense iff S * S^-1 = H.
 */

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qdense/certificate.hpp"
#include "qdense/errors.hpp"
#include "qdense/forms.hpp"
#include "qdense/oracle.hpp"
#include "qdense/padic.hpp"
#include "qdense/residues.hpp"

namespace qdense {

enum class Status { Dense, NotDense, Inconclusive };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Dense: return "Dense";
    case Status::NotDense: return "NotDense";
    case Status::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

enum class RuleId { R1, R2, R3, R4, R5, R6 };

inline std::string to_string(RuleId id) { return "R" + std::to_string(static_cast<int>(id) + 1); }

struct RuleApplication {
  RuleId id;
  std::string citation;
  Params params;

  friend bool operator==(const RuleApplication&, const RuleApplication&) = default;
};

struct Verdict {
  Status status = Status::Inconclusive;
  std::vector<RuleApplication> trace;
  std::optional<ObstructionCertificate> certificate;
  std::vector<std::string> notes;
  std::optional<CoverageSummary> evidence;

  /// Rule that settled the verdict (last trace entry).
  RuleId rule() const { return trace.empty() ? RuleId::R6 : trace.back().id; }

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct DecideOptions {
  std::uint64_t budget = default_budget;
  bool attach_evidence = true;
  /// Box used for Inconclusive evidence; 0 picks the largest box with (2B+1)^r <= evidence_points.
  int evidence_box = 0;
  std::uint64_t evidence_points = 200'000;
  int evidence_precision = 2;
};

struct DifferenceCover {
  bool covers;
  std::vector<int> missing;

  friend bool operator==(const DifferenceCover&, const DifferenceCover&) = default;
};

inline DifferenceCover difference_cover_check(const std::vector<int>& residues, int n) {
  if (n < 1) throw error(errc::invalid_argument, "modulus must be positive");
  if (residues.empty()) throw error(errc::invalid_argument, "residue set must be nonempty");
  std::vector<char> hit(static_cast<std::size_t>(n), 0);
  for (int a : residues) {
    for (int b : residues) hit[static_cast<std::size_t>(mod_class(a - b, n))] = 1;
  }
  DifferenceCover out{true, {}};
  for (int d = 0; d < n; ++d) {
    if (!hit[static_cast<std::size_t>(d)]) {
      out.covers = false;
      out.missing.push_back(d);
    }
  }
  return out;
}

namespace detail {

/// An element of H: valuation class mod n and the U/U^n key, with a unit representative mod p^M.
using ClassKey = std::pair<int, BigInt>;
using ClassSet = std::map<ClassKey, BigInt>;

struct ClassArithmetic {
  int n;
  PrimeModulus p;
  PowerClassGroup group;

  ClassArithmetic(int n_, PrimeModulus p_, int M) : n(n_), p(p_), group(n_, p_, M) {}

  void insert(ClassSet& s, std::int64_t v, const BigInt& unit) const {
    const BigInt u = reduce(unit, group.modulus());
    s.emplace(ClassKey{mod_class(v, n), group.key(u)}, u);
  }

  /// Class of a nonzero integer.
  void insert_value(ClassSet& s, const BigInt& value) const {
    auto [v, u] = split_prime_power(value, p);
    insert(s, v, u);
  }

  ClassSet quotients(const ClassSet& s) const {
    ClassSet out;
    for (const auto& [a, ua] : s) {
      for (const auto& [b, ub] : s) {
        insert(out, a.first - b.first, ua * inverse_mod(ub, group.modulus()));
      }
    }
    return out;
  }
};

inline std::uint64_t checked_count(const PrimeModulus& p, std::int64_t e, std::uint64_t budget) {
  if (e <= 0) return 1;
  auto c = prime_power_u64(p.value(), static_cast<int>(e));
  if (!c || *c > budget) throw error(errc::budget_exceeded, "class enumeration exceeds the budget");
  return *c;
}

inline std::string join(const std::vector<int>& xs) {
  std::string s = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s + "}";
}

/**
 * Builds the certificate for a quotient class set T that is not all of H:
 * a ValuationGap when some valuation class is absent, otherwise a ResidueGap
 * at level 0 if that level is incomplete (else the least incomplete level),
 * at the least exponent e where the projection of the level to
 * (Z/p^e)^x / n-th powers is not onto, with m the least unit outside it.
 */
inline ObstructionCertificate certificate_for(const ClassSet& T, const ClassArithmetic& ca, int M) {
  const int n = ca.n;
  std::set<int> levels;
  for (const auto& [k, u] : T) levels.insert(k.first);
  ObstructionCertificate cert{n, ca.p.value(), ValuationGap{}};
  std::vector<int> missing;
  for (int l = 0; l < n; ++l) {
    if (!levels.count(l)) missing.push_back(l);
  }
  if (!missing.empty()) {
    cert.gap = ValuationGap{missing};
    return cert;
  }
  std::optional<int> level;
  for (int l = 0; l < n && !level; ++l) {
    std::size_t count = 0;
    for (const auto& [k, u] : T) count += k.first == l;
    if (BigInt(count) < ca.group.order()) level = l;
  }
  if (!level) throw error(errc::precondition_failed, "class set is all of H");
  for (int e = 1; e <= M; ++e) {
    const PowerClassGroup ge(n, ca.p, e);
    std::set<BigInt> seen;
    for (const auto& [k, u] : T) {
      if (k.first == *level) seen.insert(ge.key(u));
    }
    if (BigInt(seen.size()) == ge.order()) continue;
    for (BigInt m = 1; m < ge.modulus(); ++m) {
      if (m % ca.p.big() == 0) continue;
      if (!seen.count(ge.key(m))) {
        cert.gap = ResidueGap{*level, m, e};
        return cert;
      }
    }
  }
  throw error(errc::precondition_failed, "no residue gap found");
}

inline Params cert_params(const ObstructionCertificate& c) {
  if (const auto* vg = std::get_if<ValuationGap>(&c.gap)) return {{"forbidden", join(vg->forbidden)}};
  const auto& rg = std::get<ResidueGap>(c.gap);
  return {{"level", std::to_string(rg.level)}, {"m", rg.m.str()}, {"e", std::to_string(rg.exponent)}};
}

}  // namespace detail

/// Exact decision for a x^n + b y^n, n >= 3.
inline Verdict decide_binary(const DiagonalForm& F, const PrimeModulus& p, std::uint64_t budget = default_budget) {
  if (F.r() != 2) throw error(errc::dimension_mismatch, "decide_binary needs a binary form");
  if (F.n() < 3) throw error(errc::unsupported_degree, "binary forms need n >= 3");
  const int n = F.n();
  const auto norm = normalize_binary(F, p);
  const int rho = norm.delta_class;
  const int M = lemma1_exponent(n, p).M;
  const detail::ClassArithmetic ca(n, p, M);
  const BigInt pM = prime_power(p, M);
  const BigInt& A = norm.unit_a;
  const BigInt& B = norm.unit_b;

  Params params{{"delta", std::to_string(norm.delta)}, {"rho", std::to_string(rho)},
                {"l_a", A.str()},                      {"l_b", B.str()},
                {"M", std::to_string(M)}};
  for (const auto& step : norm.trace) params.emplace_back("step", step.identity);

  Verdict out;
  const BigInt c = reduce(-B * inverse_mod(A, pM), pM);
  const bool case_one = rho == 0 && is_nth_power_residue(c, n, p, M);
  if (case_one) {
    params.emplace_back("-l_b/l_a mod p^M", c.str());
    out.status = Status::Dense;
    out.trace.push_back({RuleId::R1, norm.delta == 0 ? "Theorem 1.1(1)" : "Theorem 1.1(2)", params});
    return out;
  }

  // Value classes of G = p^rho A x^n + B y^n over primitive (x, y).
  detail::ClassSet S;
  if (rho != 0) {
    const std::uint64_t w0 = detail::checked_count(p, M - rho, budget);
    const std::uint64_t w1 = detail::checked_count(p, M - (n - rho), budget);
    const BigInt lead0 = prime_power(p, rho) * A;
    const BigInt lead1 = prime_power(p, n - rho) * B;
    for (std::uint64_t w = 0; w < w0; ++w) {
      ca.insert(S, 0, B + lead0 * boost::multiprecision::pow(BigInt(w), static_cast<unsigned>(n)));
    }
    for (std::uint64_t w = 0; w < w1; ++w) {
      ca.insert(S, rho, A + lead1 * boost::multiprecision::pow(BigInt(w), static_cast<unsigned>(n)));
    }
  } else if (M == 1) {
    // -B/A is not an n-th power mod p, so G(x, y) is a unit for primitive (x, y).
    ca.insert(S, 0, A);
  } else {
    // A t^n + B has valuation < M, so its class depends on t mod p^(2M-1) only.
    const std::uint64_t count = detail::checked_count(p, 2 * M - 1, budget);
    for (std::uint64_t t = 0; t < count; ++t) {
      ca.insert_value(S, A * boost::multiprecision::pow(BigInt(t), static_cast<unsigned>(n)) + B);
    }
    ca.insert(S, 0, A + B * prime_power(p, n));
  }
  const auto T = ca.quotients(S);
  const BigInt full = BigInt(n) * ca.group.order();
  params.emplace_back("|S/S|", std::to_string(T.size()));
  params.emplace_back("|H|", full.str());

  if (BigInt(T.size()) == full) {
    out.status = Status::Dense;
    out.trace.push_back({RuleId::R1, "Theorem 1.1; exact value classes modulo n-th powers", params});
  } else {
    out.status = Status::NotDense;
    out.certificate = detail::certificate_for(T, ca, M);
    for (auto& kv : detail::cert_params(*out.certificate)) params.push_back(std::move(kv));
    out.trace.push_back({RuleId::R1, rho == 0 ? "Theorem 1.1(1)" : "Theorem 1.1(3)", params});
  }
  // Cases (1)-(3) predict NotDense here; an exact Dense answer is flagged.
  if (out.status == Status::Dense) {
    out.notes.push_back(std::string("exact class computation gives Dense where Theorem 1.1(") +
                        (rho == 0 ? "1)" : "3)") + " predicts NotDense (no usable n-th power non-residue)");
  }
  return out;
}

namespace detail {

inline bool is_remark_form(const DiagonalForm& F, const PrimeModulus& p) {
  const int n = F.n();
  const int h = n / 2;
  if (h < 2 || F.r() != static_cast<std::size_t>(h)) return false;
  const auto prof = valuation_profile(canonical_form(F, p), p);
  std::vector<std::int64_t> got = prof.valuations;
  std::sort(got.begin(), got.end());
  std::vector<std::int64_t> want;
  for (int i = 0; i <= h - 2; ++i) want.push_back(i);
  want.push_back(h);
  return got == want;
}

/**
 * Valuation rule. With pairwise distinct residues v_p(a_i) mod n the terms of
 * F(x) never cancel, so v_p(F(x)) mod n stays in the residue set for every p
 * and a difference set missing a class is an obstruction. The Dense
 * directions need every unit to be an n-th power, i.e. gcd(n, p(p-1)) = 1.
 */
inline std::optional<Verdict> rule_r2(const DiagonalForm& F, const PrimeModulus& p) {
  const int n = F.n();
  const std::uint64_t pv = p.value();
  const std::uint64_t nn = static_cast<std::uint64_t>(n);
  const bool coprime = std::gcd(nn, pv) == 1 && std::gcd(nn, pv - 1) == 1;
  const auto prof = valuation_profile(F, p);
  if (!coprime && !prof.pairwise_distinct) return std::nullopt;
  const std::vector<int>& res = prof.residues;
  Params params{{"gcd(n, p(p-1))", std::to_string(std::gcd(nn, pv * (pv - 1)))}, {"residues", join(res)}};
  Verdict out;
  if (!prof.pairwise_distinct) {
    out.status = Status::Dense;
    out.trace.push_back({RuleId::R2, "Corollary 1.2(2)", params});
    return out;
  }
  const auto cover = difference_cover_check(res, n);
  if (cover.covers) {
    if (!coprime) return std::nullopt;
    out.status = Status::Dense;
    out.trace.push_back({RuleId::R2, 2 * F.r() > static_cast<std::size_t>(n) ? "Theorem 1.3" : "Theorem 1.3 proof",
                         params});
    return out;
  }
  out.status = Status::NotDense;
  out.certificate = ObstructionCertificate{n, pv, ValuationGap{cover.missing}};
  params.emplace_back("forbidden", join(cover.missing));
  out.trace.push_back({RuleId::R2, "Lemma 2.1; Corollary 1.4 proof", params});
  return out;
}

inline std::optional<RuleApplication> rule_r3(const DiagonalForm& F, const PrimeModulus& p) {
  if (F.n() != 3 || p.value() == 3) return std::nullopt;
  const auto prof = valuation_profile(F, p);
  int count[3] = {0, 0, 0};
  for (int r : prof.residues) ++count[r];
  if (F.r() == 3) {
    bool units = true;
    for (const auto& v : prof.valuations) units = units && v == 0;
    if (units) return RuleApplication{RuleId::R3, "Theorem 1.5", {{"p", std::to_string(p.value())}}};
  }
  for (int c = 0; c < 3; ++c) {
    if (count[c] >= 3) return RuleApplication{RuleId::R3, "Corollary 1.6", {{"class", std::to_string(c)}}};
  }
  if (F.r() >= 7) return RuleApplication{RuleId::R3, "Corollary 1.7", {{"r", std::to_string(F.r())}}};
  return std::nullopt;
}

inline std::optional<Verdict> rule_r4(const DiagonalForm& F, const PrimeModulus& p, std::uint64_t budget) {
  const auto C = canonical_form(F, p);
  const auto res = is_anisotropic_mod_p(C, p, budget);
  if (!res.anisotropic) return std::nullopt;
  std::vector<int> forbidden;
  for (int i = 1; i < F.n(); ++i) forbidden.push_back(i);
  Verdict out;
  out.status = Status::NotDense;
  out.certificate = ObstructionCertificate{F.n(), p.value(), ValuationGap{forbidden}};
  out.trace.push_back(
      {RuleId::R4, "Theorem 1.8", {{"canonical", C.to_string()}, {"forbidden", join(forbidden)}}});
  return out;
}

inline DiagonalForm subform(const DiagonalForm& F, const std::vector<std::size_t>& idx) {
  std::vector<BigInt> c;
  for (auto i : idx) c.push_back(F.coeff(i));
  return DiagonalForm(F.n(), std::move(c));
}

inline std::string index_list(const std::vector<std::size_t>& idx) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i] + 1);
  return s + "}";
}

inline std::optional<Verdict> rule_r5(const DiagonalForm& F, const PrimeModulus& p, std::uint64_t budget) {
  const std::size_t r = F.r();
  if (r < 3 || F.n() < 3) return std::nullopt;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      const std::vector<std::size_t> idx{i, j};
      const auto sub = decide_binary(subform(F, idx), p, budget);
      if (sub.status == Status::Dense) {
        Verdict out;
        out.status = Status::Dense;
        out.trace = sub.trace;
        out.trace.push_back({RuleId::R5, "Corollary 1.2(2) proof; subform closure", {{"subform", index_list(idx)}}});
        return out;
      }
    }
  }
  if (F.n() == 3 && p.value() != 3) {
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = i + 1; j < r; ++j) {
        for (std::size_t k = j + 1; k < r; ++k) {
          const std::vector<std::size_t> idx{i, j, k};
          if (auto app = rule_r3(subform(F, idx), p)) {
            Verdict out;
            out.status = Status::Dense;
            out.trace.push_back(*app);
            out.trace.push_back({RuleId::R5, "Corollary 1.7 proof; subform closure", {{"subform", index_list(idx)}}});
            return out;
          }
        }
      }
    }
  }
  return std::nullopt;
}

inline CoverageSummary evidence_for(const DiagonalForm& F, const PrimeModulus& p, const DecideOptions& opt) {
  int box = opt.evidence_box;
  if (box <= 0) {
    box = 1;
    for (;;) {
      const std::uint64_t side = 2 * static_cast<std::uint64_t>(box + 1) + 1;
      std::uint64_t total = 1;
      bool over = false;
      for (std::size_t i = 0; i < F.r() && !over; ++i) {
        total *= side;
        over = total > opt.evidence_points;
      }
      if (over || box >= 50) break;
      ++box;
    }
  }
  return summarize(quotient_coverage(F, p, {box, opt.evidence_precision, F.n(), opt.budget, 1}));
}

}  // namespace detail

/// Applies rules R1-R6 in order and returns at the first conclusive one.
inline Verdict decide(const DiagonalForm& F, const PrimeModulus& p, const DecideOptions& opt = {}) {
  std::optional<Verdict> v;
  if (F.n() >= 3) {
    if (F.r() == 2) v = decide_binary(F, p, opt.budget);
    if (!v) v = detail::rule_r2(F, p);
    if (!v) {
      if (auto app = detail::rule_r3(F, p)) {
        v = Verdict{};
        v->status = Status::Dense;
        v->trace.push_back(*app);
      }
    }
  }
  if (!v) v = detail::rule_r4(F, p, opt.budget);
  if (!v && F.n() >= 3) v = detail::rule_r5(F, p, opt.budget);
  if (!v) {
    v = Verdict{};
    v->status = Status::Inconclusive;
    Params params{{"n", std::to_string(F.n())}, {"r", std::to_string(F.r())}};
    if (F.n() == 2) {
      v->notes.push_back("quadratic forms are decided only by the anisotropy rule; see the quadratic classification");
    }
    if (opt.attach_evidence) {
      try {
        v->evidence = detail::evidence_for(F, p, opt);
        params.emplace_back("coverage", std::to_string(v->evidence->overall));
      } catch (const error& e) {
        v->notes.push_back(std::string("no oracle evidence: ") + e.what());
      }
    }
    v->trace.push_back({RuleId::R6, "no rule applies", params});
  }
  if (v->status == Status::NotDense && detail::is_remark_form(F, p)) {
    v->notes.push_back("Remark after Corollary 1.4 claims this form is dense; the difference-cover rule says otherwise");
  }
  return *v;
}

}  // namespace qdense
