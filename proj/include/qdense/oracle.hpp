#pragma once

/**
 * Brute-force evidence for (non-)density.
 *
 * Values F(x) over the box [-B, B]^r are grouped into classes
 * (v_p(F(x)), unit part mod p^K); quotient classes are then formed from pairs
 * of value classes rather than from all pairs of points. Every class keeps
 * the least witness under the box order: points are ranked colexicographically
 * (last coordinate most significant) with integers ordered 0, 1, -1, 2, -2, ...
 */

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "qdense/certificate.hpp"
#include "qdense/errors.hpp"
#include "qdense/forms.hpp"
#include "qdense/padic.hpp"
#include "qdense/residues.hpp"

namespace qdense {

struct OracleParams {
  int box = 50;
  int precision = 2;
  int window = 0;  // 0 means "use n"
  std::uint64_t budget = default_budget;
  unsigned workers = 1;
};

struct BoxGeometry {
  int box;
  std::size_t r;

  std::uint64_t side() const { return 2 * static_cast<std::uint64_t>(box) + 1; }

  std::uint64_t size(std::uint64_t budget) const {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < r; ++i) {
      if (total > budget / side()) throw error(errc::budget_exceeded, "box exceeds the evaluation budget");
      total *= side();
    }
    return total;
  }

  static std::int64_t coordinate(std::uint64_t digit) {
    if (digit == 0) return 0;
    const auto half = static_cast<std::int64_t>((digit + 1) / 2);
    return (digit % 2 == 1) ? half : -half;
  }

  FormPoint point(std::uint64_t rank) const {
    FormPoint x(r);
    for (std::size_t i = 0; i < r; ++i) {
      x[i] = coordinate(rank % side());
      rank /= side();
    }
    return x;
  }
};

/// Value classes (valuation, unit residue mod p^K) observed over a box.
struct ValueClasses {
  DiagonalForm form;
  PrimeModulus p;
  int box;
  int precision;
  std::uint64_t modulus;
  std::map<std::pair<std::int64_t, std::uint64_t>, std::uint64_t> witness;

  FormPoint point(std::uint64_t rank) const { return BoxGeometry{box, form.r()}.point(rank); }

  std::set<std::int64_t> valuations() const {
    std::set<std::int64_t> out;
    for (const auto& [cls, rank] : witness) out.insert(cls.first);
    return out;
  }
};

namespace detail {

using ClassMap = std::map<std::pair<std::int64_t, std::uint64_t>, std::uint64_t>;

inline void merge_min(ClassMap& into, const ClassMap& from) {
  for (const auto& [cls, rank] : from) {
    auto [it, inserted] = into.emplace(cls, rank);
    if (!inserted && rank < it->second) it->second = rank;
  }
}

/// Evaluates F over ranks [lo, hi) of the box, recording least witnesses.
class BoxScanner {
 public:
  BoxScanner(const DiagonalForm& F, const PrimeModulus& p, int box, std::uint64_t modulus)
      : F_(F), p_(p), geo_{box, F.r()}, modulus_(modulus) {
    const auto side = geo_.side();
    BigInt bound = 0;
    const BigInt top = boost::multiprecision::pow(BigInt(box), static_cast<unsigned>(F.n()));
    for (const auto& a : F.coeffs()) bound += abs(a) * top;
    wide_ = bound < (BigInt(1) << 125);
    big_terms_.assign(F.r(), std::vector<BigInt>(side));
    if (wide_) narrow_terms_.assign(F.r(), std::vector<__int128>(side));
    for (std::size_t i = 0; i < F.r(); ++i) {
      for (std::uint64_t d = 0; d < side; ++d) {
        const BigInt t = F.coeff(i) * boost::multiprecision::pow(BigInt(BoxGeometry::coordinate(d)),
                                                                 static_cast<unsigned>(F.n()));
        big_terms_[i][d] = t;
        if (wide_) narrow_terms_[i][d] = to_int128(t);
      }
    }
  }

  ClassMap scan(std::uint64_t lo, std::uint64_t hi) const {
    ClassMap out;
    if (lo >= hi) return out;
    const std::size_t r = F_.r();
    const auto side = geo_.side();
    std::vector<std::uint64_t> digit(r);
    std::uint64_t rest = lo;
    for (std::size_t i = 0; i < r; ++i) {
      digit[i] = rest % side;
      rest /= side;
    }
    for (std::uint64_t rank = lo; rank < hi; ++rank) {
      if (auto cls = classify(digit)) out.emplace(*cls, rank);
      for (std::size_t i = 0; i < r; ++i) {
        if (++digit[i] < side) break;
        digit[i] = 0;
      }
    }
    return out;
  }

 private:
  static __int128 to_int128(const BigInt& v) {
    const BigInt mag = abs(v);
    const auto hi = static_cast<unsigned __int128>(static_cast<std::uint64_t>(mag >> 64));
    const auto lo = static_cast<unsigned __int128>((mag & BigInt(std::numeric_limits<std::uint64_t>::max()))
                                                       .convert_to<std::uint64_t>());
    const auto m = static_cast<__int128>((hi << 64) | lo);
    return v < 0 ? -m : m;
  }

  std::optional<std::pair<std::int64_t, std::uint64_t>> classify(const std::vector<std::uint64_t>& digit) const {
    if (wide_) {
      __int128 value = 0;
      for (std::size_t i = 0; i < digit.size(); ++i) value += narrow_terms_[i][digit[i]];
      if (value == 0) return std::nullopt;
      const auto p = static_cast<__int128>(p_.value());
      std::int64_t v = 0;
      while (value % p == 0) {
        value /= p;
        ++v;
      }
      auto u = static_cast<__int128>(value % static_cast<__int128>(modulus_));
      if (u < 0) u += static_cast<__int128>(modulus_);
      return std::make_pair(v, static_cast<std::uint64_t>(u));
    }
    BigInt value = 0;
    for (std::size_t i = 0; i < digit.size(); ++i) value += big_terms_[i][digit[i]];
    if (value == 0) return std::nullopt;
    auto [v, unit] = split_prime_power(value, p_);
    return std::make_pair(v, reduce(unit, BigInt(modulus_)).convert_to<std::uint64_t>());
  }

  const DiagonalForm& F_;
  PrimeModulus p_;
  BoxGeometry geo_;
  std::uint64_t modulus_;
  bool wide_ = false;
  std::vector<std::vector<BigInt>> big_terms_;
  std::vector<std::vector<__int128>> narrow_terms_;
};

}  // namespace detail

inline ValueClasses enumerate_values(const DiagonalForm& F, const PrimeModulus& p, int box, int precision,
                                     std::uint64_t budget = default_budget, unsigned workers = 1) {
  if (box < 0 || precision < 1) throw error(errc::invalid_argument, "box >= 0 and K >= 1 required");
  const std::uint64_t total = BoxGeometry{box, F.r()}.size(budget);
  const auto modulus = prime_power_u64(p.value(), precision);
  if (!modulus || *modulus > budget) throw error(errc::budget_exceeded, "p^K exceeds the budget");

  const detail::BoxScanner scanner(F, p, box, *modulus);
  ValueClasses out{F, p, box, precision, *modulus, {}};
  workers = std::max(1U, std::min<unsigned>(workers, 64));
  if (workers == 1 || total < 4096) {
    out.witness = scanner.scan(0, total);
    return out;
  }
  std::vector<detail::ClassMap> parts(workers);
  {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = std::min(total, w * chunk);
      const std::uint64_t hi = std::min(total, lo + chunk);
      pool.emplace_back([&, w, lo, hi] { parts[w] = scanner.scan(lo, hi); });
    }
  }
  for (const auto& part : parts) detail::merge_min(out.witness, part);
  return out;
}

/// Observed quotient classes (v, u mod p^K), v in [-V, V], each with its least witness pair.
class QuotientClassMap {
 public:
  using WitnessRanks = std::pair<std::uint64_t, std::uint64_t>;

  QuotientClassMap(DiagonalForm form, PrimeModulus p, int box, int precision, int window, std::uint64_t modulus)
      : form_(std::move(form)), p_(p), box_(box), K_(precision), V_(window), modulus_(modulus),
        cells_((2 * static_cast<std::size_t>(window) + 1) * modulus, empty()) {}

  const DiagonalForm& form() const noexcept { return form_; }
  const PrimeModulus& prime() const noexcept { return p_; }
  int box() const noexcept { return box_; }
  int precision() const noexcept { return K_; }
  int window() const noexcept { return V_; }
  std::uint64_t modulus() const noexcept { return modulus_; }

  bool hit(std::int64_t v, std::uint64_t u) const { return cells_[index(v, u)] != empty(); }

  std::optional<WitnessRanks> witness_ranks(std::int64_t v, std::uint64_t u) const {
    const auto& w = cells_[index(v, u)];
    if (w == empty()) return std::nullopt;
    return w;
  }

  std::optional<std::pair<FormPoint, FormPoint>> witness(std::int64_t v, std::uint64_t u) const {
    auto w = witness_ranks(v, u);
    if (!w) return std::nullopt;
    const BoxGeometry geo{box_, form_.r()};
    return std::make_pair(geo.point(w->first), geo.point(w->second));
  }

  void record(std::int64_t v, std::uint64_t u, WitnessRanks w) {
    auto& cell = cells_[index(v, u)];
    if (w < cell) cell = w;
  }

 private:
  static WitnessRanks empty() {
    return {std::numeric_limits<std::uint64_t>::max(), std::numeric_limits<std::uint64_t>::max()};
  }

  std::size_t index(std::int64_t v, std::uint64_t u) const {
    if (v < -V_ || v > V_ || u >= modulus_) throw error(errc::invalid_argument, "class outside the window");
    return static_cast<std::size_t>(v + V_) * modulus_ + u;
  }

  DiagonalForm form_;
  PrimeModulus p_;
  int box_;
  int K_;
  int V_;
  std::uint64_t modulus_;
  std::vector<WitnessRanks> cells_;
};

/// Class of (p^v1 u1) / (p^v2 u2) at unit precision `modulus`.
inline std::pair<std::int64_t, std::uint64_t> quotient_class(std::int64_t v1, std::uint64_t u1, std::int64_t v2,
                                                             std::uint64_t u2, std::uint64_t modulus) {
  return {v1 - v2, detail::mul_mod(u1, inverse_mod_u64(u2, modulus), modulus)};
}

struct LevelCoverage {
  std::int64_t valuation;
  std::uint64_t hits;
  std::uint64_t classes;
  double fraction;
  std::vector<std::uint64_t> missed;
};

struct CoverageReport {
  std::vector<LevelCoverage> levels;
  std::vector<int> observed_residues;  // quotient valuations mod n seen in the window
  double overall = 0.0;
  std::size_t value_classes = 0;
  QuotientClassMap classes;

  const DiagonalForm& form() const { return classes.form(); }
  const PrimeModulus& prime() const { return classes.prime(); }
  int box() const { return classes.box(); }
  int precision() const { return classes.precision(); }
  int window() const { return classes.window(); }

  const LevelCoverage& level(std::int64_t v) const {
    for (const auto& l : levels) {
      if (l.valuation == v) return l;
    }
    throw error(errc::invalid_argument, "valuation outside the window");
  }
};

inline CoverageReport quotient_coverage(const DiagonalForm& F, const PrimeModulus& p, const OracleParams& params) {
  const int V = params.window > 0 ? params.window : F.n();
  const auto values = enumerate_values(F, p, params.box, params.precision, params.budget, params.workers);
  const std::uint64_t P = values.modulus;
  if ((2 * static_cast<std::uint64_t>(V) + 1) > params.budget / P) {
    throw error(errc::budget_exceeded, "class table exceeds the budget");
  }
  QuotientClassMap map(F, p, params.box, params.precision, V, P);

  struct Entry {
    std::uint64_t u;
    std::uint64_t inv;
    std::uint64_t rank;
  };
  std::map<std::int64_t, std::vector<Entry>> by_level;
  for (const auto& [cls, rank] : values.witness) {
    by_level[cls.first].push_back({cls.second, inverse_mod_u64(cls.second, P), rank});
  }
  for (const auto& [v1, top] : by_level) {
    for (const auto& [v2, bottom] : by_level) {
      const std::int64_t v = v1 - v2;
      if (v < -V || v > V) continue;
      for (const auto& a : top) {
        for (const auto& b : bottom) map.record(v, detail::mul_mod(a.u, b.inv, P), {a.rank, b.rank});
      }
    }
  }

  CoverageReport report{{}, {}, 0.0, values.witness.size(), std::move(map)};
  const std::uint64_t phi = P / p.value() * (p.value() - 1);
  std::set<int> residues;
  std::uint64_t total_hits = 0;
  for (std::int64_t v = -V; v <= V; ++v) {
    LevelCoverage lc{v, 0, phi, 0.0, {}};
    for (std::uint64_t u = 1; u < P; ++u) {
      if (u % p.value() == 0) continue;
      if (report.classes.hit(v, u)) ++lc.hits;
      else lc.missed.push_back(u);
    }
    lc.fraction = static_cast<double>(lc.hits) / static_cast<double>(phi);
    if (lc.hits > 0) residues.insert(mod_class(v, F.n()));
    total_hits += lc.hits;
    report.levels.push_back(std::move(lc));
  }
  report.observed_residues.assign(residues.begin(), residues.end());
  report.overall = static_cast<double>(total_hits) / static_cast<double>(phi * (2 * V + 1));
  return report;
}

inline std::vector<CoverageReport> coverage_trend(const DiagonalForm& F, const PrimeModulus& p, int precision,
                                                  int window, const std::vector<int>& boxes,
                                                  std::uint64_t budget = default_budget, unsigned workers = 1) {
  std::vector<CoverageReport> out;
  for (int b : boxes) out.push_back(quotient_coverage(F, p, {b, precision, window, budget, workers}));
  return out;
}

struct Consistent {
  friend bool operator==(const Consistent&, const Consistent&) = default;
};

/// A quotient class that the certificate claims is unreachable, with the points producing it.
struct Contradiction {
  std::int64_t valuation;
  std::uint64_t unit;
  FormPoint x;
  FormPoint y;
};

using CertificateCheck = std::variant<Consistent, Contradiction>;

/**
 * Replays a NotDense certificate against observed quotient classes. Among
 * all violating classes the one with the least witness pair is reported.
 */
inline CertificateCheck check_certificate(const ObstructionCertificate& cert, const CoverageReport& report) {
  const auto& map = report.classes;
  const int n = report.form().n();
  if (cert.n != n || cert.p != report.prime().value()) {
    throw error(errc::parameter_mismatch, "certificate and report describe different (n, p)");
  }
  const std::uint64_t P = map.modulus();
  const std::uint64_t pv = report.prime().value();
  const int V = map.window();

  std::function<bool(std::int64_t, std::uint64_t)> violates;
  std::vector<BigInt> keys;
  if (const auto* vg = std::get_if<ValuationGap>(&cert.gap)) {
    const std::set<int> forbidden(vg->forbidden.begin(), vg->forbidden.end());
    violates = [forbidden, n](std::int64_t v, std::uint64_t) { return forbidden.count(mod_class(v, n)) > 0; };
  } else {
    const auto& rg = std::get<ResidueGap>(cert.gap);
    if (rg.exponent > map.precision()) {
      throw error(errc::parameter_mismatch, "report precision K = " + std::to_string(map.precision()) +
                                                " is below the certificate exponent " + std::to_string(rg.exponent));
    }
    const PowerClassGroup group(n, report.prime(), rg.exponent);
    const BigInt target = group.key(rg.m);
    keys.resize(P);
    std::vector<char> bad(P, 0);
    for (std::uint64_t u = 1; u < P; ++u) {
      if (u % pv != 0) bad[u] = group.key(BigInt(u)) == target;
    }
    violates = [bad = std::move(bad), level = rg.level, n](std::int64_t v, std::uint64_t u) {
      return mod_class(v, n) == mod_class(level, n) && bad[u];
    };
  }

  std::optional<std::pair<std::pair<std::int64_t, std::uint64_t>, QuotientClassMap::WitnessRanks>> worst;
  for (std::int64_t v = -V; v <= V; ++v) {
    for (std::uint64_t u = 1; u < P; ++u) {
      if (u % pv == 0) continue;
      const auto w = map.witness_ranks(v, u);
      if (!w || !violates(v, u)) continue;
      if (!worst || *w < worst->second) worst = {{v, u}, *w};
    }
  }
  if (!worst) return Consistent{};
  const auto pts = *map.witness(worst->first.first, worst->first.second);
  return Contradiction{worst->first.first, worst->first.second, pts.first, pts.second};
}

/// Compact, serializable digest of a coverage report.
struct CoverageSummary {
  int box = 0;
  int precision = 0;
  int window = 0;
  double overall = 0.0;
  std::vector<std::pair<std::int64_t, double>> level_fractions;
  std::vector<int> observed_residues;

  friend bool operator==(const CoverageSummary&, const CoverageSummary&) = default;
};

inline CoverageSummary summarize(const CoverageReport& report) {
  CoverageSummary s{report.box(), report.precision(), report.window(), report.overall, {}, report.observed_residues};
  for (const auto& l : report.levels) s.level_fractions.emplace_back(l.valuation, l.fraction);
  return s;
}

}  // namespace qdense
