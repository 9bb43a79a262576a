#pragma once

/**
 * JSON and CSV shapes.
 *
 * Verdict: {status, rules: [{id, citation, params: [[name, value], ...]}],
 * certificate, notes, evidence}. Params keep their order and may repeat,
 * hence pairs rather than an object.
 */

#include <json.hpp>

#include <ostream>
#include <sstream>
#include <string>

#include "qdense/certificate.hpp"
#include "qdense/denseness.hpp"
#include "qdense/errors.hpp"
#include "qdense/oracle.hpp"

namespace qdense {

using json = nlohmann::ordered_json;

inline Status status_from_string(const std::string& s) {
  if (s == "Dense") return Status::Dense;
  if (s == "NotDense") return Status::NotDense;
  if (s == "Inconclusive") return Status::Inconclusive;
  throw error(errc::invalid_argument, "unknown status '" + s + "'");
}

inline RuleId rule_from_string(const std::string& s) {
  if (s.size() == 2 && s[0] == 'R' && s[1] >= '1' && s[1] <= '6') return static_cast<RuleId>(s[1] - '1');
  throw error(errc::invalid_argument, "unknown rule '" + s + "'");
}

inline json to_json(const ObstructionCertificate& c) {
  json j{{"kind", c.kind()}, {"n", c.n}, {"p", c.p}};
  if (const auto* vg = std::get_if<ValuationGap>(&c.gap)) {
    j["forbidden"] = vg->forbidden;
  } else {
    const auto& rg = std::get<ResidueGap>(c.gap);
    j["level"] = rg.level;
    j["m"] = rg.m.str();
    j["exponent"] = rg.exponent;
  }
  return j;
}

inline ObstructionCertificate certificate_from_json(const json& j) {
  ObstructionCertificate c{j.at("n").get<int>(), j.at("p").get<std::uint64_t>(), ValuationGap{}};
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "ValuationGap") {
    c.gap = ValuationGap{j.at("forbidden").get<std::vector<int>>()};
  } else if (kind == "ResidueGap") {
    const auto& m = j.at("m");
    c.gap = ResidueGap{j.at("level").get<int>(), BigInt(m.is_string() ? m.get<std::string>() : m.dump()),
                       j.at("exponent").get<int>()};
  } else {
    throw error(errc::invalid_argument, "unknown certificate kind '" + kind + "'");
  }
  return c;
}

inline json to_json(const CoverageSummary& s) {
  json levels = json::array();
  for (const auto& [v, f] : s.level_fractions) levels.push_back({v, f});
  return {{"box", s.box},           {"K", s.precision},
          {"V", s.window},          {"overall", s.overall},
          {"levels", levels},       {"observed_residues", s.observed_residues}};
}

inline CoverageSummary summary_from_json(const json& j) {
  CoverageSummary s;
  s.box = j.at("box").get<int>();
  s.precision = j.at("K").get<int>();
  s.window = j.at("V").get<int>();
  s.overall = j.at("overall").get<double>();
  for (const auto& l : j.at("levels")) s.level_fractions.emplace_back(l.at(0).get<std::int64_t>(), l.at(1).get<double>());
  s.observed_residues = j.at("observed_residues").get<std::vector<int>>();
  return s;
}

inline json to_json(const Verdict& v) {
  json rules = json::array();
  for (const auto& r : v.trace) {
    json params = json::array();
    for (const auto& [k, val] : r.params) params.push_back({k, val});
    rules.push_back({{"id", to_string(r.id)}, {"citation", r.citation}, {"params", params}});
  }
  json j{{"status", to_string(v.status)},
         {"rules", rules},
         {"certificate", v.certificate ? to_json(*v.certificate) : json(nullptr)}};
  if (!v.notes.empty()) j["notes"] = v.notes;
  if (v.evidence) j["evidence"] = to_json(*v.evidence);
  return j;
}

inline Verdict verdict_from_json(const json& j) {
  Verdict v;
  v.status = status_from_string(j.at("status").get<std::string>());
  for (const auto& r : j.at("rules")) {
    RuleApplication app{rule_from_string(r.at("id").get<std::string>()), r.at("citation").get<std::string>(), {}};
    for (const auto& kv : r.at("params")) app.params.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    v.trace.push_back(std::move(app));
  }
  if (j.contains("certificate") && !j.at("certificate").is_null()) {
    v.certificate = certificate_from_json(j.at("certificate"));
  }
  if (j.contains("notes")) v.notes = j.at("notes").get<std::vector<std::string>>();
  if (j.contains("evidence")) v.evidence = summary_from_json(j.at("evidence"));
  return v;
}

inline json to_json(const CoverageReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"v", l.valuation}, {"hits", l.hits}, {"classes", l.classes}, {"fraction", l.fraction},
                      {"missed", l.missed}});
  }
  return {{"form", r.form().to_string()},
          {"p", r.prime().value()},
          {"box", r.box()},
          {"K", r.precision()},
          {"V", r.window()},
          {"value_classes", r.value_classes},
          {"overall", r.overall},
          {"observed_residues", r.observed_residues},
          {"levels", levels}};
}

/// Rows are valuations -V..V, columns the units mod p^K, cells 1 when the class was hit.
inline void write_csv(std::ostream& os, const CoverageReport& r) {
  const std::uint64_t P = r.classes.modulus();
  const std::uint64_t p = r.prime().value();
  os << "v";
  for (std::uint64_t u = 1; u < P; ++u) {
    if (u % p != 0) os << ',' << u;
  }
  os << '\n';
  for (std::int64_t v = -r.window(); v <= r.window(); ++v) {
    os << v;
    for (std::uint64_t u = 1; u < P; ++u) {
      if (u % p != 0) os << ',' << (r.classes.hit(v, u) ? 1 : 0);
    }
    os << '\n';
  }
}

inline std::string to_csv(const CoverageReport& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

}  // namespace qdense
