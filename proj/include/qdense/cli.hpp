#pragma once

/**
 * Command-line driver: decide, oracle, survey, lift, residues, aniso.
 *
 * Exit codes: 0 Dense / consistent / success, 1 NotDense (or NoRoot for
 * lift), 2 Inconclusive, 3 certificate contradiction, 64 usage or invalid
 * input, 65 budget exceeded.
 */

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qdense/denseness.hpp"
#include "qdense/errors.hpp"
#include "qdense/forms.hpp"
#include "qdense/io.hpp"
#include "qdense/oracle.hpp"
#include "qdense/padic.hpp"
#include "qdense/residues.hpp"

namespace qdense::cli {

inline constexpr int exit_dense = 0;
inline constexpr int exit_not_dense = 1;
inline constexpr int exit_inconclusive = 2;
inline constexpr int exit_contradiction = 3;
inline constexpr int exit_usage = 64;
inline constexpr int exit_budget = 65;

inline int exit_code(Status s) {
  switch (s) {
    case Status::Dense: return exit_dense;
    case Status::NotDense: return exit_not_dense;
    case Status::Inconclusive: return exit_inconclusive;
  }
  return exit_usage;
}

inline std::vector<BigInt> parse_coeffs(const std::string& text) {
  std::vector<BigInt> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw error(errc::invalid_argument, "empty coefficient in '" + text + "'");
    item = item.substr(b, e - b + 1);
    const std::size_t digits = (item[0] == '-' || item[0] == '+') ? 1 : 0;
    if (item.size() == digits || item.find_first_not_of("0123456789", digits) != std::string::npos) {
      throw error(errc::invalid_argument, "not an integer: '" + item + "'");
    }
    out.emplace_back(item[0] == '+' ? item.substr(1) : item);
  }
  for (const auto& a : out) {
    if (a == 0) throw error(errc::invalid_argument, "zero coefficient in '" + text + "' (coefficients must be nonzero)");
  }
  return out;
}

inline Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  auto integer = [&](const std::string& s) {
    const std::size_t digits = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.size() == digits || s.find_first_not_of("0123456789", digits) != std::string::npos) {
      throw error(errc::invalid_argument, "not a rational: '" + text + "'");
    }
    return BigInt(s[0] == '+' ? s.substr(1) : s);
  };
  if (slash == std::string::npos) return Rational(integer(text));
  const BigInt den = integer(text.substr(slash + 1));
  if (den == 0) throw error(errc::division_by_zero, "zero denominator in '" + text + "'");
  return make_rational(integer(text.substr(0, slash)), den);
}

/// Budget from QDENSE_BUDGET when set, else the library default.
inline std::uint64_t default_budget_from_env() {
  if (const char* env = std::getenv("QDENSE_BUDGET")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw error(errc::invalid_argument, std::string("QDENSE_BUDGET is not a number: ") + env);
    }
  }
  return default_budget;
}

struct QuerySpec {
  int n = 0;
  std::vector<BigInt> coeffs;
  std::uint64_t p = 0;

  DiagonalForm form() const { return DiagonalForm(n, coeffs); }
  PrimeModulus prime() const { return PrimeModulus(p); }
};

inline std::string join_coeffs(const std::vector<BigInt>& c, char sep) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? std::string(1, sep) : "") + c[i].str();
  return s;
}

inline std::string describe(const ObstructionCertificate& c) {
  if (const auto* vg = std::get_if<ValuationGap>(&c.gap)) {
    std::string s = "ValuationGap forbidden=";
    s += detail::join(vg->forbidden);
    return s;
  }
  const auto& rg = std::get<ResidueGap>(c.gap);
  return "ResidueGap level=" + std::to_string(rg.level) + " m=" + rg.m.str() + " e=" + std::to_string(rg.exponent);
}

inline void print_verdict(std::ostream& out, const QuerySpec& q, const Verdict& v) {
  out << "F = " << q.form().to_string() << ", p = " << q.p << "\n";
  out << "status: " << to_string(v.status) << "\n";
  for (const auto& r : v.trace) {
    out << "  " << to_string(r.id) << " [" << r.citation << "]";
    for (const auto& [k, val] : r.params) out << " " << k << "=" << val;
    out << "\n";
  }
  if (v.certificate) out << "certificate: " << describe(*v.certificate) << "\n";
  for (const auto& note : v.notes) out << "note: " << note << "\n";
  if (v.evidence) {
    out << "evidence: box=" << v.evidence->box << " K=" << v.evidence->precision << " V=" << v.evidence->window
        << " overall=" << v.evidence->overall << "\n";
  }
}

inline void print_report(std::ostream& out, const CoverageReport& r) {
  out << "F = " << r.form().to_string() << ", p = " << r.prime().value() << ", box = " << r.box()
      << ", K = " << r.precision() << ", V = " << r.window() << "\n";
  out << "value classes: " << r.value_classes << ", overall coverage: " << r.overall << "\n";
  for (const auto& l : r.levels) {
    out << "  v=" << l.valuation << " coverage " << l.hits << "/" << l.classes << " = " << l.fraction << "\n";
  }
  out << "observed valuation residues mod " << r.form().n() << ": " << detail::join(r.observed_residues) << "\n";
}

/// The oracle report a certificate must be checked against: precision raised to the certificate exponent.
inline CoverageReport report_for_certificate(const DiagonalForm& F, const PrimeModulus& p, OracleParams params,
                                             const ObstructionCertificate& cert) {
  if (const auto* rg = std::get_if<ResidueGap>(&cert.gap)) params.precision = std::max(params.precision, rg->exponent);
  return quotient_coverage(F, p, params);
}

struct SurveyRow {
  QuerySpec query;
  std::optional<Verdict> verdict;
  std::string error;
};

/// Expands one survey input line into queries (a single query or a generator block).
inline std::vector<QuerySpec> expand_survey_line(const json& j) {
  std::vector<QuerySpec> out;
  if (!j.contains("generate")) {
    QuerySpec q;
    q.n = j.at("n").get<int>();
    q.p = j.at("p").get<std::uint64_t>();
    for (const auto& c : j.at("coeffs")) q.coeffs.emplace_back(c.is_string() ? c.get<std::string>() : c.dump());
    out.push_back(std::move(q));
    return out;
  }
  const auto& g = j.at("generate");
  const auto ns = g.at("n").get<std::vector<int>>();
  const auto ps = g.at("p").get<std::vector<std::uint64_t>>();
  const long lo = g.value("min", 1L);
  const long hi = g.value("max", 10L);
  const int r = g.value("r", 2);
  if (lo > hi || r < 1 || r > 8) throw error(errc::invalid_argument, "bad generator range");
  std::vector<long> range;
  for (long a = lo; a <= hi; ++a) {
    if (a != 0) range.push_back(a);
  }
  if (range.empty()) return out;
  for (int n : ns) {
    for (std::uint64_t p : ps) {
      std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
      for (;;) {
        QuerySpec q{n, {}, p};
        for (auto i : idx) q.coeffs.emplace_back(range[i]);
        out.push_back(std::move(q));
        int k = r - 1;
        while (k >= 0 && idx[static_cast<std::size_t>(k)] + 1 == range.size()) idx[static_cast<std::size_t>(k--)] = 0;
        if (k < 0) break;
        ++idx[static_cast<std::size_t>(k)];
      }
    }
  }
  return out;
}

inline SurveyRow survey_row(const QuerySpec& q, const DecideOptions& opt) {
  SurveyRow row{q, std::nullopt, {}};
  try {
    row.verdict = decide(q.form(), q.prime(), opt);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline void write_survey_csv(std::ostream& out, const std::vector<SurveyRow>& rows) {
  out << "n,p,coeffs,status,rule,certificate,error\n";
  for (const auto& row : rows) {
    out << row.query.n << ',' << row.query.p << ',' << join_coeffs(row.query.coeffs, ';') << ',';
    if (row.verdict) {
      out << to_string(row.verdict->status) << ',' << to_string(row.verdict->rule()) << ','
          << (row.verdict->certificate ? row.verdict->certificate->kind() : "");
    } else {
      out << ",,";
    }
    out << ',' << csv_escape(row.error) << '\n';
  }
}

inline json survey_json(const std::vector<SurveyRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    json coeffs = json::array();
    for (const auto& c : row.query.coeffs) coeffs.push_back(c.str());
    json j{{"n", row.query.n}, {"p", row.query.p}, {"coeffs", coeffs}};
    if (row.verdict) {
      j["status"] = to_string(row.verdict->status);
      j["rule"] = to_string(row.verdict->rule());
      j["certificate"] = row.verdict->certificate ? json(row.verdict->certificate->kind()) : json(nullptr);
    }
    if (!row.error.empty()) j["error"] = row.error;
    arr.push_back(std::move(j));
  }
  return arr;
}

/// Runs the CLI on `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Density of quotient sets of diagonal forms in Q_p", "qdense"};
  app.require_subcommand(1);

  QuerySpec q;
  std::string coeff_text;
  std::uint64_t budget = 0;
  bool as_json = false;
  bool as_csv = false;
  OracleParams oparams;
  bool check = false;
  std::string c_text;
  int prec = 10;
  int M = 1;
  std::string input = "-";
  std::vector<int> gen_n;
  std::vector<std::uint64_t> gen_p;
  long gen_min = 1;
  long gen_max = 10;
  int gen_r = 2;

  auto add_form = [&](CLI::App* sub) {
    sub->add_option("--n", q.n, "degree")->required();
    sub->add_option("--coeffs", coeff_text, "comma-separated nonzero integers")->required()->allow_extra_args(false);
    sub->add_option("--p", q.p, "prime")->required();
  };
  auto add_budget = [&](CLI::App* sub) { sub->add_option("--budget", budget, "evaluation budget (default 10^7 or QDENSE_BUDGET)"); };

  auto* decide_cmd = app.add_subcommand("decide", "decide density of R(F) in Q_p");
  add_form(decide_cmd);
  add_budget(decide_cmd);
  decide_cmd->add_flag("--json", as_json, "JSON output");

  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force quotient class coverage");
  add_form(oracle_cmd);
  add_budget(oracle_cmd);
  oracle_cmd->add_option("--box", oparams.box, "box bound B")->check(CLI::NonNegativeNumber);
  oracle_cmd->add_option("--K", oparams.precision, "unit precision")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--V", oparams.window, "valuation window (default n)")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--workers", oparams.workers, "enumeration threads")->check(CLI::PositiveNumber);
  oracle_cmd->add_flag("--check", check, "decide first and check the certificate");
  oracle_cmd->add_flag("--json", as_json, "JSON output");
  oracle_cmd->add_flag("--csv", as_csv, "CSV hit matrix");

  auto* survey_cmd = app.add_subcommand("survey", "batch decisions from JSON lines or generator flags");
  survey_cmd->add_option("--input", input, "JSON-lines file, '-' for stdin");
  survey_cmd->add_option("--gen-n", gen_n, "generator degrees")->delimiter(',');
  survey_cmd->add_option("--gen-p", gen_p, "generator primes")->delimiter(',');
  survey_cmd->add_option("--gen-min", gen_min, "least coefficient");
  survey_cmd->add_option("--gen-max", gen_max, "largest coefficient");
  survey_cmd->add_option("--gen-r", gen_r, "number of variables");
  survey_cmd->add_flag("--json", as_json, "JSON output");
  survey_cmd->add_flag("--csv", as_csv, "CSV output (default)");
  add_budget(survey_cmd);

  auto* lift_cmd = app.add_subcommand("lift", "n-th root of c modulo p^prec");
  lift_cmd->add_option("--c", c_text, "rational a or a/b")->required();
  lift_cmd->add_option("--n", q.n, "degree")->required()->check(CLI::PositiveNumber);
  lift_cmd->add_option("--p", q.p, "prime")->required();
  lift_cmd->add_option("--prec", prec, "precision K")->check(CLI::PositiveNumber);
  lift_cmd->add_flag("--json", as_json, "JSON output");
  add_budget(lift_cmd);

  auto* residues_cmd = app.add_subcommand("residues", "n-th power residues modulo p^M");
  residues_cmd->add_option("--n", q.n, "degree")->required()->check(CLI::PositiveNumber);
  residues_cmd->add_option("--p", q.p, "prime")->required();
  residues_cmd->add_option("--M", M, "exponent (default from n and p)");
  residues_cmd->add_flag("--json", as_json, "JSON output");
  add_budget(residues_cmd);

  auto* aniso_cmd = app.add_subcommand("aniso", "anisotropy of F modulo p");
  add_form(aniso_cmd);
  aniso_cmd->add_flag("--json", as_json, "JSON output");
  add_budget(aniso_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (budget == 0) budget = default_budget_from_env();
    oparams.budget = budget;
    DecideOptions dopt;
    dopt.budget = budget;

    if (decide_cmd->parsed()) {
      q.coeffs = parse_coeffs(coeff_text);
      const auto v = decide(q.form(), q.prime(), dopt);
      if (as_json) out << to_json(v).dump(2) << "\n";
      else print_verdict(out, q, v);
      return exit_code(v.status);
    }

    if (oracle_cmd->parsed()) {
      q.coeffs = parse_coeffs(coeff_text);
      const auto F = q.form();
      const auto p = q.prime();
      if (!check) {
        const auto report = quotient_coverage(F, p, oparams);
        if (as_csv) write_csv(out, report);
        else if (as_json) out << to_json(report).dump(2) << "\n";
        else print_report(out, report);
        return 0;
      }
      const auto v = decide(F, p, dopt);
      const auto report = v.certificate ? report_for_certificate(F, p, oparams, *v.certificate)
                                        : quotient_coverage(F, p, oparams);
      std::optional<CertificateCheck> result;
      if (v.certificate) result = check_certificate(*v.certificate, report);
      const bool contradiction = result && std::holds_alternative<Contradiction>(*result);
      if (as_csv) {
        write_csv(out, report);
      } else if (as_json) {
        json j{{"verdict", to_json(v)}, {"report", to_json(report)}};
        if (!result) {
          j["check"] = "NoCertificate";
        } else if (const auto* c = std::get_if<Contradiction>(&*result)) {
          j["check"] = {{"result", "Contradiction"},
                        {"v", c->valuation},
                        {"u", c->unit},
                        {"x", join_coeffs(c->x, ',')},
                        {"y", join_coeffs(c->y, ',')}};
        } else {
          j["check"] = "Consistent";
        }
        out << j.dump(2) << "\n";
      } else {
        print_report(out, report);
        out << "verdict: " << to_string(v.status);
        if (v.certificate) out << " (" << describe(*v.certificate) << ")";
        out << "\n";
        if (!result) {
          out << "check: no certificate to check\n";
        } else if (const auto* c = std::get_if<Contradiction>(&*result)) {
          out << "check: Contradiction at v=" << c->valuation << " u=" << c->unit << " x=(" << join_coeffs(c->x, ',')
              << ") y=(" << join_coeffs(c->y, ',') << ")\n";
        } else {
          out << "check: Consistent\n";
        }
      }
      return contradiction ? exit_contradiction : 0;
    }

    if (survey_cmd->parsed()) {
      std::vector<SurveyRow> rows;
      auto run_queries = [&](const std::vector<QuerySpec>& qs) {
        for (const auto& one : qs) rows.push_back(survey_row(one, dopt));
      };
      if (!gen_n.empty() || !gen_p.empty()) {
        if (gen_n.empty() || gen_p.empty()) throw error(errc::invalid_argument, "--gen-n and --gen-p go together");
        json g{{"generate", {{"n", gen_n}, {"p", gen_p}, {"min", gen_min}, {"max", gen_max}, {"r", gen_r}}}};
        run_queries(expand_survey_line(g));
      } else {
        std::ifstream file;
        std::istream* src = &in;
        if (input != "-") {
          file.open(input);
          if (!file) throw error(errc::invalid_argument, "cannot read '" + input + "'");
          src = &file;
        }
        std::string line;
        while (std::getline(*src, line)) {
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          try {
            run_queries(expand_survey_line(json::parse(line)));
          } catch (const std::exception& e) {
            SurveyRow row{{}, std::nullopt, std::string("bad input line: ") + e.what()};
            rows.push_back(std::move(row));
          }
        }
      }
      if (as_json) out << survey_json(rows).dump(2) << "\n";
      else write_survey_csv(out, rows);
      return 0;
    }

    if (lift_cmd->parsed()) {
      const PrimeModulus p(q.p);
      const Rational c = parse_rational(c_text);
      std::optional<BigInt> root;
      if (c != 0 && valuation(c, p).value() >= 0) root = lift_nth_root(c, q.n, p, prec, budget);
      if (as_json) {
        out << json{{"c", c_text}, {"n", q.n}, {"p", q.p}, {"prec", prec},
                    {"root", root ? json(root->str()) : json(nullptr)}}
                   .dump(2)
            << "\n";
      } else if (root) {
        out << *root << "\n";
      } else {
        out << "NoRoot: " << c_text << " is not an n-th power in Z_" << q.p << "\n";
      }
      return root ? 0 : exit_not_dense;
    }

    if (residues_cmd->parsed()) {
      const PrimeModulus p(q.p);
      if (residues_cmd->count("--M") == 0) M = lemma1_exponent(q.n, p).M;
      const auto set = nth_power_residues(q.n, p, M, budget);
      if (as_json) {
        out << json{{"n", q.n}, {"p", q.p}, {"M", M}, {"modulus", set.modulus}, {"members", set.members}}.dump(2)
            << "\n";
      } else {
        out << "n-th power residues, n = " << q.n << ", modulus " << q.p << "^" << M << " = " << set.modulus << " ("
            << set.members.size() << "):";
        for (auto m : set.members) out << " " << m;
        out << "\n";
      }
      return 0;
    }

    if (aniso_cmd->parsed()) {
      q.coeffs = parse_coeffs(coeff_text);
      const auto res = is_anisotropic_mod_p(q.form(), q.prime(), budget);
      if (as_json) {
        json w = res.anisotropic ? json(nullptr) : json(res.witness);
        out << json{{"anisotropic", res.anisotropic}, {"witness", w}}.dump(2) << "\n";
      } else if (res.anisotropic) {
        out << "anisotropic mod " << q.p << "\n";
      } else {
        out << "isotropic mod " << q.p << ", zero (";
        for (std::size_t i = 0; i < res.witness.size(); ++i) out << (i ? "," : "") << res.witness[i];
        out << ")\n";
      }
      return 0;
    }
  } catch (const error& e) {
    err << e.what() << "\n";
    return e.code() == errc::budget_exceeded ? exit_budget : exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace qdense::cli
