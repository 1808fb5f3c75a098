#include "ealab/ledger.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace ealab {

void ParameterSet::validate() const {
  if (a < 2) throw std::invalid_argument("ledger: a must be >= 2");
  if (b < 2) throw std::invalid_argument("ledger: b must be >= 2");
  if (beta < 1) throw std::invalid_argument("ledger: beta must be >= 1");
  if (Gamma <= 0 || Gamma >= 1)
    throw std::invalid_argument("ledger: Gamma must lie in (0,1)");
  if (gamma <= 0 || gamma >= 1)
    throw std::invalid_argument("ledger: gamma must lie in (0,1)");
  if (N_dec < 1) throw std::invalid_argument("ledger: N_dec must be >= 1");
  if (d < 1) throw std::invalid_argument("ledger: d must be >= 1");
  if (C_R <= 0) throw std::invalid_argument("ledger: C_R must be positive");
}

namespace {

struct RowSpec {
  std::string id;
  // lhs(beta) and rhs(beta) as exact rationals; K is the beta-sensitivity.
  std::function<Rational(const ParameterSet&, const Rational&)> lhs;
  std::function<Rational(const ParameterSet&, const Rational&)> rhs;
  std::function<Rational(const ParameterSet&)> K;
};

/// The reduced exponent inequalities.  Shorthand inside the lambdas:
/// B = b, G = Gamma, g = gamma, N = N_dec, D = d; all arithmetic exact.
const std::vector<RowSpec>& row_specs() {
  static const std::vector<RowSpec> specs = [] {
    std::vector<RowSpec> v;
    auto B = [](const ParameterSet& p) { return Rational(p.b); };
    auto B2 = [](const ParameterSet& p) { return Rational(p.b) * p.b; };

    v.push_back({"1",
                 [](const ParameterSet&, const Rational&) { return Rational(-6); },
                 [B2](const ParameterSet& p, const Rational& beta) {
                   return 2 * B2(p) * (1 - beta);
                 },
                 [B2](const ParameterSet& p) { return 2 * B2(p); }});
    v.push_back({"2",
                 [](const ParameterSet&, const Rational&) { return Rational(-8); },
                 [B2](const ParameterSet& p, const Rational& beta) {
                   return 2 * B2(p) * (1 - beta);
                 },
                 [B2](const ParameterSet& p) { return 2 * B2(p); }});
    v.push_back({"3",
                 [](const ParameterSet&, const Rational&) { return Rational(96); },
                 [B](const ParameterSet& p, const Rational&) { return B(p); },
                 [](const ParameterSet&) { return Rational(0); }});
    v.push_back({"4",
                 [](const ParameterSet& p, const Rational&) {
                   return Rational(64) * (p.N_dec + 4);
                 },
                 [B](const ParameterSet& p, const Rational&) {
                   return B(p) * p.N_dec * (1 - p.Gamma - p.Gamma / p.b);
                 },
                 [](const ParameterSet&) { return Rational(0); }});
    v.push_back({"5",
                 [](const ParameterSet& p, const Rational&) {
                   return p.Gamma * (p.b - 1);
                 },
                 [B](const ParameterSet& p, const Rational&) { return B(p); },
                 [](const ParameterSet&) { return Rational(0); }});
    v.push_back({"6",
                 [B](const ParameterSet& p, const Rational& beta) {
                   return -2 * beta * B(p) + (1 + p.gamma) * p.b + 8;
                 },
                 [B2](const ParameterSet& p, const Rational& beta) {
                   return -2 * beta * B2(p) + (2 - p.gamma) * p.b * p.b;
                 },
                 [B, B2](const ParameterSet& p) { return 2 * B2(p) - 2 * B(p); }});
    v.push_back({"7",
                 [B](const ParameterSet& p, const Rational& beta) {
                   return -2 * beta * B(p) + (2 + p.gamma) * p.b - 8;
                 },
                 [B2](const ParameterSet& p, const Rational& beta) {
                   return -2 * beta * B2(p) + (2 - p.gamma) * p.b * p.b;
                 },
                 [B, B2](const ParameterSet& p) { return 2 * B2(p) - 2 * B(p); }});
    v.push_back({"7'",
                 [B](const ParameterSet& p, const Rational& beta) {
                   return -2 * beta * B(p) + 2 * p.b + p.Gamma * (1 - p.b) +
                          p.gamma * p.b;
                 },
                 [B2](const ParameterSet& p, const Rational& beta) {
                   return -2 * beta * B2(p) + 2 * p.b * p.b -
                          p.gamma * p.b * p.b;
                 },
                 [B, B2](const ParameterSet& p) { return 2 * B2(p) - 2 * B(p); }});
    v.push_back({"8",
                 [](const ParameterSet& p, const Rational&) {
                   return p.d * (Rational(40) - p.b + p.Gamma * (p.b - 1));
                 },
                 [](const ParameterSet& p, const Rational&) {
                   return Rational(-p.b) + p.Gamma * (p.b - 1) - 32;
                 },
                 [](const ParameterSet&) { return Rational(0); }});
    v.push_back({"9",
                 [](const ParameterSet& p, const Rational&) {
                   return Rational(p.d) * (40 - p.b) + 160;
                 },
                 [](const ParameterSet& p, const Rational&) {
                   return Rational(-p.b);
                 },
                 [](const ParameterSet&) { return Rational(0); }});
    v.push_back({"10",
                 [](const ParameterSet& p, const Rational&) {
                   return Rational(232) - p.b + p.Gamma * (p.b - 1);
                 },
                 [B2](const ParameterSet& p, const Rational& beta) {
                   return -2 * beta * B2(p) + (2 - 2 * p.gamma) * p.b * p.b;
                 },
                 [B2](const ParameterSet& p) { return 2 * B2(p); }});
    v.push_back({"11",
                 [](const ParameterSet& p, const Rational&) {
                   return Rational(264) + p.Gamma * (1 - p.b);
                 },
                 [B2](const ParameterSet& p, const Rational& beta) {
                   return -2 * beta * B2(p) + (2 - p.gamma) * p.b * p.b;
                 },
                 [B2](const ParameterSet& p) { return 2 * B2(p); }});
    return v;
  }();
  return specs;
}

std::vector<LedgerRow> evaluate_rows(const ParameterSet& p, const Rational& beta) {
  std::vector<LedgerRow> rows;
  for (const auto& spec : row_specs()) {
    LedgerRow row;
    row.id = spec.id;
    row.lhs = spec.lhs(p, beta);
    row.rhs = spec.rhs(p, beta);
    row.slack = row.rhs - row.lhs;
    row.lhs1 = spec.lhs(p, 1);
    row.rhs1 = spec.rhs(p, 1);
    row.slack1 = row.rhs1 - row.lhs1;
    row.K = spec.K(p);
    row.pass = row.slack > 0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

const LedgerRow& LedgerReport::row(const std::string& id) const {
  for (const auto& r : rows)
    if (r.id == id) return r;
  throw std::out_of_range("ledger: no inequality with id " + id);
}

LedgerReport check_inequalities(const ParameterSet& params) {
  params.validate();
  LedgerReport report;
  report.rows = evaluate_rows(params, params.beta);

  bool first = true;
  report.all_pass = true;
  report.K_max = 0;
  for (const auto& row : report.rows) {
    report.all_pass = report.all_pass && row.pass;
    if (first || row.slack1 < report.min_slack1) report.min_slack1 = row.slack1;
    if (row.K > report.K_max) report.K_max = row.K;
    first = false;
  }

  if (report.min_slack1 > 0 && report.K_max > 0) {
    report.beta_endpoint = 1 + report.min_slack1 / report.K_max;
    report.endpoint_passes = true;
    for (const auto& row : evaluate_rows(params, report.beta_endpoint))
      report.endpoint_passes = report.endpoint_passes && row.pass;
  } else {
    report.beta_endpoint = 1;
    report.endpoint_passes = false;
  }
  return report;
}

std::string LedgerReport::to_text() const {
  std::ostringstream out;
  for (const auto& r : rows) {
    if (r.id == "7'") continue;  // folded into row 7 below
    const LedgerRow* shown = &r;
    if (r.id == "7") {
      const LedgerRow& companion = row("7'");
      if (companion.slack < r.slack) shown = &companion;
    }
    out << "(" << r.id << ") lhs=" << to_string(shown->lhs)
        << " rhs=" << to_string(shown->rhs)
        << " slack=" << to_string(shown->slack)
        << (shown->pass && r.pass && (r.id != "7" || row("7'").pass) ? " PASS"
                                                                     : " FAIL")
        << "\n";
  }
  return out.str();
}

ParameterSet suggest_parameters() {
  ParameterSet p;
  p.a = 2;
  p.Gamma = Rational(1, 2);
  p.b = 601;
  p.C_R = 1;

  // minimal N_dec with 64(N+4) < b N (1 - Gamma - Gamma/b)
  for (p.N_dec = 1;; ++p.N_dec) {
    const Rational lhs = Rational(64) * (p.N_dec + 4);
    const Rational rhs = Rational(p.b) * p.N_dec * (1 - p.Gamma - p.Gamma / p.b);
    if (lhs < rhs) break;
  }

  // minimal d passing both d-inequalities
  for (p.d = 1;; ++p.d) {
    const Rational lhs8 = p.d * (Rational(40) - p.b + p.Gamma * (p.b - 1));
    const Rational rhs8 = Rational(-p.b) + p.Gamma * (p.b - 1) - 32;
    const Rational lhs9 = Rational(p.d) * (40 - p.b) + 160;
    const Rational rhs9 = Rational(-p.b);
    if (lhs8 < rhs8 && lhs9 < rhs9) break;
  }

  // maximal dyadic gamma = 2^-k passing the five side conditions
  const Rational b(p.b), b2 = b * b, G = p.Gamma;
  for (int k = 1;; ++k) {
    const Rational g = Rational(1, Int(1) << k);
    const bool ok = (-2 * b + (1 + g) * b + 8 < -g * b2) &&   // (i)
                    (g * b - 8 < -g * b2) &&                  // (ii)
                    (232 - b + G * (b - 1) < -2 * g * b2) &&  // (iii)
                    (264 + G * (1 - b) < -g * b2) &&          // (iv)
                    (G * (1 - b) + g * b < -g * b2);          // (v)
    if (ok) {
      p.gamma = g;
      break;
    }
    if (k > 512) throw std::logic_error("ledger: no dyadic gamma found");
  }

  // beta = 1 + margin/2, margin = exact beta-headroom s / K_max at beta' = 1
  p.beta = 1;
  const LedgerReport at_one = check_inequalities(p);
  if (!(at_one.min_slack1 > 0))
    throw std::logic_error("ledger: recipe failed at beta' = 1");
  p.beta = 1 + at_one.min_slack1 / at_one.K_max / 2;
  return p;
}

std::vector<ScaleRow> derive_scales(const ParameterSet& params, int q) {
  params.validate();
  if (q < 0) throw std::invalid_argument("ledger: q must be >= 0");
  std::vector<ScaleRow> table;
  const auto add = [&](const std::string& name, const Rational& coeff) {
    // log10(value) = coeff * b^q * log10(a); for orientation only
    double bq = 1.0;
    for (int i = 0; i < q; ++i) bq *= params.b;
    const double l10 = static_cast<double>(coeff) * bq *
                       std::log10(static_cast<double>(params.a));
    table.push_back({name, coeff, l10});
  };
  add("lambda_q", 1);
  add("delta_q", -2 * params.beta);
  add("ell", -8);
  add("tau_q", -24);
  add("r_q", params.Gamma * (1 - params.b));
  add("delta_prime_q", -2);
  return table;
}

// ---- key = value round trip ---------------------------------------------------

std::string to_string(const Rational& r) {
  std::ostringstream out;
  out << numerator(r);
  if (denominator(r) != 1) out << "/" << denominator(r);
  return out.str();
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(Int(text));
    const Int num(text.substr(0, slash));
    const Int den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("ledger: cannot parse rational '" + text + "'");
  }
}

std::string format_parameter_file(const ParameterSet& p) {
  std::ostringstream out;
  out << "a = " << p.a << "\n"
      << "b = " << p.b << "\n"
      << "beta = " << to_string(p.beta) << "\n"
      << "Gamma = " << to_string(p.Gamma) << "\n"
      << "gamma = " << to_string(p.gamma) << "\n"
      << "N_dec = " << p.N_dec << "\n"
      << "d = " << p.d << "\n"
      << "C_R = " << to_string(p.C_R) << "\n";
  return out.str();
}

ParameterSet parse_parameter_text(const std::string& text) {
  ParameterSet p;
  std::istringstream in(text);
  std::string line;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("ledger: malformed line '" + line + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "a")
      p.a = Int(value);
    else if (key == "b")
      p.b = std::stoi(value);
    else if (key == "beta")
      p.beta = parse_rational(value);
    else if (key == "Gamma")
      p.Gamma = parse_rational(value);
    else if (key == "gamma")
      p.gamma = parse_rational(value);
    else if (key == "N_dec")
      p.N_dec = std::stoi(value);
    else if (key == "d")
      p.d = std::stoi(value);
    else if (key == "C_R")
      p.C_R = parse_rational(value);
    else
      throw std::invalid_argument("ledger: unknown key '" + key + "'");
  }
  p.validate();
  return p;
}

ParameterSet parse_parameter_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ledger: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_parameter_text(buf.str());
}

}  // namespace ealab
