#pragma once
#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace ealab {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// The scheme's bookkeeping parameters.  Frequencies follow
/// lambda_q = a^(b^q) (kept symbolic: b^q is never expanded), with
/// delta_q = lambda_q^{-2 beta}, ell = lambda_q^{-8}, tau_q = ell^3 and
/// r_q = (lambda_q / lambda_{q+1})^Gamma.
struct ParameterSet {
  Int a = 2;
  int b = 601;
  Rational beta = 1;
  Rational Gamma = Rational(1, 2);
  Rational gamma = Rational(1, 65536);
  int N_dec = 2;
  int d = 2;
  Rational C_R = 1;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// One evaluated inequality, reduced to the exponent level: both sides are
/// lambda_q-exponents, exact rationals in (b, beta, Gamma, gamma, N_dec, d).
/// The inequality passes when slack = rhs - lhs is strictly positive.
struct LedgerRow {
  std::string id;   // "1".."11", plus the companion "7'"
  Rational lhs;     // at the supplied beta
  Rational rhs;
  Rational slack;   // rhs - lhs
  Rational lhs1;    // at the auxiliary beta' = 1
  Rational rhs1;
  Rational slack1;
  Rational K;       // beta-sensitivity: slack(beta) = slack1 - K (beta - 1)
  bool pass = false;
};

/// Exact verdict over the full inequality system.
///
/// rows holds twelve entries: ids 1..11 and the companion condition 7',
/// which shares row 7 in the rendered text report (the line shows whichever
/// of the pair has the smaller slack, so a failing companion is visible).
struct LedgerReport {
  std::vector<LedgerRow> rows;
  Rational min_slack1;     // s: smallest slack at beta' = 1
  Rational K_max;          // largest beta-sensitivity among the rows
  Rational beta_endpoint;  // 1 + s / K_max
  bool endpoint_passes = false;  // re-evaluation at beta_endpoint
  bool all_pass = false;         // at the supplied beta

  const LedgerRow& row(const std::string& id) const;

  /// Eleven lines, one per inequality id:
  /// (id) lhs=<p/q> rhs=<p/q> slack=<p/q> PASS|FAIL
  std::string to_text() const;
};

/// Evaluate every inequality exactly, at the supplied beta and at the
/// auxiliary beta' = 1 (no floating point anywhere).
LedgerReport check_inequalities(const ParameterSet& params);

/// Follow the selection recipe: Gamma = 1/2, b = 601, minimal N_dec, minimal
/// d, maximal dyadic gamma passing its five side conditions, and
/// beta = 1 + margin/2 where margin = s / K_max is the exact beta-headroom
/// at beta' = 1.  The result passes check_inequalities.
ParameterSet suggest_parameters();

/// One derived scale: value = a^(coeff * b^q).
struct ScaleRow {
  std::string name;
  Rational coeff;
  double log10_value;  // coeff * b^q * log10(a), for orientation only
};

/// Exponent table for lambda_q, delta_q, ell, tau_q, r_q, delta'_q.
std::vector<ScaleRow> derive_scales(const ParameterSet& params, int q);

/// Plain-text `key = value` round trip; unknown keys are rejected.
/// Rational values are written and read exactly as `p/q` (or `p`).
ParameterSet parse_parameter_file(const std::string& path);
std::string format_parameter_file(const ParameterSet& params);
ParameterSet parse_parameter_text(const std::string& text);

std::string to_string(const Rational& r);
Rational parse_rational(const std::string& text);

}  // namespace ealab
