#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ealab {

/// Truncated Taylor expansion of a smooth one-variable function about a base
/// point: coeffs()[j] = f^(j)(x0) / j!.  Arithmetic propagates expansions
/// through sums, products, reciprocals, exp and sqrt, so radial profile
/// chains and temporal cutoffs expose exact high-order derivatives without
/// finite differencing.
class Jet {
public:
  /// Zero jet tracking derivatives up to `order`.
  explicit Jet(std::size_t order) : c_(order + 1, 0.0) {}

  static Jet constant(double value, std::size_t order) {
    Jet j(order);
    j.c_[0] = value;
    return j;
  }

  /// The coordinate function x evaluated at x0.
  static Jet variable(double x0, std::size_t order) {
    Jet j(order);
    j.c_[0] = x0;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  std::size_t order() const { return c_.size() - 1; }
  double coeff(std::size_t j) const { return c_[j]; }
  double value() const { return c_[0]; }

  /// f^(m)(x0) = m! * coeff(m).
  double derivative_value(std::size_t m) const {
    if (m >= c_.size()) return 0.0;
    double fact = 1.0;
    for (std::size_t i = 2; i <= m; ++i) fact *= static_cast<double>(i);
    return fact * c_[m];
  }

  /// Mixed-order sums truncate to the shorter expansion: coefficients beyond
  /// the shorter jet's order would be incomplete, so they are dropped.
  Jet operator+(const Jet& o) const {
    Jet r(std::min(order(), o.order()));
    for (std::size_t j = 0; j < r.c_.size(); ++j) r.c_[j] = c_[j] + o.c_[j];
    return r;
  }
  Jet operator-(const Jet& o) const {
    Jet r(std::min(order(), o.order()));
    for (std::size_t j = 0; j < r.c_.size(); ++j) r.c_[j] = c_[j] - o.c_[j];
    return r;
  }
  Jet operator-() const {
    Jet r = *this;
    for (double& v : r.c_) v = -v;
    return r;
  }
  Jet operator+(double s) const {
    Jet r = *this;
    r.c_[0] += s;
    return r;
  }
  Jet operator-(double s) const { return *this + (-s); }
  Jet operator*(double s) const {
    Jet r = *this;
    for (double& v : r.c_) v *= s;
    return r;
  }

  /// Truncated Cauchy product (at the shorter of the two orders).
  Jet operator*(const Jet& o) const {
    Jet r(std::min(order(), o.order()));
    for (std::size_t i = 0; i < r.c_.size(); ++i) {
      if (c_[i] == 0.0) continue;
      for (std::size_t j = 0; i + j < r.c_.size(); ++j)
        r.c_[i + j] += c_[i] * o.c_[j];
    }
    return r;
  }

  /// 1/f; requires f(x0) != 0.
  Jet reciprocal() const {
    if (c_[0] == 0.0) throw std::domain_error("Jet::reciprocal at a zero");
    Jet r(order());
    r.c_[0] = 1.0 / c_[0];
    for (std::size_t n = 1; n < c_.size(); ++n) {
      double acc = 0.0;
      for (std::size_t j = 1; j <= n; ++j) acc += c_[j] * r.c_[n - j];
      r.c_[n] = -acc / c_[0];
    }
    return r;
  }

  /// exp(f); the recurrence g' = f' g gives
  /// (n+1) g_{n+1} = sum_{k=1}^{n+1} k f_k g_{n+1-k}.
  Jet exponential() const {
    Jet r(order());
    r.c_[0] = std::exp(c_[0]);
    for (std::size_t n = 1; n < c_.size(); ++n) {
      double acc = 0.0;
      for (std::size_t k = 1; k <= n; ++k)
        acc += static_cast<double>(k) * c_[k] * r.c_[n - k];
      r.c_[n] = acc / static_cast<double>(n);
    }
    return r;
  }

  /// sqrt(f); requires f(x0) > 0.
  Jet square_root() const {
    if (c_[0] <= 0.0) throw std::domain_error("Jet::square_root needs f > 0");
    Jet r(order());
    r.c_[0] = std::sqrt(c_[0]);
    for (std::size_t n = 1; n < c_.size(); ++n) {
      double acc = 0.0;
      for (std::size_t j = 1; j + 1 <= n; ++j) acc += r.c_[j] * r.c_[n - j];
      r.c_[n] = (c_[n] - acc) / (2.0 * r.c_[0]);
    }
    return r;
  }

  /// Jet of f' (one order shorter).
  Jet derivative() const {
    if (order() == 0) return Jet(0);
    Jet r(order() - 1);
    for (std::size_t j = 0; j + 1 < c_.size(); ++j)
      r.c_[j] = static_cast<double>(j + 1) * c_[j + 1];
    return r;
  }

  bool is_zero() const {
    for (double v : c_)
      if (v != 0.0) return false;
    return true;
  }

private:
  std::vector<double> c_;
};

inline Jet operator*(double s, const Jet& j) { return j * s; }
inline Jet operator+(double s, const Jet& j) { return j + s; }

/// The standard compactly supported bump B(x) = exp(-1/(1-x^2)) on (-1,1),
/// zero outside, as a jet at x0.  Smooth everywhere; identically zero
/// (with all derivatives) once |x0| leaves the open support, so the cutover
/// is exact rather than a numerical truncation.
inline Jet bump_jet(double x0, std::size_t order) {
  if (std::abs(x0) >= 1.0 - 1e-9) return Jet(order);  // flat zero region
  Jet x = Jet::variable(x0, order);
  Jet g = -(x * x) + 1.0;     // 1 - x^2 > 0 here
  Jet e = -g.reciprocal();    // -1/(1-x^2)
  return e.exponential();
}

}  // namespace ealab
