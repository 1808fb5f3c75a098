#include "ealab/pipes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ealab/jet.hpp"

namespace ealab {
namespace {

constexpr double kPi = 3.14159265358979323846;

// 16-point Gauss-Legendre rule on [-1, 1] (positive half; mirror for the rest).
constexpr int kGaussHalf = 8;
constexpr double kGaussX[kGaussHalf] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGaussW[kGaussHalf] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

/// Integrate g over [a, b] with a composite 16-point Gauss rule.
template <typename F>
double gauss_integrate(double a, double b, int panels, F&& g) {
  double total = 0.0;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    for (int i = 0; i < kGaussHalf; ++i) {
      total += kGaussW[i] * half *
               (g(mid - half * kGaussX[i]) + g(mid + half * kGaussX[i]));
    }
  }
  return total;
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> cross_prod(const std::array<double, 3>& a,
                                 const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double wrap_two_pi(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0) y += kTwoPi;
  return y;
}

// ---- exact cross-lattice machinery ---------------------------------------------

using IVec2 = std::array<long long, 2>;

long long icross(const IVec2& a, const IVec2& b) {
  return a[0] * b[1] - a[1] * b[0];
}
long long idot(const IVec2& a, const IVec2& b) {
  return a[0] * b[0] + a[1] * b[1];
}

/// Basis of the integer lattice spanned by up to three integer 2-vectors.
/// Column-style Hermite reduction: Euclid on first coordinates until one
/// non-zero survives, then gcd of the remaining second coordinates.
std::array<IVec2, 2> integer_lattice_basis(std::vector<IVec2> gen) {
  std::vector<IVec2> cols;
  for (const auto& v : gen)
    if (v[0] != 0 || v[1] != 0) cols.push_back(v);
  // Reduce first coordinates.
  while (true) {
    std::vector<int> live;
    for (int i = 0; i < static_cast<int>(cols.size()); ++i)
      if (cols[i][0] != 0) live.push_back(i);
    if (live.size() <= 1) break;
    int ia = live[0], ib = live[1];
    if (std::llabs(cols[ia][0]) < std::llabs(cols[ib][0])) std::swap(ia, ib);
    const long long q = cols[ia][0] / cols[ib][0];
    cols[ia][0] -= q * cols[ib][0];
    cols[ia][1] -= q * cols[ib][1];
    if (cols[ia][0] == 0 && cols[ia][1] == 0)
      cols.erase(cols.begin() + ia);
  }
  IVec2 b1{0, 0};
  long long g2 = 0;
  for (const auto& c : cols) {
    if (c[0] != 0)
      b1 = c;
    else
      g2 = std::gcd(g2, std::llabs(c[1]));
  }
  if (b1[0] == 0 || g2 == 0)
    throw std::logic_error("cross lattice is rank-deficient");
  return {b1, IVec2{0, g2}};
}

/// Gauss (Lagrange) reduction: afterwards |b1| <= |b2| and the projection
/// coefficient of b2 on b1 is at most 1/2 in magnitude, so b1 is a shortest
/// lattice vector and nearest-point search needs only one ring of neighbours.
void lagrange_reduce(IVec2& b1, IVec2& b2) {
  while (true) {
    if (idot(b1, b1) > idot(b2, b2)) std::swap(b1, b2);
    const double mu = static_cast<double>(idot(b1, b2)) /
                      static_cast<double>(idot(b1, b1));
    const long long q = std::llround(mu);
    if (q == 0) break;
    b2[0] -= q * b1[0];
    b2[1] -= q * b1[1];
  }
  if (icross(b1, b2) < 0) {  // keep a positively oriented basis
    b2[0] = -b2[0];
    b2[1] = -b2[1];
  }
}

}  // namespace

// ---- profile -------------------------------------------------------------------

PipeProfile::Point PipeProfile::chain_at(double y) const {
  Point out{};
  if (std::abs(y) >= support_radius) return out;
  const double u0 = y * y;
  const std::size_t order = static_cast<std::size_t>(2 * d + 4);
  const Jet t = Jet::variable(u0, order);
  const Jet g = (t * (-16.0)) + 1.0;  // 1 - 16 u = 1 - (4 y)^2
  if (g.value() <= 0.0) return out;
  // Top potential H = (1 - (4y)^2)^K.  The exponent keeps h = L^d H (and two
  // more derivative levels used by the pressure) vanishing to high order at the
  // support edge, so sampled fields have fast-decaying spectral tails at the
  // resolutions the checks run at; a harder cutoff (e.g. the classical
  // exp(-1/(1-(4y)^2)) bump) concentrates L^d H in a razor-thin collar near the
  // edge and cannot be resolved on any practical grid once d >= 2.
  std::vector<Jet> chain;
  chain.reserve(static_cast<std::size_t>(d) + 2);
  Jet top = g;
  for (int j = 1; j < edge_touch + 2 * d; ++j) top = top * g;
  chain.push_back(top);
  for (int j = 0; j <= d; ++j) {
    const Jet f1 = chain.back().derivative();
    const Jet f2 = f1.derivative();
    if (dim == 3)
      chain.push_back((f1 + t * f2) * 4.0);   // F'' + F'/y in u-space
    else
      chain.push_back(f1 * 2.0 + (t * f2) * 4.0);  // F'' in u-space
  }
  const Jet& fd = chain[static_cast<std::size_t>(d)];
  const double f1 = fd.derivative_value(1);
  const double f2 = fd.derivative_value(2);
  const double f3 = fd.derivative_value(3);
  out.h = fd.value();
  out.dh = 2.0 * y * f1;
  out.d2h = 2.0 * f1 + 4.0 * u0 * f2;
  out.d3h = y * (12.0 * f2 + 8.0 * u0 * f3);
  out.dh_over_y = 2.0 * f1;
  const Jet& fl = chain[static_cast<std::size_t>(d) + 1];
  out.lap_h = fl.value();
  out.dlap_h = 2.0 * y * fl.derivative_value(1);
  const Jet& fp = chain[static_cast<std::size_t>(d) - 1];
  out.pot = fp.value();
  out.dpot = 2.0 * y * fp.derivative_value(1);
  out.top = chain[0].value();
  return out;
}

double PipeProfile::pressure_integral(double y) const {
  if (pressure_table.size() < 4)
    throw std::logic_error("profile pressure table not built");
  const double ay = std::abs(y);
  if (ay >= support_radius) return pressure_tail;
  const int n = static_cast<int>(pressure_table.size());
  const double step = support_radius / (n - 1);
  const double t = ay / step;
  int i0 = static_cast<int>(std::floor(t)) - 1;
  i0 = std::clamp(i0, 0, n - 4);
  const double s = t - i0;
  // cubic Lagrange on the four nodes i0..i0+3 (local coordinates 0..3)
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (s - b) / static_cast<double>(a - b);
    acc += w * pressure_table[static_cast<std::size_t>(i0 + a)];
  }
  return acc;
}

PipeProfile build_profile(int d, double normalization, int dim,
                          int edge_touch) {
  if (d < 1)
    throw std::invalid_argument(
        "build_profile: chain depth d must be >= 1 (depth 0 would lose the "
        "automatic vanishing weighted mean)");
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("build_profile: dim must be 2 or 3");
  if (!(normalization > 0))
    throw std::invalid_argument("build_profile: normalization must be > 0");
  if (edge_touch == 0) edge_touch = 16;
  if (edge_touch < 4)
    throw std::invalid_argument(
        "build_profile: edge_touch must be >= 4 (the pressure chain uses two "
        "derivative levels beyond h)");

  PipeProfile prof;
  prof.d = d;
  prof.dim = dim;
  prof.normalization = normalization;
  prof.edge_touch = edge_touch;

  const double R = PipeProfile::support_radius;
  if (dim == 3) {
    prof.j2 = gauss_integrate(0.0, R, 64, [&](double y) {
      const auto c = prof.chain_at(y);
      return c.dh * c.dh * y;
    });
    prof.j_lap = gauss_integrate(0.0, R, 64, [&](double y) {
      const auto c = prof.chain_at(y);
      return c.h * c.lap_h * y;
    });
    prof.h_mean = std::abs(gauss_integrate(0.0, R, 64, [&](double y) {
      return prof.chain_at(y).h * y;
    }));
  } else {
    prof.j2 = 2.0 * gauss_integrate(0.0, R, 64, [&](double y) {
      const auto c = prof.chain_at(y);
      return c.dh * c.dh;
    });
    prof.j_lap = 2.0 * gauss_integrate(0.0, R, 64, [&](double y) {
      const auto c = prof.chain_at(y);
      return c.h * c.d2h;
    });
    prof.h_mean = std::abs(2.0 * gauss_integrate(0.0, R, 64, [&](double y) {
      return prof.chain_at(y).h;
    }));
  }
  if (!(prof.j2 > 0)) throw std::logic_error("profile Dirichlet moment is zero");

  double sup = 0.0;
  for (int i = 0; i <= 4096; ++i)
    sup = std::max(sup, std::abs(prof.chain_at(i * R / 4096).h));
  prof.sup_h = sup;

  prof.amplitude_unit = dim == 3
                            ? std::sqrt(normalization / (4.0 * kPi * kPi * prof.j2))
                            : std::sqrt(normalization / (2.0 * kPi * prof.j2));

  // Cumulative pressure integral (per interval 16-point Gauss, then summed).
  const int nodes = 2049;
  prof.pressure_table.assign(nodes, 0.0);
  const double step = R / (nodes - 1);
  double acc = 0.0;
  for (int k = 1; k < nodes; ++k) {
    acc += gauss_integrate((k - 1) * step, k * step, 1, [&](double y) {
      const auto c = prof.chain_at(y);
      return (dim == 3 ? c.dlap_h : c.d3h) * c.h;
    });
    prof.pressure_table[static_cast<std::size_t>(k)] = acc;
  }
  prof.pressure_tail = acc;
  return prof;
}

// ---- family factories ------------------------------------------------------------

namespace {

struct RationalFrame {
  RVec3 xi1;
  RVec3 xi2;
};

/// Right-handed rational cross frames for the nine base directions
/// (xi1 x xi2 = k in every row).
const std::array<RationalFrame, 9>& base_frames3() {
  static const std::array<RationalFrame, 9> F = [] {
    std::array<RationalFrame, 9> f{};
    const auto r = [](int n, int d) { return Rational(n, d); };
    f[0] = {{0, 1, 0}, {0, 0, 1}};                            // (1,0,0)
    f[1] = {{0, 0, 1}, {1, 0, 0}};                            // (0,1,0)
    f[2] = {{1, 0, 0}, {0, 1, 0}};                            // (0,0,1)
    f[3] = {{r(-4, 5), r(3, 5), 0}, {0, 0, 1}};               // (3,4,0)/5
    f[4] = {{r(4, 5), 0, r(-3, 5)}, {0, 1, 0}};               // (3,0,4)/5
    f[5] = {{0, r(-4, 5), r(3, 5)}, {1, 0, 0}};               // (0,3,4)/5
    f[6] = {{r(4, 5), r(3, 5), 0}, {0, 0, 1}};                // (3,-4,0)/5
    f[7] = {{r(-4, 5), 0, r(-3, 5)}, {0, 1, 0}};              // (3,0,-4)/5
    f[8] = {{0, r(4, 5), r(3, 5)}, {1, 0, 0}};                // (0,3,-4)/5
    return f;
  }();
  return F;
}

RVec3 rmatvec(const RMat3& m, const RVec3& v) {
  RVec3 out{};
  for (int i = 0; i < 3; ++i)
    out[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(3 * i)] * v[0] +
                                       m[static_cast<std::size_t>(3 * i + 1)] * v[1] +
                                       m[static_cast<std::size_t>(3 * i + 2)] * v[2];
  return out;
}

long rational_to_scaled_long(const Rational& v, const Int& den) {
  const Rational scaled = v * den;
  if (boost::multiprecision::denominator(scaled) != 1)
    throw std::logic_error("direction scaling failed to clear denominators");
  return boost::multiprecision::numerator(scaled).convert_to<long>();
}

Int rvec_common_denominator(const RVec3& v) {
  Int den = 1;
  for (const auto& c : v)
    den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(c));
  return den;
}

void validate_family_scales(double lambda, double r, int d) {
  if (!(lambda > 0)) throw std::invalid_argument("pipe family: lambda must be > 0");
  if (!(r > 0) || r > 1.0)
    throw std::invalid_argument("pipe family: r must lie in (0, 1]");
  const double lr = lambda * r;
  if (std::abs(lr - std::round(lr)) > 1e-9 || std::round(lr) < 0.5)
    throw std::invalid_argument(
        "pipe family: lambda * r must be a positive integer (periodization)");
  if (d < 1) throw std::invalid_argument("pipe family: d must be >= 1");
}

}  // namespace

PipeFamily make_pipe_family(const DirectionSet& set, int dir_index,
                            double lambda, double r, int d) {
  if (dir_index < 0 || dir_index >= 9)
    throw std::invalid_argument("make_pipe_family: direction index out of range");
  validate_family_scales(lambda, r, d);

  const RVec3 k = set.k[static_cast<std::size_t>(dir_index)];
  const RVec3 x1 = rmatvec(set.rotation, base_frames3()[static_cast<std::size_t>(dir_index)].xi1);
  const RVec3 x2 = rmatvec(set.rotation, base_frames3()[static_cast<std::size_t>(dir_index)].xi2);

  PipeFamily fam;
  fam.dim = 3;
  fam.d = d;
  fam.lambda = lambda;
  fam.r = r;

  const Int kden = rvec_common_denominator(k);
  Int fden = 1;
  fden = boost::multiprecision::lcm(fden, rvec_common_denominator(x1));
  fden = boost::multiprecision::lcm(fden, rvec_common_denominator(x2));
  for (int i = 0; i < 3; ++i) {
    const auto s = static_cast<std::size_t>(i);
    fam.xi[s] = k[s].convert_to<double>();
    fam.xi1[s] = x1[s].convert_to<double>();
    fam.xi2[s] = x2[s].convert_to<double>();
    fam.p[s] = rational_to_scaled_long(k[s], kden);
    fam.q1[s] = rational_to_scaled_long(x1[s], fden);
    fam.q2[s] = rational_to_scaled_long(x2[s], fden);
  }
  fam.qden = fden.convert_to<long>();
  return fam;
}

PipeFamily make_pipe_family2(const Direction2Set& set, int dir_index,
                             double lambda, double r, int d) {
  if (dir_index < 0 || dir_index >= 4)
    throw std::invalid_argument("make_pipe_family2: direction index out of range");
  validate_family_scales(lambda, r, d);

  const RVec2 k = set.k[static_cast<std::size_t>(dir_index)];
  PipeFamily fam;
  fam.dim = 2;
  fam.d = d;
  fam.lambda = lambda;
  fam.r = r;

  Int den = boost::multiprecision::lcm(boost::multiprecision::denominator(k[0]),
                                       boost::multiprecision::denominator(k[1]));
  fam.xi = {k[0].convert_to<double>(), k[1].convert_to<double>(), 0.0};
  // xi1 holds the perpendicular direction (-k2, k1).
  fam.xi1 = {-fam.xi[1], fam.xi[0], 0.0};
  fam.xi2 = {0.0, 0.0, 0.0};
  fam.p = {rational_to_scaled_long(k[0], den), rational_to_scaled_long(k[1], den), 0};
  fam.q1 = {-fam.p[1], fam.p[0], 0};
  fam.q2 = {0, 0, 0};
  fam.qden = den.convert_to<long>();
  return fam;
}

// ---- evaluator -----------------------------------------------------------------

PipeEvaluator::PipeEvaluator(const PipeFamily& family,
                             std::shared_ptr<const PipeProfile> profile)
    : family_(family), profile_(std::move(profile)) {
  if (!profile_) throw std::invalid_argument("PipeEvaluator: null profile");
  if (profile_->dim != family_.dim)
    throw std::invalid_argument("PipeEvaluator: profile/family dimension mismatch");
  if (profile_->d != family_.d)
    throw std::invalid_argument("PipeEvaluator: profile/family chain depth mismatch");
  validate_family_scales(family_.lambda, family_.r, family_.d);

  const double lr = std::round(family_.lambda * family_.r);
  const double s0 = kTwoPi / lr;  // lattice scale before frame division
  long long pnorm2 = 0;
  for (long c : family_.p) pnorm2 += static_cast<long long>(c) * c;
  const double pnorm = std::sqrt(static_cast<double>(pnorm2));

  double l_total = 0.0;  // total axis length (3-D) / line length (2-D)
  if (family_.dim == 3) {
    std::vector<IVec2> gen;
    for (int i = 0; i < 3; ++i)
      gen.push_back(IVec2{family_.q1[static_cast<std::size_t>(i)],
                          family_.q2[static_cast<std::size_t>(i)]});
    auto basis = integer_lattice_basis(gen);
    lagrange_reduce(basis[0], basis[1]);
    const double unit = s0 / static_cast<double>(family_.qden);
    for (int c = 0; c < 2; ++c) {
      basis_[0][static_cast<std::size_t>(c)] = unit * static_cast<double>(basis[0][static_cast<std::size_t>(c)]);
      basis_[1][static_cast<std::size_t>(c)] = unit * static_cast<double>(basis[1][static_cast<std::size_t>(c)]);
    }
    // column-matrix inverse of B = [b1 b2]
    const double det = basis_[0][0] * basis_[1][1] - basis_[0][1] * basis_[1][0];
    if (std::abs(det) < 1e-14)
      throw std::logic_error("cross lattice basis is degenerate");
    inv_basis_[0] = {basis_[1][1] / det, -basis_[1][0] / det};
    inv_basis_[1] = {-basis_[0][1] / det, basis_[0][0] / det};
    shortest_ = std::sqrt(basis_[0][0] * basis_[0][0] + basis_[0][1] * basis_[0][1]);
    // one tube per lattice cell: total length = torus volume / cell area
    l_total = kTwoPi * kTwoPi * kTwoPi / std::abs(det);
  } else {
    // 1-D cross lattice: spacing from the periodization and the integer
    // direction combined, 2 pi / lcm(lambda r, |p|).
    const long long lrl = std::llround(lr);
    const long long pl = std::llround(pnorm);
    if (pl * pl != pnorm2)
      throw std::logic_error("2-D pipe direction has irrational norm");
    const long long l = std::lcm(lrl, pl);
    spacing2d_ = kTwoPi / static_cast<double>(l);
    shortest_ = spacing2d_;
    l_total = kTwoPi * kTwoPi / spacing2d_;
  }

  tube_radius_ = std::min(0.8 * kPi / family_.lambda, 0.49 * shortest_);
  lambda_s_ = 1.0 / (4.0 * tube_radius_);

  const double c_req = profile_->normalization;
  if (family_.dim == 3) {
    // || grad rho ||_{L2(T^3)}^2 = l_total * 2 pi A^2 j2 = lambda^2 C
    amplitude_ = family_.lambda *
                 std::sqrt(c_req / (2.0 * kPi * profile_->j2 * l_total));
    pot_amplitude_ = -amplitude_ / (lambda_s_ * lambda_s_);
  } else {
    // || grad rho ||_{L2(T^2)}^2 = l_total * A^2 lambda_s j2 = lambda^2 C
    amplitude_ = family_.lambda *
                 std::sqrt(c_req / (profile_->j2 * lambda_s_ * l_total));
    pot_amplitude_ = -amplitude_ / lambda_s_;
  }
  theta_amplitude_ =
      amplitude_ * std::pow(family_.lambda / lambda_s_, 2.0 * family_.d);

  if (family_.center_offset) {
    if (family_.dim == 3)
      offset_ = {0.5 * (basis_[0][0] + basis_[1][0]),
                 0.5 * (basis_[0][1] + basis_[1][1])};
    else
      offset_ = {0.5 * spacing2d_, 0.0};
  } else {
    offset_ = family_.offset;
  }
}

PipeEvaluator::Local PipeEvaluator::locate(const std::array<double, 3>& x) const {
  Local loc{};
  if (family_.dim == 3) {
    const double w1 = dot3(x, family_.xi1) - offset_[0];
    const double w2 = dot3(x, family_.xi2) - offset_[1];
    const double c1 = inv_basis_[0][0] * w1 + inv_basis_[0][1] * w2;
    const double c2 = inv_basis_[1][0] * w1 + inv_basis_[1][1] * w2;
    const double k1 = std::round(c1), k2 = std::round(c2);
    double best = 1e300, r1 = 0, r2 = 0;
    for (int a = -1; a <= 1; ++a) {
      for (int b = -1; b <= 1; ++b) {
        const double m1 = k1 + a, m2 = k2 + b;
        const double d1 = w1 - (basis_[0][0] * m1 + basis_[1][0] * m2);
        const double d2 = w2 - (basis_[0][1] * m1 + basis_[1][1] * m2);
        const double dsq = d1 * d1 + d2 * d2;
        if (dsq < best) {
          best = dsq;
          r1 = d1;
          r2 = d2;
        }
      }
    }
    loc.s = std::sqrt(best);
    loc.signed_s = loc.s;
    if (loc.s > 0) loc.dir = {r1 / loc.s, r2 / loc.s};
    loc.inside = loc.s < tube_radius_;
  } else {
    const double sig_raw =
        x[0] * family_.xi1[0] + x[1] * family_.xi1[1] - offset_[0];
    const double sig = sig_raw - spacing2d_ * std::round(sig_raw / spacing2d_);
    loc.signed_s = sig;
    loc.s = std::abs(sig);
    loc.dir = {sig >= 0 ? 1.0 : -1.0, 0.0};
    loc.inside = loc.s < tube_radius_;
  }
  return loc;
}

double PipeEvaluator::rho(const std::array<double, 3>& x) const {
  const Local loc = locate(x);
  if (!loc.inside) return 0.0;
  return amplitude_ * profile_->chain_at(lambda_s_ * loc.s).h;
}

std::array<double, 3> PipeEvaluator::w(const std::array<double, 3>& x) const {
  const double v = rho(x);
  return {v * family_.xi[0], v * family_.xi[1], v * family_.xi[2]};
}

std::array<double, 3> PipeEvaluator::u(const std::array<double, 3>& x) const {
  if (family_.dim != 3)
    throw std::logic_error("PipeEvaluator::u is the 3-D vector potential");
  const Local loc = locate(x);
  if (!loc.inside || loc.s <= 0) return {0, 0, 0};
  // radial derivative of the cross-plane potential chi with Lap chi = -rho
  const double dchi =
      pot_amplitude_ * lambda_s_ * profile_->chain_at(lambda_s_ * loc.s).dpot;
  std::array<double, 3> es{0, 0, 0};
  for (int i = 0; i < 3; ++i)
    es[static_cast<std::size_t>(i)] =
        loc.dir[0] * family_.xi1[static_cast<std::size_t>(i)] +
        loc.dir[1] * family_.xi2[static_cast<std::size_t>(i)];
  const auto tangent = cross_prod(es, family_.xi);
  return {dchi * tangent[0], dchi * tangent[1], dchi * tangent[2]};
}

double PipeEvaluator::stream(const std::array<double, 3>& x) const {
  if (family_.dim != 2)
    throw std::logic_error("PipeEvaluator::stream is the 2-D stream function");
  const Local loc = locate(x);
  // dpot(y) = int_0^y h: vanishes identically outside the support, so the
  // stream function is globally well defined.
  return pot_amplitude_ * profile_->chain_at(lambda_s_ * loc.signed_s).dpot;
}

double PipeEvaluator::theta(const std::array<double, 3>& x) const {
  const Local loc = locate(x);
  if (!loc.inside) return 0.0;
  return theta_amplitude_ * profile_->chain_at(lambda_s_ * loc.s).top;
}

double PipeEvaluator::pressure(const std::array<double, 3>& x,
                               double alpha) const {
  const Local loc = locate(x);
  const double y = std::min(lambda_s_ * loc.s, PipeProfile::support_radius);
  const double h = profile_->chain_at(y).h;
  const double integral = profile_->pressure_integral(y);
  return amplitude_ * amplitude_ *
         (0.5 * h * h - alpha * alpha * lambda_s_ * lambda_s_ * integral);
}

double PipeEvaluator::grad_magnitude(const std::array<double, 3>& x,
                                     int m) const {
  if (m < 0 || m > 2)
    throw std::invalid_argument("grad_magnitude supports m = 0, 1, 2");
  const Local loc = locate(x);
  if (!loc.inside) return 0.0;
  const auto c = profile_->chain_at(lambda_s_ * loc.s);
  if (m == 0) return amplitude_ * std::abs(c.h);
  if (m == 1) return amplitude_ * lambda_s_ * std::abs(c.dh);
  const double cross_sq =
      family_.dim == 3 ? c.d2h * c.d2h + c.dh_over_y * c.dh_over_y
                       : c.d2h * c.d2h;
  return amplitude_ * lambda_s_ * lambda_s_ * std::sqrt(cross_sq);
}

PipeEvaluator::Sample PipeEvaluator::sample_all(
    const std::array<double, 3>& x) const {
  Sample out{};
  const Local loc = locate(x);
  if (family_.dim == 2) {
    const auto c = profile_->chain_at(lambda_s_ * loc.signed_s);
    out.rho = amplitude_ * c.h;
    out.theta = theta_amplitude_ * c.top;
    out.stream = pot_amplitude_ * c.dpot;
    for (int i = 0; i < 2; ++i)
      out.w[static_cast<std::size_t>(i)] =
          out.rho * family_.xi[static_cast<std::size_t>(i)];
    return out;
  }
  if (!loc.inside) return out;
  const auto c = profile_->chain_at(lambda_s_ * loc.s);
  out.rho = amplitude_ * c.h;
  out.theta = theta_amplitude_ * c.top;
  for (int i = 0; i < 3; ++i)
    out.w[static_cast<std::size_t>(i)] =
        out.rho * family_.xi[static_cast<std::size_t>(i)];
  if (loc.s > 0) {
    const double dchi = pot_amplitude_ * lambda_s_ * c.dpot;
    std::array<double, 3> es{0, 0, 0};
    for (int i = 0; i < 3; ++i)
      es[static_cast<std::size_t>(i)] =
          loc.dir[0] * family_.xi1[static_cast<std::size_t>(i)] +
          loc.dir[1] * family_.xi2[static_cast<std::size_t>(i)];
    const auto tangent = cross_prod(es, family_.xi);
    for (int i = 0; i < 3; ++i)
      out.u[static_cast<std::size_t>(i)] = dchi * tangent[static_cast<std::size_t>(i)];
  }
  return out;
}

std::vector<std::array<double, 3>> PipeEvaluator::axis_points() const {
  std::vector<std::array<double, 3>> pts;
  const long lr = std::lround(family_.lambda * family_.r);
  if (family_.dim == 3) {
    // distinct axes on the torus = lattice points modulo lambda r * lattice
    for (long m1 = 0; m1 < lr; ++m1) {
      for (long m2 = 0; m2 < lr; ++m2) {
        const double w1 = offset_[0] + basis_[0][0] * m1 + basis_[1][0] * m2;
        const double w2 = offset_[1] + basis_[0][1] * m1 + basis_[1][1] * m2;
        pts.push_back({wrap_two_pi(w1 * family_.xi1[0] + w2 * family_.xi2[0]),
                       wrap_two_pi(w1 * family_.xi1[1] + w2 * family_.xi2[1]),
                       wrap_two_pi(w1 * family_.xi1[2] + w2 * family_.xi2[2])});
      }
    }
  } else {
    const long count = std::lround(kTwoPi / spacing2d_);
    for (long m = 0; m < count; ++m) {
      const double sig = offset_[0] + spacing2d_ * static_cast<double>(m);
      pts.push_back({wrap_two_pi(sig * family_.xi1[0]),
                     wrap_two_pi(sig * family_.xi1[1]), 0.0});
    }
  }
  return pts;
}

// ---- realization -----------------------------------------------------------------

PipeFields realize_pipe(const PipeFamily& family,
                        std::shared_ptr<const PipeProfile> profile,
                        const Grid& grid) {
  if (grid.dim() != family.dim)
    throw std::invalid_argument("realize_pipe: grid/family dimension mismatch");
  if (static_cast<double>(grid.n()) < 4.0 * family.lambda)
    throw std::invalid_argument(
        "realize_pipe: need at least four grid points per concentration "
        "wavelength (n >= 4 lambda)");

  const PipeEvaluator ev(family, profile);
  const int dim = grid.dim();
  const std::size_t npts = grid.points();

  std::vector<double> w_data(static_cast<std::size_t>(dim) * npts, 0.0);
  std::vector<double> u_data;
  u_data.assign(dim == 3 ? 3 * npts : npts, 0.0);
  std::vector<double> rho_data(npts, 0.0);
  std::vector<double> theta_data(npts, 0.0);

  for (std::size_t idx = 0; idx < npts; ++idx) {
    const auto x = grid_point(grid, idx);
    const auto s = ev.sample_all(x);
    rho_data[idx] = s.rho;
    theta_data[idx] = s.theta;
    for (int c = 0; c < dim; ++c)
      w_data[static_cast<std::size_t>(c) * npts + idx] = s.w[static_cast<std::size_t>(c)];
    if (dim == 3) {
      for (int c = 0; c < 3; ++c)
        u_data[static_cast<std::size_t>(c) * npts + idx] = s.u[static_cast<std::size_t>(c)];
    } else {
      u_data[idx] = s.stream;
    }
  }

  PipeFields out{family,
                 std::move(profile),
                 grid,
                 SpectralField::from_physical(grid, 1, std::move(w_data)),
                 SpectralField::from_physical(grid, dim == 3 ? 1 : 0,
                                              std::move(u_data)),
                 SpectralField::from_physical(grid, 0, std::move(rho_data)),
                 SpectralField::from_physical(grid, 0, std::move(theta_data)),
                 ev.lambda_s(),
                 ev.tube_radius(),
                 ev.amplitude()};
  return out;
}

SpectralField pipe_pressure(const PipeFields& fields, const AlphaModel& model) {
  model.validate();
  const PipeEvaluator ev(fields.family, fields.profile);
  const std::size_t npts = fields.grid.points();
  std::vector<double> data(npts, 0.0);
  for (std::size_t idx = 0; idx < npts; ++idx)
    data[idx] = ev.pressure(grid_point(fields.grid, idx), model.alpha);
  return SpectralField::from_physical(fields.grid, 0, std::move(data));
}

// ---- stationarity -----------------------------------------------------------------

std::string StationarityReport::to_text() const {
  std::ostringstream os;
  os << "div(W x W) L2 = " << div_ww_l2
     << "\nmodel residual L2 = " << residual_l2
     << "\nreference L2 = " << reference_l2 << "\nrelative = " << relative()
     << "\n";
  return os.str();
}

StationarityReport verify_stationarity(const PipeFields& fields,
                                       const AlphaModel& model) {
  model.validate();
  StationarityReport rep;
  const SpectralField& W = fields.W;
  rep.div_ww_l2 = l2_norm(div(outer(W, W)));

  const SpectralField v = momentum(W, model);
  SpectralField cross = W;  // placeholder, reassigned below
  if (fields.grid.dim() == 3) {
    cross = cross3(curl3(v), W);
  } else {
    cross = scalar_multiply(curl2(v), perp(W));
  }
  const SpectralField p = pipe_pressure(fields, model);
  const SpectralField resid = cross + grad(p);
  rep.residual_l2 = l2_norm(resid);
  rep.reference_l2 = l2_norm(cross);
  return rep;
}

StationarityReport cross_section_stationarity(const PipeFamily& family,
                                              const PipeProfile& profile,
                                              const AlphaModel& model,
                                              int resolution) {
  model.validate();
  if (family.dim != 3)
    throw std::invalid_argument(
        "cross_section_stationarity reduces a 3-D family; check 2-D families "
        "with verify_stationarity directly");
  const auto prof = std::make_shared<const PipeProfile>(profile);
  const PipeEvaluator ev(family, prof);

  const Grid cg(2, resolution);
  const std::size_t npts = cg.points();

  // map the grid square onto the lattice cell: y = t1/2pi * b1 + t2/2pi * b2
  const auto B = ev.cross_basis();
  const double m00 = B[0][0] / kTwoPi, m10 = B[0][1] / kTwoPi;
  const double m01 = B[1][0] / kTwoPi, m11 = B[1][1] / kTwoPi;
  const double det = m00 * m11 - m01 * m10;
  // G = M^{-T}: gradient map from grid coordinates to cross coordinates
  const double g00 = m11 / det, g01 = -m10 / det;
  const double g10 = -m01 / det, g11 = m00 / det;

  const auto center = ev.cross_offset();
  const double ls = ev.lambda_s();
  const double amp = ev.amplitude();
  const double alpha = model.alpha;

  std::vector<double> w_data(npts), p_data(npts);
  for (std::size_t idx = 0; idx < npts; ++idx) {
    const auto t = grid_point(cg, idx);
    const double y1 = m00 * t[0] + m01 * t[1];
    const double y2 = m10 * t[0] + m11 * t[1];
    // nearest lattice copy of the tube centre
    double best = 1e300;
    for (int a = -1; a <= 1; ++a) {
      for (int b = -1; b <= 1; ++b) {
        const double d1 = y1 - center[0] - a * B[0][0] - b * B[1][0];
        const double d2 = y2 - center[1] - a * B[0][1] - b * B[1][1];
        best = std::min(best, d1 * d1 + d2 * d2);
      }
    }
    const double y = ls * std::sqrt(best);
    const auto c = prof->chain_at(y);
    w_data[idx] = amp * c.h;
    p_data[idx] = amp * amp *
                  (0.5 * c.h * c.h -
                   alpha * alpha * ls * ls * prof->pressure_integral(y));
  }
  const SpectralField w = SpectralField::from_physical(cg, 0, std::move(w_data));
  const SpectralField p = SpectralField::from_physical(cg, 0, std::move(p_data));

  // anisotropic Laplacian: K = G^T G, Lap_y = sum K_ab d_a d_b
  const double k00 = g00 * g00 + g10 * g10;
  const double k01 = g00 * g01 + g10 * g11;
  const double k11 = g01 * g01 + g11 * g11;
  const SpectralField w1 = derivative(w, 0), w2 = derivative(w, 1);
  const SpectralField lap_w = derivative(w1, 0) * k00 +
                              derivative(w1, 1) * (2.0 * k01) +
                              derivative(w2, 1) * k11;
  const SpectralField g_fld = w - lap_w * (alpha * alpha);

  const SpectralField g1 = derivative(g_fld, 0), g2 = derivative(g_fld, 1);
  const SpectralField p1 = derivative(p, 0), p2 = derivative(p, 1);

  // cross-coordinate components of grad p - w grad g
  const SpectralField ref1 = scalar_multiply(w, g1 * g00 + g2 * g01);
  const SpectralField ref2 = scalar_multiply(w, g1 * g10 + g2 * g11);
  const SpectralField r1 = (p1 * g00 + p2 * g01) - ref1;
  const SpectralField r2 = (p1 * g10 + p2 * g11) - ref2;

  StationarityReport rep;
  rep.div_ww_l2 = 0.0;  // identically zero in the axis-invariant reduction
  rep.residual_l2 = std::sqrt(l2_norm(r1) * l2_norm(r1) + l2_norm(r2) * l2_norm(r2));
  rep.reference_l2 =
      std::sqrt(l2_norm(ref1) * l2_norm(ref1) + l2_norm(ref2) * l2_norm(ref2));
  return rep;
}

// ---- deformed pipes ---------------------------------------------------------------

DeformedPipeReport deformed_pipe(const PipeFields& fields, const FlowMap& flow) {
  const Grid& grid = fields.grid;
  if (flow.grid().dim() != grid.dim() || flow.grid().n() != grid.n())
    throw std::invalid_argument("deformed_pipe: fields and flow grids differ");
  const int dim = grid.dim();
  const std::size_t npts = grid.points();
  const PipeEvaluator ev(fields.family, fields.profile);

  const SpectralField& disp = flow.forward_displacement();
  const SpectralField gradA = flow.grad_phi();
  const auto& dphys = disp.phys();
  const auto& aphys = gradA.phys();

  std::vector<double> lhs_data(static_cast<std::size_t>(dim) * npts, 0.0);
  std::vector<double> carrier(dim == 3 ? 3 * npts : npts, 0.0);

  for (std::size_t idx = 0; idx < npts; ++idx) {
    const auto x = grid_point(grid, idx);
    std::array<double, 3> phi{0, 0, 0};
    for (int c = 0; c < dim; ++c)
      phi[static_cast<std::size_t>(c)] =
          x[static_cast<std::size_t>(c)] + dphys[static_cast<std::size_t>(c) * npts + idx];

    // A[i][j] = d_i Phi^j in storage order
    double A[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        A[i][j] = aphys[static_cast<std::size_t>(i * dim + j) * npts + idx];

    if (dim == 3) {
      const auto wy = ev.w(phi);
      // solve A^T lhs = w  (Jacobian J = A^T in matrix convention)
      double M[3][3];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M[i][j] = A[j][i];
      const double det = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                         M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                         M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
      double inv[3][3];
      inv[0][0] = (M[1][1] * M[2][2] - M[1][2] * M[2][1]) / det;
      inv[0][1] = (M[0][2] * M[2][1] - M[0][1] * M[2][2]) / det;
      inv[0][2] = (M[0][1] * M[1][2] - M[0][2] * M[1][1]) / det;
      inv[1][0] = (M[1][2] * M[2][0] - M[1][0] * M[2][2]) / det;
      inv[1][1] = (M[0][0] * M[2][2] - M[0][2] * M[2][0]) / det;
      inv[1][2] = (M[0][2] * M[1][0] - M[0][0] * M[1][2]) / det;
      inv[2][0] = (M[1][0] * M[2][1] - M[1][1] * M[2][0]) / det;
      inv[2][1] = (M[0][1] * M[2][0] - M[0][0] * M[2][1]) / det;
      inv[2][2] = (M[0][0] * M[1][1] - M[0][1] * M[1][0]) / det;
      for (int i = 0; i < 3; ++i) {
        double acc = 0;
        for (int j = 0; j < 3; ++j) acc += inv[i][j] * wy[static_cast<std::size_t>(j)];
        lhs_data[static_cast<std::size_t>(i) * npts + idx] = acc;
      }
      // carrier = (grad Phi)^T (U o Phi): component i = sum_j d_i Phi^j U_j
      const auto uy = ev.u(phi);
      for (int i = 0; i < 3; ++i) {
        double acc = 0;
        for (int j = 0; j < 3; ++j) acc += A[i][j] * uy[static_cast<std::size_t>(j)];
        carrier[static_cast<std::size_t>(i) * npts + idx] = acc;
      }
    } else {
      const auto wy = ev.w(phi);
      const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
      // J = A^T; J^{-1} = adj(A^T)/det
      const double l0 = (A[1][1] * wy[0] - A[1][0] * wy[1]) / det;
      const double l1 = (-A[0][1] * wy[0] + A[0][0] * wy[1]) / det;
      lhs_data[idx] = l0;
      lhs_data[npts + idx] = l1;
      carrier[idx] = ev.stream(phi);
    }
  }

  DeformedPipeReport rep{SpectralField::zero(grid, 1), 0.0, 0.0};
  const SpectralField lhs = SpectralField::from_physical(grid, 1, std::move(lhs_data));
  if (dim == 3) {
    const SpectralField V = SpectralField::from_physical(grid, 1, std::move(carrier));
    rep.field = curl3(V);
  } else {
    const SpectralField psi = SpectralField::from_physical(grid, 0, std::move(carrier));
    rep.field = perp_grad(psi);
  }
  const double ref = l2_norm(lhs);
  rep.lhs_rhs_rel = ref > 0 ? l2_norm(lhs - rep.field) / ref : 0.0;
  rep.div_l2 = l2_norm(div(rep.field));
  return rep;
}

// ---- averages ---------------------------------------------------------------------

Mat3 pipe_average_tensor(const std::array<double, 3>& xi,
                         const PipeProfile& profile) {
  if (profile.dim != 3)
    throw std::invalid_argument("pipe_average_tensor expects a 3-D profile");
  const double norm = dot3(xi, xi);
  if (std::abs(norm - 1.0) > 1e-12)
    throw std::invalid_argument("pipe_average_tensor: xi must be a unit vector");
  // At unit scale, the tube-length times amplitude-squared product reduces to
  // 2 pi A1^2 for every direction (the integer direction norm cancels).
  const double la2 = 2.0 * kPi * profile.amplitude_unit * profile.amplitude_unit;
  const double coef_parallel = 2.0 * kPi * la2 * profile.j_lap;  // int rho Lap rho
  const double coef_perp = kPi * la2 * profile.j2;               // grad rho outer
  Mat3 out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double xixj = xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(j)];
      const double id = i == j ? 1.0 : 0.0;
      out[static_cast<std::size_t>(3 * i + j)] =
          coef_parallel * xixj + coef_perp * (id - xixj);
    }
  }
  return out;
}

Mat2 pipe_average_tensor2(const std::array<double, 2>& xi,
                          const PipeProfile& profile) {
  if (profile.dim != 2)
    throw std::invalid_argument("pipe_average_tensor2 expects a 2-D profile");
  const double norm = xi[0] * xi[0] + xi[1] * xi[1];
  if (std::abs(norm - 1.0) > 1e-12)
    throw std::invalid_argument("pipe_average_tensor2: xi must be a unit vector");
  // line-length times amplitude-squared times lambda_s reduces to C / j2
  const double la = profile.normalization / profile.j2;
  const double coef_parallel = la * profile.j_lap;
  const double coef_perp = la * profile.j2;
  Mat2 out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double xixj = xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(j)];
      const double id = i == j ? 1.0 : 0.0;
      out[static_cast<std::size_t>(2 * i + j)] =
          coef_parallel * xixj + coef_perp * (id - xixj);
    }
  }
  return out;
}

// ---- L^p scaling ------------------------------------------------------------------

std::vector<LpScalingRow> lp_scaling_table(const PipeFamily& prototype,
                                           const PipeProfile& profile,
                                           const std::vector<double>& lambdas,
                                           const std::vector<double>& rs,
                                           int max_n,
                                           const std::vector<double>& ps) {
  if (max_n < 0 || max_n > 2)
    throw std::invalid_argument("lp_scaling_table: derivative order n <= 2");
  const auto prof = std::make_shared<const PipeProfile>(profile);
  const double R = PipeProfile::support_radius;
  const int dim = prototype.dim;

  // derivative magnitude at unit argument scale
  const auto dmag = [&](int n, double y) {
    const auto c = prof->chain_at(y);
    if (n == 0) return std::abs(c.h);
    if (n == 1) return std::abs(c.dh);
    return dim == 3 ? std::sqrt(c.d2h * c.d2h + c.dh_over_y * c.dh_over_y)
                    : std::abs(c.d2h);
  };

  std::vector<LpScalingRow> rows;
  for (double lambda : lambdas) {
    for (double r : rs) {
      PipeFamily fam = prototype;
      fam.lambda = lambda;
      fam.r = r;
      const PipeEvaluator ev(fam, prof);
      const double A = ev.amplitude();
      const double ls = ev.lambda_s();
      // total axis length recovered from the normalization identity
      const double l_total =
          dim == 3 ? lambda * lambda * profile.normalization /
                         (2.0 * kPi * profile.j2 * A * A)
                   : lambda * lambda * profile.normalization /
                         (profile.j2 * ls * A * A);
      for (int n = 0; n <= max_n; ++n) {
        for (double p : ps) {
          LpScalingRow row;
          row.lambda = lambda;
          row.r = r;
          row.n = n;
          row.p = p;
          if (p == 0.0) {  // infinity norm
            double sup = 0.0;
            for (int i = 0; i <= 2048; ++i)
              sup = std::max(sup, dmag(n, i * R / 2048));
            row.norm = A * std::pow(ls, n) * sup;
            row.ratio = row.norm / (std::pow(lambda, n) / r);
          } else {
            const double moment = gauss_integrate(0.0, R, 64, [&](double y) {
              const double v = dmag(n, y);
              const double w = dim == 3 ? 2.0 * kPi * y : 2.0;
              return std::pow(v, p) * w;
            });
            const double norm_p = l_total * std::pow(A, p) *
                                  std::pow(ls, n * p - (dim == 3 ? 2 : 1)) *
                                  moment;
            row.norm = std::pow(norm_p, 1.0 / p);
            const double expo = dim == 3 ? 2.0 / p - 1.0 : 1.0 / p - 0.5;
            row.ratio = row.norm / (std::pow(lambda, n) * std::pow(r, expo));
          }
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

// ---- axis intersections -------------------------------------------------------------

AxisIntersections axis_intersections(const PipeEvaluator& a,
                                     const PipeEvaluator& b) {
  if (a.family().dim != 3 || b.family().dim != 3)
    throw std::invalid_argument("axis_intersections needs 3-D families");
  const auto& xa = a.family().xi;
  const auto& xb = b.family().xi;
  const auto n = cross_prod(xa, xb);
  const double sin_theta = std::sqrt(dot3(n, n));
  if (sin_theta < 1e-12)
    throw std::invalid_argument("axis_intersections: parallel directions");

  const double reach = a.tube_radius() + b.tube_radius();
  const double r_enum = kTwoPi * std::sqrt(3.0) + 2.0 * reach;

  // enumerate axis lines by their cross-lattice coordinates
  const auto lines_of = [&](const PipeEvaluator& ev) {
    std::vector<std::array<double, 3>> anchors;
    const auto B = ev.cross_basis();
    const auto o = ev.cross_offset();
    const auto& f = ev.family();
    const int m_max = static_cast<int>(
        std::ceil(r_enum / ev.shortest_lattice_vector())) + 2;
    for (int m1 = -m_max; m1 <= m_max; ++m1) {
      for (int m2 = -m_max; m2 <= m_max; ++m2) {
        const double w1 = o[0] + B[0][0] * m1 + B[1][0] * m2;
        const double w2 = o[1] + B[0][1] * m1 + B[1][1] * m2;
        if (w1 * w1 + w2 * w2 > r_enum * r_enum) continue;
        anchors.push_back({w1 * f.xi1[0] + w2 * f.xi2[0],
                           w1 * f.xi1[1] + w2 * f.xi2[1],
                           w1 * f.xi1[2] + w2 * f.xi2[2]});
      }
    }
    return anchors;
  };

  const auto la = lines_of(a);
  const auto lb = lines_of(b);

  const double c = dot3(xa, xb);
  const double denom = 1.0 - c * c;

  AxisIntersections out;
  out.sin_angle = sin_theta;
  out.ball_radius = 1.2 * reach / sin_theta;
  const double lambda = std::max(a.family().lambda, b.family().lambda);
  const double r2 = std::max(a.family().r, b.family().r);
  out.rho12 = 1.0 / (out.ball_radius * lambda * r2);

  std::set<std::array<long long, 3>> seen;
  for (const auto& pa : la) {
    for (const auto& pb : lb) {
      const std::array<double, 3> d{pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]};
      const double da = dot3(d, xa), db = dot3(d, xb);
      const double t1 = (da - c * db) / denom;
      const double t2 = (c * da - db) / denom;
      std::array<double, 3> q1{}, q2{};
      double dist_sq = 0;
      for (int i = 0; i < 3; ++i) {
        const auto s = static_cast<std::size_t>(i);
        q1[s] = pa[s] + t1 * xa[s];
        q2[s] = pb[s] + t2 * xb[s];
        dist_sq += (q1[s] - q2[s]) * (q1[s] - q2[s]);
      }
      if (dist_sq > reach * reach * (1.0 + 1e-12)) continue;
      std::array<double, 3> center{};
      std::array<long long, 3> key{};
      for (int i = 0; i < 3; ++i) {
        const auto s = static_cast<std::size_t>(i);
        double v = wrap_two_pi(0.5 * (q1[s] + q2[s]));
        if (v > kTwoPi - 1e-7) v = 0.0;
        center[s] = v;
        key[s] = std::llround(v * 1e6);
      }
      if (seen.insert(key).second) out.centers.push_back(center);
    }
  }
  return out;
}

}  // namespace ealab
