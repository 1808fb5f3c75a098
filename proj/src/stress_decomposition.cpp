#include "ealab/stress_decomposition.hpp"

#include "ealab/grid.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ealab {
namespace {

// ---- constants of the construction -------------------------------------------
//
// c0 dominates |ctilde_i| (i = 4,5,6) on the unit Frobenius ball: those
// coefficients are 25/36 times one off-diagonal entry, and any entry of a
// unit-ball matrix is at most 1/sqrt(2) in magnitude, so 25/(36 sqrt 2) < 1.
// The equalizer base B fixes the constant coefficient sum at 12 c0 + 6 B.
const Rational kC0 = 1;
const Rational kB = 2;
const Rational kBaseLevel2 = 1;  // 2-D per-direction base level s

template <class T>
T frac(int num, int den) {
  return T(num) / T(den);
}

// ---- the base solves, shared between double and exact arithmetic -------------

/// Base-family coefficient squares for a symmetric traceless 3x3 matrix
/// R = [[a,c,d],[c,b,e],[d,e,-a-b]] (row-major).  Mechanics: solve the
/// explicit five-tensor linear system, then add balancing shifts that keep
/// every coefficient positive and pin the coefficient sum.
template <class T>
std::array<T, 9> solve3(const std::array<T, 9>& R) {
  const T a = R[0], b = R[4], c = R[1], d = R[2], e = R[5];

  // off-diagonal entries are produced by single mixed tensors
  const T ct4 = frac<T>(25, 36) * c;
  const T ct5 = frac<T>(25, 36) * d;
  const T ct6 = frac<T>(25, 36) * e;

  // remove their diagonal contribution, then shift the six mixed tensors by
  // 2 c0 (their off-diagonal parts cancel pairwise; the diagonal picks up
  // 2 c0 * diag(-42, 0, 42)/25)
  const T c0(kC0), B(kB);
  const T ap = a - (frac<T>(2, 25) * ct4 + frac<T>(2, 25) * ct5 - ct6) +
               frac<T>(84, 25) * c0;
  const T bp = b - (frac<T>(23, 25) * ct4 - ct5 + frac<T>(2, 25) * ct6);

  // diagonal solve against f(k1), f(k2): [[2,-1],[-1,2]]^-1 = (1/3)[[2,1],[1,2]]
  const T cd1 = frac<T>(1, 3) * (2 * ap + bp);
  const T cd2 = frac<T>(1, 3) * (ap + 2 * bp);

  // affine equalizer: pins the sum of all nine squares at 12 c0 + 6 B
  const T S = cd1 + cd2 + ct4 + ct5 + ct6;
  const T cd0 = B - frac<T>(1, 6) * S;

  return {cd1 + 2 * cd0, cd2 + 2 * cd0, 2 * cd0,
          ct4 + 2 * c0,  ct5 + 2 * c0,  ct6 + 2 * c0,
          2 * c0,        2 * c0,        2 * c0};
}

/// 2-D base solve for R = [[x,y],[y,-x]]: four tensors 2 k otimes k - Id.
template <class T>
std::array<T, 4> solve2(const std::array<T, 4>& R) {
  const T x = R[0], y = R[1];
  const T s(kBaseLevel2);
  const T half_diff3 = frac<T>(25, 48) * y;   // (c3^2 - c4^2)/2
  const T half_diff1 = frac<T>(7, 25) * s + frac<T>(1, 2) * x;
  return {s + half_diff1, s - half_diff1, s + half_diff3, s - half_diff3};
}

// ---- tiny exact matrix helpers ------------------------------------------------

RMat3 rmul3(const RMat3& A, const RMat3& B) {
  RMat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Rational s = 0;
      for (int k = 0; k < 3; ++k) s += A[i * 3 + k] * B[k * 3 + j];
      out[i * 3 + j] = s;
    }
  return out;
}

RMat3 rtrans3(const RMat3& A) {
  RMat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i * 3 + j] = A[j * 3 + i];
  return out;
}

RMat2 rmul2(const RMat2& A, const RMat2& B) {
  return {A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3],
          A[2] * B[0] + A[3] * B[2], A[2] * B[1] + A[3] * B[3]};
}

RMat2 rtrans2(const RMat2& A) { return {A[0], A[2], A[1], A[3]}; }

/// Rational rotation from the quaternion (12,1,1,1): |q|^2 = 147.
const RMat3& base_rotation3() {
  static const RMat3 O = [] {
    RMat3 m;
    const int raw[9] = {143, -22, 26, 26, 143, -22, -22, 26, 143};
    for (int i = 0; i < 9; ++i) m[i] = Rational(raw[i], 147);
    return m;
  }();
  return O;
}

/// Rational rotation with tan(theta/2) = 1/12: (143, -24; 24, 143)/145.
const RMat2& base_rotation2() {
  static const RMat2 O = {Rational(143, 145), Rational(-24, 145),
                          Rational(24, 145), Rational(143, 145)};
  return O;
}

const std::array<RVec3, 9>& base_directions3() {
  static const std::array<RVec3, 9> K = [] {
    std::array<RVec3, 9> k{};
    const auto r = [](int n, int d) { return Rational(n, d); };
    k[0] = {1, 0, 0};
    k[1] = {0, 1, 0};
    k[2] = {0, 0, 1};
    k[3] = {r(3, 5), r(4, 5), 0};
    k[4] = {r(3, 5), 0, r(4, 5)};
    k[5] = {0, r(3, 5), r(4, 5)};
    k[6] = {r(3, 5), r(-4, 5), 0};
    k[7] = {r(3, 5), 0, r(-4, 5)};
    k[8] = {0, r(3, 5), r(-4, 5)};
    return k;
  }();
  return K;
}

const std::array<RVec2, 4>& base_directions2() {
  static const std::array<RVec2, 4> K = {
      RVec2{1, 0}, RVec2{0, 1}, RVec2{Rational(3, 5), Rational(4, 5)},
      RVec2{Rational(3, 5), Rational(-4, 5)}};
  return K;
}

// ---- exact affine-form positivity certification -------------------------------

/// Evaluate one family's coefficient squares as affine forms on the basis of
/// traceless symmetric matrices, then compute the exact Frobenius radius at
/// which the smallest square could reach zero.  The radius is the min over
/// forms of value-at-zero / dual-norm, certified by the comparison
/// value0^2 > eps^2 * |W|_F^2 in rational arithmetic.
Rational positivity_radius3() {
  // basis E_m of the 5-dim space, and its exact Gram inverse
  std::array<RMat3, 5> E{};
  E[0] = {1, 0, 0, 0, 0, 0, 0, 0, -1};  // a
  E[1] = {0, 0, 0, 0, 1, 0, 0, 0, -1};  // b
  E[2] = {0, 1, 0, 1, 0, 0, 0, 0, 0};   // c
  E[3] = {0, 0, 1, 0, 0, 0, 1, 0, 0};   // d
  E[4] = {0, 0, 0, 0, 0, 1, 0, 1, 0};   // e

  const RMat3 zero{};
  const auto at0 = solve3<Rational>(zero);

  // per-form linear weights w_m = gamma_i(E_m) - gamma_i(0)
  std::array<std::array<Rational, 5>, 9> w{};
  for (int m = 0; m < 5; ++m) {
    const auto g = solve3<Rational>(E[m]);
    for (int i = 0; i < 9; ++i) w[i][m] = g[i] - at0[i];
  }

  // dual Frobenius norm^2 of each form: w^T G^-1 w with the Gram matrix
  // G = [[2,1],[1,2]] on the diagonal block, 2 I elsewhere
  const auto dual_norm_sq = [](const std::array<Rational, 5>& v) {
    // G^-1 block = (1/3)[[2,-1],[-1,2]]; remaining entries 1/2
    const Rational alpha0 = Rational(1, 3) * (2 * v[0] - v[1]);
    const Rational alpha1 = Rational(1, 3) * (2 * v[1] - v[0]);
    return alpha0 * v[0] + alpha1 * v[1] +
           Rational(1, 2) * (v[2] * v[2] + v[3] * v[3] + v[4] * v[4]);
  };

  // max dyadic eps = m / 2^16 passing every comparison (monotone in eps)
  const auto passes = [&](const Rational& eps) {
    for (int i = 0; i < 9; ++i) {
      if (at0[i] <= 0) return false;
      if (!(at0[i] * at0[i] > eps * eps * dual_norm_sq(w[i]))) return false;
    }
    return true;
  };
  long lo = 0, hi = 8L << 16;
  while (lo < hi) {
    const long mid = (lo + hi + 1) / 2;
    if (passes(Rational(mid, 65536)))
      lo = mid;
    else
      hi = mid - 1;
  }
  return Rational(lo, 65536);
}

Rational positivity_radius2() {
  std::array<RMat2, 2> E{};
  E[0] = {1, 0, 0, -1};  // x
  E[1] = {0, 1, 1, 0};   // y
  const RMat2 zero{};
  const auto at0 = solve2<Rational>(zero);
  std::array<std::array<Rational, 2>, 4> w{};
  for (int m = 0; m < 2; ++m) {
    const auto g = solve2<Rational>(E[m]);
    for (int i = 0; i < 4; ++i) w[i][m] = g[i] - at0[i];
  }
  const auto dual_norm_sq = [](const std::array<Rational, 2>& v) {
    return Rational(1, 2) * (v[0] * v[0] + v[1] * v[1]);
  };
  const auto passes = [&](const Rational& eps) {
    for (int i = 0; i < 4; ++i) {
      if (at0[i] <= 0) return false;
      if (!(at0[i] * at0[i] > eps * eps * dual_norm_sq(w[i]))) return false;
    }
    return true;
  };
  long lo = 0, hi = 8L << 16;
  while (lo < hi) {
    const long mid = (lo + hi + 1) / 2;
    if (passes(Rational(mid, 65536)))
      lo = mid;
    else
      hi = mid - 1;
  }
  return Rational(lo, 65536);
}

double to_double(const Rational& r) { return static_cast<double>(r); }

Mat3 to_double3(const RMat3& m) {
  Mat3 out{};
  for (int i = 0; i < 9; ++i) out[i] = to_double(m[i]);
  return out;
}

double frobenius3(const Mat3& m) {
  double s = 0;
  for (double v : m) s += v * v;
  return std::sqrt(s);
}

double frobenius2(const Mat2& m) {
  double s = 0;
  for (double v : m) s += v * v;
  return std::sqrt(s);
}

void validate_symmetric_traceless3(const Mat3& R) {
  const double scale = 1 + frobenius3(R);
  if (std::abs(R[1] - R[3]) > 1e-10 * scale ||
      std::abs(R[2] - R[6]) > 1e-10 * scale ||
      std::abs(R[5] - R[7]) > 1e-10 * scale)
    throw std::invalid_argument("stress: matrix is not symmetric");
  if (std::abs(R[0] + R[4] + R[8]) > 1e-10 * scale)
    throw std::invalid_argument("stress: matrix is not traceless");
}

void validate_symmetric_traceless2(const Mat2& R) {
  const double scale = 1 + frobenius2(R);
  if (std::abs(R[1] - R[2]) > 1e-10 * scale)
    throw std::invalid_argument("stress: matrix is not symmetric");
  if (std::abs(R[0] + R[3]) > 1e-10 * scale)
    throw std::invalid_argument("stress: matrix is not traceless");
}

/// Deterministic boundary re-check of the certified ball (defense in depth
/// for the exact bound): samples on the sphere of radius eps must keep all
/// squares strictly positive.
bool boundary_sample_ok3(double eps, int samples) {
  std::mt19937_64 rng(0x5742u);
  const auto gauss = [&rng] {
    const double u1 = ((rng() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = ((rng() >> 11) + 0.5) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  };
  for (int s = 0; s < samples; ++s) {
    const double a = gauss(), b = gauss(), c = gauss(), d = gauss(), e = gauss();
    Mat3 R = {a, c, d, c, b, e, d, e, -a - b};
    const double norm = frobenius3(R);
    if (norm == 0) continue;
    for (double& v : R) v *= eps / norm;
    const auto squares = solve3<double>(R);
    for (double q : squares)
      if (!(q > 0)) return false;
  }
  return true;
}

bool boundary_sample_ok2(double eps, int samples) {
  std::mt19937_64 rng(0x5743u);
  const auto gauss = [&rng] {
    const double u1 = ((rng() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = ((rng() >> 11) + 0.5) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  };
  for (int s = 0; s < samples; ++s) {
    const double x = gauss(), y = gauss();
    Mat2 R = {x, y, y, -x};
    const double norm = frobenius2(R);
    if (norm == 0) continue;
    for (double& v : R) v *= eps / norm;
    const auto squares = solve2<double>(R);
    for (double q : squares)
      if (!(q > 0)) return false;
  }
  return true;
}

}  // namespace

// ---- public API ---------------------------------------------------------------

RMat3 f_tensor(const RVec3& k) {
  RMat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out[i * 3 + j] = 3 * k[i] * k[j] - (i == j ? 1 : 0);
  return out;
}

RMat2 f_tensor2(const RVec2& k) {
  RMat2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out[i * 2 + j] = 2 * k[i] * k[j] - (i == j ? 1 : 0);
  return out;
}

std::vector<DirectionSet> build_direction_sets(int N) {
  if (N < 0) throw std::invalid_argument("stress: N must be >= 0");
  std::vector<DirectionSet> sets;
  RMat3 O = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  for (int n = 0; n <= N; ++n) {
    DirectionSet set;
    set.index = n;
    set.rotation = O;
    for (int i = 0; i < 9; ++i) {
      const RVec3& k0 = base_directions3()[i];
      for (int r = 0; r < 3; ++r)
        set.k[i][r] = O[r * 3 + 0] * k0[0] + O[r * 3 + 1] * k0[1] +
                      O[r * 3 + 2] * k0[2];
      Rational norm2 = 0;
      for (int r = 0; r < 3; ++r) norm2 += set.k[i][r] * set.k[i][r];
      if (norm2 != 1) throw std::logic_error("stress: direction not unit");
    }
    sets.push_back(set);
    O = rmul3(base_rotation3(), O);
  }
  // exact pairwise disjointness
  for (std::size_t s1 = 0; s1 < sets.size(); ++s1)
    for (std::size_t s2 = s1 + 1; s2 < sets.size(); ++s2)
      for (const auto& u : sets[s1].k)
        for (const auto& v : sets[s2].k)
          if (u == v) throw std::logic_error("stress: families intersect");
  return sets;
}

std::vector<Direction2Set> build_direction_sets2(int N) {
  if (N < 0) throw std::invalid_argument("stress: N must be >= 0");
  std::vector<Direction2Set> sets;
  RMat2 O = {1, 0, 0, 1};
  for (int n = 0; n <= N; ++n) {
    Direction2Set set;
    set.index = n;
    set.rotation = O;
    for (int i = 0; i < 4; ++i) {
      const RVec2& k0 = base_directions2()[i];
      set.k[i] = {O[0] * k0[0] + O[1] * k0[1], O[2] * k0[0] + O[3] * k0[1]};
      if (set.k[i][0] * set.k[i][0] + set.k[i][1] * set.k[i][1] != 1)
        throw std::logic_error("stress: direction not unit");
    }
    sets.push_back(set);
    O = rmul2(base_rotation2(), O);
  }
  for (std::size_t s1 = 0; s1 < sets.size(); ++s1)
    for (std::size_t s2 = s1 + 1; s2 < sets.size(); ++s2)
      for (const auto& u : sets[s1].k)
        for (const auto& v : sets[s2].k)
          if (u == v) throw std::logic_error("stress: families intersect");
  return sets;
}

double direction_separation(const DirectionSet& a, const DirectionSet& b) {
  Rational best = 0;
  for (const auto& u : a.k)
    for (const auto& v : b.k) {
      Rational dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
      if (dot < 0) dot = -dot;
      if (dot > best) best = dot;
    }
  return to_double(Rational(1) - best);
}

double direction_separation2(const Direction2Set& a, const Direction2Set& b) {
  Rational best = 0;
  for (const auto& u : a.k)
    for (const auto& v : b.k) {
      Rational dot = u[0] * v[0] + u[1] * v[1];
      if (dot < 0) dot = -dot;
      if (dot > best) best = dot;
    }
  return to_double(Rational(1) - best);
}

EpsilonBall certified_epsilon() {
  static const double eps = [] {
    Rational radius = positivity_radius3();
    if (radius > 1) radius = 1;  // the shift constants were bounded on the unit ball
    const double value = to_double(radius / 2);
    if (!boundary_sample_ok3(value, 4096))
      throw std::logic_error("stress: 3-D boundary sampling contradicts the bound");
    return value;
  }();
  return {eps};
}

EpsilonBall certified_epsilon2() {
  static const double eps = [] {
    Rational radius = positivity_radius2();
    if (radius > 1) radius = 1;
    const double value = to_double(radius / 2);
    if (!boundary_sample_ok2(value, 4096))
      throw std::logic_error("stress: 2-D boundary sampling contradicts the bound");
    return value;
  }();
  return {eps};
}

Rational coefficient_sum() { return 12 * kC0 + 6 * kB; }
Rational coefficient_sum2() { return 4 * kBaseLevel2; }

CoefficientSolution decompose_stress(const Mat3& R, const DirectionSet& set) {
  validate_symmetric_traceless3(R);
  if (frobenius3(R) > certified_epsilon().epsilon)
    throw std::domain_error("stress: input outside the certified ball");
  // c_i^n(R) = c_i^0(O_n^T R O_n)
  const Mat3 O = to_double3(set.rotation);
  Mat3 Rb{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
          s += O[p * 3 + i] * R[p * 3 + q] * O[q * 3 + j];
      Rb[i * 3 + j] = s;
    }
  CoefficientSolution sol;
  sol.squares = solve3<double>(Rb);
  sol.c_sum = 0;
  for (double q : sol.squares) sol.c_sum += q;
  return sol;
}

Coefficient2Solution decompose_stress2(const Mat2& R, const Direction2Set& set) {
  validate_symmetric_traceless2(R);
  if (frobenius2(R) > certified_epsilon2().epsilon)
    throw std::domain_error("stress: input outside the certified ball");
  const RMat2& Or = set.rotation;
  const Mat2 O = {to_double(Or[0]), to_double(Or[1]), to_double(Or[2]),
                  to_double(Or[3])};
  Mat2 Rb{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double s = 0;
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
          s += O[p * 2 + i] * R[p * 2 + q] * O[q * 2 + j];
      Rb[i * 2 + j] = s;
    }
  Coefficient2Solution sol;
  sol.squares = solve2<double>(Rb);
  sol.c_sum = sol.squares[0] + sol.squares[1] + sol.squares[2] + sol.squares[3];
  return sol;
}

std::array<Rational, 9> decompose_stress_exact(const RMat3& R,
                                               const DirectionSet& set) {
  const RMat3 Rb = rmul3(rtrans3(set.rotation), rmul3(R, set.rotation));
  return solve3<Rational>(Rb);
}

std::array<Rational, 4> decompose_stress_exact2(const RMat2& R,
                                                const Direction2Set& set) {
  const RMat2 Rb = rmul2(rtrans2(set.rotation), rmul2(R, set.rotation));
  return solve2<Rational>(Rb);
}

}  // namespace ealab
