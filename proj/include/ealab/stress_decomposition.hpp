#pragma once
#include "ealab/ledger.hpp"  // Rational

#include <array>
#include <vector>

namespace ealab {

// Row-major dense matrices for the pointwise geometry.
using Mat3 = std::array<double, 9>;
using Mat2 = std::array<double, 4>;
using RVec3 = std::array<Rational, 3>;
using RVec2 = std::array<Rational, 2>;
using RMat3 = std::array<Rational, 9>;
using RMat2 = std::array<Rational, 4>;

/// Family n of nine exact-rational unit directions, obtained from the base
/// family by the n-th power of a fixed rational rotation.
struct DirectionSet {
  int index = 0;
  std::array<RVec3, 9> k;
  RMat3 rotation;  // O_n with this set = O_n * (base set)
};

/// 2-D analog: four exact-rational unit directions per family.
struct Direction2Set {
  int index = 0;
  std::array<RVec2, 4> k;
  RMat2 rotation;
};

/// Squares of the decomposition coefficients; their sum is the same
/// constant for every admissible input.
struct CoefficientSolution {
  std::array<double, 9> squares;
  double c_sum = 0;
};

struct Coefficient2Solution {
  std::array<double, 4> squares;
  double c_sum = 0;
};

/// Radius of the admissible ball in the Frobenius norm.
struct EpsilonBall {
  double epsilon = 0;
};

/// Generator tensors: f(k) = 3 k otimes k - Id (3-D), 2 k otimes k - Id (2-D).
RMat3 f_tensor(const RVec3& k);
RMat2 f_tensor2(const RVec2& k);

/// Families 0..N of pairwise-disjoint direction sets (exactly checked).
std::vector<DirectionSet> build_direction_sets(int N);
std::vector<Direction2Set> build_direction_sets2(int N);

/// 1 - max |<k, k'>| over cross pairs, computed exactly, then rounded down.
double direction_separation(const DirectionSet& a, const DirectionSet& b);
double direction_separation2(const Direction2Set& a, const Direction2Set& b);

/// Certified admissible radius: every coefficient square stays strictly
/// positive on the closed ball.  An exact affine-form bound fixes the
/// radius; a dense boundary sample re-checks it; a safety factor of 1/2 is
/// applied.  The radius is shared by every rotated family because the
/// Frobenius norm is rotation-invariant.
EpsilonBall certified_epsilon();
EpsilonBall certified_epsilon2();

/// Sum constants (chosen once; every decomposition reproduces them).
Rational coefficient_sum();    // 3-D
Rational coefficient_sum2();   // 2-D

/// Decompose a symmetric traceless R with ||R||_F <= epsilon into
/// sum_i squares[i] * f(k_i) = R.  Throws std::domain_error outside the
/// certified ball and std::invalid_argument for non-symmetric-traceless R.
CoefficientSolution decompose_stress(const Mat3& R, const DirectionSet& set);
Coefficient2Solution decompose_stress2(const Mat2& R, const Direction2Set& set);

/// Exact-rational version of the same solve (reconstruction is an identity).
std::array<Rational, 9> decompose_stress_exact(const RMat3& R,
                                               const DirectionSet& set);
std::array<Rational, 4> decompose_stress_exact2(const RMat2& R,
                                                const Direction2Set& set);

}  // namespace ealab
