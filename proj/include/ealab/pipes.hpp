#pragma once
#include "ealab/euler_alpha.hpp"
#include "ealab/field.hpp"
#include "ealab/stress_decomposition.hpp"
#include "ealab/transport.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace ealab {

// ---- radial profile -------------------------------------------------------------

/// Radial bump chain for intermittent pipe flows.
///
/// The top of the chain is the compactly supported polynomial potential
/// H(y) = (1 - 16 y^2)^K for |y| < 1/4.  The flow profile is
/// h = L^d H, where L is the cross-section Laplacian acting on radial
/// functions: in three dimensions the pipe cross-section is a disk and
/// L F = F'' + F'/y; in two dimensions the cross-section is a line and
/// L F = F''.  Differentiating H (rather than integrating h) makes the
/// vanishing weighted mean automatic.  All point evaluations run through
/// truncated Taylor jets in the variable u = y^2, so every derivative used
/// anywhere in the code is exact to roundoff.
struct PipeProfile {
  int d = 1;
  int dim = 3;
  double normalization = 1.0;  // requested |grad rho|_{L2}^2 at unit scale
  int edge_touch = 0;          // vanishing order of h at the support edge

  // Radial quadrature moments of the unit-scale profile.
  double j2 = 0;     // 3-D: int h'(y)^2 y dy ; 2-D: int_R h'(y)^2 dy
  double j_lap = 0;  // 3-D: int h (L h) y dy ; 2-D: int_R h h'' dy
  double h_mean = 0; // 3-D: |int h y dy| ; 2-D: |int_R h dy| (both ~ 0)
  double sup_h = 0;  // max |h|
  double amplitude_unit = 0;  // normalization amplitude (unit |p|, unit r)

  static constexpr double support_radius = 0.25;

  /// Everything the realizations need at radius y >= 0 (unit scale).
  struct Point {
    double h = 0;          // profile value (chain level d)
    double dh = 0;         // h'
    double d2h = 0;        // h''
    double d3h = 0;        // h'''
    double dh_over_y = 0;  // h'/y, finite at y = 0
    double lap_h = 0;      // (L h)(y), chain level d+1
    double dlap_h = 0;     // d/dy (L h)
    double pot = 0;        // chain level d-1 (L pot = h)
    double dpot = 0;       // d/dy pot  (2-D: this is int_0^y h)
    double top = 0;        // H(y), top of the chain
  };
  Point chain_at(double y) const;

  double h(double y) const { return chain_at(y).h; }
  double theta(double y) const { return chain_at(y).top; }

  /// Cumulative pressure integral at unit scale:
  /// 3-D: int_0^y (L h)'(s) h(s) ds ; 2-D: int_0^y h'''(s) h(s) ds.
  double pressure_integral(double y) const;

  std::vector<double> pressure_table;  // uniform nodes on [0, support_radius]
  double pressure_tail = 0;
};

/// d >= 1 (d = 0 would lose the automatic zero mean).
/// `edge_touch` sets the vanishing order of h at the support edge (0 picks a
/// default that balances spectral tail decay against feature width).
PipeProfile build_profile(int d, double normalization, int dim = 3,
                          int edge_touch = 0);

// ---- family and realization --------------------------------------------------------

/// A periodized family of parallel pipes: unit rational direction xi with
/// rational orthonormal cross frame (xi1, xi2), concentration frequency
/// lambda, intermittency r (lambda r must be a positive integer so the
/// field is (T / lambda r)^dim periodic), and chain depth d.  In two
/// dimensions xi1 holds the perpendicular direction and xi2 is unused.
struct PipeFamily {
  int dim = 3;
  int d = 1;
  double lambda = 8;
  double r = 1;
  std::array<double, 3> xi{0, 0, 1};
  std::array<double, 3> xi1{1, 0, 0};
  std::array<double, 3> xi2{0, 1, 0};
  std::array<long, 3> p{0, 0, 1};  // integer direction, xi = p / |p|
  // Exact rational frame: xi1 = q1 / qden, xi2 = q2 / qden.  The factories
  // fill these; the cross-lattice reduction works on the integers so the
  // periodization is exact.
  std::array<long, 3> q1{1, 0, 0};
  std::array<long, 3> q2{0, 1, 0};
  long qden = 1;
  /// Axis anchor in cross coordinates; by default the centre of the
  /// reduced lattice cell, so tubes sit away from the cell corners.
  bool center_offset = true;
  std::array<double, 2> offset{0, 0};
};

/// Family from one direction of a rotated direction set (3-D).
PipeFamily make_pipe_family(const DirectionSet& set, int dir_index,
                            double lambda, double r, int d);
/// Family from one direction of a rotated direction set (2-D).
PipeFamily make_pipe_family2(const Direction2Set& set, int dir_index,
                             double lambda, double r, int d);

/// Analytic point evaluation of one family's fields.  Shared by grid
/// realization, composition with flow maps, and the streaming intersection
/// scans (which never hold whole grids in memory).
class PipeEvaluator {
public:
  PipeEvaluator(const PipeFamily& family,
                std::shared_ptr<const PipeProfile> profile);

  const PipeFamily& family() const { return family_; }
  const PipeProfile& profile() const { return *profile_; }

  double lambda_s() const { return lambda_s_; }     // argument scale
  double tube_radius() const { return tube_radius_; }
  double amplitude() const { return amplitude_; }
  double theta_amplitude() const { return theta_amplitude_; }
  double shortest_lattice_vector() const { return shortest_; }

  /// Signed/unsigned distance data to the nearest axis.
  struct Local {
    double s = 0;                       // distance (2-D: |signed offset|)
    double signed_s = 0;                // 2-D signed offset; 3-D = s
    std::array<double, 2> dir{0, 0};    // cross-plane unit vector to axis
    bool inside = false;                // within the tube support
  };
  Local locate(const std::array<double, 3>& x) const;

  double rho(const std::array<double, 3>& x) const;
  std::array<double, 3> w(const std::array<double, 3>& x) const;
  /// Vector potential with curl u = w (3-D only).
  std::array<double, 3> u(const std::array<double, 3>& x) const;
  /// Stream function with perp-grad psi = w (2-D only).
  double stream(const std::array<double, 3>& x) const;
  double theta(const std::array<double, 3>& x) const;
  double pressure(const std::array<double, 3>& x, double alpha) const;
  /// Frobenius magnitude |grad^m W| for m <= 2.
  double grad_magnitude(const std::array<double, 3>& x, int m) const;

  /// Every field at once (one lattice reduction, one profile chain).
  struct Sample {
    double rho = 0;
    double theta = 0;
    double stream = 0;                 // 2-D only
    std::array<double, 3> w{0, 0, 0};
    std::array<double, 3> u{0, 0, 0};  // 3-D only
  };
  Sample sample_all(const std::array<double, 3>& x) const;

  /// Reduced cross-lattice basis (columns), offset, and per-torus axis
  /// anchor points (one representative point on every distinct axis).
  std::array<std::array<double, 2>, 2> cross_basis() const { return basis_; }
  std::array<double, 2> cross_offset() const { return offset_; }
  std::vector<std::array<double, 3>> axis_points() const;

private:
  PipeFamily family_;
  std::shared_ptr<const PipeProfile> profile_;
  std::array<std::array<double, 2>, 2> basis_{};   // lattice basis vectors
  std::array<std::array<double, 2>, 2> inv_basis_{};
  std::array<double, 2> offset_{};
  double spacing2d_ = 0;  // 2-D line spacing
  double shortest_ = 0;
  double lambda_s_ = 0;
  double tube_radius_ = 0;
  double amplitude_ = 0;
  double theta_amplitude_ = 0;
  double pot_amplitude_ = 0;
};

/// Realized grid fields of one family.
struct PipeFields {
  PipeFamily family;
  std::shared_ptr<const PipeProfile> profile;
  Grid grid;
  SpectralField W;      // rank 1: the pipe flow
  SpectralField U;      // rank 1 vector potential (3-D); rank 0 stream (2-D)
  SpectralField rho;    // rank 0 scalar profile
  SpectralField theta;  // rank 0 potential with rho = lambda^-2d Delta^d theta
  double lambda_s = 0;
  double tube_radius = 0;
  double amplitude = 0;
};

/// Sample every field of the family on the grid.  Requires at least four
/// grid points per concentration wavelength (n >= 4 lambda).
PipeFields realize_pipe(const PipeFamily& family,
                        std::shared_ptr<const PipeProfile> profile,
                        const Grid& grid);

/// Radial stationary pressure of the family on the grid of `fields`:
/// p = rho^2/2 - alpha^2 int (cross-section Laplacian of rho)' rho.
SpectralField pipe_pressure(const PipeFields& fields, const AlphaModel& model);

// ---- stationarity ---------------------------------------------------------------

struct StationarityReport {
  double div_ww_l2 = 0;     // |Div(W (x) W)|_L2 on the grid
  double residual_l2 = 0;   // |curl(W - a^2 Lap W) x W + grad p|_L2
  double reference_l2 = 0;  // |curl v x W|_L2
  double relative() const {
    return reference_l2 > 0 ? residual_l2 / reference_l2 : residual_l2;
  }
  std::string to_text() const;
};

/// Spectral check on the realized grid.
StationarityReport verify_stationarity(const PipeFields& fields,
                                       const AlphaModel& model);

/// Same residual computed on the pipe's 2-D cross-section: the fields of a
/// straight family are invariant along the axis, so the stationary system
/// reduces to grad p = w grad(w - a^2 Lap w) on the cross-section torus
/// R^2 / (cross lattice), discretized at `resolution` points per axis with
/// the (generally skew) lattice cell mapped affinely to the unit torus.
/// The along-axis momentum flux Div(W (x) W) vanishes identically in this
/// representation; the grid check of that term lives in
/// verify_stationarity.
StationarityReport cross_section_stationarity(const PipeFamily& family,
                                              const PipeProfile& profile,
                                              const AlphaModel& model,
                                              int resolution);

// ---- deformed pipes -------------------------------------------------------------

struct DeformedPipeReport {
  SpectralField field;     // curl((grad Phi)^T (U o Phi)) — divergence-free
  double lhs_rhs_rel = 0;  // |(grad Phi)^-1 (W o Phi) - field| / |...|
  double div_l2 = 0;       // |div field|_L2
};

/// Transported pipe flow: both sides of
/// (grad Phi)^-1 (W o Phi) = curl((grad Phi)^T (U o Phi))   (3-D)
/// (grad Phi)^-1 (W o Phi) = perp-grad(psi o Phi)           (2-D)
/// evaluated independently; the curl form is returned.
DeformedPipeReport deformed_pipe(const PipeFields& fields, const FlowMap& flow);

// ---- averages -------------------------------------------------------------------

/// Quadrature of int_T3 W^k d_mm W^l + d_k W^j d_l W^j for the unit-scale,
/// un-concentrated family in direction xi; equals (C/2)(Id - 3 xi xi).
Mat3 pipe_average_tensor(const std::array<double, 3>& xi,
                         const PipeProfile& profile);

/// 2-D analog; equals C (Id - 2 xi xi).
Mat2 pipe_average_tensor2(const std::array<double, 2>& xi,
                          const PipeProfile& profile);

// ---- L^p scaling ----------------------------------------------------------------

struct LpScalingRow {
  double lambda = 0;
  double r = 0;
  int n = 0;       // derivative order
  double p = 0;    // exponent (0 encodes infinity)
  double norm = 0; // |grad^n W|_p by radial quadrature
  double ratio = 0;  // norm / (lambda^n r^{2/p-1}) resp. r^{1/p-1/2} in 2-D
};

std::vector<LpScalingRow> lp_scaling_table(const PipeFamily& prototype,
                                           const PipeProfile& profile,
                                           const std::vector<double>& lambdas,
                                           const std::vector<double>& rs,
                                           int max_n,
                                           const std::vector<double>& ps);

// ---- axis intersections (ball census input) ----------------------------------------

struct AxisIntersections {
  std::vector<std::array<double, 3>> centers;
  double ball_radius = 0;
  double sin_angle = 0;
  double rho12 = 0;  // implied constant: 1 / (ball_radius * lambda * r)
};

/// Closest-approach points of the two straight axis families (3-D);
/// parallel directions are rejected.
AxisIntersections axis_intersections(const PipeEvaluator& a,
                                     const PipeEvaluator& b);

}  // namespace ealab
