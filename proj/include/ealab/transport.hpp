#pragma once
#include "ealab/field.hpp"
#include "ealab/interpolate.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ealab {

// ---- temporal partition of unity ---------------------------------------------

/// Squared partition of unity on the time axis: cutoffs eta_i centred at
/// t_i = i*tau with sum_i eta_i(t)^2 = 1 wherever at least the two
/// neighbouring windows overlap (in particular on the configured support).
/// A cutoff is active only when its window [t_i - tau, t_i + tau] meets the
/// support interval; inactive indices evaluate to exactly zero.
struct TimePartition {
  double tau = 0;
  double support_lo = 0;
  double support_hi = 0;
  int i_min = 0;  // active index range (inclusive)
  int i_max = -1;

  bool active(int i) const { return i >= i_min && i <= i_max; }
  double center(int i) const { return tau * static_cast<double>(i); }

  /// eta_i(t); exactly zero off-window and for inactive i.
  double eta(int i, double t) const;

  /// d^m/dt^m eta_i(t) for m <= 3, via jet arithmetic on the bump quotient.
  double eta_derivative(int i, double t, int m) const;

  /// sum over active i of eta_i(t)^2 (should be 1 on the support).
  double partition_sum(double t) const;
};

TimePartition build_time_partition(double tau, double support_lo,
                                   double support_hi);

// ---- Lagrangian flow maps ------------------------------------------------------

/// Velocity evaluator for characteristic tracing: x and t to a velocity
/// vector (entries beyond the grid dimension are zero).
struct VelocitySampler {
  int dim = 3;
  std::function<std::array<double, 3>(const std::array<double, 3>&, double)>
      eval;
};

/// Sampler for a steady (time-independent) velocity field, backed by a
/// FieldInterpolator on its dealiased samples.
VelocitySampler make_velocity_sampler(const SpectralField& steady);

/// Sampler from a closed-form velocity.
VelocitySampler make_velocity_sampler(
    int dim,
    std::function<std::array<double, 3>(const std::array<double, 3>&, double)>
        eval);

/// Back-to-labels map Phi and forward flow X between an anchor time (where
/// both are the identity) and a query time, stored as periodic displacement
/// fields on a grid: Phi(x) = x + forward_disp(x), X(x) = x + inverse_disp(x),
/// with Phi(X(x)) = x.  Phi solves the transport equation
/// d_t Phi + v . grad Phi = 0, Phi(t_anchor) = x; X solves dX/dt = v(X, t),
/// X(t_anchor) = x.
class FlowMap {
public:
  FlowMap(Grid grid, double t_anchor, double t_query,
          SpectralField forward_disp, SpectralField inverse_disp);

  const Grid& grid() const { return grid_; }
  double t_anchor() const { return t_anchor_; }
  double t_query() const { return t_query_; }
  const SpectralField& forward_displacement() const { return forward_; }
  const SpectralField& inverse_displacement() const { return inverse_; }

  /// Off-grid evaluation (interpolators built lazily and cached).
  std::array<double, 3> phi(const std::array<double, 3>& x) const;
  std::array<double, 3> x_map(const std::array<double, 3>& x) const;

  /// grad Phi = Id + grad(forward_disp), spectral, as a rank-2 field.
  SpectralField grad_phi() const;
  SpectralField grad_x() const;

  static FlowMap identity(const Grid& grid, double t_anchor);

private:
  const FieldInterpolator& phi_interp() const;
  const FieldInterpolator& x_interp() const;

  Grid grid_;
  double t_anchor_ = 0;
  double t_query_ = 0;
  SpectralField forward_;
  SpectralField inverse_;
  mutable std::shared_ptr<const FieldInterpolator> phi_interp_;
  mutable std::shared_ptr<const FieldInterpolator> x_interp_;
};

struct FlowOptions {
  /// Integrator step; <= 0 picks |t_query - t_anchor| / 64.
  double step = 0;
  /// Warn threshold for |t_query - t_anchor| (the deformation regime).
  double window = 0;
};

/// Integrate both characteristic maps with classical fourth-order stepping
/// over every grid point.
FlowMap solve_flow(const VelocitySampler& v, const Grid& grid, double t_anchor,
                   double t_query, const FlowOptions& opts = {});

// ---- deformation diagnostics ---------------------------------------------------

/// Observed deformation of a flow map against the short-time thresholds:
/// grad Phi within ell of the identity, unit Jacobian, exact round trip.
struct DeformationReport {
  double ell = 0;
  double max_grad_phi_dev = 0;   // max |grad Phi - Id|_F over grid
  double max_grad_x_dev = 0;     // max |grad X - Id|_F
  double max_det_dev = 0;        // max |det grad Phi - 1|
  double max_roundtrip = 0;      // max |Phi(X(x)) - x|
  double second_derivative = 0;  // max |grad^2 Phi|_F (reported vs 1/ell)
  bool grad_within_ell = false;
  bool det_ok = false;        // 1 +- 1e-6
  bool roundtrip_ok = false;  // <= 1e-6
  bool pass() const { return grad_within_ell && det_ok && roundtrip_ok; }
  std::string to_text() const;
};

DeformationReport verify_deformation(const FlowMap& flow, double ell);

// ---- intersection measurement --------------------------------------------------

/// Pointwise magnitude evaluator (e.g. |grad^m W| of a transported pipe).
using ScalarSampler = std::function<double(const std::array<double, 3>&)>;

struct IntersectionStats {
  double l1_product = 0;         // integral of |f| |A| |B|
  double support_fraction = 0;   // measure(|A||B| above threshold) / (2 pi)^dim
  double threshold = 0;          // the support cut used
  std::size_t ball_count = 0;    // balls containing support
  double ball_radius = 0;
  double max_ball_volume = 0;    // largest per-ball support volume
  double mean_ball_volume = 0;
  double orphan_fraction = 0;    // support volume outside all balls / total
  double bound_reference = 0;    // r2 * C_f * lambda^(m1+m2) when supplied
  double bound_ratio = 0;        // l1_product / bound_reference
};

/// Streaming scan of the product of two magnitude fields against a weight,
/// with an optional ball census around supplied centers.  resolution is the
/// scan grid per axis (need not be a power of two).
IntersectionStats measure_intersection(
    int dim, const ScalarSampler& a, const ScalarSampler& b,
    const ScalarSampler& weight, std::size_t resolution,
    const std::vector<std::array<double, 3>>& ball_centers = {},
    double ball_radius = 0, double bound_reference = 0);

// ---- L^p decoupling check -------------------------------------------------------

/// Measured form of the slow/fast L^p decoupling inequality
/// |f g|_p <= C el C_f |g|_p for g (T/mu)^n-periodic:
/// C_f = max_{N <= n_dec + 4} lambda^-N || D^N f ||_p, and the parameter gap
/// lambda^(n_dec+4) <= (mu / (2 pi sqrt(3)))^n_dec is reported.
struct DecouplingReport {
  double ratio = 0;  // |f g|_p / (C_f |g|_p)
  double c_f = 0;
  double f_norm = 0;       // |f|_p for reference
  double g_norm = 0;       // |g|_p
  double product_norm = 0; // |f g|_p
  bool gap_ok = false;
  double gap_lhs = 0;  // lambda^(n_dec+4)
  double gap_rhs = 0;  // (mu/(2 pi sqrt 3))^n_dec
  int n_dec = 2;
};

DecouplingReport lp_decoupling_check(const SpectralField& f,
                                     const SpectralField& g, double lambda,
                                     double mu, int p, int n_dec = 2);

}  // namespace ealab
