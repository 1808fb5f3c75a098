#pragma once

#include <cstddef>
#include <vector>

#include "ealab/field.hpp"

namespace ealab {

/// Filter-scale parameter of the model on the 2*pi-torus.
struct AlphaModel {
  double alpha = 1.0;
  void validate() const;
};

/// Momentum v = (1 - alpha^2 Laplacian) u, applied diagonally in Fourier
/// space. Works on any rank.
SpectralField momentum(const SpectralField& u, const AlphaModel& model);

/// Inverse of momentum: u = (1 - alpha^2 Laplacian)^{-1} v.
SpectralField velocity_of(const SpectralField& v, const AlphaModel& model);

/// Bilinear momentum flux Q(ua, ub)^{kl} = ua^k vb^l
///                                          - alpha^2 d_k ua^j d_l ub^j,
/// where vb is the momentum of ub. The transport form of the model reads
/// d_t v + Div Q(u, u) + grad p = 0 with Div contracting the first index.
SpectralField alpha_flux(const SpectralField& ua, const SpectralField& ub,
                         const AlphaModel& model);

/// Conserved quadratic functional |u|_{L2}^2 + alpha^2 |grad u|_{L2}^2,
/// evaluated exactly via Parseval.
double hamiltonian(const SpectralField& u, const AlphaModel& model);

/// Pressure making the relaxed balance solvable: solves
/// Lap p = div(Div(R) - Div(Q(u,u))), mean-zero. Overload without R treats
/// the stress as zero.
SpectralField relaxed_pressure(const SpectralField& u, const SpectralField& R,
                               const AlphaModel& model);
SpectralField relaxed_pressure(const SpectralField& u, const AlphaModel& model);

/// Residual of the relaxed balance law
///   d_t v + Div Q(u,u) + grad p - Div R
/// with v the momentum of u and d_t v = momentum(du_dt). The overload
/// without R evaluates the unrelaxed equation. Throws std::invalid_argument
/// if u is not divergence-free.
SpectralField relaxed_residual(const SpectralField& u, const SpectralField& p,
                               const SpectralField& R,
                               const SpectralField& du_dt,
                               const AlphaModel& model);
SpectralField relaxed_residual(const SpectralField& u, const SpectralField& p,
                               const SpectralField& du_dt,
                               const AlphaModel& model);

/// Two algebraically equivalent spatial integrands of the weak form of the
/// model against a divergence-free test field phi (nonlinear terms only;
/// the d_t phi terms are common to both forms and are omitted):
///   transport:  int grad(phi) : (u (x) v - alpha^2 grad(u)^T grad(u))
///   duality:    int grad(phi) : (u (x) u - alpha^2 grad(u)^T grad(u)
///                                + alpha^2 grad(u) grad(u)^T)
///               + alpha^2 int (u . grad) grad(phi) : grad(u)
/// The duality form never differentiates u twice, so it extends to H^1
/// fields; for smooth inputs the two agree. Throws std::invalid_argument if
/// phi is not divergence-free.
enum class WeakForm { transport, duality };
double weak_pairing(const SpectralField& u, const SpectralField& phi,
                    const AlphaModel& model,
                    WeakForm form = WeakForm::transport);

/// Right-hand side of the smooth evolution du/dt =
/// -(1 - alpha^2 Lap)^{-1} P Div Q(u, u), with the nonlinear term dealiased
/// to |k_axis| <= fraction * n/2 and P the Leray projection.
SpectralField smooth_rhs(const SpectralField& u, const AlphaModel& model,
                         double dealias_fraction = 2.0 / 3.0);

/// Time-sampled solution of the smooth model equations.
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::vector<double> hamiltonians;

  std::size_t size() const { return times.size(); }
  const SpectralField& final_state() const { return states.back(); }
  double hamiltonian_drift() const;  // max_t |H(t) - H(0)|
};

/// Classical fourth-order Runge-Kutta pseudo-spectral integration of the
/// transport form with Leray projection and 2/3-rule dealiasing of the
/// nonlinearity. The initial state is dealiased once on entry; snapshots
/// are thinned so at most max_snapshots states (always including the first
/// and last) are stored. Aborts with std::runtime_error when spectral mass
/// piles up at the edge of the retained band (resolution blow-up guard).
Trajectory evolve_smooth(const SpectralField& u0, const AlphaModel& model,
                         double dt, double t_final,
                         double dealias_fraction = 2.0 / 3.0,
                         std::size_t max_snapshots = 129);

}  // namespace ealab
