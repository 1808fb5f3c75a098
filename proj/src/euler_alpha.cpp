#include "ealab/euler_alpha.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ealab {

namespace {

void require_divfree(const SpectralField& u, const char* who) {
  const double div_norm = l2_norm(div(u));
  if (div_norm > 1e-8 * (1.0 + l2_norm(u))) {
    std::ostringstream msg;
    msg << who << ": field is not divergence-free (|div| = " << div_norm
        << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

void AlphaModel::validate() const {
  if (!(alpha > 0.0))
    throw std::invalid_argument("AlphaModel: alpha must be positive");
}

SpectralField momentum(const SpectralField& u, const AlphaModel& model) {
  model.validate();
  return u - model.alpha * model.alpha * laplacian(u);
}

SpectralField velocity_of(const SpectralField& v, const AlphaModel& model) {
  model.validate();
  return helmholtz_solve(v, model.alpha);
}

SpectralField alpha_flux(const SpectralField& ua, const SpectralField& ub,
                         const AlphaModel& model) {
  model.validate();
  if (ua.rank() != 1 || ub.rank() != 1)
    throw std::invalid_argument("alpha_flux: vector fields required");
  const double a2 = model.alpha * model.alpha;
  return outer(ua, momentum(ub, model)) -
         a2 * matmul_abt(grad(ua), grad(ub));
}

double hamiltonian(const SpectralField& u, const AlphaModel& model) {
  model.validate();
  const double l2 = l2_norm(u);
  const double g2 = l2_norm(grad(u));
  return l2 * l2 + model.alpha * model.alpha * g2 * g2;
}

SpectralField relaxed_pressure(const SpectralField& u, const SpectralField& R,
                               const AlphaModel& model) {
  return relaxed_pressure(u, model) + inv_laplacian(div(div(R)));
}

SpectralField relaxed_pressure(const SpectralField& u,
                               const AlphaModel& model) {
  return inv_laplacian(div(div(alpha_flux(u, u, model)))) * -1.0;
}

SpectralField relaxed_residual(const SpectralField& u, const SpectralField& p,
                               const SpectralField& R,
                               const SpectralField& du_dt,
                               const AlphaModel& model) {
  return relaxed_residual(u, p, du_dt, model) - div(R);
}

SpectralField relaxed_residual(const SpectralField& u, const SpectralField& p,
                               const SpectralField& du_dt,
                               const AlphaModel& model) {
  model.validate();
  require_divfree(u, "relaxed_residual");
  return momentum(du_dt, model) + div(alpha_flux(u, u, model)) + grad(p);
}

double weak_pairing(const SpectralField& u, const SpectralField& phi,
                    const AlphaModel& model, WeakForm form) {
  model.validate();
  require_divfree(phi, "weak_pairing");
  const double a2 = model.alpha * model.alpha;
  const SpectralField gphi = grad(phi);
  const SpectralField gu = grad(u);
  if (form == WeakForm::transport) {
    return l2_inner(gphi, outer(u, momentum(u, model))) -
           a2 * l2_inner(gphi, matmul_abt(gu, gu));
  }
  const SpectralField gut = transpose(gu);
  return l2_inner(gphi, outer(u, u)) - a2 * l2_inner(gphi, matmul_abt(gu, gu)) +
         a2 * l2_inner(gphi, matmul_abt(gut, gut)) +
         a2 * l2_inner(advect(u, gphi), gu);
}

SpectralField smooth_rhs(const SpectralField& u, const AlphaModel& model,
                         double dealias_fraction) {
  const SpectralField force =
      leray_project(dealias(div(alpha_flux(u, u, model)), dealias_fraction));
  return helmholtz_solve(force, model.alpha) * -1.0;
}

double Trajectory::hamiltonian_drift() const {
  double drift = 0.0;
  for (double h : hamiltonians)
    drift = std::max(drift, std::abs(h - hamiltonians.front()));
  return drift;
}

Trajectory evolve_smooth(const SpectralField& u0, const AlphaModel& model,
                         double dt, double t_final, double dealias_fraction,
                         std::size_t max_snapshots) {
  model.validate();
  if (!(dt > 0.0) || !(t_final > 0.0))
    throw std::invalid_argument("evolve_smooth: dt and t_final must be > 0");
  if (u0.rank() != 1)
    throw std::invalid_argument("evolve_smooth: vector initial state needed");
  require_divfree(u0, "evolve_smooth");

  const std::size_t steps =
      static_cast<std::size_t>(std::llround(t_final / dt));
  if (steps == 0) throw std::invalid_argument("evolve_smooth: no steps");
  max_snapshots = std::max<std::size_t>(2, max_snapshots);
  const std::size_t stride =
      std::max<std::size_t>(1, (steps + max_snapshots - 2) /
                                   (max_snapshots - 1));

  Trajectory traj;
  SpectralField u = dealias(u0, dealias_fraction);
  const auto record = [&](double t, const SpectralField& state) {
    traj.times.push_back(t);
    traj.states.push_back(state);
    traj.hamiltonians.push_back(hamiltonian(state, model));
  };
  record(0.0, u);

  const double band_guard = 0.75 * dealias_fraction;
  for (std::size_t s = 0; s < steps; ++s) {
    const SpectralField k1 = smooth_rhs(u, model, dealias_fraction);
    const SpectralField k2 =
        smooth_rhs(u + (0.5 * dt) * k1, model, dealias_fraction);
    const SpectralField k3 =
        smooth_rhs(u + (0.5 * dt) * k2, model, dealias_fraction);
    const SpectralField k4 = smooth_rhs(u + dt * k3, model, dealias_fraction);
    u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (s % 16 == 15 || s + 1 == steps) {
      const double edge = tail_magnitude(u, band_guard);
      if (edge > 1e-2 * (1.0 + c0_norm(u))) {
        std::ostringstream msg;
        msg << "evolve_smooth: spectral tail blow-up at t = " << (s + 1) * dt
            << " (band-edge magnitude " << edge << "); refine the grid";
        throw std::runtime_error(msg.str());
      }
    }
    if ((s + 1) % stride == 0 || s + 1 == steps)
      record((s + 1) * dt, u);
  }
  return traj;
}

}  // namespace ealab
