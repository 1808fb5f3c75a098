#pragma once
#include "ealab/field.hpp"
#include "ealab/transport.hpp"

#include <array>

namespace ealab {

/// Traceless symmetric stress with Div(stress) = v - mean(v), assembled mode
/// by mode in Fourier space (2-D and 3-D).  Modes with any index at the
/// folding frequency are annihilated, matching the derivative operators.
SpectralField fourier_inverse_div(const SpectralField& v);

/// Output of one differentiate-by-parts inverse-divergence pass:
/// G^i rho∘Phi = div(stress)^i + grad(pressure)^i + error^i pointwise.
struct DivInverseOutput {
  SpectralField stress;    ///< rank 2, symmetric, traceless
  SpectralField pressure;  ///< scalar
  SpectralField error;     ///< rank 1 remainder (one derivative moved onto G)
  std::array<double, 3> mean{};  ///< mean of G rho∘Phi (= mean of error)
};

/// One inverse-divergence pass for a slow vector amplitude G multiplying a
/// concentrated scalar rho composed with a volume-preserving map.
///
/// Requires rho and theta zero-mean with laplacian(theta) = rho (1e-8
/// relative), and |grad Phi - Id| <= 1/2 on the support of G.  The output
/// satisfies stress + pressure * Id = the symmetrized pre-subtraction tensor
/// exactly, and the remainder carries the derivative moved off the fast
/// factor: error^i = sum_l F^{il} (d_l theta)∘Phi with F one derivative of
/// slow data.
DivInverseOutput iterative_div_step(const SpectralField& G,
                                    const SpectralField& rho,
                                    const SpectralField& theta,
                                    const FlowMap& flow);

struct FullDivParams {
  int d = 1;          ///< differentiate-by-parts passes before Fourier cleanup
  double zeta = 1;    ///< concentration gain: rho = zeta^{-2d} laplacian^d theta
  double Lambda = 1;  ///< derivative cost of the slow factor G
  double mu = 1;      ///< fast-factor periodicity (cells per torus side)
};

struct FullDivResult {
  SpectralField stress;    ///< rank 2, symmetric, traceless
  SpectralField pressure;  ///< scalar
  std::array<double, 3> mean{};  ///< mean of G rho∘Phi
  double stress_l1 = 0;    ///< L1 norm of the output stress
  double pressure_l1 = 0;  ///< L1 norm of the output pressure
  double c_g = 0;          ///< measured slow cost: max_N Lambda^-N |D^N G|_L1
  double c_star = 0;       ///< measured fast-factor mass |rho|_L1
  double bound_ratio = 0;  ///< stress_l1 / (c_g Lambda^4 c_star / zeta)
};

/// Iterated inverse divergence: d differentiate-by-parts passes followed by a
/// Fourier cleanup of the remainder, so that
///   G rho∘Phi = div(stress) + grad(pressure) + mean.
///
/// Requires rho = zeta^{-2d} laplacian^d theta (1e-8 relative), theta periodic
/// to the cell (T/mu)^n when mu > 1, and the derivative-exchange condition
/// (Lambda/zeta)^d Lambda^4 <= 1/zeta; violations throw before any work.
FullDivResult full_inverse_div(const SpectralField& G, const SpectralField& rho,
                               const SpectralField& theta, const FlowMap& flow,
                               const FullDivParams& params);

}  // namespace ealab
