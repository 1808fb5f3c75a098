#pragma once
#include "ealab/grid.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace ealab {

using cdouble = std::complex<double>;

/// Periodic field of rank 0 (scalar), 1 (vector), or 2 (tensor) on a Grid.
///
/// Storage is component-outermost; within a component, samples are row-major
/// over grid indices (last axis fastest).  A rank-2 component c encodes the
/// tensor entry T^{ij} with c = i*dim + j.
///
/// Both a physical view (samples at grid points) and a spectral view
/// (Fourier coefficients f(x) = sum_k fhat_k e^{i k.x}) are available;
/// whichever is missing is materialized on demand and cached.  Fields are
/// immutable after construction, so the two views always agree.
class SpectralField {
public:
  static SpectralField zero(const Grid& grid, int rank);
  static SpectralField from_physical(const Grid& grid, int rank,
                                     std::vector<double> data);
  static SpectralField from_spectral(const Grid& grid, int rank,
                                     std::vector<cdouble> data);

  /// Sample a callable f(x, comp) at grid points. x has grid.dim() entries.
  static SpectralField sample(
      const Grid& grid, int rank,
      const std::function<double(const std::array<double, 3>&, int)>& f);

  const Grid& grid() const { return grid_; }
  int rank() const { return rank_; }
  int ncomp() const { return ncomp_; }

  const std::vector<double>& phys() const;
  const std::vector<cdouble>& spec() const;

  double phys_at(std::size_t point, int comp) const {
    return phys()[static_cast<std::size_t>(comp) * grid_.points() + point];
  }
  cdouble spec_at(std::size_t mode, int comp) const {
    return spec()[static_cast<std::size_t>(comp) * grid_.points() + mode];
  }

  bool has_phys() const { return phys_ != nullptr; }
  bool has_spec() const { return spec_ != nullptr; }

  SpectralField operator+(const SpectralField& o) const;
  SpectralField operator-(const SpectralField& o) const;
  SpectralField operator*(double s) const;

  /// Apply a scalar Fourier multiplier m(k) to every component.
  SpectralField multiplier(
      const std::function<cdouble(const std::array<int, 3>&)>& m) const;

private:
  SpectralField(const Grid& grid, int rank);

  Grid grid_;
  int rank_ = 0;
  int ncomp_ = 1;
  mutable std::shared_ptr<const std::vector<double>> phys_;
  mutable std::shared_ptr<const std::vector<cdouble>> spec_;
};

inline SpectralField operator*(double s, const SpectralField& f) { return f * s; }

// ---- grid geometry helpers --------------------------------------------------

/// Coordinates of grid point `idx` (row-major flattened index).
std::array<double, 3> grid_point(const Grid& grid, std::size_t idx);

/// Signed wavenumber vector of spectral mode `idx`.
std::array<int, 3> grid_mode(const Grid& grid, std::size_t idx);

// ---- calculus ---------------------------------------------------------------

/// d/dx_axis, computed spectrally (Nyquist modes of that axis are zeroed,
/// as an odd-order derivative has no faithful Nyquist image).
SpectralField derivative(const SpectralField& f, int axis);

/// Gradient raises rank by one; new index first: grad(u)^{i j} = d_i u^j.
SpectralField grad(const SpectralField& f);

/// Divergence contracts the first index: div(T)^l = d_k T^{kl}.
SpectralField div(const SpectralField& f);

SpectralField laplacian(const SpectralField& f);

/// Inverse Laplacian on mean-free data (mode 0 of the result is zero).
SpectralField inv_laplacian(const SpectralField& f);

/// (1 - alpha^2 Laplacian)^{-1}.
SpectralField helmholtz_solve(const SpectralField& f, double alpha);

/// Extract one component as a scalar field.
SpectralField component(const SpectralField& f, int comp);

/// 3-D curl of a vector field.
SpectralField curl3(const SpectralField& u);

/// 2-D scalar curl d_1 u^2 - d_2 u^1.
SpectralField curl2(const SpectralField& u);

/// 2-D perpendicular gradient (-d_2 psi, d_1 psi); divergence-free by design.
SpectralField perp_grad(const SpectralField& psi);

/// Leray projection onto divergence-free fields (mean is preserved).
SpectralField leray_project(const SpectralField& u);

/// Zero all modes with |k_axis| > fraction * (n/2) on any axis.
SpectralField dealias(const SpectralField& f, double fraction = 2.0 / 3.0);

/// Keep only modes with 2^j <= |k| < 2^{j+1} (j >= 0); j = -1 keeps mode 0.
SpectralField shell_project(const SpectralField& f, int j);

/// Subtract the mean of every component.
SpectralField remove_mean(const SpectralField& f);

// ---- pointwise algebra (physical space) -------------------------------------

/// Pointwise product of a scalar field with any field.
SpectralField scalar_multiply(const SpectralField& s, const SpectralField& f);

/// Outer product (u x v)^{kl} = u^k v^l of two vector fields.
SpectralField outer(const SpectralField& u, const SpectralField& v);

/// Pointwise dot product of two vector fields.
SpectralField dot(const SpectralField& u, const SpectralField& v);

/// (A B^T)^{kl} = A^{kj} B^{lj} for rank-2 fields.
SpectralField matmul_abt(const SpectralField& a, const SpectralField& b);

/// Contraction (u . grad) applied to each component of f.
SpectralField advect(const SpectralField& u, const SpectralField& f);

/// 3-D pointwise cross product.
SpectralField cross3(const SpectralField& a, const SpectralField& b);

/// 2-D rotation by +90 degrees: (u^1,u^2) -> (-u^2, u^1).
SpectralField perp(const SpectralField& u);

SpectralField transpose(const SpectralField& t);
SpectralField symmetrize(const SpectralField& t);

/// Trace of a rank-2 field (scalar).
SpectralField trace(const SpectralField& t);

/// T - (tr T / dim) Id.
SpectralField deviatoric(const SpectralField& t);

// ---- reductions -------------------------------------------------------------

double mean(const SpectralField& f, int comp);
double integral(const SpectralField& f, int comp);

/// L2 norm over all components, exact via Parseval.
double l2_norm(const SpectralField& f);

/// L2 inner product sum_c \int a_c b_c, exact via Parseval.
double l2_inner(const SpectralField& a, const SpectralField& b);

/// L^p norm of the pointwise Frobenius magnitude (trapezoidal quadrature,
/// exact on band-limited integrands resolved by the grid).
double lp_norm(const SpectralField& f, double p);

/// Max over grid points of the pointwise Frobenius magnitude.
double c0_norm(const SpectralField& f);

/// Besov B^{s}_{3,inf} seminorm: sup_j 2^{js} ||shell_j f||_{L^3}.
double besov_norm(const SpectralField& f, double s);

/// Max |fhat_k| over modes with |k| > fraction * (n/2) on some axis;
/// a resolution health check for spectral tails.
double tail_magnitude(const SpectralField& f, double fraction = 2.0 / 3.0);

/// Max deviation from Hermitian symmetry fhat(-k) = conj(fhat(k)).
double hermitian_error(const SpectralField& f);

// ---- deterministic random fields --------------------------------------------

/// Band-limited (|k| <= kmax), mean-free Gaussian random field normalized
/// to unit L2 norm; deterministic across platforms for a given seed.
SpectralField random_field(const Grid& grid, int rank, int kmax,
                           std::uint64_t seed);

/// Divergence-free, mean-free, band-limited random vector field.
SpectralField random_divfree(const Grid& grid, int kmax, std::uint64_t seed);

}  // namespace ealab
