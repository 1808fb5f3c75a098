#pragma once
#include "ealab/field.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace ealab {

/// Off-grid evaluation of a SpectralField.
///
/// The spectrum is zero-padded by an integer refinement factor and inverse
/// transformed once; point queries are then answered by tensor-product
/// Lagrange interpolation of odd degree on the refined samples.  For fields
/// band-limited well inside the original grid (the situation everywhere in
/// this code base: velocities live in the dealiased 2/3 band), the refined
/// samples are exact and the only error is the Lagrange remainder
/// ((k h/2)^{degree+1} / (degree+1)!), around 1e-13 with the defaults.
///
/// Defaults (refine, degree): 2-D (4, 9); 3-D (2, 11).
class FieldInterpolator {
public:
  explicit FieldInterpolator(const SpectralField& f, std::size_t refine = 0,
                             std::size_t degree = 0);

  int dim() const { return dim_; }
  int ncomp() const { return ncomp_; }
  std::size_t refined_n() const { return m_; }
  std::size_t degree() const { return degree_; }

  /// Value of component `comp` at x (periodic; entries beyond dim ignored).
  double scalar_at(const std::array<double, 3>& x, int comp = 0) const;

  /// All components at x; entries beyond ncomp() are zero.
  std::array<double, 3> vector_at(const std::array<double, 3>& x) const;

private:
  void axis_weights(double x, int* base, double* w) const;

  int dim_ = 0;
  int ncomp_ = 0;
  std::size_t m_ = 0;       // refined points per axis
  std::size_t degree_ = 0;  // Lagrange degree (odd)
  double inv_h_ = 0;        // m / (2 pi)
  std::vector<std::vector<double>> samples_;  // per component, refined grid
};

}  // namespace ealab
