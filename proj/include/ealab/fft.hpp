#pragma once
#include "ealab/grid.hpp"

#include <complex>
#include <vector>

namespace ealab::fft {

using cdouble = std::complex<double>;

/// In-place forward DFT of one component (physical -> coefficients),
/// normalized so that entry 0 of the result is the mean of the input.
/// Layout is row-major (last axis fastest), matching Grid indexing.
void forward(const Grid& grid, cdouble* data);

/// In-place inverse DFT (coefficients -> physical), unnormalized sum,
/// the exact inverse of forward().
void inverse(const Grid& grid, cdouble* data);

/// Forward transform of real samples into a complex coefficient array.
std::vector<cdouble> forward_real(const Grid& grid, const double* phys);

/// Inverse transform of coefficients into real samples.  The imaginary
/// residue (zero for Hermitian input up to roundoff) is discarded.
std::vector<double> inverse_real(const Grid& grid, const cdouble* spec);

}  // namespace ealab::fft
