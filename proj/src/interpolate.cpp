#include "ealab/interpolate.hpp"

#include "ealab/fft.hpp"
#include "ealab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace ealab {

namespace {

// Zero-pad one component's spectrum from an n-grid to an m-grid (m = rf*n)
// and return the refined physical samples.  The source Nyquist mode -n/2 of
// each axis maps strictly inside the target band, so it is split evenly
// between +n/2 and -n/2 to keep the refined samples real and the
// interpolation exact on band-limited real fields.
std::vector<double> refine_component(const Grid& src, const Grid& dst,
                                     const cdouble* spec) {
  const int dim = src.dim();
  const int n = src.n();
  const int m = dst.n();
  std::vector<cdouble> padded(dst.points(), cdouble(0.0, 0.0));

  const std::size_t src_points = src.points();
  for (std::size_t idx = 0; idx < src_points; ++idx) {
    cdouble v = spec[idx];
    if (v == cdouble(0.0, 0.0)) continue;

    // Decode signed wavenumbers of the source mode.
    std::array<int, 3> k{0, 0, 0};
    std::size_t rem = idx;
    for (int a = dim - 1; a >= 0; --a) {
      int i = static_cast<int>(rem % static_cast<std::size_t>(n));
      rem /= static_cast<std::size_t>(n);
      k[a] = (i <= n / 2) ? i : i - n;
    }

    // Each axis at the Nyquist frequency contributes two half-weight
    // targets (+-n/2); others a single target.
    std::array<std::array<int, 2>, 3> targets{};
    std::array<int, 3> tcount{1, 1, 1};
    double weight = 1.0;
    for (int a = 0; a < dim; ++a) {
      if (k[a] == -n / 2) {
        targets[a] = {n / 2, -n / 2};
        tcount[a] = 2;
        weight *= 0.5;
      } else {
        targets[a] = {k[a], 0};
      }
    }

    for (int t0 = 0; t0 < tcount[0]; ++t0)
      for (int t1 = 0; t1 < (dim > 1 ? tcount[1] : 1); ++t1)
        for (int t2 = 0; t2 < (dim > 2 ? tcount[2] : 1); ++t2) {
          std::array<int, 3> kk{targets[0][t0], dim > 1 ? targets[1][t1] : 0,
                                dim > 2 ? targets[2][t2] : 0};
          std::size_t didx = 0;
          for (int a = 0; a < dim; ++a) {
            int i = kk[a] >= 0 ? kk[a] : kk[a] + m;
            didx = didx * static_cast<std::size_t>(m) +
                   static_cast<std::size_t>(i);
          }
          padded[didx] += weight * v;
        }
  }
  return fft::inverse_real(dst, padded.data());
}

}  // namespace

FieldInterpolator::FieldInterpolator(const SpectralField& f,
                                     std::size_t refine, std::size_t degree) {
  dim_ = f.grid().dim();
  ncomp_ = f.ncomp();
  if (refine == 0) refine = (dim_ == 2) ? 4 : 2;
  if (degree == 0) degree = (dim_ == 2) ? 9 : 11;
  if (degree % 2 == 0) throw std::invalid_argument("degree must be odd");
  if (degree > 15) throw std::invalid_argument("degree capped at 15");
  degree_ = degree;

  const Grid& src = f.grid();
  m_ = static_cast<std::size_t>(src.n()) * refine;
  if (m_ < degree_ + 1)
    throw std::invalid_argument("refined grid smaller than the stencil");
  Grid dst(dim_, static_cast<int>(m_));
  inv_h_ = static_cast<double>(m_) / kTwoPi;

  samples_.reserve(static_cast<std::size_t>(ncomp_));
  const auto& spec = f.spec();
  for (int c = 0; c < ncomp_; ++c)
    samples_.push_back(
        refine_component(src, dst, spec.data() + static_cast<std::size_t>(c) *
                                                     src.points()));
}

// Equispaced-node Lagrange weights for one axis.  The stencil is the
// degree+1 refined nodes centred on the query's cell; theta is the query
// offset from the first stencil node in units of the refined spacing.
void FieldInterpolator::axis_weights(double x, int* base, double* w) const {
  double t = x * inv_h_;
  double fl = std::floor(t);
  const int half = static_cast<int>(degree_ - 1) / 2;
  int first = static_cast<int>(fl) - half;
  double theta = t - static_cast<double>(first);
  const int np = static_cast<int>(degree_) + 1;

  // w_a = prod_{b != a} (theta - b) / (a - b)
  for (int a = 0; a < np; ++a) {
    double num = 1.0, den = 1.0;
    for (int b = 0; b < np; ++b) {
      if (b == a) continue;
      num *= theta - static_cast<double>(b);
      den *= static_cast<double>(a - b);
    }
    w[a] = num / den;
  }
  // Wrap the first stencil node into [0, m).
  const int mm = static_cast<int>(m_);
  first %= mm;
  if (first < 0) first += mm;
  *base = first;
}

double FieldInterpolator::scalar_at(const std::array<double, 3>& x,
                                    int comp) const {
  constexpr int kMaxNodes = 16;
  const int np = static_cast<int>(degree_) + 1;
  int base[3] = {0, 0, 0};
  double w[3][kMaxNodes];
  for (int a = 0; a < dim_; ++a) axis_weights(x[static_cast<std::size_t>(a)], &base[a], w[a]);

  const std::vector<double>& s = samples_[static_cast<std::size_t>(comp)];
  const int mm = static_cast<int>(m_);
  double acc = 0.0;
  if (dim_ == 2) {
    for (int a = 0; a < np; ++a) {
      const int ia = (base[0] + a) % mm;
      const double* row = s.data() + static_cast<std::size_t>(ia) * m_;
      double rowacc = 0.0;
      if (base[1] + np <= mm) {
        const double* p = row + base[1];
        for (int b = 0; b < np; ++b) rowacc += w[1][b] * p[b];
      } else {
        for (int b = 0; b < np; ++b)
          rowacc += w[1][b] * row[static_cast<std::size_t>((base[1] + b) % mm)];
      }
      acc += w[0][a] * rowacc;
    }
  } else {
    for (int a = 0; a < np; ++a) {
      const int ia = (base[0] + a) % mm;
      double slabacc = 0.0;
      for (int b = 0; b < np; ++b) {
        const int ib = (base[1] + b) % mm;
        const double* row = s.data() + (static_cast<std::size_t>(ia) * m_ +
                                        static_cast<std::size_t>(ib)) *
                                           m_;
        double rowacc = 0.0;
        if (base[2] + np <= mm) {
          const double* p = row + base[2];
          for (int c = 0; c < np; ++c) rowacc += w[2][c] * p[c];
        } else {
          for (int c = 0; c < np; ++c)
            rowacc +=
                w[2][c] * row[static_cast<std::size_t>((base[2] + c) % mm)];
        }
        slabacc += w[1][b] * rowacc;
      }
      acc += w[0][a] * slabacc;
    }
  }
  return acc;
}

std::array<double, 3> FieldInterpolator::vector_at(
    const std::array<double, 3>& x) const {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int c = 0; c < ncomp_ && c < 3; ++c)
    out[static_cast<std::size_t>(c)] = scalar_at(x, c);
  return out;
}

}  // namespace ealab
