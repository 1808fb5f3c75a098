#include "ealab/field.hpp"

#include "ealab/fft.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ealab {

// ---- Grid -------------------------------------------------------------------

Grid::Grid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("Grid: dim must be 2 or 3");
  if (n < 8 || (n & (n - 1)) != 0)
    throw std::invalid_argument("Grid: n must be a power of two >= 8");
  points_ = 1;
  volume_ = 1.0;
  cell_volume_ = 1.0;
  for (int a = 0; a < dim; ++a) {
    points_ *= static_cast<std::size_t>(n);
    volume_ *= kTwoPi;
    cell_volume_ *= kTwoPi / n;
  }
}

std::array<double, 3> grid_point(const Grid& grid, std::size_t idx) {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const double h = grid.spacing();
  for (int a = grid.dim() - 1; a >= 0; --a) {
    x[a] = h * static_cast<double>(idx % grid.n());
    idx /= grid.n();
  }
  return x;
}

std::array<int, 3> grid_mode(const Grid& grid, std::size_t idx) {
  std::array<int, 3> k{0, 0, 0};
  for (int a = grid.dim() - 1; a >= 0; --a) {
    k[a] = grid.wavenumber(static_cast<int>(idx % grid.n()));
    idx /= grid.n();
  }
  return k;
}

// ---- SpectralField ----------------------------------------------------------

namespace {
int ncomp_for(const Grid& grid, int rank) {
  if (rank < 0 || rank > 2) throw std::invalid_argument("field: rank must be 0..2");
  int c = 1;
  for (int r = 0; r < rank; ++r) c *= grid.dim();
  return c;
}
}  // namespace

SpectralField::SpectralField(const Grid& grid, int rank)
    : grid_(grid), rank_(rank), ncomp_(ncomp_for(grid, rank)) {}

SpectralField SpectralField::zero(const Grid& grid, int rank) {
  SpectralField f(grid, rank);
  f.phys_ = std::make_shared<const std::vector<double>>(
      static_cast<std::size_t>(f.ncomp_) * grid.points(), 0.0);
  f.spec_ = std::make_shared<const std::vector<cdouble>>(
      static_cast<std::size_t>(f.ncomp_) * grid.points(), cdouble{0.0, 0.0});
  return f;
}

SpectralField SpectralField::from_physical(const Grid& grid, int rank,
                                           std::vector<double> data) {
  SpectralField f(grid, rank);
  if (data.size() != static_cast<std::size_t>(f.ncomp_) * grid.points())
    throw std::invalid_argument("field: physical data size mismatch");
  f.phys_ = std::make_shared<const std::vector<double>>(std::move(data));
  return f;
}

SpectralField SpectralField::from_spectral(const Grid& grid, int rank,
                                           std::vector<cdouble> data) {
  SpectralField f(grid, rank);
  if (data.size() != static_cast<std::size_t>(f.ncomp_) * grid.points())
    throw std::invalid_argument("field: spectral data size mismatch");
  f.spec_ = std::make_shared<const std::vector<cdouble>>(std::move(data));
  return f;
}

SpectralField SpectralField::sample(
    const Grid& grid, int rank,
    const std::function<double(const std::array<double, 3>&, int)>& f) {
  SpectralField out(grid, rank);
  std::vector<double> data(static_cast<std::size_t>(out.ncomp_) * grid.points());
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto x = grid_point(grid, p);
    for (int c = 0; c < out.ncomp_; ++c)
      data[static_cast<std::size_t>(c) * grid.points() + p] = f(x, c);
  }
  out.phys_ = std::make_shared<const std::vector<double>>(std::move(data));
  return out;
}

const std::vector<double>& SpectralField::phys() const {
  if (!phys_) {
    std::vector<double> data(static_cast<std::size_t>(ncomp_) * grid_.points());
    for (int c = 0; c < ncomp_; ++c) {
      auto slice = fft::inverse_real(
          grid_, spec_->data() + static_cast<std::size_t>(c) * grid_.points());
      std::copy(slice.begin(), slice.end(),
                data.begin() + static_cast<std::size_t>(c) * grid_.points());
    }
    phys_ = std::make_shared<const std::vector<double>>(std::move(data));
  }
  return *phys_;
}

const std::vector<cdouble>& SpectralField::spec() const {
  if (!spec_) {
    std::vector<cdouble> data(static_cast<std::size_t>(ncomp_) * grid_.points());
    for (int c = 0; c < ncomp_; ++c) {
      auto slice = fft::forward_real(
          grid_, phys_->data() + static_cast<std::size_t>(c) * grid_.points());
      std::copy(slice.begin(), slice.end(),
                data.begin() + static_cast<std::size_t>(c) * grid_.points());
    }
    spec_ = std::make_shared<const std::vector<cdouble>>(std::move(data));
  }
  return *spec_;
}

namespace {
void require_same_shape(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid()) || a.rank() != b.rank())
    throw std::invalid_argument("field: shape mismatch");
}
}  // namespace

SpectralField SpectralField::operator+(const SpectralField& o) const {
  require_same_shape(*this, o);
  if (has_spec() && o.has_spec()) {
    std::vector<cdouble> data(spec());
    const auto& od = o.spec();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += od[i];
    return from_spectral(grid_, rank_, std::move(data));
  }
  std::vector<double> data(phys());
  const auto& od = o.phys();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += od[i];
  return from_physical(grid_, rank_, std::move(data));
}

SpectralField SpectralField::operator-(const SpectralField& o) const {
  require_same_shape(*this, o);
  if (has_spec() && o.has_spec()) {
    std::vector<cdouble> data(spec());
    const auto& od = o.spec();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= od[i];
    return from_spectral(grid_, rank_, std::move(data));
  }
  std::vector<double> data(phys());
  const auto& od = o.phys();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] -= od[i];
  return from_physical(grid_, rank_, std::move(data));
}

SpectralField SpectralField::operator*(double s) const {
  if (has_spec()) {
    std::vector<cdouble> data(spec());
    for (auto& v : data) v *= s;
    return from_spectral(grid_, rank_, std::move(data));
  }
  std::vector<double> data(phys());
  for (auto& v : data) v *= s;
  return from_physical(grid_, rank_, std::move(data));
}

SpectralField SpectralField::multiplier(
    const std::function<cdouble(const std::array<int, 3>&)>& m) const {
  const auto& s = spec();
  std::vector<cdouble> data(s.size());
  const std::size_t np = grid_.points();
  for (std::size_t p = 0; p < np; ++p) {
    const cdouble mk = m(grid_mode(grid_, p));
    for (int c = 0; c < ncomp_; ++c)
      data[static_cast<std::size_t>(c) * np + p] =
          s[static_cast<std::size_t>(c) * np + p] * mk;
  }
  return from_spectral(grid_, rank_, data);
}

// ---- calculus ---------------------------------------------------------------

SpectralField derivative(const SpectralField& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim())
    throw std::invalid_argument("derivative: bad axis");
  const int nyq = f.grid().n() / 2;
  return f.multiplier([axis, nyq](const std::array<int, 3>& k) {
    if (k[axis] == nyq) return cdouble{0.0, 0.0};
    return cdouble{0.0, static_cast<double>(k[axis])};
  });
}

SpectralField grad(const SpectralField& f) {
  if (f.rank() > 1) throw std::invalid_argument("grad: rank must be 0 or 1");
  const Grid& g = f.grid();
  const int dim = g.dim();
  const std::size_t np = g.points();
  std::vector<cdouble> data(static_cast<std::size_t>(dim) * f.ncomp() * np);
  for (int i = 0; i < dim; ++i) {
    const SpectralField di = derivative(f, i);
    const auto& ds = di.spec();
    // new index first: component (i, j) of the result is d_i f^j
    for (int j = 0; j < f.ncomp(); ++j) {
      const std::size_t dst = (static_cast<std::size_t>(i) * f.ncomp() + j) * np;
      const std::size_t src = static_cast<std::size_t>(j) * np;
      std::copy(ds.begin() + src, ds.begin() + src + np, data.begin() + dst);
    }
  }
  return SpectralField::from_spectral(g, f.rank() + 1, std::move(data));
}

SpectralField div(const SpectralField& f) {
  if (f.rank() < 1) throw std::invalid_argument("div: rank must be 1 or 2");
  const Grid& g = f.grid();
  const int dim = g.dim();
  const std::size_t np = g.points();
  const int out_ncomp = f.ncomp() / dim;
  std::vector<cdouble> data(static_cast<std::size_t>(out_ncomp) * np,
                            cdouble{0.0, 0.0});
  const int nyq = g.n() / 2;
  const auto& s = f.spec();
  for (std::size_t p = 0; p < np; ++p) {
    const auto k = grid_mode(g, p);
    for (int i = 0; i < dim; ++i) {
      if (k[i] == nyq) continue;
      const cdouble ik{0.0, static_cast<double>(k[i])};
      for (int l = 0; l < out_ncomp; ++l)
        data[static_cast<std::size_t>(l) * np + p] +=
            ik * s[(static_cast<std::size_t>(i) * out_ncomp + l) * np + p];
    }
  }
  return SpectralField::from_spectral(g, f.rank() - 1, std::move(data));
}

SpectralField laplacian(const SpectralField& f) {
  return f.multiplier([](const std::array<int, 3>& k) {
    const double k2 = static_cast<double>(k[0]) * k[0] +
                      static_cast<double>(k[1]) * k[1] +
                      static_cast<double>(k[2]) * k[2];
    return cdouble{-k2, 0.0};
  });
}

SpectralField inv_laplacian(const SpectralField& f) {
  return f.multiplier([](const std::array<int, 3>& k) {
    const double k2 = static_cast<double>(k[0]) * k[0] +
                      static_cast<double>(k[1]) * k[1] +
                      static_cast<double>(k[2]) * k[2];
    if (k2 == 0.0) return cdouble{0.0, 0.0};
    return cdouble{-1.0 / k2, 0.0};
  });
}

SpectralField helmholtz_solve(const SpectralField& f, double alpha) {
  const double a2 = alpha * alpha;
  return f.multiplier([a2](const std::array<int, 3>& k) {
    const double k2 = static_cast<double>(k[0]) * k[0] +
                      static_cast<double>(k[1]) * k[1] +
                      static_cast<double>(k[2]) * k[2];
    return cdouble{1.0 / (1.0 + a2 * k2), 0.0};
  });
}

SpectralField curl3(const SpectralField& u) {
  if (u.grid().dim() != 3 || u.rank() != 1)
    throw std::invalid_argument("curl3: needs a 3-D vector field");
  const Grid& g = u.grid();
  const std::size_t np = g.points();
  const int nyq = g.n() / 2;
  const auto& s = u.spec();
  std::vector<cdouble> data(3 * np);
  for (std::size_t p = 0; p < np; ++p) {
    auto km = grid_mode(g, p);
    cdouble ik[3];
    for (int a = 0; a < 3; ++a)
      ik[a] = km[a] == nyq ? cdouble{0.0, 0.0}
                           : cdouble{0.0, static_cast<double>(km[a])};
    const cdouble u0 = s[0 * np + p], u1 = s[1 * np + p], u2 = s[2 * np + p];
    data[0 * np + p] = ik[1] * u2 - ik[2] * u1;
    data[1 * np + p] = ik[2] * u0 - ik[0] * u2;
    data[2 * np + p] = ik[0] * u1 - ik[1] * u0;
  }
  return SpectralField::from_spectral(g, 1, std::move(data));
}

SpectralField component(const SpectralField& f, int comp) {
  if (comp < 0 || comp >= f.ncomp())
    throw std::invalid_argument("component: index out of range");
  const std::size_t np = f.grid().points();
  if (f.has_spec()) {
    const auto& s = f.spec();
    std::vector<cdouble> data(s.begin() + static_cast<std::size_t>(comp) * np,
                              s.begin() + static_cast<std::size_t>(comp + 1) * np);
    return SpectralField::from_spectral(f.grid(), 0, std::move(data));
  }
  const auto& ph = f.phys();
  std::vector<double> data(ph.begin() + static_cast<std::size_t>(comp) * np,
                           ph.begin() + static_cast<std::size_t>(comp + 1) * np);
  return SpectralField::from_physical(f.grid(), 0, std::move(data));
}

SpectralField curl2(const SpectralField& u) {
  if (u.grid().dim() != 2 || u.rank() != 1)
    throw std::invalid_argument("curl2: needs a 2-D vector field");
  return derivative(component(u, 1), 0) - derivative(component(u, 0), 1);
}

SpectralField perp_grad(const SpectralField& psi) {
  if (psi.grid().dim() != 2 || psi.rank() != 0)
    throw std::invalid_argument("perp_grad: needs a 2-D scalar field");
  const Grid& g = psi.grid();
  const std::size_t np = g.points();
  const SpectralField d0 = derivative(psi, 0);
  const SpectralField d1 = derivative(psi, 1);
  std::vector<cdouble> data(2 * np);
  const auto& s1 = d1.spec();
  const auto& s0 = d0.spec();
  for (std::size_t p = 0; p < np; ++p) {
    data[0 * np + p] = -s1[p];
    data[1 * np + p] = s0[p];
  }
  return SpectralField::from_spectral(g, 1, std::move(data));
}

SpectralField leray_project(const SpectralField& u) {
  if (u.rank() != 1) throw std::invalid_argument("leray: needs a vector field");
  const Grid& g = u.grid();
  const int dim = g.dim();
  const std::size_t np = g.points();
  const auto& s = u.spec();
  std::vector<cdouble> data(static_cast<std::size_t>(dim) * np);
  for (std::size_t p = 0; p < np; ++p) {
    const auto km = grid_mode(g, p);
    double k2 = 0.0;
    for (int a = 0; a < dim; ++a) k2 += static_cast<double>(km[a]) * km[a];
    if (k2 == 0.0) {
      for (int a = 0; a < dim; ++a)
        data[static_cast<std::size_t>(a) * np + p] =
            s[static_cast<std::size_t>(a) * np + p];
      continue;
    }
    cdouble kdotu{0.0, 0.0};
    for (int a = 0; a < dim; ++a)
      kdotu += static_cast<double>(km[a]) * s[static_cast<std::size_t>(a) * np + p];
    for (int a = 0; a < dim; ++a)
      data[static_cast<std::size_t>(a) * np + p] =
          s[static_cast<std::size_t>(a) * np + p] -
          (static_cast<double>(km[a]) / k2) * kdotu;
  }
  return SpectralField::from_spectral(g, 1, std::move(data));
}

SpectralField dealias(const SpectralField& f, double fraction) {
  const double cutoff = fraction * (f.grid().n() / 2);
  return f.multiplier([cutoff](const std::array<int, 3>& k) {
    for (int a = 0; a < 3; ++a)
      if (std::abs(k[a]) > cutoff) return cdouble{0.0, 0.0};
    return cdouble{1.0, 0.0};
  });
}

SpectralField shell_project(const SpectralField& f, int j) {
  return f.multiplier([j](const std::array<int, 3>& k) {
    const double k2 = static_cast<double>(k[0]) * k[0] +
                      static_cast<double>(k[1]) * k[1] +
                      static_cast<double>(k[2]) * k[2];
    if (j < 0) return k2 == 0.0 ? cdouble{1.0, 0.0} : cdouble{0.0, 0.0};
    const double lo = std::pow(4.0, j), hi = 4.0 * lo;
    return (k2 >= lo && k2 < hi) ? cdouble{1.0, 0.0} : cdouble{0.0, 0.0};
  });
}

SpectralField remove_mean(const SpectralField& f) {
  return f.multiplier([](const std::array<int, 3>& k) {
    return (k[0] == 0 && k[1] == 0 && k[2] == 0) ? cdouble{0.0, 0.0}
                                                 : cdouble{1.0, 0.0};
  });
}

// ---- pointwise algebra -------------------------------------------------------

SpectralField scalar_multiply(const SpectralField& s, const SpectralField& f) {
  if (s.rank() != 0 || !(s.grid() == f.grid()))
    throw std::invalid_argument("scalar_multiply: shape mismatch");
  const std::size_t np = f.grid().points();
  const auto& sp = s.phys();
  std::vector<double> data(f.phys());
  for (int c = 0; c < f.ncomp(); ++c)
    for (std::size_t p = 0; p < np; ++p)
      data[static_cast<std::size_t>(c) * np + p] *= sp[p];
  return SpectralField::from_physical(f.grid(), f.rank(), std::move(data));
}

SpectralField outer(const SpectralField& u, const SpectralField& v) {
  if (u.rank() != 1 || v.rank() != 1 || !(u.grid() == v.grid()))
    throw std::invalid_argument("outer: needs two vector fields on one grid");
  const Grid& g = u.grid();
  const int dim = g.dim();
  const std::size_t np = g.points();
  const auto& up = u.phys();
  const auto& vp = v.phys();
  std::vector<double> data(static_cast<std::size_t>(dim) * dim * np);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (std::size_t p = 0; p < np; ++p)
        data[(static_cast<std::size_t>(i) * dim + j) * np + p] =
            up[static_cast<std::size_t>(i) * np + p] *
            vp[static_cast<std::size_t>(j) * np + p];
  return SpectralField::from_physical(g, 2, std::move(data));
}

SpectralField dot(const SpectralField& u, const SpectralField& v) {
  if (u.rank() != 1 || v.rank() != 1 || !(u.grid() == v.grid()))
    throw std::invalid_argument("dot: needs two vector fields on one grid");
  const Grid& g = u.grid();
  const std::size_t np = g.points();
  const auto& up = u.phys();
  const auto& vp = v.phys();
  std::vector<double> data(np, 0.0);
  for (int a = 0; a < g.dim(); ++a)
    for (std::size_t p = 0; p < np; ++p)
      data[p] += up[static_cast<std::size_t>(a) * np + p] *
                 vp[static_cast<std::size_t>(a) * np + p];
  return SpectralField::from_physical(g, 0, std::move(data));
}

SpectralField matmul_abt(const SpectralField& a, const SpectralField& b) {
  if (a.rank() != 2 || b.rank() != 2 || !(a.grid() == b.grid()))
    throw std::invalid_argument("matmul_abt: needs two rank-2 fields");
  const Grid& g = a.grid();
  const int dim = g.dim();
  const std::size_t np = g.points();
  const auto& ap = a.phys();
  const auto& bp = b.phys();
  std::vector<double> data(static_cast<std::size_t>(dim) * dim * np, 0.0);
  for (int k = 0; k < dim; ++k)
    for (int l = 0; l < dim; ++l)
      for (int j = 0; j < dim; ++j) {
        const double* pa = ap.data() + (static_cast<std::size_t>(k) * dim + j) * np;
        const double* pb = bp.data() + (static_cast<std::size_t>(l) * dim + j) * np;
        double* pd = data.data() + (static_cast<std::size_t>(k) * dim + l) * np;
        for (std::size_t p = 0; p < np; ++p) pd[p] += pa[p] * pb[p];
      }
  return SpectralField::from_physical(g, 2, std::move(data));
}

SpectralField advect(const SpectralField& u, const SpectralField& f) {
  if (u.rank() != 1 || !(u.grid() == f.grid()))
    throw std::invalid_argument("advect: velocity must be a vector field");
  const Grid& g = f.grid();
  const std::size_t np = g.points();
  const auto& up = u.phys();
  std::vector<double> data(static_cast<std::size_t>(f.ncomp()) * np, 0.0);
  for (int a = 0; a < g.dim(); ++a) {
    const SpectralField df = derivative(f, a);
    const auto& dp = df.phys();
    for (int c = 0; c < f.ncomp(); ++c)
      for (std::size_t p = 0; p < np; ++p)
        data[static_cast<std::size_t>(c) * np + p] +=
            up[static_cast<std::size_t>(a) * np + p] *
            dp[static_cast<std::size_t>(c) * np + p];
  }
  return SpectralField::from_physical(g, f.rank(), std::move(data));
}

SpectralField cross3(const SpectralField& a, const SpectralField& b) {
  if (a.grid().dim() != 3 || a.rank() != 1 || b.rank() != 1)
    throw std::invalid_argument("cross3: needs 3-D vector fields");
  const Grid& g = a.grid();
  const std::size_t np = g.points();
  const auto& ap = a.phys();
  const auto& bp = b.phys();
  std::vector<double> data(3 * np);
  for (std::size_t p = 0; p < np; ++p) {
    const double a0 = ap[0 * np + p], a1 = ap[1 * np + p], a2 = ap[2 * np + p];
    const double b0 = bp[0 * np + p], b1 = bp[1 * np + p], b2 = bp[2 * np + p];
    data[0 * np + p] = a1 * b2 - a2 * b1;
    data[1 * np + p] = a2 * b0 - a0 * b2;
    data[2 * np + p] = a0 * b1 - a1 * b0;
  }
  return SpectralField::from_physical(g, 1, std::move(data));
}

SpectralField perp(const SpectralField& u) {
  if (u.grid().dim() != 2 || u.rank() != 1)
    throw std::invalid_argument("perp: needs a 2-D vector field");
  const Grid& g = u.grid();
  const std::size_t np = g.points();
  const auto& up = u.phys();
  std::vector<double> data(2 * np);
  for (std::size_t p = 0; p < np; ++p) {
    data[0 * np + p] = -up[1 * np + p];
    data[1 * np + p] = up[0 * np + p];
  }
  return SpectralField::from_physical(g, 1, std::move(data));
}

SpectralField transpose(const SpectralField& t) {
  if (t.rank() != 2) throw std::invalid_argument("transpose: needs rank 2");
  const Grid& g = t.grid();
  const int dim = g.dim();
  const std::size_t np = g.points();
  const auto& tp = t.phys();
  std::vector<double> data(tp.size());
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const std::size_t src = (static_cast<std::size_t>(i) * dim + j) * np;
      const std::size_t dst = (static_cast<std::size_t>(j) * dim + i) * np;
      std::copy(tp.begin() + src, tp.begin() + src + np, data.begin() + dst);
    }
  return SpectralField::from_physical(g, 2, std::move(data));
}

SpectralField symmetrize(const SpectralField& t) {
  return (t + transpose(t)) * 0.5;
}

SpectralField trace(const SpectralField& t) {
  if (t.rank() != 2) throw std::invalid_argument("trace: needs rank 2");
  const Grid& g = t.grid();
  const int dim = g.dim();
  const std::size_t np = g.points();
  const auto& tp = t.phys();
  std::vector<double> data(np, 0.0);
  for (int i = 0; i < dim; ++i) {
    const double* src = tp.data() + (static_cast<std::size_t>(i) * dim + i) * np;
    for (std::size_t p = 0; p < np; ++p) data[p] += src[p];
  }
  return SpectralField::from_physical(g, 0, std::move(data));
}

SpectralField deviatoric(const SpectralField& t) {
  const Grid& g = t.grid();
  const int dim = g.dim();
  const std::size_t np = g.points();
  const SpectralField tr = trace(t);
  const auto& trp = tr.phys();
  std::vector<double> data(t.phys());
  for (int i = 0; i < dim; ++i) {
    double* dst = data.data() + (static_cast<std::size_t>(i) * dim + i) * np;
    for (std::size_t p = 0; p < np; ++p) dst[p] -= trp[p] / dim;
  }
  return SpectralField::from_physical(g, 2, std::move(data));
}

// ---- reductions -------------------------------------------------------------

double mean(const SpectralField& f, int comp) {
  return f.spec_at(0, comp).real();
}

double integral(const SpectralField& f, int comp) {
  return mean(f, comp) * f.grid().volume();
}

double l2_norm(const SpectralField& f) {
  const auto& s = f.spec();
  double sum = 0.0;
  for (const auto& v : s) sum += std::norm(v);
  return std::sqrt(sum * f.grid().volume());
}

double l2_inner(const SpectralField& a, const SpectralField& b) {
  require_same_shape(a, b);
  const auto& sa = a.spec();
  const auto& sb = b.spec();
  double sum = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i)
    sum += (std::conj(sa[i]) * sb[i]).real();
  return sum * a.grid().volume();
}

double lp_norm(const SpectralField& f, double p) {
  const auto& fp = f.phys();
  const std::size_t np = f.grid().points();
  double sum = 0.0;
  for (std::size_t pt = 0; pt < np; ++pt) {
    double mag2 = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) {
      const double v = fp[static_cast<std::size_t>(c) * np + pt];
      mag2 += v * v;
    }
    sum += std::pow(mag2, p / 2.0);
  }
  return std::pow(sum * f.grid().cell_volume(), 1.0 / p);
}

double c0_norm(const SpectralField& f) {
  const auto& fp = f.phys();
  const std::size_t np = f.grid().points();
  double best = 0.0;
  for (std::size_t pt = 0; pt < np; ++pt) {
    double mag2 = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) {
      const double v = fp[static_cast<std::size_t>(c) * np + pt];
      mag2 += v * v;
    }
    best = std::max(best, mag2);
  }
  return std::sqrt(best);
}

double besov_norm(const SpectralField& f, double s) {
  int jmax = 0;
  while ((2 << jmax) <= f.grid().n() / 2) ++jmax;
  double best = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    const double nj = lp_norm(shell_project(f, j), 3.0);
    best = std::max(best, std::pow(2.0, j * s) * nj);
  }
  return best;
}

double tail_magnitude(const SpectralField& f, double fraction) {
  const auto& sp = f.spec();
  const std::size_t np = f.grid().points();
  const double cutoff = fraction * (f.grid().n() / 2);
  double best = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    const auto k = grid_mode(f.grid(), p);
    bool tail = false;
    for (int a = 0; a < 3; ++a)
      if (std::abs(k[a]) > cutoff) tail = true;
    if (!tail) continue;
    for (int c = 0; c < f.ncomp(); ++c)
      best = std::max(best, std::abs(sp[static_cast<std::size_t>(c) * np + p]));
  }
  return best;
}

double hermitian_error(const SpectralField& f) {
  const auto& sp = f.spec();
  const Grid& g = f.grid();
  const std::size_t np = g.points();
  const int n = g.n();
  double best = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    // index of the mirrored mode -k
    std::size_t q = 0;
    std::size_t rest = p;
    std::size_t stride = np;
    for (int a = 0; a < g.dim(); ++a) {
      stride /= n;
      const std::size_t ia = rest / stride;
      rest %= stride;
      q += ((n - ia) % n) * stride;
    }
    for (int c = 0; c < f.ncomp(); ++c) {
      const std::size_t off = static_cast<std::size_t>(c) * np;
      best = std::max(best, std::abs(sp[off + q] - std::conj(sp[off + p])));
    }
  }
  return best;
}

// ---- deterministic random fields ---------------------------------------------

namespace {
/// Portable Gaussian via Box-Muller on explicit 53-bit uniforms
/// (std::normal_distribution is implementation-defined).
class GaussianSource {
public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    const double u1 = ((rng_() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = ((rng_() >> 11) + 0.5) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

private:
  std::mt19937_64 rng_;
};
}  // namespace

SpectralField random_field(const Grid& grid, int rank, int kmax,
                           std::uint64_t seed) {
  GaussianSource gauss(seed);
  const int nc = ncomp_for(grid, rank);
  std::vector<double> data(static_cast<std::size_t>(nc) * grid.points());
  for (auto& v : data) v = gauss();
  SpectralField f = SpectralField::from_physical(grid, rank, std::move(data));
  f = remove_mean(f.multiplier([kmax](const std::array<int, 3>& k) {
    const double k2 = static_cast<double>(k[0]) * k[0] +
                      static_cast<double>(k[1]) * k[1] +
                      static_cast<double>(k[2]) * k[2];
    return k2 <= static_cast<double>(kmax) * kmax ? cdouble{1.0, 0.0}
                                                  : cdouble{0.0, 0.0};
  }));
  const double norm = l2_norm(f);
  return f * (norm > 0 ? 1.0 / norm : 1.0);
}

SpectralField random_divfree(const Grid& grid, int kmax, std::uint64_t seed) {
  SpectralField f = leray_project(random_field(grid, 1, kmax, seed));
  const double norm = l2_norm(f);
  return f * (norm > 0 ? 1.0 / norm : 1.0);
}

}  // namespace ealab
