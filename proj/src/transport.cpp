#include "ealab/transport.hpp"

#include "ealab/jet.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>

namespace ealab {

namespace {

double bump_value(double x) {
  if (std::abs(x) >= 1.0 - 1e-9) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x));
}

void wrap_minus_pi_pi(double* d) {
  while (*d > kTwoPi / 2) *d -= kTwoPi;
  while (*d < -kTwoPi / 2) *d += kTwoPi;
}

}  // namespace

// ---- TimePartition -------------------------------------------------------------

double TimePartition::eta(int i, double t) const {
  if (!active(i)) return 0.0;
  const double s = (t - center(i)) / tau;
  if (std::abs(s) >= 1.0) return 0.0;
  const double b0 = bump_value(s);
  const double bm = bump_value(s - 1.0);
  const double bp = bump_value(s + 1.0);
  return b0 / std::sqrt(b0 * b0 + bm * bm + bp * bp);
}

double TimePartition::eta_derivative(int i, double t, int m) const {
  if (m < 0 || m > 3) throw std::invalid_argument("eta_derivative: m <= 3");
  if (m == 0) return eta(i, t);
  if (!active(i)) return 0.0;
  const double s = (t - center(i)) / tau;
  if (std::abs(s) >= 1.0) return 0.0;

  const std::size_t order = static_cast<std::size_t>(m);
  Jet b0 = bump_jet(s, order);
  if (b0.is_zero()) return 0.0;
  Jet bm = bump_jet(s - 1.0, order);
  Jet bp = bump_jet(s + 1.0, order);
  Jet denom = (b0 * b0 + bm * bm + bp * bp).square_root();
  Jet q = b0 * denom.reciprocal();
  return q.derivative_value(order) * std::pow(tau, -static_cast<double>(m));
}

double TimePartition::partition_sum(double t) const {
  double acc = 0.0;
  for (int i = i_min; i <= i_max; ++i) {
    const double e = eta(i, t);
    acc += e * e;
  }
  return acc;
}

TimePartition build_time_partition(double tau, double support_lo,
                                   double support_hi) {
  if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
  if (!(support_hi >= support_lo))
    throw std::invalid_argument("empty support interval");
  TimePartition part;
  part.tau = tau;
  part.support_lo = support_lo;
  part.support_hi = support_hi;
  // Active iff [i tau - tau, i tau + tau] meets [lo, hi].
  part.i_min = static_cast<int>(std::ceil(support_lo / tau - 1.0 - 1e-9));
  part.i_max = static_cast<int>(std::floor(support_hi / tau + 1.0 + 1e-9));
  return part;
}

// ---- velocity samplers ----------------------------------------------------------

VelocitySampler make_velocity_sampler(const SpectralField& steady) {
  if (steady.rank() != 1)
    throw std::invalid_argument("velocity sampler needs a rank-1 field");
  auto interp = std::make_shared<FieldInterpolator>(steady);
  VelocitySampler s;
  s.dim = steady.grid().dim();
  s.eval = [interp](const std::array<double, 3>& x, double) {
    return interp->vector_at(x);
  };
  return s;
}

VelocitySampler make_velocity_sampler(
    int dim,
    std::function<std::array<double, 3>(const std::array<double, 3>&, double)>
        eval) {
  VelocitySampler s;
  s.dim = dim;
  s.eval = std::move(eval);
  return s;
}

// ---- FlowMap --------------------------------------------------------------------

FlowMap::FlowMap(Grid grid, double t_anchor, double t_query,
                 SpectralField forward_disp, SpectralField inverse_disp)
    : grid_(grid),
      t_anchor_(t_anchor),
      t_query_(t_query),
      forward_(std::move(forward_disp)),
      inverse_(std::move(inverse_disp)) {}

FlowMap FlowMap::identity(const Grid& grid, double t_anchor) {
  return FlowMap(grid, t_anchor, t_anchor, SpectralField::zero(grid, 1),
                 SpectralField::zero(grid, 1));
}

const FieldInterpolator& FlowMap::phi_interp() const {
  if (!phi_interp_)
    phi_interp_ = std::make_shared<FieldInterpolator>(forward_);
  return *phi_interp_;
}

const FieldInterpolator& FlowMap::x_interp() const {
  if (!x_interp_) x_interp_ = std::make_shared<FieldInterpolator>(inverse_);
  return *x_interp_;
}

std::array<double, 3> FlowMap::phi(const std::array<double, 3>& x) const {
  std::array<double, 3> d = phi_interp().vector_at(x);
  for (int a = 0; a < grid_.dim(); ++a)
    d[static_cast<std::size_t>(a)] += x[static_cast<std::size_t>(a)];
  return d;
}

std::array<double, 3> FlowMap::x_map(const std::array<double, 3>& x) const {
  std::array<double, 3> d = x_interp().vector_at(x);
  for (int a = 0; a < grid_.dim(); ++a)
    d[static_cast<std::size_t>(a)] += x[static_cast<std::size_t>(a)];
  return d;
}

namespace {

SpectralField add_identity(const SpectralField& t) {
  const Grid& g = t.grid();
  const int dim = g.dim();
  std::vector<double> data = t.phys();
  const std::size_t pts = g.points();
  for (int i = 0; i < dim; ++i) {
    double* comp = data.data() + static_cast<std::size_t>(i * dim + i) * pts;
    for (std::size_t p = 0; p < pts; ++p) comp[p] += 1.0;
  }
  return SpectralField::from_physical(g, 2, std::move(data));
}

}  // namespace

SpectralField FlowMap::grad_phi() const { return add_identity(grad(forward_)); }
SpectralField FlowMap::grad_x() const { return add_identity(grad(inverse_)); }

// ---- solve_flow -----------------------------------------------------------------

namespace {

/// March every grid point from t0 to t1 with classical fourth-order steps;
/// returns the displacement samples (component-outermost layout).
std::vector<double> integrate_characteristics(const VelocitySampler& v,
                                              const Grid& grid, double t0,
                                              double t1, double step) {
  const int dim = grid.dim();
  const std::size_t pts = grid.points();
  const double dt_total = t1 - t0;
  std::vector<std::array<double, 3>> y(pts);
  for (std::size_t i = 0; i < pts; ++i) y[i] = grid_point(grid, i);

  if (dt_total != 0.0) {
    const int steps =
        std::max(1, static_cast<int>(std::ceil(std::abs(dt_total) / step)));
    const double h = dt_total / steps;
    for (int s = 0; s < steps; ++s) {
      const double t = t0 + h * s;
      for (std::size_t i = 0; i < pts; ++i) {
        const std::array<double, 3>& p = y[i];
        std::array<double, 3> k1 = v.eval(p, t);
        std::array<double, 3> q{p[0] + 0.5 * h * k1[0],
                                p[1] + 0.5 * h * k1[1],
                                p[2] + 0.5 * h * k1[2]};
        std::array<double, 3> k2 = v.eval(q, t + 0.5 * h);
        q = {p[0] + 0.5 * h * k2[0], p[1] + 0.5 * h * k2[1],
             p[2] + 0.5 * h * k2[2]};
        std::array<double, 3> k3 = v.eval(q, t + 0.5 * h);
        q = {p[0] + h * k3[0], p[1] + h * k3[1], p[2] + h * k3[2]};
        std::array<double, 3> k4 = v.eval(q, t + h);
        for (int a = 0; a < 3; ++a)
          y[i][static_cast<std::size_t>(a)] +=
              (h / 6.0) * (k1[static_cast<std::size_t>(a)] +
                           2.0 * k2[static_cast<std::size_t>(a)] +
                           2.0 * k3[static_cast<std::size_t>(a)] +
                           k4[static_cast<std::size_t>(a)]);
      }
    }
  }

  std::vector<double> disp(static_cast<std::size_t>(dim) * pts, 0.0);
  for (std::size_t i = 0; i < pts; ++i) {
    const std::array<double, 3> x0 = grid_point(grid, i);
    for (int a = 0; a < dim; ++a)
      disp[static_cast<std::size_t>(a) * pts + i] =
          y[i][static_cast<std::size_t>(a)] - x0[static_cast<std::size_t>(a)];
  }
  return disp;
}

}  // namespace

FlowMap solve_flow(const VelocitySampler& v, const Grid& grid, double t_anchor,
                   double t_query, const FlowOptions& opts) {
  if (v.dim != grid.dim())
    throw std::invalid_argument("sampler/grid dimension mismatch");
  const double dt = t_query - t_anchor;
  if (opts.window > 0 && std::abs(dt) > opts.window * (1.0 + 1e-12))
    throw std::invalid_argument(
        "flow query outside the configured deformation window");
  double step = opts.step;
  if (step <= 0) step = std::max(std::abs(dt) / 64.0, 1e-12);

  // Forward flow X: from the anchor to the query time.
  std::vector<double> fwd =
      integrate_characteristics(v, grid, t_anchor, t_query, step);
  // Back-to-labels Phi: trace characteristics from the query time back to
  // the anchor; the arrival point is the label.
  std::vector<double> bwd =
      integrate_characteristics(v, grid, t_query, t_anchor, step);

  return FlowMap(grid, t_anchor, t_query,
                 SpectralField::from_physical(grid, 1, std::move(bwd)),
                 SpectralField::from_physical(grid, 1, std::move(fwd)));
}

// ---- verify_deformation -----------------------------------------------------------

namespace {

double det_at(const std::vector<double>& g, std::size_t pts, int dim,
              std::size_t p) {
  auto e = [&](int i, int j) {
    return g[static_cast<std::size_t>(i * dim + j) * pts + p];
  };
  if (dim == 2) return e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0);
  return e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) -
         e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
         e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
}

double frobenius_dev_from_identity(const std::vector<double>& g,
                                   std::size_t pts, int dim, std::size_t p) {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double v = g[static_cast<std::size_t>(i * dim + j) * pts + p] -
                 (i == j ? 1.0 : 0.0);
      acc += v * v;
    }
  return std::sqrt(acc);
}

}  // namespace

DeformationReport verify_deformation(const FlowMap& flow, double ell) {
  const Grid& grid = flow.grid();
  const int dim = grid.dim();
  const std::size_t pts = grid.points();

  DeformationReport rep;
  rep.ell = ell;

  const SpectralField grad_phi_field = flow.grad_phi();
  const SpectralField grad_x_field = flow.grad_x();
  const std::vector<double>& gphi = grad_phi_field.phys();
  const std::vector<double>& gx = grad_x_field.phys();
  for (std::size_t p = 0; p < pts; ++p) {
    rep.max_grad_phi_dev = std::max(
        rep.max_grad_phi_dev, frobenius_dev_from_identity(gphi, pts, dim, p));
    rep.max_grad_x_dev = std::max(rep.max_grad_x_dev,
                                  frobenius_dev_from_identity(gx, pts, dim, p));
    rep.max_det_dev =
        std::max(rep.max_det_dev, std::abs(det_at(gphi, pts, dim, p) - 1.0));
  }

  // Second derivatives component by component (the gradient of a rank-2
  // field is not representable, so assemble the Frobenius square by hand).
  std::vector<double> hess_sq(pts, 0.0);
  for (int j = 0; j < dim; ++j) {
    SpectralField hj = grad(grad(component(flow.forward_displacement(), j)));
    const std::vector<double>& h = hj.phys();
    const std::size_t nc = static_cast<std::size_t>(hj.ncomp());
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t p = 0; p < pts; ++p) {
        const double v = h[c * pts + p];
        hess_sq[p] += v * v;
      }
  }
  for (std::size_t p = 0; p < pts; ++p)
    rep.second_derivative = std::max(rep.second_derivative, std::sqrt(hess_sq[p]));

  // Round trip Phi(X(x)) = x on a subsample of points.
  std::size_t stride = 1;
  while (pts / stride > 32768) stride *= 2;
  for (std::size_t p = 0; p < pts; p += stride) {
    const std::array<double, 3> x = grid_point(grid, p);
    const std::array<double, 3> z = flow.phi(flow.x_map(x));
    double dist_sq = 0.0;
    for (int a = 0; a < dim; ++a) {
      double d = z[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(a)];
      wrap_minus_pi_pi(&d);
      dist_sq += d * d;
    }
    rep.max_roundtrip = std::max(rep.max_roundtrip, std::sqrt(dist_sq));
  }

  rep.grad_within_ell = rep.max_grad_phi_dev <= ell;
  rep.det_ok = rep.max_det_dev <= 1e-6;
  rep.roundtrip_ok = rep.max_roundtrip <= 1e-6;
  return rep;
}

std::string DeformationReport::to_text() const {
  std::ostringstream os;
  os << "deformation report (ell = " << ell << ")\n"
     << "  max |grad Phi - Id|   = " << max_grad_phi_dev
     << (grad_within_ell ? "  PASS" : "  FAIL") << "\n"
     << "  max |grad X - Id|     = " << max_grad_x_dev << "\n"
     << "  max |det grad Phi - 1| = " << max_det_dev
     << (det_ok ? "  PASS" : "  FAIL") << "\n"
     << "  max |Phi(X(x)) - x|   = " << max_roundtrip
     << (roundtrip_ok ? "  PASS" : "  FAIL") << "\n"
     << "  max |grad^2 Phi|      = " << second_derivative << "\n";
  return os.str();
}

// ---- measure_intersection -----------------------------------------------------------

IntersectionStats measure_intersection(
    int dim, const ScalarSampler& a, const ScalarSampler& b,
    const ScalarSampler& weight, std::size_t resolution,
    const std::vector<std::array<double, 3>>& ball_centers, double ball_radius,
    double bound_reference) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (resolution < 8) throw std::invalid_argument("resolution too small");

  const double h = kTwoPi / static_cast<double>(resolution);
  const double cell = std::pow(h, dim);
  const std::size_t nz = (dim == 3) ? resolution : 1;

  // Pass 1: maxima for the support threshold.
  double max_a = 0.0, max_b = 0.0;
  for (std::size_t iz = 0; iz < nz; ++iz)
    for (std::size_t iy = 0; iy < resolution; ++iy)
      for (std::size_t ix = 0; ix < resolution; ++ix) {
        const std::array<double, 3> x{ix * h, iy * h, iz * h};
        max_a = std::max(max_a, std::abs(a(x)));
        max_b = std::max(max_b, std::abs(b(x)));
      }

  IntersectionStats st;
  st.threshold = 0.01;
  st.ball_radius = ball_radius;
  st.bound_reference = bound_reference;
  const double cut_a = 0.01 * max_a;
  const double cut_b = 0.01 * max_b;

  std::vector<double> ball_vol(ball_centers.size(), 0.0);
  double support_vol = 0.0, orphan_vol = 0.0;
  const double r2 = ball_radius * ball_radius;

  for (std::size_t iz = 0; iz < nz; ++iz)
    for (std::size_t iy = 0; iy < resolution; ++iy)
      for (std::size_t ix = 0; ix < resolution; ++ix) {
        const std::array<double, 3> x{ix * h, iy * h, iz * h};
        const double va = std::abs(a(x));
        if (va < cut_a && va == 0.0) continue;
        const double vb = std::abs(b(x));
        st.l1_product += va * vb * std::abs(weight(x)) * cell;
        if (va <= cut_a || vb <= cut_b) continue;
        support_vol += cell;
        if (ball_centers.empty()) continue;
        bool inside = false;
        for (std::size_t c = 0; c < ball_centers.size(); ++c) {
          double dist_sq = 0.0;
          for (int axis = 0; axis < dim; ++axis) {
            double d = x[static_cast<std::size_t>(axis)] -
                       ball_centers[c][static_cast<std::size_t>(axis)];
            wrap_minus_pi_pi(&d);
            dist_sq += d * d;
            if (dist_sq > r2) break;
          }
          if (dist_sq <= r2) {
            ball_vol[c] += cell;
            inside = true;
            break;
          }
        }
        if (!inside) orphan_vol += cell;
      }

  st.support_fraction = support_vol / std::pow(kTwoPi, dim);
  for (double v : ball_vol) {
    if (v > 0.0) {
      ++st.ball_count;
      st.max_ball_volume = std::max(st.max_ball_volume, v);
      st.mean_ball_volume += v;
    }
  }
  if (st.ball_count > 0)
    st.mean_ball_volume /= static_cast<double>(st.ball_count);
  st.orphan_fraction = support_vol > 0 ? orphan_vol / support_vol : 0.0;
  if (bound_reference > 0) st.bound_ratio = st.l1_product / bound_reference;
  return st;
}

// ---- lp_decoupling_check --------------------------------------------------------------

namespace {

/// Accumulate sum over multi-indices |beta| = N of multinomial(beta) *
/// (d^beta f_c)^2 pointwise, over all components of f.
void accumulate_derivative_square(const SpectralField& f, int remaining,
                                  int axis, double multinomial_scale,
                                  std::vector<double>* acc) {
  const int dim = f.grid().dim();
  if (remaining == 0 || axis == dim - 1) {
    SpectralField g = f;
    for (int k = 0; k < remaining; ++k) g = derivative(g, dim - 1);
    // multinomial factor for the final axis is 1 relative to the running
    // scale (all remaining orders go to one axis).
    const std::vector<double>& ph = g.phys();
    const std::size_t pts = g.grid().points();
    const std::size_t nc = static_cast<std::size_t>(g.ncomp());
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t p = 0; p < pts; ++p) {
        const double v = ph[c * pts + p];
        (*acc)[p] += multinomial_scale * v * v;
      }
    return;
  }
  // Choose how many of the remaining derivatives fall on `axis`.
  SpectralField g = f;
  double binom = 1.0;
  int total = remaining;
  for (int k = 0; k <= total; ++k) {
    accumulate_derivative_square(g, remaining - k, axis + 1,
                                 multinomial_scale * binom, acc);
    if (k == total) break;
    g = derivative(g, axis);
    binom = binom * static_cast<double>(remaining - k) /
            static_cast<double>(k + 1);
  }
}

}  // namespace

DecouplingReport lp_decoupling_check(const SpectralField& f,
                                     const SpectralField& g, double lambda,
                                     double mu, int p, int n_dec) {
  if (p != 1 && p != 2)
    throw std::invalid_argument("decoupling check supports p in {1,2}");
  if (f.rank() != 0)
    throw std::invalid_argument("slow factor must be a scalar field");
  if (f.grid() != g.grid())
    throw std::invalid_argument("slow/fast factors need a shared grid");
  if (n_dec < 1) throw std::invalid_argument("n_dec >= 1");

  DecouplingReport rep;
  rep.n_dec = n_dec;
  rep.gap_lhs = std::pow(lambda, n_dec + 4);
  rep.gap_rhs = std::pow(mu / (kTwoPi * std::sqrt(3.0)), n_dec);
  rep.gap_ok = rep.gap_lhs <= rep.gap_rhs;

  const std::size_t pts = f.grid().points();
  rep.c_f = 0.0;
  for (int N = 0; N <= n_dec + 4; ++N) {
    std::vector<double> mag_sq(pts, 0.0);
    accumulate_derivative_square(f, N, 0, 1.0, &mag_sq);
    for (double& v : mag_sq) v = std::sqrt(v);
    SpectralField mag =
        SpectralField::from_physical(f.grid(), 0, std::move(mag_sq));
    const double norm = lp_norm(mag, static_cast<double>(p));
    rep.c_f = std::max(rep.c_f, norm * std::pow(lambda, -N));
  }

  rep.f_norm = lp_norm(f, static_cast<double>(p));
  rep.g_norm = lp_norm(g, static_cast<double>(p));
  rep.product_norm = lp_norm(scalar_multiply(f, g), static_cast<double>(p));
  rep.ratio = rep.product_norm / (rep.c_f * rep.g_norm);
  return rep;
}

}  // namespace ealab
