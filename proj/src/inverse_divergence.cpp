#include "ealab/inverse_divergence.hpp"

#include "ealab/interpolate.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ealab {

// ---- Fourier-multiplier inverse divergence ---------------------------------------

SpectralField fourier_inverse_div(const SpectralField& v) {
  if (v.rank() != 1)
    throw std::invalid_argument("fourier_inverse_div: rank-1 field required");
  const Grid& g = v.grid();
  const int n = g.dim();
  const std::size_t pts = g.points();
  const int nyq = g.n() / 2;
  const auto& vs = v.spec();
  const cdouble iu{0.0, 1.0};

  std::vector<cdouble> out(static_cast<std::size_t>(n) * n * pts,
                           cdouble{0.0, 0.0});
  for (std::size_t p = 0; p < pts; ++p) {
    const auto km = grid_mode(g, p);
    double k2 = 0.0;
    bool folding = false;
    for (int a = 0; a < n; ++a) {
      if (km[a] == nyq) folding = true;
      k2 += static_cast<double>(km[a]) * static_cast<double>(km[a]);
    }
    if (folding || k2 == 0.0) continue;

    cdouble vh[3] = {};
    cdouble kdotv{0.0, 0.0};
    for (int a = 0; a < n; ++a) {
      vh[a] = vs[static_cast<std::size_t>(a) * pts + p];
      kdotv += static_cast<double>(km[a]) * vh[a];
    }

    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double ki = static_cast<double>(km[i]);
        const double kj = static_cast<double>(km[j]);
        cdouble val;
        if (n == 3) {
          val = iu * (ki * kj * kdotv / (2.0 * k2 * k2) +
                      (i == j ? kdotv / (2.0 * k2) : cdouble{0.0, 0.0}) -
                      ki * vh[j] / k2 - kj * vh[i] / k2);
        } else {
          val = -iu *
                (ki * vh[j] + kj * vh[i] -
                 (i == j ? kdotv : cdouble{0.0, 0.0})) /
                k2;
        }
        out[static_cast<std::size_t>(i * n + j) * pts + p] = val;
        out[static_cast<std::size_t>(j * n + i) * pts + p] = val;
      }
  }
  return SpectralField::from_spectral(g, 2, std::move(out));
}

// ---- differentiate-by-parts pass --------------------------------------------------

namespace {

/// Pointwise data for one pass; branch_g[l] holds the slow amplitudes that
/// multiply (d_l theta)∘Phi in the remainder.
struct StepCore {
  std::vector<double> stress;                 // n*n components
  std::vector<double> pressure;               // scalar
  std::vector<double> error;                  // n components
  std::vector<std::vector<double>> branch_g;  // per axis l: n components
};

void invert_matrix(const double* m, int n, double* inv) {
  if (n == 2) {
    const double det = m[0] * m[3] - m[1] * m[2];
    inv[0] = m[3] / det;
    inv[1] = -m[1] / det;
    inv[2] = -m[2] / det;
    inv[3] = m[0] / det;
    return;
  }
  const double a = m[0], b = m[1], c = m[2];
  const double d = m[3], e = m[4], f = m[5];
  const double g = m[6], h = m[7], i = m[8];
  const double det =
      a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  inv[0] = (e * i - f * h) / det;
  inv[1] = (c * h - b * i) / det;
  inv[2] = (b * f - c * e) / det;
  inv[3] = (f * g - d * i) / det;
  inv[4] = (a * i - c * g) / det;
  inv[5] = (c * d - a * f) / det;
  inv[6] = (d * h - e * g) / det;
  inv[7] = (b * g - a * h) / det;
  inv[8] = (a * e - b * d) / det;
}

StepCore run_pass(const SpectralField& G, const SpectralField& theta,
                  const FlowMap& flow) {
  const Grid& g = G.grid();
  const int n = g.dim();
  const std::size_t pts = g.points();
  const std::size_t un = static_cast<std::size_t>(n);

  const SpectralField m_field = flow.grad_phi();
  const std::vector<double>& M = m_field.phys();  // comp a*n+b = d_a Phi^b
  const std::vector<double>& gvals = G.phys();
  const std::vector<double>& fwd = flow.forward_displacement().phys();

  const SpectralField grad_theta = grad(theta);
  const FieldInterpolator interp(grad_theta);

  const SpectralField grad_g = grad(G);  // comp m*n+i = d_m G^i
  const std::vector<double>& dg = grad_g.phys();

  // Pointwise inverse gradients and compositions K_l = (d_l theta)(Phi(x)).
  std::vector<double> binv(un * un * pts);
  std::vector<double> comp_k(un * pts);
  for (std::size_t p = 0; p < pts; ++p) {
    double mloc[9], bloc[9];
    for (std::size_t c = 0; c < un * un; ++c) mloc[c] = M[c * pts + p];
    invert_matrix(mloc, n, bloc);
    for (std::size_t c = 0; c < un * un; ++c) binv[c * pts + p] = bloc[c];

    std::array<double, 3> x = grid_point(g, p);
    for (int a = 0; a < n; ++a)
      x[static_cast<std::size_t>(a)] +=
          fwd[static_cast<std::size_t>(a) * pts + p];
    const std::array<double, 3> kv = interp.vector_at(x);
    for (int l = 0; l < n; ++l)
      comp_k[static_cast<std::size_t>(l) * pts + p] =
          kv[static_cast<std::size_t>(l)];
  }

  StepCore out;
  out.stress.assign(un * un * pts, 0.0);
  out.pressure.assign(pts, 0.0);
  out.error.assign(un * pts, 0.0);
  out.branch_g.assign(un, std::vector<double>(un * pts, 0.0));

  // Products whose divergence carries the moved derivative: for each (i, p)
  // the vector (over m) G^p C^{im} - G^m C^{ip}, with C = B^T B.
  std::vector<double> cmat(un * un * pts);
  for (std::size_t p = 0; p < pts; ++p)
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
          acc += binv[static_cast<std::size_t>(k * n + i) * pts + p] *
                 binv[static_cast<std::size_t>(k * n + m) * pts + p];
        cmat[static_cast<std::size_t>(i * n + m) * pts + p] = acc;
      }

  // Divergence over m of the moved-derivative products, one field per (i, p).
  std::vector<std::vector<double>> wdiv(
      un * un, std::vector<double>());
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < n; ++q) {
      std::vector<double> vitem(un * pts);
      for (int m = 0; m < n; ++m)
        for (std::size_t p = 0; p < pts; ++p)
          vitem[static_cast<std::size_t>(m) * pts + p] =
              gvals[static_cast<std::size_t>(q) * pts + p] *
                  cmat[static_cast<std::size_t>(i * n + m) * pts + p] -
              gvals[static_cast<std::size_t>(m) * pts + p] *
                  cmat[static_cast<std::size_t>(i * n + q) * pts + p];
      SpectralField vf =
          SpectralField::from_physical(g, 1, std::move(vitem));
      wdiv[static_cast<std::size_t>(i * n + q)] = div(vf).phys();
    }

  for (std::size_t p = 0; p < pts; ++p) {
    double hvec[3] = {}, jvec[3] = {}, gv[3] = {}, kv[3] = {};
    for (int a = 0; a < n; ++a) {
      gv[a] = gvals[static_cast<std::size_t>(a) * pts + p];
      kv[a] = comp_k[static_cast<std::size_t>(a) * pts + p];
    }
    for (int m = 0; m < n; ++m)
      for (int l = 0; l < n; ++l) {
        hvec[m] += binv[static_cast<std::size_t>(l * n + m) * pts + p] * kv[l];
        jvec[m] += M[static_cast<std::size_t>(m * n + l) * pts + p] * kv[l];
      }
    double cdot = 0.0;
    for (int a = 0; a < n; ++a) cdot += gv[a] * jvec[a];

    // Symmetrized tensor, its trace share, and the traceless stress.
    double tr = 0.0;
    for (int a = 0; a < n; ++a)
      tr += 2.0 * gv[a] * hvec[a] -
            cmat[static_cast<std::size_t>(a * n + a) * pts + p] * cdot;
    const double pval = tr / static_cast<double>(n);
    out.pressure[p] = pval;
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m) {
        const double s =
            gv[i] * hvec[m] + gv[m] * hvec[i] -
            cmat[static_cast<std::size_t>(i * n + m) * pts + p] * cdot;
        out.stress[static_cast<std::size_t>(i * n + m) * pts + p] =
            s - (i == m ? pval : 0.0);
      }

    // Remainder amplitudes F^{il} and the assembled remainder field.
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < n; ++l) {
        double f = 0.0;
        for (int q = 0; q < n; ++q)
          f += wdiv[static_cast<std::size_t>(i * n + q)][p] *
               M[static_cast<std::size_t>(q * n + l) * pts + p];
        for (int m = 0; m < n; ++m)
          f -= dg[static_cast<std::size_t>(m * n + i) * pts + p] *
               binv[static_cast<std::size_t>(l * n + m) * pts + p];
        out.branch_g[static_cast<std::size_t>(l)]
                    [static_cast<std::size_t>(i) * pts + p] = f;
        out.error[static_cast<std::size_t>(i) * pts + p] += f * kv[l];
      }
    }
  }
  return out;
}

void require_flow_hypothesis(const SpectralField& G, const FlowMap& flow) {
  const Grid& g = G.grid();
  const int n = g.dim();
  const std::size_t pts = g.points();
  const SpectralField gp = flow.grad_phi();
  const std::vector<double>& M = gp.phys();
  const std::vector<double>& gvals = G.phys();

  double gmax = 0.0;
  for (std::size_t p = 0; p < pts; ++p) {
    double m2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double v = gvals[static_cast<std::size_t>(a) * pts + p];
      m2 += v * v;
    }
    gmax = std::max(gmax, m2);
  }
  const double cut = 1e-24 * gmax;

  for (std::size_t p = 0; p < pts; ++p) {
    double m2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double v = gvals[static_cast<std::size_t>(a) * pts + p];
      m2 += v * v;
    }
    if (m2 <= cut) continue;
    double dev = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double v = M[static_cast<std::size_t>(i * n + j) * pts + p] -
                         (i == j ? 1.0 : 0.0);
        dev += v * v;
      }
    if (std::sqrt(dev) > 0.5 + 1e-12)
      throw std::invalid_argument(
          "iterative_div_step: |grad Phi - Id| exceeds 1/2 on the support of "
          "the slow amplitude");
  }
}

void require_shapes(const SpectralField& G, const SpectralField& rho,
                    const SpectralField& theta, const FlowMap& flow) {
  if (G.rank() != 1)
    throw std::invalid_argument("inverse divergence: G must be rank 1");
  if (rho.rank() != 0 || theta.rank() != 0)
    throw std::invalid_argument(
        "inverse divergence: rho and theta must be scalars");
  if (!(G.grid() == rho.grid()) || !(G.grid() == theta.grid()) ||
      !(G.grid() == flow.grid()))
    throw std::invalid_argument("inverse divergence: grids must match");
}

double rel_l2_diff(const SpectralField& a, const SpectralField& b) {
  const double ref = l2_norm(b);
  if (ref == 0.0) return l2_norm(a);
  return l2_norm(a + b * (-1.0)) / ref;
}

}  // namespace

DivInverseOutput iterative_div_step(const SpectralField& G,
                                    const SpectralField& rho,
                                    const SpectralField& theta,
                                    const FlowMap& flow) {
  require_shapes(G, rho, theta, flow);
  if (std::abs(mean(rho, 0)) > 1e-10 * (1.0 + c0_norm(rho)) ||
      std::abs(mean(theta, 0)) > 1e-10 * (1.0 + c0_norm(theta)))
    throw std::invalid_argument(
        "iterative_div_step: rho and theta must be zero-mean");
  if (rel_l2_diff(laplacian(theta), rho) > 1e-8)
    throw std::invalid_argument(
        "iterative_div_step: laplacian(theta) must equal rho");
  require_flow_hypothesis(G, flow);

  const Grid& g = G.grid();
  StepCore core = run_pass(G, theta, flow);

  DivInverseOutput out{
      SpectralField::from_physical(g, 2, std::move(core.stress)),
      SpectralField::from_physical(g, 0, std::move(core.pressure)),
      SpectralField::from_physical(g, 1, std::move(core.error)),
      {}};
  for (int a = 0; a < g.dim(); ++a)
    out.mean[static_cast<std::size_t>(a)] = mean(out.error, a);
  return out;
}

FullDivResult full_inverse_div(const SpectralField& G, const SpectralField& rho,
                               const SpectralField& theta, const FlowMap& flow,
                               const FullDivParams& params) {
  require_shapes(G, rho, theta, flow);
  if (params.d < 1)
    throw std::invalid_argument("full_inverse_div: d must be >= 1");
  if (params.zeta < 1.0 || params.Lambda < 1.0 || params.mu < 1.0)
    throw std::invalid_argument(
        "full_inverse_div: zeta, Lambda, mu must be >= 1");

  const double gap_lhs =
      std::pow(params.Lambda / params.zeta, params.d) *
      std::pow(params.Lambda, 4);
  if (gap_lhs > (1.0 / params.zeta) * (1.0 + 1e-12))
    throw std::invalid_argument(
        "full_inverse_div: derivative-exchange condition violated: "
        "(Lambda/zeta)^d * Lambda^4 must not exceed 1/zeta");

  const Grid& g = G.grid();
  const int n = g.dim();

  // rho must be the d-fold zeta-normalized laplacian of theta.
  SpectralField chain = theta;
  for (int j = 0; j < params.d; ++j) chain = laplacian(chain);
  chain = chain * std::pow(params.zeta, -2.0 * params.d);
  if (rel_l2_diff(chain, rho) > 1e-8)
    throw std::invalid_argument(
        "full_inverse_div: rho must equal zeta^{-2d} laplacian^d theta");

  if (params.mu > 1.0) {
    const double mu_round = std::round(params.mu);
    if (std::abs(params.mu - mu_round) > 1e-9)
      throw std::invalid_argument(
          "full_inverse_div: mu must be an integer number of cells");
    const int mu = static_cast<int>(mu_round);
    const auto& ts = theta.spec();
    const std::size_t pts = g.points();
    double on = 0.0, off = 0.0;
    for (std::size_t p = 0; p < pts; ++p) {
      const auto km = grid_mode(g, p);
      bool lattice = true;
      for (int a = 0; a < n; ++a)
        if (km[a] % mu != 0) lattice = false;
      const double e = std::norm(ts[p]);
      (lattice ? on : off) += e;
    }
    if (off > 1e-20 * (on + off))
      throw std::invalid_argument(
          "full_inverse_div: theta is not periodic to the stated cell");
  }

  require_flow_hypothesis(G, flow);

  SpectralField stress = SpectralField::zero(g, 2);
  SpectralField pressure = SpectralField::zero(g, 0);

  std::vector<std::pair<SpectralField, SpectralField>> items;
  items.emplace_back(G, rho);

  SpectralField tail = SpectralField::zero(g, 1);
  for (int pass = 0; pass < params.d; ++pass) {
    const bool last = (pass == params.d - 1);
    std::vector<std::pair<SpectralField, SpectralField>> next;
    for (auto& [gj, rhoj] : items) {
      SpectralField theta_j = inv_laplacian(rhoj);
      StepCore core = run_pass(gj, theta_j, flow);
      stress = stress + SpectralField::from_physical(g, 2, std::move(core.stress));
      pressure =
          pressure + SpectralField::from_physical(g, 0, std::move(core.pressure));
      if (last) {
        tail = tail + SpectralField::from_physical(g, 1, std::move(core.error));
      } else {
        for (int l = 0; l < n; ++l)
          next.emplace_back(
              SpectralField::from_physical(
                  g, 1, std::move(core.branch_g[static_cast<std::size_t>(l)])),
              derivative(theta_j, l));
      }
    }
    items = std::move(next);
  }

  FullDivResult res{stress + fourier_inverse_div(tail),
                    std::move(pressure),
                    {},
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    0.0};
  for (int a = 0; a < n; ++a)
    res.mean[static_cast<std::size_t>(a)] = mean(tail, a);

  res.stress_l1 = lp_norm(res.stress, 1.0);
  res.pressure_l1 = lp_norm(res.pressure, 1.0);
  res.c_star = lp_norm(rho, 1.0);

  // Measured slow cost: max over derivative orders of Lambda^-N |D^N G|_L1,
  // with the full derivative-tensor magnitude at each order.
  SpectralField level = G;
  std::vector<SpectralField> current;
  current.push_back(G);
  for (int N = 0; N <= 2 * params.d; ++N) {
    const std::size_t pts = g.points();
    std::vector<double> mag(pts, 0.0);
    for (const auto& f : current) {
      const auto& ph = f.phys();
      const std::size_t nc = static_cast<std::size_t>(f.ncomp());
      for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t p = 0; p < pts; ++p) {
          const double v = ph[c * pts + p];
          mag[p] += v * v;
        }
    }
    for (double& v : mag) v = std::sqrt(v);
    const double norm =
        lp_norm(SpectralField::from_physical(g, 0, std::move(mag)), 1.0);
    res.c_g = std::max(res.c_g, norm * std::pow(params.Lambda, -N));
    if (N == 2 * params.d) break;
    std::vector<SpectralField> grown;
    for (const auto& f : current)
      for (int a = 0; a < n; ++a) grown.push_back(derivative(f, a));
    current = std::move(grown);
  }
  (void)level;

  res.bound_ratio =
      res.stress_l1 /
      (res.c_g * std::pow(params.Lambda, 4) * res.c_star / params.zeta);
  return res;
}

}  // namespace ealab
