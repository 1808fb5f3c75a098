#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ealab/field.hpp"

#include <cmath>

using namespace ealab;

namespace {
double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  const auto& pa = a.phys();
  const auto& pb = b.phys();
  double best = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i)
    best = std::max(best, std::abs(pa[i] - pb[i]));
  return best;
}
}  // namespace

TEST_CASE("grid validates its arguments") {
  CHECK_THROWS(Grid(4, 32));
  CHECK_THROWS(Grid(2, 12));
  CHECK_THROWS(Grid(2, 4));
  const Grid g(2, 32);
  CHECK(g.points() == 1024);
  CHECK(g.wavenumber(0) == 0);
  CHECK(g.wavenumber(16) == 16);
  CHECK(g.wavenumber(17) == -15);
  CHECK(g.volume() == doctest::Approx(kTwoPi * kTwoPi).epsilon(1e-15));
}

TEST_CASE("transform round trip is lossless to 1e-12") {
  for (int dim : {2, 3}) {
    const Grid g(dim, dim == 2 ? 64 : 16);
    const SpectralField f = random_field(g, 1, g.n() / 3, 42);
    const auto& phys = f.phys();
    SpectralField g2 = SpectralField::from_spectral(g, 1, f.spec());
    const auto& phys2 = g2.phys();
    double err = 0.0;
    for (std::size_t i = 0; i < phys.size(); ++i)
      err = std::max(err, std::abs(phys[i] - phys2[i]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("spectral derivative matches closed form") {
  const Grid g(2, 64);
  const auto f = SpectralField::sample(
      g, 0, [](const std::array<double, 3>& x, int) {
        return std::sin(3 * x[0]) * std::cos(2 * x[1]);
      });
  const auto dfdx = SpectralField::sample(
      g, 0, [](const std::array<double, 3>& x, int) {
        return 3 * std::cos(3 * x[0]) * std::cos(2 * x[1]);
      });
  const auto dfdy = SpectralField::sample(
      g, 0, [](const std::array<double, 3>& x, int) {
        return -2 * std::sin(3 * x[0]) * std::sin(2 * x[1]);
      });
  CHECK(max_abs_diff(derivative(f, 0), dfdx) < 1e-11);
  CHECK(max_abs_diff(derivative(f, 1), dfdy) < 1e-11);
}

TEST_CASE("gradient layout is d_i u^j with the new index first") {
  const Grid g(3, 16);
  // u = (sin x2, 0, 0): the only nonzero gradient entry is d_2 u^0 = cos x2.
  const auto u = SpectralField::sample(
      g, 1, [](const std::array<double, 3>& x, int c) {
        return c == 0 ? std::sin(x[2]) : 0.0;
      });
  const SpectralField gu = grad(u);
  REQUIRE(gu.rank() == 2);
  const std::size_t np = g.points();
  double err_entry = 0.0, err_rest = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    const auto x = grid_point(g, p);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double got = gu.phys_at(p, i * 3 + j);
        if (i == 2 && j == 0)
          err_entry = std::max(err_entry, std::abs(got - std::cos(x[2])));
        else
          err_rest = std::max(err_rest, std::abs(got));
      }
  }
  CHECK(err_entry < 1e-12);
  CHECK(err_rest < 1e-13);
}

TEST_CASE("div contracts the first index and div(grad) = laplacian") {
  const Grid g(2, 32);
  const SpectralField f = random_field(g, 1, 8, 7);
  const SpectralField lhs = div(grad(f));
  const SpectralField rhs = laplacian(f);
  CHECK(max_abs_diff(lhs, rhs) < 1e-10);
}

TEST_CASE("curl3 of (sin x2, 0, 0) is (0, cos x2, 0)") {
  const Grid g(3, 16);
  const auto u = SpectralField::sample(
      g, 1, [](const std::array<double, 3>& x, int c) {
        return c == 0 ? std::sin(x[2]) : 0.0;
      });
  const auto expected = SpectralField::sample(
      g, 1, [](const std::array<double, 3>& x, int c) {
        return c == 1 ? std::cos(x[2]) : 0.0;
      });
  CHECK(max_abs_diff(curl3(u), expected) < 1e-12);
}

TEST_CASE("leray projection is an orthogonal projection onto div-free fields") {
  const Grid g(3, 16);
  const SpectralField u = random_field(g, 1, 5, 11);
  const SpectralField pu = leray_project(u);
  CHECK(l2_norm(div(pu)) < 1e-10);
  CHECK(max_abs_diff(leray_project(pu), pu) < 1e-12);
  const SpectralField v = random_field(g, 1, 5, 13);
  CHECK(l2_inner(pu, v) == doctest::Approx(l2_inner(u, leray_project(v)))
                               .epsilon(1e-10));
  // a div-free field passes through unchanged
  const SpectralField w = random_divfree(g, 5, 17);
  CHECK(max_abs_diff(leray_project(w), w) < 1e-12);
}

TEST_CASE("helmholtz_solve inverts (1 - alpha^2 laplacian)") {
  const Grid g(2, 32);
  const double alpha = 0.35;
  const SpectralField u = random_field(g, 1, 8, 19);
  const SpectralField v = u - laplacian(u) * (alpha * alpha);
  CHECK(max_abs_diff(helmholtz_solve(v, alpha), u) < 1e-12);
}

TEST_CASE("parseval L2 norm matches the closed form") {
  const Grid g(3, 16);
  const auto u = SpectralField::sample(
      g, 1, [](const std::array<double, 3>& x, int c) {
        return c == 0 ? std::sin(x[2]) : 0.0;
      });
  // integral of sin^2 over the 3-torus = (2pi)^2 * pi = 4 pi^3
  const double pi = kTwoPi / 2;
  CHECK(l2_norm(u) ==
        doctest::Approx(std::sqrt(4 * pi * pi * pi)).epsilon(1e-13));
}

TEST_CASE("Lp quadrature is exact on resolved trigonometric integrands") {
  const Grid g(2, 64);
  const auto f = SpectralField::sample(
      g, 0, [](const std::array<double, 3>& x, int) {
        const double s = std::sin(x[0]);
        return s * s;
      });
  // ||sin^2||_{L3}^3 = int sin^6 = (5 pi / 8) * 2 pi = 5 pi^2 / 4
  const double pi = kTwoPi / 2;
  CHECK(lp_norm(f, 3.0) ==
        doctest::Approx(std::cbrt(5 * pi * pi / 4)).epsilon(1e-13));
  CHECK(c0_norm(f) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("dealias removes every mode beyond the cutoff") {
  const Grid g(2, 32);
  const SpectralField f = random_field(g, 0, 15, 23);
  CHECK(tail_magnitude(f) > 0.0);
  CHECK(tail_magnitude(dealias(f)) == 0.0);
}

TEST_CASE("sampled real fields are hermitian-symmetric") {
  const Grid g(2, 32);
  const SpectralField f = random_field(g, 2, 10, 29);
  CHECK(hermitian_error(f) < 1e-13);
}

TEST_CASE("shell projections partition the spectrum") {
  const Grid g(2, 32);
  const SpectralField f = random_field(g, 0, 14, 31) +
                          SpectralField::sample(g, 0, [](auto&, int) { return 0.5; });
  SpectralField sum = shell_project(f, -1);
  for (int j = 0; (2 << j) <= g.n(); ++j) sum = sum + shell_project(f, j);
  CHECK(max_abs_diff(sum, f) < 1e-12);
}

TEST_CASE("besov seminorm scales by 2^{js} on a single shell") {
  const Grid g(2, 64);
  const auto f = SpectralField::sample(
      g, 0, [](const std::array<double, 3>& x, int) { return std::sin(4 * x[0]); });
  // k = 4 lives in shell j = 2
  CHECK(besov_norm(f, 0.0) == doctest::Approx(lp_norm(f, 3.0)).epsilon(1e-12));
  CHECK(besov_norm(f, 1.0) == doctest::Approx(4 * lp_norm(f, 3.0)).epsilon(1e-12));
}

TEST_CASE("random div-free fields are reproducible, mean-free and solenoidal") {
  const Grid g(3, 16);
  const SpectralField u = random_divfree(g, 4, 101);
  const SpectralField u2 = random_divfree(g, 4, 101);
  CHECK(max_abs_diff(u, u2) == 0.0);
  CHECK(l2_norm(div(u)) < 1e-10);
  CHECK(l2_norm(u) == doctest::Approx(1.0).epsilon(1e-12));
  for (int c = 0; c < 3; ++c) CHECK(std::abs(mean(u, c)) < 1e-14);
  const SpectralField other = random_divfree(g, 4, 102);
  CHECK(max_abs_diff(u, other) > 1e-3);
}

TEST_CASE("perp_grad produces exactly divergence-free fields") {
  const Grid g(2, 32);
  const SpectralField psi = random_field(g, 0, 9, 37);
  const SpectralField v = perp_grad(psi);
  CHECK(l2_norm(div(v)) < 1e-11);
  CHECK(max_abs_diff(curl2(v), laplacian(psi)) < 1e-10);
}

TEST_CASE("pointwise tensor algebra has the documented layout") {
  const Grid g(2, 16);
  const auto u = SpectralField::sample(
      g, 1, [](const std::array<double, 3>& x, int c) {
        return c == 0 ? std::cos(x[1]) : std::sin(x[0]);
      });
  const auto v = SpectralField::sample(
      g, 1, [](const std::array<double, 3>& x, int c) {
        return c == 0 ? 2.0 : std::cos(x[0]);
      });
  const SpectralField t = outer(u, v);
  const std::size_t p = 5 * g.n() + 3;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      CHECK(t.phys_at(p, k * 2 + l) ==
            doctest::Approx(u.phys_at(p, k) * v.phys_at(p, l)).epsilon(1e-14));

  const SpectralField d = dot(u, v);
  CHECK(d.phys_at(p, 0) ==
        doctest::Approx(u.phys_at(p, 0) * v.phys_at(p, 0) +
                        u.phys_at(p, 1) * v.phys_at(p, 1))
            .epsilon(1e-14));

  // constant matrices: A B^T has a closed form
  const auto a = SpectralField::sample(
      g, 2, [](const std::array<double, 3>&, int c) { return c == 1 ? 3.0 : 1.0; });
  const auto b = SpectralField::sample(
      g, 2, [](const std::array<double, 3>&, int c) { return c == 2 ? 2.0 : 1.0; });
  // A = [[1,3],[1,1]], B = [[1,1],[2,1]], A B^T = [[4,5],[2,3]]
  const SpectralField ab = matmul_abt(a, b);
  CHECK(ab.phys_at(p, 0) == doctest::Approx(4.0));
  CHECK(ab.phys_at(p, 1) == doctest::Approx(5.0));
  CHECK(ab.phys_at(p, 2) == doctest::Approx(2.0));
  CHECK(ab.phys_at(p, 3) == doctest::Approx(3.0));

  CHECK(std::abs(c0_norm(trace(deviatoric(t)))) < 1e-13);
  CHECK(max_abs_diff(symmetrize(t), symmetrize(transpose(t))) < 1e-14);
}

TEST_CASE("advection matches the closed form on a planar shear") {
  const Grid g(2, 32);
  // u = (1, 0), f = sin(x0): (u . grad) f = cos(x0)
  const auto u = SpectralField::sample(
      g, 1, [](const std::array<double, 3>&, int c) { return c == 0 ? 1.0 : 0.0; });
  const auto f = SpectralField::sample(
      g, 0, [](const std::array<double, 3>& x, int) { return std::sin(x[0]); });
  const auto expected = SpectralField::sample(
      g, 0, [](const std::array<double, 3>& x, int) { return std::cos(x[0]); });
  CHECK(max_abs_diff(advect(u, f), expected) < 1e-12);
}
