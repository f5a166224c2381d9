// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "chq/fields.hpp"
#include "chq/grids.hpp"
#include "support/closed_forms.hpp"

using namespace chq;

namespace {
std::shared_ptr<const RadialGrid> rgrid(int n, double rmax, int dim = 3) {
  return std::make_shared<RadialGrid>(dim, n, rmax);
}
}  // namespace

TEST_CASE("radial grid invariants") {
  auto g = rgrid(2048, 16.0);
  const auto& w = g->weights();
  for (double x : w) CHECK(x > 0.0);
  for (int j = 1; j < g->nodes(); ++j) CHECK(g->node(j) > g->node(j - 1));

  // Partial sums of the base weights are exact ball volumes.
  double acc = 0.0;
  for (int k = 1; k <= g->nodes(); k *= 2) {
    acc = 0.0;
    for (int j = 0; j < k; ++j) acc += w[j];
    const double r = k * g->spacing();
    CHECK(acc == doctest::Approx(4.0 * M_PI / 3.0 * r * r * r).epsilon(1e-12));
  }
}

TEST_CASE("integrate: indicator of the unit ball") {
  auto g = rgrid(16384, 16.0);
  auto f = RadialField::sample(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
  CHECK(f.integrate() == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-6));
}

TEST_CASE("integrate: zero field") {
  auto g = rgrid(512, 8.0);
  auto f = RadialField::sample(g, [](double) { return 0.0; });
  CHECK(f.integrate() == 0.0);
}

TEST_CASE("integrate: gaussian against the closed form") {
  auto g = rgrid(16384, 16.0);
  auto f = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
  CHECK(std::abs(f.integrate() - oracles::gaussian_integral(1.0)) < 1e-8);
}

TEST_CASE("integrate: exact for cubics (design order)") {
  auto g = rgrid(4096, 20.0);
  const double R = 20.0;
  struct Case {
    double (*f)(double);
    double exact;
  };
  const Case cases[] = {
      {[](double) { return 1.0; }, 4.0 * M_PI / 3.0 * R * R * R},
      {[](double r) { return r; }, M_PI * R * R * R * R},
      {[](double r) { return r * r; }, 4.0 * M_PI / 5.0 * std::pow(R, 5)},
      {[](double r) { return r * r * r; }, 2.0 * M_PI / 3.0 * std::pow(R, 6)},
  };
  for (const auto& c : cases) {
    auto f = RadialField::sample(g, c.f);
    CHECK(f.integrate() == doctest::Approx(c.exact).epsilon(1e-10));
  }
}

TEST_CASE("kinetic: gaussian closed form") {
  auto g = rgrid(4096, 12.0);
  auto u = RadialField::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
  CHECK(std::abs(u.kinetic() - oracles::gaussian_kinetic(1.0)) < 1e-4);
}

TEST_CASE("kinetic: constant over interior support is flat") {
  auto g = rgrid(1024, 10.0);
  // Plateau with smooth shoulders; the gradient lives only on the shoulders.
  auto u = RadialField::sample(g, [](double r) {
    if (r < 2.0) return 1.0;
    if (r > 3.0) return 0.0;
    const double t = (r - 2.0);
    return 1.0 - t * t * (3.0 - 2.0 * t);
  });
  auto flat = RadialField::sample(g, [](double r) { return r < 2.0 ? 1.0 : 0.0; });
  // Samples strictly inside the plateau contribute nothing.
  double inner = 0.0;
  const double h = g->spacing();
  for (int k = 1; k * h < 1.9; ++k) {
    const double d = (u[k] - u[k - 1]) / h;
    inner += d * d;
  }
  CHECK(inner == 0.0);
  (void)flat;
}

TEST_CASE("mass and kinetic scaling covariance") {
  auto g = rgrid(8192, 16.0);
  const double t = 1.5;
  auto u = RadialField::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
  auto ut = RadialField::sample(
      g, [t](double r) { return std::pow(t, 1.5) * std::exp(-0.5 * t * r * t * r); });
  CHECK(ut.mass() == doctest::Approx(u.mass()).epsilon(1e-6));
  CHECK(ut.kinetic() == doctest::Approx(t * t * u.kinetic()).epsilon(1e-6));
}

TEST_CASE("radial laplacian: gaussian pointwise and second order") {
  auto run = [](int n) {
    auto g = rgrid(n, 12.0);
    auto u = RadialField::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
    auto lap = radial_laplacian(u);
    double maxerr = 0.0;
    for (int j = 0; j < g->nodes(); ++j) {
      const double r = g->node(j);
      if (r > 8.0) break;
      const double exact = (r * r - 3.0) * std::exp(-0.5 * r * r);
      maxerr = std::max(maxerr, std::abs(lap[j] - exact));
    }
    return maxerr;
  };
  const double e1 = run(2048), e2 = run(4096);
  CHECK(e1 < 1e-4);
  CHECK(e2 * 3.0 < e1);  // ~4x reduction per refinement
}

TEST_CASE("radial laplacian is self-adjoint in the grid inner product") {
  auto g = rgrid(1024, 10.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.5, 2.5);
  for (int rep = 0; rep < 3; ++rep) {
    const double a = unif(rng), b = unif(rng), c = unif(rng), d = unif(rng);
    auto u = RadialField::sample(
        g, [&](double r) { return std::exp(-a * r * r) + 0.3 * std::exp(-b * (r - 1) * (r - 1)); });
    auto v = RadialField::sample(
        g, [&](double r) { return std::exp(-c * r * r) * std::cos(d * r); });
    const double lhs = radial_dot(radial_laplacian(u), v);
    const double rhs = radial_dot(u, radial_laplacian(v));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("helmholtz tridiagonal solve inverts (c - lap + diag)") {
  auto g = rgrid(1024, 10.0);
  auto u = RadialField::sample(g, [](double r) { return std::exp(-r * r) * (1.0 + r); });
  std::vector<double> diag(g->nodes());
  for (int j = 0; j < g->nodes(); ++j) diag[j] = g->node(j) * g->node(j);
  auto lap = radial_laplacian(u);
  std::vector<double> rhs(g->nodes());
  for (int j = 0; j < g->nodes(); ++j)
    rhs[j] = 2.5 * u[j] - lap[j] + diag[j] * u[j];
  auto x = radial_helmholtz_solve(*g, 2.5, diag, rhs);
  double maxerr = 0.0;
  for (int j = 0; j < g->nodes(); ++j) maxerr = std::max(maxerr, std::abs(x[j] - u[j]));
  CHECK(maxerr < 1e-11);
}

TEST_CASE("radial interpolation: smooth field and out-of-range behavior") {
  auto g = rgrid(2048, 10.0);
  auto u = RadialField::sample(g, [](double r) { return std::exp(-r) * std::cos(r); });
  for (double r : {0.05, 0.7, 3.33, 8.4}) {
    CHECK(u.interp(r) == doctest::Approx(std::exp(-r) * std::cos(r)).epsilon(1e-6));
  }
  CHECK(u.interp(11.0) == 0.0);
}

TEST_CASE("decay rate fit recovers the exponential rate") {
  auto g = rgrid(2048, 16.0);
  auto u = RadialField::sample(g, [](double r) { return 3.0 * std::exp(-1.3 * r); });
  CHECK(fit_decay_rate(u) == doctest::Approx(1.3).epsilon(1e-6));
}

TEST_CASE("cartesian grid rejects bad node counts") {
  CHECK_THROWS(CartesianGrid(31, 8.0));
  CHECK_THROWS(CartesianGrid(34, 8.0));  // contains factor 17
  CHECK_NOTHROW(CartesianGrid(96, 8.0));
  CHECK_NOTHROW(CartesianGrid(64, 8.0));
}

TEST_CASE("cartesian mass/kinetic: gaussian") {
  auto g = std::make_shared<CartesianGrid>(64, 8.0);
  auto u = CartesianField::sample(g, [](double x, double y, double z) {
    return std::exp(-0.5 * (x * x + y * y + z * z));
  });
  CHECK(u.mass() == doctest::Approx(oracles::gaussian_integral(1.0)).epsilon(1e-10));
  CHECK(u.kinetic() == doctest::Approx(oracles::gaussian_kinetic(1.0)).epsilon(1e-9));
}

TEST_CASE("cartesian laplacian: plane-wave eigenfunction is exact (spectral)") {
  auto g = std::make_shared<CartesianGrid>(32, 4.0);
  const double k1 = 2.0 * M_PI / 8.0 * 3.0;  // 3rd mode
  const double k2 = 2.0 * M_PI / 8.0 * 1.0;
  auto u = CartesianField::sample(
      g, [&](double x, double y, double) { return std::cos(k1 * x) * std::sin(k2 * y); });
  auto lap = cartesian_laplacian(u);
  const double want = -(k1 * k1 + k2 * k2);
  for (std::size_t i = 0; i < u.size(); i += 101) {
    CHECK(lap.samples()[i] == doctest::Approx(want * u.samples()[i]).epsilon(1e-10));
  }
}

TEST_CASE("cartesian laplacian: windowed linear field is flat inside (fd path)") {
  auto g = std::make_shared<CartesianGrid>(32, 4.0);
  auto window = [](double x) {
    const double t = std::abs(x) / 4.0;
    return t < 0.5 ? 1.0 : std::exp(-40.0 * (t - 0.5) * (t - 0.5));
  };
  auto u = CartesianField::sample(g, [&](double x, double y, double z) {
    return x * window(x) * window(y) * window(z);
  });
  auto lap = cartesian_laplacian(u, /*spectral=*/false);
  const int n = g->n();
  double maxerr = 0.0;
  for (int i = n / 2 - 3; i <= n / 2 + 3; ++i)
    for (int j = n / 2 - 3; j <= n / 2 + 3; ++j)
      for (int k = n / 2 - 3; k <= n / 2 + 3; ++k)
        maxerr = std::max(maxerr, std::abs(lap.at(i, j, k)));
  CHECK(maxerr < 1e-10);
}

TEST_CASE("tricubic interpolation reproduces smooth samples") {
  auto g = std::make_shared<CartesianGrid>(48, 6.0);
  auto u = CartesianField::sample(g, [](double x, double y, double z) {
    return std::exp(-0.3 * (x * x + y * y + z * z)) * (1.0 + 0.2 * x - 0.1 * y * z);
  });
  auto f = [](double x, double y, double z) {
    return std::exp(-0.3 * (x * x + y * y + z * z)) * (1.0 + 0.2 * x - 0.1 * y * z);
  };
  CHECK(u.interp(0.13, -0.77, 2.41) == doctest::Approx(f(0.13, -0.77, 2.41)).epsilon(1e-4));
  CHECK(u.interp(-3.6, 1.9, 0.05) == doctest::Approx(f(-3.6, 1.9, 0.05)).epsilon(1e-4));
  CHECK(u.interp(40.0, 0.0, 0.0) == 0.0);
}
