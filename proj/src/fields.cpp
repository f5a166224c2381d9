// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#include "chq/fields.hpp"

#include <algorithm>
#include <cmath>

#include "chq/errors.hpp"
#include "chq/fft3.hpp"

namespace chq {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Catmull-Rom through four uniform samples, evaluated at t in [0,1]
// between the middle two.
double cubic4(double f0, double f1, double f2, double f3, double t) {
  const double a0 = 2.0 * f1;
  const double a1 = f2 - f0;
  const double a2 = 2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3;
  const double a3 = -f0 + 3.0 * f1 - 3.0 * f2 + f3;
  return 0.5 * (a0 + t * (a1 + t * (a2 + t * a3)));
}

}  // namespace

RadialField::RadialField(std::shared_ptr<const RadialGrid> grid, std::vector<double> samples)
    : grid_(std::move(grid)), values_(std::move(samples)) {
  require(int(values_.size()) == grid_->nodes(), ErrorCode::invalid_argument,
          "radial field: sample count does not match grid");
  require(all_finite(values_), ErrorCode::invalid_argument,
          "radial field: non-finite sample");
}

double RadialField::integrate() const {
  const auto& w = grid_->smooth_weights();
  double s = 0.0;
  for (int j = 0; j < size(); ++j) s += w[j] * values_[j];
  return s;
}

double RadialField::mass() const {
  if (!mass_) {
    const auto& w = grid_->weights();
    double s = 0.0;
    for (int j = 0; j < size(); ++j) s += w[j] * values_[j] * values_[j];
    mass_ = s;
  }
  return *mass_;
}

double RadialField::kinetic() const {
  if (!kinetic_) {
    const int m = size();
    const int dim = grid_->dim();
    const double h = grid_->spacing();
    double s = 0.0;
    for (int k = 1; k <= m; ++k) {
      const double lo = (k == m) ? 0.0 : values_[k];
      const double d = (lo - values_[k - 1]) / h;
      s += d * d * std::pow(k * h, dim - 1) * h;
    }
    kinetic_ = s * unit_sphere_area(dim);
  }
  return *kinetic_;
}

double RadialField::interp(double r) const {
  const int m = size();
  const double h = grid_->spacing();
  if (r >= grid_->r_max() || r < 0.0) return 0.0;
  auto get = [&](int j) -> double {
    if (j < 0) return values_[-j - 1];  // even reflection through r = 0
    if (j >= m) return 0.0;
    return values_[j];
  };
  const double s = r / h - 0.5;
  const int j1 = int(std::floor(s));
  const double t = s - j1;
  return cubic4(get(j1 - 1), get(j1), get(j1 + 1), get(j1 + 2), t);
}

CartesianField::CartesianField(std::shared_ptr<const CartesianGrid> grid,
                               std::vector<double> samples)
    : grid_(std::move(grid)), values_(std::move(samples)) {
  require(values_.size() == grid_->size(), ErrorCode::invalid_argument,
          "cartesian field: sample count does not match grid");
  require(all_finite(values_), ErrorCode::invalid_argument,
          "cartesian field: non-finite sample");
}

double CartesianField::integrate() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_->cell_volume();
}

double CartesianField::mass() const {
  if (!mass_) {
    double s = 0.0;
    for (double v : values_) s += v * v;
    mass_ = s * grid_->cell_volume();
  }
  return *mass_;
}

double CartesianField::kinetic() const {
  if (!kinetic_) {
    const int n = grid_->n();
    Fft3Real fft(n);
    std::copy(values_.begin(), values_.end(), fft.real_buf().begin());
    fft.forward();
    const double dk = 2.0 * M_PI / (n * grid_->spacing());
    auto c = fft.complex_buf();
    double s = 0.0;
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
      const double ki = dk * fft.freq(i);
      for (int j = 0; j < n; ++j) {
        const double kj = dk * fft.freq(j);
        for (int k = 0; k <= n / 2; ++k, ++idx) {
          const double kk = dk * k;
          const double k2 = ki * ki + kj * kj + kk * kk;
          const double mag2 = std::norm(c[idx]);
          const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
          s += mult * k2 * mag2;
        }
      }
    }
    kinetic_ = s * grid_->cell_volume() / double(grid_->size());
  }
  return *kinetic_;
}

double CartesianField::interp(double x, double y, double z) const {
  const int n = grid_->n();
  const double h = grid_->spacing();
  const double L = grid_->half_extent();
  auto get = [&](int i, int j, int k) -> double {
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) return 0.0;
    return values_[grid_->index(i, j, k)];
  };
  const double sx = (x + L) / h, sy = (y + L) / h, sz = (z + L) / h;
  const int i1 = int(std::floor(sx)), j1 = int(std::floor(sy)), k1 = int(std::floor(sz));
  const double tx = sx - i1, ty = sy - j1, tz = sz - k1;
  if (i1 < -2 || j1 < -2 || k1 < -2 || i1 > n + 1 || j1 > n + 1 || k1 > n + 1) return 0.0;
  double fy[4];
  for (int a = 0; a < 4; ++a) {
    double fz[4];
    for (int b = 0; b < 4; ++b) {
      fz[b] = cubic4(get(i1 - 1 + a, j1 - 1 + b, k1 - 1),
                     get(i1 - 1 + a, j1 - 1 + b, k1),
                     get(i1 - 1 + a, j1 - 1 + b, k1 + 1),
                     get(i1 - 1 + a, j1 - 1 + b, k1 + 2), tz);
    }
    fy[a] = cubic4(fz[0], fz[1], fz[2], fz[3], ty);
  }
  return cubic4(fy[0], fy[1], fy[2], fy[3], tx);
}

CartesianField cartesian_laplacian(const CartesianField& u, bool spectral) {
  const int n = u.grid().n();
  std::vector<double> out(u.size());
  if (spectral) {
    Fft3Real fft(n);
    auto s = u.samples();
    std::copy(s.begin(), s.end(), fft.real_buf().begin());
    fft.forward();
    const double dk = 2.0 * M_PI / (n * u.grid().spacing());
    auto c = fft.complex_buf();
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
      const double ki = dk * fft.freq(i);
      for (int j = 0; j < n; ++j) {
        const double kj = dk * fft.freq(j);
        for (int k = 0; k <= n / 2; ++k, ++idx) {
          const double kk = dk * k;
          c[idx] *= -(ki * ki + kj * kj + kk * kk);
        }
      }
    }
    fft.backward();
    auto r = fft.real_buf();
    std::copy(r.begin(), r.end(), out.begin());
  } else {
    const auto& g = u.grid();
    const double ih2 = 1.0 / (g.spacing() * g.spacing());
    auto wrap = [n](int i) { return (i + n) % n; };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double c6 = u.at(wrap(i - 1), j, k) + u.at(wrap(i + 1), j, k) +
                            u.at(i, wrap(j - 1), k) + u.at(i, wrap(j + 1), k) +
                            u.at(i, j, wrap(k - 1)) + u.at(i, j, wrap(k + 1));
          out[g.index(i, j, k)] = (c6 - 6.0 * u.at(i, j, k)) * ih2;
        }
  }
  return CartesianField(u.grid_ptr(), std::move(out));
}

RadialField radial_laplacian(const RadialField& u) {
  const auto& g = u.grid();
  const int m = u.size();
  const int dim = g.dim();
  const double h = g.spacing();
  const double area = unit_sphere_area(dim);
  std::vector<double> out(m);
  for (int j = 0; j < m; ++j) {
    const double mj = g.weights()[j] / area;
    const double s_lo = std::pow(j * h, dim - 1);
    const double s_hi = std::pow((j + 1) * h, dim - 1);
    const double u_lo = (j == 0) ? u[0] : u[j - 1];
    const double u_hi = (j == m - 1) ? 0.0 : u[j + 1];
    const double flux_lo = (j == 0) ? 0.0 : s_lo * (u[j] - u_lo) / h;
    const double flux_hi = s_hi * (u_hi - u[j]) / h;
    out[j] = (flux_hi - flux_lo) / mj;
  }
  return RadialField(u.grid_ptr(), std::move(out));
}

std::vector<double> radial_helmholtz_solve(const RadialGrid& g, double c0,
                                           std::span<const double> diag,
                                           std::span<const double> rhs) {
  const int m = g.nodes();
  const int dim = g.dim();
  const double h = g.spacing();
  const double area = unit_sphere_area(dim);
  std::vector<double> sub(m), dia(m), sup(m), d(rhs.begin(), rhs.end());
  for (int j = 0; j < m; ++j) {
    const double mj = g.weights()[j] / area;
    const double s_lo = (j == 0) ? 0.0 : std::pow(j * h, dim - 1);
    const double s_hi = std::pow((j + 1) * h, dim - 1);
    sub[j] = -s_lo / (h * mj);
    sup[j] = -s_hi / (h * mj);
    dia[j] = c0 + (s_lo + s_hi) / (h * mj) + (diag.empty() ? 0.0 : diag[j]);
  }
  // Thomas algorithm.
  for (int j = 1; j < m; ++j) {
    const double w = sub[j] / dia[j - 1];
    dia[j] -= w * sup[j - 1];
    d[j] -= w * d[j - 1];
  }
  std::vector<double> x(m);
  x[m - 1] = d[m - 1] / dia[m - 1];
  for (int j = m - 2; j >= 0; --j) x[j] = (d[j] - sup[j] * x[j + 1]) / dia[j];
  return x;
}

double radial_dot(const RadialField& u, const RadialField& v) {
  require(u.grid().same_as(v.grid()), ErrorCode::invalid_argument,
          "radial dot: grids differ");
  const auto& w = u.grid().weights();
  double s = 0.0;
  for (int j = 0; j < u.size(); ++j) s += w[j] * u[j] * v[j];
  return s;
}

double fit_decay_rate(const RadialField& u) {
  const auto& g = u.grid();
  const double lo = 0.5 * g.r_max(), hi = 0.75 * g.r_max();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int j = 0; j < u.size(); ++j) {
    const double r = g.node(j);
    if (r < lo || r > hi) continue;
    const double a = std::abs(u[j]);
    if (a <= 0.0) continue;
    const double y = std::log(a);
    sx += r;
    sy += y;
    sxx += r * r;
    sxy += r * y;
    ++n;
  }
  if (n < 4) return 0.0;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return -(n * sxy - sx * sy) / denom;
}

}  // namespace chq
