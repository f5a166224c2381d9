// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#include "chq/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chq/errors.hpp"
#include "chq/numutil.hpp"

namespace chq {

Potential Potential::harmonic(double scale) {
  require(scale > 0, ErrorCode::invalid_argument, "potential: scale must be positive");
  Potential v;
  v.kind_ = PotentialKind::harmonic;
  v.scale_ = scale;
  v.wells_ = {Well{{0.0, 0.0, 0.0}, 2.0}};
  return v;
}

Potential Potential::product_wells(std::vector<Well> wells, double scale) {
  require(!wells.empty(), ErrorCode::invalid_argument, "potential: no wells");
  require(scale > 0, ErrorCode::invalid_argument, "potential: scale must be positive");
  for (const auto& w : wells)
    require(w.p > 0, ErrorCode::invalid_argument, "potential: well order must be positive");
  Potential v;
  v.kind_ = PotentialKind::product_wells;
  v.scale_ = scale;
  v.wells_ = std::move(wells);
  return v;
}

Potential Potential::tabulated(CartesianField values) {
  for (double s : values.samples())
    require(s >= 0.0, ErrorCode::invalid_argument, "potential: negative tabulated value");
  Potential v;
  v.kind_ = PotentialKind::tabulated;
  v.table_ = std::make_shared<const CartesianField>(std::move(values));
  return v;
}

bool Potential::radial() const {
  if (kind_ == PotentialKind::harmonic) return true;
  if (kind_ == PotentialKind::product_wells)
    return wells_.size() == 1 && wells_[0].x == std::array<double, 3>{0.0, 0.0, 0.0};
  return false;
}

double Potential::operator()(double x, double y, double z) const {
  switch (kind_) {
    case PotentialKind::harmonic:
      return scale_ * (x * x + y * y + z * z);
    case PotentialKind::product_wells: {
      double v = scale_;
      for (const auto& w : wells_) {
        const double dx = x - w.x[0], dy = y - w.x[1], dz = z - w.x[2];
        v *= std::pow(dx * dx + dy * dy + dz * dz, 0.5 * w.p);
      }
      return v;
    }
    case PotentialKind::tabulated:
      return std::max(table_->interp(x, y, z), 0.0);
  }
  return 0.0;
}

Potential::Flatness Potential::flatness() const {
  require(kind_ != PotentialKind::tabulated, ErrorCode::unsupported,
          "potential: flatness analysis unavailable for tabulated potentials");
  Flatness out;
  out.p = 0.0;
  for (const auto& w : wells_) out.p = std::max(out.p, w.p);
  out.lambda.resize(wells_.size());
  for (std::size_t i = 0; i < wells_.size(); ++i) {
    double lam = scale_;
    for (std::size_t j = 0; j < wells_.size(); ++j) {
      if (j == i) continue;
      const double dx = wells_[i].x[0] - wells_[j].x[0];
      const double dy = wells_[i].x[1] - wells_[j].x[1];
      const double dz = wells_[i].x[2] - wells_[j].x[2];
      lam *= std::pow(dx * dx + dy * dy + dz * dz, 0.5 * wells_[j].p);
    }
    out.lambda[i] = lam;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < wells_.size(); ++i)
    if (wells_[i].p == out.p) best = std::min(best, out.lambda[i]);
  for (std::size_t i = 0; i < wells_.size(); ++i)
    if (wells_[i].p == out.p && out.lambda[i] <= best * (1.0 + 1e-12))
      out.flattest.push_back(int(i));
  return out;
}

double Potential::spherical_mean(const std::array<double, 3>& x0, double rho) const {
  const auto& [gx, gw] = gauss_legendre(12);
  const int n_az = 24;
  double acc = 0.0;
  for (std::size_t a = 0; a < gx.size(); ++a) {
    const double ct = gx[a];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int b = 0; b < n_az; ++b) {
      const double phi = 2.0 * M_PI * b / n_az;
      acc += gw[a] * (*this)(x0[0] + rho * st * std::cos(phi),
                             x0[1] + rho * st * std::sin(phi), x0[2] + rho * ct);
    }
  }
  return acc / (2.0 * n_az);
}

void Potential::check_confining(const CartesianGrid& g,
                                const std::array<double, 3>& center,
                                double window) const {
  const int n = g.n();
  double boundary_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto probe = [&](int a, int b, int c) {
        const double v = (*this)(center[0] + g.coord(a), center[1] + g.coord(b),
                                 center[2] + g.coord(c));
        boundary_min = std::min(boundary_min, v);
      };
      probe(0, i, j);
      probe(n - 1, i, j);
      probe(i, 0, j);
      probe(i, n - 1, j);
      probe(i, j, 0);
      probe(i, j, n - 1);
    }
  double well_max = 0.0;
  for (const auto& w : wells_) {
    for (double off : {-window, 0.0, window}) {
      well_max = std::max(well_max, (*this)(w.x[0] + off, w.x[1], w.x[2]));
      well_max = std::max(well_max, (*this)(w.x[0], w.x[1] + off, w.x[2]));
      well_max = std::max(well_max, (*this)(w.x[0], w.x[1], w.x[2] + off));
    }
  }
  require(boundary_min > 10.0 * well_max, ErrorCode::invalid_argument,
          "potential: not confining on this grid (boundary too low)");
}

std::uint64_t Potential::signature() const {
  std::uint64_t h = 0x706f7431;
  const int k = int(kind_);
  h = fnv1a(&k, sizeof(k), h);
  h = fnv1a(&scale_, sizeof(scale_), h);
  for (const auto& w : wells_) {
    h = fnv1a(w.x.data(), sizeof(double) * 3, h);
    h = fnv1a(&w.p, sizeof(w.p), h);
  }
  if (table_) {
    auto s = table_->samples();
    h = fnv1a(s.data(), s.size() * sizeof(double), h);
  }
  return h;
}

}  // namespace chq
