// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#include "chq/grids.hpp"

#include <cmath>
#include <functional>

#include "chq/errors.hpp"

namespace chq {

double unit_sphere_area(int dim) {
  return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

namespace {

std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t double_bits(double x) {
  std::uint64_t b;
  static_assert(sizeof(b) == sizeof(x));
  __builtin_memcpy(&b, &x, sizeof(b));
  return b;
}

}  // namespace

RadialGrid::RadialGrid(int dim, int nodes, double r_max)
    : dim_(dim), nodes_(nodes), r_max_(r_max) {
  require(dim >= 3, ErrorCode::invalid_argument, "radial grid: dimension must be >= 3");
  require(nodes >= 8, ErrorCode::invalid_argument, "radial grid: too few nodes");
  require(r_max > 0, ErrorCode::invalid_argument, "radial grid: r_max must be positive");
  h_ = r_max_ / nodes_;
  const double area = unit_sphere_area(dim_);

  r_.resize(nodes_);
  w_.resize(nodes_);
  for (int j = 0; j < nodes_; ++j) {
    r_[j] = (j + 0.5) * h_;
    const double c0 = j * h_, c1 = (j + 1) * h_;
    w_[j] = area * (std::pow(c1, dim_) - std::pow(c0, dim_)) / dim_;
  }

  // Smooth-integrand weights: base cell measures plus a discrete version of
  // the midpoint-rule defect
  //   (h^2/12)(N-1)|S| \int f' r^{N-2} + (h^2/24)|S| \int f'' r^{N-1},
  // spread through second-order difference stencils.  Exact for cubics.
  ws_ = w_;
  const int m = nodes_;
  auto add_d1 = [&](int j, double factor) {
    if (j == 0) {
      ws_[0] += factor * -1.5;
      ws_[1] += factor * 2.0;
      ws_[2] += factor * -0.5;
    } else if (j == m - 1) {
      ws_[m - 1] += factor * 1.5;
      ws_[m - 2] += factor * -2.0;
      ws_[m - 3] += factor * 0.5;
    } else {
      ws_[j + 1] += factor * 0.5;
      ws_[j - 1] += factor * -0.5;
    }
  };
  auto add_d2 = [&](int j, double factor) {
    if (j == 0) {
      ws_[0] += factor * 2.0;
      ws_[1] += factor * -5.0;
      ws_[2] += factor * 4.0;
      ws_[3] += factor * -1.0;
    } else if (j == m - 1) {
      ws_[m - 1] += factor * 2.0;
      ws_[m - 2] += factor * -5.0;
      ws_[m - 3] += factor * 4.0;
      ws_[m - 4] += factor * -1.0;
    } else {
      ws_[j - 1] += factor * 1.0;
      ws_[j] += factor * -2.0;
      ws_[j + 1] += factor * 1.0;
    }
  };
  for (int j = 0; j < m; ++j) {
    const double f1 = area * (dim_ - 1) * h_ * h_ / 12.0 * std::pow(r_[j], dim_ - 2);
    const double f2 = area * h_ / 24.0 * std::pow(r_[j], dim_ - 1);
    add_d1(j, f1);
    add_d2(j, f2);
  }
}

std::uint64_t RadialGrid::signature() const {
  std::uint64_t h = 0x7261646c;
  h = mix64(h, std::uint64_t(dim_));
  h = mix64(h, std::uint64_t(nodes_));
  h = mix64(h, double_bits(r_max_));
  return h;
}

CartesianGrid::CartesianGrid(int n, double half_extent)
    : n_(n), half_extent_(half_extent) {
  require(n >= 32, ErrorCode::invalid_argument, "cartesian grid: need n >= 32");
  require(n % 2 == 0, ErrorCode::invalid_argument, "cartesian grid: n must be even");
  require(half_extent > 0, ErrorCode::invalid_argument, "cartesian grid: extent must be positive");
  int rest = n;
  for (int p : {2, 3, 5, 7})
    while (rest % p == 0) rest /= p;
  require(rest == 1, ErrorCode::invalid_argument,
          "cartesian grid: n must factor into {2,3,5,7}");
  h_ = 2.0 * half_extent_ / n_;
}

std::uint64_t CartesianGrid::signature() const {
  std::uint64_t h = 0x63617274;
  h = mix64(h, std::uint64_t(n_));
  h = mix64(h, double_bits(half_extent_));
  return h;
}

}  // namespace chq
