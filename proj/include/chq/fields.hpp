// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_FIELDS_HPP
#define CHQ_FIELDS_HPP

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "chq/grids.hpp"

namespace chq {

/// Real-valued sample vector on a shared radial grid.
///
/// Fields are immutable after construction: every operation returns a new
/// field, so concurrent use is safe.
class RadialField {
public:
  /// Empty placeholder (e.g. default-constructed result slots); using any
  /// member other than assignment is invalid until a real field is assigned.
  RadialField() = default;

  RadialField(std::shared_ptr<const RadialGrid> grid, std::vector<double> samples);

  /// Builds a field by sampling f(r) at the grid nodes.
  template <class F>
  static RadialField sample(std::shared_ptr<const RadialGrid> grid, F&& f) {
    std::vector<double> v(grid->nodes());
    for (int j = 0; j < grid->nodes(); ++j) v[j] = f(grid->node(j));
    return RadialField(std::move(grid), std::move(v));
  }

  const RadialGrid& grid() const { return *grid_; }
  std::shared_ptr<const RadialGrid> grid_ptr() const { return grid_; }
  std::span<const double> samples() const { return values_; }
  double operator[](int j) const { return values_[j]; }
  int size() const { return int(values_.size()); }

  /// Quadrature of the samples against the smooth (4th-order) weights.
  double integrate() const;
  /// L2 mass \int u^2 dx (base weights; cached).
  double mass() const;
  /// H1 seminorm squared \int |grad u|^2 dx (flux form, Dirichlet at r_max).
  double kinetic() const;

  /// Cubic interpolation of the samples at radius r; zero beyond r_max.
  double interp(double r) const;

private:
  std::shared_ptr<const RadialGrid> grid_;
  std::vector<double> values_;
  mutable std::optional<double> mass_;
  mutable std::optional<double> kinetic_;
};

/// Real-valued sample block on a shared Cartesian grid (row-major z-fastest).
class CartesianField {
public:
  CartesianField() = default;

  CartesianField(std::shared_ptr<const CartesianGrid> grid, std::vector<double> samples);

  template <class F>
  static CartesianField sample(std::shared_ptr<const CartesianGrid> grid, F&& f) {
    const int n = grid->n();
    std::vector<double> v(grid->size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          v[grid->index(i, j, k)] = f(grid->coord(i), grid->coord(j), grid->coord(k));
    return CartesianField(std::move(grid), std::move(v));
  }

  const CartesianGrid& grid() const { return *grid_; }
  std::shared_ptr<const CartesianGrid> grid_ptr() const { return grid_; }
  std::span<const double> samples() const { return values_; }
  double at(int i, int j, int k) const { return values_[grid_->index(i, j, k)]; }
  std::size_t size() const { return values_.size(); }

  double integrate() const;
  double mass() const;
  /// Spectral kinetic energy (periodic).
  double kinetic() const;

  /// Tricubic interpolation at (x, y, z); zero-extended outside the box.
  double interp(double x, double y, double z) const;

private:
  std::shared_ptr<const CartesianGrid> grid_;
  std::vector<double> values_;
  mutable std::optional<double> mass_;
  mutable std::optional<double> kinetic_;
};

// Radial differential operators (flux form; the discrete Laplacian and the
// kinetic form satisfy <-lap u, v> = <grad u, grad v> exactly).
RadialField radial_laplacian(const RadialField& u);

/// Periodic Laplacian; spectral by default, 7-point stencil fallback.
CartesianField cartesian_laplacian(const CartesianField& u, bool spectral = true);

/// Applies (c0 * I - laplacian + diag(v))^{-1} rhs by a tridiagonal solve.
/// `diag` may be empty (treated as zero).
std::vector<double> radial_helmholtz_solve(const RadialGrid& g, double c0,
                                           std::span<const double> diag,
                                           std::span<const double> rhs);

/// <u, v> with the base quadrature weights.
double radial_dot(const RadialField& u, const RadialField& v);

/// Fits exp(-delta r) decay on the tail window [r_max/2, 3 r_max/4].
double fit_decay_rate(const RadialField& u);

}  // namespace chq

#endif
