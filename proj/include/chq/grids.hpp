// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_GRIDS_HPP
#define CHQ_GRIDS_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace chq {

/// Surface area of the unit sphere S^{N-1} in R^N.
double unit_sphere_area(int dim);

/// Uniform radial grid on (0, r_max] for radially symmetric fields in R^N.
///
/// Nodes sit at cell midpoints r_j = (j + 1/2) h, so the coordinate
/// singularity at r = 0 is never sampled.  The base quadrature weights are
/// exact cell integrals of |S^{N-1}| r^{N-1} dr; partial sums of the weights
/// therefore reproduce ball volumes exactly.  integrate() adds a
/// derivative-based correction on top of the base weights so that smooth
/// integrands are handled to fourth order (exact for cubics in r).
class RadialGrid {
public:
  RadialGrid(int dim, int nodes, double r_max);

  int dim() const { return dim_; }
  int nodes() const { return nodes_; }
  double r_max() const { return r_max_; }
  double spacing() const { return h_; }
  double node(int j) const { return r_[j]; }
  const std::vector<double>& node_positions() const { return r_; }

  /// Base weights: w_j = |S^{N-1}| * integral of r^{N-1} over cell j.
  const std::vector<double>& weights() const { return w_; }

  /// Fourth-order weights used by integrate() on smooth samples.
  const std::vector<double>& smooth_weights() const { return ws_; }

  /// 64-bit signature of (dim, nodes, r_max) for cache keys.
  std::uint64_t signature() const;

  bool same_as(const RadialGrid& o) const {
    return dim_ == o.dim_ && nodes_ == o.nodes_ && r_max_ == o.r_max_;
  }

private:
  int dim_;
  int nodes_;
  double r_max_;
  double h_;
  std::vector<double> r_;
  std::vector<double> w_;
  std::vector<double> ws_;
};

/// Uniform Cartesian grid on [-L, L)^3 with per-axis node count n.
///
/// x_i = -L + i h with h = 2L/n; the right endpoint is excluded so the grid
/// is compatible with periodic transforms.  Node counts must be even,
/// >= 32, and factor into {2, 3, 5, 7} so FFTs stay fast.
class CartesianGrid {
public:
  CartesianGrid(int n, double half_extent);

  int n() const { return n_; }
  double half_extent() const { return half_extent_; }
  double spacing() const { return h_; }
  double cell_volume() const { return h_ * h_ * h_; }
  std::size_t size() const { return std::size_t(n_) * n_ * n_; }
  double coord(int i) const { return -half_extent_ + h_ * i; }
  std::size_t index(int i, int j, int k) const {
    return (std::size_t(i) * n_ + j) * n_ + k;
  }

  std::uint64_t signature() const;

  bool same_as(const CartesianGrid& o) const {
    return n_ == o.n_ && half_extent_ == o.half_extent_;
  }

private:
  int n_;
  double half_extent_;
  double h_;
};

}  // namespace chq

#endif
