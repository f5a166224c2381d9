// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_RIESZ_HPP
#define CHQ_RIESZ_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chq/fields.hpp"
#include "chq/fft3.hpp"
#include "chq/grids.hpp"

namespace chq {

/// Angular kernel K_{N,g}(r,s) = \int_{S^{N-1}} |r e1 - s w|^{-g} dw.
///
/// Closed forms for N = 3; Gauss-Legendre reduction for N >= 4.  Throws
/// a diagonal-singularity error for r == s with g == 2, N == 3 (callers
/// integrating across the diagonal must use the cell-integrated matrix).
double radial_kernel_eval(double r, double s, double gamma, int dim);

/// Dense quadrature matrix for the Riesz potential of radial densities.
///
/// Stores the symmetric quadratic-form matrix B with
///   D_g(u,u) = rho^T B rho,    phi_i = (B rho)_i / w_i,   rho = u^2.
/// Cells adjacent to the diagonal are integrated analytically so the
/// g = 2 logarithmic diagonal keeps second-order accuracy.
class RadialKernel {
public:
  RadialKernel(std::shared_ptr<const RadialGrid> grid, double gamma);

  double gamma() const { return gamma_; }
  const RadialGrid& grid() const { return *grid_; }

  /// phi(r_i) for the density rho (already squared samples).
  std::vector<double> apply_density(std::span<const double> rho) const;
  /// phi_u = |x|^{-g} * u^2.
  RadialField potential(const RadialField& u) const;
  /// D_g(u,u).
  double hartree_energy(const RadialField& u) const;

  /// Loads the matrix from `cache_dir` when a valid entry exists, else
  /// builds it (and stores it when `cache_dir` is non-empty).
  static std::shared_ptr<const RadialKernel> load_or_build(
      std::shared_ptr<const RadialGrid> grid, double gamma,
      const std::string& cache_dir);

  std::uint64_t signature() const;

private:
  struct FromFile {};
  RadialKernel(std::shared_ptr<const RadialGrid> grid, double gamma, FromFile,
               std::vector<double> matrix);
  void build();
  bool save(const std::string& path) const;

  std::shared_ptr<const RadialGrid> grid_;
  double gamma_;
  std::vector<double> b_;  // nodes x nodes, row-major, symmetric
};

/// Zero-padded FFT convolution with the Riesz kernel on a Cartesian grid.
///
/// The Fourier multiplier is c_{3,g} |xi|^{g-3} sampled on the doubled
/// lattice; the zero mode is calibrated against the radial-kernel path on a
/// reference Gaussian, absorbing the near-constant part of the periodic
/// image error.
class CartesianConvolver {
public:
  CartesianConvolver(std::shared_ptr<const CartesianGrid> grid, double gamma);

  double gamma() const { return gamma_; }
  const CartesianGrid& grid() const { return *grid_; }
  double zero_mode() const { return dc_; }

  /// phi = K_g * rho for a density given on the (unpadded) grid.
  void convolve(std::span<const double> rho, std::span<double> phi);

  CartesianField potential(const CartesianField& u);
  double hartree_energy(const CartesianField& u);

private:
  std::shared_ptr<const CartesianGrid> grid_;
  double gamma_;
  double dc_ = 0.0;
  std::vector<double> symbol_;  // r2c half-lattice of the padded cube
  Fft3Real fft_;
};

/// Riesz constant: Fourier transform of |x|^{-g} in R^N is c |xi|^{g-N}.
double riesz_fourier_constant(double gamma, int dim);

// Convenience entry points with a small process-level kernel cache keyed by
// (grid signature, gamma).  The disk cache directory, when set, backs the
// radial kernels.
RadialField riesz_apply(const RadialField& u, double gamma);
double hartree_energy(const RadialField& u, double gamma);
CartesianField riesz_apply(const CartesianField& u, double gamma);
double hartree_energy(const CartesianField& u, double gamma);

std::shared_ptr<const RadialKernel> shared_radial_kernel(
    std::shared_ptr<const RadialGrid> grid, double gamma);

namespace cache {
/// Sets the kernel/ground-state disk cache directory ("" disables).
void set_directory(const std::string& dir);
std::string directory();
}  // namespace cache

}  // namespace chq

#endif
