// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_TRAPPED_HPP
#define CHQ_TRAPPED_HPP

#include <array>
#include <memory>
#include <optional>

#include "chq/fields.hpp"
#include "chq/groundstate.hpp"
#include "chq/potential.hpp"

namespace chq {

struct TrappedOptions {
  int n = 96;                  ///< Cartesian nodes per axis
  double half_extent = 12.0;   ///< box half width in solve coordinates
  double step = 0.5;           ///< initial gradient step
  double tol_residual = 1e-8;  ///< relative Euler-Lagrange residual target
  double tol_update = 1e-9;    ///< L2 norm of the accepted update
  int max_iterations = 6000;
  int rescale_mode = 0;        ///< 0 auto, 1 force adapted coords, 2 force physical
  int well_index = -1;         ///< -1: one run per well, lowest energy wins
  double rescale_threshold = 1.8;  ///< gamma at/above which auto mode rescales
  bool compute_reference = true;   ///< also minimize without V for the energy gap
  /// warm start in solve coordinates; honored when exactly one well runs
  std::shared_ptr<const CartesianField> init;
};

/// Mass-constrained minimizer of E_g with trapping potential V.
///
/// For gamma near the critical exponent the solve runs in concentration-
/// adapted coordinates w(x) = eps^{3/2} u(eps x + c) on a box centered at
/// the well estimate c; `field` always stores the solve-coordinate samples.
struct TrappedSolution {
  double gamma = 0;
  double a = 0;
  bool rescaled = false;
  double eps = 1.0;                      ///< adapted-coordinate scale (1 if physical)
  std::array<double, 3> center{};        ///< box center in physical coordinates
  CartesianField field;                  ///< w with unit discrete mass
  double energy = 0;                     ///< e_a(gamma), physical units
  double reference_energy = 0;           ///< grid-matched minimum without V
  double gap = 0;                        ///< e_a - min-without-V, bracket midpoint
  double gap_halfwidth = 0;              ///< half width of the rigorous bracket
  double mu = 0;                         ///< multiplier from the energy formula
  double mu_rayleigh = 0;                ///< <EL(u), u> cross-check
  double potential_energy = 0;           ///< \int V u^2
  double kinetic = 0;                    ///< \int |grad u|^2, physical
  double hartree = 0;                    ///< D_g(u,u), physical
  std::array<double, 3> zbar{};          ///< refined global maximum, physical
  double umax = 0;                       ///< u(zbar), physical amplitude
  double asymmetry = 0;                  ///< || u - u(-x) ||_2
  double residual = 0;
  int iterations = 0;
  int winning_well = 0;
};

TrappedSolution solve_trapped(double gamma, double a, const Potential& V,
                              const TrappedOptions& opts = {});

/// mu from the formula e_a - (a/2) D(u,u); identical to the stored value.
double lagrange_multiplier(const TrappedSolution& m);

/// Energy of the cutoff, renormalized rescaled-ground-state trial function
/// centered at the well x0 (cutoff plateau radius R, support 2R).  Always an
/// upper bound for e_a.  Also reports the normalization constant A.
struct TrialBound {
  double energy = 0;
  double normalization = 0;  ///< A_{R}
  double potential_part = 0;
};
TrialBound trial_upper_bound(const GroundState& gs, double a, const Potential& V,
                             const std::array<double, 3>& x0, double R);

/// 1D counterpart for radial potentials; used to cross-check the Cartesian
/// path and for cheap spectroscopy-style tests.
struct RadialTrapped {
  double energy = 0;
  double mu = 0;
  double potential_energy = 0;
  double kinetic = 0;
  double hartree = 0;
  RadialField field;
  int iterations = 0;
  double residual = 0;
};
RadialTrapped solve_trapped_radial(double gamma, double a, const Potential& V,
                                   std::shared_ptr<const RadialGrid> grid,
                                   double tol_residual = 1e-9,
                                   int max_iterations = 20000);

}  // namespace chq

#endif
