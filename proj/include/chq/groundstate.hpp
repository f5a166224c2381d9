// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_GROUNDSTATE_HPP
#define CHQ_GROUNDSTATE_HPP

#include <memory>
#include <utility>
#include <vector>

#include "chq/fields.hpp"
#include "chq/riesz.hpp"

namespace chq {

struct GroundOptions {
  double tol_residual = 1e-6;  ///< relative L2 residual of -Lap Q + Q - phi Q
  double tol_update = 1e-9;    ///< H1 norm of the accepted update
  int max_iterations = 20000;
  int max_positivity_fixes = 10;
  bool keep_action_trace = false;
};

/// Converged positive radial ground state of -Lap u + u = (|x|^{-g} * u^2) u
/// together with its derived scalars.
struct GroundState {
  double gamma = 0;
  int dim = 0;
  RadialField q;
  double mass = 0;      ///< \int Q^2
  double kinetic = 0;   ///< \int |grad Q|^2
  double hartree = 0;   ///< D_g(Q, Q)
  double action = 0;    ///< J_g(Q) = (kinetic + mass)/2 - hartree/4
  double pohozaev1 = 0;
  double pohozaev2 = 0;
  double decay_rate = 0;
  double residual = 0;
  double final_update_norm = 0;
  int iterations = 0;
  std::vector<double> action_trace;  ///< populated when keep_action_trace set
};

/// Scales u onto the Nehari manifold: t(u) u with t = sqrt((T + M)/D).
RadialField nehari_project(const RadialField& u, const RadialKernel& kernel);
RadialField nehari_project(const RadialField& u, double gamma);

GroundState solve_ground_state(std::shared_ptr<const RadialGrid> grid, double gamma,
                               const GroundOptions& opts = {},
                               const RadialField* init = nullptr);

/// Relative defects of the two Pohozaev-type identities; recomputed from the
/// field so perturbed inputs are detected.
std::pair<double, double> pohozaev_defects(const RadialField& q, double gamma);

/// Best constant of the interpolation inequality
/// D_g(u,u) <= C_g T^{g/2} M^{(4-g)/2}, from the ground-state mass.
double gn_constant(double gamma, double mass);

struct MassCurveRow {
  double gamma, mass, kinetic, hartree, action, decay_rate;
  int iterations;
};

/// Ground-state curve over an increasing gamma list ending at the critical
/// exponent; solves warm-start by continuation.  Asserts that the mass gap
/// |M(g) - M(2)| strictly decreases over the last three subcritical entries.
std::vector<MassCurveRow> mass_curve(std::shared_ptr<const RadialGrid> grid,
                                     const std::vector<double>& gammas,
                                     const GroundOptions& opts = {});

/// Process-level table of reference ground states on a fixed radial grid,
/// backing the scaling formulas (a* and per-gamma masses).  Thread-safe.
class GroundTable {
public:
  static GroundTable& instance();

  /// Converged reference state at `gamma` (memoized; disk-cached).
  std::shared_ptr<const GroundState> get(double gamma);
  /// a* = mass of the critical-exponent ground state.
  double a_star();
  std::shared_ptr<const RadialGrid> grid() const { return grid_; }

private:
  GroundTable();
  std::shared_ptr<const RadialGrid> grid_;
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace chq

#endif
