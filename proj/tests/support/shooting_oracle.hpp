// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference solver for the radial ground state of
//   -lap Q + Q = (|x|^{-g} * Q^2) Q   in R^3,
// used only to cross-check the production solver.  The discretization and
// the algorithm are deliberately different: a node-centered shooting mesh,
// RK4 integration of y'' = -(nu + phi) y for y = r psi, eigenvalue
// bisection, and a damped self-consistency loop with Nehari rescaling.
#ifndef CHQ_TESTS_SHOOTING_ORACLE_HPP
#define CHQ_TESTS_SHOOTING_ORACLE_HPP

#include <vector>

namespace oracles {

struct ShootingResult {
  double mass = 0;     // \int Q^2
  double kinetic = 0;  // \int |grad Q|^2
  double hartree = 0;  // D_g(Q, Q)
  double eigenvalue = 0;
  int outer_iterations = 0;
  bool converged = false;
  std::vector<double> radii;
  std::vector<double> q;
};

ShootingResult shoot_ground_state(double gamma, int mesh_nodes = 2400,
                                  double r_max = 24.0, int max_outer = 150,
                                  double tol = 3e-8);

}  // namespace oracles

#endif
