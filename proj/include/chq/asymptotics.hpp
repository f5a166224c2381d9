// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_ASYMPTOTICS_HPP
#define CHQ_ASYMPTOTICS_HPP

#include <array>
#include <vector>

#include "chq/groundstate.hpp"
#include "chq/potential.hpp"
#include "chq/trapped.hpp"

namespace chq {

/// Closed-form minimum of the trap-free constrained energy,
/// ((g - 2)/(4 - g)) (a/M)^{2/(2-g)}; diverges at the critical exponent.
double tilde_e(double gamma, double a, double mass);

/// tau = sqrt(g/(4-g)) (a/M)^{1/(2-g)}; kinetic scale of the minimizer.
double tau_scale(double gamma, double a, double mass);

/// eps = (a/M)^{-1/(2-g)}; concentration length.
double epsilon_scale(double gamma, double a, double mass);

/// vt(x) = eps^{3/2} u(eps x + z) by tricubic interpolation onto the same
/// lattice.  Points falling outside u's box use the zero extension; if u is
/// not negligible on its boundary shell this is refused.
CartesianField rescale_profile(const CartesianField& u,
                               const std::array<double, 3>& z, double eps);

/// L2 and H1 distances between a rescaled profile and the normalized
/// critical ground state Q2/||Q2||.
std::pair<double, double> profile_distance(const CartesianField& vtilde,
                                           const GroundState& q2);

/// \int |x|^p Q^2 dx by radial quadrature.
double radial_moment(const GroundState& gs, double p);

struct ScalingRow {
  double gamma = 0, a = 0;
  double mass_gamma = 0;  ///< ||Q_gamma||_2^2
  double eps = 0, tau = 0;
  double tilde_e_closed = 0;
  double energy = 0;
  double gap = 0;            ///< e_a minus the grid-matched trap-free minimum
  double gap_halfwidth = 0;
  double pot_energy = 0;
  double beta2 = 0;  ///< eps^2 \int |grad u|^2
  double d2 = 0, dh1 = 0;
  double rho = 0;  ///< |zbar - y0| / eps
  double q = 0;    ///< gap / eps^p
};

struct ReportVerdicts {
  bool gap_nonneg = false;
  bool gap_decreasing = false;
  bool pot_decreasing = false;
  bool d2_decreasing = false;
  bool beta_final_ok = false;    ///< |beta^2 - 1| <= 0.15 at the last gamma
  bool beta_improving = false;   ///< |beta^2 - 1| strictly decreasing (final three)
  bool rho_decreasing = false;
  bool q_final_ok = false;       ///< q(last) <= 1.2 x the moment bound
  int y0_well = -1;              ///< basin assignment of the final maximizer
  double y0_distance = 0;        ///< distance from zbar(last) to that well
  bool y0_flattest = false;      ///< the assigned well belongs to the flattest set
  double q_bound = 0;            ///< lambda(y0) \int |x|^p Q2^2 / ||Q2||^2
};

struct ConcentrationReport {
  std::vector<ScalingRow> rows;
  ReportVerdicts verdicts;
};

/// Scaling battery over a sweep of converged runs at increasing gamma with
/// common a and V.  Trend verdicts compare the final three entries.
ConcentrationReport concentration_report(const std::vector<TrappedSolution>& runs,
                                         const Potential& V);

}  // namespace chq

#endif
