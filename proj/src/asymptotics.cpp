// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#include "chq/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "chq/errors.hpp"

namespace chq {

namespace {
void require_subcritical(double gamma) {
  require(gamma > 0 && gamma < 2.0, ErrorCode::critical_exponent,
          "scaling formulas diverge at the critical exponent gamma = 2");
}
}  // namespace

double tilde_e(double gamma, double a, double mass) {
  require_subcritical(gamma);
  require(a > 0 && mass > 0, ErrorCode::invalid_argument,
          "tilde_e: a and mass must be positive");
  return (gamma - 2.0) / (4.0 - gamma) * std::pow(a / mass, 2.0 / (2.0 - gamma));
}

double tau_scale(double gamma, double a, double mass) {
  require_subcritical(gamma);
  require(a > 0 && mass > 0, ErrorCode::invalid_argument,
          "tau: a and mass must be positive");
  return std::sqrt(gamma / (4.0 - gamma)) * std::pow(a / mass, 1.0 / (2.0 - gamma));
}

double epsilon_scale(double gamma, double a, double mass) {
  require_subcritical(gamma);
  require(a > 0 && mass > 0, ErrorCode::invalid_argument,
          "epsilon: a and mass must be positive");
  return std::pow(a / mass, -1.0 / (2.0 - gamma));
}

CartesianField rescale_profile(const CartesianField& u, const std::array<double, 3>& z,
                               double eps) {
  require(eps > 0, ErrorCode::invalid_argument, "rescale: eps must be positive");
  const auto& g = u.grid();
  const int n = g.n();
  const double L = g.half_extent();

  // if sampling reaches outside the box, the zero extension must be harmless
  const double reach =
      eps * L + std::max({std::abs(z[0]), std::abs(z[1]), std::abs(z[2])});
  if (reach > L) {
    double interior_max = 0.0, shell_max = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double v = std::abs(u.at(i, j, k));
          const bool shell = i < 2 || j < 2 || k < 2 || i >= n - 2 || j >= n - 2 ||
                             k >= n - 2;
          (shell ? shell_max : interior_max) = std::max(shell ? shell_max : interior_max, v);
        }
    require(shell_max <= 1e-8 * interior_max, ErrorCode::domain_exceeded,
            "rescale: lattice exceeds the field's domain and the boundary data "
            "is not negligible");
  }

  const double amp = std::pow(eps, 1.5);
  std::vector<double> out(g.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out[g.index(i, j, k)] = amp * u.interp(eps * g.coord(i) + z[0],
                                               eps * g.coord(j) + z[1],
                                               eps * g.coord(k) + z[2]);
  return CartesianField(u.grid_ptr(), std::move(out));
}

std::pair<double, double> profile_distance(const CartesianField& vtilde,
                                           const GroundState& q2) {
  const auto& g = vtilde.grid();
  const int n = g.n();
  const double inv_norm = 1.0 / std::sqrt(q2.mass);
  std::vector<double> diff(g.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double x = g.coord(i), y = g.coord(j), zc = g.coord(k);
        const double r = std::sqrt(x * x + y * y + zc * zc);
        diff[g.index(i, j, k)] = vtilde.at(i, j, k) - inv_norm * q2.q.interp(r);
      }
  CartesianField d(vtilde.grid_ptr(), std::move(diff));
  const double d2 = std::sqrt(d.mass());
  const double dh1 = std::sqrt(d.mass() + d.kinetic());
  return {d2, dh1};
}

double radial_moment(const GroundState& gs, double p) {
  const auto& g = gs.q.grid();
  double acc = 0.0;
  for (int j = 0; j < gs.q.size(); ++j)
    acc += g.weights()[j] * std::pow(g.node(j), p) * gs.q[j] * gs.q[j];
  return acc;
}

ConcentrationReport concentration_report(const std::vector<TrappedSolution>& runs,
                                         const Potential& V) {
  require(runs.size() >= 2, ErrorCode::invalid_argument,
          "report: need at least two runs");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    require(i == 0 || runs[i].gamma > runs[i - 1].gamma, ErrorCode::invalid_argument,
            "report: inconsistent sweep metadata (gammas must increase)");
    require(std::abs(runs[i].a - runs[0].a) <= 1e-12 * std::abs(runs[0].a),
            ErrorCode::invalid_argument,
            "report: inconsistent sweep metadata (a differs between runs)");
  }

  auto& table = GroundTable::instance();
  auto q2 = table.get(2.0);

  const auto flat = V.flatness();

  // basin assignment of the final maximizer: nearest declared well
  const auto& zf = runs.back().zbar;
  int y0 = 0;
  double y0_dist = 1e300;
  for (std::size_t i = 0; i < V.wells().size(); ++i) {
    const auto& w = V.wells()[i].x;
    const double d =
        std::hypot(zf[0] - w[0], zf[1] - w[1], zf[2] - w[2]);
    if (d < y0_dist) {
      y0_dist = d;
      y0 = int(i);
    }
  }
  const auto& wy0 = V.wells()[y0].x;

  ConcentrationReport rep;
  for (const auto& run : runs) {
    ScalingRow row;
    row.gamma = run.gamma;
    row.a = run.a;
    row.mass_gamma = table.get(run.gamma)->mass;
    row.eps = run.eps;
    row.tau = tau_scale(run.gamma, run.a, row.mass_gamma);
    row.tilde_e_closed = tilde_e(run.gamma, run.a, row.mass_gamma);
    row.energy = run.energy;
    row.gap = run.gap;
    row.gap_halfwidth = run.gap_halfwidth;
    row.pot_energy = run.potential_energy;
    row.beta2 = run.eps * run.eps * run.kinetic;
    // translate the solve-coordinate field so the maximizer sits at the origin
    std::array<double, 3> shift{(run.zbar[0] - run.center[0]) / run.eps,
                                (run.zbar[1] - run.center[1]) / run.eps,
                                (run.zbar[2] - run.center[2]) / run.eps};
    auto vt = rescale_profile(run.field, shift, 1.0);
    auto dist = profile_distance(vt, *q2);
    row.d2 = dist.first;
    row.dh1 = dist.second;
    row.rho = std::hypot(run.zbar[0] - wy0[0], run.zbar[1] - wy0[1],
                         run.zbar[2] - wy0[2]) /
              run.eps;
    row.q = run.gap / std::pow(run.eps, flat.p);
    rep.rows.push_back(row);
  }

  auto& v = rep.verdicts;
  const std::size_t n = rep.rows.size();
  const std::size_t first = n >= 3 ? n - 3 : 0;

  v.gap_nonneg = true;
  for (const auto& r : rep.rows)
    v.gap_nonneg = v.gap_nonneg &&
                   r.gap >= -std::max(1e-8, 4.0 * r.gap_halfwidth);
  auto strictly_decreasing = [&](auto key) {
    for (std::size_t i = first + 1; i < n; ++i)
      if (!(key(rep.rows[i]) < key(rep.rows[i - 1]))) return false;
    return true;
  };
  v.gap_decreasing = strictly_decreasing([](const ScalingRow& r) { return r.gap; });
  v.pot_decreasing =
      strictly_decreasing([](const ScalingRow& r) { return r.pot_energy; });
  v.d2_decreasing = strictly_decreasing([](const ScalingRow& r) { return r.d2; });
  v.rho_decreasing = strictly_decreasing([](const ScalingRow& r) { return r.rho; });
  v.beta_improving =
      strictly_decreasing([](const ScalingRow& r) { return std::abs(r.beta2 - 1.0); });
  v.beta_final_ok = std::abs(rep.rows.back().beta2 - 1.0) <= 0.15;

  v.y0_well = y0;
  v.y0_distance = y0_dist;
  v.y0_flattest = std::find(flat.flattest.begin(), flat.flattest.end(), y0) !=
                  flat.flattest.end();

  v.q_bound = flat.lambda[y0] * radial_moment(*q2, flat.p) / q2->mass;
  v.q_final_ok = rep.rows.back().q <= 1.2 * v.q_bound;
  return rep;
}

}  // namespace chq
