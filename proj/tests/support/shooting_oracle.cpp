// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#include "support/shooting_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

// Angular kernel in R^3, independent rewrite of the closed form.
double kernel3(double r, double s, double gamma) {
  if (gamma == 2.0)
    return 2.0 * M_PI / (r * s) * std::log((r + s) / std::abs(r - s));
  const double e = 2.0 - gamma;
  return 2.0 * M_PI / (e * r * s) * (std::pow(r + s, e) - std::pow(std::abs(r - s), e));
}

// \int_a^b K(r, s) s^2 ds, antiderivatives written out directly.
double kernel3_cell(double r, double a, double b, double gamma) {
  if (gamma == 2.0) {
    auto anti = [&](double s) {
      const double d = std::abs(s - r);
      const double lg = (d == 0.0) ? 0.0 : 0.5 * (s * s - r * r) * std::log((s + r) / d);
      return lg + r * s;
    };
    return 2.0 * M_PI / r * (anti(b) - anti(a));
  }
  const double e = 2.0 - gamma;
  auto anti = [&](double s) {
    const double p = r + s;
    const double d = s - r;
    const double ad = std::abs(d);
    const double sg = (d > 0) - (d < 0);
    const double plus = std::pow(p, e + 2) / (e + 2) - r * std::pow(p, e + 1) / (e + 1);
    const double minus = std::pow(ad, e + 2) / (e + 2) + r * sg * std::pow(ad, e + 1) / (e + 1);
    return plus - minus;
  };
  return 2.0 * M_PI / (e * r) * (anti(b) - anti(a));
}

struct Mesh {
  int n;        // node count, nodes at k * dr for k = 0..n
  double dr;
  double r(int k) const { return k * dr; }
};

// phi(r_i) by the midpoint rule over source segments, with the two segments
// adjacent to the target integrated analytically (handles the g = 2 log).
std::vector<double> potential_of(const Mesh& mesh, const std::vector<double>& rho_mid,
                                 double gamma) {
  const int n = mesh.n;
  std::vector<double> phi(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    const double r = mesh.r(i);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double smid = (j + 0.5) * mesh.dr;
      const bool near = (i >= 1 && (j == i - 1 || j == i)) || (i == 0 && j == 0);
      if (near) {
        const double a = j * mesh.dr, b = (j + 1) * mesh.dr;
        if (r == 0.0) {
          // K(0, s) = 4 pi s^{-g}; integrate s^{2-g} exactly.
          acc += rho_mid[j] * 4.0 * M_PI *
                 (std::pow(b, 3.0 - gamma) - std::pow(a, 3.0 - gamma)) / (3.0 - gamma);
        } else {
          acc += rho_mid[j] * kernel3_cell(r, a, b, gamma);
        }
      } else {
        const double k = (r == 0.0) ? 4.0 * M_PI * std::pow(smid, -gamma)
                                    : kernel3(r, smid, gamma);
        acc += rho_mid[j] * k * smid * smid * mesh.dr;
      }
    }
    phi[i] = acc;
  }
  return phi;
}

// Integrates y'' = -(nu + phi) y with y(0) = 0, y'(0) = 1 by RK4 and
// returns the value at the outer radius (sign probe for the bisection).
// phi is given at the mesh nodes; half-step values are averaged.
std::vector<double> integrate_y(const Mesh& mesh, const std::vector<double>& phi,
                                double nu) {
  const int n = mesh.n;
  std::vector<double> y(n + 1);
  double yv = 0.0, yp = 1.0;
  y[0] = 0.0;
  auto coeff = [&](int k) { return -(nu + phi[k]); };
  for (int k = 0; k < n; ++k) {
    const double h = mesh.dr;
    const double c0 = coeff(k);
    const double ch = 0.5 * (coeff(k) + coeff(k + 1));
    const double c1 = coeff(k + 1);
    const double k1v = yp, k1p = c0 * yv;
    const double k2v = yp + 0.5 * h * k1p, k2p = ch * (yv + 0.5 * h * k1v);
    const double k3v = yp + 0.5 * h * k2p, k3p = ch * (yv + 0.5 * h * k2v);
    const double k4v = yp + h * k3p, k4p = c1 * (yv + h * k3v);
    yv += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    yp += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    y[k + 1] = yv;
    // renormalize to avoid overflow; only the sign pattern matters
    const double mag = std::max(std::abs(yv), std::abs(yp));
    if (mag > 1e200) {
      yv /= mag;
      yp /= mag;
      for (int l = 0; l <= k + 1; ++l) y[l] /= mag;
    }
  }
  return y;
}

bool has_node(const std::vector<double>& y) {
  for (std::size_t k = 2; k < y.size(); ++k)
    if (y[k] <= 0.0) return true;
  return false;
}

double simpson(const std::vector<double>& f, double dr) {
  const int n = int(f.size()) - 1;
  double s = f[0] + f[n];
  for (int k = 1; k < n; ++k) s += f[k] * ((k % 2) ? 4.0 : 2.0);
  return s * dr / 3.0;
}

}  // namespace

ShootingResult shoot_ground_state(double gamma, int mesh_nodes, double r_max,
                                  int max_outer, double tol) {
  if (mesh_nodes % 2 != 0) ++mesh_nodes;  // Simpson wants an even interval count
  Mesh mesh{mesh_nodes, r_max / mesh_nodes};
  const int n = mesh.n;

  // psi on nodes; start from a gaussian of roughly the right scale
  std::vector<double> psi(n + 1);
  for (int k = 0; k <= n; ++k) psi[k] = 2.0 * std::exp(-0.5 * mesh.r(k) * mesh.r(k));

  ShootingResult out;
  double prev_rd = 1e300;
  for (int outer = 1; outer <= max_outer; ++outer) {
    // density at segment midpoints (quadratic interpolation is overkill;
    // the average of the endpoints is O(dr^2) which the cell integrals match)
    std::vector<double> rho_mid(n);
    for (int j = 0; j < n; ++j) {
      const double pm = 0.5 * (psi[j] + psi[j + 1]);
      rho_mid[j] = pm * pm;
    }
    auto phi = potential_of(mesh, rho_mid, gamma);

    // ground eigenvalue of -lap - phi by bisection on the node count
    double lo = -(*std::max_element(phi.begin(), phi.end())) - 1.0;
    double hi = -1e-12;
    if (has_node(integrate_y(mesh, phi, lo)))
      throw std::runtime_error("shooting oracle: bracket failure (low)");
    if (!has_node(integrate_y(mesh, phi, hi)))
      throw std::runtime_error("shooting oracle: bracket failure (high)");
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::abs(lo); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (has_node(integrate_y(mesh, phi, mid)))
        hi = mid;
      else
        lo = mid;
    }
    const double nu = 0.5 * (lo + hi);
    auto y = integrate_y(mesh, phi, lo);

    // new iterate: psi = y / r, Nehari-rescaled onto the solution branch
    std::vector<double> cand(n + 1);
    cand[0] = 1.0;  // y'(0) = 1
    for (int k = 1; k <= n; ++k) cand[k] = std::max(y[k], 0.0) / mesh.r(k);
    // kill the exponential tail garbage past the matching decay region
    for (int k = 1; k <= n; ++k) {
      if (cand[k] > cand[k - 1] && mesh.r(k) > 3.0) {
        for (int l = k; l <= n; ++l) cand[l] = 0.0;
        break;
      }
    }

    // scalars for the candidate (Simpson on y-form integrands)
    std::vector<double> rc(n + 1), yk(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double yy = cand[k] * mesh.r(k);
      rc[k] = yy * yy;
    }
    const double cmass = 4.0 * M_PI * simpson(rc, mesh.dr);
    std::vector<double> rho_mid_c(n);
    for (int j = 0; j < n; ++j) {
      const double pm = 0.5 * (cand[j] + cand[j + 1]);
      rho_mid_c[j] = pm * pm;
    }
    auto phi_c = potential_of(mesh, rho_mid_c, gamma);
    for (int k = 0; k <= n; ++k) yk[k] = phi_c[k] * rc[k];
    const double chartree = 4.0 * M_PI * simpson(yk, mesh.dr);
    // -lap cand = (nu + phi) cand with the potential the ODE was solved in
    for (int k = 0; k <= n; ++k) yk[k] = (phi[k] + nu) * rc[k];
    const double ckinetic = 4.0 * M_PI * simpson(yk, mesh.dr);

    const double c = std::sqrt((ckinetic + cmass) / chartree);
    double diff = 0.0, norm = 0.0;
    std::vector<double> next(n + 1);
    for (int k = 0; k <= n; ++k) {
      next[k] = c * cand[k];
      diff += (next[k] - psi[k]) * (next[k] - psi[k]) * mesh.r(k) * mesh.r(k);
      norm += psi[k] * psi[k] * mesh.r(k) * mesh.r(k);
    }
    psi = std::move(next);
    out.outer_iterations = outer;
    out.eigenvalue = nu;
    const double rd = std::sqrt(diff / norm);
    // stop on tolerance or on the bisection-limited noise plateau
    if (rd < tol || (rd < 1e-6 && rd > 0.8 * prev_rd)) {
      out.converged = true;
      break;
    }
    prev_rd = rd;
  }

  // final scalars for the converged psi
  std::vector<double> rc(n + 1), yk(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double yy = psi[k] * mesh.r(k);
    rc[k] = yy * yy;
  }
  std::vector<double> rho_mid(n);
  for (int j = 0; j < n; ++j) {
    const double pm = 0.5 * (psi[j] + psi[j + 1]);
    rho_mid[j] = pm * pm;
  }
  auto phi = potential_of(mesh, rho_mid, gamma);
  out.mass = 4.0 * M_PI * simpson(rc, mesh.dr);
  for (int k = 0; k <= n; ++k) yk[k] = phi[k] * rc[k];
  out.hartree = 4.0 * M_PI * simpson(yk, mesh.dr);
  out.kinetic = out.hartree - out.mass;  // Nehari identity of the converged state
  out.radii.resize(n + 1);
  out.q = psi;
  for (int k = 0; k <= n; ++k) out.radii[k] = mesh.r(k);
  return out;
}

}  // namespace oracles
