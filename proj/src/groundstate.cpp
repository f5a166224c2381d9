// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#include "chq/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <mutex>

#include "chq/errors.hpp"
#include "chq/numutil.hpp"

namespace chq {

namespace {

struct Workspace {
  const RadialGrid& g;
  const RadialKernel& kernel;

  double mass(std::span<const double> u) const {
    const auto& w = g.weights();
    double s = 0;
    for (int j = 0; j < g.nodes(); ++j) s += w[j] * u[j] * u[j];
    return s;
  }

  double kinetic(std::span<const double> u) const {
    const int m = g.nodes();
    const double h = g.spacing();
    double s = 0;
    for (int k = 1; k <= m; ++k) {
      const double hi = (k == m) ? 0.0 : u[k];
      const double d = (hi - u[k - 1]) / h;
      s += d * d * std::pow(k * h, g.dim() - 1) * h;
    }
    return s * unit_sphere_area(g.dim());
  }

  std::vector<double> potential(std::span<const double> u) const {
    std::vector<double> rho(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) rho[j] = u[j] * u[j];
    return kernel.apply_density(rho);
  }

  double hartree(std::span<const double> u, std::span<const double> phi) const {
    const auto& w = g.weights();
    double s = 0;
    for (int j = 0; j < g.nodes(); ++j) s += w[j] * phi[j] * u[j] * u[j];
    return s;
  }

  // -Lap u + u - phi u  (the L2 gradient of J and the PDE residual).
  std::vector<double> gradient(std::span<const double> u, std::span<const double> phi) const {
    const int m = g.nodes();
    const int dim = g.dim();
    const double h = g.spacing();
    const double area = unit_sphere_area(dim);
    std::vector<double> r(m);
    for (int j = 0; j < m; ++j) {
      const double mj = g.weights()[j] / area;
      const double s_lo = (j == 0) ? 0.0 : std::pow(j * h, dim - 1);
      const double s_hi = std::pow((j + 1) * h, dim - 1);
      const double u_lo = (j == 0) ? u[0] : u[j - 1];
      const double u_hi = (j == m - 1) ? 0.0 : u[j + 1];
      const double flux_lo = (j == 0) ? 0.0 : s_lo * (u[j] - u_lo) / h;
      const double flux_hi = s_hi * (u_hi - u[j]) / h;
      r[j] = -(flux_hi - flux_lo) / mj + u[j] - phi[j] * u[j];
    }
    return r;
  }

  double wdot(std::span<const double> a, std::span<const double> b) const {
    const auto& w = g.weights();
    double s = 0;
    for (int j = 0; j < g.nodes(); ++j) s += w[j] * a[j] * b[j];
    return s;
  }
};

double nehari_scale(double kin, double mass, double hartree) {
  require(hartree > 0, ErrorCode::degenerate_direction,
          "nehari projection: degenerate direction (D_g(u,u) = 0)");
  return std::sqrt((kin + mass) / hartree);
}

}  // namespace

RadialField nehari_project(const RadialField& u, const RadialKernel& kernel) {
  Workspace ws{u.grid(), kernel};
  auto s = u.samples();
  const double t = nehari_scale(ws.kinetic(s), ws.mass(s), kernel.hartree_energy(u));
  std::vector<double> v(s.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = t * s[j];
  return RadialField(u.grid_ptr(), std::move(v));
}

RadialField nehari_project(const RadialField& u, double gamma) {
  return nehari_project(u, *shared_radial_kernel(u.grid_ptr(), gamma));
}

GroundState solve_ground_state(std::shared_ptr<const RadialGrid> grid, double gamma,
                               const GroundOptions& opts, const RadialField* init) {
  require(gamma > 0 && gamma <= 2.0, ErrorCode::invalid_argument,
          "ground solve: gamma must lie in (0, 2]");
  auto kernel = shared_radial_kernel(grid, gamma);
  Workspace ws{*grid, *kernel};
  const int m = grid->nodes();

  std::vector<double> u(m);
  if (init) {
    require(init->grid().same_as(*grid), ErrorCode::invalid_argument,
            "ground solve: warm start grid mismatch");
    for (int j = 0; j < m; ++j) u[j] = std::max(init->operator[](j), 0.0);
  } else {
    for (int j = 0; j < m; ++j) u[j] = std::exp(-0.5 * grid->node(j) * grid->node(j));
  }

  auto project = [&](std::vector<double>& v) {
    std::vector<double> rho(m);
    for (int j = 0; j < m; ++j) rho[j] = v[j] * v[j];
    auto phi = kernel->apply_density(rho);
    const double t = nehari_scale(ws.kinetic(v), ws.mass(v), ws.hartree(v, phi));
    for (int j = 0; j < m; ++j) v[j] *= t;
  };
  project(u);

  auto action_of = [&](std::span<const double> v, std::vector<double>& phi_out) {
    phi_out = ws.potential(v);
    return 0.5 * (ws.kinetic(v) + ws.mass(v)) - 0.25 * ws.hartree(v, phi_out);
  };

  std::vector<double> phi;
  double action = action_of(u, phi);

  GroundState out{gamma, grid->dim(), RadialField(grid, u)};
  if (opts.keep_action_trace) out.action_trace.push_back(action);

  std::vector<double> u_prev, step_prev;
  double alpha = 1.0;
  int positivity_fixes = 0;
  double update_norm = 0, rel_resid = 0;
  int iter = 0;
  bool converged = false;

  for (iter = 1; iter <= opts.max_iterations; ++iter) {
    auto grad = ws.gradient(u, phi);
    const double unorm = std::sqrt(ws.mass(u));
    rel_resid = std::sqrt(ws.wdot(grad, grad)) / unorm;

    auto dir = radial_helmholtz_solve(*grid, 1.0, {}, grad);

    // Barzilai-Borwein scale from the previous accepted move, safeguarded.
    if (!u_prev.empty()) {
      std::vector<double> s(m), y(m);
      for (int j = 0; j < m; ++j) {
        s[j] = u[j] - u_prev[j];
        y[j] = dir[j] - step_prev[j];
      }
      const double sy = ws.wdot(s, y);
      const double ss = ws.wdot(s, s);
      alpha = (sy > 1e-30) ? std::clamp(ss / sy, 1e-3, 50.0) : 1.0;
    }
    u_prev = u;
    step_prev = dir;

    bool accepted = false;
    double trial_alpha = alpha;
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<double> v(m);
      double neg2 = 0;
      for (int j = 0; j < m; ++j) {
        v[j] = u[j] - trial_alpha * dir[j];
        if (v[j] < 0) {
          neg2 += v[j] * v[j] * grid->weights()[j];
          v[j] = 0;
        }
      }
      std::vector<double> phi_v;
      double action_v;
      try {
        project(v);
        action_v = action_of(v, phi_v);
      } catch (const Error&) {
        trial_alpha *= 0.5;
        continue;
      }
      if (action_v <= action + 1e-14 * std::abs(action)) {
        if (neg2 > 1e-20 * ws.mass(u) &&
            ++positivity_fixes > opts.max_positivity_fixes)
          fail(ErrorCode::solver_failure,
               "ground solve: loss of positivity (negative minimum detected repeatedly)");
        std::vector<double> dv(m);
        for (int j = 0; j < m; ++j) dv[j] = v[j] - u[j];
        update_norm = std::sqrt(ws.kinetic(dv) + ws.mass(dv));
        u = std::move(v);
        phi = std::move(phi_v);
        action = action_v;
        accepted = true;
        break;
      }
      trial_alpha *= 0.5;
    }
    if (opts.keep_action_trace) out.action_trace.push_back(action);

    if (!accepted) {
      if (rel_resid <= opts.tol_residual) {
        converged = true;
        break;
      }
      fail(ErrorCode::solver_failure,
           "ground solve: no descent direction (gamma=" + std::to_string(gamma) +
               ", residual=" + std::to_string(rel_resid) + ")");
    }
    if (rel_resid <= opts.tol_residual && update_norm <= opts.tol_update) {
      converged = true;
      break;
    }
  }
  if (!converged)
    fail(ErrorCode::solver_failure,
         "ground solve: not converged in " + std::to_string(opts.max_iterations) +
             " iterations (gamma=" + std::to_string(gamma) +
             ", residual=" + std::to_string(rel_resid) + ")");

  out.q = RadialField(grid, u);
  out.mass = ws.mass(u);
  out.kinetic = ws.kinetic(u);
  out.hartree = ws.hartree(u, phi);
  out.action = 0.5 * (out.kinetic + out.mass) - 0.25 * out.hartree;
  auto defects = pohozaev_defects(out.q, gamma);
  out.pohozaev1 = defects.first;
  out.pohozaev2 = defects.second;
  out.decay_rate = fit_decay_rate(out.q);
  out.residual = rel_resid;
  out.final_update_norm = update_norm;
  out.iterations = iter;

  require(out.mass > 0 && out.kinetic > 0 && out.hartree > 0, ErrorCode::solver_failure,
          "ground solve: degenerate converged state");
  return out;
}

std::pair<double, double> pohozaev_defects(const RadialField& q, double gamma) {
  const int dim = q.grid().dim();
  const double t = q.kinetic();
  const double m = q.mass();
  const double d = hartree_energy(q, gamma);

  const double lhs1 = 0.5 * (dim - 2) * t + 0.5 * dim * m;
  const double rhs1 = 0.25 * (2.0 * dim - gamma) * d;
  const double rho1 = std::abs(lhs1 - rhs1) / std::max(std::abs(lhs1), std::abs(rhs1));

  const double q1 = t / gamma, q2 = m / (4.0 - gamma), q3 = 0.25 * d;
  const double scale = std::max({std::abs(q1), std::abs(q2), std::abs(q3)});
  const double rho2 =
      std::max({std::abs(q1 - q2), std::abs(q1 - q3), std::abs(q2 - q3)}) / scale;
  return {rho1, rho2};
}

double gn_constant(double gamma, double mass) {
  return 4.0 / (4.0 - gamma) * std::pow((4.0 - gamma) / gamma, 0.5 * gamma) / mass;
}

std::vector<MassCurveRow> mass_curve(std::shared_ptr<const RadialGrid> grid,
                                     const std::vector<double>& gammas,
                                     const GroundOptions& opts) {
  require(!gammas.empty(), ErrorCode::invalid_argument, "mass curve: empty gamma list");
  require(std::is_sorted(gammas.begin(), gammas.end()), ErrorCode::invalid_argument,
          "mass curve: gamma list must be increasing");
  require(gammas.back() == 2.0, ErrorCode::invalid_argument,
          "mass curve: gamma list must end at the critical exponent 2");

  std::vector<MassCurveRow> rows;
  std::unique_ptr<RadialField> warm;
  double prev_gamma = 0.0;
  for (double target : gammas) {
    // Continuation: refine the warm-start spacing to 0.05 (0.01 above 1.9).
    std::vector<double> path;
    if (warm) {
      double g = prev_gamma;
      while (g < target) {
        const double step = (g >= 1.9) ? 0.01 : 0.05;
        g = std::min(g + step, target);
        path.push_back(g);
      }
    } else {
      path.push_back(target);
    }
    GroundState gs;
    for (double g : path) {
      gs = solve_ground_state(grid, g, opts, warm.get());
      warm = std::make_unique<RadialField>(gs.q);
      prev_gamma = g;
    }
    rows.push_back({gs.gamma, gs.mass, gs.kinetic, gs.hartree, gs.action, gs.decay_rate,
                    gs.iterations});
  }

  // Theorem-style trend: the mass gap to the critical state must strictly
  // decrease over the last three subcritical entries.
  const double m2 = rows.back().mass;
  std::vector<double> gaps;
  for (const auto& r : rows)
    if (r.gamma < 2.0) gaps.push_back(std::abs(r.mass - m2));
  if (gaps.size() >= 3) {
    const std::size_t n = gaps.size();
    require(gaps[n - 3] > gaps[n - 2] && gaps[n - 2] > gaps[n - 1],
            ErrorCode::solver_failure,
            "mass curve: mass gap not strictly decreasing toward the critical exponent");
  }
  return rows;
}

// ---------------------------------------------------------------------------
// reference table

namespace {

constexpr char kGroundMagic[8] = {'C', 'H', 'Q', 'G', 'R', 'D', '1', '\n'};

struct GroundHeader {
  char magic[8];
  std::uint32_t dim;
  std::uint32_t nodes;
  double r_max;
  double gamma;
  double tol_residual;
  double tol_update;
  double scalars[8];
  std::int32_t iterations;
  std::uint32_t pad;
};

std::string ground_cache_path(const std::string& dir, const RadialGrid& g, double gamma,
                              const GroundOptions& opts) {
  std::uint64_t sig = g.signature();
  sig = fnv1a(&gamma, sizeof(gamma), sig);
  sig = fnv1a(&opts.tol_residual, sizeof(double), sig);
  sig = fnv1a(&opts.tol_update, sizeof(double), sig);
  char name[64];
  std::snprintf(name, sizeof(name), "ground_%016llx.bin", (unsigned long long)sig);
  return dir + "/" + name;
}

bool save_ground(const std::string& path, const GroundState& gs, const GroundOptions& opts) {
  std::FILE* f = std::fopen((path + ".tmp").c_str(), "wb");
  if (!f) return false;
  GroundHeader hd{};
  std::memcpy(hd.magic, kGroundMagic, 8);
  hd.dim = gs.dim;
  hd.nodes = gs.q.grid().nodes();
  hd.r_max = gs.q.grid().r_max();
  hd.gamma = gs.gamma;
  hd.tol_residual = opts.tol_residual;
  hd.tol_update = opts.tol_update;
  hd.scalars[0] = gs.mass;
  hd.scalars[1] = gs.kinetic;
  hd.scalars[2] = gs.hartree;
  hd.scalars[3] = gs.action;
  hd.scalars[4] = gs.pohozaev1;
  hd.scalars[5] = gs.pohozaev2;
  hd.scalars[6] = gs.decay_rate;
  hd.scalars[7] = gs.residual;
  hd.iterations = gs.iterations;
  auto s = gs.q.samples();
  bool ok = std::fwrite(&hd, sizeof(hd), 1, f) == 1 &&
            std::fwrite(s.data(), sizeof(double), s.size(), f) == s.size();
  ok = (std::fclose(f) == 0) && ok;
  if (ok) {
    std::error_code ec;
    std::filesystem::rename(path + ".tmp", path, ec);
    ok = !ec;
  }
  if (!ok) std::remove((path + ".tmp").c_str());
  return ok;
}

bool load_ground(const std::string& path, std::shared_ptr<const RadialGrid> grid,
                 double gamma, const GroundOptions& opts, GroundState& out) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) return false;
  GroundHeader hd{};
  std::vector<double> samples(grid->nodes());
  bool ok = std::fread(&hd, sizeof(hd), 1, f) == 1 &&
            std::memcmp(hd.magic, kGroundMagic, 8) == 0 &&
            hd.dim == std::uint32_t(grid->dim()) &&
            hd.nodes == std::uint32_t(grid->nodes()) && hd.r_max == grid->r_max() &&
            hd.gamma == gamma && hd.tol_residual == opts.tol_residual &&
            hd.tol_update == opts.tol_update &&
            std::fread(samples.data(), sizeof(double), samples.size(), f) ==
                samples.size();
  std::fclose(f);
  if (!ok) return false;
  out.gamma = gamma;
  out.dim = grid->dim();
  out.q = RadialField(grid, std::move(samples));
  out.mass = hd.scalars[0];
  out.kinetic = hd.scalars[1];
  out.hartree = hd.scalars[2];
  out.action = hd.scalars[3];
  out.pohozaev1 = hd.scalars[4];
  out.pohozaev2 = hd.scalars[5];
  out.decay_rate = hd.scalars[6];
  out.residual = hd.scalars[7];
  out.iterations = hd.iterations;
  return true;
}

}  // namespace

struct GroundTable::Impl {
  std::mutex mu;
  std::map<double, std::shared_ptr<const GroundState>> states;
  GroundOptions opts;
};

GroundTable::GroundTable()
    : grid_(std::make_shared<RadialGrid>(3, 2048, 20.0)), impl_(std::make_shared<Impl>()) {}

GroundTable& GroundTable::instance() {
  static GroundTable table;
  return table;
}

std::shared_ptr<const GroundState> GroundTable::get(double gamma) {
  std::lock_guard<std::mutex> lock(impl_->mu);
  auto it = impl_->states.find(gamma);
  if (it != impl_->states.end()) return it->second;

  const std::string dir = cache::directory();
  if (!dir.empty()) {
    GroundState gs;
    if (load_ground(ground_cache_path(dir, *grid_, gamma, impl_->opts), grid_, gamma,
                    impl_->opts, gs)) {
      auto sp = std::make_shared<const GroundState>(std::move(gs));
      impl_->states.emplace(gamma, sp);
      return sp;
    }
  }

  // Warm start from the nearest cached state below, if any.
  const RadialField* warm = nullptr;
  for (auto& [g, s] : impl_->states)
    if (g <= gamma) warm = &s->q;
  GroundState gs = solve_ground_state(grid_, gamma, impl_->opts, warm);
  if (!dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    save_ground(ground_cache_path(dir, *grid_, gamma, impl_->opts), gs, impl_->opts);
  }
  auto sp = std::make_shared<const GroundState>(std::move(gs));
  impl_->states.emplace(gamma, sp);
  return sp;
}

double GroundTable::a_star() { return get(2.0)->mass; }

}  // namespace chq
