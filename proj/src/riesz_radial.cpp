// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <list>
#include <mutex>

#include "chq/errors.hpp"
#include "chq/numutil.hpp"
#include "chq/riesz.hpp"

namespace chq {

namespace {

constexpr int kNearBand = 8;  // cells |i-j| <= band get analytic integration

// (r+s)^{2-g} - |r-s|^{2-g}, written so that the g -> 2 cancellation stays
// accurate (the difference is O(2-g)).
double power_difference(double r, double s, double gamma) {
  const double d = std::abs(r - s);
  const double e = 2.0 - gamma;
  if (d == 0.0) return std::pow(r + s, e);
  return std::pow(d, e) * std::expm1(e * std::log((r + s) / d));
}

// K for N >= 4 by Gauss-Legendre in theta on panels graded toward the
// near-diagonal peak at theta = 0; the integrand is smooth on each panel.
double kernel_quadrature(double r, double s, double gamma, int dim) {
  const auto& [gx, gw] = gauss_legendre(24);
  const double area_sub = unit_sphere_area(dim - 1);
  double total = 0.0;
  double hi = M_PI;
  for (int panel = 0; panel < 44 && hi > 1e-13; ++panel) {
    const double lo = (panel < 43) ? hi * 0.5 : 0.0;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double theta = 0.5 * (hi - lo) * gx[q] + 0.5 * (hi + lo);
      const double jac = 0.5 * (hi - lo) * gw[q];
      const double d2 = (r - s) * (r - s) + 4.0 * r * s * std::pow(std::sin(0.5 * theta), 2);
      total += jac * std::pow(d2, -0.5 * gamma) * std::pow(std::sin(theta), dim - 2);
    }
    hi = lo;
  }
  return area_sub * total;
}

// Analytic \int_a^b K_{3,g}(r,s) s^2 ds for the closed-form N = 3 kernel.
double cell_integral_3d(double r, double a, double b, double gamma) {
  const double two_pi = 2.0 * M_PI;
  if (gamma == 2.0) {
    auto anti = [&](double s) {
      const double d = std::abs(s - r);
      const double lg = (d == 0.0) ? 0.0 : 0.5 * (s * s - r * r) * std::log((s + r) / d);
      return lg + r * s;
    };
    return two_pi / r * (anti(b) - anti(a));
  }
  const double e = 2.0 - gamma;
  auto anti_plus = [&](double s) {
    const double p = r + s;
    return std::pow(p, e + 2.0) / (e + 2.0) - r * std::pow(p, e + 1.0) / (e + 1.0);
  };
  auto anti_minus = [&](double s) {
    const double d = s - r;
    const double ad = std::abs(d);
    const double sg = (d > 0) - (d < 0);
    return std::pow(ad, e + 2.0) / (e + 2.0) + r * sg * std::pow(ad, e + 1.0) / (e + 1.0);
  };
  return two_pi / (e * r) *
         ((anti_plus(b) - anti_plus(a)) - (anti_minus(b) - anti_minus(a)));
}

double cell_integral(double r, double a, double b, double gamma, int dim) {
  if (dim == 3) return cell_integral_3d(r, a, b, gamma);
  // Bounded kernel for N >= 4 (gamma <= 2 < N - 1): plain Gauss-Legendre.
  const auto& [gx, gw] = gauss_legendre(12);
  double total = 0.0;
  for (int q = 0; q < 12; ++q) {
    const double s = 0.5 * (b - a) * gx[q] + 0.5 * (a + b);
    total += 0.5 * (b - a) * gw[q] * kernel_quadrature(r, s, gamma, dim) *
             std::pow(s, dim - 1);
  }
  return total;
}

}  // namespace

double radial_kernel_eval(double r, double s, double gamma, int dim) {
  require(r > 0 && s > 0, ErrorCode::invalid_argument, "kernel: radii must be positive");
  require(gamma > 0 && gamma <= 2.0, ErrorCode::invalid_argument,
          "kernel: gamma must lie in (0, 2]");
  if (dim == 3) {
    if (gamma == 2.0) {
      require(r != s, ErrorCode::diagonal_singularity,
              "kernel: diagonal singularity at gamma = 2; use the cell-integrated matrix");
      return 2.0 * M_PI / (r * s) * std::log((r + s) / std::abs(r - s));
    }
    return 2.0 * M_PI / ((2.0 - gamma) * r * s) * power_difference(r, s, gamma);
  }
  require(!(gamma == 2.0 && r == s) || dim >= 4, ErrorCode::diagonal_singularity,
          "kernel: diagonal singularity");
  return kernel_quadrature(r, s, gamma, dim);
}

RadialKernel::RadialKernel(std::shared_ptr<const RadialGrid> grid, double gamma)
    : grid_(std::move(grid)), gamma_(gamma) {
  require(gamma_ > 0 && gamma_ <= 2.0, ErrorCode::invalid_argument,
          "kernel: gamma must lie in (0, 2]");
  build();
}

RadialKernel::RadialKernel(std::shared_ptr<const RadialGrid> grid, double gamma, FromFile,
                           std::vector<double> matrix)
    : grid_(std::move(grid)), gamma_(gamma), b_(std::move(matrix)) {}

void RadialKernel::build() {
  const int m = grid_->nodes();
  const int dim = grid_->dim();
  const double area = unit_sphere_area(dim);
  const double h = grid_->spacing();
  const auto& w = grid_->weights();
  b_.assign(std::size_t(m) * m, 0.0);

  std::vector<double> meas(m);
  for (int j = 0; j < m; ++j) meas[j] = w[j] / area;

  for (int i = 0; i < m; ++i) {
    const double ri = grid_->node(i);
    for (int j = i; j < m; ++j) {
      double bij;
      if (j - i > kNearBand) {
        bij = area * meas[i] * meas[j] * radial_kernel_eval(ri, grid_->node(j), gamma_, dim);
      } else {
        const double cij = meas[i] * cell_integral(ri, j * h, (j + 1) * h, gamma_, dim);
        const double cji = meas[j] * cell_integral(grid_->node(j), i * h, (i + 1) * h, gamma_, dim);
        bij = area * 0.5 * (cij + cji);
      }
      b_[std::size_t(i) * m + j] = bij;
      b_[std::size_t(j) * m + i] = bij;
    }
  }
}

std::vector<double> RadialKernel::apply_density(std::span<const double> rho) const {
  const int m = grid_->nodes();
  require(int(rho.size()) == m, ErrorCode::invalid_argument, "kernel apply: size mismatch");
  std::vector<double> phi(m, 0.0);
  const auto& w = grid_->weights();
  for (int i = 0; i < m; ++i) {
    const double* row = &b_[std::size_t(i) * m];
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += row[j] * rho[j];
    phi[i] = s / w[i];
  }
  return phi;
}

RadialField RadialKernel::potential(const RadialField& u) const {
  require(u.grid().same_as(*grid_), ErrorCode::invalid_argument,
          "kernel: field grid mismatch");
  std::vector<double> rho(u.size());
  for (int j = 0; j < u.size(); ++j) rho[j] = u[j] * u[j];
  return RadialField(grid_, apply_density(rho));
}

double RadialKernel::hartree_energy(const RadialField& u) const {
  RadialField phi = potential(u);
  const auto& w = grid_->weights();
  double d = 0.0;
  for (int j = 0; j < u.size(); ++j) d += w[j] * phi[j] * u[j] * u[j];
  return d;
}

std::uint64_t RadialKernel::signature() const {
  std::uint64_t sig = grid_->signature();
  sig = fnv1a(&gamma_, sizeof(gamma_), sig);
  const std::uint32_t version = 1;
  sig = fnv1a(&version, sizeof(version), sig);
  return sig;
}

namespace {

constexpr char kKernelMagic[8] = {'C', 'H', 'Q', 'K', 'R', 'N', '1', '\n'};

struct KernelHeader {
  char magic[8];
  std::uint32_t dim;
  std::uint32_t nodes;
  double r_max;
  double gamma;
  std::uint64_t signature;
};

std::string cache_path(const std::string& dir, std::uint64_t sig) {
  char name[64];
  std::snprintf(name, sizeof(name), "kernel_%016llx.bin", (unsigned long long)sig);
  return dir + "/" + name;
}

}  // namespace

bool RadialKernel::save(const std::string& path) const {
  std::FILE* f = std::fopen((path + ".tmp").c_str(), "wb");
  if (!f) return false;
  KernelHeader hd{};
  std::memcpy(hd.magic, kKernelMagic, 8);
  hd.dim = grid_->dim();
  hd.nodes = grid_->nodes();
  hd.r_max = grid_->r_max();
  hd.gamma = gamma_;
  hd.signature = signature();
  bool ok = std::fwrite(&hd, sizeof(hd), 1, f) == 1 &&
            std::fwrite(b_.data(), sizeof(double), b_.size(), f) == b_.size();
  ok = (std::fclose(f) == 0) && ok;
  if (ok) {
    std::error_code ec;
    std::filesystem::rename(path + ".tmp", path, ec);
    ok = !ec;
  }
  if (!ok) std::remove((path + ".tmp").c_str());
  return ok;
}

std::shared_ptr<const RadialKernel> RadialKernel::load_or_build(
    std::shared_ptr<const RadialGrid> grid, double gamma, const std::string& cache_dir) {
  std::uint64_t want_sig;
  {
    RadialKernel probe(grid, gamma, FromFile{}, {});
    want_sig = probe.signature();
  }
  const std::string path = cache_dir.empty() ? "" : cache_path(cache_dir, want_sig);
  if (!path.empty()) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (f) {
      KernelHeader hd{};
      const std::size_t count = std::size_t(grid->nodes()) * grid->nodes();
      std::vector<double> mat(count);
      bool ok = std::fread(&hd, sizeof(hd), 1, f) == 1 &&
                std::memcmp(hd.magic, kKernelMagic, 8) == 0 &&
                hd.signature == want_sig && hd.dim == std::uint32_t(grid->dim()) &&
                hd.nodes == std::uint32_t(grid->nodes()) && hd.r_max == grid->r_max() &&
                hd.gamma == gamma &&
                std::fread(mat.data(), sizeof(double), count, f) == count;
      std::fclose(f);
      if (ok)
        return std::shared_ptr<const RadialKernel>(
            new RadialKernel(grid, gamma, FromFile{}, std::move(mat)));
    }
  }
  auto built = std::make_shared<const RadialKernel>(grid, gamma);
  if (!path.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    built->save(path);
  }
  return built;
}

// ---------------------------------------------------------------------------
// process-level cache + convenience wrappers

namespace cache {
namespace {
std::mutex dir_mutex;
std::string dir_value;
bool dir_initialized = false;
}  // namespace

void set_directory(const std::string& dir) {
  std::lock_guard<std::mutex> lock(dir_mutex);
  dir_value = dir;
  dir_initialized = true;
}

std::string directory() {
  std::lock_guard<std::mutex> lock(dir_mutex);
  if (!dir_initialized) {
    const char* env = std::getenv("CHQ_CACHE_DIR");
    dir_value = env ? env : "";
    dir_initialized = true;
  }
  return dir_value;
}
}  // namespace cache

std::shared_ptr<const RadialKernel> shared_radial_kernel(
    std::shared_ptr<const RadialGrid> grid, double gamma) {
  struct Entry {
    std::uint64_t grid_sig;
    double gamma;
    std::shared_ptr<const RadialKernel> kernel;
  };
  static std::list<Entry> lru;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  for (auto it = lru.begin(); it != lru.end(); ++it) {
    if (it->grid_sig == grid->signature() && it->gamma == gamma) {
      lru.splice(lru.begin(), lru, it);
      return lru.front().kernel;
    }
  }
  auto kern = RadialKernel::load_or_build(grid, gamma, cache::directory());
  lru.push_front({grid->signature(), gamma, kern});
  while (lru.size() > 4) lru.pop_back();
  return kern;
}

RadialField riesz_apply(const RadialField& u, double gamma) {
  return shared_radial_kernel(u.grid_ptr(), gamma)->potential(u);
}

double hartree_energy(const RadialField& u, double gamma) {
  return shared_radial_kernel(u.grid_ptr(), gamma)->hartree_energy(u);
}

}  // namespace chq
