// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_POTENTIAL_HPP
#define CHQ_POTENTIAL_HPP

#include <array>
#include <memory>
#include <vector>

#include "chq/fields.hpp"

namespace chq {

enum class PotentialKind { harmonic, product_wells, tabulated };

struct Well {
  std::array<double, 3> x;
  double p;  ///< local vanishing order, > 0
};

/// Confining potential V >= 0 with V -> infinity at infinity.
///
/// harmonic:      V = scale |x|^2
/// product_wells: V = scale prod_i |x - x_i|^{p_i}
/// tabulated:     sampled field, tricubic interpolation (no flatness data)
class Potential {
public:
  static Potential harmonic(double scale = 1.0);
  static Potential product_wells(std::vector<Well> wells, double scale = 1.0);
  static Potential tabulated(CartesianField values);

  PotentialKind kind() const { return kind_; }
  double scale() const { return scale_; }
  const std::vector<Well>& wells() const { return wells_; }
  bool radial() const;

  double operator()(double x, double y, double z) const;

  /// Flatness data: overall order p = max p_i, the limit coefficients
  /// lambda_i = lim V / |x - x_i|^{p_i}, and the flattest set (indices of
  /// wells with p_i = p and minimal lambda).  Unavailable for tabulated
  /// potentials.
  struct Flatness {
    double p = 0;
    std::vector<double> lambda;
    std::vector<int> flattest;
  };
  Flatness flatness() const;

  /// Spherical mean of V over the sphere of radius rho about x0.
  double spherical_mean(const std::array<double, 3>& x0, double rho) const;

  /// Confinement check on a grid: the smallest boundary value must dominate
  /// the well-region values.
  void check_confining(const CartesianGrid& g,
                       const std::array<double, 3>& center, double window) const;

  std::uint64_t signature() const;

private:
  Potential() = default;
  PotentialKind kind_ = PotentialKind::harmonic;
  double scale_ = 1.0;
  std::vector<Well> wells_;
  std::shared_ptr<const CartesianField> table_;
};

}  // namespace chq

#endif
