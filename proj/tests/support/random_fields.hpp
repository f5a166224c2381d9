// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_TESTS_RANDOM_FIELDS_HPP
#define CHQ_TESTS_RANDOM_FIELDS_HPP

#include <random>

#include "chq/fields.hpp"

namespace oracles {

/// Smooth positive radial test field: a few random gaussian bumps.
inline chq::RadialField random_smooth_field(std::shared_ptr<const chq::RadialGrid> grid,
                                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.2, 1.0), width(0.4, 2.5), center(0.0, 3.0);
  const double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
  const double b1 = width(rng), b2 = width(rng), b3 = width(rng);
  const double c1 = center(rng), c2 = center(rng), c3 = center(rng);
  return chq::RadialField::sample(grid, [=](double r) {
    return a1 * std::exp(-b1 * (r - c1) * (r - c1)) +
           a2 * std::exp(-b2 * (r - c2) * (r - c2)) +
           a3 * std::exp(-b3 * (r - c3) * (r - c3));
  });
}

}  // namespace oracles

#endif
