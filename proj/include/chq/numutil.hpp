// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_NUMUTIL_HPP
#define CHQ_NUMUTIL_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace chq {

/// Gauss-Legendre nodes and weights on [-1, 1].
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

/// FNV-1a over a byte view; used for config hashing and cache keys.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace chq

#endif
