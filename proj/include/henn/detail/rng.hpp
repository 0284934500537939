// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace henn::detail {

// Deterministic uniform doubles on top of mt19937_64. We avoid
// std::uniform_real_distribution because its output sequence is
// implementation-defined; dividing the top 53 bits is portable.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on [-limit, +limit).
inline double uniform_symmetric(std::mt19937_64& rng, double limit) {
  return (2.0 * uniform01(rng) - 1.0) * limit;
}

// Portable Fisher-Yates; modulo bias is irrelevant at these sizes.
inline void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace henn::detail
