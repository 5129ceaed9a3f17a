#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace vbpbb::rng {

using Engine = std::mt19937_64;

/**
 * @brief Independent engine for one (stream, index) pair under a master seed.
 *
 * The engine state depends only on the three keys, so replicate j draws the
 * same numbers whichever thread runs it and in whatever order.
 */
[[nodiscard]] Engine substream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index);

/// Unbiased draw from {0, ..., n-1}; n must be positive. Portable across standard libraries.
[[nodiscard]] std::size_t uniform_index(Engine& engine, std::size_t n);

/// Seed from system entropy, used only when the caller supplied none.
[[nodiscard]] std::uint64_t entropy_seed();

}  // namespace vbpbb::rng
