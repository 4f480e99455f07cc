#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace peac {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent substream keys.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives a substream engine from a root seed and a path of stream indices,
/// e.g. (seed, theta_index, dataset_index). The same path always yields the
/// same engine regardless of the order in which streams are created.
Engine make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

}  // namespace peac
