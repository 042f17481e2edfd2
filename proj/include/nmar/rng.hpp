#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nmar {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a base seed and a list of stream
/// coordinates, e.g. (n, replication, purpose). The result depends only on the
/// inputs, never on call order.
std::uint64_t stream_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords);

std::mt19937_64 make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> coords);

}  // namespace nmar
