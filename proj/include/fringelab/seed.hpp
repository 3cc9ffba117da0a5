#pragma once

#include <cstdint>

namespace fringelab {

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

/// Seed of realization `index` under `master`. For fixed master the map over
/// index is injective (odd multiplier, bijective finalizer), and likewise for
/// fixed index over master.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
	return mix64(mix64(master) + index * 0x9e3779b97f4a7c15ULL);
}

} // namespace fringelab
