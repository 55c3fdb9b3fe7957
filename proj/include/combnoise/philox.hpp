#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace combnoise::rng {

// Philox4x32-10 counter-based generator. Every output
// block is a pure function of (counter, key), so streams can be evaluated in
// any order or in parallel.
using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter philox4x32(Counter ctr, Key key);

Key key_from_seed(std::uint64_t seed);

// Two independent standard normals from one block: two 53-bit uniforms,
// then Box-Muller.
std::pair<double, double> gaussian_pair(const Counter& ctr, const Key& key);

} // namespace combnoise::rng
