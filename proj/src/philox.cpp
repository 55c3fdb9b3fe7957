#include "combnoise/philox.hpp"

#include <cmath>

#include "combnoise/constants.hpp"

namespace combnoise::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// 53 random bits from two words, mapped to (0, 1].
inline double open_unit(std::uint32_t a, std::uint32_t b)
{
    const std::uint64_t bits = (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
    return (static_cast<double>(bits) + 1.0) * 0x1p-53;
}

} // namespace

Counter philox4x32(Counter ctr, Key key)
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

Key key_from_seed(std::uint64_t seed)
{
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

std::pair<double, double> gaussian_pair(const Counter& ctr, const Key& key)
{
    const Counter x = philox4x32(ctr, key);
    const double u1 = open_unit(x[0], x[1]);
    const double u2 = open_unit(x[2], x[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = constants::two_pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

} // namespace combnoise::rng
