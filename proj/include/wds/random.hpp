#pragma once

#include <cstdint>
#include <random>

namespace wds {

__extension__ using Uint128 = unsigned __int128;

/// Seeded 64-bit Mersenne Twister (std::mt19937_64) with portable mappings to
/// doubles and bounded integers, so streams do not depend on the standard
/// library's distribution implementations.
///   uniform01: top 53 bits of one draw, times 2^-53, in [0, 1).
///   below(n):  Lemire's multiply-shift rejection method, in [0, n).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        Uint128 m = static_cast<Uint128>(engine_()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<Uint128>(engine_()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace wds
