#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <vector>

namespace d2d {

// Derives an independent stream seed from (master, index) with the SplitMix64
// finalizer. Fixed here so runs are replayable from a config file alone.
inline std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// mt19937_64 engine with the output transforms spelled out below, instead of
// std::*_distribution, so that a seed pins the trajectory bit-for-bit on any
// conforming standard library.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t nextU64() { return engine_(); }

    // [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // [0, bound). Modulo bias is < bound / 2^64 and accepted by design.
    std::uint64_t uniformInt(std::uint64_t bound) { return bound ? nextU64() % bound : 0; }

    // Unit-mean exponential via inverse CDF; argument rescales the mean.
    double exponential(double mean = 1.0) {
        double u = uniform01();
        return -std::log(1.0 - u) * mean;
    }

    // Standard normal, Box-Muller; consumes exactly two engine draws.
    double normal() {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniformInt(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace d2d
