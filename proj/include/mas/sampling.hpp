#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mas {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr int kDefaultSamples = 100;

using Point = std::vector<double>;

/// `count` points uniform on [lo, hi]^dim from mt19937_64(seed).
inline std::vector<Point> sample_points(std::size_t dim, int count, std::uint64_t seed = kDefaultSeed,
                                        double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Point> pts(static_cast<std::size_t>(count), Point(dim));
    for (auto& p : pts)
        for (auto& x : p) x = u(rng);
    return pts;
}

}  // namespace mas
