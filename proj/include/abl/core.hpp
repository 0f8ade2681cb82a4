#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "binary file formats assume a little-endian host");

namespace abl {

// Error hierarchy shared by all modules. The CLI maps these onto exit codes.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class geometry_error : public error {
public:
    using error::error;
};

class shape_error : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

class parse_error : public error {
public:
    using error::error;
};

class numeric_error : public error {
public:
    using error::error;
};

// Seedable generator used everywhere randomness is needed. Draws below go
// through hand-rolled mappings so the produced streams are identical across
// standard library implementations (std distributions are not portable).
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [-1, 1).
inline double uniform_pm1(Rng& rng) {
    return 2.0 * uniform01(rng) - 1.0;
}

/// Standard normal draw via Box-Muller; consumes exactly two uniforms.
inline double gaussian(Rng& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1], keeps log finite
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm1(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += std::abs(v);
    return s;
}

inline bool all_finite(std::span<const double> a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// Static contiguous split of [0, n) over `threads` workers. Each chunk is
// processed in index order inside one worker, so results are reproducible at
// a fixed thread count.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& chunk_fn) {
    if (threads <= 1 || n < 2) {
        chunk_fn(std::size_t{0}, n);
        return;
    }
    const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(t);
    const std::size_t chunk = (n + t - 1) / t;
    for (std::size_t w = 0; w < t; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&chunk_fn, lo, hi] { chunk_fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace abl
