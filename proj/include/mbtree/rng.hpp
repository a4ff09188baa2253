#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>

namespace mbtree {

/// SplitMix64 finaliser, used to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic 64-bit seeded stream. All variates are produced by hand-written transforms
/// on top of mt19937_64 (whose output sequence is fixed by the standard), so a seed
/// reproduces the same draws on every platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0) : engine_(splitmix64(seed)) {}

    /// Independent stream for replicate `index` of a run seeded with `master_seed`:
    /// seed = splitmix64(master_seed) xor splitmix64(index + 1), mixed once more.
    static RngStream derive(std::uint64_t master_seed, std::uint64_t index) {
        return RngStream(splitmix64(master_seed) ^ splitmix64(splitmix64(index + 1)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1).
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    /// Index i with probability weights[i] / sum, by one uniform against cumulative sums.
    std::size_t discrete(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0)) throw std::invalid_argument("discrete: weights sum to zero");
        double u = uniform() * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0) continue;
            acc += weights[i];
            last_positive = i;
            if (u < acc) return i;
        }
        return last_positive;
    }

    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    double exponential() { return -std::log(uniform_open()); }

    /// Standard normal by the Marsaglia polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Gamma(shape, 1) by Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape) {
        if (!(shape > 0)) throw std::invalid_argument("gamma: shape must be positive");
        if (shape < 1.0) {
            double g = gamma(shape + 1.0);
            return g * std::pow(uniform_open(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        if (b == 0.0) return 1.0;
        double x = gamma(a);
        double y = gamma(b);
        return x / (x + y);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mbtree
