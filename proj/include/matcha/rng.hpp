#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace matcha {

// Seeded generator with platform-stable draws (std::*_distribution is
// implementation-defined, so we avoid it wherever determinism matters).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), rejection-sampled. n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Partial Fisher-Yates: the first n entries of a seeded permutation.
    // Prefix-stable: sample(xs, n) is a prefix of sample(xs, m) for n <= m under the same seed.
    template <typename T>
    std::vector<T> sample(std::vector<T> xs, std::size_t n) {
        if (n > xs.size()) n = xs.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = i + static_cast<std::size_t>(below(xs.size() - i));
            std::swap(xs[i], xs[j]);
        }
        xs.resize(n);
        return xs;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace matcha
