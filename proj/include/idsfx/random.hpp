#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace idsfx {

// std::mt19937_64 output is fixed by the standard; the <random> distributions
// are not. Everything that must be reproducible across standard libraries goes
// through these helpers instead of std::uniform_*_distribution / std::shuffle.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). n must be > 0.
    std::size_t below(std::size_t n) {
        // Lemire-style rejection keeps this unbiased.
        const std::uint64_t bound = n;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= threshold) return static_cast<std::size_t>(x % bound);
        }
    }

    // Standard normal via Box-Muller.
    double normal();

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Derives an independent stream seed, e.g. one per tree of a forest.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace idsfx
