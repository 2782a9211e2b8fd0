#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace refrev {

/// Source of randomness for the variation operators. Implementations must be
/// portable: results may depend only on the draws, never on the standard
/// library's distribution internals.
class RandomSource {
public:
    virtual ~RandomSource() = default;

    /// Uniform integer in [0, n). n must be positive.
    virtual std::uint64_t index(std::uint64_t n) = 0;
    /// Uniform real in [0, 1).
    virtual double unit() = 0;

    bool chance(double p) { return unit() < p; }
};

/// mt19937_64 with hand-rolled unbiased range reduction.
class Rng final : public RandomSource {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t index(std::uint64_t n) override {
        // Rejection keeps the draw unbiased for any n.
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    double unit() override { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <class T>
    void shuffle(T& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace refrev
