#ifndef GLYPHRUN_RNG_HPP
#define GLYPHRUN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace glyphrun {

// splitmix64 step; used both as the generator core and for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and an index path,
// e.g. deriveSeed(master, {scriptIndex, splitIndex, docIndex}).
inline std::uint64_t deriveSeed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = base;
    std::uint64_t acc = splitmix64(s);
    for (std::uint64_t step : path) {
        s = acc ^ (step + 0x9E3779B97F4A7C15ULL);
        acc = splitmix64(s);
    }
    return acc;
}

// Small deterministic PRNG. Everything random in the pipeline flows through
// this type so results are reproducible for a recorded seed, independent of
// the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t nextU64() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        // rejection sampling; unbiased
        std::uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            std::uint64_t r = nextU64();
            if (r >= threshold) return r % bound;
        }
    }

    bool chance(double p) { return uniform() < p; }

    // Box-Muller; one value per call (the pair's partner is discarded to keep
    // call sequences position-independent).
    double normal(double mean, double stddev) {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Index sample from an unnormalized weight vector.
    std::size_t discrete(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double x = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return i;
        }
        return weights.size() - 1;
    }

private:
    std::uint64_t state_;
};

} // namespace glyphrun

#endif
