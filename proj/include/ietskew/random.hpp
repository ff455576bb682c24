#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ietskew/scalar.hpp"

namespace ietskew {

// Seeded generator with platform-independent derived draws (std::mt19937_64
// output is fixed by the standard; the distributions below are hand-rolled so
// fixtures reproduce everywhere).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n);
    // Uniform integer in [0, bound), bound > 0.
    BigInt below(const BigInt& bound);
    // Uniform on [0, 1) as a rational with denominator 2^bits.
    Rational dyadic(unsigned bits);

private:
    std::mt19937_64 engine_;
};

// Uniform point of the open simplex {v > 0, sum v = 1} via sorted uniform gaps.
std::vector<Rational> simplex_rational(Rng& rng, int n, unsigned denominator_bits);
std::vector<double> simplex_double(Rng& rng, int n);

}  // namespace ietskew
