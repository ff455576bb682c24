#include "ietskew/random.hpp"

#include <algorithm>

namespace ietskew {

std::uint64_t Rng::below(std::uint64_t n) {
    const std::uint64_t limit = n * (~std::uint64_t{0} / n);
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return v % n;
}

BigInt Rng::below(const BigInt& bound) {
    const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    for (;;) {
        BigInt v = 0;
        std::size_t have = 0;
        while (have < bits) {
            v <<= 64;
            BigInt word;
            const std::uint64_t w = engine_();
            mpz_import(word.get_mpz_t(), 1, 1, sizeof w, 0, 0, &w);
            v += word;
            have += 64;
        }
        v >>= static_cast<mp_bitcnt_t>(have - bits);
        if (v < bound) return v;
    }
}

Rational Rng::dyadic(unsigned bits) {
    BigInt den = 1;
    den <<= bits;
    Rational q(below(den), den);
    q.canonicalize();
    return q;
}

std::vector<Rational> simplex_rational(Rng& rng, int n, unsigned denominator_bits) {
    BigInt den = 1;
    den <<= denominator_bits;
    std::vector<BigInt> cuts;
    while (static_cast<int>(cuts.size()) < n - 1) {
        BigInt c = rng.below(BigInt(den - 1)) + 1;
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<Rational> out;
    BigInt prev = 0;
    for (const auto& c : cuts) {
        Rational q(BigInt(c - prev), den);
        q.canonicalize();
        out.push_back(q);
        prev = c;
    }
    Rational last(BigInt(den - prev), den);
    last.canonicalize();
    out.push_back(last);
    return out;
}

std::vector<double> simplex_double(Rng& rng, int n) {
    for (;;) {
        std::vector<double> cuts;
        for (int i = 0; i + 1 < n; ++i) cuts.push_back(rng.uniform());
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> out;
        double prev = 0.0;
        for (double c : cuts) {
            out.push_back(c - prev);
            prev = c;
        }
        out.push_back(1.0 - prev);
        if (std::all_of(out.begin(), out.end(), [](double v) { return v > 0.0; })) return out;
    }
}

}  // namespace ietskew
