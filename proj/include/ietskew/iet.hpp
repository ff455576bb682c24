#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ietskew/permutation.hpp"
#include "ietskew/scalar.hpp"

namespace ietskew {

struct IetOptions {
    bool normalize = false;
    bool require_irreducible = true;
};

// Interval exchange T = (pi, lambda) on [0, |lambda|). Immutable; T is
// right-continuous and the right endpoint is outside the domain.
template <Scalar S>
class BasicIet {
public:
    BasicIet(Permutation perm, std::vector<S> lengths, IetOptions options = {});

    int size() const { return perm_.size(); }
    const Permutation& permutation() const { return perm_; }
    const std::vector<S>& lengths() const { return lengths_; }
    const S& length(Letter a) const { return lengths_[idx(a)]; }
    const S& total_length() const { return total_; }

    // Exchanged interval I_a and its image T(I_a).
    Interval<S> interval(Letter a) const;
    Interval<S> image_interval(Letter a) const;
    const S& top_left(Letter a) const { return top_left_[idx(a)]; }
    const S& bottom_left(Letter a) const { return bottom_left_[idx(a)]; }
    // T(x) - x on I_a.
    const S& translation(Letter a) const { return shift_[idx(a)]; }

    Letter letter_at(const S& x) const;
    Letter image_letter_at(const S& y) const;

    S apply(const S& x) const;
    S apply_inverse(const S& y) const;

    // The d-1 interior partition points, increasing.
    std::vector<S> discontinuities() const;

    // Same combinatorics with lengths scaled to sum 1.
    BasicIet normalized() const;

    template <Scalar T>
    BasicIet<T> convert() const {
        std::vector<T> out;
        out.reserve(lengths_.size());
        for (const S& v : lengths_) out.push_back(ScalarTraits<T>::from_rational(ScalarTraits<S>::to_rational(v)));
        return BasicIet<T>(perm_, std::move(out), {.normalize = false, .require_irreducible = false});
    }

private:
    static std::size_t idx(Letter a) { return static_cast<std::size_t>(a); }
    void check_domain(const S& x, const char* what) const;

    Permutation perm_;
    std::vector<S> lengths_;
    S total_;
    std::vector<S> top_left_, bottom_left_, shift_;
    // Left endpoints by position, used for lookups.
    std::vector<S> top_cuts_, bottom_cuts_;
};

using Iet = BasicIet<Rational>;
using FloatIet = BasicIet<double>;
using BigFloatIet = BasicIet<BigFloat>;

template <Scalar S>
BasicIet<S> new_iet(Permutation perm, std::vector<S> lengths, bool normalize, bool enforce_irreducible) {
    return BasicIet<S>(std::move(perm), std::move(lengths),
                       {.normalize = normalize, .require_irreducible = enforce_irreducible});
}

struct KeaneReport {
    long horizon = 0;
    bool connection = false;
    // Valid when connection: T^n(a) = b for discontinuities a, b.
    long n = 0;
    Rational a, b;
};

// Scans orbits of the interior discontinuities for forbidden connections up to
// `horizon` steps. Exact arithmetic only.
template <Scalar S>
KeaneReport keane_check(const BasicIet<S>& iet, long horizon);

// Lengths uniform on the simplex, deterministic in the seed. Rational lengths
// have denominator 2^denominator_bits.
template <Scalar S>
BasicIet<S> sample_iet(std::uint64_t seed, const Permutation& perm, unsigned denominator_bits = 64);

}  // namespace ietskew
