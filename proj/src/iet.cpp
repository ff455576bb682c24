#include "ietskew/iet.hpp"

#include <algorithm>
#include <set>

#include "ietskew/error.hpp"
#include "ietskew/random.hpp"

namespace ietskew {

template <Scalar S>
BasicIet<S>::BasicIet(Permutation perm, std::vector<S> lengths, IetOptions options)
    : perm_(std::move(perm)), lengths_(std::move(lengths)) {
    const int d = perm_.size();
    if (static_cast<int>(lengths_.size()) != d) fail(ErrorCode::NotBijective, "length vector does not match alphabet");
    for (const S& v : lengths_)
        if (!(v > 0)) fail(ErrorCode::NonPositiveLength, "lengths must be positive");
    if (options.require_irreducible && !perm_.irreducible())
        fail(ErrorCode::ReduciblePermutation, perm_.to_string());
    total_ = 0;
    for (const S& v : lengths_) total_ += v;
    if (options.normalize) {
        for (S& v : lengths_) v /= total_;
        total_ = 1;
    }
    top_left_.assign(static_cast<std::size_t>(d), S(0));
    bottom_left_.assign(static_cast<std::size_t>(d), S(0));
    shift_.assign(static_cast<std::size_t>(d), S(0));
    top_cuts_.assign(static_cast<std::size_t>(d), S(0));
    bottom_cuts_.assign(static_cast<std::size_t>(d), S(0));
    S acc = 0;
    for (int k = 0; k < d; ++k) {
        top_cuts_[static_cast<std::size_t>(k)] = acc;
        top_left_[idx(perm_.top(k))] = acc;
        acc += lengths_[idx(perm_.top(k))];
    }
    acc = 0;
    for (int k = 0; k < d; ++k) {
        bottom_cuts_[static_cast<std::size_t>(k)] = acc;
        bottom_left_[idx(perm_.bottom(k))] = acc;
        acc += lengths_[idx(perm_.bottom(k))];
    }
    for (int a = 0; a < d; ++a) shift_[idx(a)] = bottom_left_[idx(a)] - top_left_[idx(a)];
}

template <Scalar S>
Interval<S> BasicIet<S>::interval(Letter a) const {
    return {top_left_[idx(a)], S(top_left_[idx(a)] + lengths_[idx(a)])};
}

template <Scalar S>
Interval<S> BasicIet<S>::image_interval(Letter a) const {
    return {bottom_left_[idx(a)], S(bottom_left_[idx(a)] + lengths_[idx(a)])};
}

template <Scalar S>
void BasicIet<S>::check_domain(const S& x, const char* what) const {
    if constexpr (ScalarTraits<S>::exact) {
        if (x < 0 || x >= total_) fail(ErrorCode::OutOfDomain, what);
    } else {
        const S slack = total_ * kFloatTolerance;
        if (x < -slack || x >= total_ + slack) fail(ErrorCode::OutOfDomain, what);
    }
}

template <Scalar S>
Letter BasicIet<S>::letter_at(const S& x) const {
    auto it = std::upper_bound(top_cuts_.begin() + 1, top_cuts_.end(), x);
    return perm_.top(static_cast<int>(it - top_cuts_.begin()) - 1);
}

template <Scalar S>
Letter BasicIet<S>::image_letter_at(const S& y) const {
    auto it = std::upper_bound(bottom_cuts_.begin() + 1, bottom_cuts_.end(), y);
    return perm_.bottom(static_cast<int>(it - bottom_cuts_.begin()) - 1);
}

template <Scalar S>
S BasicIet<S>::apply(const S& x) const {
    check_domain(x, "apply");
    return S(x + shift_[idx(letter_at(x))]);
}

template <Scalar S>
S BasicIet<S>::apply_inverse(const S& y) const {
    check_domain(y, "apply_inverse");
    return S(y - shift_[idx(image_letter_at(y))]);
}

template <Scalar S>
std::vector<S> BasicIet<S>::discontinuities() const {
    return std::vector<S>(top_cuts_.begin() + 1, top_cuts_.end());
}

template <Scalar S>
BasicIet<S> BasicIet<S>::normalized() const {
    return BasicIet<S>(perm_, lengths_, {.normalize = true, .require_irreducible = false});
}

template <Scalar S>
KeaneReport keane_check(const BasicIet<S>& iet, long horizon) {
    if constexpr (!ScalarTraits<S>::exact) {
        fail(ErrorCode::FloatModeUnsupported, "keane_check needs exact arithmetic");
    } else {
        KeaneReport report;
        report.horizon = horizon;
        const std::vector<S> starts = iet.discontinuities();
        std::set<S> targets(starts.begin(), starts.end());
        targets.insert(S(0));
        const S allowed_a = iet.apply_inverse(S(0));
        std::vector<S> orbit = starts;
        for (long n = 1; n <= horizon; ++n) {
            for (std::size_t j = 0; j < orbit.size(); ++j) {
                orbit[j] = iet.apply(orbit[j]);
                if (!targets.count(orbit[j])) continue;
                if (n == 1 && starts[j] == allowed_a && orbit[j] == 0) continue;
                report.connection = true;
                report.n = n;
                report.a = starts[j];
                report.b = orbit[j];
                return report;
            }
        }
        return report;
    }
}

template <Scalar S>
BasicIet<S> sample_iet(std::uint64_t seed, const Permutation& perm, unsigned denominator_bits) {
    Rng rng(seed);
    std::vector<S> lengths;
    if constexpr (std::is_same_v<S, double>) {
        lengths = simplex_double(rng, perm.size());
    } else {
        for (const Rational& q : simplex_rational(rng, perm.size(), denominator_bits))
            lengths.push_back(ScalarTraits<S>::from_rational(q));
    }
    return BasicIet<S>(perm, std::move(lengths), {.normalize = false, .require_irreducible = false});
}

#define IETSKEW_INSTANTIATE(S)                                                                    \
    template class BasicIet<S>;                                                                   \
    template KeaneReport keane_check<S>(const BasicIet<S>&, long);                                \
    template BasicIet<S> sample_iet<S>(std::uint64_t, const Permutation&, unsigned);

IETSKEW_INSTANTIATE(Rational)
IETSKEW_INSTANTIATE(double)
IETSKEW_INSTANTIATE(BigFloat)

}  // namespace ietskew
