#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ietskew/iet.hpp"
#include "ietskew/scalar.hpp"

namespace ietskew {

// Neumaier-compensated running sum for floating types; plain addition when exact.
template <Scalar S>
class Accumulator {
public:
    void add(const S& v) {
        if constexpr (std::is_same_v<S, double>) {
            const double t = sum_ + v;
            if (std::fabs(sum_) >= std::fabs(v))
                comp_ += (sum_ - t) + v;
            else
                comp_ += (v - t) + sum_;
            sum_ = t;
        } else {
            sum_ += v;
        }
    }
    S value() const {
        if constexpr (std::is_same_v<S, double>) return sum_ + comp_;
        else return sum_;
    }

private:
    S sum_ = 0;
    S comp_ = 0;
};

struct CocycleOptions {
    bool require_mean_zero = true;
};

// f = sum_i values_i * 1_[c_{i-1}, c_i) on [0, 1), with segment lengths c_i - c_{i-1}.
template <Scalar S>
class BasicStepCocycle {
public:
    BasicStepCocycle(std::vector<S> lengths, std::vector<S> values, S bound, CocycleOptions options = {});

    int m() const { return static_cast<int>(lengths_.size()) - 1; }
    const std::vector<S>& lengths() const { return lengths_; }
    const std::vector<S>& values() const { return values_; }
    const S& bound() const { return bound_; }
    // Interior discontinuity positions, increasing (m of them).
    const std::vector<S>& breakpoints() const { return cuts_; }

    // Segment index (0-based) containing x.
    int segment(const S& x) const;
    S eval(const S& x) const;
    S mean() const;
    // Shortest segment (Gamma).
    S min_length() const;
    S sup_norm() const;
    // sigma_i = values_{i+1} - values_i.
    std::vector<S> jumps() const;

    template <Scalar T>
    BasicStepCocycle<T> convert() const {
        std::vector<T> l, v;
        for (const S& x : lengths_) l.push_back(ScalarTraits<T>::from_rational(ScalarTraits<S>::to_rational(x)));
        for (const S& x : values_) v.push_back(ScalarTraits<T>::from_rational(ScalarTraits<S>::to_rational(x)));
        return BasicStepCocycle<T>(std::move(l), std::move(v), ScalarTraits<T>::from_rational(ScalarTraits<S>::to_rational(bound_)),
                                   {.require_mean_zero = false});
    }

private:
    std::vector<S> lengths_, values_, cuts_;
    S bound_;
};

using StepCocycle = BasicStepCocycle<Rational>;
using FloatStepCocycle = BasicStepCocycle<double>;

template <Scalar S>
S birkhoff_sum(const BasicIet<S>& T, const BasicStepCocycle<S>& f, const S& x, long n);

template <Scalar S>
struct StripPoint {
    S x;
    S t;
};

template <Scalar S>
StripPoint<S> skew_apply(const BasicIet<S>& T, const BasicStepCocycle<S>& f, const StripPoint<S>& p, long n);

// Moves the i-th discontinuity (1-based) by zeta and corrects value i+1 so the
// mean stays zero.
template <Scalar S>
BasicStepCocycle<S> nudge(const BasicStepCocycle<S>& f, int i, const S& zeta);

// Sup distance between the (lengths, values) parameter vectors.
template <Scalar S>
S cocycle_distance(const BasicStepCocycle<S>& f, const BasicStepCocycle<S>& g);

// Lengths uniform on the simplex; values uniform in [-M, M] projected onto
// <lengths, values> = 0, rejected while |values| exceeds M.
template <Scalar S>
BasicStepCocycle<S> sample_cocycle(std::uint64_t seed, int m, const S& bound, long max_attempts = 10000,
                                   unsigned denominator_bits = 64);

struct JumpReport {
    std::vector<double> sigma;
    bool dense = false;
    std::string witness;
};

// Dense-subgroup heuristic for the jumps. Float mode: some ratio of jumps has a
// continued fraction that does not terminate with small denominators within 40
// digits. Rational mode: the cyclic group generated by the jumps has a
// generator below 1e-9 of the largest jump.
template <Scalar S>
JumpReport jump_report(const BasicStepCocycle<S>& f);

// f = g o T - g for a step function g on [0, 1).
template <Scalar S>
BasicStepCocycle<S> coboundary(const BasicIet<S>& T, const BasicStepCocycle<S>& g);

template <Scalar S>
struct StripReturn {
    StripPoint<S> point;
    long return_time = 0;
};

// First return of the skew product to [0,1) x [-N, N].
template <Scalar S>
StripReturn<S> strip_first_return(const BasicIet<S>& T, const BasicStepCocycle<S>& f, const StripPoint<S>& p, const S& N,
                                  long cap);

}  // namespace ietskew
