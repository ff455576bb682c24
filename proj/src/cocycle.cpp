#include "ietskew/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ietskew/error.hpp"
#include "ietskew/random.hpp"

namespace ietskew {

namespace {

template <Scalar S>
bool near(const S& a, const S& b, double scale) {
    if constexpr (ScalarTraits<S>::exact) return a == b;
    else return ScalarTraits<S>::to_double(ScalarTraits<S>::abs(S(a - b))) <= kFloatTolerance * std::max(1.0, scale);
}

template <Scalar S>
bool exceeds(const S& v, const S& bound) {
    if constexpr (ScalarTraits<S>::exact) return ScalarTraits<S>::abs(v) > bound;
    else return ScalarTraits<S>::to_double(ScalarTraits<S>::abs(v)) > ScalarTraits<S>::to_double(bound) * (1 + kFloatTolerance);
}

}  // namespace

template <Scalar S>
BasicStepCocycle<S>::BasicStepCocycle(std::vector<S> lengths, std::vector<S> values, S bound, CocycleOptions options)
    : lengths_(std::move(lengths)), values_(std::move(values)), bound_(std::move(bound)) {
    if (lengths_.empty() || lengths_.size() != values_.size())
        fail(ErrorCode::BadConfig, "cocycle needs matching, non-empty length and value vectors");
    S total = 0;
    for (const S& l : lengths_) {
        if (!(l > 0)) fail(ErrorCode::NonPositiveLength, "cocycle segment lengths must be positive");
        total += l;
    }
    if (!near(total, S(1), 1.0)) fail(ErrorCode::BadConfig, "cocycle segment lengths must sum to 1");
    const double scale = ScalarTraits<S>::to_double(bound_);
    if (options.require_mean_zero && !near(mean(), S(0), scale)) fail(ErrorCode::BadConfig, "cocycle must have mean zero");
    for (const S& v : values_)
        if (exceeds(v, bound_)) fail(ErrorCode::ValueBoundExceeded, "value " + ScalarTraits<S>::format(v) + " exceeds M");
    S acc = 0;
    for (std::size_t k = 0; k + 1 < lengths_.size(); ++k) {
        acc += lengths_[k];
        cuts_.push_back(acc);
    }
}

template <Scalar S>
int BasicStepCocycle<S>::segment(const S& x) const {
    if constexpr (ScalarTraits<S>::exact) {
        if (x < 0 || x >= 1) fail(ErrorCode::OutOfDomain, "cocycle argument outside [0,1)");
    } else {
        if (x < -kFloatTolerance || x >= 1 + kFloatTolerance) fail(ErrorCode::OutOfDomain, "cocycle argument outside [0,1)");
    }
    return static_cast<int>(std::upper_bound(cuts_.begin(), cuts_.end(), x) - cuts_.begin());
}

template <Scalar S>
S BasicStepCocycle<S>::eval(const S& x) const {
    return values_[static_cast<std::size_t>(segment(x))];
}

template <Scalar S>
S BasicStepCocycle<S>::mean() const {
    Accumulator<S> acc;
    for (std::size_t k = 0; k < lengths_.size(); ++k) acc.add(S(lengths_[k] * values_[k]));
    return acc.value();
}

template <Scalar S>
S BasicStepCocycle<S>::min_length() const {
    return *std::min_element(lengths_.begin(), lengths_.end());
}

template <Scalar S>
S BasicStepCocycle<S>::sup_norm() const {
    S best = 0;
    for (const S& v : values_) best = std::max(best, S(ScalarTraits<S>::abs(v)));
    return best;
}

template <Scalar S>
std::vector<S> BasicStepCocycle<S>::jumps() const {
    std::vector<S> out;
    for (std::size_t k = 0; k + 1 < values_.size(); ++k) out.push_back(values_[k + 1] - values_[k]);
    return out;
}

template <Scalar S>
S birkhoff_sum(const BasicIet<S>& T, const BasicStepCocycle<S>& f, const S& x, long n) {
    Accumulator<S> acc;
    S y = x;
    if (n >= 0) {
        for (long i = 0; i < n; ++i) {
            acc.add(f.eval(y));
            y = T.apply(y);
        }
        return acc.value();
    }
    for (long i = 0; i < -n; ++i) {
        y = T.apply_inverse(y);
        acc.add(f.eval(y));
    }
    return S(-acc.value());
}

template <Scalar S>
StripPoint<S> skew_apply(const BasicIet<S>& T, const BasicStepCocycle<S>& f, const StripPoint<S>& p, long n) {
    S sum = birkhoff_sum(T, f, p.x, n);
    S x = p.x;
    if (n >= 0)
        for (long i = 0; i < n; ++i) x = T.apply(x);
    else
        for (long i = 0; i < -n; ++i) x = T.apply_inverse(x);
    return {x, S(p.t + sum)};
}

template <Scalar S>
BasicStepCocycle<S> nudge(const BasicStepCocycle<S>& f, int i, const S& zeta) {
    if (i < 1 || i > f.m()) fail(ErrorCode::BadConfig, "nudge index must lie in 1..m");
    if (!(ScalarTraits<S>::abs(zeta) * 2 < f.min_length()))
        fail(ErrorCode::ZetaTooLarge, "|zeta| must be below half the shortest segment");
    std::vector<S> lengths = f.lengths(), values = f.values();
    const auto a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(i);
    values[b] = (values[b] * lengths[b] - zeta * values[a]) / (lengths[b] - zeta);
    lengths[a] += zeta;
    lengths[b] -= zeta;
    return BasicStepCocycle<S>(std::move(lengths), std::move(values), f.bound());
}

template <Scalar S>
S cocycle_distance(const BasicStepCocycle<S>& f, const BasicStepCocycle<S>& g) {
    if (f.m() != g.m()) fail(ErrorCode::BadConfig, "cocycles with different numbers of segments");
    S best = 0;
    for (std::size_t k = 0; k < f.lengths().size(); ++k) {
        best = std::max(best, S(ScalarTraits<S>::abs(S(f.lengths()[k] - g.lengths()[k]))));
        best = std::max(best, S(ScalarTraits<S>::abs(S(f.values()[k] - g.values()[k]))));
    }
    return best;
}

template <Scalar S>
BasicStepCocycle<S> sample_cocycle(std::uint64_t seed, int m, const S& bound, long max_attempts, unsigned denominator_bits) {
    Rng rng(seed);
    const std::size_t n = static_cast<std::size_t>(m + 1);
    for (long attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<S> p, q;
        if constexpr (std::is_same_v<S, double>) {
            p = simplex_double(rng, m + 1);
            for (std::size_t k = 0; k < n; ++k) q.push_back(rng.uniform(-bound, bound));
        } else {
            for (const Rational& r : simplex_rational(rng, m + 1, denominator_bits)) p.push_back(ScalarTraits<S>::from_rational(r));
            for (std::size_t k = 0; k < n; ++k)
                q.push_back(S(bound * ScalarTraits<S>::from_rational(Rational(2 * rng.dyadic(denominator_bits) - 1))));
        }
        S pq = 0, pp = 0;
        for (std::size_t k = 0; k < n; ++k) {
            pq += p[k] * q[k];
            pp += p[k] * p[k];
        }
        const S c = pq / pp;
        bool ok = true;
        for (std::size_t k = 0; k < n; ++k) {
            q[k] -= c * p[k];
            if (ScalarTraits<S>::abs(q[k]) > bound) ok = false;
        }
        if constexpr (std::is_same_v<S, double>) {
            // Remove the rounding residue of the projection from the largest segment.
            std::size_t big = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
            Accumulator<double> acc;
            for (std::size_t k = 0; k < n; ++k) acc.add(p[k] * q[k]);
            q[big] -= acc.value() / p[big];
            if (std::fabs(q[big]) > bound) ok = false;
        }
        if (ok) return BasicStepCocycle<S>(std::move(p), std::move(q), bound);
    }
    fail(ErrorCode::RejectionBudgetExceeded, "no admissible cocycle within " + std::to_string(max_attempts) + " attempts");
}

namespace {

bool small_denominator_ratio(double r, std::string& why) {
    // Continued fraction of r; rational-like if it terminates before the
    // convergent denominators pass 1e6.
    double x = std::fabs(r);
    double q_prev = 0, q = 1;
    for (int depth = 0; depth < 40; ++depth) {
        const double a = std::floor(x);
        const double frac = x - a;
        if (depth > 0) {
            const double q_next = a * q + q_prev;
            q_prev = q;
            q = q_next;
        }
        if (q > 1e6) {
            why = "denominators exceed 1e6";
            return false;
        }
        if (frac < 1e-9 * std::max(1.0, x)) return true;
        x = 1 / frac;
    }
    why = "no termination within 40 digits";
    return false;
}

}  // namespace

template <Scalar S>
JumpReport jump_report(const BasicStepCocycle<S>& f) {
    JumpReport r;
    const std::vector<S> sigma = f.jumps();
    for (const S& s : sigma) r.sigma.push_back(ScalarTraits<S>::to_double(s));
    if (sigma.size() < 2) {
        r.witness = "fewer than two jumps generate a discrete group";
        return r;
    }
    if constexpr (ScalarTraits<S>::mode == ScalarMode::Rational) {
        BigInt num = 0, den = 1;
        Rational largest = 0;
        for (const Rational& s : sigma) {
            if (s == 0) continue;
            largest = std::max(largest, Rational(abs(s)));
            // gcd(num/den, a/b) = gcd(num*b, a*den) / (den*b)
            const BigInt a = abs(s.get_num()), b = s.get_den();
            BigInt g;
            mpz_gcd(g.get_mpz_t(), BigInt(num * b).get_mpz_t(), BigInt(a * den).get_mpz_t());
            num = g;
            den = den * b;
        }
        Rational gen(num, den);
        gen.canonicalize();
        r.dense = gen < largest * Rational(1, 1000000000);
        r.witness = "jump group generated by " + rational_to_string(gen);
        return r;
    } else {
        for (std::size_t i = 0; i < sigma.size(); ++i)
            for (std::size_t j = i + 1; j < sigma.size(); ++j) {
                if (r.sigma[j] == 0 || r.sigma[i] == 0) continue;
                std::string why;
                if (!small_denominator_ratio(r.sigma[i] / r.sigma[j], why)) {
                    r.dense = true;
                    r.witness = "sigma_" + std::to_string(i + 1) + "/sigma_" + std::to_string(j + 1) + ": " + why;
                    return r;
                }
            }
        r.witness = "all jump ratios have small-denominator continued fractions";
        return r;
    }
}

template <Scalar S>
BasicStepCocycle<S> coboundary(const BasicIet<S>& T, const BasicStepCocycle<S>& g) {
    std::set<S> cuts{S(0)};
    for (const S& z : T.discontinuities()) cuts.insert(z);
    for (const S& z : g.breakpoints()) {
        cuts.insert(z);
        cuts.insert(T.apply_inverse(z));
    }
    std::vector<S> points(cuts.begin(), cuts.end());
    points.push_back(S(1));
    std::vector<S> lengths, values;
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        const S v = g.eval(T.apply(points[k])) - g.eval(points[k]);
        const S len = points[k + 1] - points[k];
        if (!(len > 0)) continue;
        if (!values.empty() && values.back() == v) {
            lengths.back() += len;
        } else {
            lengths.push_back(len);
            values.push_back(v);
        }
    }
    S bound = 0;
    for (const S& v : values) bound = std::max(bound, S(ScalarTraits<S>::abs(v)));
    return BasicStepCocycle<S>(std::move(lengths), std::move(values), bound);
}

template <Scalar S>
StripReturn<S> strip_first_return(const BasicIet<S>& T, const BasicStepCocycle<S>& f, const StripPoint<S>& p, const S& N,
                                  long cap) {
    if (ScalarTraits<S>::abs(p.t) > N) fail(ErrorCode::OutOfDomain, "starting point outside the band");
    Accumulator<S> t;
    t.add(p.t);
    S x = p.x;
    for (long k = 1; k <= cap; ++k) {
        t.add(f.eval(x));
        x = T.apply(x);
        if (ScalarTraits<S>::abs(t.value()) <= N) return {{x, t.value()}, k};
    }
    fail(ErrorCode::CapExceeded, "no return to the band within " + std::to_string(cap) + " steps");
}

#define IETSKEW_INSTANTIATE(S)                                                                                   \
    template class BasicStepCocycle<S>;                                                                          \
    template S birkhoff_sum<S>(const BasicIet<S>&, const BasicStepCocycle<S>&, const S&, long);                  \
    template StripPoint<S> skew_apply<S>(const BasicIet<S>&, const BasicStepCocycle<S>&, const StripPoint<S>&, long); \
    template BasicStepCocycle<S> nudge<S>(const BasicStepCocycle<S>&, int, const S&);                            \
    template S cocycle_distance<S>(const BasicStepCocycle<S>&, const BasicStepCocycle<S>&);                      \
    template BasicStepCocycle<S> sample_cocycle<S>(std::uint64_t, int, const S&, long, unsigned);                \
    template JumpReport jump_report<S>(const BasicStepCocycle<S>&);                                              \
    template BasicStepCocycle<S> coboundary<S>(const BasicIet<S>&, const BasicStepCocycle<S>&);                  \
    template StripReturn<S> strip_first_return<S>(const BasicIet<S>&, const BasicStepCocycle<S>&, const StripPoint<S>&, \
                                                  const S&, long);

IETSKEW_INSTANTIATE(Rational)
IETSKEW_INSTANTIATE(double)

}  // namespace ietskew
