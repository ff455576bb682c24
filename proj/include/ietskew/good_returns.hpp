#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ietskew/cocycle.hpp"
#include "ietskew/induction.hpp"
#include "ietskew/random.hpp"

namespace ietskew {

// Finite union of disjoint half-open intervals in [0, 1), sorted.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval<Rational>> pieces);
    // "a:b,c:d" with rational or decimal literals.
    static IntervalSet parse(std::string_view text);
    static IntervalSet whole() { return IntervalSet({{Rational(0), Rational(1)}}); }

    const std::vector<Interval<Rational>>& pieces() const { return pieces_; }
    Rational measure() const;
    bool contains(const Rational& x) const;
    // Uniform point with a dyadic offset of `bits` bits inside a piece chosen by length.
    Rational sample(Rng& rng, unsigned bits = 64) const;
    std::string to_string() const;

private:
    std::vector<Interval<Rational>> pieces_;
};

// Largest subinterval of [0, |lambda|) free of the points T^i x, 0 <= i < n,
// boundary gaps included. n = 0 gives the whole domain.
template <Scalar S>
S orbit_density_gap(const BasicIet<S>& iet, const S& x, long n);

enum class Side { Left, Right };
std::string_view to_string(Side side) noexcept;

template <Scalar S>
struct ContinuityInterval {
    Side side = Side::Right;
    S radius;
    // [x - r, x] is a continuity interval of T^n iff r <= left;
    // [x, x + r] is one iff r < right.
    S left, right;
};

// Distances from x to the breakpoints of T^n (the T^{-i} images of the
// discontinuities of T, i < n, and the domain ends) on each side; the larger
// side wins, ties go right.
template <Scalar S>
ContinuityInterval<S> continuity_interval(const BasicIet<S>& iet, const S& x, long n);

struct BalancedTimesOptions {
    // nu for the balanced region U; 0 picks 9/10 of min(epsilon, 1/(10d)).
    Rational nu = 0;
    UMode mode = UMode::Enforce;
    long loop_budget = 100000;
    long domain_samples = 100;
    std::uint64_t seed = 1;
    long lyapunov_blocks = 4000;
    long check_samples = 100;
    int traversal_cap = 4096;
    // Stop after this many selected times (0: as many as the budget gives).
    long max_times = 0;
};

struct BalancedTime {
    long k = 0;
    long return_index = 0;  // l_k
    long window_start = 0;  // l_k - s_k
    long zorich_step = 0;   // n_k = m_{l_k} + 2L
    long rauzy_step = 0;
    BigInt h;  // min_a q_a at n_k
    std::vector<BigInt> heights;
    bool ratio_below_c_gamma = false;
    long condition_i_failures = 0;
    long condition_ii_failures = 0;
    // Largest certified density gap times h over the sampled x.
    double worst_density_scaled = 0;
};

struct BalancedTimes {
    BalancedDomain domain;
    double epsilon = 0;
    Rational eta;
    double theta1 = 0, theta2 = 0;
    double rho_hat = 0;  // returns per Zorich block, stands in for C_d nu
    double delta = 0;
    double delta_eff = 0;  // delta used for the block cap (>= delta when eta < eta0)
    double eta0 = 0;
    bool eta_below_eta0 = false;
    // False when no delta in range meets the constants condition; delta is then a floor value.
    bool constants_feasible = true;
    Rational sigma;
    BigInt c_delta;
    Rational c;
    long zorich_blocks = 0;
    std::vector<long> returns;  // m_k as Zorich block indices
    std::vector<BalancedTime> sequence;
    long check_samples = 0;
    double growth_proxy = 0;  // log of h_K^{1/K}
    double growth_bound = 0;  // log of C eta^{1+eps}
    bool eta_ratio_ok = false;

    bool heights_increasing() const;
    bool all_ratios_below_c_gamma() const;
    bool condition_i() const;
    bool condition_ii() const;
    bool condition_iii() const { return !sequence.empty() && growth_proxy <= growth_bound; }
};

// Balanced times for an exact IET on [0, 1). budget bounds the Zorich blocks run.
BalancedTimes balanced_times(const Iet& iet, double epsilon, const Rational& eta, long budget,
                             BalancedTimesOptions options = {});

// Condition i at one time: a closed side of radius r around x stays inside
// its floor and its return image inside one base interval, so h iterates are disjoint.
struct ConditionICheck {
    bool left = false, right = false;
    bool ok() const { return left || right; }
};

class TowerLadder;
// Sufficient test at a ladder level whose heights are all >= h.
ConditionICheck check_condition_i(TowerLadder& ladder, long level, const Rational& x, const BigInt& h, const Rational& r);

struct SearchStats {
    long points = 0;
    long times_tested = 0;
    long in_set = 0;
    Rational best_abs_sum;
    std::string summary() const;
};

struct RecurrenceOptions {
    std::uint64_t seed = 1;
    unsigned bits = 64;
    long points_per_time = 64;
    long max_induced_steps = 100000;
};

struct RecurrenceHit {
    Rational y;
    long p = 0;
    BigInt n;
    Rational birkhoff;
    Rational image;  // T^n y
    long level = 0;  // Rauzy level used for the search
    SearchStats stats;
};

// Looks for y in E, p >= P and h_p / eta <= n <= h_p with T^n y in E and
// |S_n f(y)| < D. Candidate times are returns of y to its own floor at a
// Rauzy level whose towers fit the window; sums use special Birkhoff sums.
RecurrenceHit recurrence_search(const Iet& iet, const StepCocycle& f, const IntervalSet& E, const Rational& D, long P,
                                const BalancedTimes& bt, long budget, RecurrenceOptions options = {});

// Recomputes T^n y and S_n f(y) for a hit through a coarser level.
bool verify_recurrence(const Iet& iet, const StepCocycle& f, const IntervalSet& E, const Rational& D,
                       const BalancedTimes& bt, const RecurrenceHit& hit);

struct GoodReturnOptions {
    std::uint64_t seed = 1;
    unsigned bits = 64;
    // Orbit length tried per start point; 0 means max(4N, N + 10000).
    long horizon = 0;
};

struct GoodReturn {
    Rational x;
    long n = 0;
    Rational birkhoff;
    Rational image;
    Rational density_gap;
    Side continuity_side = Side::Right;
    Rational continuity_radius;
    Rational c_prime;      // C + 1
    Rational sigma_prime;  // sigma / 4
    Rational D;
    IntervalSet E;
    SearchStats stats;
};

// Direct scan for the four conditions of a good return with n > N.
GoodReturn good_return_search(const Iet& iet, const StepCocycle& f, const IntervalSet& E, const Rational& D, long N,
                              const BalancedTimes& bt, long budget, GoodReturnOptions options = {});

struct GoodReturnCheck {
    bool start_in_e = false, image_in_e = false, sum_bounded = false, dense = false, continuity = false;
    bool fields_match = false;  // recomputed values equal the stored ones
    bool all() const { return start_in_e && image_in_e && sum_bounded && dense && continuity && fields_match; }
};

// Independent recomputation: orbit by iteration, gap by sort-scan, and the
// continuity radius from the explicit breakpoint set of T^n.
GoodReturnCheck verify_good_return(const Iet& iet, const StepCocycle& f, const GoodReturn& g);

}  // namespace ietskew
