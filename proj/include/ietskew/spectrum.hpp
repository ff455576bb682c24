#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ietskew/cocycle.hpp"
#include "ietskew/iet.hpp"
#include "ietskew/induction.hpp"

namespace ietskew {

struct LyapunovOptions {
    // Rational inputs run this many blocks exactly before switching to double.
    long warmup_blocks = 32;
    // NonConvergence when the reported confidence is above this.
    double max_confidence = 0.1;
    long kappa_cap = kDefaultKappaCap;
    // Seeds the second frame vector and the dual test vector.
    std::uint64_t seed = 1;
};

struct LyapunovEstimate {
    double theta1 = 0;
    double theta2 = 0;
    // theta1 measured on the length cocycle B instead of Q.
    double theta1_dual = 0;
    long blocks_used = 0;
    long renormalization_period = 0;
    // Half-width of the drift of the running estimates over the last quarter.
    double confidence = 0;
    long rauzy_steps = 0;
};

// Exponents per Zorich block. theta1 from the heights vector pushed by Q,
// theta2 from the growth of the area of a pushed 2-frame (Gram-Schmidt every
// reorth_period blocks). theta2 is 0 when d = 2.
template <Scalar S>
LyapunovEstimate lyapunov_exponents(const BasicIet<S>& iet, long n_blocks, long reorth_period = 8,
                                    LyapunovOptions options = {});

// Visits of the first n orbit points T^0 x .. T^{n-1} x to each I_a.
template <Scalar S>
std::vector<long> visit_counts(const BasicIet<S>& iet, const S& x, long n);

struct DeviationRow {
    long n = 0;
    double max_abs_birkhoff = 0;
    // max over sampled x of |chi_a(x, n) - lambda_a n|, lambda normalized.
    std::vector<double> visit_deviation;
};

struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double rms_residual = 0;
    long points = 0;
    bool degenerate = false;
};

struct DeviationScan {
    std::vector<DeviationRow> rows;
    SlopeFit birkhoff_fit;
    std::vector<SlopeFit> visit_fits;  // per letter
    std::optional<double> target;      // theta2 / theta1 when exponents were supplied
};

// Integer grid lo .. hi with `per_decade` log-spaced points per decade, deduplicated.
std::vector<long> log_grid(long lo, long hi, int per_decade);

// Least squares of log y against log n on the upper half of the points.
// Degenerate when fewer than two usable points or some y there is 0.
SlopeFit fit_upper_half(const std::vector<long>& n, const std::vector<double>& y);

// Double-precision scan. The sampled points are the first x_samples iterates of
// a seeded start x0, so sup over x of |S_n f| is estimated by sliding a window
// of length n along one orbit.
template <Scalar S>
DeviationScan deviation_scan(const BasicIet<S>& iet, const BasicStepCocycle<S>& f, const std::vector<long>& n_grid,
                             long x_samples, std::uint64_t seed = 1,
                             const std::optional<LyapunovEstimate>& exponents = std::nullopt);

}  // namespace ietskew
