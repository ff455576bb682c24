#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ietskew/cocycle.hpp"

namespace ietskew {

// Counts of fiber coordinates t, clipped to [-L, L], for visits whose base
// point falls in x_window.
struct FiberHistogram {
    Interval<double> x_window;
    double L = 0;
    int bins = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    std::uint64_t clipped = 0;  // visits with |t| > L, counted in the end bins

    double bin_width() const { return 2 * L / bins; }
    int bin_of(double t) const;
    void add(double t);
    std::vector<double> normalized() const;
    void merge(const FiberHistogram& other);
};

inline constexpr int kDefaultWindows = 64;
inline constexpr int kDefaultBins = 256;

// 8 m M.
template <Scalar S>
double default_cutoff(const BasicStepCocycle<S>& f);

// Iterates (x0, 0) n times under the skew product and buckets the visits
// T^i x0, S_i f(x0), 0 <= i < n, into x-windows of the given width.
template <Scalar S>
std::vector<FiberHistogram> fiber_histograms(const BasicIet<S>& T, const BasicStepCocycle<S>& f, const S& x0, long n,
                                             double window_width, double L, int bins);

// Same histograms from several start points run in parallel and merged.
std::vector<FiberHistogram> fiber_histograms(const FloatIet& T, const FloatStepCocycle& f, const std::vector<double>& starts,
                                             long n, double window_width, double L, int bins);

// L1 distance between the histogram's density and its translate by sigma,
// integrated where both are defined. Shifts that are not whole bins mix the
// two neighbouring bin shifts by overlap length; `rebinned` reports that.
double shift_distance(const FiberHistogram& h, double sigma, bool* rebinned = nullptr);

struct ShiftReport {
    double sigma = 0;
    bool rebinned = false;
    std::vector<double> per_window;  // empty windows report 0
    double aggregate = 0;            // weighted by window mass
};

struct ProbeReport {
    long n = 0;
    std::size_t starts = 0;
    std::vector<ShiftReport> shifts;
    double aggregate = 0;  // mean over shifts
    bool rebinned = false;
};

struct ProbeOptions {
    long n = 100000;
    int windows = kDefaultWindows;
    int bins = kDefaultBins;
    std::optional<double> L;  // default 8 m M
    std::vector<double> starts{0.5};
    // BinMismatch instead of rebinning when a shift is not a whole number of bins.
    bool strict_bins = false;
};

ProbeReport probe_histograms(const std::vector<FiberHistogram>& hists, const std::vector<double>& sigmas, bool strict_bins = false);

// Shifts default to the jumps of f.
ProbeReport translation_invariance_probe(const FloatIet& T, const FloatStepCocycle& f, std::vector<double> sigmas = {},
                                         const ProbeOptions& options = {});

// Occupation histogram of the first-return orbit on [0,1) x [-N, N].
struct EmpiricalBirkhoffMeasure {
    StripPoint<double> start;
    long n = 0;
    double N = 0;
    int x_cells = 0, t_cells = 0;
    std::vector<std::uint64_t> counts;  // row-major by x cell
    std::uint64_t total = 0;
    long base_steps = 0;  // iterates of the skew product spent
    long max_return_time = 0;

    double mass(int xc, int tc) const;
    std::size_t occupied_cells() const;
    double l1_distance(const EmpiricalBirkhoffMeasure& other) const;
};

template <Scalar S>
EmpiricalBirkhoffMeasure empirical_birkhoff_measure(const BasicIet<S>& T, const BasicStepCocycle<S>& f, const StripPoint<S>& p0,
                                                    const S& N, long n_returns, int x_cells = kDefaultWindows,
                                                    int t_cells = kDefaultBins, long cap = 100'000'000);

}  // namespace ietskew
