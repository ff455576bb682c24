#include "ietskew/ergolab.hpp"

#include <algorithm>
#include <cmath>

#include "ietskew/error.hpp"
#include "ietskew/parallel.hpp"

namespace ietskew {

int FiberHistogram::bin_of(double t) const {
    const double u = (t + L) / (2 * L) * bins;
    if (!(u >= 0)) return 0;
    return std::min(bins - 1, static_cast<int>(u));
}

void FiberHistogram::add(double t) {
    ++counts[static_cast<std::size_t>(bin_of(t))];
    ++total;
    if (std::fabs(t) > L) ++clipped;
}

std::vector<double> FiberHistogram::normalized() const {
    std::vector<double> p(counts.size(), 0.0);
    if (total == 0) return p;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
    return p;
}

void FiberHistogram::merge(const FiberHistogram& other) {
    if (other.bins != bins || other.L != L || other.x_window.left != x_window.left)
        fail(ErrorCode::BinMismatch, "merging histograms with different grids");
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += other.counts[k];
    total += other.total;
    clipped += other.clipped;
}

template <Scalar S>
double default_cutoff(const BasicStepCocycle<S>& f) {
    return 8.0 * f.m() * ScalarTraits<S>::to_double(f.bound());
}

namespace {

std::vector<FiberHistogram> empty_windows(double window_width, double L, int bins) {
    if (!(window_width > 0 && window_width <= 1)) fail(ErrorCode::BadConfig, "window width must lie in (0, 1]");
    if (!(L > 0) || bins <= 0) fail(ErrorCode::BadConfig, "need L > 0 and bins > 0");
    const int windows = static_cast<int>(std::ceil(1.0 / window_width - 1e-12));
    std::vector<FiberHistogram> out(static_cast<std::size_t>(windows));
    for (int w = 0; w < windows; ++w) {
        auto& h = out[static_cast<std::size_t>(w)];
        h.x_window = {w * window_width, std::min(1.0, (w + 1) * window_width)};
        h.L = L;
        h.bins = bins;
        h.counts.assign(static_cast<std::size_t>(bins), 0);
    }
    return out;
}

}  // namespace

template <Scalar S>
std::vector<FiberHistogram> fiber_histograms(const BasicIet<S>& T, const BasicStepCocycle<S>& f, const S& x0, long n,
                                             double window_width, double L, int bins) {
    auto out = empty_windows(window_width, L, bins);
    const double total = ScalarTraits<S>::to_double(T.total_length());
    const std::size_t last = out.size() - 1;
    S x = x0;
    Accumulator<S> t;
    for (long i = 0; i < n; ++i) {
        const double xd = ScalarTraits<S>::to_double(x) / total;
        const auto w = std::min(last, static_cast<std::size_t>(xd / window_width));
        out[w].add(ScalarTraits<S>::to_double(t.value()));
        t.add(f.eval(x));
        x = T.apply(x);
    }
    return out;
}

std::vector<FiberHistogram> fiber_histograms(const FloatIet& T, const FloatStepCocycle& f, const std::vector<double>& starts,
                                             long n, double window_width, double L, int bins) {
    std::vector<std::vector<FiberHistogram>> runs(starts.size());
    parallel_for(starts.size(), [&](std::size_t s) { runs[s] = fiber_histograms(T, f, starts[s], n, window_width, L, bins); });
    auto out = empty_windows(window_width, L, bins);
    for (const auto& run : runs)
        for (std::size_t w = 0; w < out.size(); ++w) out[w].merge(run[w]);
    return out;
}

double shift_distance(const FiberHistogram& h, double sigma, bool* rebinned) {
    const std::vector<double> p = h.normalized();
    if (h.total == 0) return 0;
    const double s = sigma / h.bin_width();
    long k0 = static_cast<long>(std::floor(s));
    double phi = s - static_cast<double>(k0);
    if (phi > 1 - 1e-9) {
        ++k0;
        phi = 0;
    } else if (phi < 1e-9) {
        phi = 0;
    }
    if (rebinned) *rebinned = phi != 0;
    const long n = h.bins;
    auto at = [&](long k) { return p[static_cast<std::size_t>(k)]; };
    // Bin k of the translate holds bin k-k0 on a (1-phi) part and bin k-k0-1 on a phi part.
    double dist = 0;
    for (long k = 0; k < n; ++k) {
        const long a = k - k0, b = k - k0 - 1;
        if (a >= 0 && a < n) dist += (1 - phi) * std::fabs(at(k) - at(a));
        if (phi != 0 && b >= 0 && b < n) dist += phi * std::fabs(at(k) - at(b));
    }
    return dist;
}

ProbeReport probe_histograms(const std::vector<FiberHistogram>& hists, const std::vector<double>& sigmas, bool strict_bins) {
    ProbeReport out;
    std::uint64_t mass = 0;
    for (const auto& h : hists) mass += h.total;
    for (double sigma : sigmas) {
        ShiftReport r;
        r.sigma = sigma;
        for (const auto& h : hists) {
            bool rb = false;
            const double d = shift_distance(h, sigma, &rb);
            if (h.total > 0 && rb) {
                if (strict_bins)
                    fail(ErrorCode::BinMismatch, "shift " + std::to_string(sigma) + " is not a multiple of the bin width " +
                                                     std::to_string(h.bin_width()));
                r.rebinned = true;
            }
            r.per_window.push_back(d);
            if (mass > 0) r.aggregate += d * static_cast<double>(h.total) / static_cast<double>(mass);
        }
        out.rebinned = out.rebinned || r.rebinned;
        out.aggregate += r.aggregate;
        out.shifts.push_back(std::move(r));
    }
    if (!sigmas.empty()) out.aggregate /= static_cast<double>(sigmas.size());
    return out;
}

ProbeReport translation_invariance_probe(const FloatIet& T, const FloatStepCocycle& f, std::vector<double> sigmas,
                                         const ProbeOptions& options) {
    if (sigmas.empty()) sigmas = f.jumps();
    if (options.windows <= 0 || options.starts.empty()) fail(ErrorCode::BadConfig, "need windows > 0 and a start point");
    const double L = options.L.value_or(default_cutoff(f));
    const auto hists =
        fiber_histograms(T, f, options.starts, options.n, 1.0 / options.windows, L, options.bins);
    ProbeReport out = probe_histograms(hists, sigmas, options.strict_bins);
    out.n = options.n;
    out.starts = options.starts.size();
    return out;
}

double EmpiricalBirkhoffMeasure::mass(int xc, int tc) const {
    if (total == 0) return 0;
    return static_cast<double>(counts[static_cast<std::size_t>(xc) * static_cast<std::size_t>(t_cells) + static_cast<std::size_t>(tc)]) /
           static_cast<double>(total);
}

std::size_t EmpiricalBirkhoffMeasure::occupied_cells() const {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c > 0; }));
}

double EmpiricalBirkhoffMeasure::l1_distance(const EmpiricalBirkhoffMeasure& other) const {
    if (other.x_cells != x_cells || other.t_cells != t_cells || other.N != N)
        fail(ErrorCode::BinMismatch, "comparing measures on different grids");
    double d = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double a = total ? static_cast<double>(counts[k]) / static_cast<double>(total) : 0.0;
        const double b = other.total ? static_cast<double>(other.counts[k]) / static_cast<double>(other.total) : 0.0;
        d += std::fabs(a - b);
    }
    return d;
}

template <Scalar S>
EmpiricalBirkhoffMeasure empirical_birkhoff_measure(const BasicIet<S>& T, const BasicStepCocycle<S>& f, const StripPoint<S>& p0,
                                                    const S& N, long n_returns, int x_cells, int t_cells, long cap) {
    if (x_cells <= 0 || t_cells <= 0) fail(ErrorCode::BadConfig, "need positive cell counts");
    EmpiricalBirkhoffMeasure out;
    out.start = {ScalarTraits<S>::to_double(p0.x), ScalarTraits<S>::to_double(p0.t)};
    out.n = n_returns;
    out.N = ScalarTraits<S>::to_double(N);
    out.x_cells = x_cells;
    out.t_cells = t_cells;
    out.counts.assign(static_cast<std::size_t>(x_cells) * static_cast<std::size_t>(t_cells), 0);
    const double total = ScalarTraits<S>::to_double(T.total_length());
    StripPoint<S> p = p0;
    for (long r = 0; r < n_returns; ++r) {
        const StripReturn<S> ret = strip_first_return(T, f, p, N, cap);
        p = ret.point;
        out.base_steps += ret.return_time;
        out.max_return_time = std::max(out.max_return_time, ret.return_time);
        const double x = ScalarTraits<S>::to_double(p.x) / total;
        const double t = ScalarTraits<S>::to_double(p.t);
        const int xc = std::min(x_cells - 1, static_cast<int>(x * x_cells));
        const int tc = std::clamp(static_cast<int>((t + out.N) / (2 * out.N) * t_cells), 0, t_cells - 1);
        ++out.counts[static_cast<std::size_t>(xc) * static_cast<std::size_t>(t_cells) + static_cast<std::size_t>(tc)];
        ++out.total;
    }
    return out;
}

#define IETSKEW_INSTANTIATE(S)                                                                                              \
    template double default_cutoff<S>(const BasicStepCocycle<S>&);                                                         \
    template std::vector<FiberHistogram> fiber_histograms<S>(const BasicIet<S>&, const BasicStepCocycle<S>&, const S&, long, \
                                                             double, double, int);                                         \
    template EmpiricalBirkhoffMeasure empirical_birkhoff_measure<S>(const BasicIet<S>&, const BasicStepCocycle<S>&,         \
                                                                    const StripPoint<S>&, const S&, long, int, int, long);

IETSKEW_INSTANTIATE(Rational)
IETSKEW_INSTANTIATE(double)

}  // namespace ietskew
