#include "ietskew/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ietskew/error.hpp"
#include "ietskew/parallel.hpp"
#include "ietskew/random.hpp"

namespace ietskew {

namespace {

// Bare Rauzy-Veech on (pi, lambda) without matrices or IET objects. Double
// lengths are renormalized to total 1 after every step: unnormalized
// subtraction keeps them on the ulp grid of the start, where the orbit is
// rational and dies within a few hundred steps.
template <typename W>
struct Runner {
    Permutation perm;
    std::vector<W> lam;
    long steps = 0;

    W total() const {
        W t = 0;
        for (const W& v : lam) t += v;
        return t;
    }

    StepType next_type() const {
        const W& top = lam[static_cast<std::size_t>(perm.last_top())];
        const W& bottom = lam[static_cast<std::size_t>(perm.last_bottom())];
        bool degenerate;
        if constexpr (ScalarTraits<W>::exact) {
            degenerate = top == bottom;
        } else {
            degenerate = ScalarTraits<W>::abs(W(top - bottom)) < total() * kFloatTolerance;
        }
        if (degenerate) fail(ErrorCode::DegenerateLengths, "last lengths agree at step " + std::to_string(steps));
        return top > bottom ? StepType::Top : StepType::Bottom;
    }

    const RauzyArrow& step(StepType t) {
        const RauzyArrow& arrow = rauzy_arrow(perm, t);
        lam[static_cast<std::size_t>(arrow.winner)] -= lam[static_cast<std::size_t>(arrow.loser)];
        perm = arrow.to;
        ++steps;
        if constexpr (std::is_same_v<W, double>) {
            const double t = total();
            for (double& v : lam) v /= t;
        }
        return arrow;
    }
};

struct Frame {
    std::vector<double> v1, v2, u;
    double log1 = 0, log2 = 0, log_u = 0;
    std::vector<double> run1, run2;
    long blocks = 0;

    void push(const RauzyArrow& a) {
        const auto w = static_cast<std::size_t>(a.winner), l = static_cast<std::size_t>(a.loser);
        v1[l] += v1[w];
        v2[l] += v2[w];
        u[w] -= u[l];
    }

    static double norm(const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    }

    void reorthonormalize() {
        const double r1 = norm(v1);
        for (double& x : v1) x /= r1;
        double dot = 0;
        for (std::size_t i = 0; i < v1.size(); ++i) dot += v1[i] * v2[i];
        for (std::size_t i = 0; i < v1.size(); ++i) v2[i] -= dot * v1[i];
        const double r2 = norm(v2);
        for (double& x : v2) x /= r2;
        const double ru = norm(u);
        for (double& x : u) x /= ru;
        log1 += std::log(r1);
        log2 += std::log(r2);
        log_u += std::log(ru);
        run1.push_back(log1 / static_cast<double>(blocks));
        run2.push_back(log2 / static_cast<double>(blocks));
    }
};

template <typename W>
void drive(Runner<W>& runner, Frame& frame, long blocks, long period, long kappa_cap) {
    for (long b = 0; b < blocks; ++b) {
        const StepType t = runner.next_type();
        long kappa = 0;
        for (;;) {
            frame.push(runner.step(t));
            if (++kappa > kappa_cap)
                fail(ErrorCode::KappaCapExceeded, "more than " + std::to_string(kappa_cap) + " steps in one block");
            if (runner.next_type() != t) break;
        }
        ++frame.blocks;
        if (frame.blocks % period == 0) frame.reorthonormalize();
    }
}

double drift(const std::vector<double>& run) {
    if (run.size() < 2) return std::numeric_limits<double>::infinity();
    const std::size_t from = run.size() - std::max<std::size_t>(2, run.size() / 4);
    const auto [lo, hi] = std::minmax_element(run.begin() + static_cast<std::ptrdiff_t>(from), run.end());
    return (*hi - *lo) / 2;
}

}  // namespace

template <Scalar S>
LyapunovEstimate lyapunov_exponents(const BasicIet<S>& iet, long n_blocks, long reorth_period, LyapunovOptions options) {
    if (n_blocks <= 0 || reorth_period <= 0) fail(ErrorCode::BadConfig, "block count and period must be positive");
    const int d = iet.size();
    const auto du = static_cast<std::size_t>(d);
    Frame frame;
    frame.v1.assign(du, 1.0);
    Rng rng(options.seed);
    for (int i = 0; i < d; ++i) {
        frame.v2.push_back(rng.uniform(-1, 1));
        frame.u.push_back(rng.uniform(-1, 1));
    }

    long steps = 0;
    if constexpr (std::is_same_v<S, Rational>) {
        Runner<Rational> exact{iet.permutation(), iet.lengths()};
        const long warm = std::min(options.warmup_blocks, n_blocks);
        drive(exact, frame, warm, reorth_period, options.kappa_cap);
        const Rational total = exact.total();
        std::vector<double> lam;
        for (const Rational& v : exact.lam) lam.push_back(Rational(v / total).get_d());
        Runner<double> fl{exact.perm, std::move(lam)};
        drive(fl, frame, n_blocks - warm, reorth_period, options.kappa_cap);
        steps = exact.steps + fl.steps;
    } else {
        Runner<S> runner{iet.permutation(), iet.lengths()};
        drive(runner, frame, n_blocks, reorth_period, options.kappa_cap);
        steps = runner.steps;
    }
    if (frame.blocks % reorth_period != 0) frame.reorthonormalize();

    LyapunovEstimate out;
    out.blocks_used = frame.blocks;
    out.renormalization_period = reorth_period;
    out.rauzy_steps = steps;
    const auto nb = static_cast<double>(frame.blocks);
    out.theta1 = frame.log1 / nb;
    out.theta1_dual = frame.log_u / nb;
    out.confidence = drift(frame.run1);
    if (d > 2) {
        out.theta2 = frame.log2 / nb;
        out.confidence = std::max(out.confidence, drift(frame.run2));
    }
    if (!(out.confidence <= options.max_confidence))
        fail(ErrorCode::NonConvergence, "confidence " + std::to_string(out.confidence) + " above threshold");
    return out;
}

template <Scalar S>
std::vector<long> visit_counts(const BasicIet<S>& iet, const S& x, long n) {
    std::vector<long> out(static_cast<std::size_t>(iet.size()), 0);
    S y = x;
    for (long i = 0; i < n; ++i) {
        ++out[static_cast<std::size_t>(iet.letter_at(y))];
        if (i + 1 < n) y = iet.apply(y);
    }
    return out;
}

std::vector<long> log_grid(long lo, long hi, int per_decade) {
    if (lo <= 0 || hi < lo || per_decade <= 0) fail(ErrorCode::BadConfig, "bad grid bounds");
    std::vector<long> out;
    const double a = std::log10(static_cast<double>(lo)), b = std::log10(static_cast<double>(hi));
    const long count = static_cast<long>(std::ceil((b - a) * per_decade));
    for (long k = 0; k <= count; ++k) {
        const double e = std::min(b, a + static_cast<double>(k) / per_decade);
        const long v = std::clamp(std::lround(std::pow(10.0, e)), lo, hi);
        if (out.empty() || out.back() != v) out.push_back(v);
    }
    return out;
}

SlopeFit fit_upper_half(const std::vector<long>& n, const std::vector<double>& y) {
    SlopeFit fit;
    const std::size_t from = n.size() / 2;
    std::vector<double> xs, ys;
    for (std::size_t i = from; i < n.size(); ++i) {
        if (!(y[i] > 0)) {
            fit.degenerate = true;
            return fit;
        }
        xs.push_back(std::log(static_cast<double>(n[i])));
        ys.push_back(std::log(y[i]));
    }
    fit.points = static_cast<long>(xs.size());
    if (xs.size() < 2) {
        fit.degenerate = true;
        return fit;
    }
    const double k = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - fit.intercept - fit.slope * xs[i];
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / k);
    return fit;
}

template <Scalar S>
DeviationScan deviation_scan(const BasicIet<S>& iet, const BasicStepCocycle<S>& f, const std::vector<long>& n_grid,
                             long x_samples, std::uint64_t seed, const std::optional<LyapunovEstimate>& exponents) {
    if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() < 0)
        fail(ErrorCode::BadConfig, "grid must be nonempty, sorted and nonnegative");
    if (x_samples <= 0) fail(ErrorCode::BadConfig, "need at least one sample");
    const FloatIet t = iet.normalized().template convert<double>();
    const FloatStepCocycle g = f.template convert<double>();
    const int d = t.size();
    const auto du = static_cast<std::size_t>(d);
    const std::size_t rows = n_grid.size();

    // One seeded orbit of length x_samples + max(n); the start points are its
    // first x_samples iterates and S_n at T^m x0 is a difference of prefix sums.
    const long n_max = n_grid.back();
    const std::size_t len = static_cast<std::size_t>(x_samples + n_max);
    std::vector<double> prefix(len + 1, 0.0);
    std::vector<std::uint8_t> letters(len);
    {
        Accumulator<double> sum;
        double x = Rng(seed).uniform();
        for (std::size_t i = 0; i < len; ++i) {
            sum.add(g.eval(x));
            prefix[i + 1] = sum.value();
            letters[i] = static_cast<std::uint8_t>(t.letter_at(x));
            x = t.apply(x);
            if (x >= 1.0) x = std::nextafter(1.0, 0.0);
            if (x < 0) x = 0;
        }
    }
    std::vector<std::vector<std::int32_t>> counts(du, std::vector<std::int32_t>(len + 1, 0));
    for (std::size_t a = 0; a < du; ++a)
        for (std::size_t i = 0; i < len; ++i) counts[a][i + 1] = counts[a][i] + (letters[i] == a ? 1 : 0);

    // per row: 1 + d maxima
    std::vector<std::vector<double>> local(rows, std::vector<double>(1 + du, 0.0));
    parallel_for(rows, [&](std::size_t r) {
        const auto n = static_cast<std::size_t>(n_grid[r]);
        std::vector<double>& out = local[r];
        for (std::size_t m = 0; m < static_cast<std::size_t>(x_samples); ++m) {
            out[0] = std::max(out[0], std::fabs(prefix[m + n] - prefix[m]));
            for (std::size_t a = 0; a < du; ++a)
                out[1 + a] = std::max(out[1 + a], std::fabs(static_cast<double>(counts[a][m + n] - counts[a][m]) -
                                                           t.lengths()[a] * static_cast<double>(n)));
        }
    });

    DeviationScan scan;
    std::vector<double> birk(rows, 0.0);
    std::vector<std::vector<double>> dev(du, std::vector<double>(rows, 0.0));
    for (std::size_t r = 0; r < rows; ++r) {
        DeviationRow row;
        row.n = n_grid[r];
        row.max_abs_birkhoff = local[r][0];
        row.visit_deviation.assign(local[r].begin() + 1, local[r].end());
        // exact zeros of a float sum are what a zero cocycle produces
        if (row.max_abs_birkhoff < 1e-9) row.max_abs_birkhoff = 0;
        birk[r] = row.max_abs_birkhoff;
        for (std::size_t a = 0; a < du; ++a) dev[a][r] = row.visit_deviation[a];
        scan.rows.push_back(std::move(row));
    }
    scan.birkhoff_fit = fit_upper_half(n_grid, birk);
    for (std::size_t a = 0; a < du; ++a) scan.visit_fits.push_back(fit_upper_half(n_grid, dev[a]));
    if (exponents) scan.target = exponents->theta1 > 0 ? exponents->theta2 / exponents->theta1 : 0.0;
    return scan;
}

template LyapunovEstimate lyapunov_exponents(const BasicIet<Rational>&, long, long, LyapunovOptions);
template LyapunovEstimate lyapunov_exponents(const BasicIet<double>&, long, long, LyapunovOptions);
template LyapunovEstimate lyapunov_exponents(const BasicIet<BigFloat>&, long, long, LyapunovOptions);
template std::vector<long> visit_counts(const BasicIet<Rational>&, const Rational&, long);
template std::vector<long> visit_counts(const BasicIet<double>&, const double&, long);
template DeviationScan deviation_scan(const BasicIet<Rational>&, const BasicStepCocycle<Rational>&, const std::vector<long>&,
                                      long, std::uint64_t, const std::optional<LyapunovEstimate>&);
template DeviationScan deviation_scan(const BasicIet<double>&, const BasicStepCocycle<double>&, const std::vector<long>&,
                                      long, std::uint64_t, const std::optional<LyapunovEstimate>&);

}  // namespace ietskew
