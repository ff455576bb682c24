#include "doctest.h"

#include <cmath>

#include "ietskew/ergolab.hpp"
#include "ietskew/error.hpp"
#include "ietskew/fixtures.hpp"
#include "ietskew/random.hpp"

using namespace ietskew;

namespace {

template <typename F>
void expect_code(ErrorCode code, F&& fn) {
    try {
        fn();
        FAIL("expected " << to_string(code));
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

// Generic and coboundary fixtures share the base: reversal 4-IET of seed 7.
FloatIet fixture_base() { return sample_iet<double>(7, Permutation::reversal(4)); }
FloatStepCocycle generic_fixture() { return sample_cocycle<double>(1007, 2, 1.0); }
FloatStepCocycle transfer_function() {
    return FloatStepCocycle({0.3, 0.45, 0.25}, {1.0, -0.5, 0.25}, 1.0, {.require_mean_zero = false});
}

FiberHistogram synthetic(int bins, double L, const std::vector<std::pair<int, std::uint64_t>>& mass) {
    FiberHistogram h;
    h.x_window = {0, 1};
    h.L = L;
    h.bins = bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (auto [k, c] : mass) {
        h.counts[static_cast<std::size_t>(k)] += c;
        h.total += c;
    }
    return h;
}

}  // namespace

TEST_CASE("fiber histograms tile and conserve mass") {
    const FloatIet t = golden_iet_float();
    const FloatStepCocycle f = sample_cocycle<double>(7, 2, 1.0);
    const double L = default_cutoff(f);
    CHECK(L == 16.0);
    const auto empty = fiber_histograms(t, f, 0.25, 0, 1.0 / 64, L, 256);
    REQUIRE(empty.size() == 64);
    for (const auto& h : empty) CHECK(h.total == 0);

    const auto hists = fiber_histograms(t, f, 0.25, 50000, 1.0 / 64, L, 256);
    std::uint64_t total = 0;
    double covered = 0;
    for (std::size_t w = 0; w < hists.size(); ++w) {
        std::uint64_t s = 0;
        for (auto c : hists[w].counts) s += c;
        CHECK(s == hists[w].total);
        total += s;
        covered += hists[w].x_window.length();
        if (w > 0) CHECK(hists[w].x_window.left == hists[w - 1].x_window.right);
        if (hists[w].total > 0) {
            double m = 0;
            for (double p : hists[w].normalized()) m += p;
            CHECK(m == doctest::Approx(1.0));
        }
    }
    CHECK(total == 50000);
    CHECK(covered == doctest::Approx(1.0));
    // uneven widths: the last window is shorter
    const auto odd = fiber_histograms(t, f, 0.25, 1000, 0.3, L, 16);
    REQUIRE(odd.size() == 4);
    CHECK(odd.back().x_window.right == 1.0);

    // rational and float orbits bucket identically over a short run
    const Iet tr = golden_surrogate(200);
    const StepCocycle fr = sample_cocycle<Rational>(7, 2, Rational(1));
    const auto hr = fiber_histograms(tr, fr, Rational(1, 4), 2000, 1.0 / 64, L, 256);
    const auto hd = fiber_histograms(tr.convert<double>(), fr.convert<double>(), 0.25, 2000, 1.0 / 64, L, 256);
    for (std::size_t w = 0; w < hr.size(); ++w) CHECK(hr[w].counts == hd[w].counts);
}

TEST_CASE("merging runs is order independent") {
    const FloatIet t = fixture_base();
    const FloatStepCocycle f = generic_fixture();
    const std::vector<double> starts{0.1, 0.4, 0.77};
    const auto merged = fiber_histograms(t, f, starts, 20000, 1.0 / 8, 32.0, 64);
    auto manual = fiber_histograms(t, f, starts[2], 20000, 1.0 / 8, 32.0, 64);
    for (int s : {1, 0}) {
        const auto run = fiber_histograms(t, f, starts[static_cast<std::size_t>(s)], 20000, 1.0 / 8, 32.0, 64);
        for (std::size_t w = 0; w < manual.size(); ++w) manual[w].merge(run[w]);
    }
    for (std::size_t w = 0; w < manual.size(); ++w) {
        CHECK(manual[w].counts == merged[w].counts);
        CHECK(manual[w].total == merged[w].total);
    }
    auto other = synthetic(32, 32.0, {});
    expect_code(ErrorCode::BinMismatch, [&] { manual[0].merge(other); });
}

TEST_CASE("coboundary fibers stay in the telescoping band") {
    const FloatIet t = golden_iet_float();
    const FloatStepCocycle g = transfer_function();
    const FloatStepCocycle f = coboundary(t, g);
    const double band = 2 * g.sup_norm();
    const double L = 8.0;
    for (long n : {10000L, 100000L}) {
        const auto hists = fiber_histograms(t, f, 0.123, n, 1.0 / 64, L, 256);
        for (const auto& h : hists) {
            CHECK(h.clipped == 0);
            for (int k = 0; k < h.bins; ++k) {
                const double lo = -L + k * h.bin_width(), hi = lo + h.bin_width();
                if (hi < -band || lo > band) CHECK(h.counts[static_cast<std::size_t>(k)] == 0);
            }
        }
    }
}

TEST_CASE("generic fibers spread") {
    const FloatIet t = fixture_base();
    const FloatStepCocycle f = generic_fixture();
    auto far_mass = [&](long n) {
        const auto hists = fiber_histograms(t, f, 0.5, n, 1.0 / 64, 20.0, 256);
        std::uint64_t far = 0, total = 0;
        for (const auto& h : hists) {
            total += h.total;
            for (int k = 0; k < h.bins; ++k) {
                const double mid = -h.L + (k + 0.5) * h.bin_width();
                if (std::fabs(mid) > 10) far += h.counts[static_cast<std::size_t>(k)];
            }
        }
        return static_cast<double>(far) / static_cast<double>(total);
    };
    const double a = far_mass(300000), b = far_mass(1000000), c = far_mass(3000000);
    MESSAGE("mass beyond |t| = 10: " << a << " " << b << " " << c);
    CHECK(a < b);
    CHECK(b < c);
}

TEST_CASE("shift distance") {
    const FiberHistogram h = synthetic(64, 8.0, {{10, 3}, {11, 1}, {30, 4}});
    CHECK(shift_distance(h, 0.0) == 0.0);
    // support {10, 11, 30} moved by 5 bins misses itself entirely
    CHECK(shift_distance(h, 5 * h.bin_width()) == doctest::Approx(2.0));
    // one bin: bins 11 and 31 gain, bins 10 and 30 lose
    CHECK(shift_distance(h, h.bin_width()) == doctest::Approx((3.0 + 2.0 + 1.0 + 4.0 + 4.0) / 8.0));
    bool rebinned = false;
    const double half = shift_distance(h, 0.5 * h.bin_width(), &rebinned);
    CHECK(rebinned);
    CHECK(half == doctest::Approx(0.5 * shift_distance(h, h.bin_width())));
    shift_distance(h, 2 * h.bin_width(), &rebinned);
    CHECK_FALSE(rebinned);

    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<int, std::uint64_t>> mass;
        for (int k = 0; k < 20; ++k) mass.emplace_back(static_cast<int>(rng.below(64)), 1 + rng.below(9));
        const FiberHistogram r = synthetic(64, 8.0, mass);
        const double sigma = rng.uniform(-3, 3);
        CHECK(shift_distance(r, sigma) == doctest::Approx(shift_distance(r, -sigma)).epsilon(1e-12));
        CHECK(shift_distance(r, sigma) <= 2.0 + 1e-12);
    }
    expect_code(ErrorCode::BinMismatch, [&] { probe_histograms({h}, {0.3}, true); });
    const ProbeReport ok = probe_histograms({h}, {0.3});
    CHECK(ok.rebinned);
}

TEST_CASE("translation probe separates the fixtures") {
    const FloatIet t = fixture_base();
    const FloatStepCocycle generic = generic_fixture();
    const FloatStepCocycle cob = coboundary(t, transfer_function());
    // default bin width (2 * 16 / 256), cutoff widened so nothing clips
    ProbeOptions o;
    o.L = 128.0;
    o.bins = 2048;
    o.n = 100000;
    CHECK(translation_invariance_probe(t, generic, {0.0}, o).aggregate == 0.0);
    const double early = translation_invariance_probe(t, generic, {}, o).aggregate;
    const double cob_early = translation_invariance_probe(t, cob, {}, o).aggregate;
    o.n = 10000000;
    const double late = translation_invariance_probe(t, generic, {}, o).aggregate;
    o.n = 1000000;
    const double cob_late = translation_invariance_probe(t, cob, {}, o).aggregate;
    MESSAGE("generic " << early << " -> " << late << ", coboundary " << cob_early << " -> " << cob_late);
    CHECK(late < 0.5 * early);
    CHECK(late < 0.2);
    CHECK(cob_early > 1.0);
    CHECK(cob_late > 1.0);
}

TEST_CASE("empirical Birkhoff measures") {
    const FloatIet t = fixture_base();
    const FloatStepCocycle g = transfer_function();
    const FloatStepCocycle cob = coboundary(t, g);
    const double band = 2 * g.sup_norm();

    const auto one = empirical_birkhoff_measure(t, cob, StripPoint<double>{0.3, 0.0}, band, 1);
    CHECK(one.occupied_cells() == 1);
    CHECK(one.total == 1);

    // every first return to the band takes one step: the orbit never leaves it
    const auto cm = empirical_birkhoff_measure(t, cob, StripPoint<double>{0.3, 0.0}, band, 100000);
    CHECK(cm.max_return_time == 1);
    CHECK(cm.base_steps == 100000);
    double mass = 0;
    for (int x = 0; x < cm.x_cells; ++x)
        for (int c = 0; c < cm.t_cells; ++c) mass += cm.mass(x, c);
    CHECK(mass == doctest::Approx(1.0));
    // bounded orbit: each x cell meets few t values
    CHECK(cm.occupied_cells() < static_cast<std::size_t>(cm.x_cells) * 12);

    // generic orbits from two start points look alike sooner or later
    const FloatIet gold = golden_iet_float();
    const FloatStepCocycle f = sample_cocycle<double>(7, 2, 1.0);
    auto distance = [&](long n) {
        const auto a = empirical_birkhoff_measure(gold, f, StripPoint<double>{0.1, 0.0}, 1.0, n, 16, 16);
        const auto b = empirical_birkhoff_measure(gold, f, StripPoint<double>{0.6, 0.5}, 1.0, n, 16, 16);
        return a.l1_distance(b);
    };
    const double d_short = distance(1000), d_long = distance(300000);
    MESSAGE("two-start distance " << d_short << " -> " << d_long);
    CHECK(d_long < d_short);
    expect_code(ErrorCode::CapExceeded,
                [&] { empirical_birkhoff_measure(gold, f, StripPoint<double>{0.1, 0.0}, 0.01, 10, 8, 8, 2); });
}

TEST_CASE("compensated fiber coordinates over long runs") {
    const FloatIet t = fixture_base();
    const FloatStepCocycle f = generic_fixture();
    double x = 0.5;
    Accumulator<double> acc;
    __float128 wide = 0;
    double worst = 0;
    for (long i = 0; i < 10000000; ++i) {
        const double v = f.eval(x);
        acc.add(v);
        wide += v;
        if (i % 100000 == 0) worst = std::max(worst, std::fabs(acc.value() - static_cast<double>(wide)));
        x = t.apply(x);
    }
    worst = std::max(worst, std::fabs(acc.value() - static_cast<double>(wide)));
    CHECK(worst < 1e-6);
}
