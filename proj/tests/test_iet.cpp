#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>
#include <numeric>

#include "ietskew/error.hpp"
#include "ietskew/iet.hpp"
#include "ietskew/random.hpp"

using namespace ietskew;

namespace {

Permutation swap2() { return Permutation::from_ranks({1, 2}, {2, 1}); }

Iet rotation_like() { return Iet(swap2(), {Rational(2, 3), Rational(1, 3)}); }

void expect_code(ErrorCode code, auto&& fn) {
    try {
        fn();
        FAIL("expected " << to_string(code));
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

}  // namespace

TEST_CASE("construction and validation") {
    Iet t = rotation_like();
    CHECK(t.total_length() == 1);
    expect_code(ErrorCode::ReduciblePermutation, [] { Iet(Permutation::from_ranks({1, 2}, {1, 2}), {Rational(1, 2), Rational(1, 2)}); });
    expect_code(ErrorCode::NonPositiveLength, [] { Iet(swap2(), {Rational(1), Rational(0)}); });
    expect_code(ErrorCode::NotBijective, [] { Permutation::from_ranks({1, 1}, {2, 1}); });
    // Reducible permutations are accepted when enforcement is off.
    Iet id = new_iet(Permutation::from_ranks({1, 2}, {1, 2}), std::vector<Rational>{1, 3}, true, false);
    CHECK(id.length(1) == Rational(3, 4));

    Iet rev = Iet(Permutation::reversal(4), std::vector<Rational>(4, Rational(1, 4)));
    CHECK(rev.permutation().irreducible());
}

TEST_CASE("evaluation examples") {
    Iet t = rotation_like();
    CHECK(t.apply(0) == Rational(1, 3));
    CHECK(t.apply_inverse(0) == Rational(2, 3));
    CHECK(t.discontinuities() == std::vector<Rational>{Rational(2, 3)});
    // translation property on a single interval
    CHECK(t.apply(Rational(1, 5)) - Rational(1, 5) == t.apply(Rational(1, 2)) - Rational(1, 2));

    Iet rev = Iet(Permutation::reversal(4), std::vector<Rational>(4, Rational(1, 4)));
    CHECK(rev.apply(0) == Rational(3, 4));
    CHECK(rev.discontinuities() == std::vector<Rational>{Rational(1, 4), Rational(1, 2), Rational(3, 4)});
    expect_code(ErrorCode::OutOfDomain, [&] { rev.apply(1); });
    expect_code(ErrorCode::OutOfDomain, [&] { rev.apply_inverse(-1); });
}

TEST_CASE("apply agrees with rank-vector oracle and inverts exactly") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 2 + static_cast<int>(rng.below(5));
        std::vector<int> pi0(static_cast<std::size_t>(d)), pi1(static_cast<std::size_t>(d));
        std::iota(pi0.begin(), pi0.end(), 1);
        std::iota(pi1.begin(), pi1.end(), 1);
        do {
            for (int k = d - 1; k > 0; --k) std::swap(pi1[static_cast<std::size_t>(k)], pi1[rng.below(static_cast<std::uint64_t>(k + 1))]);
        } while (!oracle::irreducible(pi0, pi1));
        Permutation p = Permutation::from_ranks(pi0, pi1);
        Iet t = sample_iet<Rational>(rng.next(), p, 40);
        for (int k = 0; k < 100; ++k) {
            Rational x = rng.dyadic(30);
            Rational y = t.apply(x);
            CHECK(y == oracle::apply(pi0, pi1, t.lengths(), x));
            CHECK(t.apply_inverse(y) == x);
        }
        // image partition tiles [0,1) in pi1 order
        Rational acc = 0;
        for (int pos = 0; pos < d; ++pos) {
            Letter a = p.bottom(pos);
            CHECK(t.image_interval(a).left == acc);
            CHECK(t.image_interval(a).length() == t.interval(a).length());
            acc += t.length(a);
        }
        CHECK(acc == 1);
    }
}

TEST_CASE("irreducibility matches brute force for all permutations up to d = 6") {
    for (int d = 2; d <= 6; ++d) {
        std::vector<int> pi0(static_cast<std::size_t>(d)), pi1(static_cast<std::size_t>(d));
        std::iota(pi0.begin(), pi0.end(), 1);
        std::iota(pi1.begin(), pi1.end(), 1);
        do {
            // also scramble the top row so letter naming is not the identity
            std::vector<int> top = pi0;
            std::rotate(top.begin(), top.begin() + 1, top.end());
            std::vector<int> bottom(pi1.size());
            for (std::size_t a = 0; a < pi1.size(); ++a) bottom[a] = pi1[static_cast<std::size_t>(top[a] - 1)];
            CHECK(Permutation::from_ranks(top, bottom).irreducible() == oracle::irreducible(top, bottom));
        } while (std::next_permutation(pi1.begin(), pi1.end()));
    }
}

TEST_CASE("float mode round trip") {
    FloatIet t = sample_iet<double>(5, Permutation::reversal(4));
    Rng rng(3);
    for (int k = 0; k < 1000; ++k) {
        double x = rng.uniform() * t.total_length() * 0.999999;
        CHECK(std::fabs(t.apply_inverse(t.apply(x)) - x) < 1e-12);
    }
    double s = 0;
    for (double v : t.lengths()) s += v;
    CHECK(std::fabs(s - 1) < 1e-12);
}

TEST_CASE("keane check") {
    KeaneReport r = keane_check(rotation_like(), 100);
    REQUIRE(r.connection);
    // Oracle: scan T^n(2/3) against {0, 2/3}; n=1 maps 2/3 to 0, the allowed case.
    Rational x = Rational(2, 3);
    long n_found = 0;
    for (long n = 1; n <= 100 && !n_found; ++n) {
        x = oracle::apply({1, 2}, {2, 1}, {Rational(2, 3), Rational(1, 3)}, x);
        if ((x == 0 && n > 1) || x == Rational(2, 3)) n_found = n;
    }
    CHECK(r.n == n_found);
    CHECK(r.n == 3);
    CHECK(r.a == Rational(2, 3));

    CHECK_FALSE(keane_check(rotation_like(), 0).connection);

    Iet generic = sample_iet<Rational>(99, Permutation::reversal(4), 200);
    CHECK_FALSE(keane_check(generic, 10000).connection);

    expect_code(ErrorCode::FloatModeUnsupported, [] { keane_check(sample_iet<double>(1, Permutation::reversal(3)), 10); });
}

TEST_CASE("sampling") {
    Permutation p = Permutation::reversal(3);
    CHECK(sample_iet<Rational>(42, p).lengths() == sample_iet<Rational>(42, p).lengths());
    const int samples = 10000;
    std::vector<double> mean(3, 0.0), sq(3, 0.0);
    for (int s = 0; s < samples; ++s) {
        FloatIet t = sample_iet<double>(static_cast<std::uint64_t>(s) + 1000, p);
        for (int a = 0; a < 3; ++a) {
            CHECK(t.length(a) > 0);
            mean[static_cast<std::size_t>(a)] += t.length(a);
        }
    }
    // Dirichlet(1,1,1): mean 1/3, variance 2/36.
    const double se = std::sqrt(2.0 / 36.0 / samples);
    for (double m : mean) CHECK(std::fabs(m / samples - 1.0 / 3.0) < 3 * se);
}
