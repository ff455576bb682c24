#include <doctest.h>

#include "ietskew/error.hpp"
#include "ietskew/fixtures.hpp"
#include "ietskew/io.hpp"
#include "ietskew/random.hpp"
#include "oracles.hpp"

using namespace ietskew;

namespace {

template <typename F>
void expect_code(ErrorCode code, F&& f) {
    try {
        f();
        FAIL("no error raised");
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

}  // namespace

TEST_CASE("fnv1a reference vectors") {
    // Published FNV-1a 64-bit test vectors.
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("stamp puts the header first and hashes the config dump") {
    const Json config{{"command", "towers"}, {"n", 6}};
    const Json out = stamp(config, Json{{"area", "1"}});
    auto it = out.begin();
    CHECK(it.key() == "version");
    CHECK(out["version"] == std::string(kVersion));
    CHECK(out["config_digest"] == hex64(fnv1a(config.dump())));
    CHECK(out["area"] == "1");
    const Json other = stamp(Json{{"command", "towers"}, {"n", 7}}, Json::object());
    CHECK(other["config_digest"] != out["config_digest"]);
}

TEST_CASE("IET descriptors round trip") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int d = 2 + static_cast<int>(seed % 4);
        const Iet t = sample_iet<Rational>(seed, Permutation::reversal(d), 64);
        const Json j = iet_to_json(t);
        const Json again = Json::parse(j.dump());
        const IetDescriptor back = iet_from_json(again);
        CHECK(back.mode == ScalarMode::Rational);
        CHECK(back.iet.permutation() == t.permutation());
        CHECK(back.iet.lengths() == t.lengths());
        CHECK(iet_to_json(back.iet).dump() == j.dump());
    }
    // the descriptor's rank convention, written by hand
    const Json hand = Json::parse(R"({"d": 3, "pi0": [1, 2, 3], "pi1": [3, 1, 2], "lambda": ["1/2", 0.25, "0.25"]})");
    const IetDescriptor h = iet_from_json(hand);
    CHECK(h.iet.length(0) == Rational(1, 2));
    CHECK(h.iet.length(1) == Rational(1, 4));
    CHECK(h.iet.permutation().bottom(0) == 1);
    for (const Rational x : {Rational(0), Rational(3, 5), Rational(7, 8)})
        CHECK(h.iet.apply(x) == oracle::apply({1, 2, 3}, {3, 1, 2}, {Rational(1, 2), Rational(1, 4), Rational(1, 4)}, x));
    CHECK(h.iet.apply(Rational(0)) == Rational(1, 2));

    const Json f = iet_to_json(golden_iet_float().convert<Rational>(), ScalarMode::Float);
    CHECK(f["lambda"][0].is_number_float());
    const IetDescriptor fb = iet_from_json(f);
    CHECK(fb.mode == ScalarMode::Float);
    CHECK(fb.iet.convert<double>().lengths() == golden_iet_float().lengths());
}

TEST_CASE("descriptor errors") {
    expect_code(ErrorCode::ParseError, [] { iet_from_json(Json::parse(R"({"pi0": [1, 2], "pi1": [2, 1]})")); });
    expect_code(ErrorCode::ParseError,
                [] { iet_from_json(Json::parse(R"({"pi0": [1, 2], "pi1": [2, 1], "lambda": ["1/2"]})")); });
    expect_code(ErrorCode::ParseError,
                [] { iet_from_json(Json::parse(R"({"pi0": [1, 2], "pi1": [2, 1], "lambda": [true, 1]})")); });
    expect_code(ErrorCode::NonPositiveLength,
                [] { iet_from_json(Json::parse(R"({"pi0": [1, 2], "pi1": [2, 1], "lambda": ["0", "1"]})")); });
    expect_code(ErrorCode::ParseError,
                [] { cocycle_from_json(Json::parse(R"({"m": 2, "lengths": ["1/2", "1/2"], "values": [1, -1], "M": 1})")); });
    expect_code(ErrorCode::BadConfig, [] {
        cocycle_from_json(Json::parse(R"({"m": 1, "lengths": [0.5, 0.5], "values": [1, -0.9], "M": 1, "mode": "float"})"));
    });
}

TEST_CASE("cocycle descriptors round trip") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const StepCocycle f = sample_cocycle<Rational>(seed, 1 + static_cast<int>(seed % 3), Rational(1));
        const CocycleDescriptor back = cocycle_from_json(Json::parse(cocycle_to_json(f).dump()));
        CHECK(back.f.lengths() == f.lengths());
        CHECK(back.f.values() == f.values());
        CHECK(back.f.bound() == f.bound());
    }
    // float descriptors absorb rounding into the last segment
    const FloatStepCocycle g = sample_cocycle<double>(1007, 2, 1.0);
    const CocycleDescriptor gb = cocycle_from_json(Json::parse(cocycle_to_json(g.convert<Rational>(), ScalarMode::Float).dump()));
    CHECK(gb.mode == ScalarMode::Float);
    CHECK(gb.f.convert<double>().values() == g.values());
    CHECK(gb.f.lengths()[0].get_d() == g.lengths()[0]);
}

TEST_CASE("paths and matrices round trip") {
    InductionState<Rational> st(sample_iet<Rational>(3, Permutation::reversal(4), 64));
    for (int k = 0; k < 25; ++k) st.advance();
    const RauzyPath back = path_from_json(Json::parse(path_to_json(st.path()).dump()));
    CHECK(back.arrows() == st.path().arrows());
    CHECK(path_matrix(back) == st.inverse_matrix());

    const IntMatrix m = st.matrix();
    CHECK(matrix_from_json(matrix_to_json(m)) == m);
    IntMatrix big = IntMatrix::identity(2);
    big(0, 1) = BigInt("123456789012345678901234567890");
    const Json bj = matrix_to_json(big);
    CHECK(bj[0][0] == 1);
    CHECK(bj[0][1] == "123456789012345678901234567890");
    CHECK(matrix_from_json(bj) == big);
    expect_code(ErrorCode::ParseError, [] { matrix_from_json(Json::parse("[[1, 2], [3]]")); });
}

TEST_CASE("good-return certificates round trip") {
    GoodReturn g;
    g.x = Rational(3, 7);
    g.n = 1001;
    g.birkhoff = Rational(-1, 9);
    g.image = Rational(2, 5);
    g.density_gap = Rational(1, 1000);
    g.continuity_side = Side::Left;
    g.continuity_radius = Rational(1, 123456);
    g.c_prime = 14;
    g.sigma_prime = Rational(1, 1040);
    g.D = Rational(5, 2);
    g.E = IntervalSet::parse("0.2:0.3,1/2:3/4");
    const Json j = good_return_json(g);
    CHECK(j["x"] == "3/7");
    const GoodReturn b = good_return_from_json(j);
    CHECK(b.x == g.x);
    CHECK(b.n == g.n);
    CHECK(b.continuity_side == Side::Left);
    CHECK(b.E.to_string() == g.E.to_string());
    CHECK(good_return_json(b).dump() == j.dump());
}

TEST_CASE("csv dumps") {
    DeviationScan s;
    s.rows.push_back({100, 0.5, {1.0, 2.0}});
    s.rows.push_back({1000, 0.75, {1.5, 2.5}});
    CHECK(deviation_csv(s) == "n,max_abs_birkhoff,dev_A,dev_B\n100,0.5,1,2\n1000,0.75,1.5,2.5\n");

    FiberHistogram h;
    h.x_window = {0, 1};
    h.L = 2;
    h.bins = 4;
    h.counts = {0, 3, 0, 1};
    h.total = 4;
    CHECK(histograms_csv({h}) == "window,bin,t_left,count\n0,1,-1,3\n0,3,1,1\n");
    CHECK(histograms_json({h})[0]["window"] == 0);
}
