#include "ietskew/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ietskew/error.hpp"

namespace ietskew {

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Json stamp(const Json& config, Json body) {
    Json out;
    out["version"] = kVersion;
    out["config_digest"] = hex64(fnv1a(config.dump()));
    out["config"] = config;
    for (auto& [k, v] : body.items()) out[k] = std::move(v);
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::BadConfig, "cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, "'" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::BadConfig, "cannot write '" + path + "'");
    out << text;
    if (!out) fail(ErrorCode::BadConfig, "write to '" + path + "' failed");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorCode::ParseError, std::string("missing field '") + key + "'");
    return j.at(key);
}

// Wraps nlohmann type errors into ParseError.
template <typename F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string(what) + ": " + e.what());
    }
}

std::vector<Rational> rationals(const Json& j) {
    if (!j.is_array()) fail(ErrorCode::ParseError, "expected an array of scalars");
    std::vector<Rational> out;
    for (const auto& v : j) out.push_back(rational_from_json(v));
    return out;
}

Json scalar_json(const Rational& q, ScalarMode mode) {
    if (mode == ScalarMode::Rational) return rational_to_string(q);
    return q.get_d();
}

Json rationals_json(const std::vector<Rational>& v, ScalarMode mode) {
    Json out = Json::array();
    for (const auto& q : v) out.push_back(scalar_json(q, mode));
    return out;
}

ScalarMode mode_of(const Json& j) {
    if (!j.contains("mode")) return ScalarMode::Rational;
    return parse_scalar_mode(guarded("mode", [&] { return j.at("mode").get<std::string>(); }));
}

std::string r(const Rational& q) { return rational_to_string(q); }

}  // namespace

Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(BigInt(j.dump()));
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(ErrorCode::ParseError, "non-finite scalar");
        return Rational(v);
    }
    fail(ErrorCode::ParseError, "expected a scalar, got " + j.dump());
}

Json bigint_to_json(const BigInt& v) {
    if (v.fits_slong_p()) return static_cast<long long>(v.get_si());
    return v.get_str();
}

BigInt bigint_from_json(const Json& j) {
    if (j.is_number_integer()) return BigInt(j.dump());
    if (j.is_string()) {
        try {
            return BigInt(j.get<std::string>());
        } catch (const std::invalid_argument&) {
        }
    }
    fail(ErrorCode::ParseError, "expected an integer, got " + j.dump());
}

Json permutation_to_json(const Permutation& p) {
    return Json{{"d", p.size()}, {"pi0", p.pi0_ranks()}, {"pi1", p.pi1_ranks()}};
}

Permutation permutation_from_json(const Json& j) {
    const auto pi0 = guarded("pi0", [&] { return field(j, "pi0").get<std::vector<int>>(); });
    const auto pi1 = guarded("pi1", [&] { return field(j, "pi1").get<std::vector<int>>(); });
    if (j.contains("d") && guarded("d", [&] { return j.at("d").get<int>(); }) != static_cast<int>(pi0.size()))
        fail(ErrorCode::ParseError, "d disagrees with pi0");
    return Permutation::from_ranks(pi0, pi1);
}

IetDescriptor iet_from_json(const Json& j) {
    const ScalarMode mode = mode_of(j);
    if (mode == ScalarMode::BigFloat) fail(ErrorCode::BadConfig, "descriptors are rational or float");
    Permutation perm = permutation_from_json(j);
    std::vector<Rational> lambda = rationals(field(j, "lambda"));
    if (static_cast<int>(lambda.size()) != perm.size()) fail(ErrorCode::ParseError, "lambda has the wrong length");
    return {mode, Iet(std::move(perm), std::move(lambda))};
}

Json iet_to_json(const Iet& iet, ScalarMode mode) {
    Json out = permutation_to_json(iet.permutation());
    out["lambda"] = rationals_json(iet.lengths(), mode);
    out["mode"] = std::string(to_string(mode));
    return out;
}

CocycleDescriptor cocycle_from_json(const Json& j) {
    const ScalarMode mode = mode_of(j);
    const int m = guarded("m", [&] { return field(j, "m").get<int>(); });
    std::vector<Rational> lengths = rationals(field(j, "lengths"));
    std::vector<Rational> values = rationals(field(j, "values"));
    const Rational bound = rational_from_json(field(j, "M"));
    if (static_cast<int>(lengths.size()) != m + 1 || values.size() != lengths.size())
        fail(ErrorCode::ParseError, "a cocycle with m jumps has m + 1 lengths and values");
    const bool exact = mode == ScalarMode::Rational;
    if (!exact) {
        // Decimal lengths rarely sum to 1 exactly; the last segment absorbs the rounding.
        Rational rest = 1;
        for (std::size_t i = 0; i + 1 < lengths.size(); ++i) rest -= lengths[i];
        if (abs(rest - lengths.back()) > Rational(1, 1000000000)) fail(ErrorCode::BadConfig, "cocycle lengths do not sum to 1");
        lengths.back() = rest;
    }
    StepCocycle f(std::move(lengths), std::move(values), bound, {.require_mean_zero = exact});
    if (!exact && abs(f.mean()) > Rational(1, 1000000) / 1000000)
        fail(ErrorCode::BadConfig, "cocycle mean is not zero");
    return {mode, std::move(f)};
}

Json cocycle_to_json(const StepCocycle& f, ScalarMode mode) {
    Json out;
    out["m"] = f.m();
    out["lengths"] = rationals_json(f.lengths(), mode);
    out["values"] = rationals_json(f.values(), mode);
    out["M"] = scalar_json(f.bound(), mode);
    out["mode"] = std::string(to_string(mode));
    return out;
}

Json path_to_json(const RauzyPath& path) {
    Json out = Json::array();
    for (const auto& a : path.arrows())
        out.push_back(Json{{"perm", permutation_to_json(a.from)}, {"type", std::string(1, type_char(a.type))}});
    return out;
}

RauzyPath path_from_json(const Json& j) {
    if (!j.is_array()) fail(ErrorCode::ParseError, "a path is an array of arrows");
    std::vector<RauzyArrow> arrows;
    for (const auto& a : j) {
        const Permutation from = permutation_from_json(field(a, "perm"));
        const StepType type = parse_step_type(guarded("type", [&] { return field(a, "type").get<std::string>(); }));
        arrows.push_back(rauzy_arrow(from, type));
    }
    return RauzyPath(std::move(arrows));
}

Json matrix_to_json(const IntMatrix& m) {
    Json out = Json::array();
    for (int r = 0; r < m.size(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.size(); ++c) row.push_back(bigint_to_json(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

IntMatrix matrix_from_json(const Json& j) {
    if (!j.is_array()) fail(ErrorCode::ParseError, "a matrix is an array of rows");
    const int n = static_cast<int>(j.size());
    IntMatrix m(n);
    for (int r = 0; r < n; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != n) fail(ErrorCode::ParseError, "matrix is not square");
        for (int c = 0; c < n; ++c) m(r, c) = bigint_from_json(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

Json balanced_domain_json(const BalancedDomain& u) {
    Json out;
    out["gamma"] = u.gamma.types();
    out["gamma_tilde"] = u.gamma_tilde.types();
    out["start"] = u.gamma.empty() ? Json() : permutation_to_json(u.gamma.start());
    out["a_gamma"] = matrix_to_json(u.a_gamma);
    out["c_gamma"] = bigint_to_json(u.c_gamma);
    out["ell"] = u.ell;
    out["blocks"] = u.blocks;
    out["nu"] = r(u.nu);
    out["lambda_in_u"] = u.lambda_in_u;
    out["delta_in_u"] = u.delta_in_u;
    out["samples"] = u.samples;
    Json bullets = Json::array();
    for (const auto& b : u.report) bullets.push_back(Json{{"name", b.name}, {"checked", b.checked}, {"failures", b.failures}});
    out["checks"] = std::move(bullets);
    return out;
}

Json balanced_times_json(const BalancedTimes& bt) {
    Json out;
    out["epsilon"] = bt.epsilon;
    out["eta"] = r(bt.eta);
    out["domain"] = balanced_domain_json(bt.domain);
    out["theta1"] = bt.theta1;
    out["theta2"] = bt.theta2;
    out["rho_hat"] = bt.rho_hat;
    out["delta"] = bt.delta;
    out["delta_eff"] = bt.delta_eff;
    out["eta0"] = bt.eta0;
    out["eta_below_eta0"] = bt.eta_below_eta0;
    out["constants_feasible"] = bt.constants_feasible;
    out["sigma"] = r(bt.sigma);
    out["c_delta"] = bigint_to_json(bt.c_delta);
    out["C"] = r(bt.c);
    out["zorich_blocks"] = bt.zorich_blocks;
    out["returns"] = bt.returns;
    Json seq = Json::array();
    for (const auto& t : bt.sequence) {
        Json e;
        e["k"] = t.k;
        e["return_index"] = t.return_index;
        e["window_start"] = t.window_start;
        e["zorich_step"] = t.zorich_step;
        e["rauzy_step"] = t.rauzy_step;
        e["h"] = t.h.get_str();
        e["heights"] = Json::array();
        for (const auto& q : t.heights) e["heights"].push_back(q.get_str());
        e["ratio_below_c_gamma"] = t.ratio_below_c_gamma;
        e["condition_i_failures"] = t.condition_i_failures;
        e["condition_ii_failures"] = t.condition_ii_failures;
        e["worst_density_scaled"] = t.worst_density_scaled;
        seq.push_back(std::move(e));
    }
    out["sequence"] = std::move(seq);
    out["check_samples"] = bt.check_samples;
    out["growth_proxy"] = bt.growth_proxy;
    out["growth_bound"] = bt.growth_bound;
    out["eta_ratio_ok"] = bt.eta_ratio_ok;
    out["summary"] = Json{{"heights_increasing", bt.heights_increasing()},
                          {"ratios_below_c_gamma", bt.all_ratios_below_c_gamma()},
                          {"condition_i", bt.condition_i()},
                          {"condition_ii", bt.condition_ii()},
                          {"condition_iii", bt.condition_iii()}};
    return out;
}

namespace {

Json stats_json(const SearchStats& s) {
    return Json{{"points", s.points}, {"times_tested", s.times_tested}, {"in_set", s.in_set},
                {"best_abs_sum", r(s.best_abs_sum)}};
}

}  // namespace

Json recurrence_json(const RecurrenceHit& hit) {
    Json out;
    out["y"] = r(hit.y);
    out["p"] = hit.p;
    out["n"] = hit.n.get_str();
    out["birkhoff"] = r(hit.birkhoff);
    out["image"] = r(hit.image);
    out["level"] = hit.level;
    out["stats"] = stats_json(hit.stats);
    return out;
}

Json good_return_json(const GoodReturn& g) {
    Json out;
    out["x"] = r(g.x);
    out["n"] = g.n;
    out["birkhoff"] = r(g.birkhoff);
    out["image"] = r(g.image);
    out["density_gap"] = r(g.density_gap);
    out["continuity_side"] = std::string(to_string(g.continuity_side));
    out["continuity_radius"] = r(g.continuity_radius);
    out["C_prime"] = r(g.c_prime);
    out["sigma_prime"] = r(g.sigma_prime);
    out["D"] = r(g.D);
    out["E"] = g.E.to_string();
    out["stats"] = stats_json(g.stats);
    return out;
}

GoodReturn good_return_from_json(const Json& j) {
    GoodReturn g;
    g.x = rational_from_json(field(j, "x"));
    g.n = guarded("n", [&] { return field(j, "n").get<long>(); });
    g.birkhoff = rational_from_json(field(j, "birkhoff"));
    g.image = rational_from_json(field(j, "image"));
    g.density_gap = rational_from_json(field(j, "density_gap"));
    const auto side = guarded("continuity_side", [&] { return field(j, "continuity_side").get<std::string>(); });
    if (side != "left" && side != "right") fail(ErrorCode::ParseError, "continuity_side is left or right");
    g.continuity_side = side == "left" ? Side::Left : Side::Right;
    g.continuity_radius = rational_from_json(field(j, "continuity_radius"));
    g.c_prime = rational_from_json(field(j, "C_prime"));
    g.sigma_prime = rational_from_json(field(j, "sigma_prime"));
    g.D = rational_from_json(field(j, "D"));
    g.E = IntervalSet::parse(guarded("E", [&] { return field(j, "E").get<std::string>(); }));
    return g;
}

Json good_return_check_json(const GoodReturnCheck& c) {
    return Json{{"start_in_e", c.start_in_e}, {"image_in_e", c.image_in_e}, {"sum_bounded", c.sum_bounded},
                {"dense", c.dense},           {"continuity", c.continuity}, {"fields_match", c.fields_match},
                {"all", c.all()}};
}

Json lyapunov_json(const LyapunovEstimate& e) {
    return Json{{"theta1", e.theta1},
                {"theta2", e.theta2},
                {"theta1_dual", e.theta1_dual},
                {"blocks_used", e.blocks_used},
                {"renormalization_period", e.renormalization_period},
                {"confidence", e.confidence},
                {"rauzy_steps", e.rauzy_steps}};
}

Json slope_json(const SlopeFit& fit) {
    return Json{{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"rms_residual", fit.rms_residual},
                {"points", fit.points},
                {"degenerate", fit.degenerate}};
}

Json deviation_json(const DeviationScan& scan) {
    Json out;
    out["birkhoff_fit"] = slope_json(scan.birkhoff_fit);
    out["visit_fits"] = Json::array();
    for (const auto& f : scan.visit_fits) out["visit_fits"].push_back(slope_json(f));
    out["target"] = scan.target ? Json(*scan.target) : Json();
    out["rows"] = scan.rows.size();
    return out;
}

std::string deviation_csv(const DeviationScan& scan) {
    std::ostringstream s;
    s << "n,max_abs_birkhoff";
    const std::size_t d = scan.rows.empty() ? 0 : scan.rows.front().visit_deviation.size();
    for (std::size_t a = 0; a < d; ++a) s << ",dev_" << static_cast<char>('A' + a);
    s << "\n";
    for (const auto& row : scan.rows) {
        s << row.n << "," << ScalarTraits<double>::format(row.max_abs_birkhoff);
        for (double v : row.visit_deviation) s << "," << ScalarTraits<double>::format(v);
        s << "\n";
    }
    return s.str();
}

Json probe_json(const ProbeReport& report) {
    Json out;
    out["n"] = report.n;
    out["starts"] = report.starts;
    out["aggregate"] = report.aggregate;
    out["rebinned"] = report.rebinned;
    out["shifts"] = Json::array();
    for (const auto& s : report.shifts)
        out["shifts"].push_back(
            Json{{"sigma", s.sigma}, {"rebinned", s.rebinned}, {"aggregate", s.aggregate}, {"per_window", s.per_window}});
    return out;
}

Json histograms_json(const std::vector<FiberHistogram>& hists) {
    Json out = Json::array();
    for (std::size_t w = 0; w < hists.size(); ++w) {
        const auto& h = hists[w];
        out.push_back(Json{{"window", w},
                           {"x_window", {h.x_window.left, h.x_window.right}},
                           {"L", h.L},
                           {"bins", h.bins},
                           {"total", h.total},
                           {"clipped", h.clipped},
                           {"counts", h.counts}});
    }
    return out;
}

std::string histograms_csv(const std::vector<FiberHistogram>& hists) {
    std::ostringstream s;
    s << "window,bin,t_left,count\n";
    for (std::size_t w = 0; w < hists.size(); ++w) {
        const auto& h = hists[w];
        for (int k = 0; k < h.bins; ++k)
            if (h.counts[static_cast<std::size_t>(k)] > 0)
                s << w << "," << k << "," << ScalarTraits<double>::format(-h.L + k * h.bin_width()) << ","
                  << h.counts[static_cast<std::size_t>(k)] << "\n";
    }
    return s.str();
}

Json birkhoff_measure_json(const EmpiricalBirkhoffMeasure& m) {
    Json out;
    out["start"] = {m.start.x, m.start.t};
    out["returns"] = m.n;
    out["N"] = m.N;
    out["x_cells"] = m.x_cells;
    out["t_cells"] = m.t_cells;
    out["total"] = m.total;
    out["base_steps"] = m.base_steps;
    out["max_return_time"] = m.max_return_time;
    out["occupied_cells"] = m.occupied_cells();
    Json cells = Json::array();
    for (int xc = 0; xc < m.x_cells; ++xc)
        for (int tc = 0; tc < m.t_cells; ++tc) {
            const auto c = m.counts[static_cast<std::size_t>(xc) * static_cast<std::size_t>(m.t_cells) + static_cast<std::size_t>(tc)];
            if (c > 0) cells.push_back({xc, tc, c});
        }
    out["cells"] = std::move(cells);
    return out;
}

}  // namespace ietskew
