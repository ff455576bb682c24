#include "ietskew/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <sstream>

#include "ietskew/error.hpp"
#include "ietskew/fixtures.hpp"
#include "ietskew/io.hpp"

namespace ietskew {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream s(text);
    while (std::getline(s, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    for (const auto& t : split(text, ',')) out.push_back(ScalarTraits<double>::parse(t));
    return out;
}

std::vector<int> parse_ints(const std::string& text) {
    std::vector<int> out;
    for (const auto& t : split(text, ',')) {
        const Rational q = parse_rational(t);
        if (q.get_den() != 1) fail(ErrorCode::BadConfig, "expected an integer, got '" + t + "'");
        out.push_back(static_cast<int>(q.get_num().get_si()));
    }
    return out;
}

long parse_count(const std::string& text) {
    const double v = ScalarTraits<double>::parse(text);
    if (!(v >= 1) || v > 9e18 || v != std::floor(v)) fail(ErrorCode::BadConfig, "bad count '" + text + "'");
    return static_cast<long>(v);
}

struct Inputs {
    std::string iet_path, cocycle_path, mode;
    std::optional<IetDescriptor> iet;
    std::optional<CocycleDescriptor> cocycle;

    ScalarMode arithmetic() const {
        if (!mode.empty()) return parse_scalar_mode(mode);
        return iet ? iet->mode : ScalarMode::Rational;
    }
    const Iet& exact() const { return iet->iet; }
    const StepCocycle& f() const { return cocycle->f; }
};

// Shared state of one invocation.
struct Run {
    std::ostream& out;
    Inputs in;
    std::string out_path;
    Json config;

    void load(bool need_cocycle) {
        if (in.iet_path.empty()) fail(ErrorCode::BadConfig, "--iet is required");
        in.iet = iet_from_json(read_json_file(in.iet_path));
        config["iet"] = iet_to_json(in.exact(), in.iet->mode);
        if (need_cocycle) {
            if (in.cocycle_path.empty()) fail(ErrorCode::BadConfig, "--cocycle is required");
            in.cocycle = cocycle_from_json(read_json_file(in.cocycle_path));
            config["cocycle"] = cocycle_to_json(in.f(), in.cocycle->mode);
        }
        if (!in.mode.empty()) config["mode"] = in.mode;
    }

    void emit(const Json& body, const std::string& summary) {
        if (!out_path.empty()) write_text_file(out_path, dump(stamp(config, body)));
        out << summary << "\n";
    }

    void write_side(const std::string& path, const std::string& text) {
        if (!path.empty()) write_text_file(path, text);
    }
};

void add_inputs(CLI::App* cmd, Run& run, bool cocycle) {
    cmd->add_option("--iet", run.in.iet_path, "IET descriptor (JSON)");
    if (cocycle) cmd->add_option("--cocycle", run.in.cocycle_path, "cocycle descriptor (JSON)");
    cmd->add_option("--mode", run.in.mode, "arithmetic: rational or float (default: the descriptor's)");
    cmd->add_option("--out", run.out_path, "output JSON");
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

// iet ------------------------------------------------------------------------

struct IetArgs {
    int golden = 0;
    std::string rotation, pi0, pi1, lengths;
    int reversal = 0;
    std::uint64_t sample_seed = 0;
    unsigned bits = 64;
    bool normalize = false;
    long keane = 0;
    std::uint64_t cocycle_seed = 0;
    int m = 2;
    std::string bound = "1";
    std::string cocycle_out;
};

void cmd_iet(Run& run, const IetArgs& a) {
    std::optional<Iet> iet;
    ScalarMode mode = run.in.mode.empty() ? ScalarMode::Rational : parse_scalar_mode(run.in.mode);
    Json& c = run.config;
    if (!run.in.iet_path.empty()) {
        auto d = iet_from_json(read_json_file(run.in.iet_path));
        if (run.in.mode.empty()) mode = d.mode;
        iet = std::move(d.iet);
        c["source"] = "file";
    } else if (a.golden > 0) {
        iet = golden_surrogate(a.golden);
        c["golden"] = a.golden;
    } else if (!a.rotation.empty()) {
        iet = rotation_iet(parse_rational(a.rotation));
        c["rotation"] = rational_to_string(parse_rational(a.rotation));
    } else {
        Permutation perm;
        if (a.reversal > 0) {
            perm = Permutation::reversal(a.reversal);
        } else if (!a.pi0.empty() && !a.pi1.empty()) {
            perm = Permutation::from_ranks(parse_ints(a.pi0), parse_ints(a.pi1));
        } else {
            fail(ErrorCode::BadConfig, "give --iet, --golden, --rotation, or a permutation (--reversal or --pi0/--pi1)");
        }
        c["permutation"] = permutation_to_json(perm);
        if (!a.lengths.empty()) {
            std::vector<Rational> lambda;
            for (const auto& t : split(a.lengths, ',')) lambda.push_back(parse_rational(t));
            iet = Iet(perm, std::move(lambda), {.normalize = a.normalize});
            c["lengths"] = a.lengths;
        } else {
            iet = sample_iet<Rational>(a.sample_seed, perm, a.bits);
            c["sample_seed"] = a.sample_seed;
            c["bits"] = a.bits;
        }
    }
    if (a.normalize) {
        iet = iet->normalized();
        c["normalize"] = true;
    }
    c["mode"] = std::string(to_string(mode));
    if (mode == ScalarMode::Float) iet = iet->convert<double>().convert<Rational>();

    Json body = iet_to_json(*iet, mode);
    Json info;
    info["total_length"] = rational_to_string(iet->total_length());
    info["discontinuities"] = Json::array();
    for (const auto& p : iet->discontinuities()) info["discontinuities"].push_back(rational_to_string(p));
    std::string summary = "iet: d=" + std::to_string(iet->size()) + " " + iet->permutation().to_string() +
                          " |lambda|=" + fmt(iet->total_length().get_d());
    if (a.keane > 0) {
        c["keane"] = a.keane;
        const KeaneReport k = keane_check(*iet, a.keane);
        info["keane"] = Json{{"horizon", k.horizon}, {"connection", k.connection}};
        if (k.connection) {
            info["keane"]["n"] = k.n;
            info["keane"]["a"] = rational_to_string(k.a);
            info["keane"]["b"] = rational_to_string(k.b);
        }
        summary += k.connection ? " connection at n=" + std::to_string(k.n) : " no connection up to " + std::to_string(a.keane);
    }
    body["info"] = std::move(info);
    if (a.cocycle_seed > 0) {
        const Rational bound = parse_rational(a.bound);
        c["cocycle"] = Json{{"seed", a.cocycle_seed}, {"m", a.m}, {"M", rational_to_string(bound)}};
        // Float descriptors come from the double sampler, so seeds match the library's float fixtures.
        const StepCocycle g = mode == ScalarMode::Float
                                  ? sample_cocycle<double>(a.cocycle_seed, a.m, bound.get_d()).convert<Rational>()
                                  : sample_cocycle<Rational>(a.cocycle_seed, a.m, bound);
        if (!a.cocycle_out.empty()) write_text_file(a.cocycle_out, dump(stamp(c, cocycle_to_json(g, mode))));
        summary += "; cocycle m=" + std::to_string(a.m);
    }
    run.emit(body, summary);
}

// renorm / towers -------------------------------------------------------------

template <Scalar S>
Json lengths_json(const std::vector<S>& v) {
    Json out = Json::array();
    for (const auto& x : v) {
        if constexpr (std::is_same_v<S, Rational>) out.push_back(rational_to_string(x));
        else out.push_back(ScalarTraits<S>::to_double(x));
    }
    return out;
}

Json heights_json(const std::vector<BigInt>& h) {
    Json out = Json::array();
    for (const auto& q : h) out.push_back(bigint_to_json(q));
    return out;
}

template <Scalar S>
void cmd_renorm_as(Run& run, long steps, long zorich, long kappa_cap) {
    InductionState<S> st(run.in.exact().convert<S>());
    Json body;
    if (zorich > 0) {
        for (long k = 0; k < zorich; ++k) st.advance_zorich(kappa_cap);
        Json blocks = Json::array();
        for (const auto& b : st.zorich_blocks())
            blocks.push_back(Json{{"kappa", b.kappa}, {"type", std::string(1, type_char(b.type))}, {"start_step", b.start_step}});
        body["zorich_blocks"] = std::move(blocks);
    } else {
        for (long k = 0; k < steps; ++k) st.advance();
    }
    body["rauzy_steps"] = st.step_count();
    body["path"] = path_to_json(st.path());
    body["types"] = st.path().types();
    body["matrix"] = matrix_to_json(st.matrix());
    body["heights"] = heights_json(st.heights());
    body["lengths"] = lengths_json(st.current().lengths());
    body["permutation"] = permutation_to_json(st.current().permutation());
    std::string summary = "renorm: " + std::to_string(st.step_count()) + " Rauzy steps";
    if (zorich > 0) summary += " in " + std::to_string(zorich) + " Zorich blocks";
    const std::string t = st.path().types();
    summary += ", types " + (t.size() > 40 ? t.substr(0, 40) + "..." : t);
    run.emit(body, summary);
}

template <Scalar S>
void cmd_towers_as(Run& run, long n, bool verify) {
    InductionState<S> st(run.in.exact().convert<S>());
    for (long k = 0; k < n; ++k) st.advance();
    const TowerDecomposition<S> td = towers(st);
    Json rows = Json::array();
    Rational area = 0;
    const int d = st.current().size();
    for (Letter a = 0; a < d; ++a) {
        const auto& b = td.bases[static_cast<std::size_t>(a)];
        const Rational width = ScalarTraits<S>::to_rational(S(b.right - b.left));
        area += width * Rational(td.heights[static_cast<std::size_t>(a)]);
        Json row;
        row["letter"] = std::string(1, static_cast<char>('A' + a));
        row["base"] = lengths_json(std::vector<S>{b.left, b.right});
        row["height"] = bigint_to_json(td.heights[static_cast<std::size_t>(a)]);
        rows.push_back(std::move(row));
    }
    const Rational total = run.in.exact().total_length();
    const Rational ratio = area / total;
    Json body;
    body["n"] = n;
    body["towers"] = std::move(rows);
    body["area"] = ScalarTraits<S>::exact ? Json(rational_to_string(ratio)) : Json(ratio.get_d());
    body["area_identity"] = ScalarTraits<S>::exact ? area == total : std::fabs(ratio.get_d() - 1) < 1e-9;
    std::string summary = "towers: n=" + std::to_string(n) + " area " +
                          (ScalarTraits<S>::exact ? rational_to_string(ratio) : fmt(ratio.get_d()));
    if (verify) {
        if constexpr (std::is_same_v<S, Rational>) {
            const TowerCheck chk = verify_towers(run.in.exact(), td);
            body["tiling"] = Json{{"ok", chk.ok}, {"problem", chk.problem}};
            summary += chk.ok ? ", floors tile the domain" : ", tiling failed: " + chk.problem;
        } else {
            fail(ErrorCode::FloatModeUnsupported, "--verify needs rational mode");
        }
    }
    run.emit(body, summary);
}

// Dispatches on the arithmetic mode.
template <template <typename> class F, typename... A>
void by_mode(Run& run, A&&... args) {
    switch (run.in.arithmetic()) {
        case ScalarMode::Rational: return F<Rational>::call(run, std::forward<A>(args)...);
        case ScalarMode::Float: return F<double>::call(run, std::forward<A>(args)...);
        default: fail(ErrorCode::BadConfig, "mode is rational or float");
    }
}

template <typename S>
struct Renorm {
    static void call(Run& run, long s, long z, long cap) { cmd_renorm_as<S>(run, s, z, cap); }
};
template <typename S>
struct Towers {
    static void call(Run& run, long n, bool verify) { cmd_towers_as<S>(run, n, verify); }
};

template <typename S>
struct Lyapunov {
    static void call(Run& run, long blocks, long period, std::uint64_t seed, double max_conf) {
        LyapunovOptions o;
        o.seed = seed;
        o.max_confidence = max_conf;
        const LyapunovEstimate e = lyapunov_exponents(run.in.exact().convert<S>(), blocks, period, o);
        Json body = lyapunov_json(e);
        run.emit(body, "lyapunov: theta1=" + fmt(e.theta1) + " theta2=" + fmt(e.theta2) + " +/- " + fmt(e.confidence) +
                           " over " + std::to_string(e.blocks_used) + " blocks");
    }
};

// deviation ---------------------------------------------------------------------

struct DeviationArgs {
    std::string grid = "1e2:1e5";
    int per_decade = 4;
    long samples = 200000;
    std::uint64_t seed = 1;
    long exponent_blocks = 0;
    std::string csv;
};

void cmd_deviation(Run& run, const DeviationArgs& a) {
    const auto parts = split(a.grid, ':');
    if (parts.size() != 2) fail(ErrorCode::BadConfig, "--n-grid is lo:hi");
    const std::vector<long> grid = log_grid(parse_count(parts[0]), parse_count(parts[1]), a.per_decade);
    Json& c = run.config;
    c["n_grid"] = a.grid;
    c["per_decade"] = a.per_decade;
    c["samples"] = a.samples;
    c["seed"] = a.seed;
    std::optional<LyapunovEstimate> ex;
    const FloatIet T = run.in.exact().convert<double>();
    if (a.exponent_blocks > 0) {
        c["exponent_blocks"] = a.exponent_blocks;
        ex = lyapunov_exponents(T, a.exponent_blocks, 8, {.max_confidence = 1.0, .seed = a.seed});
    }
    const DeviationScan scan = deviation_scan(T, run.in.f().convert<double>(), grid, a.samples, a.seed, ex);
    Json body = deviation_json(scan);
    if (ex) body["exponents"] = lyapunov_json(*ex);
    std::string csv = deviation_csv(scan);
    run.write_side(a.csv, "# version " + std::string(kVersion) + " config " + hex64(fnv1a(c.dump())) + "\n" + csv);
    if (a.csv.empty() && run.out_path.empty()) run.out << csv;
    std::string summary = "deviation: slope " + fmt(scan.birkhoff_fit.slope) + " over n in [" + std::to_string(grid.front()) +
                          ", " + std::to_string(grid.back()) + "]";
    if (scan.target) summary += ", target " + fmt(*scan.target);
    run.emit(body, summary);
}

// balanced-times / good-returns ---------------------------------------------------

struct BalancedArgs {
    std::string eta = "64";
    double epsilon = 0.5;
    long budget = 300;
    std::uint64_t seed = 1;
    long samples = 100;
    long domain_samples = 20;
    std::string u_mode = "report";
    long max_times = 0;
    std::string nu = "0";
};

BalancedTimes run_balanced(Run& run, const BalancedArgs& a) {
    Json& c = run.config;
    const Rational eta = parse_rational(a.eta);
    c["eta"] = rational_to_string(eta);
    c["epsilon"] = a.epsilon;
    c["budget"] = a.budget;
    c["seed"] = a.seed;
    c["samples"] = a.samples;
    c["domain_samples"] = a.domain_samples;
    c["u_mode"] = a.u_mode;
    c["max_times"] = a.max_times;
    c["nu"] = rational_to_string(parse_rational(a.nu));
    if (run.in.arithmetic() != ScalarMode::Rational)
        fail(ErrorCode::FloatModeUnsupported, "balanced times need rational mode");
    BalancedTimesOptions o;
    o.nu = parse_rational(a.nu);
    if (a.u_mode == "enforce") o.mode = UMode::Enforce;
    else if (a.u_mode == "report") o.mode = UMode::Report;
    else fail(ErrorCode::BadConfig, "--u-mode is enforce or report");
    o.seed = a.seed;
    o.check_samples = a.samples;
    o.domain_samples = a.domain_samples;
    o.max_times = a.max_times;
    return balanced_times(run.in.exact(), a.epsilon, eta, a.budget, o);
}

std::string balanced_summary(const BalancedTimes& bt) {
    std::string s = std::to_string(bt.sequence.size()) + " balanced times";
    s += std::string(", ratios ") + (bt.all_ratios_below_c_gamma() ? "ok" : "FAIL");
    s += std::string(", condition i ") + (bt.condition_i() ? "ok" : "FAIL");
    s += std::string(", ii ") + (bt.condition_ii() ? "ok" : "FAIL");
    s += std::string(", iii ") + (bt.condition_iii() ? "ok" : "FAIL");
    return s;
}

void cmd_balanced(Run& run, const BalancedArgs& a) {
    const BalancedTimes bt = run_balanced(run, a);
    run.emit(balanced_times_json(bt), "balanced-times: " + balanced_summary(bt));
}

struct GoodArgs {
    std::string E = "0:1", D;
    long N = 1000;
    long horizon = 0;
    long search_budget = 64;
    long recurrence_P = 0;
};

void cmd_good_returns(Run& run, const BalancedArgs& b, const GoodArgs& a) {
    if (a.D.empty()) fail(ErrorCode::BadConfig, "--D is required");
    const IntervalSet E = IntervalSet::parse(a.E);
    const Rational D = parse_rational(a.D);
    const BalancedTimes bt = run_balanced(run, b);
    Json& c = run.config;
    c["E"] = E.to_string();
    c["D"] = rational_to_string(D);
    c["N"] = a.N;
    c["horizon"] = a.horizon;
    c["search_budget"] = a.search_budget;
    Json body;
    std::string summary = "good-returns: ";
    if (a.recurrence_P > 0) {
        c["recurrence_P"] = a.recurrence_P;
        const RecurrenceHit hit = recurrence_search(run.in.exact(), run.in.f(), E, D, a.recurrence_P, bt, a.search_budget,
                                                    {.seed = b.seed});
        body["recurrence"] = recurrence_json(hit);
        body["recurrence"]["verified"] = verify_recurrence(run.in.exact(), run.in.f(), E, D, bt, hit);
        summary += "recurrence p=" + std::to_string(hit.p) + " n=" + hit.n.get_str() + "; ";
    }
    const GoodReturn g =
        good_return_search(run.in.exact(), run.in.f(), E, D, a.N, bt, a.search_budget, {.seed = b.seed, .horizon = a.horizon});
    const GoodReturnCheck chk = verify_good_return(run.in.exact(), run.in.f(), g);
    Json times = Json::array();
    for (const auto& t : bt.sequence)
        times.push_back(Json{{"k", t.k}, {"zorich_step", t.zorich_step}, {"h", t.h.get_str()}});
    body["balanced_times"] = Json{{"sigma", rational_to_string(bt.sigma)},
                                  {"C", rational_to_string(bt.c)},
                                  {"c_gamma", bigint_to_json(bt.domain.c_gamma)},
                                  {"times", std::move(times)},
                                  {"summary", balanced_summary(bt)}};
    body["certificate"] = good_return_json(g);
    body["verification"] = good_return_check_json(chk);
    summary += "n=" + std::to_string(g.n) + " S_n f=" + fmt(g.birkhoff.get_d()) + " at x=" + fmt(g.x.get_d()) +
               (chk.all() ? ", verified" : ", VERIFICATION FAILED");
    run.emit(body, summary);
}

// strip / probe --------------------------------------------------------------------

struct StripArgs {
    std::string x = "1/2", t = "0", N = "10";
    long returns = 1000;
    long cap = 100000000;
    int x_cells = 64, t_cells = 256;
    std::string csv;
};

template <typename S>
struct Strip {
    static void call(Run& run, const StripArgs& a) {
        Json& c = run.config;
        c["x"] = a.x;
        c["t"] = a.t;
        c["N"] = a.N;
        c["returns"] = a.returns;
        c["cap"] = a.cap;
        c["x_cells"] = a.x_cells;
        c["t_cells"] = a.t_cells;
        const BasicIet<S> T = run.in.exact().convert<S>();
        const BasicStepCocycle<S> f = run.in.f().convert<S>();
        const S N = ScalarTraits<S>::from_rational(parse_rational(a.N));
        const StripPoint<S> p0{ScalarTraits<S>::from_rational(parse_rational(a.x)),
                               ScalarTraits<S>::from_rational(parse_rational(a.t))};
        std::ostringstream csv;
        csv << "# version " << kVersion << " config " << hex64(fnv1a(c.dump())) << "\n";
        csv << "k,x,t\n";
        StripPoint<S> p = p0;
        double max_abs_t = 0;
        for (long k = 1; k <= a.returns; ++k) {
            p = strip_first_return(T, f, p, N, a.cap).point;
            max_abs_t = std::max(max_abs_t, std::fabs(ScalarTraits<S>::to_double(p.t)));
            if (!a.csv.empty()) csv << k << "," << ScalarTraits<S>::format(p.x) << "," << ScalarTraits<S>::format(p.t) << "\n";
        }
        run.write_side(a.csv, csv.str());
        const EmpiricalBirkhoffMeasure m = empirical_birkhoff_measure(T, f, p0, N, a.returns, a.x_cells, a.t_cells, a.cap);
        Json body = birkhoff_measure_json(m);
        body["max_abs_t"] = max_abs_t;
        run.emit(body, "strip: " + std::to_string(a.returns) + " returns in " + std::to_string(m.base_steps) +
                           " base steps, max |t| " + fmt(max_abs_t) + ", " + std::to_string(m.occupied_cells()) + " cells");
    }
};

struct ProbeArgs {
    long n = 100000;
    int windows = kDefaultWindows, bins = kDefaultBins;
    double L = 0;
    std::string starts = "0.5", sigmas;
    bool strict = false;
    std::string hist_csv, hist_out;
};

void cmd_probe(Run& run, const ProbeArgs& a) {
    Json& c = run.config;
    c["n"] = a.n;
    c["windows"] = a.windows;
    c["bins"] = a.bins;
    c["starts"] = a.starts;
    c["strict"] = a.strict;
    const FloatIet T = run.in.exact().convert<double>();
    const FloatStepCocycle f = run.in.f().convert<double>();
    const double L = a.L > 0 ? a.L : default_cutoff(f);
    c["L"] = L;
    std::vector<double> sigmas = a.sigmas.empty() ? f.jumps() : parse_doubles(a.sigmas);
    c["sigmas"] = sigmas;
    if (a.windows <= 0) fail(ErrorCode::BadConfig, "--windows must be positive");
    const auto starts = parse_doubles(a.starts);
    if (starts.empty()) fail(ErrorCode::BadConfig, "--starts is empty");
    const auto hists = fiber_histograms(T, f, starts, a.n, 1.0 / a.windows, L, a.bins);
    ProbeReport report = probe_histograms(hists, sigmas, a.strict);
    report.n = a.n;
    report.starts = starts.size();
    const std::string tag = "# version " + std::string(kVersion) + " config " + hex64(fnv1a(c.dump())) + "\n";
    run.write_side(a.hist_csv, tag + histograms_csv(hists));
    if (!a.hist_out.empty()) write_text_file(a.hist_out, dump(stamp(c, Json{{"histograms", histograms_json(hists)}})));
    std::uint64_t clipped = 0, total = 0;
    for (const auto& h : hists) {
        clipped += h.clipped;
        total += h.total;
    }
    Json body = probe_json(report);
    body["L"] = L;
    body["clipped"] = clipped;
    body["visits"] = total;
    run.emit(body, "probe: aggregate " + fmt(report.aggregate) + " over " + std::to_string(sigmas.size()) + " shifts, n=" +
                       std::to_string(a.n) + (report.rebinned ? " (rebinned)" : ""));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interval exchanges, Rauzy-Veech renormalization and skew products over them"};
    app.name("iet-skew");
    app.require_subcommand(1);

    Run run{out, {}, {}, {}};
    std::function<void()> action;
    auto sub = [&](const char* name, const char* help, bool cocycle) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_inputs(cmd, run, cocycle);
        run.config["command"] = name;
        return cmd;
    };

    IetArgs ia;
    {
        CLI::App* cmd = sub("iet", "build, sample or inspect an IET descriptor", false);
        cmd->add_option("--golden", ia.golden, "continued fraction surrogate of the golden rotation with this many digits");
        cmd->add_option("--rotation", ia.rotation, "two-interval rotation by alpha");
        cmd->add_option("--reversal", ia.reversal, "reversal permutation on d letters");
        cmd->add_option("--pi0", ia.pi0, "top ranks, comma separated");
        cmd->add_option("--pi1", ia.pi1, "bottom ranks, comma separated");
        cmd->add_option("--lengths", ia.lengths, "lengths, comma separated (default: sampled)");
        cmd->add_option("--sample-seed", ia.sample_seed, "seed for sampled lengths");
        cmd->add_option("--bits", ia.bits, "denominator bits of sampled lengths");
        cmd->add_flag("--normalize", ia.normalize, "scale lengths to sum 1");
        cmd->add_option("--keane", ia.keane, "scan for connections up to this many steps");
        cmd->add_option("--cocycle-seed", ia.cocycle_seed, "also sample a step cocycle with this seed");
        cmd->add_option("--m", ia.m, "jumps of the sampled cocycle");
        cmd->add_option("--M", ia.bound, "value bound of the sampled cocycle");
        cmd->add_option("--cocycle-out", ia.cocycle_out, "where to write the sampled cocycle");
        cmd->callback([&] { action = [&] { cmd_iet(run, ia); }; });
    }

    long steps = 0, zorich = 0, kappa_cap = kDefaultKappaCap;
    {
        CLI::App* cmd = sub("renorm", "run Rauzy-Veech or Zorich induction", false);
        cmd->add_option("--steps", steps, "Rauzy steps");
        cmd->add_option("--zorich", zorich, "Zorich blocks (overrides --steps)");
        cmd->add_option("--kappa-cap", kappa_cap, "largest Zorich block accepted");
        cmd->callback([&] {
            action = [&] {
                run.load(false);
                run.config["steps"] = steps;
                run.config["zorich"] = zorich;
                run.config["kappa_cap"] = kappa_cap;
                by_mode<Renorm>(run, steps, zorich, kappa_cap);
            };
        });
    }

    long tower_n = 0;
    bool verify = false;
    {
        CLI::App* cmd = sub("towers", "Rokhlin towers after n Rauzy steps", false);
        cmd->add_option("--n", tower_n, "Rauzy steps")->required();
        cmd->add_flag("--verify", verify, "enumerate the floors and check they tile the domain");
        cmd->callback([&] {
            action = [&] {
                run.load(false);
                run.config["n"] = tower_n;
                run.config["verify"] = verify;
                by_mode<Towers>(run, tower_n, verify);
            };
        });
    }

    long blocks = 10000, period = 8;
    std::uint64_t lseed = 1;
    double max_conf = 0.1;
    {
        CLI::App* cmd = sub("lyapunov", "top two Lyapunov exponents of the Zorich cocycle", false);
        cmd->add_option("--blocks", blocks, "Zorich blocks");
        cmd->add_option("--period", period, "reorthogonalization period");
        cmd->add_option("--seed", lseed, "seed of the test vectors");
        cmd->add_option("--max-confidence", max_conf, "NonConvergence above this half-width");
        cmd->callback([&] {
            action = [&] {
                run.load(false);
                run.config["blocks"] = blocks;
                run.config["period"] = period;
                run.config["seed"] = lseed;
                run.config["max_confidence"] = max_conf;
                by_mode<Lyapunov>(run, blocks, period, lseed, max_conf);
            };
        });
    }

    DeviationArgs da;
    {
        CLI::App* cmd = sub("deviation", "growth of Birkhoff sums and visit deviations", true);
        cmd->add_option("--n-grid", da.grid, "lo:hi");
        cmd->add_option("--per-decade", da.per_decade, "grid points per decade");
        cmd->add_option("--samples", da.samples, "start points along the orbit");
        cmd->add_option("--seed", da.seed, "seed of the first start point");
        cmd->add_option("--exponent-blocks", da.exponent_blocks, "also estimate exponents to report theta2/theta1");
        cmd->add_option("--csv", da.csv, "output CSV");
        cmd->callback([&] {
            action = [&] {
                run.load(true);
                cmd_deviation(run, da);
            };
        });
    }

    BalancedArgs ba;
    auto balanced_options = [&](CLI::App* cmd) {
        cmd->add_option("--eta", ba.eta, "eta");
        cmd->add_option("--epsilon", ba.epsilon, "epsilon");
        cmd->add_option("--budget", ba.budget, "Zorich blocks to run");
        cmd->add_option("--seed", ba.seed, "seed");
        cmd->add_option("--samples", ba.samples, "random points per check");
        cmd->add_option("--domain-samples", ba.domain_samples, "random points for the balanced-region checks");
        cmd->add_option("--u-mode", ba.u_mode, "enforce or report membership of the balanced region");
        cmd->add_option("--max-times", ba.max_times, "stop after this many times");
        cmd->add_option("--nu", ba.nu, "nu of the balanced region (0: automatic)");
    };
    {
        CLI::App* cmd = sub("balanced-times", "select balanced renormalization times", false);
        balanced_options(cmd);
        cmd->callback([&] {
            action = [&] {
                run.load(false);
                cmd_balanced(run, ba);
            };
        });
    }

    GoodArgs ga;
    {
        CLI::App* cmd = sub("good-returns", "search and certify a good return", true);
        balanced_options(cmd);
        cmd->add_option("--E", ga.E, "target set a:b,c:d");
        cmd->add_option("--D", ga.D, "Birkhoff sum bound");
        cmd->add_option("--N", ga.N, "least return time");
        cmd->add_option("--horizon", ga.horizon, "orbit length per start point (0: automatic)");
        cmd->add_option("--search-budget", ga.search_budget, "start points to try");
        cmd->add_option("--recurrence", ga.recurrence_P, "also run the recurrence search from this index");
        cmd->callback([&] {
            action = [&] {
                run.load(true);
                cmd_good_returns(run, ba, ga);
            };
        });
    }

    StripArgs sa;
    {
        CLI::App* cmd = sub("strip", "induced returns of the skew product to a strip", true);
        cmd->add_option("--x", sa.x, "start x");
        cmd->add_option("--t", sa.t, "start t");
        cmd->add_option("--N", sa.N, "strip half-height");
        cmd->add_option("--returns", sa.returns, "returns to record");
        cmd->add_option("--cap", sa.cap, "base steps allowed per return");
        cmd->add_option("--x-cells", sa.x_cells, "x cells of the empirical measure");
        cmd->add_option("--t-cells", sa.t_cells, "t cells of the empirical measure");
        cmd->add_option("--csv", sa.csv, "orbit dump k,x,t");
        cmd->callback([&] {
            action = [&] {
                run.load(true);
                by_mode<Strip>(run, sa);
            };
        });
    }

    ProbeArgs pa;
    {
        CLI::App* cmd = sub("probe", "fiber histograms and the translation-invariance probe", true);
        cmd->add_option("--n", pa.n, "orbit length per start");
        cmd->add_option("--windows", pa.windows, "x windows");
        cmd->add_option("--bins", pa.bins, "t bins per window");
        cmd->add_option("--L", pa.L, "t cutoff (0: 8 m M)");
        cmd->add_option("--starts", pa.starts, "start points, comma separated");
        cmd->add_option("--sigma", pa.sigmas, "shifts, comma separated (default: the jumps of f)");
        cmd->add_flag("--strict", pa.strict, "reject shifts that are not whole bins");
        cmd->add_option("--hist-csv", pa.hist_csv, "histogram dump (CSV)");
        cmd->add_option("--hist-out", pa.hist_out, "histogram dump (JSON)");
        cmd->callback([&] {
            action = [&] {
                run.load(true);
                cmd_probe(run, pa);
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: BadConfig: " << e.what() << "\n";
        return 2;
    }
    for (auto* cmd : app.get_subcommands()) run.config["command"] = cmd->get_name();
    try {
        action();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace ietskew
