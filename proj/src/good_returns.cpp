#include "ietskew/good_returns.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "ietskew/error.hpp"
#include "ietskew/parallel.hpp"
#include "ietskew/spectrum.hpp"
#include "ietskew/tower.hpp"

namespace ietskew {

// ---- IntervalSet ----

IntervalSet::IntervalSet(std::vector<Interval<Rational>> pieces) : pieces_(std::move(pieces)) {
    std::sort(pieces_.begin(), pieces_.end(), [](const auto& a, const auto& b) { return a.left < b.left; });
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto& p = pieces_[i];
        if (p.left < 0 || p.right > 1 || !(p.left < p.right))
            fail(ErrorCode::BadConfig, "interval " + rational_to_string(p.left) + ":" + rational_to_string(p.right) +
                                           " is empty or leaves [0, 1)");
        if (i > 0 && pieces_[i - 1].right > p.left) fail(ErrorCode::BadConfig, "intervals overlap");
    }
}

IntervalSet IntervalSet::parse(std::string_view text) {
    std::vector<Interval<Rational>> out;
    while (!text.empty()) {
        const std::size_t comma = text.find(',');
        const std::string_view item = text.substr(0, comma);
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) fail(ErrorCode::ParseError, "expected a:b in '" + std::string(item) + "'");
        out.push_back({parse_rational(item.substr(0, colon)), parse_rational(item.substr(colon + 1))});
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) fail(ErrorCode::ParseError, "empty interval set");
    return IntervalSet(std::move(out));
}

Rational IntervalSet::measure() const {
    Rational m = 0;
    for (const auto& p : pieces_) m += p.length();
    return m;
}

bool IntervalSet::contains(const Rational& x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x, [](const Rational& v, const auto& p) { return v < p.left; });
    return it != pieces_.begin() && std::prev(it)->contains(x);
}

Rational IntervalSet::sample(Rng& rng, unsigned bits) const {
    if (pieces_.empty()) fail(ErrorCode::BadConfig, "sampling an empty interval set");
    Rational u = rng.dyadic(bits) * measure();
    for (const auto& p : pieces_) {
        const Rational len = p.length();
        if (u < len) return Rational(p.left + u);
        u -= len;
    }
    return pieces_.back().left;
}

std::string IntervalSet::to_string() const {
    std::string out;
    for (const auto& p : pieces_) {
        if (!out.empty()) out += ',';
        out += rational_to_string(p.left) + ":" + rational_to_string(p.right);
    }
    return out;
}

// ---- density and continuity ----

template <Scalar S>
S orbit_density_gap(const BasicIet<S>& iet, const S& x, long n) {
    if (n <= 0) return iet.total_length();
    std::vector<S> pts;
    pts.reserve(static_cast<std::size_t>(n));
    S y = x;
    for (long i = 0; i < n; ++i) {
        pts.push_back(y);
        if (i + 1 < n) y = iet.apply(y);
    }
    std::sort(pts.begin(), pts.end());
    S gap = pts.front();
    for (std::size_t i = 1; i < pts.size(); ++i) gap = std::max(gap, S(pts[i] - pts[i - 1]));
    return std::max(gap, S(iet.total_length() - pts.back()));
}

std::string_view to_string(Side side) noexcept { return side == Side::Left ? "left" : "right"; }

namespace {

// Running one-sided distances from orbit points to the cuts of T.
template <Scalar S>
struct CutDistances {
    std::vector<S> cuts;  // 0, interior discontinuities, total
    S left, right;

    CutDistances(const BasicIet<S>& iet, const S& x) : left(x), right(S(iet.total_length() - x)) {
        cuts.push_back(S(0));
        for (const S& c : iet.discontinuities()) cuts.push_back(c);
        cuts.push_back(iet.total_length());
    }
    void visit(const S& u) {
        auto it = std::upper_bound(cuts.begin(), cuts.end(), u);  // first cut > u
        if (it != cuts.end()) right = std::min(right, S(*it - u));
        left = std::min(left, S(u - *std::prev(it)));
    }
};

template <Scalar S>
ContinuityInterval<S> pick_side(const S& left, const S& right) {
    ContinuityInterval<S> out;
    out.left = left;
    out.right = right;
    out.side = left > right ? Side::Left : Side::Right;
    out.radius = left > right ? left : right;
    return out;
}

}  // namespace

template <Scalar S>
ContinuityInterval<S> continuity_interval(const BasicIet<S>& iet, const S& x, long n) {
    if (!(x >= 0 && x < iet.total_length())) fail(ErrorCode::OutOfDomain, "point outside the domain");
    CutDistances<S> d(iet, x);
    S u = x;
    for (long i = 0; i < n; ++i) {
        d.visit(u);
        if (i + 1 < n) u = iet.apply(u);
    }
    return pick_side(d.left, d.right);
}

// ---- balanced times ----

bool BalancedTimes::heights_increasing() const {
    for (std::size_t k = 1; k < sequence.size(); ++k)
        if (!(sequence[k].h > sequence[k - 1].h)) return false;
    return !sequence.empty();
}

bool BalancedTimes::all_ratios_below_c_gamma() const {
    return !sequence.empty() &&
           std::all_of(sequence.begin(), sequence.end(), [](const BalancedTime& t) { return t.ratio_below_c_gamma; });
}

bool BalancedTimes::condition_i() const {
    return !sequence.empty() &&
           std::all_of(sequence.begin(), sequence.end(), [](const BalancedTime& t) { return t.condition_i_failures == 0; });
}

bool BalancedTimes::condition_ii() const {
    return !sequence.empty() &&
           std::all_of(sequence.begin(), sequence.end(), [](const BalancedTime& t) { return t.condition_ii_failures == 0; });
}

namespace {

double log_norm(const IntMatrix& m) { return log_of(m.norm()); }

// Left side of the constants condition with rho standing in for C_d nu.
double constants_lhs(double delta, double theta1, double rho) {
    const double tail = 1.0 - rho * (1.0 + 2.0 * delta) / (theta1 - delta);
    if (tail <= 0 || theta1 - 2 * delta <= 0) return std::numeric_limits<double>::infinity();
    return (1.0 + delta) * (theta1 + delta) / (theta1 - 2.0 * delta) / tail;
}

// Average over blocks of log norm where the norm exceeds exp(threshold_log).
double tail_average(const std::vector<double>& logs, double threshold_log) {
    if (logs.empty()) return 0;
    double s = 0;
    for (double v : logs)
        if (v > threshold_log) s += v;
    return s / static_cast<double>(logs.size());
}

ConditionICheck condition_i_at(const TowerLadder& ladder, long level, const TowerLadder::Location& loc, const BigInt& h,
                               const Rational& r) {
    const Iet& t = ladder.level(level);
    const Interval<Rational> own = t.interval(loc.letter);
    const BigInt& q = ladder.heights(level)[static_cast<std::size_t>(loc.letter)];
    const bool leaves = BigInt(q - loc.floor) < h;
    const Rational image = t.apply(loc.base);
    const Interval<Rational> next = t.interval(t.letter_at(image));
    ConditionICheck c;
    c.right = loc.base + r < own.right && (!leaves || image + r < next.right);
    c.left = loc.base - r >= own.left && (!leaves || image - r >= next.left);
    return c;
}

}  // namespace

ConditionICheck check_condition_i(TowerLadder& ladder, long level, const Rational& x, const BigInt& h, const Rational& r) {
    return condition_i_at(ladder, level, ladder.locate(x, level), h, r);
}

BalancedTimes balanced_times(const Iet& input, double epsilon, const Rational& eta, long budget, BalancedTimesOptions options) {
    if (!(epsilon > 0 && epsilon < 1)) fail(ErrorCode::BadConfig, "epsilon must lie in (0, 1)");
    if (eta <= 1) fail(ErrorCode::BadConfig, "eta must exceed 1");
    if (budget <= 0) fail(ErrorCode::BadConfig, "budget must be positive");
    const Iet iet = input.normalized();
    const int d = iet.size();
    const double cap = std::min(epsilon, 1.0 / (10.0 * d));

    BalancedTimes out;
    out.epsilon = epsilon;
    out.eta = eta;
    Rational nu = options.nu;
    if (nu <= 0) nu = Rational(cap) * Rational(9, 10);
    out.domain = build_balanced_domain(iet, nu, options.loop_budget, options.mode, options.domain_samples, options.seed);
    const BalancedDomain& dom = out.domain;
    const double log_eta = log_of(eta);

    // Zorich orbit, heights after every block.
    InductionState<Rational> state(iet);
    std::vector<std::vector<BigInt>> heights{state.heights()};
    try {
        for (long b = 0; b < budget; ++b) {
            state.advance_zorich();
            heights.push_back(state.heights());
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateLengths) throw;
    }
    const auto& blocks = state.zorich_blocks();
    const long n_blocks = static_cast<long>(blocks.size());
    out.zorich_blocks = n_blocks;
    if (n_blocks == 0) fail(ErrorCode::NoReturnsWithinBudget, "no Zorich block completed");

    // Returns: the Rauzy path from the block start follows gamma gamma gamma and the first arrow again.
    const RauzyPath pattern = dom.gamma.concat(dom.gamma).concat(dom.gamma).concat(dom.gamma.prefix(1));
    const std::string pattern_types = pattern.types();
    const auto& arrows = state.path().arrows();
    const long steps = state.step_count();
    const long refractory = 3 * dom.blocks;
    for (long j = 0; j < n_blocks; ++j) {
        const long s = blocks[static_cast<std::size_t>(j)].start_step;
        if (s + static_cast<long>(pattern_types.size()) > steps) break;
        if (!(arrows[static_cast<std::size_t>(s)].from == pattern.start())) continue;
        bool match = true;
        for (std::size_t t = 0; t < pattern_types.size() && match; ++t)
            match = arrows[static_cast<std::size_t>(s) + t].type == pattern[t].type;
        if (!match) continue;
        if (!out.returns.empty() && j - out.returns.back() < refractory) continue;
        out.returns.push_back(j);
    }
    if (out.returns.size() < 2)
        fail(ErrorCode::NoReturnsWithinBudget,
             std::to_string(out.returns.size()) + " returns in " + std::to_string(n_blocks) + " Zorich blocks");

    // Exponents, per Zorich block.
    if (d == 2) {
        BigInt top = 0;
        for (const BigInt& q : heights.back()) top = std::max(top, q);
        out.theta1 = log_of(top) / static_cast<double>(n_blocks);
        out.theta2 = 0;
    } else {
        const LyapunovEstimate est = lyapunov_exponents(iet, options.lyapunov_blocks);
        out.theta1 = est.theta1;
        out.theta2 = est.theta2;
    }
    if (!(out.theta1 > 0) || (1.0 + epsilon) * out.theta2 / out.theta1 >= 1.0)
        fail(ErrorCode::SpectralGapViolated, "(1 + epsilon) theta2 / theta1 >= 1");

    out.rho_hat = static_cast<double>(out.returns.size()) / static_cast<double>(n_blocks);
    if (constants_lhs(0, out.theta1, out.rho_hat) > 1.0 + epsilon) {
        out.constants_feasible = false;
        out.delta = cap * 1e-6;
    } else {
        double lo = 0, hi = cap;
        if (constants_lhs(hi * (1 - 1e-12), out.theta1, out.rho_hat) <= 1.0 + epsilon) lo = hi * (1 - 1e-12);
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (constants_lhs(mid, out.theta1, out.rho_hat) <= 1.0 + epsilon ? lo : hi) = mid;
        }
        out.delta = lo > 0 ? lo : cap * 1e-6;
    }

    // Return blocks Q(m_i, m_{i+1}).
    std::vector<IntMatrix> q_blocks;
    std::vector<double> q_logs;
    for (std::size_t i = 0; i + 1 < out.returns.size(); ++i) {
        q_blocks.push_back(state.cocycle(static_cast<std::size_t>(out.returns[i]), static_cast<std::size_t>(out.returns[i + 1])));
        q_logs.push_back(log_norm(q_blocks.back()));
    }

    // eta0: smallest eta >= e^{1/delta} whose tail average is at most delta.
    {
        std::vector<double> cuts{0.0};
        for (double v : q_logs) cuts.push_back(v);
        std::sort(cuts.begin(), cuts.end());
        double t = cuts.back();
        for (double c : cuts)
            if (tail_average(q_logs, c) <= out.delta) {
                t = c;
                break;
            }
        out.eta0 = std::exp(std::max(1.0 / out.delta, t / out.delta));
    }
    out.eta_below_eta0 = log_eta < std::log(out.eta0);
    {
        std::vector<double> cands{out.delta};
        for (double v : q_logs)
            if (v / log_eta > out.delta) cands.push_back(v / log_eta);
        std::sort(cands.begin(), cands.end());
        out.delta_eff = cands.back();
        for (double c : cands)
            if (tail_average(q_logs, c * log_eta) <= c) {
                out.delta_eff = c;
                break;
            }
    }

    const BigInt norm_a = dom.a_gamma.norm();
    out.c_delta = BigInt(d) * dom.c_gamma * dom.c_gamma * norm_a * norm_a * norm_a;
    out.c = Rational(dom.c_gamma * dom.c_gamma * out.c_delta * norm_a * norm_a) / Rational(d);
    out.sigma = Rational(1) / Rational(BigInt(10 * d) * dom.c_gamma);
    const double log_threshold = log_eta + log_of(out.c_delta);
    const double log_block_cap = out.delta_eff * log_eta;

    // Selection: first l with a window j..l of capped blocks whose product reaches eta C_Delta.
    std::vector<std::pair<long, long>> picks;  // (l, j)
    long lk = 0;
    const long n_returns = static_cast<long>(out.returns.size());
    for (long l = lk + 2; l < n_returns; ++l) {
        IntMatrix prod = IntMatrix::identity(d);
        for (long j = l - 1; j > lk; --j) {
            if (q_logs[static_cast<std::size_t>(j)] > log_block_cap + 1e-12) break;
            prod = prod * q_blocks[static_cast<std::size_t>(j)];
            if (log_norm(prod) >= log_threshold) {
                picks.emplace_back(l, j);
                break;
            }
        }
        if (!picks.empty() && picks.back().first == l) {
            lk = l;
            ++l;  // next l must leave room for j > l_k
            if (options.max_times > 0 && static_cast<long>(picks.size()) >= options.max_times) break;
        }
    }

    TowerLadder ladder(iet);
    const double log_c = log_of(out.c);
    const double log_density_bound = log_c + (1.0 + epsilon) * log_eta;
    out.check_samples = options.check_samples;
    for (const auto& [l, j] : picks) {
        const long n_k = out.returns[static_cast<std::size_t>(l)] + 2 * dom.blocks;
        if (n_k > n_blocks) break;
        BalancedTime bt;
        bt.k = static_cast<long>(out.sequence.size()) + 1;
        bt.return_index = l;
        bt.window_start = j;
        bt.zorich_step = n_k;
        bt.rauzy_step = n_k < n_blocks ? blocks[static_cast<std::size_t>(n_k)].start_step : steps;
        bt.heights = heights[static_cast<std::size_t>(n_k)];
        bt.h = *std::min_element(bt.heights.begin(), bt.heights.end());
        const BigInt hmax = *std::max_element(bt.heights.begin(), bt.heights.end());
        bt.ratio_below_c_gamma = Rational(hmax) / Rational(bt.h) < Rational(dom.c_gamma);

        const long level = bt.rauzy_step;
        ladder.extend_to(level);
        const Rational r = out.sigma / Rational(bt.h);
        const BigInt prefix = BigInt(Rational(bt.h) / eta);  // floor
        const double log_bound = log_density_bound - log_of(bt.h);
        std::vector<ConditionICheck> ci(static_cast<std::size_t>(options.check_samples));
        std::vector<double> gap_scaled(ci.size(), std::numeric_limits<double>::infinity());
        std::vector<char> ii_ok(ci.size(), 0);
        Rng rng(options.seed + 7919 * static_cast<std::uint64_t>(bt.k));
        std::vector<Rational> xs;
        for (std::size_t s = 0; s < ci.size(); ++s) xs.push_back(rng.dyadic(64));
        parallel_for(ci.size(), [&](std::size_t s) {
            const auto locs = const_cast<TowerLadder&>(ladder).locate_all(xs[s], level);
            ci[s] = condition_i_at(ladder, level, locs.back(), bt.h, r);
            // Largest level whose every floor the prefix orbit visits.
            for (long m = level; m >= 0; --m) {
                const auto& hm = ladder.heights(m);
                if (*std::max_element(hm.begin(), hm.end()) > prefix) continue;
                const auto t = ladder.full_traversal_time(m, locs[static_cast<std::size_t>(m)], options.traversal_cap, prefix);
                if (!t || *t > prefix) continue;
                Rational widest = 0;
                for (const Rational& v : ladder.level(m).lengths()) widest = std::max(widest, v);
                const double log_gap = log_of(Rational(2 * widest));
                gap_scaled[s] = std::exp(log_gap + log_of(bt.h));
                ii_ok[s] = log_gap <= log_bound;
                break;
            }
        });
        for (std::size_t s = 0; s < ci.size(); ++s) {
            if (!ci[s].ok()) ++bt.condition_i_failures;
            if (!ii_ok[s]) ++bt.condition_ii_failures;
            bt.worst_density_scaled = std::max(bt.worst_density_scaled, gap_scaled[s]);
        }
        out.sequence.push_back(std::move(bt));
    }
    if (out.sequence.empty())
        fail(ErrorCode::NoReturnsWithinBudget, "no balanced time selected within " + std::to_string(n_blocks) + " Zorich blocks");

    out.eta_ratio_ok = true;
    for (std::size_t k = 1; k < out.sequence.size(); ++k)
        if (Rational(out.sequence[k].h) < eta * Rational(out.sequence[k - 1].h)) out.eta_ratio_ok = false;
    out.growth_proxy = log_of(out.sequence.back().h) / static_cast<double>(out.sequence.size());
    out.growth_bound = log_density_bound;
    return out;
}

// ---- recurrence ----

std::string SearchStats::summary() const {
    std::ostringstream s;
    s << points << " points, " << times_tested << " times tested, " << in_set << " returns to E";
    if (in_set > 0) s << ", smallest |S_n f| " << best_abs_sum.get_d();
    return s.str();
}

namespace {

void check_d(const StepCocycle& f, const Rational& D) {
    if (D <= Rational(f.m()) * f.bound())
        fail(ErrorCode::PreconditionD, "D = " + rational_to_string(D) + " must exceed m M = " +
                                           rational_to_string(Rational(f.m()) * f.bound()));
}

long level_fitting(const TowerLadder& ladder, long top, const BigInt& limit) {
    long m = top;
    while (m > 0) {
        const auto& h = ladder.heights(m);
        if (*std::max_element(h.begin(), h.end()) <= limit) break;
        --m;
    }
    return m;
}

// T^n y and S_n f(y), walking induced steps at the given level.
std::pair<Rational, Rational> orbit_jump(TowerLadder& ladder, long level, const Rational& y, BigInt n) {
    const TowerLadder::Location loc = ladder.locate(y, level);
    Letter a = loc.letter;
    Rational b = loc.base;
    const auto& q = ladder.heights(level);
    const Iet& t = ladder.level(level);
    Rational sum = -ladder.prefix_sum(level, a, b, loc.floor);
    n += loc.floor;
    while (n >= q[static_cast<std::size_t>(a)]) {
        sum += ladder.tower_sum(level, a, b);
        n -= q[static_cast<std::size_t>(a)];
        b = t.apply(b);
        a = t.letter_at(b);
    }
    sum += ladder.prefix_sum(level, a, b, n);
    return {ladder.position(level, a, b, n), sum};
}

}  // namespace

RecurrenceHit recurrence_search(const Iet& iet, const StepCocycle& f, const IntervalSet& E, const Rational& D, long P,
                                const BalancedTimes& bt, long budget, RecurrenceOptions options) {
    check_d(f, D);
    if (!(E.measure() > 0)) fail(ErrorCode::BadConfig, "E has zero measure");
    const Iet base = iet.normalized();
    TowerLadder ladder(base, f);
    Rng rng(options.seed);
    SearchStats stats;
    bool have_best = false;
    const long first = std::max<long>(P, 1);
    for (long p = first; p <= static_cast<long>(bt.sequence.size()) && stats.points < budget; ++p) {
        const BalancedTime& time = bt.sequence[static_cast<std::size_t>(p - 1)];
        const Rational lower = Rational(time.h) / bt.eta;
        BigInt ceil_lower = BigInt(lower);
        if (Rational(ceil_lower) < lower) ++ceil_lower;
        ladder.extend_to(time.rauzy_step);
        const long m = level_fitting(ladder, time.rauzy_step, ceil_lower);
        const Iet& t = ladder.level(m);
        const auto& q = ladder.heights(m);

        const long batch = std::min(options.points_per_time, budget - stats.points);
        std::vector<Rational> ys;
        for (long s = 0; s < batch; ++s) ys.push_back(E.sample(rng, options.bits));
        std::vector<TowerLadder::Location> locs;
        for (const Rational& y : ys) locs.push_back(ladder.locate(y, m));

        struct Found {
            BigInt n;
            Rational sum, image;
        };
        std::vector<std::optional<Found>> hits(ys.size());
        std::vector<long> tested(ys.size(), 0), in_set(ys.size(), 0);
        std::vector<Rational> best(ys.size(), Rational(-1));
        std::atomic<std::size_t> first_hit{ys.size()};
        parallel_for(ys.size(), [&](std::size_t s) {
            if (s > first_hit.load()) return;
            const auto& loc = locs[s];
            const Letter a = loc.letter;
            const Rational start_prefix = ladder.prefix_sum(m, a, loc.base, loc.floor);
            Letter c = a;
            Rational b = loc.base;
            BigInt time_sum = 0;
            Rational birk = 0;
            for (long step = 0; step < options.max_induced_steps; ++step) {
                time_sum += q[static_cast<std::size_t>(c)];
                if (time_sum > time.h) break;
                birk += ladder.tower_sum(m, c, b);
                b = t.apply(b);
                c = t.letter_at(b);
                if (c != a || Rational(time_sum) < lower) continue;
                ++tested[s];
                const Rational image = ys[s] + (b - loc.base);
                if (!E.contains(image)) continue;
                ++in_set[s];
                const Rational sum = birk - start_prefix + ladder.prefix_sum(m, a, b, loc.floor);
                const Rational mag = abs(sum);
                if (best[s] < 0 || mag < best[s]) best[s] = mag;
                if (mag < D) {
                    hits[s] = Found{time_sum, sum, image};
                    std::size_t cur = first_hit.load();
                    while (s < cur && !first_hit.compare_exchange_weak(cur, s)) {}
                    return;
                }
            }
        });
        const std::size_t limit = std::min(first_hit.load() + 1, ys.size());
        for (std::size_t s = 0; s < limit; ++s) {
            ++stats.points;
            stats.times_tested += tested[s];
            stats.in_set += in_set[s];
            if (best[s] >= 0 && (!have_best || best[s] < stats.best_abs_sum)) {
                stats.best_abs_sum = best[s];
                have_best = true;
            }
        }
        if (first_hit.load() < ys.size()) {
            const std::size_t s = first_hit.load();
            RecurrenceHit hit;
            hit.y = ys[s];
            hit.p = p;
            hit.n = hits[s]->n;
            hit.birkhoff = hits[s]->sum;
            hit.image = hits[s]->image;
            hit.level = m;
            hit.stats = stats;
            return hit;
        }
    }
    fail(ErrorCode::NotFoundWithinBudget, "recurrence search: " + stats.summary());
}

bool verify_recurrence(const Iet& iet, const StepCocycle& f, const IntervalSet& E, const Rational& D,
                       const BalancedTimes& bt, const RecurrenceHit& hit) {
    if (hit.p < 1 || hit.p > static_cast<long>(bt.sequence.size())) return false;
    const BigInt& h = bt.sequence[static_cast<std::size_t>(hit.p - 1)].h;
    if (Rational(hit.n) * bt.eta < Rational(h) || hit.n > h) return false;
    if (!E.contains(hit.y)) return false;
    TowerLadder ladder(iet.normalized(), f);
    ladder.extend_to(hit.level);
    // A coarser level than the search used: roughly 4096 induced steps.
    const long m = level_fitting(ladder, hit.level, std::max(BigInt(1), BigInt(hit.n / 4096)));
    const auto [image, sum] = orbit_jump(ladder, m, hit.y, hit.n);
    return image == hit.image && sum == hit.birkhoff && E.contains(image) && abs(sum) < D;
}

// ---- good returns ----

GoodReturn good_return_search(const Iet& iet, const StepCocycle& f, const IntervalSet& E, const Rational& D, long N,
                              const BalancedTimes& bt, long budget, GoodReturnOptions options) {
    check_d(f, D);
    if (!(E.measure() > 0)) fail(ErrorCode::BadConfig, "E has zero measure");
    if (N < 0) fail(ErrorCode::BadConfig, "N must be non-negative");
    const Iet t = iet.normalized();
    const Rational c_prime = bt.c + 1;
    const Rational sigma_prime = bt.sigma / 4;
    const long horizon = options.horizon > 0 ? options.horizon : std::max(4 * N, N + 10000);
    Rng rng(options.seed);

    struct Outcome {
        std::optional<GoodReturn> found;
        long tested = 0, in_set = 0;
        Rational best = -1;
    };

    auto scan = [&](const Rational& x) {
        Outcome o;
        CutDistances<Rational> cuts(t, x);
        std::vector<Rational> orbit{x};
        Rational u = x, sum = 0;
        for (long n = 1; n <= horizon; ++n) {
            cuts.visit(u);
            sum += f.eval(u);
            u = t.apply(u);
            orbit.push_back(u);
            if (n <= N) continue;
            ++o.tested;
            if (!E.contains(u)) continue;
            ++o.in_set;
            const Rational mag = abs(sum);
            if (o.best < 0 || mag < o.best) o.best = mag;
            if (!(mag < D)) continue;
            const Rational r = sigma_prime / n;
            if (!(r <= cuts.left || r < cuts.right)) continue;
            const Rational bound = c_prime / n;
            std::vector<Rational> pts(orbit.begin(), orbit.end() - 1);
            std::sort(pts.begin(), pts.end());
            Rational gap = pts.front();
            for (std::size_t i = 1; i < pts.size(); ++i) gap = std::max(gap, Rational(pts[i] - pts[i - 1]));
            gap = std::max(gap, Rational(1 - pts.back()));
            if (gap > bound) continue;
            GoodReturn g;
            g.x = x;
            g.n = n;
            g.birkhoff = sum;
            g.image = u;
            g.density_gap = gap;
            const auto side = pick_side(cuts.left, cuts.right);
            g.continuity_side = side.side;
            g.continuity_radius = side.radius;
            g.c_prime = c_prime;
            g.sigma_prime = sigma_prime;
            g.D = D;
            g.E = E;
            o.found = std::move(g);
            return o;
        }
        return o;
    };

    SearchStats stats;
    bool have_best = false;
    const long batch_size = std::max<long>(1, static_cast<long>(worker_count()));
    while (stats.points < budget) {
        const long batch = std::min(batch_size, budget - stats.points);
        std::vector<Rational> xs;
        for (long s = 0; s < batch; ++s) xs.push_back(E.sample(rng, options.bits));
        std::vector<Outcome> outs(xs.size());
        parallel_for(xs.size(), [&](std::size_t s) { outs[s] = scan(xs[s]); });
        for (auto& o : outs) {
            ++stats.points;
            stats.times_tested += o.tested;
            stats.in_set += o.in_set;
            if (o.best >= 0 && (!have_best || o.best < stats.best_abs_sum)) {
                stats.best_abs_sum = o.best;
                have_best = true;
            }
            if (o.found) {
                o.found->stats = stats;
                return *o.found;
            }
        }
    }
    fail(ErrorCode::NotFoundWithinBudget, "good return search: " + stats.summary());
}

GoodReturnCheck verify_good_return(const Iet& iet, const StepCocycle& f, const GoodReturn& g) {
    GoodReturnCheck c;
    const Iet t = iet.normalized();
    if (g.n < 1 || !(g.x >= 0 && g.x < 1)) return c;
    c.start_in_e = g.E.contains(g.x);
    std::vector<Rational> orbit;
    Rational u = g.x, sum = 0;
    for (long i = 0; i < g.n; ++i) {
        orbit.push_back(u);
        sum += f.eval(u);
        u = t.apply(u);
    }
    c.image_in_e = g.E.contains(u);
    c.sum_bounded = abs(sum) < g.D;
    std::sort(orbit.begin(), orbit.end());
    Rational gap = orbit.front();
    for (std::size_t i = 1; i < orbit.size(); ++i) gap = std::max(gap, Rational(orbit[i] - orbit[i - 1]));
    gap = std::max(gap, Rational(1 - orbit.back()));
    c.dense = gap <= g.c_prime / g.n;

    // Breakpoints of T^n: preimages T^{-i}(c), i < n, of the cuts of T.
    std::vector<Rational> breaks{Rational(0), Rational(1)};
    for (const Rational& cut : t.discontinuities()) {
        Rational z = cut;
        for (long i = 0; i < g.n; ++i) {
            breaks.push_back(z);
            if (i + 1 < g.n) z = t.apply_inverse(z);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    auto above = std::upper_bound(breaks.begin(), breaks.end(), g.x);
    const Rational right = *above - g.x;
    const Rational left = g.x - *std::prev(above);
    const Rational r = g.sigma_prime / g.n;
    c.continuity = r <= left || r < right;
    const auto side = pick_side(left, right);
    c.fields_match = u == g.image && sum == g.birkhoff && gap == g.density_gap && side.side == g.continuity_side &&
                     side.radius == g.continuity_radius;
    return c;
}

#define IETSKEW_INSTANTIATE(S)                                                   \
    template S orbit_density_gap<S>(const BasicIet<S>&, const S&, long);         \
    template ContinuityInterval<S> continuity_interval<S>(const BasicIet<S>&, const S&, long);

IETSKEW_INSTANTIATE(Rational)
IETSKEW_INSTANTIATE(double)

}  // namespace ietskew
