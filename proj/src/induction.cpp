#include "ietskew/induction.hpp"

#include <algorithm>

#include "ietskew/error.hpp"
#include "ietskew/random.hpp"

namespace ietskew {

template <Scalar S>
InductionState<S>::InductionState(BasicIet<S> iet, InductionOptions options)
    : initial_(iet), current_(std::move(iet)), options_(options) {
    const int d = current_.size();
    heights_.assign(static_cast<std::size_t>(d), BigInt(1));
    if (options_.track_matrices) {
        a_ = IntMatrix::identity(d);
        a_inv_ = IntMatrix::identity(d);
    }
}

template <Scalar S>
StepType InductionState<S>::next_type() const {
    const Permutation& p = current_.permutation();
    const S& top = current_.length(p.last_top());
    const S& bottom = current_.length(p.last_bottom());
    bool degenerate;
    if constexpr (ScalarTraits<S>::exact) {
        degenerate = top == bottom;
    } else {
        degenerate = ScalarTraits<S>::abs(S(top - bottom)) < current_.total_length() * kFloatTolerance;
    }
    if (degenerate)
        fail(ErrorCode::DegenerateLengths, "last top and last bottom lengths agree at step " + std::to_string(n_));
    return top > bottom ? StepType::Top : StepType::Bottom;
}

template <Scalar S>
void InductionState<S>::advance() {
    const StepType t = next_type();
    const RauzyArrow& arrow = rauzy_arrow(current_.permutation(), t);
    const auto w = static_cast<std::size_t>(arrow.winner), l = static_cast<std::size_t>(arrow.loser);
    std::vector<S> lengths = current_.lengths();
    lengths[w] -= lengths[l];
    current_ = BasicIet<S>(arrow.to, std::move(lengths), {.normalize = false, .require_irreducible = false});
    heights_[l] += heights_[w];
    if (options_.track_matrices) {
        a_.subtract_row(arrow.winner, arrow.loser);
        a_inv_.add_column(arrow.loser, arrow.winner);
    }
    if (options_.record_path) path_.append(arrow);
    types_.push_back(t);
    ++n_;
}

template <Scalar S>
void InductionState<S>::advance_zorich(long kappa_cap) {
    // Count the block on scratch copies first so that a failure leaves the state untouched.
    const StepType t = next_type();
    long kappa = 0;
    {
        InductionState<S> probe(current_, {.track_matrices = false, .record_path = false});
        for (;;) {
            probe.advance();
            ++kappa;
            if (kappa > kappa_cap)
                fail(ErrorCode::KappaCapExceeded, "more than " + std::to_string(kappa_cap) + " steps of type " + type_char(t));
            if (probe.next_type() != t) break;
        }
    }
    const int d = current_.size();
    ZorichBlock block;
    block.kappa = kappa;
    block.type = t;
    block.start_step = n_;
    block.B = IntMatrix::identity(d);
    IntMatrix inverse = IntMatrix::identity(d);
    for (long k = 0; k < kappa; ++k) {
        const RauzyArrow& arrow = rauzy_arrow(current_.permutation(), t);
        block.B.subtract_row(arrow.winner, arrow.loser);
        inverse.add_column(arrow.loser, arrow.winner);
        advance();
    }
    block.Q = inverse.transpose();
    blocks_.push_back(std::move(block));
}

template <Scalar S>
IntMatrix InductionState<S>::cocycle(std::size_t i, std::size_t j) const {
    IntMatrix m = IntMatrix::identity(current_.size());
    for (std::size_t k = i; k < j; ++k) m = blocks_[k].Q * m;
    return m;
}

template <Scalar S>
TowerDecomposition<S> towers(const InductionState<S>& state) {
    TowerDecomposition<S> out;
    for (Letter a = 0; a < state.current().size(); ++a) out.bases.push_back(state.current().interval(a));
    out.heights = state.heights();
    return out;
}

TowerCheck verify_towers(const Iet& iet, const TowerDecomposition<Rational>& towers, long max_floors) {
    BigInt total_floors = 0;
    for (const BigInt& h : towers.heights) total_floors += h;
    if (total_floors > max_floors) return {false, "too many floors to enumerate"};
    std::vector<Interval<Rational>> floors;
    for (std::size_t a = 0; a < towers.bases.size(); ++a) {
        const Rational len = towers.bases[a].length();
        Rational left = towers.bases[a].left;
        const long h = towers.heights[a].get_si();
        for (long i = 0; i < h; ++i) {
            floors.push_back({left, Rational(left + len)});
            if (i + 1 < h) {
                const Letter b = iet.letter_at(left);
                if (Rational(left + len) > iet.interval(b).right)
                    return {false, "floor " + std::to_string(i) + " of tower " + letter_name(static_cast<Letter>(a)) + " straddles a discontinuity"};
                left = iet.apply(left);
            }
        }
    }
    std::sort(floors.begin(), floors.end(), [](const auto& x, const auto& y) { return x.left < y.left; });
    Rational at = 0;
    for (const auto& f : floors) {
        if (f.left != at) return {false, "floors overlap or leave a gap at " + rational_to_string(at)};
        at = f.right;
    }
    if (at != iet.total_length()) return {false, "floors do not reach the right end"};
    return {};
}

template <Scalar S>
bool delta_membership(const BasicIet<S>& iet, const RauzyPath& path) {
    if (path.empty()) return true;
    if (!(iet.permutation() == path.start())) return false;
    InductionState<S> state(iet, {.track_matrices = false, .record_path = false});
    for (const RauzyArrow& arrow : path.arrows()) {
        if (state.next_type() != arrow.type) return false;
        state.advance();
    }
    return true;
}

RauzyPath extend_no_return(const RauzyPath& path) {
    if (path.empty()) fail(ErrorCode::BrokenChain, "cannot extend an empty path");
    RauzyPath out = path;
    const StepType t = opposite(path.arrows().back().type);
    for (std::size_t i = 0; i < path.length(); ++i) out.append(t);
    return out;
}

template <Scalar S>
RauzyPath find_loop_path(const BasicIet<S>& iet, long min_length, long max_steps, long min_entry) {
    InductionState<S> state(iet);
    for (long n = 1; n <= max_steps; ++n) {
        state.advance();
        if (n <= min_length) continue;
        if (!(state.current().permutation() == iet.permutation())) continue;
        if (state.types().front() == state.types().back()) continue;
        if (state.inverse_matrix().min_entry() < min_entry) continue;
        return state.path();
    }
    fail(ErrorCode::NotFoundWithinBudget, "no loop path within " + std::to_string(max_steps) + " steps");
}

namespace {

bool balanced_lengths(const Permutation& p, const std::vector<Rational>& lambda, const Rational& nu) {
    Rational total = 0;
    for (const Rational& v : lambda) total += v;
    const auto [lo, hi] = std::minmax_element(lambda.begin(), lambda.end());
    const int d = p.size();
    if ((*hi - *lo) * 2 * d > nu * total) return false;
    for (int k = 0; k + 1 < d; ++k)
        if (!(lambda[static_cast<std::size_t>(p.top(k))] < lambda[static_cast<std::size_t>(p.top(k + 1))])) return false;
    return true;
}

template <Scalar S>
std::vector<Rational> exact_lengths(const BasicIet<S>& iet) {
    std::vector<Rational> out;
    for (const S& v : iet.lengths()) out.push_back(ScalarTraits<S>::to_rational(v));
    return out;
}

bool cone_balanced(const Permutation& p, const IntMatrix& a, const Rational& nu) {
    for (int c = 0; c < a.size(); ++c) {
        std::vector<Rational> col;
        for (int r = 0; r < a.size(); ++r) col.emplace_back(a(r, c));
        if (!balanced_lengths(p, col, nu)) return false;
    }
    return true;
}

Rational max_ratio(const std::vector<BigInt>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return Rational(*hi, *lo);
}

Rational max_ratio(const std::vector<Rational>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

}  // namespace

template <Scalar S>
bool in_balanced_region(const BasicIet<S>& iet, const Rational& nu) {
    return balanced_lengths(iet.permutation(), exact_lengths(iet), nu);
}

bool BalancedDomain::all_passed(bool include_u) const {
    for (const BulletCheck& b : report) {
        const bool u_dependent = b.name == "orbit stays in U" || b.name == "balanced lengths below 1 + nu";
        if (u_dependent && !include_u) continue;
        if (b.failures > 0) return false;
    }
    return true;
}

Iet sample_delta_member(const RauzyPath& path, std::uint64_t seed, unsigned bits, bool normalize) {
    const int d = path.start().size();
    Rng rng(seed);
    std::vector<Rational> v = simplex_rational(rng, d, bits);
    if (!normalize)
        for (Rational& x : v) x *= Rational(BigInt(1) << bits);
    return Iet(path.start(), path_matrix(path).apply(v), {.normalize = normalize, .require_irreducible = false});
}

template <Scalar S>
BalancedDomain build_balanced_domain(const BasicIet<S>& iet, const Rational& nu, long budget, UMode mode, long samples,
                                     std::uint64_t seed) {
    BalancedDomain out;
    out.nu = nu;
    out.lambda_in_u = in_balanced_region(iet, nu);
    if (mode == UMode::Enforce && !out.lambda_in_u)
        fail(ErrorCode::PreconditionU, "lengths are not nu-balanced and increasing along the top row");

    const Permutation& start = iet.permutation();
    InductionState<S> state(iet);
    bool found = false;
    for (long n = 1; n <= budget && !found; ++n) {
        state.advance();
        if (!(state.current().permutation() == start)) continue;
        if (state.types().front() == state.types().back()) continue;
        if (state.inverse_matrix().min_entry() < 2) continue;
        if (mode == UMode::Enforce && !cone_balanced(start, state.inverse_matrix(), nu)) continue;
        found = true;
    }
    if (!found) fail(ErrorCode::NotFoundWithinBudget, "no balanced loop within " + std::to_string(budget) + " steps");

    out.gamma = state.path();
    out.a_gamma = state.inverse_matrix();
    out.c_gamma = out.a_gamma.entry_sum();
    out.ell = static_cast<long>(out.gamma.length());
    out.blocks = static_cast<long>(out.gamma.runs());
    out.delta_in_u = cone_balanced(start, out.a_gamma, nu);
    const RauzyPath base = out.gamma.concat(out.gamma).concat(out.gamma).concat(out.gamma.prefix(1));
    out.gamma_tilde = extend_no_return(base);
    out.samples = samples;

    BulletCheck entries{"entries of A_gamma at least 2", 1, out.a_gamma.min_entry() >= 2 ? 0 : 1};
    BulletCheck renormalizable{"renormalizable over the check horizon", 0, 0};
    BulletCheck follows{"follows gamma*gamma*gamma", 0, 0};
    BulletCheck zorich{"R^(i ell) = Z^(i L) for i = 1,2,3", 0, 0};
    BulletCheck no_return{"no Zorich return to Delta_tilde before 3L", 0, 0};
    BulletCheck stays{"orbit stays in U", 0, 0};
    BulletCheck heights{"balanced heights below C_gamma", 0, 0};
    BulletCheck lengths{"balanced lengths below 1 + nu", 0, 0};

    const long ell = out.ell, L = out.blocks;
    const long tilde = static_cast<long>(out.gamma_tilde.length());
    const long horizon = 3 * ell + tilde + 1;
    const std::string gamma3 = out.gamma.types() + out.gamma.types() + out.gamma.types();
    const std::string tilde_types = out.gamma_tilde.types();
    const Rational c_gamma(out.c_gamma);

    for (long s = 0; s < samples; ++s) {
        const Iet member = sample_delta_member(out.gamma_tilde, seed * 1000003 + static_cast<std::uint64_t>(s),
                                               256 + 2 * static_cast<unsigned>(horizon), false);
        InductionState<Rational> run(member, {.track_matrices = false, .record_path = true});
        std::vector<std::vector<BigInt>> h_at;
        std::vector<std::vector<Rational>> l_at{member.lengths()};
        ++renormalizable.checked;
        try {
            for (long k = 1; k <= horizon; ++k) {
                run.advance();
                if (k % ell == 0 && k <= 3 * ell) {
                    h_at.push_back(run.heights());
                    if (k < 3 * ell) l_at.push_back(run.current().lengths());
                }
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateLengths) throw;
            ++renormalizable.failures;
            continue;
        }
        std::string types;
        for (StepType t : run.types()) types += type_char(t);

        ++follows.checked;
        if (types.compare(0, gamma3.size(), gamma3) != 0) ++follows.failures;

        std::vector<long> boundary{0};
        for (long k = 1; k < static_cast<long>(types.size()); ++k)
            if (types[static_cast<std::size_t>(k)] != types[static_cast<std::size_t>(k - 1)]) boundary.push_back(k);
        ++zorich.checked;
        for (long i = 1; i <= 3; ++i) {
            if (static_cast<long>(boundary.size()) <= i * L || boundary[static_cast<std::size_t>(i * L)] != i * ell) {
                ++zorich.failures;
                break;
            }
        }

        ++no_return.checked;
        for (long i = 1; i < 3 * L && i < static_cast<long>(boundary.size()); ++i) {
            const long at = boundary[static_cast<std::size_t>(i)];
            if (at + tilde > static_cast<long>(types.size())) break;
            if (run.path()[static_cast<std::size_t>(at)].from == out.gamma_tilde.start() &&
                types.compare(static_cast<std::size_t>(at), static_cast<std::size_t>(tilde), tilde_types) == 0) {
                ++no_return.failures;
                break;
            }
        }

        ++stays.checked;
        ++lengths.checked;
        bool in_u = true, short_ratio = true;
        for (const auto& lam : l_at) {
            in_u = in_u && balanced_lengths(start, lam, nu);
            short_ratio = short_ratio && max_ratio(lam) < 1 + nu;
        }
        if (!in_u) ++stays.failures;
        if (!short_ratio) ++lengths.failures;

        ++heights.checked;
        for (const auto& q : h_at)
            if (!(max_ratio(q) < c_gamma)) {
                ++heights.failures;
                break;
            }
    }
    out.report = {entries, renormalizable, follows, zorich, no_return, stays, heights, lengths};
    return out;
}

#define IETSKEW_INSTANTIATE(S)                                                                            \
    template class InductionState<S>;                                                                     \
    template TowerDecomposition<S> towers<S>(const InductionState<S>&);                                   \
    template bool delta_membership<S>(const BasicIet<S>&, const RauzyPath&);                              \
    template RauzyPath find_loop_path<S>(const BasicIet<S>&, long, long, long);                           \
    template bool in_balanced_region<S>(const BasicIet<S>&, const Rational&);                             \
    template BalancedDomain build_balanced_domain<S>(const BasicIet<S>&, const Rational&, long, UMode, long, \
                                                     std::uint64_t);

IETSKEW_INSTANTIATE(Rational)
IETSKEW_INSTANTIATE(double)
IETSKEW_INSTANTIATE(BigFloat)

}  // namespace ietskew
