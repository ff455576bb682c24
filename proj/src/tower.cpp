#include "ietskew/tower.hpp"

#include <algorithm>
#include <set>

#include "ietskew/error.hpp"

namespace ietskew {

Rational StepFunction::eval(const Rational& x) const {
    auto it = std::upper_bound(start.begin(), start.end(), x);
    if (it == start.begin() || x >= right) fail(ErrorCode::OutOfDomain, "step function argument outside its interval");
    return value[static_cast<std::size_t>(it - start.begin() - 1)];
}

StepFunction StepFunction::restricted(const Rational& l, const Rational& r) const {
    StepFunction out{l, r, {}, {}};
    out.start.push_back(l);
    out.value.push_back(eval(l));
    for (std::size_t k = 0; k < start.size(); ++k)
        if (start[k] > l && start[k] < r) {
            out.start.push_back(start[k]);
            out.value.push_back(value[k]);
        }
    return out;
}

StepFunction StepFunction::pulled_back(const Rational& l, const Rational& r, const Rational& shift) const {
    StepFunction moved = restricted(Rational(l + shift), Rational(r + shift));
    for (Rational& s : moved.start) s -= shift;
    moved.left = l;
    moved.right = r;
    return moved;
}

StepFunction StepFunction::plus(const StepFunction& other) const {
    std::set<Rational> cuts(start.begin(), start.end());
    cuts.insert(other.start.begin(), other.start.end());
    StepFunction out{left, right, {}, {}};
    for (const Rational& c : cuts) {
        Rational v = eval(c) + other.eval(c);
        if (!out.value.empty() && out.value.back() == v) continue;
        out.start.push_back(c);
        out.value.push_back(std::move(v));
    }
    return out;
}

TowerLadder::TowerLadder(const Iet& iet, std::optional<StepCocycle> f) : f_(std::move(f)) {
    levels_.push_back(iet);
    heights_.emplace_back(static_cast<std::size_t>(iet.size()), BigInt(1));
    if (f_) {
        if (iet.total_length() != 1) fail(ErrorCode::BadConfig, "cocycle sums need an IET on [0,1)");
        std::vector<StepFunction> sums;
        StepFunction whole{0, 1, {}, {}};
        Rational at = 0;
        for (std::size_t k = 0; k < f_->values().size(); ++k) {
            whole.start.push_back(at);
            whole.value.push_back(f_->values()[k]);
            at += f_->lengths()[k];
        }
        for (Letter a = 0; a < iet.size(); ++a) {
            const Interval<Rational> I = iet.interval(a);
            sums.push_back(whole.restricted(I.left, I.right));
        }
        sums_.push_back(std::move(sums));
    }
}

void TowerLadder::extend_to(long n) {
    while (depth() < n) {
        const Iet& cur = levels_.back();
        const Permutation& p = cur.permutation();
        const Rational& top = cur.length(p.last_top());
        const Rational& bottom = cur.length(p.last_bottom());
        if (top == bottom) fail(ErrorCode::DegenerateLengths, "last lengths agree at step " + std::to_string(depth()));
        const StepType t = top > bottom ? StepType::Top : StepType::Bottom;
        const RauzyArrow& arrow = rauzy_arrow(p, t);
        const auto w = static_cast<std::size_t>(arrow.winner), l = static_cast<std::size_t>(arrow.loser);
        std::vector<Rational> lengths = cur.lengths();
        lengths[w] -= lengths[l];
        Iet next(arrow.to, std::move(lengths), {.normalize = false, .require_irreducible = false});
        std::vector<BigInt> h = heights_.back();
        h[l] += h[w];
        if (f_) {
            const std::vector<StepFunction>& old = sums_.back();
            std::vector<StepFunction> sums;
            for (Letter a = 0; a < next.size(); ++a) {
                const Interval<Rational> I = next.interval(a);
                const auto ua = static_cast<std::size_t>(a);
                if (ua != l) {
                    sums.push_back(old[ua].restricted(I.left, I.right));
                    continue;
                }
                // the new tower l is two old towers stacked: first over I, then over T_m(I)
                const std::size_t first = t == StepType::Top ? l : w, second = t == StepType::Top ? w : l;
                const Rational& shift = cur.translation(static_cast<Letter>(first));
                sums.push_back(old[first].restricted(I.left, I.right).plus(old[second].pulled_back(I.left, I.right, shift)));
            }
            sums_.push_back(std::move(sums));
        }
        levels_.push_back(std::move(next));
        heights_.push_back(std::move(h));
        arrows_.push_back(&arrow);
    }
}

BigInt TowerLadder::min_height(long m) const {
    const std::vector<BigInt>& h = heights(m);
    return *std::min_element(h.begin(), h.end());
}

std::vector<TowerLadder::Location> TowerLadder::locate_all(const Rational& x, long n) {
    extend_to(n);
    const Iet& zero = levels_.front();
    if (x < 0 || x >= zero.total_length()) fail(ErrorCode::OutOfDomain, "point outside the domain");
    std::vector<Location> out;
    out.push_back({zero.letter_at(x), BigInt(0), x});
    for (long m = 0; m < n; ++m) {
        const Iet& cur = level(m);
        const RauzyArrow& ar = arrow(m);
        const std::vector<BigInt>& q = heights(m);
        Location loc = out.back();
        const Rational cut = cur.total_length() - cur.length(ar.loser);
        if (ar.type == StepType::Top) {
            if (loc.letter == ar.winner && loc.base >= cut) {
                loc.floor += q[static_cast<std::size_t>(ar.loser)];
                loc.base = cur.apply_inverse(loc.base);
                loc.letter = ar.loser;
            }
        } else if (loc.letter == ar.winner) {
            if (cur.apply(loc.base) >= cut) loc.letter = ar.loser;
        } else if (loc.letter == ar.loser) {
            loc.floor += q[static_cast<std::size_t>(ar.winner)];
            loc.base = cur.apply_inverse(loc.base);
        }
        out.push_back(std::move(loc));
    }
    return out;
}

TowerLadder::Location TowerLadder::locate(const Rational& x, long n) { return locate_all(x, n).back(); }

namespace {

// Which old towers make up tower a at level m: (first letter, its height, second letter),
// or nullopt when the tower is inherited unchanged.
struct Split {
    std::size_t first, second;
};

std::optional<Split> split_of(const RauzyArrow& ar, Letter a) {
    if (a != ar.loser) return std::nullopt;
    const auto w = static_cast<std::size_t>(ar.winner), l = static_cast<std::size_t>(ar.loser);
    if (ar.type == StepType::Top) return Split{l, w};
    return Split{w, l};
}

}  // namespace

Rational TowerLadder::position(long m, Letter a, Rational base, BigInt j) const {
    for (; m > 0 && j > 0; --m) {
        const auto sp = split_of(arrow(m - 1), a);
        if (!sp) continue;
        const BigInt& qa = heights(m - 1)[sp->first];
        if (j < qa) {
            a = static_cast<Letter>(sp->first);
        } else {
            j -= qa;
            base = level(m - 1).apply(base);
            a = static_cast<Letter>(sp->second);
        }
    }
    if (j != 0) fail(ErrorCode::OutOfDomain, "floor index beyond the tower");
    return base;
}

Rational TowerLadder::tower_sum(long m, Letter a, const Rational& base) const {
    if (!f_) fail(ErrorCode::BadConfig, "ladder has no cocycle");
    return sums_.at(static_cast<std::size_t>(m))[static_cast<std::size_t>(a)].eval(base);
}

Rational TowerLadder::prefix_sum(long m, Letter a, Rational base, BigInt j) const {
    if (!f_) fail(ErrorCode::BadConfig, "ladder has no cocycle");
    if (j == heights(m)[static_cast<std::size_t>(a)]) return tower_sum(m, a, base);
    Rational sum = 0;
    for (; m > 0 && j > 0; --m) {
        const auto sp = split_of(arrow(m - 1), a);
        if (!sp) continue;
        const BigInt& qa = heights(m - 1)[sp->first];
        if (j < qa) {
            a = static_cast<Letter>(sp->first);
        } else {
            sum += tower_sum(m - 1, static_cast<Letter>(sp->first), base);
            j -= qa;
            base = level(m - 1).apply(base);
            a = static_cast<Letter>(sp->second);
            if (j == heights(m - 1)[sp->second]) return sum + tower_sum(m - 1, a, base);
        }
    }
    if (j != 0) fail(ErrorCode::OutOfDomain, "floor index beyond the tower");
    return sum;
}

std::optional<BigInt> TowerLadder::full_traversal_time(long m, const Location& where, int max_towers,
                                                       const std::optional<BigInt>& limit) const {
    const Iet& t = level(m);
    const std::vector<BigInt>& q = heights(m);
    std::vector<bool> seen(static_cast<std::size_t>(t.size()), false);
    std::size_t missing = seen.size();
    auto mark = [&](Letter a) {
        if (!seen[static_cast<std::size_t>(a)]) {
            seen[static_cast<std::size_t>(a)] = true;
            --missing;
        }
    };
    BigInt time = q[static_cast<std::size_t>(where.letter)] - where.floor;
    if (where.floor == 0) {
        mark(where.letter);
        if (missing == 0) return time;
    }
    Rational b = where.base;
    for (int k = 0; k < max_towers; ++k) {
        b = t.apply(b);
        const Letter a = t.letter_at(b);
        time += q[static_cast<std::size_t>(a)];
        if (limit && time > *limit) return std::nullopt;
        mark(a);
        if (missing == 0) return time;
    }
    return std::nullopt;
}

}  // namespace ietskew
