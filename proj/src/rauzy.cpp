#include "ietskew/rauzy.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <unordered_map>

#include "ietskew/error.hpp"

namespace ietskew {

StepType parse_step_type(std::string_view text) {
    if (text == "T" || text == "top" || text == "Top") return StepType::Top;
    if (text == "B" || text == "bottom" || text == "Bottom") return StepType::Bottom;
    fail(ErrorCode::ParseError, "unknown step type '" + std::string(text) + "'");
}

IntMatrix RauzyArrow::matrix_factor() const {
    IntMatrix m = IntMatrix::identity(from.size());
    m(winner, loser) = 1;
    return m;
}

namespace {

RauzyArrow derive_arrow(const Permutation& from, StepType type) {
    RauzyArrow arrow;
    arrow.from = from;
    arrow.type = type;
    arrow.winner = type == StepType::Top ? from.last_top() : from.last_bottom();
    arrow.loser = type == StepType::Top ? from.last_bottom() : from.last_top();

    // Representative lengths: all ones, winner twice as long.
    std::vector<Rational> lengths(static_cast<std::size_t>(from.size()), Rational(1));
    lengths[static_cast<std::size_t>(arrow.winner)] = 2;
    const Iet t(from, lengths, {.normalize = false, .require_irreducible = false});
    const Rational c = t.total_length() - 1;
    const FirstReturnProfile profile = first_return_profile(t, {Rational(0), c}, 4);
    if (static_cast<int>(profile.pieces.size()) != from.size())
        fail(ErrorCode::DegenerateLengths, "induced map of " + from.to_string() + " does not have d pieces");

    std::vector<std::pair<Rational, Letter>> by_image;
    std::vector<Letter> top;
    for (const ReturnPiece& p : profile.pieces) {
        const Letter name = p.return_time == 1 ? t.letter_at(p.piece.left) : arrow.loser;
        top.push_back(name);
        by_image.emplace_back(p.image_left, name);
    }
    std::sort(by_image.begin(), by_image.end());
    std::vector<Letter> bottom;
    for (const auto& [pos, name] : by_image) bottom.push_back(name);
    arrow.to = Permutation::from_rows(std::move(top), std::move(bottom));
    return arrow;
}

struct ArrowKey {
    Permutation perm;
    StepType type;
    bool operator==(const ArrowKey&) const = default;
};

struct ArrowKeyHash {
    std::size_t operator()(const ArrowKey& k) const noexcept {
        return PermutationHash{}(k.perm) * 2 + (k.type == StepType::Top ? 1 : 0);
    }
};

}  // namespace

const RauzyArrow& rauzy_arrow(const Permutation& from, StepType type) {
    static std::mutex mutex;
    static std::unordered_map<ArrowKey, std::unique_ptr<RauzyArrow>, ArrowKeyHash> cache;
    ArrowKey key{from, type};
    {
        std::lock_guard lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto arrow = std::make_unique<RauzyArrow>(derive_arrow(from, type));
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.emplace(std::move(key), std::move(arrow));
    return *it->second;
}

RauzyPath::RauzyPath(std::vector<RauzyArrow> arrows) {
    for (const RauzyArrow& a : arrows) append(a);
}

void RauzyPath::append(const RauzyArrow& arrow) {
    if (!arrows_.empty() && !(arrows_.back().to == arrow.from))
        fail(ErrorCode::BrokenChain, "arrow starts at " + arrow.from.to_string() + " but path ends at " + end().to_string());
    arrows_.push_back(arrow);
}

RauzyPath RauzyPath::concat(const RauzyPath& other) const {
    RauzyPath out = *this;
    for (const RauzyArrow& a : other.arrows_) out.append(a);
    return out;
}

RauzyPath RauzyPath::prefix(std::size_t n) const {
    RauzyPath out;
    out.arrows_.assign(arrows_.begin(), arrows_.begin() + static_cast<std::ptrdiff_t>(std::min(n, arrows_.size())));
    return out;
}

std::string RauzyPath::types() const {
    std::string s;
    for (const RauzyArrow& a : arrows_) s += type_char(a.type);
    return s;
}

std::size_t RauzyPath::runs() const {
    std::size_t r = 0;
    for (std::size_t i = 0; i < arrows_.size(); ++i)
        if (i == 0 || arrows_[i].type != arrows_[i - 1].type) ++r;
    return r;
}

IntMatrix path_matrix(const RauzyPath& path, int d) {
    IntMatrix m = IntMatrix::identity(d);
    for (const RauzyArrow& a : path.arrows()) m.add_column(a.loser, a.winner);
    return m;
}

bool path_positive(const RauzyPath& path) { return !path.empty() && path_matrix(path).positive(); }

RauzyPath path_from_types(const Permutation& start, std::string_view types) {
    RauzyPath path;
    Permutation at = start;
    for (char c : types) {
        const RauzyArrow& a = rauzy_arrow(at, parse_step_type(std::string_view(&c, 1)));
        path.append(a);
        at = a.to;
    }
    return path;
}

FirstReturnProfile first_return_profile(const Iet& iet, const Interval<Rational>& domain, long horizon) {
    const Rational& a = domain.left;
    const Rational& b = domain.right;
    if (a < 0 || b > iet.total_length() || !(a < b)) fail(ErrorCode::OutOfDomain, "return domain outside [0,|I|)");

    auto first_backward_hit = [&](Rational y, bool allow_zero) {
        if (allow_zero && domain.contains(y)) return y;
        for (long k = 1; k <= horizon; ++k) {
            y = iet.apply_inverse(y);
            if (domain.contains(y)) return y;
        }
        fail(ErrorCode::HorizonExceeded, "backward orbit did not reach the return domain");
    };

    std::set<Rational> cuts{a};
    for (const Rational& z : iet.discontinuities()) cuts.insert(first_backward_hit(z, true));
    if (a > 0) cuts.insert(first_backward_hit(a, false));
    if (b < iet.total_length()) cuts.insert(first_backward_hit(b, false));

    FirstReturnProfile out;
    out.domain = domain;
    std::vector<Rational> points(cuts.begin(), cuts.end());
    points.push_back(b);
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        ReturnPiece piece;
        piece.piece = {points[k], points[k + 1]};
        piece.visits.assign(static_cast<std::size_t>(iet.size()), 0);
        Rational x = points[k];
        do {
            if (piece.return_time >= horizon) fail(ErrorCode::HorizonExceeded, "forward orbit did not return");
            ++piece.visits[static_cast<std::size_t>(iet.letter_at(x))];
            x = iet.apply(x);
            ++piece.return_time;
        } while (!domain.contains(x));
        piece.image_left = x;
        out.pieces.push_back(std::move(piece));
    }
    return out;
}

std::vector<long> heights_bruteforce(const Iet& iet, const Interval<Rational>& domain, long horizon) {
    std::vector<long> h;
    for (const ReturnPiece& p : first_return_profile(iet, domain, horizon).pieces) h.push_back(p.return_time);
    return h;
}

}  // namespace ietskew
