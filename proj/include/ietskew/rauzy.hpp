#pragma once

#include <string>
#include <vector>

#include "ietskew/iet.hpp"
#include "ietskew/matrix.hpp"

namespace ietskew {

enum class StepType { Top, Bottom };

inline char type_char(StepType t) { return t == StepType::Top ? 'T' : 'B'; }
inline StepType opposite(StepType t) { return t == StepType::Top ? StepType::Bottom : StepType::Top; }
StepType parse_step_type(std::string_view text);

// One arrow of the Rauzy graph. The winner is the longer of the two last
// intervals and keeps its name; the loser is stacked on top of it.
struct RauzyArrow {
    Permutation from;
    Permutation to;
    StepType type = StepType::Top;
    Letter winner = 0;
    Letter loser = 0;

    // Inverse of the one-step length matrix: identity plus a 1 at (winner, loser).
    IntMatrix matrix_factor() const;

    friend bool operator==(const RauzyArrow&, const RauzyArrow&) = default;
};

// The arrow leaving `from` with the given type. The target permutation is read
// off the first-return map of a representative IET and memoized.
const RauzyArrow& rauzy_arrow(const Permutation& from, StepType type);

class RauzyPath {
public:
    RauzyPath() = default;
    explicit RauzyPath(std::vector<RauzyArrow> arrows);

    const std::vector<RauzyArrow>& arrows() const { return arrows_; }
    const RauzyArrow& operator[](std::size_t i) const { return arrows_[i]; }
    std::size_t length() const { return arrows_.size(); }
    bool empty() const { return arrows_.empty(); }
    const Permutation& start() const { return arrows_.front().from; }
    const Permutation& end() const { return arrows_.back().to; }

    void append(const RauzyArrow& arrow);
    void append(StepType type) { append(rauzy_arrow(end(), type)); }
    RauzyPath concat(const RauzyPath& other) const;
    RauzyPath prefix(std::size_t n) const;

    std::string types() const;
    // Number of maximal runs of same-type arrows.
    std::size_t runs() const;

private:
    std::vector<RauzyArrow> arrows_;
};

// A_gamma: ordered product of the arrows' factors (identity of size d for the
// empty path).
IntMatrix path_matrix(const RauzyPath& path, int d);
inline IntMatrix path_matrix(const RauzyPath& path) { return path_matrix(path, path.start().size()); }
bool path_positive(const RauzyPath& path);

// Path from a type string such as "BTBT".
RauzyPath path_from_types(const Permutation& start, std::string_view types);

// First-return map of T to a subinterval J, computed by iterating endpoints.
struct ReturnPiece {
    Interval<Rational> piece;
    long return_time = 0;
    Rational image_left;
    // visits[b]: number of the iterates T^0..T^{r-1} of the piece lying in I_b.
    std::vector<long> visits;
};

struct FirstReturnProfile {
    Interval<Rational> domain;
    std::vector<ReturnPiece> pieces;  // in position order
};

FirstReturnProfile first_return_profile(const Iet& iet, const Interval<Rational>& domain, long horizon = 1'000'000);

// Return times of the pieces of the induced map, in position order.
std::vector<long> heights_bruteforce(const Iet& iet, const Interval<Rational>& domain, long horizon = 1'000'000);

}  // namespace ietskew
