#pragma once

#include <optional>
#include <vector>

#include "ietskew/cocycle.hpp"
#include "ietskew/iet.hpp"
#include "ietskew/rauzy.hpp"

namespace ietskew {

// Piecewise constant function on [left, right): value[k] on [start[k], start[k+1]).
struct StepFunction {
    Rational left, right;
    std::vector<Rational> start;
    std::vector<Rational> value;

    Rational eval(const Rational& x) const;
    StepFunction restricted(const Rational& l, const Rational& r) const;
    // x -> g(x + shift) on [l, r).
    StepFunction pulled_back(const Rational& l, const Rational& r, const Rational& shift) const;
    StepFunction plus(const StepFunction& other) const;
};

// Exact Rauzy-Veech levels of a rational IET with the Rokhlin tower structure
// kept implicit: floors are never enumerated, so heights can be astronomically
// large. With a cocycle, the special Birkhoff sums over full towers are kept as
// step functions on the bases.
class TowerLadder {
public:
    explicit TowerLadder(const Iet& iet, std::optional<StepCocycle> f = std::nullopt);

    // Runs Rauzy steps until depth() >= n. DegenerateLengths propagates.
    void extend_to(long n);
    long depth() const { return static_cast<long>(levels_.size()) - 1; }

    const Iet& level(long m) const { return levels_.at(static_cast<std::size_t>(m)); }
    const std::vector<BigInt>& heights(long m) const { return heights_.at(static_cast<std::size_t>(m)); }
    // Arrow of the step from level m to m + 1.
    const RauzyArrow& arrow(long m) const { return *arrows_.at(static_cast<std::size_t>(m)); }
    BigInt min_height(long m) const;

    struct Location {
        Letter letter = 0;
        BigInt floor;
        Rational base;  // x = T^floor(base), base in I^m_letter
    };
    // Locations of x at levels 0..n.
    std::vector<Location> locate_all(const Rational& x, long n);
    Location locate(const Rational& x, long n);

    // T^j(base) for base in I^m_a and 0 <= j < q^m_a.
    Rational position(long m, Letter a, Rational base, BigInt j) const;
    // S_j f(base) for 0 <= j <= q^m_a. Needs a cocycle.
    Rational prefix_sum(long m, Letter a, Rational base, BigInt j) const;
    // Special Birkhoff sum over the full tower.
    Rational tower_sum(long m, Letter a, const Rational& base) const;

    // Steps from x (at level m) until the orbit has passed through every floor
    // of every level-m tower, following at most max_towers induced steps and
    // giving up once the time passes limit (when given).
    std::optional<BigInt> full_traversal_time(long m, const Location& where, int max_towers,
                                              const std::optional<BigInt>& limit = std::nullopt) const;

private:
    std::vector<Iet> levels_;
    std::vector<std::vector<BigInt>> heights_;
    std::vector<const RauzyArrow*> arrows_;
    std::optional<StepCocycle> f_;
    std::vector<std::vector<StepFunction>> sums_;  // by level, by letter
};

}  // namespace ietskew
