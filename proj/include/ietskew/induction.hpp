#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ietskew/iet.hpp"
#include "ietskew/matrix.hpp"
#include "ietskew/rauzy.hpp"

namespace ietskew {

// One Zorich block: kappa consecutive Rauzy steps of the same type.
struct ZorichBlock {
    long kappa = 0;
    StepType type = StepType::Top;
    long start_step = 0;
    IntMatrix B;  // lengths after = B * lengths before
    IntMatrix Q;  // heights after = Q * heights before (inverse transpose of B)
};

struct InductionOptions {
    bool track_matrices = true;
    bool record_path = true;
};

inline constexpr long kDefaultKappaCap = 1'000'000;

// Snapshot of Rauzy-Veech induction after n steps: the induced IET on
// [0, |lambda^n|), the accumulated matrices and the tower heights.
template <Scalar S>
class InductionState {
public:
    explicit InductionState(BasicIet<S> iet, InductionOptions options = {});

    long step_count() const { return n_; }
    const BasicIet<S>& initial() const { return initial_; }
    const BasicIet<S>& current() const { return current_; }
    // A^(n), with lambda^n = A^(n) lambda.
    const IntMatrix& matrix() const { return a_; }
    // (A^(n))^{-1} = A_gamma for the path followed so far. Entry (b, a) counts
    // the iterates of I^n_a that lie in I_b before returning.
    const IntMatrix& inverse_matrix() const { return a_inv_; }
    const std::vector<BigInt>& heights() const { return heights_; }
    const RauzyPath& path() const { return path_; }
    const std::vector<ZorichBlock>& zorich_blocks() const { return blocks_; }
    const std::vector<StepType>& types() const { return types_; }

    // Type of the next step; DegenerateLengths when the two last lengths agree.
    StepType next_type() const;
    void advance();
    // Advances one Zorich block and records its factors.
    void advance_zorich(long kappa_cap = kDefaultKappaCap);

    // Q(m_i, m_j): product Q_j ... Q_{i+1} of block factors, i <= j.
    IntMatrix cocycle(std::size_t i, std::size_t j) const;

private:
    BasicIet<S> initial_;
    BasicIet<S> current_;
    InductionOptions options_;
    long n_ = 0;
    IntMatrix a_, a_inv_;
    std::vector<BigInt> heights_;
    RauzyPath path_;
    std::vector<StepType> types_;
    std::vector<ZorichBlock> blocks_;
};

template <Scalar S>
InductionState<S> rauzy_step(const InductionState<S>& state) {
    InductionState<S> next = state;
    next.advance();
    return next;
}

template <Scalar S>
InductionState<S> zorich_step(const InductionState<S>& state, long kappa_cap = kDefaultKappaCap) {
    InductionState<S> next = state;
    next.advance_zorich(kappa_cap);
    return next;
}

template <Scalar S>
struct TowerDecomposition {
    std::vector<Interval<S>> bases;  // by letter
    std::vector<BigInt> heights;     // by letter
};

template <Scalar S>
TowerDecomposition<S> towers(const InductionState<S>& state);

struct TowerCheck {
    bool ok = true;
    std::string problem;
};

// Enumerates all floors T^i(base) and checks that they tile the domain.
TowerCheck verify_towers(const Iet& iet, const TowerDecomposition<Rational>& towers, long max_floors = 1'000'000);

// Whether the first |path| Rauzy steps of iet reproduce path.
template <Scalar S>
bool delta_membership(const BasicIet<S>& iet, const RauzyPath& path);

// gamma followed by |gamma| arrows of the type opposite to its last arrow.
RauzyPath extend_no_return(const RauzyPath& path);

// Shortest prefix of length > min_length of the orbit's Rauzy path which is a
// loop at the starting permutation, has first and last arrows of opposite
// types, and whose matrix has all entries >= min_entry.
template <Scalar S>
RauzyPath find_loop_path(const BasicIet<S>& iet, long min_length, long max_steps, long min_entry = 1);

enum class UMode { Enforce, Report };

// lambda normalized: pairwise differences at most nu/2d, increasing along the top row.
template <Scalar S>
bool in_balanced_region(const BasicIet<S>& iet, const Rational& nu);

struct BulletCheck {
    std::string name;
    long checked = 0;
    long failures = 0;
};

struct BalancedDomain {
    RauzyPath gamma;
    RauzyPath gamma_tilde;
    IntMatrix a_gamma;
    BigInt c_gamma;
    long ell = 0;
    long blocks = 0;  // Zorich blocks in gamma (L)
    Rational nu;
    bool lambda_in_u = false;
    bool delta_in_u = false;
    std::vector<BulletCheck> report;
    long samples = 0;

    bool all_passed(bool include_u) const;
};

template <Scalar S>
BalancedDomain build_balanced_domain(const BasicIet<S>& iet, const Rational& nu, long budget, UMode mode = UMode::Enforce,
                                     long samples = 100, std::uint64_t seed = 1);

// Samples a point of Delta_path: lambda proportional to A_path v with v uniform
// on the simplex. Unnormalized members have integer lengths, which keeps long
// exact inductions cheap.
Iet sample_delta_member(const RauzyPath& path, std::uint64_t seed, unsigned bits = 256, bool normalize = true);

}  // namespace ietskew
