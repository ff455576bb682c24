#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace ietskew {

// Letters of the alphabet are 0..d-1; letter_name() gives "A", "B", ...
using Letter = int;

std::string letter_name(Letter a);

// A pair of bijections alphabet -> positions. Positions are stored 0-based;
// the JSON descriptor uses 1-based ranks.
class Permutation {
public:
    Permutation() = default;

    // pi0[a], pi1[a] are 1-based ranks of letter a before/after the exchange.
    static Permutation from_ranks(const std::vector<int>& pi0, const std::vector<int>& pi1);
    // top[k], bottom[k] are the letters at 0-based positions k.
    static Permutation from_rows(std::vector<Letter> top, std::vector<Letter> bottom);
    // top A B ... , bottom reversed: the hyperelliptic class.
    static Permutation reversal(int d);

    int size() const { return static_cast<int>(top_.size()); }

    Letter top(int position) const { return top_[static_cast<std::size_t>(position)]; }
    Letter bottom(int position) const { return bottom_[static_cast<std::size_t>(position)]; }
    int top_rank(Letter a) const { return top_rank_[static_cast<std::size_t>(a)]; }
    int bottom_rank(Letter a) const { return bottom_rank_[static_cast<std::size_t>(a)]; }

    Letter last_top() const { return top_.back(); }
    Letter last_bottom() const { return bottom_.back(); }

    const std::vector<Letter>& top_row() const { return top_; }
    const std::vector<Letter>& bottom_row() const { return bottom_; }

    // No proper prefix block of the top row is mapped onto the same prefix.
    bool irreducible() const;

    // 1-based rank vectors, as in the JSON descriptor.
    std::vector<int> pi0_ranks() const;
    std::vector<int> pi1_ranks() const;

    std::string to_string() const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<Letter> top_, bottom_;
    std::vector<int> top_rank_, bottom_rank_;
};

struct PermutationHash {
    std::size_t operator()(const Permutation& p) const noexcept;
};

}  // namespace ietskew
