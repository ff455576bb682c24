#include "ietskew/permutation.hpp"

#include <algorithm>

#include "ietskew/error.hpp"

namespace ietskew {

std::string letter_name(Letter a) {
    if (a >= 0 && a < 26) return std::string(1, static_cast<char>('A' + a));
    return "L" + std::to_string(a);
}

namespace {

std::vector<int> invert(const std::vector<Letter>& row, const char* which) {
    const auto d = row.size();
    std::vector<int> rank(d, -1);
    for (std::size_t k = 0; k < d; ++k) {
        const Letter a = row[k];
        if (a < 0 || static_cast<std::size_t>(a) >= d || rank[static_cast<std::size_t>(a)] != -1)
            fail(ErrorCode::NotBijective, std::string(which) + " row is not a bijection");
        rank[static_cast<std::size_t>(a)] = static_cast<int>(k);
    }
    return rank;
}

}  // namespace

Permutation Permutation::from_rows(std::vector<Letter> top, std::vector<Letter> bottom) {
    if (top.size() != bottom.size()) fail(ErrorCode::NotBijective, "rows of different length");
    if (top.size() < 2) fail(ErrorCode::NotBijective, "alphabet needs at least two letters");
    Permutation p;
    p.top_rank_ = invert(top, "top");
    p.bottom_rank_ = invert(bottom, "bottom");
    p.top_ = std::move(top);
    p.bottom_ = std::move(bottom);
    return p;
}

Permutation Permutation::from_ranks(const std::vector<int>& pi0, const std::vector<int>& pi1) {
    if (pi0.size() != pi1.size()) fail(ErrorCode::NotBijective, "pi0 and pi1 of different length");
    const auto d = pi0.size();
    std::vector<Letter> top(d, -1), bottom(d, -1);
    for (std::size_t a = 0; a < d; ++a) {
        const int r0 = pi0[a] - 1, r1 = pi1[a] - 1;
        if (r0 < 0 || static_cast<std::size_t>(r0) >= d || top[static_cast<std::size_t>(r0)] != -1)
            fail(ErrorCode::NotBijective, "pi0 is not a bijection onto {1..d}");
        if (r1 < 0 || static_cast<std::size_t>(r1) >= d || bottom[static_cast<std::size_t>(r1)] != -1)
            fail(ErrorCode::NotBijective, "pi1 is not a bijection onto {1..d}");
        top[static_cast<std::size_t>(r0)] = static_cast<Letter>(a);
        bottom[static_cast<std::size_t>(r1)] = static_cast<Letter>(a);
    }
    return from_rows(std::move(top), std::move(bottom));
}

Permutation Permutation::reversal(int d) {
    std::vector<Letter> top(static_cast<std::size_t>(d)), bottom(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        top[static_cast<std::size_t>(k)] = k;
        bottom[static_cast<std::size_t>(k)] = d - 1 - k;
    }
    return from_rows(std::move(top), std::move(bottom));
}

bool Permutation::irreducible() const {
    int max_rank = -1;
    for (int k = 0; k + 1 < size(); ++k) {
        max_rank = std::max(max_rank, bottom_rank(top(k)));
        if (max_rank == k) return false;
    }
    return true;
}

std::vector<int> Permutation::pi0_ranks() const {
    std::vector<int> r(top_rank_);
    for (auto& x : r) ++x;
    return r;
}

std::vector<int> Permutation::pi1_ranks() const {
    std::vector<int> r(bottom_rank_);
    for (auto& x : r) ++x;
    return r;
}

std::string Permutation::to_string() const {
    std::string s;
    for (Letter a : top_) s += letter_name(a) + " ";
    s += "/";
    for (Letter a : bottom_) s += " " + letter_name(a);
    return s;
}

std::size_t PermutationHash::operator()(const Permutation& p) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Letter a : p.top_row()) h = (h ^ static_cast<std::size_t>(a)) * 1099511628211ull;
    for (Letter a : p.bottom_row()) h = (h ^ static_cast<std::size_t>(a + 97)) * 1099511628211ull;
    return h;
}

}  // namespace ietskew
