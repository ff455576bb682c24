#pragma once

#include <string>
#include <vector>

#include "ietskew/scalar.hpp"

namespace ietskew {

// Square matrix of big integers, row-major.
class IntMatrix {
public:
    IntMatrix() = default;
    explicit IntMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {}
    static IntMatrix identity(int n);
    static IntMatrix from_rows(const std::vector<std::vector<long>>& rows);

    int size() const { return n_; }
    BigInt& operator()(int r, int c) { return a_[at(r, c)]; }
    const BigInt& operator()(int r, int c) const { return a_[at(r, c)]; }

    IntMatrix transpose() const;
    BigInt entry_sum() const;
    BigInt min_entry() const;
    bool positive() const { return min_entry() >= 1; }
    bool nonnegative() const { return min_entry() >= 0; }
    // Operator norm induced by the l1 vector norm: the largest absolute column sum.
    BigInt norm() const;
    std::vector<BigInt> column_sums() const;
    BigInt determinant() const;

    // In-place elementary updates used by the induction.
    void add_column(int dst, int src);
    void subtract_row(int dst, int src);

    template <typename T>
    std::vector<T> apply(const std::vector<T>& v) const {
        std::vector<T> out(static_cast<std::size_t>(n_), T(0));
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c) out[static_cast<std::size_t>(r)] += T((*this)(r, c)) * v[static_cast<std::size_t>(c)];
        return out;
    }

    std::vector<std::vector<std::string>> to_strings() const;
    std::vector<double> to_doubles() const;

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y);
    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
    std::size_t at(int r, int c) const { return static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c); }
    int n_ = 0;
    std::vector<BigInt> a_;
};

}  // namespace ietskew
