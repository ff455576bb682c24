#include "ietskew/matrix.hpp"

#include <algorithm>

namespace ietskew {

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long>>& rows) {
    IntMatrix m(static_cast<int>(rows.size()));
    for (int r = 0; r < m.n_; ++r)
        for (int c = 0; c < m.n_; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return m;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(n_);
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

BigInt IntMatrix::entry_sum() const {
    BigInt s = 0;
    for (const BigInt& v : a_) s += v;
    return s;
}

BigInt IntMatrix::min_entry() const {
    BigInt m = a_.front();
    for (const BigInt& v : a_) m = std::min(m, v);
    return m;
}

BigInt IntMatrix::norm() const {
    BigInt best = 0;
    for (int c = 0; c < n_; ++c) {
        BigInt s = 0;
        for (int r = 0; r < n_; ++r) s += abs((*this)(r, c));
        best = std::max(best, s);
    }
    return best;
}

std::vector<BigInt> IntMatrix::column_sums() const {
    std::vector<BigInt> s(static_cast<std::size_t>(n_), BigInt(0));
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c) s[static_cast<std::size_t>(c)] += (*this)(r, c);
    return s;
}

// Bareiss fraction-free elimination.
BigInt IntMatrix::determinant() const {
    IntMatrix m = *this;
    BigInt prev = 1;
    int sign = 1;
    for (int k = 0; k < n_; ++k) {
        if (m(k, k) == 0) {
            int p = k + 1;
            while (p < n_ && m(p, k) == 0) ++p;
            if (p == n_) return 0;
            for (int c = 0; c < n_; ++c) std::swap(m(k, c), m(p, c));
            sign = -sign;
        }
        for (int i = k + 1; i < n_; ++i) {
            for (int j = k + 1; j < n_; ++j) {
                m(i, j) = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                m(i, j) /= prev;
            }
        }
        prev = m(k, k);
    }
    return sign * m(n_ - 1, n_ - 1);
}

void IntMatrix::add_column(int dst, int src) {
    for (int r = 0; r < n_; ++r) (*this)(r, dst) += (*this)(r, src);
}

void IntMatrix::subtract_row(int dst, int src) {
    for (int c = 0; c < n_; ++c) (*this)(dst, c) -= (*this)(src, c);
}

std::vector<std::vector<std::string>> IntMatrix::to_strings() const {
    std::vector<std::vector<std::string>> out(static_cast<std::size_t>(n_));
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c) out[static_cast<std::size_t>(r)].push_back((*this)(r, c).get_str());
    return out;
}

std::vector<double> IntMatrix::to_doubles() const {
    std::vector<double> out;
    out.reserve(a_.size());
    for (const BigInt& v : a_) out.push_back(v.get_d());
    return out;
}

IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
    const int n = x.n_;
    IntMatrix z(n);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < n; ++k) {
            if (x(r, k) == 0) continue;
            for (int c = 0; c < n; ++c) z(r, c) += x(r, k) * y(k, c);
        }
    return z;
}

}  // namespace ietskew
