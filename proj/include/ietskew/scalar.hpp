#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ietskew {

using Rational = mpq_class;
using BigInt = mpz_class;
// Binary floating point with a process-wide precision (see set_bigfloat_precision).
using BigFloat = mpf_class;

enum class ScalarMode { Rational, Float, BigFloat };

std::string_view to_string(ScalarMode mode) noexcept;
ScalarMode parse_scalar_mode(std::string_view text);

// Precision in bits for BigFloat values created afterwards.
void set_bigfloat_precision(unsigned long bits);
unsigned long bigfloat_precision();

// Parses "p/q", integers and decimal literals ("0.125", "1e-3") exactly.
Rational parse_rational(std::string_view text);
std::string rational_to_string(const Rational& q);

template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr ScalarMode mode = ScalarMode::Rational;
    static constexpr bool exact = true;
    static Rational from_rational(const Rational& q) { return q; }
    static Rational to_rational(const Rational& q) { return q; }
    static double to_double(const Rational& q) { return q.get_d(); }
    static Rational from_double(double v) { return Rational(v); }
    static Rational parse(std::string_view text) { return parse_rational(text); }
    static std::string format(const Rational& q) { return rational_to_string(q); }
    static Rational abs(const Rational& q) { return ::abs(q); }
};

template <>
struct ScalarTraits<double> {
    static constexpr ScalarMode mode = ScalarMode::Float;
    static constexpr bool exact = false;
    static double from_rational(const Rational& q) { return q.get_d(); }
    static Rational to_rational(double v) { return Rational(v); }
    static double to_double(double v) { return v; }
    static double from_double(double v) { return v; }
    static double parse(std::string_view text);
    static std::string format(double v);
    static double abs(double v) { return std::fabs(v); }
};

template <>
struct ScalarTraits<BigFloat> {
    static constexpr ScalarMode mode = ScalarMode::BigFloat;
    static constexpr bool exact = false;
    static BigFloat from_rational(const Rational& q) { return BigFloat(q); }
    static Rational to_rational(const BigFloat& v) { return Rational(v); }
    static double to_double(const BigFloat& v) { return v.get_d(); }
    static BigFloat from_double(double v) { return BigFloat(v); }
    static BigFloat parse(std::string_view text);
    static std::string format(const BigFloat& v);
    static BigFloat abs(const BigFloat& v) { return ::abs(v); }
};

template <typename S>
concept Scalar = requires { ScalarTraits<S>::mode; };

// Half-open interval [left, right).
template <typename S>
struct Interval {
    S left;
    S right;

    S length() const { return S(right - left); }
    bool contains(const S& x) const { return left <= x && x < right; }
};

// Natural logarithms of big values that overflow double.
double log_of(const BigInt& v);
double log_of(const Rational& v);

// Default relative tolerance for float-mode equality and domain checks.
inline constexpr double kFloatTolerance = 1e-12;

}  // namespace ietskew
