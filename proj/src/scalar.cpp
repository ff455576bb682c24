#include "ietskew/scalar.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "ietskew/error.hpp"

namespace ietskew {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

BigInt parse_integer(std::string_view s) {
    if (s.empty()) fail(ErrorCode::ParseError, "empty integer");
    BigInt z;
    if (z.set_str(std::string(s), 10) != 0) fail(ErrorCode::ParseError, "bad integer '" + std::string(s) + "'");
    return z;
}

// Decimal literal with optional fraction and exponent, converted exactly.
Rational parse_decimal(std::string_view s) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_text = s.substr(e + 1);
        if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (ec != std::errc() || ptr != exp_text.data() + exp_text.size())
            fail(ErrorCode::ParseError, "bad exponent in '" + std::string(s) + "'");
        s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
        exponent -= static_cast<long>(s.size() - dot - 1);
    } else {
        digits = std::string(s);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        fail(ErrorCode::ParseError, "bad decimal literal '" + std::string(s) + "'");
    Rational q(parse_integer(digits));
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    if (exponent < 0)
        q /= scale;
    else
        q *= scale;
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

}  // namespace

std::string_view to_string(ScalarMode mode) noexcept {
    switch (mode) {
    case ScalarMode::Rational: return "rational";
    case ScalarMode::Float: return "float";
    case ScalarMode::BigFloat: return "bigfloat";
    }
    return "rational";
}

ScalarMode parse_scalar_mode(std::string_view text) {
    if (text == "rational") return ScalarMode::Rational;
    if (text == "float") return ScalarMode::Float;
    if (text == "bigfloat") return ScalarMode::BigFloat;
    fail(ErrorCode::ParseError, "unknown arithmetic mode '" + std::string(text) + "'");
}

void set_bigfloat_precision(unsigned long bits) { mpf_set_default_prec(bits); }
unsigned long bigfloat_precision() { return mpf_get_default_prec(); }

Rational parse_rational(std::string_view text) {
    text = trim(text);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(trim(text.substr(0, slash)));
        Rational den = parse_decimal(trim(text.substr(slash + 1)));
        if (den == 0) fail(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
        Rational q = num / den;
        q.canonicalize();
        return q;
    }
    return parse_decimal(text);
}

std::string rational_to_string(const Rational& q) { return q.get_str(10); }

double ScalarTraits<double>::parse(std::string_view text) {
    text = trim(text);
    if (text.find('/') != std::string_view::npos) return parse_rational(text).get_d();
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail(ErrorCode::ParseError, "bad float literal '" + std::string(text) + "'");
    return v;
}

std::string ScalarTraits<double>::format(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

BigFloat ScalarTraits<BigFloat>::parse(std::string_view text) {
    return BigFloat(parse_rational(text));
}

std::string ScalarTraits<BigFloat>::format(const BigFloat& v) {
    // Enough decimal digits to round-trip the binary precision.
    auto digits = static_cast<std::size_t>(static_cast<double>(v.get_prec()) * 0.30103) + 2;
    std::ostringstream out;
    out.precision(static_cast<std::streamsize>(digits));
    out << v;
    return out.str();
}

double log_of(const BigInt& v) {
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
    return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

double log_of(const Rational& v) { return log_of(BigInt(v.get_num())) - log_of(BigInt(v.get_den())); }

}  // namespace ietskew
