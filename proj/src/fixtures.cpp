#include "ietskew/fixtures.hpp"

#include <cmath>

#include "ietskew/error.hpp"

namespace ietskew {

Permutation two_interval_permutation() { return Permutation::from_rows({0, 1}, {1, 0}); }

Iet rotation_iet(const Rational& alpha) {
    if (!(alpha > 0 && alpha < 1)) fail(ErrorCode::NonPositiveLength, "rotation number must lie in (0,1)");
    return Iet(two_interval_permutation(), {Rational(1 - alpha), alpha});
}

Iet continued_fraction_iet(const std::vector<long>& digits) {
    if (digits.empty()) fail(ErrorCode::BadConfig, "empty continued fraction");
    Rational r = digits.back();
    for (std::size_t i = digits.size() - 1; i-- > 0;) {
        r = 1 / r;
        r += digits[i];
    }
    return Iet(two_interval_permutation(), {r, Rational(1)}, {.normalize = true});
}

FloatIet golden_iet_float() {
    const double phi = (1 + std::sqrt(5.0)) / 2;
    return FloatIet(two_interval_permutation(), {phi - 1, 2 - phi});
}

BigFloatIet golden_iet_bigfloat() {
    const BigFloat phi = (1 + sqrt(BigFloat(5))) / 2;
    return BigFloatIet(two_interval_permutation(), {BigFloat(phi - 1), BigFloat(2 - phi)});
}

Iet golden_surrogate(int k) { return continued_fraction_iet(std::vector<long>(static_cast<std::size_t>(k), 1)); }

}  // namespace ietskew
