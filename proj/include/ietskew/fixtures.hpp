#pragma once

#include <vector>

#include "ietskew/iet.hpp"

namespace ietskew {

// "A B / B A": the only irreducible permutation on two letters.
Permutation two_interval_permutation();

// Rotation by alpha written as a 2-IET, lambda = (1 - alpha, alpha).
Iet rotation_iet(const Rational& alpha);

// 2-IET with lambda_A / lambda_B = [a0; a1, ..., ak], normalized.
Iet continued_fraction_iet(const std::vector<long>& digits);

// lambda = (phi - 1, 2 - phi). Not available in rational mode; use
// continued_fraction_iet with all digits 1 for exact truncations.
FloatIet golden_iet_float();
BigFloatIet golden_iet_bigfloat();

// Exact golden truncation with k unit digits: lengths F_{k+1}/F_{k+2}, F_k/F_{k+2}.
Iet golden_surrogate(int k = 1000);

}  // namespace ietskew
