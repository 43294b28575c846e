#pragma once

// Shared constants for the kernel exponential (Cody-Waite reduction followed
// by a degree-13 Taylor polynomial on |r| <= ln2/2).

namespace sbs::kernels::detail {

inline constexpr double kLog2e = 1.4426950408889634074;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kExpMin = -708.0;
inline constexpr double kExpMax = 709.0;
inline constexpr double kRateConstant = 2.996;

// 1/k! for k = 13 down to 2.
inline constexpr double kInvFact[] = {
    1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
    1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
    1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        1.0 / 2.0,
};

}  // namespace sbs::kernels::detail
