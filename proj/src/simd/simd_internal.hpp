#pragma once

namespace kot::simd::detail {

// ln(DBL_MIN): below this exp() leaves the normal range and is flushed to 0.
inline constexpr double kExpMinArg = -708.3964185322641;
inline constexpr double kExpMaxArg = 709.782712893384;

}  // namespace kot::simd::detail
