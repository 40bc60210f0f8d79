#pragma once

// Polynomial log and sin/cos used by the Box-Muller transform. The scalar
// versions here and the AVX2 versions in src/kernels/avx2.cpp perform the
// same IEEE operations in the same order, so both produce identical bits.
// Builds must not contract a*b+c into FMA (-ffp-contract=off).

#include <bit>
#include <cstdint>

namespace mdp::fastmath {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kHalfPi = 1.57079632679489661923;

// 1/(2k+1), k = 0..11: log f = 2s * sum_k s^{2k}/(2k+1), s = (f-1)/(f+1).
inline constexpr double kLogCoeff[12] = {
    1.0,       1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,  1.0 / 11.0,
    1.0 / 13.0, 1.0 / 15.0, 1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0, 1.0 / 23.0};

// Taylor coefficients of sin(y)/y and cos(y) in y^2.
inline constexpr double kSinCoeff[9] = {
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
    1.0 / 355687428096000.0};
inline constexpr double kCosCoeff[9] = {
    1.0,
    -1.0 / 2.0,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40320.0,
    -1.0 / 3628800.0,
    1.0 / 479001600.0,
    -1.0 / 87178291200.0,
    1.0 / 20922789888000.0};

/// Natural log for finite x > 0 (normal range only).
inline double log(double x) noexcept {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const std::uint64_t biased = bits >> 52;
  // Same magic-number conversion as the vector path.
  double e = std::bit_cast<double>(biased | 0x4330000000000000ull) - 0x1p52;
  e = e - 1023.0;
  double f = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
  if (f > kSqrt2) {
    f = f * 0.5;
    e = e + 1.0;
  }
  const double s = (f - 1.0) / (f + 1.0);
  const double s2 = s * s;
  double poly = kLogCoeff[11];
  for (int k = 10; k >= 0; --k) poly = poly * s2 + kLogCoeff[k];
  return e * kLn2Hi + (e * kLn2Lo + 2.0 * s * poly);
}

/// sin(2*pi*u) and cos(2*pi*u) for u in [0, 1).
inline void sincos_2pi(double u, double& sin_out, double& cos_out) noexcept {
  const double v = 4.0 * u;
  double q = v + 0.5;
  q = static_cast<double>(static_cast<std::int64_t>(q));  // floor, q >= 0
  const double y = (v - q) * kHalfPi;
  const double y2 = y * y;
  double ps = kSinCoeff[8];
  double pc = kCosCoeff[8];
  for (int k = 7; k >= 0; --k) {
    ps = ps * y2 + kSinCoeff[k];
    pc = pc * y2 + kCosCoeff[k];
  }
  const double sy = y * ps;
  const double cy = pc;
  switch (static_cast<int>(q) & 3) {
    case 0: sin_out = sy;  cos_out = cy;  break;
    case 1: sin_out = cy;  cos_out = -sy; break;
    case 2: sin_out = -sy; cos_out = -cy; break;
    default: sin_out = -cy; cos_out = sy; break;
  }
}

/// Two independent standard normals from two uniforms on (0,1).
inline void box_muller(double u1, double u2, double& z0, double& z1) noexcept {
  double s, c;
  const double radius = __builtin_sqrt(-2.0 * log(u1));
  sincos_2pi(u2, s, c);
  z0 = radius * c;
  z1 = radius * s;
}

}  // namespace mdp::fastmath
