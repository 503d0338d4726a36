#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

// Shared per-element algorithms and constants for every kernel backend.
// Both kernel translation units include this header and both are compiled
// with -ffp-contract=off; every fused step is an explicit std::fma (scalar)
// mirrored by a vfmadd lane (AVX2), so the two backends round identically.

namespace dipolesim::kernels::detail {

inline constexpr std::uint64_t kMantMask = 0x000FFFFFFFFFFFFFull;
// Bit pattern of sqrt(0.5); subtracting it splits the mantissa range at
// sqrt(2)/2 so the log reduction lands m in [sqrt(0.5), sqrt(2)).
inline constexpr std::uint64_t kLogOff = 0x3FE6A09E667F3BCDull;

inline constexpr double kLn2Hi = 0x1.62e42fee00000p-1;
inline constexpr double kLn2Lo = 0x1.a39ef35793c76p-33;
inline constexpr double kInvLn2 = 0x1.71547652b82fep+0;

// Odd atanh series: ln m = s * sum c_k w^k with s = (m-1)/(m+1), w = s^2.
// |s| <= 0.1716 here, so the omitted w^12 term is below 1e-19 relative.
inline constexpr double kLogC[12] = {
    2.0,        2.0 / 3.0,  2.0 / 5.0,  2.0 / 7.0,  2.0 / 9.0,  2.0 / 11.0,
    2.0 / 13.0, 2.0 / 15.0, 2.0 / 17.0, 2.0 / 19.0, 2.0 / 21.0, 2.0 / 23.0,
};

// exp Taylor tail coefficients 1/2! .. 1/13!; with |r| <= ln2/2 the omitted
// r^14/14! term is below 5e-18.
inline constexpr double kExpC[12] = {
    1.0 / 2.0,       1.0 / 6.0,         1.0 / 24.0,       1.0 / 120.0,
    1.0 / 720.0,     1.0 / 5040.0,      1.0 / 40320.0,    1.0 / 362880.0,
    1.0 / 3628800.0, 1.0 / 39916800.0,  1.0 / 479001600.0,
    1.0 / 6227020800.0,
};

// Round-to-nearest integer extraction magic: adding 1.5*2^52 leaves the
// integer in the low mantissa bits while the fp add performs the rounding.
inline constexpr double kExpShift = 0x1.8p52;
// exp(x) for x > kExpHi overflows; for x < kExpLo the result (< 3.4e-308)
// is flushed to 0 so the 2^k exponent scaling never leaves the normal range.
inline constexpr double kExpHi = 709.782712893384;
inline constexpr double kExpLo = -708.0;

inline constexpr double kTwoPowNeg52 = 0x1p-52;

inline double qnan() { return std::numeric_limits<double>::quiet_NaN(); }
inline double pinf() { return std::numeric_limits<double>::infinity(); }

inline double uniform_from_bits(std::uint64_t bits) {
  double m = static_cast<double>(bits >> 12);  // exact, < 2^52
  return (m + 0.5) * kTwoPowNeg52;             // both steps exact
}

inline double ulog(double x) {
  if (x != x) return qnan();
  if (x < 0.0) return qnan();
  if (x == 0.0) return -pinf();
  if (x == pinf()) return x;
  double adj = 0.0;
  if (x < 0x1p-1022) {  // subnormal: prescale into the normal range
    x *= 0x1p54;
    adj = -54.0;
  }
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  std::int64_t ix = static_cast<std::int64_t>(bits - kLogOff);
  std::int64_t e = ix >> 52;
  double m = std::bit_cast<double>(
      static_cast<std::uint64_t>(ix & static_cast<std::int64_t>(kMantMask)) +
      kLogOff);
  double ed = static_cast<double>(e) + adj;
  double s = (m - 1.0) / (m + 1.0);
  double w = s * s;
  double p = kLogC[11];
  for (int k = 10; k >= 0; --k) p = std::fma(p, w, kLogC[k]);
  double lnm = s * p;
  double t = std::fma(ed, kLn2Lo, lnm);
  return std::fma(ed, kLn2Hi, t);
}

inline double uexp(double x) {
  if (x != x) return qnan();
  double xc = x < kExpLo ? kExpLo : x;
  xc = xc > kExpHi ? kExpHi : xc;
  double t = std::fma(xc, kInvLn2, kExpShift);
  std::int64_t k = std::bit_cast<std::int64_t>(t) -
                   std::bit_cast<std::int64_t>(kExpShift);
  double kd = t - kExpShift;
  double r = std::fma(kd, -kLn2Hi, xc);
  r = std::fma(kd, -kLn2Lo, r);
  double p = kExpC[11];
  for (int i = 10; i >= 0; --i) p = std::fma(p, r, kExpC[i]);
  double tail = std::fma(p, r * r, r);
  double frac = 1.0 + tail;
  double res = std::bit_cast<double>(std::bit_cast<std::int64_t>(frac) +
                                     (k << 52));
  if (x > kExpHi) return pinf();
  if (x < kExpLo) return 0.0;
  return res;
}

inline double uexp1(std::uint64_t bits) {
  return -ulog(uniform_from_bits(bits));
}

inline double upareto(std::uint64_t gbits, std::uint64_t dbits, double alpha) {
  double lg = ulog(uniform_from_bits(gbits));
  double ld = ulog(uniform_from_bits(dbits));
  double s = ld * (alpha * -0.5);
  return -lg * uexp(s);
}

inline double ugain_at(std::uint64_t gbits, double d2, double alpha) {
  double lg = ulog(uniform_from_bits(gbits));
  double ld = ulog(d2);
  double s = ld * (alpha * -0.5);
  return -lg * uexp(s);
}

}  // namespace dipolesim::kernels::detail
