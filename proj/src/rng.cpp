#include "dipolesim/rng.hpp"

#include <array>
#include <cmath>

#include "dipolesim/errors.hpp"
#include "dipolesim/kernels.hpp"

namespace dipolesim {

namespace {

constexpr std::uint64_t kLogFactTableSize = 171;  // 170! is the last finite one
constexpr double kHalfLn2Pi = 0.918938533204672741780329736406;  // ln(2*pi)/2

std::array<double, kLogFactTableSize> build_log_fact_table() {
  std::array<double, kLogFactTableSize> t{};
  t[0] = 0.0;
  for (std::uint64_t k = 1; k < kLogFactTableSize; ++k)
    t[k] = t[k - 1] + kernels::log_one(static_cast<double>(k));
  return t;
}

// Poisson(mean) for small mean: count uniform factors until the running
// product drops below exp(-mean).
std::uint64_t poisson_small(RngStream& rng, double mean) {
  double limit = kernels::exp_one(-mean);
  std::uint64_t k = 0;
  double prod = rng.next_uniform();
  while (prod > limit) {
    ++k;
    prod *= rng.next_uniform();
  }
  return k;
}

// Hormann's PTRS transformed rejection, valid for mean >= 10; we switch at 12.
std::uint64_t poisson_ptrs(RngStream& rng, double mean) {
  double log_mean = kernels::log_one(mean);
  double b = 0.931 + 2.53 * std::sqrt(mean);
  double a = -0.059 + 0.02483 * b;
  double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    double u = rng.next_uniform() - 0.5;
    double v = rng.next_uniform();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double lhs = kernels::log_one(v * invalpha / (a / (us * us) + b));
    double rhs = kf * log_mean - mean -
                 log_factorial(static_cast<std::uint64_t>(kf));
    if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
  }
}

}  // namespace

double log_factorial(std::uint64_t k) {
  static const std::array<double, kLogFactTableSize> table =
      build_log_fact_table();
  if (k < kLogFactTableSize) return table[k];
  // Stirling series; relative error < 1e-16 already at k ~ 20.
  double x = static_cast<double>(k) + 1.0;
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  double series = inv / 12.0 * (1.0 - inv2 / 30.0 * (1.0 - 2.0 * inv2 / 7.0));
  return (x - 0.5) * kernels::log_one(x) - x + kHalfLn2Pi + series;
}

std::uint64_t poisson_sample(RngStream& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw parameter_error("poisson_sample: mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  if (mean < 12.0) return poisson_small(rng, mean);
  return poisson_ptrs(rng, mean);
}

}  // namespace dipolesim
