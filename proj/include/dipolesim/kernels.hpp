#pragma once

#include <cstddef>
#include <cstdint>

// Batch numeric kernels with interchangeable backends (scalar reference,
// AVX2). Every backend computes bit-identical results: the scalar code
// mirrors the vector algorithms operation for operation (explicit fma,
// pinned reduction order, shared polynomial constants), and the kernel
// translation units are built with -ffp-contract=off so the compiler cannot
// re-fuse what the code spells out. This is what makes simulation output
// independent of the machine the binary happens to run on.

namespace dipolesim::kernels {

struct Backend {
  const char* name;

  // bits -> uniform double strictly inside (0,1): u = (m + 0.5) * 2^-52
  // where m is the top 52 bits.
  void (*to_uniform)(const std::uint64_t* bits, double* u, std::size_t n);

  // bits -> standard exponential variate -ln(u).
  void (*exp1)(const std::uint64_t* bits, double* x, std::size_t n);

  // Interference gain from two bit streams: (-ln u_g) * u_d^(-alpha/2).
  // u_d^(-alpha/2) is the power gain at distance sqrt(u_d), the conditional
  // distance law inside the unit-area query disc.
  void (*pareto_gain)(const std::uint64_t* gbits, const std::uint64_t* dbits,
                      double alpha, double* out, std::size_t n);

  // Gain at known squared distance: (-ln u_g) * (d2)^(-alpha/2).
  void (*gain_at)(const std::uint64_t* gbits, const double* d2, double alpha,
                  double* out, std::size_t n);

  // Natural log / exp, ~2 ulp, bit-pinned algorithm (see kernels_scalar.cpp).
  void (*vlog)(const double* x, double* y, std::size_t n);
  void (*vexp)(const double* x, double* y, std::size_t n);

  // Reductions. sum and masked_sum use four striped accumulators combined as
  // (l0+l1)+(l2+l3) so the scalar and vector rounding histories coincide.
  double (*sum)(const double* x, std::size_t n);
  double (*masked_sum)(const double* x, const double* u, double p,
                       std::size_t n);  // sum of x[i] where u[i] < p
  std::size_t (*count_greater)(const double* x, double t, std::size_t n);
  double (*max_value)(const double* x, std::size_t n);  // n >= 1, no NaNs

  // d2[i] = (ax[i]-bx)^2 + (ay[i]-by)^2, no fma by design.
  void (*sq_dist)(const double* ax, const double* ay, double bx, double by,
                  double* d2, std::size_t n);
};

// Active backend. Chosen once at first use: AVX2 when the CPU supports it,
// scalar otherwise. Env DIPOLESIM_KERNELS in {auto, scalar, avx2} overrides;
// requesting avx2 on unsupported hardware aborts with a message.
const Backend& backend();
const Backend& scalar_backend();
const Backend* avx2_backend();  // nullptr when the CPU lacks AVX2+FMA

// Scalar one-shot forms, bit-identical to the batch kernels on length-1
// input. Used by pay-per-query gain evaluation and the samplers.
double to_uniform_one(std::uint64_t bits);
double log_one(double x);
double exp_one(double x);
double exp1_one(std::uint64_t bits);
double pareto_gain_one(std::uint64_t gbits, std::uint64_t dbits, double alpha);
double gain_at_one(std::uint64_t gbits, double d2, double alpha);

}  // namespace dipolesim::kernels
