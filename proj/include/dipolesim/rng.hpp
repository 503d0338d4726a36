#pragma once

#include <cstdint>
#include <random>

#include "dipolesim/kernels.hpp"

// Randomness architecture. Two kinds of source, one conversion path:
//
//  * Keyed counter streams (splitmix64 finalizer): every field coordinate,
//    direct gain, and cross gain is a pure function of (seed, tags, indices).
//    Random access by construction, so a lazily queried gain and a
//    materialized one are the same number, and evaluation order or thread
//    schedule cannot change a sample.
//  * Sequential streams (mt19937_64): bulk i.i.d. draws for the statistical
//    checkers. The raw 64-bit output sequence of mt19937_64 is pinned by the
//    C++ standard, so it is portable across implementations.
//
// All bit->double conversion goes through kernels (never libstdc++
// distributions, which are implementation-defined).

namespace dipolesim {

// Stream tags: one per purpose so derived keys never collide.
enum : std::uint64_t {
  kTagField = 1,
  kTagChannel = 2,
  kTagCount = 3,
  kTagPosition = 4,
  kTagMark = 5,
  kTagDirect = 6,
  kTagCross = 7,
  kTagTask = 8,
  kTagCheck = 9,
};

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t sm_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// i-th element of the keyed counter stream.
constexpr std::uint64_t hash_at(std::uint64_t key, std::uint64_t i) {
  return sm_finalize(key + (i + 1) * kGolden);
}

// Absorb words into a key, order-sensitive.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t a) {
  key = sm_finalize(key + kGolden);
  return sm_finalize(key ^ a);
}
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t a,
                               std::uint64_t b) {
  return derive(derive(key, a), b);
}
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t a,
                               std::uint64_t b, std::uint64_t c) {
  return derive(derive(key, a, b), c);
}

// Sequential walk over a keyed counter stream; used where a variable number
// of words is consumed (rejection sampling).
class HashStream {
 public:
  explicit HashStream(std::uint64_t key) : key_(key) {}
  std::uint64_t next_bits() { return hash_at(key_, ctr_++); }
  double next_uniform() { return kernels::to_uniform_one(next_bits()); }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

// Sequential stream for bulk i.i.d. sampling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_bits() { return eng_(); }
  void fill_bits(std::uint64_t* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = eng_();
  }
  double next_uniform() { return kernels::to_uniform_one(next_bits()); }
  double next_exp1() { return kernels::exp1_one(next_bits()); }

 private:
  std::mt19937_64 eng_;
};

// Poisson variate. Own implementation (inversion by uniform products below
// mean 12, Hormann's PTRS transformed rejection above) so that samples do not
// depend on the standard library in use. Mean must be finite and >= 0.
std::uint64_t poisson_sample(RngStream& rng, double mean);

// ln(k!), exact table for small k, Stirling series beyond; evaluated with the
// bit-pinned kernel log so sampler accept/reject decisions are reproducible.
double log_factorial(std::uint64_t k);

}  // namespace dipolesim
