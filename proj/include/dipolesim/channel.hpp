#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dipolesim/field.hpp"
#include "dipolesim/params.hpp"
#include "dipolesim/rng.hpp"

namespace dipolesim {

// Gains for one field realization. All gains are power gains.
//   direct[i]  fading gain of link i's own channel, exp(1), distance ignored
//   cross      sparse matrix over ordered pairs: entry (i, j) is the gain of
//              interfering transmitter j at receiver i, g * D^(-alpha) with
//              D = |t_j - r_i|, stored only where D <= 1 (pathloss mode) or
//              for every ordered pair (no-pathloss mode, i.i.d. exp(1))
// CSR layout: row i's entries are col/gain[row_begin[i] .. row_begin[i+1]),
// column indices ascending within a row.
struct ChannelRealization {
  std::vector<double> direct;
  std::vector<std::uint64_t> row_begin;
  std::vector<std::uint32_t> col;
  std::vector<double> gain;
  double alpha = 0.0;

  std::size_t size() const { return direct.size(); }
  std::size_t cross_size() const { return gain.size(); }
  // Gain of transmitter j at receiver i; 0 when no entry (out of range).
  double cross_at(std::uint32_t i, std::uint32_t j) const;
  std::span<const std::uint32_t> row_cols(std::uint32_t i) const;
  std::span<const double> row_gains(std::uint32_t i) const;
};

// Heavy-tail characterization of the interference gain law: the survival
// function is sandwiched between c2*z^(-beta) and c1*z^(-beta) for z >= b,
// with beta = 2/alpha.
struct TailLaw {
  double alpha = 0.0;
  double beta = 0.0;
  double c1 = 0.0;  // limit of z^beta * survival(z) as z grows
  double c2 = 0.0;  // value at the cutoff b, the band's lower edge
  double b = 1.0;
};

TailLaw make_tail_law(double alpha, double b = 1.0);

// exp(1) fading draw for a direct link.
double sample_direct_gain(RngStream& rng);

// One interference gain g * D^(-alpha), g ~ exp(1), D with density 2u on
// [0,1] (distance of a uniform point in the unit-area disc, rescaled).
// alpha < 2 is a parameter_error.
double sample_interference_gain(double alpha, RngStream& rng);

// Survival function of the interference gain: 2 * integral_0^1 u*exp(-z u^alpha) du,
// absolute accuracy 1e-10 (incomplete-gamma evaluation). z < 0 is a
// parameter_error.
double tail_probability(double z, double alpha);

// z^(2/alpha) * tail_probability(z, alpha) per grid point; converges upward
// to (2/alpha)*Gamma(2/alpha). Empty grid is a parameter_error.
std::vector<double> tail_exponent_plateau(double alpha,
                                          const std::vector<double>& z_grid);

// Pay-per-query view of one channel realization. Every gain is a pure
// function of (seed, i, j), so querying lazily here and materializing with
// realize_channel produce identical numbers; this view exists because a
// materialized cross matrix is quadratic in the dipole count while solvers
// only touch candidate-member pairs.
class GainField {
 public:
  GainField(const DipoleField& field, const NetworkParams& params,
            std::uint64_t seed, Mode mode);

  double direct(std::uint32_t i) const;
  // Gain of transmitter j at receiver i (0 beyond the unit-distance cutoff
  // in pathloss mode; never 0 in no-pathloss mode). i == j is a contract
  // violation handled as 0.
  double cross(std::uint32_t i, std::uint32_t j) const;
  std::uint32_t size() const { return static_cast<std::uint32_t>(field_->dipoles.size()); }
  Mode mode() const { return mode_; }
  const DipoleField& field() const { return *field_; }
  const NetworkParams& params() const { return *params_; }

 private:
  const DipoleField* field_;
  const NetworkParams* params_;
  std::uint64_t channel_key_;
  double alpha_;
  Mode mode_;
};

// Materialize the full gain set for a field: one direct gain per dipole plus
// every in-range ordered cross pair. Identical samples to GainField queries
// with the same seed. No-pathloss mode stores all N(N-1) ordered pairs, so
// keep it to small fields there.
ChannelRealization realize_channel(const DipoleField& field,
                                   const NetworkParams& params,
                                   std::uint64_t seed,
                                   Mode mode = Mode::pathloss);

// Direct gains only, same values realize_channel would produce.
std::vector<double> realize_direct(const DipoleField& field,
                                   std::uint64_t seed);

}  // namespace dipolesim
