#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dipolesim/params.hpp"

namespace dipolesim {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// One transmitter-receiver pair. tx = rx + W with W uniform on a disc of
// radius params.mark_radius.
struct Dipole {
  std::uint32_t index = 0;
  Point2 tx;
  Point2 rx;
};

// One realization of the marked Poisson field on a disc window centered at
// the origin. Receivers are inside the window; a transmitter may stick out by
// at most mark_radius (membership is decided by the receiver). Immutable
// after construction.
struct DipoleField {
  std::vector<Dipole> dipoles;
  double intensity = 0.0;      // n
  double region_radius = 0.0;  // window radius
  std::uint64_t seed = 0;
};

// Total count ~ Poisson(n * window_area), positions i.i.d. uniform on the
// window, marks i.i.d. uniform on the mark disc. Pure function of
// (params, seed): same inputs, bit-identical field.
DipoleField sample_field(const NetworkParams& params, std::uint64_t seed);

// Diagnostic variant with the count forced to `count` instead of drawn
// Poisson; coordinates use the same per-index streams as sample_field.
DipoleField sample_field_fixed_count(const NetworkParams& params,
                                     std::uint64_t seed, std::uint64_t count);

// Indices i != j whose transmitter lies within the unit-area disc around
// receiver j, i.e. |t_i - r_j| <= 1/sqrt(pi).
std::vector<std::uint32_t> neighborhood(const DipoleField& field,
                                        std::uint32_t j);

// Euclidean distance |t_i - r_j| (transmitter of i to receiver of j).
double pair_distance(const DipoleField& field, std::uint32_t i,
                     std::uint32_t j);

// CSV dump: header "index,tx_x,tx_y,rx_x,rx_y", one row per dipole, LF line
// endings, shortest round-trip float formatting.
void write_field_csv(const DipoleField& field, std::ostream& os);

}  // namespace dipolesim
