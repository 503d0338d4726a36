#pragma once

#include <cstdint>
#include <string>

namespace dipolesim {

enum class Solver { tblas, exact, greedy };
enum class Mode { pathloss, no_pathloss };

std::string solver_name(Solver s);
std::string mode_name(Mode m);
Solver parse_solver(const std::string& s);  // parameter_error on bad name
Mode parse_mode(const std::string& s);

// Physical and asymptotic parameters for one experiment.
//   n            expected dipole count per unit area (process intensity)
//   alpha        path-loss exponent, >= 2
//   power_w      transmit power P in watts
//   noise_var    receiver noise variance sigma^2
//   bandwidth_hz bandwidth B; rates are B*ln(1+SINR), so the rate unit is
//                nats/s (natural log kept deliberately)
//   r_min        minimum acceptable rate, same unit as bandwidth_hz*ln(...)
//   gamma_exp    activation threshold exponent, in (0, 1/2) strictly;
//                threshold h0 = gamma_exp * ln n
//   mark_radius  transmitter displacement radius around its receiver
//   window_area  observation window area in unit areas, >= 1 (disc window)
struct NetworkParams {
  double n = 0.0;
  double alpha = 3.0;
  double power_w = 0.032;
  double noise_var = 0.01;
  double bandwidth_hz = 22e6;
  double r_min = 1e5;
  double gamma_exp = 0.45;
  double mark_radius = 0.01;
  double window_area = 4.0;

  // Throws parameter_error naming the offending field.
  void validate() const;

  double window_radius() const;          // sqrt(window_area / pi)
  double h0() const;                     // gamma_exp * ln n (needs n > 1)
  double p0() const;                     // n^(-gamma_exp)
  double sinr_threshold() const;         // e^(r_min/bandwidth) - 1
};

// Radius of the disc of unit area, 1/sqrt(pi).
inline constexpr double kUnitAreaDiscRadius = 0.5641895835477563;

}  // namespace dipolesim
