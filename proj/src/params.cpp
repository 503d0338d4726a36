#include "dipolesim/params.hpp"

#include <cmath>

#include "dipolesim/errors.hpp"
#include "dipolesim/kernels.hpp"

namespace dipolesim {

std::string solver_name(Solver s) {
  switch (s) {
    case Solver::tblas: return "tblas";
    case Solver::exact: return "exact";
    case Solver::greedy: return "greedy";
  }
  throw contract_error("solver_name: bad enum value");
}

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::pathloss: return "pathloss";
    case Mode::no_pathloss: return "no_pathloss";
  }
  throw contract_error("mode_name: bad enum value");
}

Solver parse_solver(const std::string& s) {
  if (s == "tblas") return Solver::tblas;
  if (s == "exact") return Solver::exact;
  if (s == "greedy") return Solver::greedy;
  throw parameter_error("unknown solver '" + s +
                        "' (expected tblas, exact, or greedy)");
}

Mode parse_mode(const std::string& s) {
  if (s == "pathloss") return Mode::pathloss;
  if (s == "no_pathloss") return Mode::no_pathloss;
  throw parameter_error("unknown mode '" + s +
                        "' (expected pathloss or no_pathloss)");
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw parameter_error(what);
}

}  // namespace

void NetworkParams::validate() const {
  require(std::isfinite(n) && n > 0.0, "n must be finite and > 0");
  require(std::isfinite(alpha) && alpha >= 2.0, "alpha must be >= 2");
  require(std::isfinite(power_w) && power_w > 0.0, "power_w must be > 0");
  require(std::isfinite(noise_var) && noise_var > 0.0,
          "noise_var must be > 0");
  require(std::isfinite(bandwidth_hz) && bandwidth_hz > 0.0,
          "bandwidth_hz must be > 0");
  require(std::isfinite(r_min) && r_min > 0.0, "r_min must be > 0");
  require(std::isfinite(gamma_exp) && gamma_exp > 0.0 && gamma_exp < 0.5,
          "gamma_exp must lie strictly inside (0, 0.5)");
  require(std::isfinite(mark_radius) && mark_radius > 0.0,
          "mark_radius must be > 0");
  require(std::isfinite(window_area) && window_area >= 1.0,
          "window_area must be >= 1");
}

double NetworkParams::window_radius() const {
  constexpr double kPi = 3.141592653589793;
  return std::sqrt(window_area / kPi);
}

double NetworkParams::h0() const { return gamma_exp * kernels::log_one(n); }

double NetworkParams::p0() const { return kernels::exp_one(-h0()); }

double NetworkParams::sinr_threshold() const {
  return std::expm1(r_min / bandwidth_hz);
}

}  // namespace dipolesim
