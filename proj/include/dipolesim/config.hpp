#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dipolesim/params.hpp"

namespace dipolesim {

struct SweepSettings {
  std::vector<double> n_grid = {100, 200, 300, 400, 500,
                                600, 700, 800, 900, 1000};
  std::uint64_t reps = 100;
  Solver solver = Solver::greedy;
  Mode mode = Mode::pathloss;
  std::uint64_t master_seed = 1;
  // CLI-only switch (not a config key): pin every replication to exactly this
  // many dipoles instead of drawing the count from Poisson(n * window_area).
  std::optional<std::uint64_t> fixed_count;
};

struct Config {
  NetworkParams params;  // params.n is taken per sweep point from n_grid
  SweepSettings sweep;
};

Config default_config();

// JSON object with keys {n_grid, reps, alpha, power_w, noise_var,
// bandwidth_hz, r_min, gamma_exp, mark_radius, window_area, solver, mode,
// master_seed}; every key optional, unknown keys rejected by name, malformed
// values rejected naming the key (config_error).
Config parse_config_json(const std::string& text);
Config load_config(const std::string& path);  // io_error when unreadable

// Round-trippable echo of a resolved config (run_meta output).
std::string config_to_json(const Config& config);

}  // namespace dipolesim
