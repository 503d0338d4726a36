#include "dipolesim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dipolesim/errors.hpp"

namespace dipolesim {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw config_error("config key '" + key + "' " + why);
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) bad_key(key, "must be a number");
  return v.get<double>();
}

std::uint64_t as_u64(const json& v, const std::string& key) {
  if (!v.is_number_unsigned()) bad_key(key, "must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) bad_key(key, "must be a string");
  return v.get<std::string>();
}

}  // namespace

Config default_config() { return Config{}; }

Config parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config root must be a JSON object");

  Config c;
  for (const auto& [key, value] : j.items()) {
    if (key == "n_grid") {
      if (!value.is_array() || value.empty())
        bad_key(key, "must be a nonempty array of intensities");
      c.sweep.n_grid.clear();
      for (const auto& e : value) {
        double n = as_double(e, key);
        if (!(n > 0.0)) bad_key(key, "entries must be > 0");
        c.sweep.n_grid.push_back(n);
      }
    } else if (key == "reps") {
      c.sweep.reps = as_u64(value, key);
      if (c.sweep.reps == 0) bad_key(key, "must be >= 1");
    } else if (key == "alpha") {
      c.params.alpha = as_double(value, key);
    } else if (key == "power_w") {
      c.params.power_w = as_double(value, key);
    } else if (key == "noise_var") {
      c.params.noise_var = as_double(value, key);
    } else if (key == "bandwidth_hz") {
      c.params.bandwidth_hz = as_double(value, key);
    } else if (key == "r_min") {
      c.params.r_min = as_double(value, key);
    } else if (key == "gamma_exp") {
      c.params.gamma_exp = as_double(value, key);
    } else if (key == "mark_radius") {
      c.params.mark_radius = as_double(value, key);
    } else if (key == "window_area") {
      c.params.window_area = as_double(value, key);
    } else if (key == "solver") {
      try {
        c.sweep.solver = parse_solver(as_string(value, key));
      } catch (const parameter_error& e) {
        bad_key(key, e.what());
      }
    } else if (key == "mode") {
      try {
        c.sweep.mode = parse_mode(as_string(value, key));
      } catch (const parameter_error& e) {
        bad_key(key, e.what());
      }
    } else if (key == "master_seed") {
      c.sweep.master_seed = as_u64(value, key);
    } else {
      throw config_error("unknown config key '" + key + "'");
    }
  }

  // Range-check the physical parameters with a representative intensity
  // (per-point n is set by the sweep, not the config).
  NetworkParams probe = c.params;
  probe.n = c.sweep.n_grid.front();
  try {
    probe.validate();
  } catch (const parameter_error& e) {
    throw config_error(e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_to_json(const Config& config) {
  json j;
  j["n_grid"] = config.sweep.n_grid;
  j["reps"] = config.sweep.reps;
  j["alpha"] = config.params.alpha;
  j["power_w"] = config.params.power_w;
  j["noise_var"] = config.params.noise_var;
  j["bandwidth_hz"] = config.params.bandwidth_hz;
  j["r_min"] = config.params.r_min;
  j["gamma_exp"] = config.params.gamma_exp;
  j["mark_radius"] = config.params.mark_radius;
  j["window_area"] = config.params.window_area;
  j["solver"] = solver_name(config.sweep.solver);
  j["mode"] = mode_name(config.sweep.mode);
  j["master_seed"] = config.sweep.master_seed;
  return j.dump(2) + "\n";
}

}  // namespace dipolesim
