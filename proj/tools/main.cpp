#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dipolesim/activation.hpp"
#include "dipolesim/asymptotics.hpp"
#include "dipolesim/channel.hpp"
#include "dipolesim/config.hpp"
#include "dipolesim/errors.hpp"
#include "dipolesim/field.hpp"
#include "dipolesim/fitting.hpp"
#include "dipolesim/plot.hpp"
#include "dipolesim/records.hpp"
#include "dipolesim/sweep.hpp"

namespace {

using namespace dipolesim;

// Exit codes: 0 success, 1 usage/config error, 2 runtime error, 3 a checker
// ran cleanly but its verdict is fail.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerdictFail = 3;

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("DIPOLESIM_SEED");
  if (s == nullptr) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (errno != 0 || end == s || *end != '\0')
    throw config_error("DIPOLESIM_SEED must be an unsigned integer");
  return static_cast<std::uint64_t>(v);
}

// Flag wins over the environment; the environment wins over the fallback
// (config value or subcommand default).
std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value,
                           std::uint64_t fallback) {
  if (flag_given) return flag_value;
  if (auto e = env_seed()) return *e;
  return fallback;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out.flush()) throw io_error("failed writing '" + path.string() + "'");
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
  std::filesystem::path p(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw io_error("cannot create output directory '" + out_dir + "'");
  return p;
}

std::vector<ExperimentRecord> read_records_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read records file '" + path + "'");
  return read_records_csv(in);
}

int finish_report(const LimitTestReport& rep, const std::string& out_dir) {
  std::string json_text = report_to_json(rep);
  std::fputs(json_text.c_str(), stdout);
  std::filesystem::path dir = prepare_out_dir(out_dir);
  write_text_file(dir / (rep.test_name + ".json"), json_text);
  std::ofstream csv(dir / (rep.test_name + ".csv"), std::ios::binary);
  if (!csv) throw io_error("cannot write checker CSV in '" + out_dir + "'");
  report_to_csv(rep, csv);
  return rep.pass ? kExitOk : kExitVerdictFail;
}

void write_records_csv_file(const std::filesystem::path& path,
                            const std::vector<ExperimentRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path.string() + "'");
  write_records_csv(records, out);
  if (!out.flush()) throw io_error("failed writing '" + path.string() + "'");
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 bool seed_given, std::uint64_t seed_value, unsigned workers,
                 std::optional<std::uint64_t> fixed_count) {
  Config cfg = config_path.empty() ? default_config() : load_config(config_path);
  cfg.sweep.master_seed =
      resolve_seed(seed_given, seed_value, cfg.sweep.master_seed);
  cfg.sweep.fixed_count = fixed_count;

  std::filesystem::path dir = prepare_out_dir(out_dir);
  std::filesystem::path partial = dir / "records.partial.csv";
  std::ofstream stream(partial, std::ios::binary);
  if (!stream) throw io_error("cannot write '" + partial.string() + "'");
  stream << kRecordsCsvHeader << '\n';

  std::vector<ExperimentRecord> records;
  try {
    records = run_sweep(cfg.params, cfg.sweep, workers,
                        [&stream](const ExperimentRecord& r) {
                          stream << record_to_csv_line(r) << '\n';
                          stream.flush();
                        });
  } catch (...) {
    std::fprintf(stderr, "sweep aborted; partial results preserved at %s\n",
                 partial.string().c_str());
    throw;
  }

  write_records_csv_file(dir / "records.csv", records);
  stream.close();
  std::error_code ec;
  std::filesystem::remove(partial, ec);

  nlohmann::json meta;
  meta["config"] = nlohmann::json::parse(config_to_json(cfg));
  meta["workers"] = workers;
  if (fixed_count.has_value())
    meta["fixed_count"] = *fixed_count;
  else
    meta["fixed_count"] = nullptr;
  meta["records"] = records.size();
  write_text_file(dir / "run_meta.json", meta.dump(2) + "\n");

  std::fprintf(stdout, "wrote %zu records to %s\n", records.size(),
               (dir / "records.csv").string().c_str());
  return kExitOk;
}

int run_activate(const std::string& config_path, bool seed_given,
                 std::uint64_t seed_value, const std::string& solver_name) {
  Config cfg = config_path.empty() ? default_config() : load_config(config_path);
  if (!solver_name.empty()) cfg.sweep.solver = parse_solver(solver_name);
  std::uint64_t seed =
      resolve_seed(seed_given, seed_value, cfg.sweep.master_seed);
  NetworkParams params = cfg.params;
  params.n = cfg.sweep.n_grid.front();
  params.validate();

  DipoleField field = sample_field(params, seed);
  ActivationResult res;
  if (cfg.sweep.solver == Solver::exact) {
    res = max_active_exact(realize_channel(field, params, seed, cfg.sweep.mode),
                           params);
  } else {
    GainField gains(field, params, seed, cfg.sweep.mode);
    res = cfg.sweep.solver == Solver::tblas ? tblas_activate(gains, params)
                                            : max_active_greedy(gains, params);
  }

  double min_rate = 0.0;
  bool first = true;
  for (std::uint32_t i : res.active_set) {
    double r = res.rates.at(i);
    min_rate = first ? r : std::min(min_rate, r);
    first = false;
  }
  nlohmann::json j;
  j["h0"] = res.h0;
  j["p0"] = res.p0;
  j["m_n"] = res.m_n;
  j["eta_n"] = res.eta_n;
  j["active_indices"] = res.active_set;
  j["min_active_rate"] = min_rate;
  std::fputs((j.dump(2) + "\n").c_str(), stdout);
  return kExitOk;
}

// Smallest x with m * tail_probability(x, alpha) <= target, by bisection on
// the monotone tail.
double solve_jump_threshold(std::uint64_t m, double alpha, double target) {
  double md = static_cast<double>(m);
  double hi = 1.0;
  int guard = 0;
  while (md * tail_probability(hi, alpha) > target) {
    hi *= 10.0;
    if (++guard > 40)
      throw parameter_error("bigjump-test: cannot reach the target regime");
  }
  double lo = hi / 10.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (md * tail_probability(mid, alpha) > target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SINR dipole network simulator: Monte Carlo activation "
               "experiments, scaling fits, and limit-law checkers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string records_path;
  std::string fit_path;
  std::uint64_t seed_value = 1;
  unsigned workers = 0;
  std::uint64_t fixed_count_value = 0;

  auto* sim = app.add_subcommand(
      "simulate", "run the sweep and write records.csv + run_meta.json");
  sim->add_option("--config", config_path, "JSON config file");
  sim->add_option("--out", out_dir, "output directory");
  auto* sim_seed = sim->add_option("--seed", seed_value,
                                   "master seed (overrides config and env)");
  sim->add_option("--workers", workers, "worker threads (0 = hardware)");
  auto* sim_fixed =
      sim->add_option("--fixed-count", fixed_count_value,
                      "pin the dipole count instead of drawing Poisson");

  auto* fit_cmd =
      app.add_subcommand("fit", "fit mean counts to c1 + a*n^b from a CSV");
  fit_cmd->add_option("--records", records_path, "records CSV to fit")
      ->required();
  fit_cmd->add_option("--out", out_dir, "output directory");
  double fix_exponent_value = 0.25;
  auto* fit_fix = fit_cmd->add_option("--fix-exponent", fix_exponent_value,
                                      "pin the exponent b");

  auto* plot_cmd = app.add_subcommand(
      "plot", "render the scatter (and fit curve, when given) as SVG");
  plot_cmd->add_option("--records", records_path, "records CSV to draw")
      ->required();
  plot_cmd->add_option("--fit", fit_path, "fit JSON to overlay");
  plot_cmd->add_option("--out", out_dir, "output directory");

  auto* tail_cmd = app.add_subcommand(
      "tail-eval", "print the interference-gain survival probability");
  double tail_z = 1.0;
  double alpha = 3.0;
  tail_cmd->add_option("--z", tail_z, "threshold z")->required();
  tail_cmd->add_option("--alpha", alpha, "path-loss exponent");

  auto* slln_cmd = app.add_subcommand(
      "slln-test", "strong-law decay check for scaled heavy-tailed sums");
  double p_order = 0.5;
  std::vector<std::uint64_t> slln_sizes = {1000, 10000, 100000, 1000000};
  std::uint64_t reps = 100;
  bool poisson_index = false;
  slln_cmd->add_option("--p", p_order, "moment order in (0, 2/alpha)");
  slln_cmd->add_option("--alpha", alpha, "path-loss exponent");
  slln_cmd->add_option("--sizes", slln_sizes, "summand counts")
      ->delimiter(',');
  slln_cmd->add_option("--reps", reps, "replications per size");
  slln_cmd->add_flag("--poisson", poisson_index,
                     "draw the summand count Poisson(size) per replication");
  auto* slln_seed = slln_cmd->add_option("--seed", seed_value, "seed");
  slln_cmd->add_option("--out", out_dir, "output directory");

  auto* jump_cmd = app.add_subcommand(
      "bigjump-test", "single-large-jump ratio check for rare sum exceedances");
  std::uint64_t jump_m = 50;
  std::vector<double> jump_x;
  double jump_target = 0.01;
  std::uint64_t jump_reps = 1000000;
  jump_cmd->add_option("--m", jump_m, "summands per block");
  jump_cmd->add_option("--alpha", alpha, "path-loss exponent");
  jump_cmd->add_option("--x", jump_x, "thresholds (default: solved from --target)")
      ->delimiter(',');
  jump_cmd->add_option("--target", jump_target,
                       "m * tail target when solving the threshold");
  jump_cmd->add_option("--reps", jump_reps, "replications");
  auto* jump_seed = jump_cmd->add_option("--seed", seed_value, "seed");
  jump_cmd->add_option("--out", out_dir, "output directory");

  auto* feas_cmd = app.add_subcommand(
      "feasibility-test", "decay check for the thinned-interference bad event");
  double feas_delta = 0.2;
  double feas_gamma = 0.45;
  std::vector<double> feas_grid = {100.0, 1000.0, 10000.0};
  std::uint64_t feas_reps = 2000;
  double feas_rmin = 1.0;
  feas_cmd->add_option("--delta", feas_delta, "good-count exponent");
  feas_cmd->add_option("--gamma", feas_gamma, "threshold exponent");
  feas_cmd->add_option("--p", p_order, "moment order in (0, 2/alpha)");
  feas_cmd->add_option("--alpha", alpha, "path-loss exponent");
  feas_cmd->add_option("--n", feas_grid, "intensity grid")->delimiter(',');
  feas_cmd->add_option("--reps", feas_reps, "replications per n");
  feas_cmd->add_option("--rmin", feas_rmin, "normalized rate floor");
  auto* feas_seed = feas_cmd->add_option("--seed", seed_value, "seed");
  feas_cmd->add_option("--out", out_dir, "output directory");

  auto* act_cmd = app.add_subcommand(
      "activate", "solve one realization and print the activation JSON");
  act_cmd->add_option("--config", config_path, "JSON config file");
  auto* act_seed = act_cmd->add_option("--seed", seed_value, "seed");
  std::string act_solver;
  act_cmd->add_option("--solver", act_solver,
                      "activation strategy (tblas, exact, greedy); overrides "
                      "the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim->parsed()) {
      std::optional<std::uint64_t> fixed;
      if (sim_fixed->count() > 0) fixed = fixed_count_value;
      return run_simulate(config_path, out_dir, sim_seed->count() > 0,
                          seed_value, workers, fixed);
    }
    if (fit_cmd->parsed()) {
      std::vector<ExperimentRecord> records = read_records_file(records_path);
      std::optional<double> fix;
      if (fit_fix->count() > 0) fix = fix_exponent_value;
      ScalingFit fit = fit_scaling(records, fix);
      std::string json_text = fit_to_json(fit);
      std::fputs(json_text.c_str(), stdout);
      write_text_file(prepare_out_dir(out_dir) / "fit.json", json_text);
      return kExitOk;
    }
    if (plot_cmd->parsed()) {
      std::vector<ExperimentRecord> records = read_records_file(records_path);
      std::optional<ScalingFit> fit;
      if (!fit_path.empty()) {
        std::ifstream in(fit_path, std::ios::binary);
        if (!in) throw io_error("cannot read fit file '" + fit_path + "'");
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        fit = fit_from_json(text);
      }
      emit_plot(records, fit,
                (prepare_out_dir(out_dir) / "plot.svg").string());
      return kExitOk;
    }
    if (tail_cmd->parsed()) {
      std::printf("%.12g\n", tail_probability(tail_z, alpha));
      return kExitOk;
    }
    if (slln_cmd->parsed()) {
      std::uint64_t seed = resolve_seed(slln_seed->count() > 0, seed_value, 1);
      LimitTestReport rep;
      if (poisson_index) {
        std::vector<double> means(slln_sizes.begin(), slln_sizes.end());
        rep = poisson_slln_check(p_order, alpha, means, reps, seed);
      } else {
        rep = mz_slln_check(p_order, alpha, slln_sizes, reps, seed);
      }
      return finish_report(rep, out_dir);
    }
    if (jump_cmd->parsed()) {
      std::uint64_t seed = resolve_seed(jump_seed->count() > 0, seed_value, 1);
      if (jump_x.empty()) {
        if (!(jump_target > 0.0 && jump_target <= 0.05))
          throw parameter_error("bigjump-test: --target must be in (0, 0.05]");
        jump_x.push_back(solve_jump_threshold(jump_m, alpha, jump_target));
      }
      return finish_report(
          big_jump_check(jump_m, alpha, jump_x, jump_reps, seed), out_dir);
    }
    if (feas_cmd->parsed()) {
      std::uint64_t seed = resolve_seed(feas_seed->count() > 0, seed_value, 1);
      return finish_report(
          feasibility_event_decay(feas_delta, feas_gamma, p_order, alpha,
                                  feas_grid, feas_reps, seed, feas_rmin),
          out_dir);
    }
    if (act_cmd->parsed())
      return run_activate(config_path, act_seed->count() > 0, seed_value,
                          act_solver);
    std::fprintf(stderr, "no subcommand selected\n");
    return kExitUsage;
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const parameter_error& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return kExitUsage;
  } catch (const index_error& e) {
    std::fprintf(stderr, "index error: %s\n", e.what());
    return kExitUsage;
  } catch (const size_error& e) {
    std::fprintf(stderr, "size error: %s\n", e.what());
    return kExitUsage;
  } catch (const fit_error& e) {
    std::fprintf(stderr, "fit error: %s\n", e.what());
    return kExitUsage;
  } catch (const contract_error& e) {
    std::fprintf(stderr, "contract error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
