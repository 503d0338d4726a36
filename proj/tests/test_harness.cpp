#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "dipolesim/config.hpp"
#include "dipolesim/errors.hpp"
#include "dipolesim/fitting.hpp"
#include "dipolesim/kernels.hpp"
#include "dipolesim/plot.hpp"
#include "dipolesim/records.hpp"
#include "dipolesim/stats.hpp"
#include "dipolesim/sweep.hpp"

using namespace dipolesim;

namespace {

bool same_record(const ExperimentRecord& a, const ExperimentRecord& b) {
  return a.n == b.n && a.replication == b.replication && a.seed == b.seed &&
         a.m_n == b.m_n && a.eta_n == b.eta_n && a.solver == b.solver &&
         a.mode == b.mode && a.wall_time_ms == b.wall_time_ms;
}

std::map<double, double> mean_counts_by_n(
    const std::vector<ExperimentRecord>& recs) {
  std::map<double, std::pair<double, double>> agg;
  for (const ExperimentRecord& r : recs) {
    agg[r.n].first += static_cast<double>(r.eta_n);
    agg[r.n].second += 1.0;
  }
  std::map<double, double> out;
  for (const auto& [n, sums] : agg) out[n] = sums.first / sums.second;
  return out;
}

}  // namespace

TEST_CASE("sweep is deterministic, ordered, and schedule-independent") {
  Config c = default_config();
  c.sweep.n_grid = {50, 100};
  c.sweep.reps = 5;
  c.sweep.solver = Solver::greedy;
  c.sweep.master_seed = 11;

  std::vector<ExperimentRecord> seen;
  auto serial = run_sweep(c.params, c.sweep, 1,
                          [&](const ExperimentRecord& r) { seen.push_back(r); });
  auto again = run_sweep(c.params, c.sweep, 1);
  auto threaded = run_sweep(c.params, c.sweep, 3);

  REQUIRE(serial.size() == 10);
  REQUIRE(again.size() == serial.size());
  REQUIRE(threaded.size() == serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CAPTURE(i);
    CHECK(same_record(serial[i], again[i]));
    CHECK(same_record(serial[i], threaded[i]));
  }

  // Returned order is (n, replication) regardless of completion order.
  for (std::size_t i = 1; i < serial.size(); ++i) {
    bool ordered = serial[i - 1].n < serial[i].n ||
                   (serial[i - 1].n == serial[i].n &&
                    serial[i - 1].replication < serial[i].replication);
    CHECK(ordered);
  }

  // The sink saw every record exactly once.
  REQUIRE(seen.size() == serial.size());
  auto key = [](const ExperimentRecord& r) {
    return std::make_pair(r.n, r.replication);
  };
  std::sort(seen.begin(), seen.end(),
            [&](const auto& a, const auto& b) { return key(a) < key(b); });
  for (std::size_t i = 0; i < serial.size(); ++i)
    CHECK(same_record(seen[i], serial[i]));

  for (const ExperimentRecord& r : serial) {
    CHECK(r.seed == task_seed(c.sweep.master_seed, r.n, r.replication));
    CHECK(r.eta_n <= r.m_n);
    CHECK(r.solver == Solver::greedy);
    CHECK(r.mode == Mode::pathloss);
    CHECK(r.wall_time_ms == 0);
  }

  // A different master seed reseeds every task.
  c.sweep.master_seed = 12;
  auto other = run_sweep(c.params, c.sweep, 1);
  bool any_differs = false;
  for (std::size_t i = 0; i < serial.size(); ++i)
    if (serial[i].seed != other[i].seed) any_differs = true;
  CHECK(any_differs);
}

TEST_CASE("independent master seeds decorrelate the counts") {
  Config c = default_config();
  c.sweep.n_grid = {50};
  c.sweep.reps = 1000;
  c.sweep.solver = Solver::tblas;

  c.sweep.master_seed = 1;
  auto a = run_sweep(c.params, c.sweep, 1);
  c.sweep.master_seed = 2;
  auto b = run_sweep(c.params, c.sweep, 1);
  REQUIRE(a.size() == 1000);
  REQUIRE(b.size() == 1000);

  std::vector<double> xa, xb;
  for (const auto& r : a) xa.push_back(static_cast<double>(r.eta_n));
  for (const auto& r : b) xb.push_back(static_cast<double>(r.eta_n));
  double ma = mean(xa), mb = mean(xb);
  double va = variance(xa), vb = variance(xb);
  REQUIRE(va > 0.0);
  REQUIRE(vb > 0.0);
  double cov = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i)
    cov += (xa[i] - ma) * (xb[i] - mb);
  cov /= static_cast<double>(xa.size() - 1);
  double rho = cov / std::sqrt(va * vb);
  // Pearson correlation of independent streams: SE ~ 1/sqrt(reps) ~ 0.032.
  CHECK(std::abs(rho) < 0.12);
}

TEST_CASE("mean active counts trend upward across the sweep") {
  Config c = default_config();
  c.sweep.n_grid = {100, 200, 300, 400, 500, 600};
  c.sweep.reps = 50;
  c.sweep.solver = Solver::greedy;
  c.sweep.master_seed = 3;

  auto recs = run_sweep(c.params, c.sweep, 1);
  auto means = mean_counts_by_n(recs);
  REQUIRE(means.size() == 6);

  std::vector<double> vals;
  for (const auto& [n, m] : means) vals.push_back(m);
  int inversions = 0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] < vals[i - 1]) ++inversions;
  CHECK(inversions <= 1);
  CHECK(vals.back() > vals.front());
}

TEST_CASE("scaling fit recovers exact power-law points") {
  std::vector<std::pair<double, double>> pts;
  for (double n = 100; n <= 1000; n += 100)
    pts.push_back({n, 192.0 + std::pow(n, 0.25)});

  auto free_fit = fit_scaling_points(pts);
  CHECK_FALSE(free_fit.fixed_exponent.has_value());
  CHECK(free_fit.c1 == doctest::Approx(192.0).epsilon(1e-6));
  CHECK(free_fit.exponent == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(free_fit.amplitude == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(free_fit.residual_rms < 1e-6);
  CHECK(free_fit.n_range.first == 100.0);
  CHECK(free_fit.n_range.second == 1000.0);

  std::vector<std::pair<double, double>> pts2;
  for (double n = 100; n <= 1000; n += 100)
    pts2.push_back({n, 2.0 + 3.0 * std::pow(n, 0.5)});
  auto free2 = fit_scaling_points(pts2);
  CHECK(free2.exponent == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(free2.amplitude == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(free2.c1 == doctest::Approx(2.0).epsilon(1e-4));

  std::vector<std::pair<double, double>> pts3;
  for (double n = 100; n <= 1000; n += 100)
    pts3.push_back({n, 145.0 + std::pow(n, 0.25)});
  auto pinned = fit_scaling_points(pts3, 0.25);
  REQUIRE(pinned.fixed_exponent.has_value());
  CHECK(*pinned.fixed_exponent == 0.25);
  CHECK(pinned.exponent == 0.25);
  CHECK(pinned.c1 == doctest::Approx(145.0).epsilon(1e-9));
  CHECK(pinned.amplitude == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pinned.residual_rms < 1e-9);
}

TEST_CASE("pinned-exponent fit absorbs observation noise") {
  // y = 37 + n^(1/4) + N(0, 3^2) on ten grid points; the pinned fit must
  // stay unbiased and report a residual scale near sigma.
  constexpr double kC = 37.0;
  constexpr double kSigma = 3.0;
  std::mt19937_64 gen(2024);
  auto normal = [&]() {
    double u1 = kernels::to_uniform_one(gen());
    double u2 = kernels::to_uniform_one(gen());
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586 * u2);
  };

  std::vector<double> errs, rmss;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (double n = 100; n <= 1000; n += 100)
      pts.push_back({n, kC + std::pow(n, 0.25) + kSigma * normal()});
    auto fit = fit_scaling_points(pts, 0.25);
    errs.push_back(fit.c1 - kC);
    rmss.push_back(fit.residual_rms);
  }
  CHECK(std::abs(mean(errs)) < 2.0);
  CHECK(mean(rmss) > 1.8);
  CHECK(mean(rmss) < 3.8);
}

TEST_CASE("fit rejects degenerate inputs") {
  std::vector<ExperimentRecord> recs;
  for (double n : {100.0, 200.0, 300.0, 400.0}) {
    ExperimentRecord r;
    r.n = n;
    r.eta_n = 7;
    recs.push_back(r);
  }
  CHECK_THROWS_AS(fit_scaling(recs), fit_error);  // constant means

  std::vector<std::pair<double, double>> three = {
      {100, 5}, {200, 6}, {300, 7}};
  CHECK_THROWS_AS(fit_scaling_points(three), fit_error);
  CHECK_THROWS_AS(fit_scaling_points({}), fit_error);

  // Four points but only three distinct intensities.
  std::vector<std::pair<double, double>> dup = {
      {100, 5}, {100, 6}, {200, 7}, {300, 8}};
  CHECK_THROWS_AS(fit_scaling_points(dup), fit_error);
}

TEST_CASE("fit serialization round-trips") {
  ScalingFit fit;
  fit.c1 = 4.5;
  fit.exponent = 0.25;
  fit.fixed_exponent = 0.25;
  fit.residual_rms = 0.75;
  fit.n_range = {100.0, 1000.0};
  fit.amplitude = 1.25;

  std::string text = fit_to_json(fit);
  auto back = fit_from_json(text);
  CHECK(back.c1 == fit.c1);
  CHECK(back.exponent == fit.exponent);
  REQUIRE(back.fixed_exponent.has_value());
  CHECK(*back.fixed_exponent == 0.25);
  CHECK(back.residual_rms == fit.residual_rms);
  CHECK(back.n_range.first == fit.n_range.first);
  CHECK(back.n_range.second == fit.n_range.second);
  CHECK(back.amplitude == fit.amplitude);

  fit.fixed_exponent.reset();
  std::string free_text = fit_to_json(fit);
  auto j = nlohmann::json::parse(free_text);
  CHECK(j.at("fixed_exponent").is_null());
  auto free_back = fit_from_json(free_text);
  CHECK_FALSE(free_back.fixed_exponent.has_value());
}

TEST_CASE("config parsing covers defaults, overrides, and rejection") {
  Config def = default_config();
  Config c = parse_config_json("{}");
  CHECK(c.sweep.n_grid == def.sweep.n_grid);
  CHECK(c.sweep.reps == def.sweep.reps);
  CHECK(c.sweep.solver == def.sweep.solver);
  CHECK(c.sweep.mode == def.sweep.mode);
  CHECK(c.sweep.master_seed == def.sweep.master_seed);
  CHECK(c.params.alpha == def.params.alpha);
  CHECK(c.params.power_w == def.params.power_w);
  CHECK(c.params.noise_var == def.params.noise_var);
  CHECK(c.params.bandwidth_hz == def.params.bandwidth_hz);
  CHECK(c.params.r_min == def.params.r_min);
  CHECK(c.params.gamma_exp == def.params.gamma_exp);
  CHECK(c.params.mark_radius == def.params.mark_radius);
  CHECK(c.params.window_area == def.params.window_area);

  Config full = parse_config_json(R"({
    "n_grid": [10, 20, 40],
    "reps": 7,
    "alpha": 2.5,
    "power_w": 0.05,
    "noise_var": 0.02,
    "bandwidth_hz": 1e7,
    "r_min": 2e5,
    "gamma_exp": 0.3,
    "mark_radius": 0.02,
    "window_area": 9,
    "solver": "exact",
    "mode": "no_pathloss",
    "master_seed": 99
  })");
  CHECK(full.sweep.n_grid == std::vector<double>({10, 20, 40}));
  CHECK(full.sweep.reps == 7);
  CHECK(full.sweep.solver == Solver::exact);
  CHECK(full.sweep.mode == Mode::no_pathloss);
  CHECK(full.sweep.master_seed == 99);
  CHECK(full.params.alpha == 2.5);
  CHECK(full.params.gamma_exp == 0.3);
  CHECK(full.params.window_area == 9.0);

  // The resolved echo parses back to the same configuration.
  Config echoed = parse_config_json(config_to_json(full));
  CHECK(echoed.sweep.n_grid == full.sweep.n_grid);
  CHECK(echoed.sweep.reps == full.sweep.reps);
  CHECK(echoed.sweep.solver == full.sweep.solver);
  CHECK(echoed.sweep.mode == full.sweep.mode);
  CHECK(echoed.sweep.master_seed == full.sweep.master_seed);
  CHECK(echoed.params.alpha == full.params.alpha);
  CHECK(echoed.params.power_w == full.params.power_w);
  CHECK(echoed.params.gamma_exp == full.params.gamma_exp);

  CHECK_THROWS_AS(parse_config_json(R"({"gamma_exp": 0.7})"), config_error);
  CHECK_THROWS_AS(parse_config_json(R"({"foo": 1})"), config_error);
  CHECK_THROWS_WITH_AS(parse_config_json(R"({"replications": 5})"),
                       "unknown config key 'replications'", config_error);
  CHECK_THROWS_AS(parse_config_json(R"({"n_grid": []})"), config_error);
  CHECK_THROWS_AS(parse_config_json(R"({"n_grid": [0]})"), config_error);
  CHECK_THROWS_AS(parse_config_json(R"({"reps": 0})"), config_error);
  CHECK_THROWS_AS(parse_config_json(R"({"solver": "banana"})"), config_error);
  CHECK_THROWS_AS(parse_config_json(R"({"mode": "psychic"})"), config_error);
  CHECK_THROWS_AS(parse_config_json(R"({"alpha": "three"})"), config_error);
  CHECK_THROWS_AS(parse_config_json("{"), config_error);
  CHECK_THROWS_AS(parse_config_json("[1, 2]"), config_error);
}

TEST_CASE("records CSV round-trips exactly and rejects damage") {
  std::vector<ExperimentRecord> recs;
  ExperimentRecord r;
  r.n = 100.0;
  r.replication = 0;
  r.seed = 0xDEADBEEFCAFEF00DULL;
  r.m_n = 412;
  r.eta_n = 37;
  r.solver = Solver::greedy;
  r.mode = Mode::pathloss;
  recs.push_back(r);
  r.n = 250.5;
  r.replication = 3;
  r.seed = 1;
  r.m_n = 0;
  r.eta_n = 0;
  r.solver = Solver::tblas;
  r.mode = Mode::no_pathloss;
  recs.push_back(r);

  std::ostringstream os;
  write_records_csv(recs, os);
  std::string text = os.str();
  CHECK(text.rfind(std::string(kRecordsCsvHeader) + "\n", 0) == 0);
  CHECK(text.back() == '\n');
  CHECK(text.find('\r') == std::string::npos);

  std::istringstream is(text);
  auto back = read_records_csv(is);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i)
    CHECK(same_record(back[i], recs[i]));

  {
    std::istringstream bad("n,replication\n");
    CHECK_THROWS_AS(read_records_csv(bad), io_error);
  }
  {
    // Field count damage on the first data row (file line 2).
    std::istringstream bad(std::string(kRecordsCsvHeader) +
                           "\n100,0,1,412\n");
    try {
      read_records_csv(bad);
      FAIL("expected io_error");
    } catch (const io_error& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  {
    std::istringstream bad(std::string(kRecordsCsvHeader) +
                           "\n100,0,1,412,37,greedy,pathloss,0\n" +
                           "100,zebra,1,412,37,greedy,pathloss,0\n");
    try {
      read_records_csv(bad);
      FAIL("expected io_error");
    } catch (const io_error& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
}

TEST_CASE("plot bytes are pinned to the golden file") {
  std::vector<ExperimentRecord> recs;
  std::uint64_t counts[] = {40, 44, 47, 52, 55, 61};
  int k = 0;
  for (double n : {100.0, 200.0, 400.0}) {
    for (std::uint32_t rep = 0; rep < 2; ++rep) {
      ExperimentRecord r;
      r.n = n;
      r.replication = rep;
      r.seed = 1000 + k;
      r.m_n = static_cast<std::uint64_t>(4 * n);
      r.eta_n = counts[k++];
      recs.push_back(r);
    }
  }
  ScalingFit fit;
  fit.c1 = 2.0;
  fit.exponent = 0.25;
  fit.amplitude = 12.0;
  fit.n_range = {100.0, 400.0};

  std::string svg = render_plot_svg(recs, fit);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);

  std::ifstream golden("golden/plot_golden.svg", std::ios::binary);
  REQUIRE_MESSAGE(golden.good(), "golden/plot_golden.svg missing; test runs "
                                 "from the tests/ source directory");
  std::ostringstream buf;
  buf << golden.rdbuf();
  CHECK(svg == buf.str());
}

TEST_CASE("CLI exit codes follow the documented taxonomy") {
  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() / "dipolesim_exit_codes";
  fs::remove_all(root);
  fs::create_directories(root);
  auto run = [&](const std::string& args) {
    std::string cmd = std::string("\"") + DIPOLESIM_BIN + "\" " + args +
                      " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  {
    std::ofstream out(root / "bad_key.json");
    out << R"({"replications": 5})";
  }
  {
    std::ofstream out(root / "tiny.json");
    out << R"({"n_grid": [40, 80], "reps": 2, "master_seed": 5})";
  }
  std::string tiny = (root / "tiny.json").string();
  std::string out_dir = (root / "out").string();

  CHECK(run("simulate --config " + tiny + " --out " + out_dir) == 0);
  CHECK(run("tail-eval --z 1 --alpha 3") == 0);
  // Usage/validation family: bad config key, degenerate fit input,
  // oversized exact instance, malformed flag value.
  CHECK(run("simulate --config " + (root / "bad_key.json").string() +
            " --out " + out_dir) == 1);
  CHECK(run("fit --records " + out_dir + "/records.csv") == 1);
  CHECK(run("activate --seed 7 --solver exact") == 1);
  CHECK(run("tail-eval --z -1 --alpha 3") == 1);
  // Runtime/IO family: unreadable input, uncreatable output directory.
  CHECK(run("fit --records " + (root / "absent.csv").string()) == 2);
  CHECK(run("simulate --config " + tiny + " --out /proc/nope") == 2);
  // Check-verdict family: a two-decade grid sits at the decision knife edge
  // and fails; three decades pass.
  CHECK(run("slln-test --sizes 1000,2000 --reps 3 --seed 1 --out " +
            out_dir) == 3);
}

TEST_CASE("plot handles single-intensity data and rejects empty input") {
  std::vector<ExperimentRecord> recs;
  for (std::uint32_t rep = 0; rep < 3; ++rep) {
    ExperimentRecord r;
    r.n = 300.0;
    r.replication = rep;
    r.eta_n = 50 + rep;
    recs.push_back(r);
  }
  ScalingFit fit;
  fit.c1 = 1.0;
  fit.exponent = 0.25;
  fit.amplitude = 10.0;

  // One intensity cannot anchor a curve: scatter only.
  std::string svg = render_plot_svg(recs, fit);
  CHECK(svg.find("<polyline") == std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);

  CHECK_THROWS_AS(render_plot_svg({}, std::nullopt), parameter_error);
}
