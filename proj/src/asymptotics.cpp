#include "dipolesim/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "dipolesim/channel.hpp"
#include "dipolesim/errors.hpp"
#include "dipolesim/kernels.hpp"
#include "dipolesim/rng.hpp"
#include "dipolesim/stats.hpp"
#include "format_detail.hpp"

namespace dipolesim {

namespace {

constexpr std::size_t kChunk = 4096;

// Checker ids salt the derived stream keys so two checkers given the same
// seed never walk the same bit sequence.
enum : std::uint64_t {
  kCheckMz = 1,
  kCheckPoisson = 2,
  kCheckBigJump = 3,
  kCheckFeasibility = 4,
};

struct Scratch {
  std::vector<std::uint64_t> g, d, u;
  std::vector<double> x, uu;
};

// Sum of `count` interference gains. Chunked with a pinned per-chunk fill
// order (gain bits, then distance bits) and the striped kernel sum, so the
// value is a pure function of the stream position.
double sum_gains(RngStream& rng, std::uint64_t count, double alpha,
                 Scratch& s) {
  const kernels::Backend& k = kernels::backend();
  double acc = 0.0;
  std::uint64_t left = count;
  while (left > 0) {
    std::size_t c = left < kChunk ? static_cast<std::size_t>(left) : kChunk;
    s.g.resize(c);
    s.d.resize(c);
    s.x.resize(c);
    rng.fill_bits(s.g.data(), c);
    rng.fill_bits(s.d.data(), c);
    k.pareto_gain(s.g.data(), s.d.data(), alpha, s.x.data(), c);
    acc += k.sum(s.x.data(), c);
    left -= c;
  }
  return acc;
}

// Sum of gains whose companion uniform falls below keep_p. The uniform mark
// U and the exp(1) mark -ln(U) describe the same draw, so U < e^(-h0) is
// exactly the event "exp(1) mark exceeds h0".
double sum_gains_thinned(RngStream& rng, std::uint64_t count, double alpha,
                         double keep_p, Scratch& s) {
  const kernels::Backend& k = kernels::backend();
  double acc = 0.0;
  std::uint64_t left = count;
  while (left > 0) {
    std::size_t c = left < kChunk ? static_cast<std::size_t>(left) : kChunk;
    s.g.resize(c);
    s.d.resize(c);
    s.u.resize(c);
    s.x.resize(c);
    s.uu.resize(c);
    rng.fill_bits(s.g.data(), c);
    rng.fill_bits(s.d.data(), c);
    rng.fill_bits(s.u.data(), c);
    k.pareto_gain(s.g.data(), s.d.data(), alpha, s.x.data(), c);
    k.to_uniform(s.u.data(), s.uu.data(), c);
    acc += k.masked_sum(s.x.data(), s.uu.data(), keep_p, c);
    left -= c;
  }
  return acc;
}

void require_moment_order(double p, double alpha) {
  if (!(std::isfinite(alpha) && alpha >= 2.0))
    throw parameter_error("alpha must be >= 2");
  if (!(p > 0.0 && p < 2.0 / alpha))
    throw parameter_error(
        "p must lie in (0, 2/alpha): the scaled-sum law needs a moment order "
        "below the tail exponent");
}

std::uint64_t count_inversions(const std::vector<double>& v) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] > v[i]) ++c;
  return c;
}

// Shared decision rule of the two strong-law checks.
void finish_slln_report(LimitTestReport& rep) {
  const std::vector<double>& med = rep.statistic_per_size;
  std::uint64_t inv = count_inversions(med);
  rep.threshold_used = 0.1;
  rep.pass = med.back() <= 0.1 * med.front() && inv <= 1;
  rep.diagnostics.emplace_back("first_median", med.front());
  rep.diagnostics.emplace_back("last_median", med.back());
  rep.diagnostics.emplace_back("decay_ratio", med.back() / med.front());
  rep.diagnostics.emplace_back("inversions", static_cast<double>(inv));
}

}  // namespace

LimitTestReport mz_slln_check(double p, double alpha,
                              const std::vector<std::uint64_t>& sizes,
                              std::uint64_t reps, std::uint64_t seed) {
  require_moment_order(p, alpha);
  if (sizes.size() < 2) throw parameter_error("needs at least two sizes");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
    if (sizes[i + 1] <= sizes[i])
      throw parameter_error("sizes must be strictly ascending");
  if (sizes.front() == 0) throw parameter_error("sizes must be >= 1");
  if (reps == 0) throw parameter_error("reps must be >= 1");

  std::uint64_t key = derive(seed, kTagCheck, kCheckMz);
  LimitTestReport rep;
  rep.test_name = "mz_slln";
  rep.replications = reps;
  rep.seed = seed;
  Scratch scratch;
  std::vector<double> vals(reps);
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    double scale = std::pow(static_cast<double>(sizes[t]), -1.0 / p);
    for (std::uint64_t r = 0; r < reps; ++r) {
      RngStream rng(derive(key, t, r));
      vals[r] = scale * sum_gains(rng, sizes[t], alpha, scratch);
    }
    rep.sample_sizes.push_back(static_cast<double>(sizes[t]));
    rep.statistic_per_size.push_back(median(vals));
  }
  finish_slln_report(rep);
  return rep;
}

LimitTestReport poisson_slln_check(double p, double alpha,
                                   const std::vector<double>& mean_sizes,
                                   std::uint64_t reps, std::uint64_t seed) {
  require_moment_order(p, alpha);
  if (mean_sizes.size() < 2) throw parameter_error("needs at least two sizes");
  for (std::size_t i = 0; i + 1 < mean_sizes.size(); ++i)
    if (mean_sizes[i + 1] <= mean_sizes[i])
      throw parameter_error("mean sizes must be strictly ascending");
  if (!(mean_sizes.front() > 0.0))
    throw parameter_error("mean sizes must be > 0");
  if (reps == 0) throw parameter_error("reps must be >= 1");

  std::uint64_t key = derive(seed, kTagCheck, kCheckPoisson);
  LimitTestReport rep;
  rep.test_name = "poisson_slln";
  rep.replications = reps;
  rep.seed = seed;
  Scratch scratch;
  std::vector<double> vals(reps);
  for (std::size_t t = 0; t < mean_sizes.size(); ++t) {
    for (std::uint64_t r = 0; r < reps; ++r) {
      RngStream rng(derive(key, t, r));
      std::uint64_t count = poisson_sample(rng, mean_sizes[t]);
      if (count == 0) {
        vals[r] = 0.0;
        continue;
      }
      double scale = std::pow(static_cast<double>(count), -1.0 / p);
      vals[r] = scale * sum_gains(rng, count, alpha, scratch);
    }
    rep.sample_sizes.push_back(mean_sizes[t]);
    rep.statistic_per_size.push_back(median(vals));
  }
  finish_slln_report(rep);
  return rep;
}

LimitTestReport big_jump_check(std::uint64_t m, double alpha,
                               const std::vector<double>& x_grid,
                               std::uint64_t reps, std::uint64_t seed) {
  if (!(std::isfinite(alpha) && alpha >= 2.0))
    throw parameter_error("alpha must be >= 2");
  if (m == 0) throw parameter_error("m must be >= 1");
  if (x_grid.empty()) throw parameter_error("x grid is empty");
  if (reps == 0) throw parameter_error("reps must be >= 1");
  std::vector<double> expected(x_grid.size());
  for (std::size_t t = 0; t < x_grid.size(); ++t) {
    expected[t] = static_cast<double>(m) * tail_probability(x_grid[t], alpha);
    if (!(expected[t] <= 0.05))
      throw parameter_error(
          "threshold too low: the single-jump approximation needs "
          "m * tail_probability(x) <= 0.05, raise x or lower m");
  }

  constexpr double kBandLo = 0.8;
  constexpr double kBandHi = 1.25;
  constexpr double kZ99 = 2.576;
  std::uint64_t key = derive(seed, kTagCheck, kCheckBigJump);
  LimitTestReport rep;
  rep.test_name = "big_jump";
  rep.replications = reps;
  rep.seed = seed;
  rep.threshold_used = kBandHi;
  rep.diagnostics.emplace_back("band_lo", kBandLo);
  rep.diagnostics.emplace_back("band_hi", kBandHi);
  Scratch scratch;
  bool all_ok = true;
  for (std::size_t t = 0; t < x_grid.size(); ++t) {
    // One long stream per threshold; replications are consecutive m-blocks.
    RngStream rng(derive(key, t));
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < reps; ++r)
      if (sum_gains(rng, m, alpha, scratch) > x_grid[t]) ++hits;
    auto [plo, phi] = wilson_interval(hits, reps, kZ99);
    double ratio =
        static_cast<double>(hits) / static_cast<double>(reps) / expected[t];
    double rlo = plo / expected[t];
    double rhi = phi / expected[t];
    all_ok = all_ok && rlo <= kBandHi && rhi >= kBandLo;
    rep.sample_sizes.push_back(x_grid[t]);
    rep.statistic_per_size.push_back(ratio);
    std::string idx = std::to_string(t);
    rep.diagnostics.emplace_back("expected_" + idx, expected[t]);
    rep.diagnostics.emplace_back("ratio_lo_" + idx, rlo);
    rep.diagnostics.emplace_back("ratio_hi_" + idx, rhi);
  }
  rep.pass = all_ok;
  return rep;
}

LimitTestReport feasibility_event_decay(double delta, double gamma_exp,
                                        double p, double alpha,
                                        const std::vector<double>& n_grid,
                                        std::uint64_t reps, std::uint64_t seed,
                                        double r_min) {
  require_moment_order(p, alpha);
  if (!(delta > 0.0 && delta < gamma_exp && gamma_exp < 0.5))
    throw parameter_error("requires 0 < delta < gamma_exp < 1/2");
  if (n_grid.size() < 2) throw parameter_error("needs at least two n values");
  for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
    if (n_grid[i + 1] <= n_grid[i])
      throw parameter_error("n grid must be strictly ascending");
  if (!(n_grid.front() > 1.0)) throw parameter_error("n values must be > 1");
  if (reps == 0) throw parameter_error("reps must be >= 1");
  if (!(std::isfinite(r_min) && r_min > 0.0))
    throw parameter_error("r_min must be > 0");

  std::uint64_t key = derive(seed, kTagCheck, kCheckFeasibility);
  LimitTestReport rep;
  rep.test_name = "feasibility_event_decay";
  rep.replications = reps;
  rep.seed = seed;
  Scratch scratch;
  for (std::size_t t = 0; t < n_grid.size(); ++t) {
    double n = n_grid[t];
    double ln_n = std::log(n);
    auto m = static_cast<std::uint64_t>(std::ceil(std::pow(n, delta)));
    double keep_p = std::pow(n, -gamma_exp);  // P(exp(1) mark > gamma ln n)
    double eps =
        gamma_exp * std::exp(-r_min) * std::pow(n, -delta / p) * ln_n;
    double scale = std::pow(static_cast<double>(m), -1.0 / p);
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
      RngStream rng(derive(key, t, r));
      double s = scale * sum_gains_thinned(rng, m, alpha, keep_p, scratch);
      if (s > eps) ++hits;
    }
    rep.sample_sizes.push_back(n);
    rep.statistic_per_size.push_back(static_cast<double>(hits) /
                                     static_cast<double>(reps));
    std::string idx = std::to_string(t);
    rep.diagnostics.emplace_back("m_" + idx, static_cast<double>(m));
    rep.diagnostics.emplace_back("eps_" + idx, eps);
    rep.threshold_used = eps;
  }

  // Strict decay over the top half of the grid; the low end is allowed to be
  // pre-asymptotic.
  bool ok = true;
  for (std::size_t i = n_grid.size() / 2; i + 1 < n_grid.size(); ++i)
    ok = ok &&
         rep.statistic_per_size[i + 1] < rep.statistic_per_size[i];
  rep.pass = ok;
  return rep;
}

std::string report_to_json(const LimitTestReport& report) {
  nlohmann::json j;
  j["test_name"] = report.test_name;
  j["sample_sizes"] = report.sample_sizes;
  j["statistic_per_size"] = report.statistic_per_size;
  j["replications"] = report.replications;
  j["pass"] = report.pass;
  j["threshold_used"] = report.threshold_used;
  j["seed"] = report.seed;
  nlohmann::json diag = nlohmann::json::object();
  for (const auto& [name, value] : report.diagnostics) diag[name] = value;
  j["diagnostics"] = diag;
  return j.dump(2) + "\n";
}

void report_to_csv(const LimitTestReport& report, std::ostream& os) {
  std::string buf = "size,statistic\n";
  for (std::size_t i = 0; i < report.sample_sizes.size(); ++i) {
    detail::append_double(buf, report.sample_sizes[i]);
    buf.push_back(',');
    detail::append_double(buf, report.statistic_per_size[i]);
    buf.push_back('\n');
  }
  os << buf;
}

}  // namespace dipolesim
