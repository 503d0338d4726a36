#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace dipolesim {

// Result of one empirical limit check. sample_sizes holds whatever the x-axis
// of the check is (summand counts, Poisson means, thresholds, intensities);
// statistic_per_size is aligned with it. pass comes from the documented
// decision rule of each check and nothing else; diagnostics carries secondary
// measured quantities for the JSON report.
struct LimitTestReport {
  std::string test_name;
  std::vector<double> sample_sizes;
  std::vector<double> statistic_per_size;
  std::uint64_t replications = 0;
  bool pass = false;
  double threshold_used = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> diagnostics;
};

// Strong-law check for heavy-tailed sums: for each n in sizes, the median
// over reps of n^(-1/p) * S_n where S_n sums n interference gains. Passes iff
// the last median is below 10% of the first and the sequence is nonincreasing
// up to one inversion. Requires 0 < p < 2/alpha (parameter_error otherwise).
LimitTestReport mz_slln_check(double p, double alpha,
                              const std::vector<std::uint64_t>& sizes,
                              std::uint64_t reps, std::uint64_t seed);

// Same decision rule with a Poisson(mean) summand count drawn independently
// per replication; statistic N^(-1/p) * S_N, defined as 0 when N = 0.
LimitTestReport poisson_slln_check(double p, double alpha,
                                   const std::vector<double>& mean_sizes,
                                   std::uint64_t reps, std::uint64_t seed);

// Single-large-jump check: per threshold x, the ratio of the Monte Carlo
// estimate of P(S_m > x) to m * tail_probability(x, alpha). Passes iff every
// ratio's 99% Wilson interval intersects [0.8, 1.25]. Thresholds must satisfy
// m * tail <= 0.05 (parameter_error with guidance otherwise).
LimitTestReport big_jump_check(std::uint64_t m, double alpha,
                               const std::vector<double>& x_grid,
                               std::uint64_t reps, std::uint64_t seed);

// Decay of the bad-event probability for thinned interference sums: per n,
// with m = ceil(n^delta), h0 = gamma_exp * ln n and the forcing level
// eps = gamma_exp * e^(-r_min) * n^(-delta/p) * ln n, estimates
// P(m^(-1/p) * sum_{j<=m} X_j * 1[G_j > h0] > eps) with X interference gains
// and G independent exp(1). r_min here is the normalized (order-one) rate
// floor, default 1. Passes iff the estimate strictly decreases across the
// top half of n_grid. Requires 0 < delta < gamma_exp < 1/2 and p < 2/alpha.
LimitTestReport feasibility_event_decay(double delta, double gamma_exp,
                                        double p, double alpha,
                                        const std::vector<double>& n_grid,
                                        std::uint64_t reps, std::uint64_t seed,
                                        double r_min = 1.0);

std::string report_to_json(const LimitTestReport& report);

// CSV of (size, statistic) rows with header, LF endings.
void report_to_csv(const LimitTestReport& report, std::ostream& os);

}  // namespace dipolesim
