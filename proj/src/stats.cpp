#include "dipolesim/stats.hpp"

#include <algorithm>
#include <cmath>

#include "dipolesim/errors.hpp"
#include "dipolesim/mathutil.hpp"

namespace dipolesim {

double ks_statistic(const std::vector<double>& sorted,
                    const std::function<double(double)>& cdf) {
  if (sorted.empty()) throw parameter_error("ks_statistic: empty sample");
  std::size_t n = sorted.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = cdf(sorted[i]);
    double lo = f - static_cast<double>(i) / static_cast<double>(n);
    double hi = static_cast<double>(i + 1) / static_cast<double>(n) - f;
    d = std::max(d, std::max(lo, hi));
  }
  return d;
}

double kolmogorov_pvalue(double d, std::size_t n) {
  if (d <= 0.0) return 1.0;
  double sn = std::sqrt(static_cast<double>(n));
  // Finite-n correction keeps the asymptotic series usable from n ~ 20 up.
  double t = d * (sn + 0.12 + 0.11 / sn);
  if (t < 1.0) {
    // Jacobi-transformed series: the alternating form loses all precision to
    // cancellation here. P(K <= t) = sqrt(2 pi)/t * sum exp(-(2k-1)^2 c)
    // with c = pi^2 / (8 t^2).
    double c = 9.869604401089358 / (8.0 * t * t);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      double odd = 2.0 * k - 1.0;
      double term = std::exp(-odd * odd * c);
      cdf += term;
      if (term < 1e-18 * (cdf + 1e-300)) break;
    }
    cdf *= 2.5066282746310002 / t;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = 2.0 * ((k & 1) != 0 ? 1.0 : -1.0) *
                  std::exp(-2.0 * static_cast<double>(k) *
                           static_cast<double>(k) * t * t);
    sum += term;
    if (std::fabs(term) < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

std::pair<double, double> wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials, double z) {
  if (trials == 0) throw parameter_error("wilson_interval: zero trials");
  if (successes > trials)
    throw parameter_error("wilson_interval: successes exceed trials");
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double chi_square_pvalue(double stat, double dof) {
  if (!(dof > 0.0)) throw parameter_error("chi_square_pvalue: dof must be > 0");
  if (stat <= 0.0) return 1.0;
  return gamma_q(dof / 2.0, stat / 2.0);
}

double median(std::vector<double> values) {
  if (values.empty()) throw parameter_error("median: empty sample");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if ((n & 1) != 0) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw parameter_error("mean: empty sample");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double variance(const std::vector<double>& values) {
  if (values.size() < 2) throw parameter_error("variance: needs n >= 2");
  double m = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return s / static_cast<double>(values.size() - 1);
}

}  // namespace dipolesim
