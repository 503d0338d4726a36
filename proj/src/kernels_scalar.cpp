#include <cstddef>
#include <cstdint>

#include "dipolesim/kernels.hpp"
#include "kernels_detail.hpp"

namespace dipolesim::kernels {

namespace {

namespace d = detail;

void s_to_uniform(const std::uint64_t* bits, double* u, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) u[i] = d::uniform_from_bits(bits[i]);
}

void s_exp1(const std::uint64_t* bits, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = d::uexp1(bits[i]);
}

void s_pareto_gain(const std::uint64_t* gbits, const std::uint64_t* dbits,
                   double alpha, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = d::upareto(gbits[i], dbits[i], alpha);
}

void s_gain_at(const std::uint64_t* gbits, const double* d2, double alpha,
               double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = d::ugain_at(gbits[i], d2[i], alpha);
}

void s_vlog(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = d::ulog(x[i]);
}

void s_vexp(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = d::uexp(x[i]);
}

double s_sum(const double* x, std::size_t n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += x[i];
    a1 += x[i + 1];
    a2 += x[i + 2];
    a3 += x[i + 3];
  }
  double lane[4] = {a0, a1, a2, a3};
  for (; i < n; ++i) lane[i & 3] += x[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double s_masked_sum(const double* x, const double* u, double p,
                    std::size_t n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += u[i] < p ? x[i] : 0.0;
    a1 += u[i + 1] < p ? x[i + 1] : 0.0;
    a2 += u[i + 2] < p ? x[i + 2] : 0.0;
    a3 += u[i + 3] < p ? x[i + 3] : 0.0;
  }
  double lane[4] = {a0, a1, a2, a3};
  for (; i < n; ++i) lane[i & 3] += u[i] < p ? x[i] : 0.0;
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

std::size_t s_count_greater(const double* x, double t, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += x[i] > t ? 1 : 0;
  return c;
}

double s_max_value(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

void s_sq_dist(const double* ax, const double* ay, double bx, double by,
               double* d2, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double dx = ax[i] - bx;
    double dy = ay[i] - by;
    d2[i] = dx * dx + dy * dy;
  }
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend b = {
      "scalar",  s_to_uniform,    s_exp1,  s_pareto_gain, s_gain_at,
      s_vlog,    s_vexp,          s_sum,   s_masked_sum,  s_count_greater,
      s_max_value, s_sq_dist,
  };
  return b;
}

double to_uniform_one(std::uint64_t bits) {
  return detail::uniform_from_bits(bits);
}
double log_one(double x) { return detail::ulog(x); }
double exp_one(double x) { return detail::uexp(x); }
double exp1_one(std::uint64_t bits) { return detail::uexp1(bits); }
double pareto_gain_one(std::uint64_t gbits, std::uint64_t dbits,
                       double alpha) {
  return detail::upareto(gbits, dbits, alpha);
}
double gain_at_one(std::uint64_t gbits, double d2, double alpha) {
  return detail::ugain_at(gbits, d2, alpha);
}

}  // namespace dipolesim::kernels
