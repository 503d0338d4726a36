#include "dipolesim/mathutil.hpp"

#include <cmath>

#include "dipolesim/errors.hpp"

namespace dipolesim {

namespace {

// log Gamma(a) via std::lgamma; a > 0 here so the sign is always +1.
double log_gamma(double a) { return std::lgamma(a); }

// Lower series: P(a,x) = x^a e^-x / Gamma(a) * sum_k x^k / (a)_{k+1}.
double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int k = 0; k < 500; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
  }
  throw contract_error("gamma_p: series failed to converge");
}

// Upper continued fraction (modified Lentz):
// Q(a,x) = x^a e^-x / Gamma(a) * 1/(x+1-a- 1*(1-a)/(x+3-a- ...)).
double gamma_q_cf(double a, double x) {
  constexpr double kTinyFloor = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTinyFloor;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTinyFloor) d = kTinyFloor;
    c = b + an / c;
    if (std::fabs(c) < kTinyFloor) c = kTinyFloor;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16)
      return h * std::exp(-x + a * std::log(x) - log_gamma(a));
  }
  throw contract_error("gamma_q: continued fraction failed to converge");
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0))
    throw parameter_error("gamma_p: requires a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0))
    throw parameter_error("gamma_q: requires a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

}  // namespace dipolesim
