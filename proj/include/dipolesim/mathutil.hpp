#pragma once

namespace dipolesim {

// Regularized incomplete gamma functions, a > 0, x >= 0:
//   gamma_p(a, x) = lower integral / Gamma(a), gamma_q = 1 - gamma_p.
// Series expansion below x = a+1, Lentz continued fraction above; absolute
// accuracy well under 1e-12 for the arguments used here.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

}  // namespace dipolesim
