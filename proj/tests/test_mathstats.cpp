#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dipolesim/errors.hpp"
#include "dipolesim/kernels.hpp"
#include "dipolesim/mathutil.hpp"
#include "dipolesim/stats.hpp"
#include "oracle.hpp"

using namespace dipolesim;

TEST_CASE("regularized gamma matches independent quadrature") {
  // Grid straddles the series/continued-fraction split at x = a + 1.
  for (double a : {0.4, 2.0 / 3.0, 1.0, 1.5, 2.5, 7.0}) {
    for (double x : {0.01, 0.5, 0.9 * a, a + 0.5, a + 1.5, 5.0 * a, 30.0}) {
      double want = oracle::gamma_p(a, x);
      double got = gamma_p(a, x);
      CAPTURE(a);
      CAPTURE(x);
      CHECK(std::fabs(got - want) < 1e-11);
      CHECK(std::fabs(gamma_q(a, x) - (1.0 - want)) < 1e-11);
    }
  }
}

TEST_CASE("regularized gamma endpoints and complement identity") {
  CHECK(gamma_p(1.5, 0.0) == 0.0);
  CHECK(gamma_q(1.5, 0.0) == 1.0);
  CHECK(gamma_p(2.0 / 3.0, 200.0) == doctest::Approx(1.0).epsilon(1e-13));

  // gamma_p(1, x) = 1 - e^(-x) in closed form.
  for (double x : {0.1, 1.0, 3.0, 10.0})
    CHECK(gamma_p(1.0, x) == doctest::Approx(-std::expm1(-x)).epsilon(1e-13));

  for (double a : {0.3, 1.0, 4.0})
    for (double x : {0.2, 2.0, 9.0})
      CHECK(gamma_p(a, x) + gamma_q(a, x) ==
            doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(gamma_p(0.0, 1.0), parameter_error);
  CHECK_THROWS_AS(gamma_p(-1.0, 1.0), parameter_error);
  CHECK_THROWS_AS(gamma_p(1.0, -0.5), parameter_error);
}

TEST_CASE("gamma_p is monotone in x") {
  double prev = 0.0;
  for (double x = 0.0; x <= 20.0; x += 0.25) {
    double v = gamma_p(1.7, x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("ks statistic reproduces the hand-computed small case") {
  std::vector<double> sample = {0.1, 0.5, 0.9};
  auto ident = [](double x) { return x; };
  double d = ks_statistic(sample, ident);
  // sup over {0.1, 1/3-0.1, 0.5-1/3, 2/3-0.5, 0.9-2/3, 1-0.9}.
  CHECK(d == doctest::Approx(1.0 / 3.0 - 0.1).epsilon(1e-12));

  CHECK_THROWS_AS(ks_statistic({}, ident), parameter_error);
}

TEST_CASE("kolmogorov p-value matches the classical critical point") {
  // With the Stephens small-sample factor at n = 10000, d chosen so that
  // t = 1.36: the textbook 5% point of the Kolmogorov distribution.
  std::size_t n = 10000;
  double t = 1.36;
  double d = t / (std::sqrt(double(n)) + 0.12 + 0.11 / std::sqrt(double(n)));
  CHECK(kolmogorov_pvalue(d, n) == doctest::Approx(0.049452).epsilon(1e-3));

  CHECK(kolmogorov_pvalue(1e-9, 100) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(kolmogorov_pvalue(0.9, 1000) < 1e-12);
}

TEST_CASE("ks accepts true uniforms and rejects a wrong cdf") {
  std::mt19937_64 eng(404);
  std::vector<double> sample(20000);
  for (auto& s : sample) s = kernels::to_uniform_one(eng());
  std::sort(sample.begin(), sample.end());

  auto ident = [](double x) { return x; };
  double d = ks_statistic(sample, ident);
  CHECK(kolmogorov_pvalue(d, sample.size()) > 1e-4);

  auto wrong = [](double x) { return x * x; };
  CHECK(ks_statistic(sample, wrong) > 0.2);
}

TEST_CASE("wilson interval reproduces reference values and edge cases") {
  auto [lo, hi] = wilson_interval(8, 10, 1.96);
  CHECK(lo == doctest::Approx(0.49016).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.94332).epsilon(1e-3));

  auto [lo0, hi0] = wilson_interval(0, 50, 2.576);
  CHECK(lo0 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hi0 > 0.0);
  CHECK(hi0 < 0.25);

  auto [lo1, hi1] = wilson_interval(50, 50, 2.576);
  CHECK(hi1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lo1 < 1.0);
  CHECK(lo1 > 0.75);

  // More data, same proportion: the interval tightens.
  auto [alo, ahi] = wilson_interval(80, 100, 2.576);
  auto [blo, bhi] = wilson_interval(800, 1000, 2.576);
  CHECK(bhi - blo < ahi - alo);

  CHECK_THROWS_AS(wilson_interval(1, 0, 1.96), parameter_error);
  CHECK_THROWS_AS(wilson_interval(5, 4, 1.96), parameter_error);
}

TEST_CASE("chi-square p-value matches the textbook points and the oracle") {
  CHECK(chi_square_pvalue(3.841, 1.0) == doctest::Approx(0.05).epsilon(2e-3));
  CHECK(chi_square_pvalue(5.991, 2.0) == doctest::Approx(0.05).epsilon(2e-3));
  CHECK(chi_square_pvalue(0.0, 3.0) == doctest::Approx(1.0).epsilon(1e-12));

  for (double dof : {1.0, 4.0, 10.0})
    for (double stat : {0.5, 2.0, 7.5, 20.0}) {
      double want = 1.0 - oracle::gamma_p(dof / 2.0, stat / 2.0);
      CHECK(chi_square_pvalue(stat, dof) ==
            doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("summary statistics behave on hand data") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(median({5.0}) == 5.0);
  CHECK(mean({1.0, 2.0, 3.0, 4.0}) == 2.5);
  CHECK(variance({1.0, 2.0, 3.0, 4.0}) ==
        doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(median({}), parameter_error);
  CHECK_THROWS_AS(mean({}), parameter_error);
  CHECK_THROWS_AS(variance({1.0}), parameter_error);
}
