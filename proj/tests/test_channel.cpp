#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dipolesim/channel.hpp"
#include "dipolesim/errors.hpp"
#include "dipolesim/field.hpp"
#include "dipolesim/kernels.hpp"
#include "dipolesim/rng.hpp"
#include "dipolesim/stats.hpp"
#include "oracle.hpp"

using namespace dipolesim;

namespace {

NetworkParams base_params(double n, double area = 4.0) {
  NetworkParams p;
  p.n = n;
  p.window_area = area;
  return p;
}

}  // namespace

TEST_CASE("survival function reproduces high-precision reference values") {
  // Constants computed with 50-digit arithmetic, frozen here. Relative
  // tolerance 1e-12 leaves the implementation ~2 digits of slack over its
  // documented 1e-10 absolute accuracy at these magnitudes.
  struct Ref {
    double z, alpha, value;
  };
  const Ref refs[] = {
      {0.5, 3.0, 0.82780555021175086136},
      {1.0, 3.0, 0.69979232776149447766},
      {2.0, 3.0, 0.52852796607363342216},
      {10.0, 3.0, 0.19448764070906694706},
      {100.0, 3.0, 0.041901724713575503279},
      {1e4, 3.0, 0.0019449057753964867198},
      {1e6, 3.0, 0.00009027452929509336113},
      {1.0, 2.0, 0.6321205588285576784},
      {10.0, 2.0, 0.099995460007023751515},
      {3.7, 2.5, 0.32189603532992869034},
      {25.0, 4.0, 0.17724538509027909508},
  };
  for (const auto& r : refs) {
    CAPTURE(r.z);
    CAPTURE(r.alpha);
    CHECK(tail_probability(r.z, r.alpha) ==
          doctest::Approx(r.value).epsilon(1e-12));
  }
}

TEST_CASE("survival function agrees with independent quadrature everywhere") {
  for (double alpha : {2.0, 2.5, 3.0, 4.0}) {
    for (double lz = -3.0; lz <= 6.01; lz += 0.5) {
      double z = std::pow(10.0, lz);
      double want = oracle::tail_T(z, alpha);
      double got = tail_probability(z, alpha);
      CAPTURE(alpha);
      CAPTURE(z);
      CHECK(std::fabs(got - want) < 5e-10);
    }
  }
}

TEST_CASE("survival function endpoints, continuity, and monotonicity") {
  CHECK(tail_probability(0.0, 3.0) == 1.0);
  CHECK(tail_probability(0.0, 2.0) == 1.0);

  // The small-z series hands over to the gamma form at z = 1e-4. Straddling
  // the switch by one part in 1e9 moves the true value by ~1e-13, so any
  // visible gap is branch disagreement.
  double below = tail_probability(1e-4 * (1.0 - 1e-9), 3.0);
  double above = tail_probability(1e-4 * (1.0 + 1e-9), 3.0);
  CHECK(std::fabs(below - above) < 1e-10);

  double prev = 1.1;
  for (double lz = -6.0; lz <= 6.0; lz += 0.25) {
    double v = tail_probability(std::pow(10.0, lz), 3.0);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }

  CHECK_THROWS_AS(tail_probability(-1.0, 3.0), parameter_error);
  CHECK_THROWS_AS(tail_probability(1.0, 0.0), parameter_error);
}

TEST_CASE("rescaled survival climbs to its plateau constant") {
  std::vector<double> grid;
  for (double lz = 2.0; lz <= 6.01; lz += 0.25) grid.push_back(std::pow(10.0, lz));
  auto vals = tail_exponent_plateau(3.0, grid);
  REQUIRE(vals.size() == grid.size());
  // Nondecreasing up to last-ulp wobble where the plateau saturates.
  for (std::size_t i = 1; i < vals.size(); ++i)
    CHECK(vals[i] >= vals[i - 1] - 1e-12);
  // Plateau: (2/3) * Gamma(2/3).
  CHECK(vals.back() == doctest::Approx(0.9027452929509336).epsilon(2e-3));
  CHECK(vals.back() < 0.9027452929509336 + 1e-12);

  CHECK_THROWS_AS(tail_exponent_plateau(3.0, {}), parameter_error);
}

TEST_CASE("tail law sandwich bounds hold from the cutoff on") {
  auto law = make_tail_law(3.0);
  CHECK(law.beta == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(law.c1 == doctest::Approx(0.9027452929509336).epsilon(1e-12));
  CHECK(law.c2 == doctest::Approx(0.69979232776149448).epsilon(1e-12));
  CHECK(law.c2 < law.c1);

  for (double lz = 0.0; lz <= 6.0; lz += 0.2) {
    double z = std::pow(10.0, lz);
    double t = tail_probability(z, law.alpha);
    double zb = std::pow(z, law.beta);
    CAPTURE(z);
    CHECK(t * zb >= law.c2 - 1e-9);
    CHECK(t * zb <= law.c1 + 1e-9);
  }

  auto law2 = make_tail_law(2.5, 4.0);
  CHECK(law2.b == 4.0);
  CHECK(law2.c2 ==
        doctest::Approx(std::pow(4.0, 0.8) * tail_probability(4.0, 2.5))
            .epsilon(1e-12));

  CHECK_THROWS_AS(make_tail_law(1.5), parameter_error);
  CHECK_THROWS_AS(make_tail_law(3.0, 0.0), parameter_error);
}

TEST_CASE("interference sampler composes the pinned kernel primitives") {
  RngStream a(505), b(505);
  for (int i = 0; i < 100; ++i) {
    std::uint64_t gbits = b.next_bits();
    std::uint64_t dbits = b.next_bits();
    CHECK(sample_interference_gain(3.0, a) ==
          kernels::pareto_gain_one(gbits, dbits, 3.0));
  }
  RngStream c(1);
  CHECK_THROWS_AS(sample_interference_gain(1.9, c), parameter_error);

  RngStream d(77);
  double acc = 0.0;
  for (int i = 0; i < 100000; ++i) acc += sample_direct_gain(d);
  CHECK(acc / 100000 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sampled gains match the analytic law at reference thresholds") {
  RngStream rng(909);
  const int reps = 200000;
  int over1 = 0, over100 = 0;
  for (int i = 0; i < reps; ++i) {
    double g = sample_interference_gain(3.0, rng);
    over1 += g > 1.0;
    over100 += g > 100.0;
  }
  double f1 = double(over1) / reps;
  double f100 = double(over100) / reps;
  double se1 = std::sqrt(0.69979 * (1 - 0.69979) / reps);
  double se100 = std::sqrt(0.04190 * (1 - 0.04190) / reps);
  CHECK(std::fabs(f1 - 0.69979232776) < 5.0 * se1);
  CHECK(std::fabs(f100 - 0.04190172471) < 5.0 * se100);

  RngStream rng2(910);
  int over = 0;
  for (int i = 0; i < reps; ++i)
    over += sample_interference_gain(2.0, rng2) > 1.0;
  CHECK(std::fabs(double(over) / reps - 0.63212055883) <
        5.0 * std::sqrt(0.632 * 0.368 / reps));
}

TEST_CASE("sampled gains pass ks against both cdf evaluations") {
  RngStream rng(2718);
  std::vector<double> sample(60000);
  for (auto& s : sample) s = sample_interference_gain(3.0, rng);
  std::sort(sample.begin(), sample.end());

  auto cdf_impl = [](double x) { return 1.0 - tail_probability(x, 3.0); };
  double d = ks_statistic(sample, cdf_impl);
  CHECK(kolmogorov_pvalue(d, sample.size()) > 1e-4);

  // Smaller fresh sample against the quadrature oracle: same law, zero
  // shared code with the implementation CDF above.
  RngStream rng2(2719);
  std::vector<double> fresh(3000);
  for (auto& s : fresh) s = sample_interference_gain(3.0, rng2);
  std::sort(fresh.begin(), fresh.end());
  auto cdf_oracle = [](double x) { return oracle::gain_cdf(x, 3.0); };
  double d2 = ks_statistic(fresh, cdf_oracle);
  CHECK(kolmogorov_pvalue(d2, fresh.size()) > 1e-4);
}

TEST_CASE("lazy gain queries and materialized channel are the same numbers") {
  auto p = base_params(100.0);
  auto f = sample_field(p, 314);
  REQUIRE(f.dipoles.size() > 200);

  GainField lazy(f, p, 314, Mode::pathloss);
  auto full = realize_channel(f, p, 314, Mode::pathloss);
  auto directs = realize_direct(f, 314);

  REQUIRE(full.size() == f.dipoles.size());
  REQUIRE(directs.size() == f.dipoles.size());
  const auto n = static_cast<std::uint32_t>(f.dipoles.size());

  for (std::uint32_t i = 0; i < n; ++i) {
    CHECK(lazy.direct(i) == full.direct[i]);
    CHECK(directs[i] == full.direct[i]);
  }

  // Every ordered pair: the sparse matrix holds exactly the nonzero lazy
  // queries, and entries agree bitwise.
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      double lz = lazy.cross(i, j);
      double mt = full.cross_at(i, j);
      CAPTURE(i);
      CAPTURE(j);
      CHECK(lz == mt);
    }
  }
}

TEST_CASE("pathloss channel stores exactly the in-range pairs") {
  auto p = base_params(80.0);
  auto f = sample_field(p, 55);
  auto ch = realize_channel(f, p, 55, Mode::pathloss);
  const auto n = static_cast<std::uint32_t>(f.dipoles.size());

  REQUIRE(ch.row_begin.size() == n + 1);
  CHECK(ch.row_begin.front() == 0);
  CHECK(ch.row_begin.back() == ch.gain.size());

  std::size_t checked = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto cols = ch.row_cols(i);
    auto gains = ch.row_gains(i);
    REQUIRE(cols.size() == gains.size());
    CHECK(ch.row_begin[i] <= ch.row_begin[i + 1]);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k > 0) CHECK(cols[k] > cols[k - 1]);  // ascending, no duplicates
      CHECK(cols[k] != i);
      CHECK(gains[k] > 0.0);
      // Entry (i, j): transmitter j within unit distance of receiver i.
      CHECK(pair_distance(f, cols[k], i) <= 1.0);
      ++checked;
    }
  }
  CHECK(checked == ch.cross_size());

  // Spot-check the complement: absent pairs are out of range.
  for (std::uint32_t i = 0; i < std::min<std::uint32_t>(n, 40); ++i)
    for (std::uint32_t j = 0; j < std::min<std::uint32_t>(n, 40); ++j) {
      if (i == j) continue;
      if (ch.cross_at(i, j) == 0.0) CHECK(pair_distance(f, j, i) > 1.0);
    }
}

TEST_CASE("no-pathloss mode fills every ordered pair with positive gains") {
  auto p = base_params(10.0, 1.0);
  auto f = sample_field_fixed_count(p, 21, 30);
  auto ch = realize_channel(f, p, 21, Mode::no_pathloss);
  GainField lazy(f, p, 21, Mode::no_pathloss);

  CHECK(ch.cross_size() == 30u * 29u);
  for (std::uint32_t i = 0; i < 30; ++i)
    for (std::uint32_t j = 0; j < 30; ++j) {
      if (i == j) {
        CHECK(lazy.cross(i, j) == 0.0);
        CHECK(ch.cross_at(i, j) == 0.0);
        continue;
      }
      double v = ch.cross_at(i, j);
      CHECK(v > 0.0);
      CHECK(lazy.cross(i, j) == v);
    }

  // Distance plays no role here: gains are plain exp(1) draws.
  double acc = 0.0;
  for (double g : ch.gain) acc += g;
  CHECK(acc / double(ch.gain.size()) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("gain queries are pure functions of seed and indices") {
  auto p = base_params(50.0);
  auto f = sample_field(p, 8);
  GainField g1(f, p, 8, Mode::pathloss);
  GainField g2(f, p, 8, Mode::pathloss);
  GainField g3(f, p, 9, Mode::pathloss);

  const auto n = static_cast<std::uint32_t>(f.dipoles.size());
  REQUIRE(n > 10);
  bool any_nonzero = false, any_differs = false;
  for (std::uint32_t i = 0; i < 10; ++i)
    for (std::uint32_t j = 0; j < n; ++j) {
      double v = g1.cross(i, j);
      CHECK(g2.cross(i, j) == v);
      CHECK(g1.cross(i, j) == v);  // repeated query, same value
      if (v != 0.0) {
        any_nonzero = true;
        if (g3.cross(i, j) != v) any_differs = true;
      }
    }
  CHECK(any_nonzero);
  CHECK(any_differs);
  CHECK(g1.direct(0) != g3.direct(0));

  CHECK(g1.cross(0, 0) == 0.0);
  CHECK_THROWS_AS(g1.cross(n, 0), index_error);
  CHECK_THROWS_AS(g1.direct(n), index_error);
}

TEST_CASE("field-coupled gains at interior receivers follow the tail law") {
  // Receivers more than unit distance inside the window border see the
  // unconditioned distance law, so their collected cross gains follow the
  // analytic CDF. Gains at different receivers share transmitters, so this
  // is a closeness bound, not an independence-based p-value.
  auto p = base_params(60.0, 16.0);
  auto f = sample_field(p, 606);
  auto ch = realize_channel(f, p, 606, Mode::pathloss);
  double R = p.window_radius();

  std::vector<double> gains;
  for (std::uint32_t i = 0; i < f.dipoles.size(); ++i) {
    const auto& rx = f.dipoles[i].rx;
    if (std::sqrt(rx.x * rx.x + rx.y * rx.y) > R - 1.0 - p.mark_radius)
      continue;
    auto row = ch.row_gains(i);
    gains.insert(gains.end(), row.begin(), row.end());
  }
  REQUIRE(gains.size() > 20000);
  std::sort(gains.begin(), gains.end());
  auto cdf = [](double x) { return 1.0 - tail_probability(x, 3.0); };
  CHECK(ks_statistic(gains, cdf) < 0.05);
}
