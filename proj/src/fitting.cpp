#include "dipolesim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "dipolesim/errors.hpp"

namespace dipolesim {

namespace {

constexpr double kExpLo = 0.02;  // below this n^b is numerically constant
constexpr double kExpHi = 2.0;

using Points = std::vector<std::pair<double, double>>;

struct ProfileFit {
  double c1 = 0.0;
  double amplitude = 0.0;
  double rss = std::numeric_limits<double>::infinity();
};

// Linear least squares of y = c1 + a * x^b for a pinned b.
ProfileFit profile_at(const Points& pts, double b) {
  double s00 = static_cast<double>(pts.size());
  double s01 = 0.0, s11 = 0.0, t0 = 0.0, t1 = 0.0;
  for (const auto& [n, y] : pts) {
    double x = std::pow(n, b);
    s01 += x;
    s11 += x * x;
    t0 += y;
    t1 += x * y;
  }
  double det = s00 * s11 - s01 * s01;
  if (!(std::fabs(det) > 1e-14 * s00 * s11)) return {};  // collinear design
  ProfileFit f;
  f.amplitude = (s00 * t1 - s01 * t0) / det;
  f.c1 = (t0 * s11 - s01 * t1) / det;
  f.rss = 0.0;
  for (const auto& [n, y] : pts) {
    double r = y - f.c1 - f.amplitude * std::pow(n, b);
    f.rss += r * r;
  }
  return f;
}

template <class F>
double golden_min(double lo, double hi, F&& f) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Local minimum of f near start: walk downhill with doubling steps until the
// objective turns (bracket, refined by golden section) or a domain edge is
// reached while still descending (the edge is the local optimum then).
template <class F>
double local_min_from(double start, F&& f) {
  double h = 0.05;
  double fl = f(std::max(kExpLo, start - h));
  double fs = f(start);
  double fr = f(std::min(kExpHi, start + h));
  if (fs <= fl && fs <= fr)
    return golden_min(std::max(kExpLo, start - h), std::min(kExpHi, start + h),
                      f);
  double dir = fr < fl ? 1.0 : -1.0;
  double prev = start;
  double cur = std::clamp(start + dir * h, kExpLo, kExpHi);
  double fcur = dir > 0.0 ? fr : fl;
  for (;;) {
    if ((dir > 0.0 && cur >= kExpHi) || (dir < 0.0 && cur <= kExpLo))
      return cur;  // ran downhill into the domain edge
    h *= 2.0;
    double nxt = std::clamp(cur + dir * h, kExpLo, kExpHi);
    double fnxt = f(nxt);
    if (fnxt >= fcur)
      return golden_min(std::min(prev, nxt), std::max(prev, nxt), f);
    prev = cur;
    cur = nxt;
    fcur = fnxt;
  }
}

ScalingFit fit_points(const Points& pts, std::optional<double> fix_exponent) {
  if (pts.size() < 4)
    throw fit_error("scaling fit needs at least 4 distinct n values");
  {
    std::vector<double> xs;
    for (const auto& [n, y] : pts) {
      if (!(std::isfinite(n) && n > 0.0))
        throw fit_error("scaling fit needs finite n > 0");
      if (!std::isfinite(y)) throw fit_error("scaling fit needs finite counts");
      xs.push_back(n);
    }
    std::sort(xs.begin(), xs.end());
    if (std::unique(xs.begin(), xs.end()) - xs.begin() < 4)
      throw fit_error("scaling fit needs at least 4 distinct n values");
  }
  double ymin = pts[0].second, ymax = pts[0].second;
  for (const auto& [n, y] : pts) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (ymax == ymin)
    throw fit_error("scaling fit is degenerate: counts are constant");

  double b;
  if (fix_exponent.has_value()) {
    b = *fix_exponent;
    if (!(std::isfinite(b) && b > 0.0))
      throw fit_error("fixed exponent must be finite and > 0");
  } else {
    auto rss_at = [&](double bb) { return profile_at(pts, bb).rss; };
    // Multi-start against local minima, domain edges included since a
    // monotone objective walks into them.
    std::vector<double> candidates = {kExpLo, kExpHi};
    for (double s : {0.1, 0.25, 0.4})
      candidates.push_back(local_min_from(s, rss_at));
    b = candidates.front();
    double best = rss_at(b);
    for (double c : candidates) {
      double v = rss_at(c);
      if (v < best) {
        best = v;
        b = c;
      }
    }
  }

  ProfileFit prof = profile_at(pts, b);
  if (!std::isfinite(prof.rss))
    throw fit_error("scaling fit is degenerate at the chosen exponent");
  ScalingFit fit;
  fit.c1 = prof.c1;
  fit.exponent = b;
  fit.fixed_exponent = fix_exponent;
  fit.residual_rms = std::sqrt(prof.rss / static_cast<double>(pts.size()));
  fit.amplitude = prof.amplitude;
  double nlo = pts[0].first, nhi = pts[0].first;
  for (const auto& [n, y] : pts) {
    nlo = std::min(nlo, n);
    nhi = std::max(nhi, n);
  }
  fit.n_range = {nlo, nhi};
  return fit;
}

}  // namespace

ScalingFit fit_scaling(const std::vector<ExperimentRecord>& records,
                       std::optional<double> fix_exponent) {
  std::map<double, std::pair<double, std::uint64_t>> agg;
  for (const ExperimentRecord& r : records) {
    auto& [sum, count] = agg[r.n];
    sum += static_cast<double>(r.eta_n);
    count += 1;
  }
  Points pts;
  pts.reserve(agg.size());
  for (const auto& [n, sc] : agg)
    pts.emplace_back(n, sc.first / static_cast<double>(sc.second));
  return fit_points(pts, fix_exponent);
}

ScalingFit fit_scaling_points(const Points& points,
                              std::optional<double> fix_exponent) {
  return fit_points(points, fix_exponent);
}

std::string fit_to_json(const ScalingFit& fit) {
  nlohmann::json j;
  j["c1"] = fit.c1;
  j["exponent"] = fit.exponent;
  if (fit.fixed_exponent.has_value())
    j["fixed_exponent"] = *fit.fixed_exponent;
  else
    j["fixed_exponent"] = nullptr;
  j["residual_rms"] = fit.residual_rms;
  j["n_range"] = {fit.n_range.first, fit.n_range.second};
  j["amplitude"] = fit.amplitude;
  return j.dump(2) + "\n";
}

ScalingFit fit_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw fit_error(std::string("malformed fit JSON: ") + e.what());
  }
  try {
    ScalingFit fit;
    fit.c1 = j.at("c1").get<double>();
    fit.exponent = j.at("exponent").get<double>();
    if (j.contains("fixed_exponent") && !j["fixed_exponent"].is_null())
      fit.fixed_exponent = j["fixed_exponent"].get<double>();
    fit.residual_rms = j.at("residual_rms").get<double>();
    fit.n_range = {j.at("n_range").at(0).get<double>(),
                   j.at("n_range").at(1).get<double>()};
    fit.amplitude = j.at("amplitude").get<double>();
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw fit_error(std::string("bad fit JSON: ") + e.what());
  }
}

}  // namespace dipolesim
