#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dipolesim/records.hpp"

namespace dipolesim {

// Least-squares fit of mean active counts to c1 + amplitude * n^exponent.
// residual_rms is over the per-n mean points. When fixed_exponent is set the
// exponent was pinned and only (c1, amplitude) were fit.
struct ScalingFit {
  double c1 = 0.0;
  double exponent = 0.0;
  std::optional<double> fixed_exponent;
  double residual_rms = 0.0;
  std::pair<double, double> n_range = {0.0, 0.0};
  double amplitude = 0.0;
};

// Aggregates records to per-n means of eta_n, then fits. Needs >= 4 distinct
// n values; constant means are a fit_error. Free-exponent fits run a bounded
// golden-section search on the profiled residual, multi-started at
// b in {0.1, 0.25, 0.4}; the b domain is [0.02, 2] (the lower edge guards the
// near-collinear n^b -> constant regime).
ScalingFit fit_scaling(const std::vector<ExperimentRecord>& records,
                       std::optional<double> fix_exponent = std::nullopt);

// Same fit on pre-aggregated (n, mean count) points.
ScalingFit fit_scaling_points(const std::vector<std::pair<double, double>>& points,
                              std::optional<double> fix_exponent = std::nullopt);

std::string fit_to_json(const ScalingFit& fit);
ScalingFit fit_from_json(const std::string& text);

}  // namespace dipolesim
