#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dipolesim/fitting.hpp"
#include "dipolesim/records.hpp"

namespace dipolesim {

// SVG scatter of per-replication active counts vs n, fitted curve overlaid
// when a fit is given and the data spans more than one n. Deterministic
// bytes for fixed inputs (fixed 2-decimal coordinates, no timestamps).
// Empty records is a parameter_error.
std::string render_plot_svg(const std::vector<ExperimentRecord>& records,
                            const std::optional<ScalingFit>& fit);

// render_plot_svg written to path; io_error on failure.
void emit_plot(const std::vector<ExperimentRecord>& records,
               const std::optional<ScalingFit>& fit, const std::string& path);

}  // namespace dipolesim
