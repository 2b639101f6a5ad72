#pragma once

// Dependency-free SVG figures: population traces versus time and N00N phase
// versus detuning.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "magnon/analysis.hpp"
#include "magnon/dynamics.hpp"

namespace magnon {

struct PopulationSeries {
  std::string title;
  std::vector<double> times_s;
  std::vector<std::string> labels;         // ket labels, e.g. "10"
  std::vector<std::vector<double>> values;  // values[series][sample]
  /// Interaction window [start, end] in seconds, drawn as a gray band.
  std::optional<std::pair<double, double>> window_s;
};

struct PhaseSeries {
  std::string title;
  std::vector<double> detunings_hz;  // delta_omega / 2pi
  std::vector<double> phases_rad;
};

enum class PlotKind { populations, phase_scan };
using PlotSource = std::variant<PopulationSeries, PhaseSeries>;

/// Series for every basis state whose population exceeds `threshold` at
/// some sample.
PopulationSeries population_series(const Trajectory<double>& traj, std::string title,
                                   std::optional<std::pair<double, double>> window_s = std::nullopt,
                                   double threshold = 1e-6);

PhaseSeries phase_series(const PhaseScanResult<double>& scan, std::string title);

/// Throws ContractViolation when `kind` does not match the source or the
/// source has no samples.
std::string emit_plot(const PlotSource& source, PlotKind kind);

}  // namespace magnon
