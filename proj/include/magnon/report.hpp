#pragma once

// Running a scenario end to end and writing its artifacts:
//   <stem>.trajectory.csv  time series (or the detuning grid for phase-scan)
//   <stem>.summary.json    final probabilities, phases, tau, entropy, fidelity
//   <stem>.svg             population or phase figure
// Outputs are byte-for-byte reproducible; the only build-dependent content is
// the "tool_version" field of the summary.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "magnon/analysis.hpp"
#include "magnon/dynamics.hpp"
#include "magnon/errors.hpp"
#include "magnon/scenario.hpp"

namespace magnon {

inline constexpr const char* kToolVersion = "0.1.0";
/// Environment variable overriding the output directory.
inline constexpr const char* kOutputDirEnv = "MAGNON_OUTPUT_DIR";

class OutputError : public Error {
 public:
  using Error::Error;
};

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double x);

/// Header: t_s, P_<ket>..., Re_<ket>..., Im_<ket>... in basis order.
std::string trajectory_csv(const Trajectory<double>& traj);
/// Header: delta_omega_hz, tau_s, transfer, phi_rad, noon_phase_rad, noon_phase_wrapped_rad.
std::string phase_scan_csv(const PhaseScanResult<double>& scan);

struct RunOutcome {
  nlohmann::json summary;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/// Symmetric-safe uniform grid: exact negation symmetry when lo == -hi.
std::vector<double> uniform_grid(double lo, double hi, int points);

/// Runs the experiment, then writes the requested artifacts into `out_dir`
/// (created if needed). Throws OutputError on I/O failure.
RunOutcome run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

}  // namespace magnon
