#pragma once

// Scenario files: a strict JSON description of one experiment.
//
// Frequencies in the file are ordinary frequencies in Hz; g_hz = 2.0e7 means
// g = 2*pi*20 MHz. They are stored in Hz here and converted to rad/s exactly
// once, by the accessors below, when the physics is set up.

#include "json.hpp"

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "magnon/errors.hpp"

namespace magnon {

/// Malformed scenario text or schema violation. The message starts with a
/// JSON pointer to the offending value.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed scenario that is physically inadmissible.
class ValidationError : public Error {
 public:
  using Error::Error;
};

enum class ExperimentKind { rabi, tbs_single, hom, phase_scan, evolve };
enum class Frame { lab, rotating };
enum class OutputKind { csv, json, svg };

std::string to_string(ExperimentKind kind);
std::string to_string(Frame frame);
std::string to_string(OutputKind kind);

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline double hz_to_rad(double hz) { return kTwoPi * hz; }
inline double rad_to_hz(double rad) { return rad / kTwoPi; }

struct AmplitudeTerm {
  int m1 = 0;
  int m2 = 0;
  double re = 1.0;
  double im = 0.0;
  friend bool operator==(const AmplitudeTerm&, const AmplitudeTerm&) = default;
};

struct SegmentSpec {
  double delta_omega_hz = 0.0;
  /// Falls back to the scenario's omega_bar_hz.
  std::optional<double> omega_bar_hz;
  double duration_s = 0.0;
  friend bool operator==(const SegmentSpec&, const SegmentSpec&) = default;
};

struct ScanSpec {
  double min_hz = 0.0;
  double max_hz = 0.0;
  int points = 41;
  friend bool operator==(const ScanSpec&, const ScanSpec&) = default;
};

struct ScenarioConfig {
  std::string name;
  /// Free text for humans; ignored by the simulation.
  std::string description;
  ExperimentKind kind = ExperimentKind::hom;
  int n_max = 2;
  double g_hz = 0.0;
  double g_phase_rad = 0.0;
  double delta_omega_hz = 0.0;
  double omega_bar_hz = 5.0e9;
  Frame frame = Frame::lab;
  std::optional<double> tau_s;
  std::optional<double> hold_detuning_hz;
  double pre_hold_s = 10e-9;
  double post_hold_s = 10e-9;
  /// Evolution time of the rabi experiment; defaults to one Rabi period.
  std::optional<double> duration_s;
  /// phase-scan grid; defaults to 41 points over [-2g, 2g].
  std::optional<ScanSpec> scan;
  /// Explicit piecewise-constant schedule (required for evolve, an override
  /// of the built-in hold/pulse/hold sequence for tbs-single and hom).
  std::vector<SegmentSpec> schedule;
  std::vector<AmplitudeTerm> initial_state;
  std::vector<OutputKind> outputs{OutputKind::csv, OutputKind::json, OutputKind::svg};
  int samples_per_segment = 50;
  /// Reserved; the dynamics are deterministic.
  std::optional<std::uint64_t> seed;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;

  double g_abs() const { return hz_to_rad(g_hz); }
  double delta_omega() const { return hz_to_rad(delta_omega_hz); }
  double omega_bar() const { return hz_to_rad(omega_bar_hz); }
  bool wants(OutputKind k) const;
  /// Name used for output files.
  std::string output_stem() const;
  bool balanced_request() const;
};

/// Parses and validates. Throws ParseError or ValidationError.
ScenarioConfig parse_scenario(std::string_view text);
/// Schema check only, no physics validation.
ScenarioConfig parse_scenario_unchecked(std::string_view text);
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& config);
std::string serialize_scenario(const ScenarioConfig& config);

/// Physics checks: coupling, admissible detuning, cutoff, durations.
void validate_scenario(const ScenarioConfig& config);

}  // namespace magnon
