// magnon: run temporal-beamsplitter scenarios from the command line.
//
// Exit codes: 0 success, 1 invalid scenario or arguments, 2 runtime/I-O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "magnon/beamsplitter.hpp"
#include "magnon/report.hpp"
#include "magnon/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw magnon::OutputError("cannot read scenario file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Overrides {
  std::optional<double> g_hz;
  std::optional<double> delta_omega_hz;
  std::optional<double> omega_bar_hz;
  std::optional<double> tau_s;
  std::optional<int> n_max;
  std::optional<std::string> name;

  void apply(magnon::ScenarioConfig& c) const {
    if (g_hz) c.g_hz = *g_hz;
    if (delta_omega_hz) c.delta_omega_hz = *delta_omega_hz;
    if (omega_bar_hz) c.omega_bar_hz = *omega_bar_hz;
    if (tau_s) c.tau_s = *tau_s;
    if (n_max) c.n_max = *n_max;
    if (name) c.name = *name;
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--g-hz", o.g_hz, "Coupling g/2pi in Hz (2e7 means g = 2pi x 20 MHz)");
  cmd->add_option("--delta-omega-hz", o.delta_omega_hz, "Pulse detuning (omega1-omega2)/2pi in Hz");
  cmd->add_option("--omega-bar-hz", o.omega_bar_hz, "Mean mode frequency /2pi in Hz");
  cmd->add_option("--tau-s", o.tau_s, "Pulse duration in seconds (skips balanced calibration)");
  cmd->add_option("--n-max", o.n_max, "Total-quanta cutoff");
  cmd->add_option("--name", o.name, "Output file stem");
}

std::filesystem::path output_dir(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(magnon::kOutputDirEnv); env && *env) return env;
  return ".";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two-mode magnon temporal-beamsplitter simulator.\n"
      "All frequencies are given in Hz and multiplied by 2pi internally: g_hz = 2e7 means\n"
      "g = 2pi x 20 MHz."};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::string> out_flag;
  Overrides run_over, validate_over;

  auto* run = app.add_subcommand("run", "Run a scenario file and write CSV/JSON/SVG outputs");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out,-o", out_flag, std::string("Output directory (default: $") + magnon::kOutputDirEnv + " or .)");
  add_overrides(run, run_over);

  auto* validate = app.add_subcommand("validate", "Check a scenario file without running it");
  validate->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  add_overrides(validate, validate_over);

  double cal_g_hz = 0, cal_dw_hz = 0;
  auto* calibrate = app.add_subcommand("calibrate", "Balanced pulse duration for given g and detuning");
  calibrate->add_option("--g-hz", cal_g_hz, "Coupling g/2pi in Hz")->required();
  calibrate->add_option("--delta-omega-hz", cal_dw_hz, "Detuning /2pi in Hz");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*calibrate) {
      const double g = magnon::hz_to_rad(cal_g_hz);
      const double dw = magnon::hz_to_rad(cal_dw_hz);
      const auto rp = magnon::rabi_params(g, dw);
      const double tau = magnon::calibrate_balanced(g, dw);
      nlohmann::json out{{"g_hz", cal_g_hz}, {"delta_omega_hz", cal_dw_hz}, {"tau_s", tau},
                         {"big_omega_rad_s", rp.big_omega}, {"p_max", rp.p_max}};
      std::cout << out.dump(2) << "\n";
      return kExitOk;
    }

    const std::string text = read_file(scenario_path);
    auto config = magnon::parse_scenario_unchecked(text);
    (*run ? run_over : validate_over).apply(config);
    magnon::validate_scenario(config);

    if (*validate) {
      std::cout << "ok: " << scenario_path << " (" << magnon::to_string(config.kind) << ")\n";
      return kExitOk;
    }

    const auto outcome = magnon::run_scenario(config, output_dir(out_flag));
    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : outcome.files) std::cout << f.string() << "\n";
    return kExitOk;
  } catch (const magnon::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const magnon::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const magnon::UnreachableBalanceError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const magnon::ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
