#include "magnon/report.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <system_error>
#include <utility>

#include "magnon/beamsplitter.hpp"
#include "magnon/plot.hpp"

namespace magnon {

using nlohmann::json;

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string column_label(const FockIndex& idx, int n_max) {
  if (n_max < 10) return ket_label(idx);
  return std::to_string(idx.m1) + "_" + std::to_string(idx.m2);
}

json probabilities_json(const StateVector<double>& s) {
  json out = json::object();
  for (const auto& idx : s.basis().states())
    out["P_" + column_label(idx, s.basis().n_max())] = population(s, idx);
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> try_phase(const StateVector<double>& s, FockIndex from, FockIndex to) {
  if (!s.basis().contains(from) || !s.basis().contains(to)) return std::nullopt;
  try {
    return extract_relative_phase(s, from, to);
  } catch (const UndefinedPhaseError&) {
    return std::nullopt;
  }
}

/// Entanglement and N00N metrics of a state.
void state_metrics(json& j, const StateVector<double>& s) {
  j["entropy_nats"] = entanglement_entropy(s);
  if (s.basis().n_max() >= 2) {
    const auto nf = noon_fidelity(s, 0.0);
    j["noon_fidelity"] = nf.best_fidelity;
  }
}

StateVector<double> initial_state(const ScenarioConfig& c, const FockBasis& basis, FockIndex fallback) {
  if (c.initial_state.empty()) return StateVector<double>::fock(basis, fallback);
  std::vector<FockTerm> terms;
  for (const auto& t : c.initial_state) terms.push_back({{t.m1, t.m2}, {t.re, t.im}});
  return make_state(basis, terms);
}

/// Mean frequency used in the simulation: zero in the rotating frame.
double frame_omega_bar(const ScenarioConfig& c) { return c.frame == Frame::lab ? c.omega_bar() : 0.0; }

PulseSchedule<double> explicit_schedule(const ScenarioConfig& c, std::complex<double> g) {
  PulseSchedule<double> sched;
  const double shift = c.frame == Frame::lab ? 0.0 : -c.omega_bar();
  for (const auto& s : c.schedule) {
    const double wbar = hz_to_rad(s.omega_bar_hz.value_or(c.omega_bar_hz)) + shift;
    sched.append(HamiltonianParams<double>::from_gap(wbar, hz_to_rad(s.delta_omega_hz), g), s.duration_s);
  }
  return sched;
}

struct Artifacts {
  std::string csv;
  std::optional<PlotSource> plot;
  PlotKind plot_kind = PlotKind::populations;
};

}  // namespace

std::string trajectory_csv(const Trajectory<double>& traj) {
  std::string out = "t_s";
  if (traj.empty()) return out + "\n";
  const auto& basis = traj.states.front().basis();
  const auto states = basis.states();
  for (const char* prefix : {"P_", "Re_", "Im_"})
    for (const auto& idx : states) out += std::string(",") + prefix + column_label(idx, basis.n_max());
  out += "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_number(traj.times[i]);
    const auto& amps = traj.states[i].amplitudes();
    for (Eigen::Index j = 0; j < amps.size(); ++j) out += "," + format_number(traj.populations[i](j));
    for (Eigen::Index j = 0; j < amps.size(); ++j) out += "," + format_number(amps(j).real());
    for (Eigen::Index j = 0; j < amps.size(); ++j) out += "," + format_number(amps(j).imag());
    out += "\n";
  }
  return out;
}

std::string phase_scan_csv(const PhaseScanResult<double>& scan) {
  std::string out = "delta_omega_hz,tau_s,transfer,phi_rad,noon_phase_rad,noon_phase_wrapped_rad\n";
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const auto& p = scan.points[i];
    out += format_number(rad_to_hz(p.delta_omega)) + "," + format_number(p.tau) + "," +
           format_number(p.transfer) + "," + format_number(p.phi) + "," + format_number(scan.phases[i]) +
           "," + format_number(p.noon_phase_wrapped) + "\n";
  }
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 1) return {};
  if (points == 1) return {(lo + hi) / 2};
  const double center = (lo + hi) / 2;
  const double half = (hi - lo) / 2;
  std::vector<double> out;
  for (int i = 0; i < points; ++i)
    out.push_back(center + half * static_cast<double>(2 * i - (points - 1)) / static_cast<double>(points - 1));
  return out;
}

RunOutcome run_scenario(const ScenarioConfig& c, const std::filesystem::path& out_dir) {
  validate_scenario(c);
  const FockBasis basis(c.n_max);
  const std::complex<double> g = std::polar(c.g_abs(), c.g_phase_rad);
  const double dw = c.delta_omega();
  const double wbar = frame_omega_bar(c);

  RunOutcome outcome;
  json& j = outcome.summary;
  j["tool_version"] = kToolVersion;
  j["kind"] = to_string(c.kind);
  j["name"] = c.output_stem();
  j["n_max"] = c.n_max;
  j["frame"] = to_string(c.frame);
  j["g_hz"] = c.g_hz;
  j["g_rad_s"] = c.g_abs();
  j["g_phase_rad"] = c.g_phase_rad;
  j["delta_omega_hz"] = c.delta_omega_hz;
  j["delta_omega_rad_s"] = dw;
  j["omega_bar_rad_s"] = c.omega_bar();

  Artifacts art;
  const auto spp = static_cast<std::size_t>(c.samples_per_segment);

  ProtocolOptions<double> opt;
  opt.n_max = c.n_max;
  opt.omega_bar = wbar;
  opt.pre_hold = c.pre_hold_s;
  opt.post_hold = c.post_hold_s;
  if (c.hold_detuning_hz) opt.hold_detuning = hz_to_rad(*c.hold_detuning_hz);
  opt.tau = c.tau_s;
  opt.samples_per_segment = spp;

  switch (c.kind) {
    case ExperimentKind::rabi: {
      const auto rp = rabi_params(g, dw);
      const double duration = c.duration_s.value_or(2 * std::numbers::pi / rp.big_omega);
      const auto psi0 = initial_state(c, basis, k10);
      PulseSchedule<double> sched;
      sched.append(HamiltonianParams<double>::from_gap(wbar, dw, g), duration);
      const auto traj = evolve(sched, psi0, spp);
      j["big_omega_rad_s"] = rp.big_omega;
      j["p_max"] = rp.p_max;
      j["duration_s"] = duration;
      if (c.initial_state.empty()) {
        double worst = 0;
        for (std::size_t i = 0; i < traj.size(); ++i)
          worst = std::max(worst, std::abs(population(traj.states[i], k01) - rp.transfer_probability(traj.times[i])));
        j["max_oracle_deviation"] = worst;
      }
      j["final_probabilities"] = probabilities_json(traj.final_state());
      state_metrics(j, traj.final_state());
      art.csv = trajectory_csv(traj);
      art.plot = population_series(traj, "Rabi oscillation");
      break;
    }
    case ExperimentKind::tbs_single:
    case ExperimentKind::hom: {
      const bool hom = c.kind == ExperimentKind::hom;
      const FockIndex from = hom ? k20 : k10;
      const FockIndex to = hom ? k02 : k01;
      const auto psi0 = initial_state(c, basis, hom ? k11 : k10);
      const std::string title = hom ? "Two-magnon interference" : "Single-magnon temporal beamsplitter";
      if (!c.schedule.empty()) {
        const auto traj = evolve(explicit_schedule(c, g), psi0, spp);
        j["final_probabilities"] = probabilities_json(traj.final_state());
        j[hom ? "noon_phase_rad" : "phi_rad"] = optional_number(try_phase(traj.final_state(), from, to));
        state_metrics(j, traj.final_state());
        art.csv = trajectory_csv(traj);
        art.plot = population_series(traj, title);
        break;
      }
      const auto run = run_protocol(g, dw, psi0, opt);
      const auto& pulse = run.protocol.pulse;
      j["tau_s"] = pulse.tau;
      j["balanced"] = pulse.balanced;
      j["window_s"] = {run.protocol.window_start, run.protocol.window_end};
      j["final_probabilities"] = probabilities_json(run.trajectory.final_state());
      j["window_probabilities"] = probabilities_json(run.window_output);
      const auto single = apply_tbs(pulse, StateVector<double>::fock(basis, k10));
      j["phi_rad"] = optional_number(try_phase(single, k10, k01));
      if (hom) {
        j["noon_phase_rad"] = optional_number(try_phase(run.window_output, k20, k02));
        j["dip_depth"] = 1 - population(run.trajectory.final_state(), k11);
      }
      state_metrics(j, run.window_output);
      art.csv = trajectory_csv(run.trajectory);
      art.plot = population_series(run.trajectory, title,
                                   std::pair{run.protocol.window_start, run.protocol.window_end});
      break;
    }
    case ExperimentKind::phase_scan: {
      const ScanSpec spec = c.scan.value_or(ScanSpec{-2 * c.g_hz, 2 * c.g_hz, 41});
      std::vector<double> grid;
      for (double hz : uniform_grid(spec.min_hz, spec.max_hz, spec.points)) grid.push_back(hz_to_rad(hz));
      const auto scan = phase_scan(g, grid, wbar, c.n_max);
      outcome.warnings = scan.warnings;
      j["points"] = scan.size();
      std::vector<double> hz;
      for (double d : scan.detunings) hz.push_back(rad_to_hz(d));
      j["delta_omega_hz_grid"] = hz;
      j["noon_phase_rad"] = scan.phases;
      std::vector<double> phis;
      for (const auto& p : scan.points) phis.push_back(p.phi);
      j["phi_rad"] = phis;
      j["tau_s"] = scan.taus;
      j["warnings"] = scan.warnings;
      art.csv = phase_scan_csv(scan);
      art.plot = phase_series(scan, "N00N phase versus detuning");
      art.plot_kind = PlotKind::phase_scan;
      break;
    }
    case ExperimentKind::evolve: {
      const auto psi0 = initial_state(c, basis, k00);
      const auto traj = evolve(explicit_schedule(c, g), psi0, spp);
      j["duration_s"] = traj.times.back();
      j["final_probabilities"] = probabilities_json(traj.final_state());
      state_metrics(j, traj.final_state());
      art.csv = trajectory_csv(traj);
      art.plot = population_series(traj, "Evolution");
      break;
    }
  }

  // All computation is done; write everything from here.
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  const std::string stem = c.output_stem();
  if (c.wants(OutputKind::csv)) files.emplace_back(out_dir / (stem + ".trajectory.csv"), art.csv);
  if (c.wants(OutputKind::json)) files.emplace_back(out_dir / (stem + ".summary.json"), j.dump(2) + "\n");
  if (c.wants(OutputKind::svg) && art.plot) files.emplace_back(out_dir / (stem + ".svg"), emit_plot(*art.plot, art.plot_kind));

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw OutputError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  for (const auto& [path, content] : files) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw OutputError("cannot open " + path.string() + " for writing");
    os << content;
    os.close();
    if (!os) throw OutputError("failed writing " + path.string());
    outcome.files.push_back(path);
  }
  return outcome;
}

}  // namespace magnon
