#pragma once

// The three beamsplitter experiments (single-quantum splitting, two-quantum
// HOM / N00N generation, N00N phase versus detuning) and entanglement measures.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "magnon/beamsplitter.hpp"
#include "magnon/dynamics.hpp"
#include "magnon/fock.hpp"

namespace magnon {

inline constexpr FockIndex k00{0, 0};
inline constexpr FockIndex k10{1, 0};
inline constexpr FockIndex k01{0, 1};
inline constexpr FockIndex k20{2, 0};
inline constexpr FockIndex k11{1, 1};
inline constexpr FockIndex k02{0, 2};

/// Default hold detuning in units of |g|: leakage p_max = 4/(4 + 50^2) < 2e-3.
inline constexpr double kHoldDetuningFactor = 50.0;

template <typename Real = double>
struct ProtocolOptions {
  int n_max = 2;
  Real omega_bar = 0;
  Real pre_hold = 0;
  Real post_hold = 0;
  /// Detuning during hold windows; defaults to kHoldDetuningFactor * |g|.
  std::optional<Real> hold_detuning;
  /// Pulse duration; defaults to the balanced calibration.
  std::optional<Real> tau;
  /// Round hold windows up to whole periods of the hold Rabi oscillation, so
  /// each hold acts on every block as a global phase at its end points.
  bool snap_holds = true;
  bool pulse = true;
  std::size_t samples_per_segment = 50;
};

/// Schedule hold / pulse / hold with the pulse window location.
template <typename Real = double>
struct TbsProtocol {
  PulseSchedule<Real> schedule;
  TbsPulse<Real> pulse;
  Real window_start = 0;
  Real window_end = 0;
  /// Index of the pulse segment, or -1 when the schedule holds only.
  int pulse_segment = -1;
};

template <typename Real>
Real snap_to_period(Real duration, Real period) {
  if (!(duration > Real(0))) return Real(0);
  return std::ceil(duration / period * (1 - Real(1e-12))) * period;
}

template <typename Real>
TbsProtocol<Real> build_tbs_protocol(Complex<Real> g, Real delta_omega,
                                     const ProtocolOptions<Real>& opt) {
  const Real g_abs = std::abs(g);
  const Real hold_dw = opt.hold_detuning.value_or(Real(kHoldDetuningFactor) * g_abs);
  Real pre = opt.pre_hold;
  Real post = opt.post_hold;
  if (opt.snap_holds) {
    const Real hold_omega = std::sqrt(4 * g_abs * g_abs + hold_dw * hold_dw);
    if (hold_omega > Real(0)) {
      const Real period = 2 * std::numbers::pi_v<Real> / hold_omega;
      pre = snap_to_period(pre, period);
      post = snap_to_period(post, period);
    }
  }

  TbsProtocol<Real> out;
  if (opt.pulse) {
    if (opt.tau) {
      out.pulse = {delta_omega, g, *opt.tau, opt.omega_bar, false};
    } else {
      out.pulse = TbsPulse<Real>::balanced_pulse(g, delta_omega, opt.omega_bar);
    }
  }
  const auto hold = HamiltonianParams<Real>::from_gap(opt.omega_bar, hold_dw, g);
  if (pre > Real(0)) out.schedule.append(hold, pre);
  out.window_start = pre;
  if (opt.pulse) {
    out.pulse_segment = static_cast<int>(out.schedule.size());
    out.schedule.append(out.pulse.params(), out.pulse.tau);
    out.window_end = pre + out.pulse.tau;
  } else {
    out.window_end = pre;
  }
  if (post > Real(0)) out.schedule.append(hold, post);
  if (out.schedule.empty()) throw ContractViolation("TBS protocol: schedule is empty");
  return out;
}

/// A protocol run: full trajectory plus the state at the end of the pulse window.
template <typename Real = double>
struct ProtocolRun {
  TbsProtocol<Real> protocol;
  Trajectory<Real> trajectory;
  StateVector<Real> window_output;
};

template <typename Real>
ProtocolRun<Real> run_protocol(Complex<Real> g, Real delta_omega, const StateVector<Real>& psi0,
                               const ProtocolOptions<Real>& opt) {
  auto protocol = build_tbs_protocol(g, delta_omega, opt);
  auto traj = evolve(protocol.schedule, psi0, opt.samples_per_segment);
  // Sample index at the end of the pulse (or at the start of an absent pulse).
  std::size_t segs_through_window = protocol.pulse_segment >= 0
                                        ? static_cast<std::size_t>(protocol.pulse_segment) + 1
                                        : (protocol.window_start > Real(0) ? 1u : 0u);
  StateVector<Real> out = traj.states[segs_through_window * opt.samples_per_segment];
  return {std::move(protocol), std::move(traj), std::move(out)};
}

template <typename Real = double>
struct SingleMagnonResult {
  ProtocolRun<Real> run;
  /// Populations of |10> and |01> at the end of the trajectory.
  Real p10 = 0;
  Real p01 = 0;
  /// arg(c01 / c10) at the end of the pulse window; empty when undefined.
  std::optional<Real> phi;
};

template <typename Real>
SingleMagnonResult<Real> run_single_magnon_tbs(Complex<Real> g, Real delta_omega,
                                               const ProtocolOptions<Real>& opt = {}) {
  const FockBasis basis(opt.n_max);
  auto run = run_protocol(g, delta_omega, StateVector<Real>::fock(basis, k10), opt);
  SingleMagnonResult<Real> res{std::move(run), 0, 0, std::nullopt};
  const auto& fin = res.run.trajectory.final_state();
  res.p10 = population(fin, k10);
  res.p01 = population(fin, k01);
  try {
    res.phi = extract_relative_phase(res.run.window_output, k10, k01);
  } catch (const UndefinedPhaseError&) {
  }
  return res;
}

template <typename Real = double>
struct HomResult {
  ProtocolRun<Real> run;
  Real p20 = 0;
  Real p11 = 0;
  Real p02 = 0;
  /// 1 - P(1,1) at the end of the trajectory.
  Real dip_depth = 0;
  /// arg(c02 / c20) at the end of the pulse window; empty when undefined.
  std::optional<Real> noon_phase;

  const Trajectory<Real>& trajectory() const { return run.trajectory; }
};

template <typename Real>
HomResult<Real> run_hom(Complex<Real> g, Real delta_omega, const ProtocolOptions<Real>& opt = {}) {
  if (opt.n_max < 2) throw ContractViolation("run_hom: needs n_max >= 2");
  const FockBasis basis(opt.n_max);
  auto run = run_protocol(g, delta_omega, StateVector<Real>::fock(basis, k11), opt);
  HomResult<Real> res{std::move(run), 0, 0, 0, 0, std::nullopt};
  const auto& fin = res.run.trajectory.final_state();
  res.p20 = population(fin, k20);
  res.p11 = population(fin, k11);
  res.p02 = population(fin, k02);
  res.dip_depth = 1 - res.p11;
  try {
    res.noon_phase = extract_relative_phase(res.run.window_output, k20, k02);
  } catch (const UndefinedPhaseError&) {
  }
  return res;
}

/// Coincidence probability after a pulse with single-quantum transfer P:
/// c11 = |alpha|^2 - |beta|^2, so P(1,1) = (1 - 2P)^2.
template <typename Real>
Real hom_coincidence_oracle(Real transfer_probability) {
  const Real d = 1 - 2 * transfer_probability;
  return d * d;
}

template <typename Real = double>
struct PhaseScanPoint {
  Real delta_omega = 0;
  Real tau = 0;
  Real transfer = 0;
  /// Single-quantum phase arg(c01 / c10), principal value.
  Real phi = 0;
  /// N00N phase arg(c02 / c20), principal value.
  Real noon_phase_wrapped = 0;
};

template <typename Real = double>
struct PhaseScanResult {
  std::vector<Real> detunings;
  /// N00N phase, unwrapped along the grid.
  std::vector<Real> phases;
  std::vector<Real> taus;
  std::vector<PhaseScanPoint<Real>> points;
  std::vector<std::string> warnings;

  std::size_t size() const { return detunings.size(); }
};

/// Unwraps principal-value phases by nearest-branch continuation outward
/// from `anchor`, whose value is kept as is. Returns the largest step seen.
template <typename Real>
Real unwrap_from(std::vector<Real>& phases, std::size_t anchor) {
  constexpr Real two_pi = 2 * std::numbers::pi_v<Real>;
  Real worst = 0;
  auto link = [&](std::size_t from, std::size_t to) {
    const Real step = std::remainder(phases[to] - phases[from], two_pi);
    phases[to] = phases[from] + step;
    worst = std::max(worst, std::abs(step));
  };
  for (std::size_t i = anchor + 1; i < phases.size(); ++i) link(i - 1, i);
  for (std::size_t i = anchor; i-- > 0;) link(i + 1, i);
  return worst;
}

/// Balanced-pulse sweep over `grid`. Points outside |dw| <= 2|g| are skipped
/// and reported in `warnings`. The N00N phase is unwrapped from the grid
/// point nearest to resonance.
template <typename Real>
PhaseScanResult<Real> phase_scan(Complex<Real> g, const std::vector<Real>& grid, Real omega_bar = 0,
                                 int n_max = 2) {
  if (n_max < 2) throw ContractViolation("phase_scan: needs n_max >= 2");
  const FockBasis basis(n_max);
  const auto one = StateVector<Real>::fock(basis, k10);
  const auto two = StateVector<Real>::fock(basis, k11);

  PhaseScanResult<Real> res;
  for (const Real dw : grid) {
    if (std::abs(dw) > 2 * std::abs(g) * (1 + Real(1e-12))) {
      res.warnings.push_back("skipped delta_omega = " + std::to_string(static_cast<double>(dw)) +
                             " rad/s: outside |delta_omega| <= 2|g|");
      continue;
    }
    const auto pulse = TbsPulse<Real>::balanced_pulse(g, dw, omega_bar);
    const auto u = tbs_propagator(pulse, basis);
    const auto s1 = u.apply(one);
    const auto s2 = u.apply(two);
    PhaseScanPoint<Real> p;
    p.delta_omega = dw;
    p.tau = pulse.tau;
    p.transfer = population(s1, k01);
    if (std::abs(p.transfer - Real(0.5)) > Real(1e-9))
      throw Error("phase_scan: pulse at delta_omega = " + std::to_string(static_cast<double>(dw)) +
                  " is not balanced");
    p.phi = extract_relative_phase(s1, k10, k01);
    p.noon_phase_wrapped = extract_relative_phase(s2, k20, k02);
    res.detunings.push_back(dw);
    res.taus.push_back(p.tau);
    res.phases.push_back(p.noon_phase_wrapped);
    res.points.push_back(p);
  }
  if (!res.phases.empty()) {
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < res.detunings.size(); ++i)
      if (std::abs(res.detunings[i]) < std::abs(res.detunings[anchor])) anchor = i;
    const Real worst = unwrap_from(res.phases, anchor);
    if (worst > std::numbers::pi_v<Real> / 2)
      res.warnings.push_back("phase step of " + std::to_string(static_cast<double>(worst)) +
                             " rad between neighbouring points; grid may be too coarse to unwrap");
  }
  return res;
}

/// Reduced state of one mode over its Fock states 0..n_max.
template <typename Real>
CMatrix<Real> reduced_density_matrix(const StateVector<Real>& state, Mode keep) {
  const int n = state.basis().n_max();
  CMatrix<Real> coeff = CMatrix<Real>::Zero(n + 1, n + 1);  // coeff(m1, m2)
  for (const auto& idx : state.basis().states()) coeff(idx.m1, idx.m2) = state.amplitude(idx);
  if (keep == Mode::one) return coeff * coeff.adjoint();
  return coeff.transpose() * coeff.conjugate();
}

/// Von Neumann entropy (nats) of the mode-1 reduced state.
template <typename Real>
Real entanglement_entropy(const StateVector<Real>& state) {
  const CMatrix<Real> rho = reduced_density_matrix(state, Mode::one);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(rho, Eigen::EigenvaluesOnly);
  Real s = 0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const Real p = solver.eigenvalues()(i);
    if (p > Real(1e-14)) s -= p * std::log(p);
  }
  return s;
}

template <typename Real = double>
struct NoonFidelity {
  /// |<N00N(phi)|psi>|^2 at the requested phi.
  Real fidelity = 0;
  /// Phase maximizing the fidelity, arg(c02 / c20).
  Real best_phi = 0;
  /// (|c20| + |c02|)^2 / 2.
  Real best_fidelity = 0;
};

/// Overlap with (|20> + e^{i phi}|02>)/sqrt(2).
template <typename Real>
NoonFidelity<Real> noon_fidelity(const StateVector<Real>& state, Real phi) {
  NoonFidelity<Real> out;
  if (state.basis().n_max() < 2) return out;
  const Complex<Real> c20 = state.amplitude(k20);
  const Complex<Real> c02 = state.amplitude(k02);
  const Complex<Real> overlap = (c20 + std::polar(Real(1), -phi) * c02) / std::sqrt(Real(2));
  out.fidelity = std::norm(overlap);
  out.best_phi = std::arg(c02 * std::conj(c20));
  const Real sum = std::abs(c20) + std::abs(c02);
  out.best_fidelity = sum * sum / 2;
  return out;
}

}  // namespace magnon
