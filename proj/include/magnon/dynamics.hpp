#pragma once

// Coupled two-mode Hamiltonian, pulse schedules and state propagation.
//
// Units: hbar = 1, every frequency is an angular frequency in rad/s and every
// duration is in seconds.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "magnon/errors.hpp"
#include "magnon/fock.hpp"

namespace magnon {

template <typename Real = double>
struct HamiltonianParams {
  Real omega1 = 0;
  Real omega2 = 0;
  Complex<Real> g{0, 0};

  /// Modes at omega_bar +/- delta_omega/2.
  static HamiltonianParams from_gap(Real omega_bar, Real delta_omega, Complex<Real> g) {
    return {omega_bar + delta_omega / 2, omega_bar - delta_omega / 2, g};
  }

  Real delta_omega() const { return omega1 - omega2; }
  Real omega_bar() const { return (omega1 + omega2) / 2; }

  friend bool operator==(const HamiltonianParams&, const HamiltonianParams&) = default;
};

template <typename Real = double>
struct Segment {
  HamiltonianParams<Real> params;
  Real duration = 0;
};

/// Piecewise-constant schedule: rectangular pulses applied in order.
template <typename Real = double>
class PulseSchedule {
 public:
  PulseSchedule() = default;
  explicit PulseSchedule(std::vector<Segment<Real>> segments) {
    for (auto& s : segments) append(s.params, s.duration);
  }

  PulseSchedule& append(const HamiltonianParams<Real>& params, Real duration) {
    if (!(duration > Real(0)) || !std::isfinite(static_cast<double>(duration)))
      throw ContractViolation("PulseSchedule: segment duration must be finite and > 0");
    if (!std::isfinite(static_cast<double>(params.omega1)) ||
        !std::isfinite(static_cast<double>(params.omega2)))
      throw ContractViolation("PulseSchedule: mode frequencies must be finite");
    segments_.push_back({params, duration});
    return *this;
  }

  const std::vector<Segment<Real>>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  std::size_t size() const { return segments_.size(); }

  Real total_duration() const {
    Real t = 0;
    for (const auto& s : segments_) t += s.duration;
    return t;
  }

 private:
  std::vector<Segment<Real>> segments_;
};

/// Adds `shift` to both mode frequencies of every segment. A negative shift
/// equal to the mean frequency moves the schedule into the rotating frame.
template <typename Real>
PulseSchedule<Real> shift_mean_frequency(const PulseSchedule<Real>& schedule, Real shift) {
  PulseSchedule<Real> out;
  for (const auto& s : schedule.segments())
    out.append({s.params.omega1 + shift, s.params.omega2 + shift, s.params.g}, s.duration);
  return out;
}

/// Delta omega sampled on a uniform time grid.
template <typename Real = double>
struct SampledProfile {
  std::vector<Real> times;
  std::vector<Real> delta_omega;
};

template <typename Real = double>
struct Trajectory {
  std::vector<Real> times;
  std::vector<StateVector<Real>> states;
  std::vector<RVector<Real>> populations;

  void push(Real t, StateVector<Real> state) {
    times.push_back(t);
    populations.push_back(magnon::populations(state));
    states.push_back(std::move(state));
  }

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  const StateVector<Real>& final_state() const { return states.back(); }
};

template <typename Real>
BlockOperator<Real> assemble_hamiltonian(const HamiltonianParams<Real>& params,
                                         const FockBasis& basis) {
  std::vector<CMatrix<Real>> blocks;
  for (int n = 0; n < basis.num_blocks(); ++n) {
    const auto s = static_cast<Eigen::Index>(FockBasis::block_size(n));
    CMatrix<Real> h = CMatrix<Real>::Zero(s, s);
    for (int k = 0; k <= n; ++k) h(k, k) = params.omega1 * Real(n - k) + params.omega2 * Real(k);
    for (int k = 1; k <= n; ++k) {
      const Real hop = hop_element<Real>(n, k);
      h(k - 1, k) = params.g * hop;
      h(k, k - 1) = std::conj(params.g) * hop;
    }
    blocks.push_back(std::move(h));
  }
  return BlockOperator<Real>(basis, std::move(blocks), true);
}

/// Spectral form of a Hermitian block operator: exp(-i H t) for any t from a
/// single eigendecomposition per block.
template <typename Real>
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const BlockOperator<Real>& hamiltonian) : basis_(hamiltonian.basis()) {
    if (!hamiltonian.hermitian())
      throw ContractViolation("propagator requires a Hermitian generator");
    Real scale = 1;
    for (const auto& b : hamiltonian.blocks()) scale = std::max(scale, b.cwiseAbs().maxCoeff());
    if (hamiltonian.hermiticity_error() > Real(1e-12) * scale)
      throw ContractViolation("propagator requires a Hermitian generator (numerical check failed)");
    for (const auto& b : hamiltonian.blocks()) {
      Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(b);
      if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver did not converge");
      values_.push_back(solver.eigenvalues());
      vectors_.push_back(solver.eigenvectors());
    }
  }

  BlockOperator<Real> at(Real t) const {
    std::vector<CMatrix<Real>> blocks;
    blocks.reserve(values_.size());
    for (std::size_t n = 0; n < values_.size(); ++n) {
      CVector<Real> phases(values_[n].size());
      for (Eigen::Index j = 0; j < phases.size(); ++j) {
        const Real angle = -values_[n](j) * t;
        phases(j) = Complex<Real>(std::cos(angle), std::sin(angle));
      }
      blocks.push_back(vectors_[n] * phases.asDiagonal() * vectors_[n].adjoint());
    }
    return BlockOperator<Real>(basis_, std::move(blocks), false);
  }

  const RVector<Real>& eigenvalues(int block) const { return values_.at(static_cast<std::size_t>(block)); }

 private:
  FockBasis basis_;
  std::vector<RVector<Real>> values_;
  std::vector<CMatrix<Real>> vectors_;
};

/// U = exp(-i H tau) per block. tau = 0 gives the identity.
template <typename Real>
BlockOperator<Real> propagate_segment(const BlockOperator<Real>& hamiltonian, Real tau) {
  if (!(tau >= Real(0))) throw ContractViolation("propagate_segment: tau must be >= 0");
  return SpectralPropagator<Real>(hamiltonian).at(tau);
}

namespace detail {

template <typename Real>
void require_normalized(const StateVector<Real>& psi, const char* who) {
  if (std::abs(psi.norm() - Real(1)) > Real(1e-10))
    throw ContractViolation(std::string(who) + ": initial state is not normalized");
}

}  // namespace detail

/// Exact evolution through a piecewise-constant schedule. Each segment is
/// split into `samples_per_segment` recorded points, every one computed as
/// exp(-i H t) applied to the segment's entry state, so sampling density has
/// no effect on accuracy. The first sample is psi0 at t = 0.
template <typename Real>
Trajectory<Real> evolve(const PulseSchedule<Real>& schedule, const StateVector<Real>& psi0,
                        std::size_t samples_per_segment = 1) {
  if (schedule.empty()) throw ContractViolation("evolve: schedule has no segments");
  if (samples_per_segment < 1) throw ContractViolation("evolve: samples_per_segment must be >= 1");
  detail::require_normalized(psi0, "evolve");

  Trajectory<Real> traj;
  traj.push(Real(0), psi0);
  StateVector<Real> entry = psi0;
  Real t0 = 0;
  for (const auto& seg : schedule.segments()) {
    const SpectralPropagator<Real> prop(assemble_hamiltonian(seg.params, psi0.basis()));
    for (std::size_t j = 1; j <= samples_per_segment; ++j) {
      const Real dt = j == samples_per_segment
                          ? seg.duration
                          : seg.duration * Real(j) / Real(samples_per_segment);
      traj.push(t0 + dt, prop.at(dt).apply(entry));
    }
    entry = traj.states.back();
    t0 += seg.duration;
  }
  return traj;
}

/// Final state only: ordered product of the segment propagators.
template <typename Real>
StateVector<Real> evolve_final(const PulseSchedule<Real>& schedule, const StateVector<Real>& psi0) {
  if (schedule.empty()) throw ContractViolation("evolve: schedule has no segments");
  detail::require_normalized(psi0, "evolve");
  StateVector<Real> psi = psi0;
  for (const auto& seg : schedule.segments())
    psi = propagate_segment(assemble_hamiltonian(seg.params, psi.basis()), seg.duration).apply(psi);
  return psi;
}

/// Midpoint exponential (first-order Magnus) integrator for a smooth
/// detuning profile: each step applies exp(-i H(t_mid) dt) with the mean
/// frequency and coupling taken from `params`. The midpoint detuning is the
/// average of the two bracketing samples, which is exact for piecewise-linear
/// profiles and keeps global error O(dt^2) for smooth ones.
template <typename Real>
Trajectory<Real> evolve_smooth(const SampledProfile<Real>& profile,
                               const HamiltonianParams<Real>& params,
                               const StateVector<Real>& psi0, std::size_t record_stride = 1) {
  const auto& ts = profile.times;
  if (ts.size() != profile.delta_omega.size())
    throw ContractViolation("evolve_smooth: times and delta_omega differ in length");
  if (ts.size() < 2) throw ContractViolation("evolve_smooth: profile needs at least one step");
  if (record_stride < 1) throw ContractViolation("evolve_smooth: record_stride must be >= 1");
  const Real dt = (ts.back() - ts.front()) / Real(ts.size() - 1);
  if (!(dt > Real(0))) throw ContractViolation("evolve_smooth: time step must be > 0");
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (std::abs((ts[i] - ts[i - 1]) - dt) > Real(1e-9) * dt)
      throw ContractViolation("evolve_smooth: profile sampling is not uniform");
  }
  detail::require_normalized(psi0, "evolve_smooth");

  const Real omega_bar = params.omega_bar();
  Trajectory<Real> traj;
  traj.push(Real(0), psi0);
  StateVector<Real> psi = psi0;
  const std::size_t steps = ts.size() - 1;
  for (std::size_t i = 0; i < steps; ++i) {
    const Real mid = (profile.delta_omega[i] + profile.delta_omega[i + 1]) / 2;
    const auto h = assemble_hamiltonian(HamiltonianParams<Real>::from_gap(omega_bar, mid, params.g),
                                        psi.basis());
    psi = propagate_segment(h, dt).apply(psi);
    if ((i + 1) % record_stride == 0 || i + 1 == steps) traj.push(Real(i + 1) * dt, psi);
  }
  return traj;
}

/// Same integrator with the detuning evaluated exactly at each step midpoint.
template <typename Real>
Trajectory<Real> evolve_smooth(const std::function<Real(Real)>& delta_omega_of_t, Real duration,
                               std::size_t steps, const HamiltonianParams<Real>& params,
                               const StateVector<Real>& psi0, std::size_t record_stride = 1) {
  if (steps < 1) throw ContractViolation("evolve_smooth: steps must be >= 1");
  if (!(duration > Real(0))) throw ContractViolation("evolve_smooth: duration must be > 0");
  if (record_stride < 1) throw ContractViolation("evolve_smooth: record_stride must be >= 1");
  detail::require_normalized(psi0, "evolve_smooth");

  const Real dt = duration / Real(steps);
  const Real omega_bar = params.omega_bar();
  Trajectory<Real> traj;
  traj.push(Real(0), psi0);
  StateVector<Real> psi = psi0;
  for (std::size_t i = 0; i < steps; ++i) {
    const Real mid = delta_omega_of_t((Real(i) + Real(0.5)) * dt);
    const auto h = assemble_hamiltonian(HamiltonianParams<Real>::from_gap(omega_bar, mid, params.g),
                                        psi.basis());
    psi = propagate_segment(h, dt).apply(psi);
    if ((i + 1) % record_stride == 0 || i + 1 == steps) traj.push(Real(i + 1) * dt, psi);
  }
  return traj;
}

/// Samples f on n_steps + 1 uniform nodes over [0, duration].
template <typename Real>
SampledProfile<Real> sample_profile(const std::function<Real(Real)>& f, Real duration,
                                    std::size_t n_steps) {
  SampledProfile<Real> p;
  for (std::size_t i = 0; i <= n_steps; ++i) {
    const Real t = duration * Real(i) / Real(n_steps);
    p.times.push_back(t);
    p.delta_omega.push_back(f(t));
  }
  return p;
}

}  // namespace magnon
