#pragma once

// Temporal beamsplitter: a rectangular window of reduced detuning during which
// the two modes exchange quanta. Calibration, application and phase readout.

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "magnon/dynamics.hpp"
#include "magnon/errors.hpp"
#include "magnon/fock.hpp"

namespace magnon {

template <typename Real = double>
struct RabiParams {
  /// Generalized Rabi angular frequency sqrt(4|g|^2 + delta_omega^2).
  Real big_omega = 0;
  /// Peak single-quantum transfer probability 4|g|^2 / big_omega^2.
  Real p_max = 0;

  /// Single-quantum transfer probability after interaction time t.
  Real transfer_probability(Real t) const {
    const Real s = std::sin(big_omega * t / 2);
    return p_max * s * s;
  }
};

template <typename Real>
RabiParams<Real> rabi_params(Complex<Real> g, Real delta_omega) {
  const Real g_abs = std::abs(g);
  if (!(g_abs > Real(0))) throw ContractViolation("rabi_params: coupling g must be non-zero");
  const Real four_g2 = 4 * g_abs * g_abs;
  const Real omega2 = four_g2 + delta_omega * delta_omega;
  return {std::sqrt(omega2), four_g2 / omega2};
}

template <typename Real>
RabiParams<Real> rabi_params(Real g, Real delta_omega) {
  return rabi_params(Complex<Real>(g, 0), delta_omega);
}

/// Shortest interaction time giving 50% single-quantum transfer:
///   tau = (2 / big_omega) * asin(sqrt(1 / (2 p_max)))
/// Requires |delta_omega| <= 2|g|; beyond that p_max < 1/2.
template <typename Real>
Real calibrate_balanced(Complex<Real> g, Real delta_omega) {
  const Real g_abs = std::abs(g);
  if (!(g_abs > Real(0))) throw ContractViolation("calibrate_balanced: coupling g must be non-zero");
  if (std::abs(delta_omega) > 2 * g_abs * (1 + Real(1e-12))) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "balanced beamsplitter unreachable: |delta_omega| = " << std::abs(delta_omega)
        << " rad/s exceeds 2|g| = " << 2 * g_abs << " rad/s";
    throw UnreachableBalanceError(msg.str());
  }
  const auto rp = rabi_params(g, delta_omega);
  const Real arg = std::min(Real(1), std::sqrt(1 / (2 * rp.p_max)));
  return 2 / rp.big_omega * std::asin(arg);
}

template <typename Real>
Real calibrate_balanced(Real g, Real delta_omega) {
  return calibrate_balanced(Complex<Real>(g, 0), delta_omega);
}

template <typename Real = double>
struct TbsPulse {
  Real delta_omega = 0;
  Complex<Real> g{0, 0};
  Real tau = 0;
  Real omega_bar = 0;
  bool balanced = false;

  /// Balanced pulse with tau from calibrate_balanced.
  static TbsPulse balanced_pulse(Complex<Real> g, Real delta_omega, Real omega_bar = 0) {
    return {delta_omega, g, calibrate_balanced(g, delta_omega), omega_bar, true};
  }

  HamiltonianParams<Real> params() const {
    return HamiltonianParams<Real>::from_gap(omega_bar, delta_omega, g);
  }
};

template <typename Real>
BlockOperator<Real> tbs_propagator(const TbsPulse<Real>& pulse, const FockBasis& basis) {
  if (!(pulse.tau > Real(0))) throw ContractViolation("TbsPulse: tau must be > 0");
  return propagate_segment(assemble_hamiltonian(pulse.params(), basis), pulse.tau);
}

template <typename Real>
StateVector<Real> apply_tbs(const TbsPulse<Real>& pulse, const StateVector<Real>& psi) {
  detail::require_normalized(psi, "apply_tbs");
  return tbs_propagator(pulse, psi.basis()).apply(psi);
}

/// Closed-form exp(-i tau [[dw/2, g], [conj(g), -dw/2]]) via the Pauli form
/// cos(W tau / 2) I - i sin(W tau / 2) (n . sigma), W = sqrt(4|g|^2 + dw^2).
/// Independent of the eigendecomposition propagator; used to check it.
template <typename Real>
Eigen::Matrix<Complex<Real>, 2, 2> tbs_unitary_oracle(Complex<Real> g, Real delta_omega, Real tau) {
  const auto rp = rabi_params(g, delta_omega);
  const Real c = std::cos(rp.big_omega * tau / 2);
  const Real s = std::sin(rp.big_omega * tau / 2);
  const Complex<Real> i(0, 1);
  Eigen::Matrix<Complex<Real>, 2, 2> n_sigma;
  n_sigma << delta_omega / rp.big_omega, Real(2) * g / rp.big_omega,
      Real(2) * std::conj(g) / rp.big_omega, -delta_omega / rp.big_omega;
  return c * Eigen::Matrix<Complex<Real>, 2, 2>::Identity() - i * s * n_sigma;
}

/// Principal value of arg(c_to / c_from) in (-pi, pi].
template <typename Real>
Real extract_relative_phase(const StateVector<Real>& state, const FockIndex& from, const FockIndex& to) {
  const Complex<Real> a = state.amplitude(from);
  const Complex<Real> b = state.amplitude(to);
  if (std::abs(a) <= Real(1e-6) || std::abs(b) <= Real(1e-6)) {
    throw UndefinedPhaseError("relative phase between " + to_string(from) + " and " + to_string(to) +
                              " is undefined: amplitude below 1e-6");
  }
  Real phase = std::arg(b * std::conj(a));
  if (phase <= -std::numbers::pi_v<Real>) phase += 2 * std::numbers::pi_v<Real>;
  return phase;
}

/// Wraps an angle into (-pi, pi].
template <typename Real>
Real wrap_phase(Real x) {
  constexpr Real pi = std::numbers::pi_v<Real>;
  Real y = std::remainder(x, 2 * pi);
  if (y <= -pi) y += 2 * pi;
  return y;
}

}  // namespace magnon
