#include "doctest.h"

#include <cmath>
#include <random>

#include "magnon/beamsplitter.hpp"
#include "test_support.hpp"

using namespace magnon;
using magnon::testing::kG;
using magnon::testing::kPi;

namespace {

const FockBasis kBasis(2);
const std::complex<double> kI(0, 1);

double simulated_transfer(std::complex<double> g, double dw, double t) {
  PulseSchedule<double> s;
  s.append(HamiltonianParams<double>::from_gap(0, dw, g), t);
  return population(evolve_final(s, StateVector<double>::fock(kBasis, {1, 0})), {0, 1});
}

// Smallest t with simulated transfer = 1/2, found by scanning for the first
// sign change and bisecting. Independent of the closed-form calibration.
double brute_force_balance_time(double g, double dw) {
  const double dt = 0.002 / g;
  double lo = 0;
  while (simulated_transfer(g, dw, lo + dt) < 0.5) lo += dt;
  double hi = lo + dt;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (simulated_transfer(g, dw, mid) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("rabi_params") {
  const auto r0 = rabi_params(kG, 0.0);
  CHECK(r0.p_max == 1.0);
  CHECK(std::abs(r0.big_omega - 2 * kG) < 1e-6);

  const auto r2 = rabi_params(kG, 2 * kG);
  CHECK(std::abs(r2.p_max - 0.5) < 1e-15);
  CHECK(std::abs(r2.big_omega - 2 * std::sqrt(2.0) * kG) < 1e-6);

  const auto far = rabi_params(kG, 1000 * kG);
  CHECK(far.p_max < 4.0 / 1e6 * 1.0001);
  CHECK(std::abs(far.p_max - 4.0 / (4.0 + 1e6)) < 1e-15);

  const auto complex_g = rabi_params(std::polar(kG, 0.7), kG);
  CHECK(std::abs(complex_g.p_max - 0.8) < 1e-15);

  CHECK_THROWS_AS(rabi_params(0.0, 1.0), ContractViolation);
}

TEST_CASE("calibrate_balanced closed form") {
  CHECK(std::abs(calibrate_balanced(kG, 0.0) - 6.25e-9) < 1e-20);
  CHECK(std::abs(calibrate_balanced(kG, 0.0) - kPi / (4 * kG)) < 1e-22);

  const double t2 = calibrate_balanced(kG, 2 * kG);
  CHECK(std::abs(t2 - kPi / (2 * std::sqrt(2.0) * kG)) < 1e-20);
  CHECK(std::abs(t2 - 8.8388e-9) < 1e-13);

  // Continuity at resonance.
  CHECK(std::abs(calibrate_balanced(kG, 1e-9 * kG) - kPi / (4 * kG)) < 1e-20);
  // Symmetric in the sign of the detuning; longer away from resonance.
  CHECK(calibrate_balanced(kG, 1.5 * kG) == calibrate_balanced(kG, -1.5 * kG));
  CHECK(calibrate_balanced(kG, 1.5 * kG) > calibrate_balanced(kG, 0.5 * kG));
}

TEST_CASE("calibrate_balanced agrees with brute-force root finding on the dynamics") {
  for (double x : {0.0, 0.4, 1.1, 1.9}) {
    const double tau = calibrate_balanced(kG, x * kG);
    CHECK(std::abs(tau - brute_force_balance_time(kG, x * kG)) < 1e-6 * tau);
  }
}

TEST_CASE("calibrate_balanced rejects unreachable detunings") {
  CHECK_THROWS_AS(calibrate_balanced(kG, 2.01 * kG), UnreachableBalanceError);
  CHECK_THROWS_AS(calibrate_balanced(kG, -3 * kG), UnreachableBalanceError);
  try {
    calibrate_balanced(kG, 3 * kG);
  } catch (const UnreachableBalanceError& e) {
    CHECK(std::string(e.what()).find("2|g|") != std::string::npos);
  }
  CHECK_THROWS_AS(calibrate_balanced(0.0, 0.0), ContractViolation);
}

TEST_CASE("tbs_unitary_oracle") {
  const auto u = tbs_unitary_oracle<double>(kG, 0.0, kPi / (4 * kG));
  Eigen::Matrix<std::complex<double>, 2, 2> ref;
  ref << 1.0, -kI, -kI, 1.0;
  ref /= std::sqrt(2.0);
  CHECK((u - ref).cwiseAbs().maxCoeff() < 1e-15);

  const auto id = tbs_unitary_oracle<double>(kG, 0.3 * kG, 0.0);
  CHECK((id - Eigen::Matrix<std::complex<double>, 2, 2>::Identity()).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u01(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::complex<double> g = kG * std::complex<double>(u01(rng), u01(rng));
    const auto m = tbs_unitary_oracle<double>(g, 6 * kG * u01(rng), 10 / kG * std::abs(u01(rng)));
    CHECK((m.adjoint() * m - Eigen::Matrix<std::complex<double>, 2, 2>::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(m.determinant() - 1.0) < 1e-14);
  }
}

TEST_CASE("oracle matches the eigendecomposition propagator up to exp(-i omega_bar tau)") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u01(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const std::complex<double> g = kG * std::complex<double>(u01(rng), u01(rng));
    const double dw = 6 * kG * u01(rng);
    const double wbar = 2 * kPi * 5e9 * u01(rng);
    const double tau = 20e-9 * std::abs(u01(rng));
    const auto h = assemble_hamiltonian(HamiltonianParams<double>::from_gap(wbar, dw, g), kBasis);
    const CMatrix<double> block = propagate_segment(h, tau).block(1) * std::polar(1.0, wbar * tau);
    const auto oracle = tbs_unitary_oracle(g, dw, tau);
    CHECK((block - CMatrix<double>(oracle)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("apply_tbs on resonance") {
  const auto pulse = TbsPulse<double>::balanced_pulse(kG, 0.0, 2 * kPi * 5e9);
  CHECK(pulse.balanced);

  SUBCASE("|10> -> (|10> - i|01>)/sqrt2 up to a global phase") {
    const auto out = apply_tbs(pulse, StateVector<double>::fock(kBasis, {1, 0}));
    CHECK(std::abs(population(out, {1, 0}) - 0.5) < 1e-12);
    CHECK(std::abs(population(out, {0, 1}) - 0.5) < 1e-12);
    CHECK(std::abs(extract_relative_phase(out, {1, 0}, {0, 1}) + kPi / 2) < 1e-10);
  }
  SUBCASE("|11> -> (|20> + |02>)/sqrt2 up to a global phase") {
    const auto out = apply_tbs(pulse, StateVector<double>::fock(kBasis, {1, 1}));
    CHECK(population(out, {1, 1}) < 1e-20);
    CHECK(std::abs(population(out, {2, 0}) - 0.5) < 1e-12);
    CHECK(std::abs(population(out, {0, 2}) - 0.5) < 1e-12);
    CHECK(std::abs(extract_relative_phase(out, {2, 0}, {0, 2})) < 1e-10);
    // Rotating frame: the global phase is exactly -i.
    const auto rot = apply_tbs(TbsPulse<double>::balanced_pulse(kG, 0.0), StateVector<double>::fock(kBasis, {1, 1}));
    CHECK(std::abs(rot.amplitude({2, 0}) - (-kI / std::sqrt(2.0))) < 1e-14);
    CHECK(std::abs(rot.amplitude({0, 2}) - (-kI / std::sqrt(2.0))) < 1e-14);
  }
  SUBCASE("doubled tau is a full swap") {
    TbsPulse<double> swap = pulse;
    swap.tau *= 2;
    const auto out = apply_tbs(swap, StateVector<double>::fock(kBasis, {1, 0}));
    CHECK(std::abs(population(out, {0, 1}) - 1.0) < 1e-12);
  }
}

TEST_CASE("extract_relative_phase") {
  const auto s1 = make_state(kBasis, {{{1, 0}, 1.0}, {{0, 1}, -kI}});
  CHECK(std::abs(extract_relative_phase(s1, {1, 0}, {0, 1}) + kPi / 2) < 1e-15);
  const auto s2 = make_state(kBasis, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
  CHECK(extract_relative_phase(s2, {2, 0}, {0, 2}) == 0.0);
  const auto s3 = make_state(kBasis, {{{1, 0}, 1.0}, {{0, 1}, std::polar(1.0, kPi / 3)}});
  CHECK(std::abs(extract_relative_phase(s3, {1, 0}, {0, 1}) - kPi / 3) < 1e-15);
  // -pi maps to +pi.
  const auto s4 = make_state(kBasis, {{{1, 0}, 1.0}, {{0, 1}, std::complex<double>(-1.0, -0.0)}});
  CHECK(extract_relative_phase(s4, {1, 0}, {0, 1}) == doctest::Approx(kPi));

  const auto fock = StateVector<double>::fock(kBasis, {1, 0});
  CHECK_THROWS_AS(extract_relative_phase(fock, {1, 0}, {0, 1}), UndefinedPhaseError);
}

TEST_CASE("simulated transfer equals the Rabi formula for random (g, dw, t)") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u01(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::complex<double> g = std::polar(kG * (0.2 + std::abs(u01(rng))), kPi * u01(rng));
    const double dw = 6 * std::abs(g) * u01(rng);
    const double t = 30e-9 * std::abs(u01(rng));
    const auto rp = rabi_params(g, dw);
    CHECK(std::abs(simulated_transfer(g, dw, t) - rp.transfer_probability(t)) < 1e-9);
  }
}

TEST_CASE("balanced pulses split |10> evenly across the admissible band") {
  for (int i = 0; i <= 40; ++i) {
    const double dw = 2 * kG * (2.0 * i / 40 - 1);
    const auto pulse = TbsPulse<double>::balanced_pulse(kG, dw, 2 * kPi * 5e9);
    const auto out = apply_tbs(pulse, StateVector<double>::fock(kBasis, {1, 0}));
    CHECK(std::abs(population(out, {1, 0}) - 0.5) < 1e-9);
    CHECK(std::abs(population(out, {0, 1}) - 0.5) < 1e-9);
  }
}

TEST_CASE("phase-doubling law and HOM cancellation on the detuning grid") {
  for (std::complex<double> g : {std::complex<double>(kG, 0), std::polar(kG, 1.1)}) {
    for (int i = 0; i <= 40; ++i) {
      const double dw = 2 * std::abs(g) * (2.0 * i / 40 - 1);
      const auto pulse = TbsPulse<double>::balanced_pulse(g, dw, 2 * kPi * 3e9);
      const auto one = apply_tbs(pulse, StateVector<double>::fock(kBasis, {1, 0}));
      const auto two = apply_tbs(pulse, StateVector<double>::fock(kBasis, {1, 1}));
      const double phi = extract_relative_phase(one, {1, 0}, {0, 1});
      const double big_phi = extract_relative_phase(two, {2, 0}, {0, 2});
      CHECK(std::abs(wrap_phase(big_phi - 2 * phi - kPi)) < 1e-9);
      CHECK(population(two, {1, 1}) < 1e-9);
    }
  }
}

TEST_CASE("phase-doubling law holds for unbalanced mixing as well") {
  // The derivation only needs a number-conserving mode mixer.
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u01(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const TbsPulse<double> p{3 * kG * u01(rng), kG, 1e-9 + 10e-9 * std::abs(u01(rng)), 0.0, false};
    const auto one = apply_tbs(p, StateVector<double>::fock(kBasis, {1, 0}));
    const auto two = apply_tbs(p, StateVector<double>::fock(kBasis, {1, 1}));
    if (std::abs(one.amplitude({0, 1})) < 1e-3) continue;
    const double phi = extract_relative_phase(one, {1, 0}, {0, 1});
    const double big_phi = extract_relative_phase(two, {2, 0}, {0, 2});
    CHECK(std::abs(wrap_phase(big_phi - 2 * phi - kPi)) < 1e-9);
  }
}

TEST_CASE("wrap_phase") {
  CHECK(wrap_phase(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
  CHECK(std::abs(wrap_phase(2 * kPi + 0.25) - 0.25) < 1e-15);
}
