#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "magnon/analysis.hpp"
#include "test_support.hpp"

using namespace magnon;
using magnon::testing::kG;
using magnon::testing::kPi;

namespace {

const std::complex<double> kGc(kG, 0);
const double kLab = 2 * kPi * 5e9;

std::vector<double> symmetric_grid(double half_width, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(half_width * (2.0 * i - (points - 1)) / (points - 1));
  return out;
}

}  // namespace

TEST_CASE("build_tbs_protocol snaps holds to whole hold-Rabi periods") {
  ProtocolOptions<double> opt;
  opt.pre_hold = 10e-9;
  opt.post_hold = 7e-9;
  const auto p = build_tbs_protocol(kGc, 0.0, opt);
  REQUIRE(p.schedule.size() == 3);
  const double hold_omega = std::sqrt(4 * kG * kG + 2500 * kG * kG);
  const double period = 2 * kPi / hold_omega;
  const double pre = p.schedule.segments()[0].duration;
  CHECK(pre >= 10e-9);
  CHECK(pre < 10e-9 + period);
  CHECK(std::abs(std::remainder(pre / period, 1.0)) < 1e-9);
  CHECK(p.pulse_segment == 1);
  CHECK(std::abs(p.window_end - p.window_start - 6.25e-9) < 1e-20);
  CHECK(std::abs(p.schedule.segments()[0].params.delta_omega() - 50 * kG) < 1e-3);

  ProtocolOptions<double> raw = opt;
  raw.snap_holds = false;
  CHECK(build_tbs_protocol(kGc, 0.0, raw).schedule.segments()[0].duration == 10e-9);
}

TEST_CASE("run_single_magnon_tbs at the default parameters") {
  ProtocolOptions<double> opt;
  opt.omega_bar = kLab;
  opt.pre_hold = 10e-9;
  opt.post_hold = 10e-9;
  const auto res = run_single_magnon_tbs(kGc, 0.0, opt);
  CHECK(std::abs(res.p10 - 0.5) < 1e-10);
  CHECK(std::abs(res.p01 - 0.5) < 1e-10);
  REQUIRE(res.phi.has_value());
  CHECK(std::abs(*res.phi + kPi / 2) < 1e-9);
  CHECK(std::abs(population(res.run.window_output, k10) - 0.5) < 1e-10);

  // Populations barely move outside the window.
  const auto& traj = res.run.trajectory;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] <= res.run.protocol.window_start)
      CHECK(population(traj.states[i], k01) < 4.0 / 2504.0);
  }
}

TEST_CASE("hold-only schedule keeps |10> within the leakage bound") {
  ProtocolOptions<double> opt;
  opt.pulse = false;
  opt.pre_hold = 40e-9;
  opt.samples_per_segment = 2000;
  const auto res = run_single_magnon_tbs(kGc, 0.0, opt);
  double worst = 0;
  for (const auto& st : res.run.trajectory.states) worst = std::max(worst, population(st, k01));
  CHECK(worst <= 4.0 / (4.0 + 2500.0) + 1e-12);
  CHECK(worst > 1e-4);  // the bound is actually approached
  CHECK(std::abs(res.p10 - 1.0) < 1e-12);
  CHECK_FALSE(res.phi.has_value());
}

TEST_CASE("run_hom on resonance") {
  ProtocolOptions<double> opt;
  opt.omega_bar = kLab;
  opt.pre_hold = 5e-9;
  opt.post_hold = 5e-9;
  const auto res = run_hom(kGc, 0.0, opt);
  CHECK(res.p11 < 1e-9);
  CHECK(std::abs(res.p20 - 0.5) < 1e-9);
  CHECK(std::abs(res.p02 - 0.5) < 1e-9);
  CHECK(std::abs(res.p20 + res.p11 + res.p02 - 1.0) < 1e-10);
  CHECK(res.dip_depth > 1 - 1e-9);
  REQUIRE(res.noon_phase.has_value());
  CHECK(std::abs(*res.noon_phase) < 1e-9);
}

TEST_CASE("run_hom with a half-length pulse leaves P(1,1) = 1/2") {
  ProtocolOptions<double> opt;
  opt.tau = kPi / (8 * kG);
  const auto res = run_hom(kGc, 0.0, opt);
  // |alpha|^2 = cos^2(pi/8), P(1,1) = (|alpha|^2 - |beta|^2)^2 = cos^2(pi/4)
  CHECK(std::abs(res.p11 - 0.5) < 1e-12);
}

TEST_CASE("run_hom with zero coupling stays in |11>") {
  ProtocolOptions<double> opt;
  opt.tau = 10e-9;
  opt.pre_hold = 3e-9;
  const auto res = run_hom(std::complex<double>(0, 0), 0.0, opt);
  for (const auto& p : res.trajectory().states) CHECK(std::abs(population(p, k11) - 1.0) < 1e-14);
}

TEST_CASE("P(1,1) follows (1 - 2 P_transfer)^2 over one Rabi period") {
  const FockBasis b(2);
  const auto rp = rabi_params(kGc, 0.0);
  const double period = 2 * kPi / rp.big_omega;
  double best_t = 0, best = 1;
  std::vector<double> minima;
  for (int i = 1; i <= 400; ++i) {
    const double t = period * i / 400;
    const TbsPulse<double> p{0.0, kGc, t, kLab, false};
    const double p11 = population(apply_tbs(p, StateVector<double>::fock(b, k11)), k11);
    CHECK(std::abs(p11 - hom_coincidence_oracle(rp.transfer_probability(t))) < 1e-9);
    if (p11 < 1e-9) minima.push_back(t);
    if (p11 < best) {
      best = p11;
      best_t = t;
    }
  }
  // Grid contains pi/4g (i = 100) and 3pi/4g (i = 300).
  REQUIRE(minima.size() == 2);
  CHECK(std::abs(minima[0] - kPi / (4 * kG)) < 1e-18);
  CHECK(std::abs(minima[1] - 3 * kPi / (4 * kG)) < 1e-18);
  CHECK(best < 1e-9);
  CHECK((std::abs(best_t - minima[0]) < 1e-18 || std::abs(best_t - minima[1]) < 1e-18));
}

TEST_CASE("phase_scan") {
  SUBCASE("single point at resonance") {
    const auto r = phase_scan(kGc, std::vector<double>{0.0}, kLab);
    REQUIRE(r.size() == 1);
    CHECK(std::abs(r.taus[0] - kPi / (4 * kG)) < 1e-20);
    CHECK(std::abs(r.phases[0]) < 1e-9);
  }
  SUBCASE("antisymmetric, continuous, non-constant") {
    const auto grid = symmetric_grid(2 * kG, 41);
    const auto r = phase_scan(kGc, grid, kLab);
    REQUIRE(r.size() == 41);
    CHECK(r.warnings.empty());
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(std::abs(r.phases[i] + r.phases[r.size() - 1 - i]) < 1e-9);
      CHECK(std::abs(wrap_phase(r.phases[i] - 2 * r.points[i].phi - kPi)) < 1e-9);
      CHECK(std::abs(r.points[i].transfer - 0.5) < 1e-9);
      if (i > 0) CHECK(std::abs(r.phases[i] - r.phases[i - 1]) < kPi / 2);
    }
    CHECK(std::abs(r.phases[20]) < 1e-9);
    CHECK(r.phases.back() - r.phases.front() > 1.0);
  }
  SUBCASE("points outside the band are skipped with a warning") {
    const auto r = phase_scan(kGc, std::vector<double>{-3 * kG, 0.0, kG, 2.5 * kG});
    CHECK(r.size() == 2);
    CHECK(r.warnings.size() == 2);
  }
}

TEST_CASE("balanced N00N phase follows 2 asin(dw / 2g)") {
  // With c = cos, s = sin of big_omega tau / 2 and d = dw / big_omega, the
  // |10> column gives phi = -pi/2 + atan(s d / c); balance fixes
  // c^2 + s^2 d^2 = 1/2 and s = big_omega / (2 sqrt2 g), so
  // sin(Phi / 2) = sqrt2 s d = dw / 2g.
  const auto grid = symmetric_grid(2 * kG, 81);
  const auto r = phase_scan(kGc, grid, kLab);
  REQUIRE(r.size() == 81);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = std::clamp(r.detunings[i] / (2 * kG), -1.0, 1.0);
    CHECK(std::abs(r.phases[i] - 2 * std::asin(x)) < 1e-9);
    if (i > 0) CHECK(r.phases[i] > r.phases[i - 1]);
  }
}

TEST_CASE("unwrap_from continues across the branch cut") {
  std::vector<double> ph{3.0, -3.1, -2.9, 3.1};
  unwrap_from(ph, 1);
  CHECK(ph[1] == -3.1);
  CHECK(std::abs(ph[0] - (3.0 - 2 * kPi)) < 1e-15);
  CHECK(std::abs(ph[3] - (3.1 - 2 * kPi)) < 1e-15);
}

TEST_CASE("reduced_density_matrix") {
  const FockBasis b(2);
  const std::complex<double> i(0, 1);

  const auto prod = StateVector<double>::fock(b, k10);
  const auto rho_p = reduced_density_matrix(prod, Mode::one);
  CHECK(std::abs((rho_p * rho_p).trace() - 1.0) < 1e-15);
  CHECK(std::abs(rho_p(1, 1) - 1.0) < 1e-15);

  const auto noon = make_state(b, {{k20, 1.0}, {k02, 1.0}});
  const auto rho_n = reduced_density_matrix(noon, Mode::one);
  CMatrix<double> expect = CMatrix<double>::Zero(3, 3);
  expect(0, 0) = 0.5;
  expect(2, 2) = 0.5;
  CHECK((rho_n - expect).cwiseAbs().maxCoeff() < 1e-15);

  const auto single = make_state(b, {{k10, 1.0}, {k01, -i}});
  const auto rho_s = reduced_density_matrix(single, Mode::one);
  CHECK(std::abs(rho_s(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(rho_s(1, 1) - 0.5) < 1e-15);
  CHECK(std::abs(rho_s(0, 1)) < 1e-15);

  const auto rho_s2 = reduced_density_matrix(single, Mode::two);
  CHECK(std::abs(rho_s2(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(rho_s2(1, 1) - 0.5) < 1e-15);
}

TEST_CASE("reduced states are Hermitian, unit trace and positive") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const FockBasis b(1 + trial % 5);
    const auto s = magnon::testing::random_state(b, rng);
    for (Mode m : {Mode::one, Mode::two}) {
      const auto rho = reduced_density_matrix(s, m);
      CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
      CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
      Eigen::SelfAdjointEigenSolver<CMatrix<double>> es(rho);
      CHECK(es.eigenvalues().minCoeff() > -1e-14);
    }
    // Pure bipartite state: both reductions carry the same entropy.
    const auto r2 = reduced_density_matrix(s, Mode::two);
    Eigen::SelfAdjointEigenSolver<CMatrix<double>> es(r2);
    double s2 = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
      if (es.eigenvalues()(k) > 1e-14) s2 -= es.eigenvalues()(k) * std::log(es.eigenvalues()(k));
    CHECK(std::abs(entanglement_entropy(s) - s2) < 1e-10);
  }
}

TEST_CASE("entanglement_entropy") {
  const FockBasis b(2);
  CHECK(entanglement_entropy(StateVector<double>::fock(b, k11)) == 0.0);
  for (double theta : {0.0, 0.7, -2.0, kPi}) {
    const auto noon = make_state(b, {{k20, 1.0}, {k02, std::polar(1.0, theta)}});
    CHECK(std::abs(entanglement_entropy(noon) - std::log(2.0)) < 1e-12);
  }
  const auto uneven = make_state(b, {{k20, 0.6}, {k02, 0.8}});
  CHECK(std::abs(entanglement_entropy(uneven) - (-(0.36 * std::log(0.36) + 0.64 * std::log(0.64)))) < 1e-12);
  CHECK(std::abs(entanglement_entropy(uneven) - 0.6534) < 1e-4);
}

TEST_CASE("noon_fidelity") {
  const FockBasis b(2);
  const auto noon = make_state(b, {{k20, 1.0}, {k02, 1.0}});
  CHECK(std::abs(noon_fidelity(noon, 0.0).fidelity - 1.0) < 1e-15);
  CHECK(noon_fidelity(StateVector<double>::fock(b, k11), 1.3).fidelity == 0.0);
  CHECK(noon_fidelity(StateVector<double>::fock(b, k11), 1.3).best_fidelity == 0.0);

  ProtocolOptions<double> opt;
  opt.omega_bar = kLab;
  const auto hom = run_hom(kGc, 0.7 * kG, opt);
  const auto nf = noon_fidelity(hom.run.window_output, *hom.noon_phase);
  CHECK(nf.fidelity > 1 - 1e-9);
  CHECK(std::abs(nf.best_phi - *hom.noon_phase) < 1e-12);

  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = magnon::testing::random_state(b, rng);
    const auto best = noon_fidelity(s, 0.0);
    CHECK(std::abs(noon_fidelity(s, best.best_phi).fidelity - best.best_fidelity) < 1e-14);
    for (int k = 0; k < 360; ++k)
      CHECK(noon_fidelity(s, 2 * kPi * k / 360).fidelity <= best.best_fidelity + 1e-15);
  }
}
