#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "nvscramble/analytic_reference.hpp"
#include "oracles.hpp"

using namespace nvs;

namespace {

AnalyticParams weak_driven() {
  AnalyticParams p;
  p.osc = OscParams::with_connectivity(1.0, 1.5, 0.1, 1.0, 0.15, 0.5, 1.0);
  return p;
}

SpinParams figure_spin() {
  SpinParams sp;
  sp.omega0 = 1.5;
  sp.g = 1.0;
  sp.alpha = M_PI / 3;
  return sp;
}

}  // namespace

TEST_CASE("forced response coefficients") {
  AnalyticParams p;
  p.osc = OscParams::with_connectivity(1.0, 1.5, 0.1, 0.0, 0.15, 0.5, 1.0);
  const ForcedResponseCoefficients c = forced_response_coefficients(p);
  CHECK(c.K == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(c.nu1 == doctest::Approx(3.5 - 0.625 * std::sqrt(1.01)).epsilon(1e-14));
  CHECK(c.nu2 == doctest::Approx(3.5 + 0.625 * std::sqrt(1.01)).epsilon(1e-14));
  CHECK(c.nu1 <= c.nu2);
  CHECK(c.delta1 == 0.0);
  CHECK(c.delta2 == 0.0);

  AnalyticParams q = weak_driven();
  q.A1 = 0.3;
  q.A2 = 0.4;
  const ForcedResponseCoefficients d = forced_response_coefficients(q);
  const double w = 1.0 + 2.25;
  CHECK(d.delta1 == doctest::Approx(3.0 / 8.0 * std::sqrt(2.0 / w) * 0.25).epsilon(1e-14));
  CHECK(d.delta2 == doctest::Approx(3.0 / 8.0 * std::sqrt(2.0 / (w + 0.5)) * 0.25).epsilon(1e-14));
}

TEST_CASE("default amplitudes are the linear steady-state response") {
  // Uncoupled: |X| = F / sqrt((w^2 - W^2)^2 + 4 gamma^2 W^2).
  OscParams op = OscParams::with_connectivity(1.0, 1.5, 0.0, 0.0, 0.15, 0.5, 0.8);
  const auto [a1, a2] = linear_response_amplitudes(op);
  auto single = [&](double w) {
    return op.F / std::sqrt(std::pow(w * w - op.Omega * op.Omega, 2) + 4 * op.gamma * op.gamma * op.Omega * op.Omega);
  };
  CHECK(a1 == doctest::Approx(single(1.0)).epsilon(1e-13));
  CHECK(a2 == doctest::Approx(single(1.5)).epsilon(1e-13));

  AnalyticParams p = weak_driven();
  const ForcedResponseCoefficients c = forced_response_coefficients(p);
  const auto [b1, b2] = linear_response_amplitudes(p.osc);
  CHECK(c.A1 == b1);
  CHECK(c.A2 == b2);
  p.A1 = 2.0;
  const ForcedResponseCoefficients partial = forced_response_coefficients(p);
  CHECK(partial.A1 == 2.0);
  CHECK(partial.A2 == b2);
}

TEST_CASE("forced_response is even in t and linear in F") {
  AnalyticParams p = weak_driven();
  p.A1 = 0.5;
  p.A2 = 0.5;
  for (double t : {0.0, 0.3, 2.0, 17.5}) {
    const auto a = forced_response(p, t), b = forced_response(p, -t);
    CHECK(a.first == doctest::Approx(b.first).epsilon(1e-14));
    CHECK(a.second == doctest::Approx(b.second).epsilon(1e-14));
  }
  AnalyticParams q = p;
  q.osc.F = 3.0 * p.osc.F;
  const auto a = forced_response(p, 1.1), b = forced_response(q, 1.1);
  CHECK(b.first == doctest::Approx(3.0 * a.first).epsilon(1e-13));
  CHECK(b.second == doctest::Approx(3.0 * a.second).epsilon(1e-13));

  q.osc.F = 0.0;
  const auto z = forced_response(q, 0.7);
  CHECK(z.first == 0.0);
  CHECK(z.second == 0.0);

  // Verbatim evaluation at t = 0.
  const ForcedResponseCoefficients c = forced_response_coefficients(p);
  const OscParams& o = p.osc;
  const double den = 4 * c.nu1 * c.nu2 * std::sqrt(std::pow(c.nu1 + c.delta1 - o.Omega, 2) + o.gamma) *
                     std::sqrt(std::pow(c.nu2 + c.delta2 - o.Omega, 2) + o.gamma);
  const auto x0 = forced_response(p, 0.0);
  CHECK(x0.first == doctest::Approx(o.F * (2.25 - 1.0 + 2 * o.D) / den).epsilon(1e-14));
  CHECK(x0.second == doctest::Approx(o.F * (1.0 - 1.0 + 2 * o.D) / den).epsilon(1e-14));
}

TEST_CASE("forced_response rejects a vanishing denominator") {
  AnalyticParams p;
  p.osc = OscParams::with_connectivity(1.0, 1.5, 0.1, 0.0, 0.0, 0.5, 1.0);
  p.osc.Omega = forced_response_coefficients(p).nu1;
  p.A1 = p.A2 = 0.0;
  CHECK_THROWS_AS(forced_response(p, 0.0), std::domain_error);
}

TEST_CASE("propagate_nofeedback with a resting trajectory") {
  const SpinParams sp = figure_spin();
  auto rest = [](double) { return std::pair<double, double>{0.0, 0.0}; };
  const auto s01 = propagate_nofeedback(rest, sp, states::ket01(), 10.0, 0.5, 1e-10);
  REQUIRE(s01.size() == 21);
  for (const auto& s : s01) CHECK((s.C - states::ket01()).norm() < 1e-10);

  const auto s00 = propagate_nofeedback(rest, sp, states::basis(0), 10.0, 0.5, 1e-10);
  for (const auto& s : s00) {
    CHECK(std::abs(s.C(0) - std::exp(cplx(0, -sp.omega0 * s.t))) < 1e-9);
    CHECK(std::abs(std::abs(s.C(0)) - 1.0) < 1e-9);
  }
}

TEST_CASE("propagate_nofeedback matches the static-Hamiltonian exponential") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 10; ++k) {
    SpinParams sp = figure_spin();
    sp.alpha = u(rng);
    const double c1 = u(rng), c2 = u(rng);
    SpinState psi0;
    for (int i = 0; i < 4; ++i) psi0(i) = cplx(u(rng), u(rng));
    psi0.normalize();
    auto constant = [&](double) { return std::pair<double, double>{c1, c2}; };
    const auto samples = propagate_nofeedback(constant, sp, psi0, 20.0, 1.0, 1e-11);
    const Operator4 h = build_spin_hamiltonian(c1, c2, sp);
    for (const auto& s : samples) {
      CHECK((s.C - expm_hermitian(h, s.t) * psi0).norm() < 1e-9);
      CHECK(std::abs(s.C.norm() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("weak feedback: self-consistent and prescribed trajectories agree") {
  SpinParams sp = figure_spin();
  sp.g = 1e-5;
  const OscParams op = OscParams::with_connectivity(1.0, 1.5, 0.1, 0, 0, 0, 1);
  HybridState s;
  s.x1 = 1.0;
  std::vector<std::pair<double, SpinState>> hybrid;
  IntegrateOptions opt;
  opt.observer = [&](const HybridState& h) { hybrid.emplace_back(h.t, h.psi); };
  integrate(s, op, sp, Regime::AutonomousLinear, 50.0, 0.5, 1e-10, opt);

  // The prescribed trajectory is the exact g = 0 normal-mode motion.
  const test_oracles::NormalModes nm(op.omega1, op.omega2, op.D);
  const double x0[2] = {s.x1, s.x2}, v0[2] = {s.v1, s.v2};
  auto traj = [&](double t) {
    double x[2];
    nm.at(t, x0, v0, x);
    return std::pair<double, double>{x[0], x[1]};
  };
  const auto ref = propagate_nofeedback(traj, sp, s.psi, 50.0, 0.5, 1e-10);
  REQUIRE(ref.size() == hybrid.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, (ref[i].C - hybrid[i].second).norm());
  CHECK(worst < 1e-7);
}

TEST_CASE("spin expectations: printed formulas versus direct evaluation") {
  const auto up = spin_expectations_from_coefficients(states::basis(0));
  CHECK(up.printed.s1z == 1.0);
  CHECK(up.printed.s2z == 1.0);
  CHECK(up.printed.s1x == 0.0);
  CHECK(up.printed.s2y == 0.0);
  CHECK(up.max_disagreement == 0.0);

  const auto k01 = spin_expectations_from_coefficients(states::ket01());
  CHECK(k01.printed.s1z == -1.0);
  CHECK(k01.direct.s1z == 1.0);
  CHECK(k01.max_disagreement == 2.0);

  SpinState plus;
  plus << 0.5, 0.5, 0.5, 0.5;
  const auto pp = spin_expectations_from_coefficients(plus);
  CHECK(pp.direct.s1x == doctest::Approx(1.0));
  CHECK(pp.direct.s2x == doctest::Approx(1.0));

  // The printed site-1 components are the direct site-2 ones (and vice versa);
  // the printed site-1 y component also has the opposite sign.
  std::mt19937_64 rng(33);
  std::normal_distribution<double> n;
  for (int k = 0; k < 100; ++k) {
    SpinState c;
    for (int i = 0; i < 4; ++i) c(i) = cplx(n(rng), n(rng));
    c.normalize();
    const auto r = spin_expectations_from_coefficients(c);
    CHECK(r.printed.s1x == doctest::Approx(r.direct.s2x).epsilon(1e-12));
    CHECK(r.printed.s1y == doctest::Approx(-r.direct.s2y).epsilon(1e-12));
    CHECK(r.printed.s1z == doctest::Approx(r.direct.s2z).epsilon(1e-12));
    CHECK(r.printed.s2x == doctest::Approx(r.direct.s1x).epsilon(1e-12));
    CHECK(r.printed.s2y == doctest::Approx(r.direct.s1y).epsilon(1e-12));
    CHECK(r.printed.s2z == doctest::Approx(r.direct.s1z).epsilon(1e-12));
  }

  CHECK_THROWS_AS(spin_expectations_from_coefficients(2.0 * states::ket01()), std::invalid_argument);
}
