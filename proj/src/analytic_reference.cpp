#include "nvscramble/analytic_reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "nvscramble/dormand_prince.hpp"

namespace nvs {

std::pair<double, double> linear_response_amplitudes(const OscParams& op) {
  const double w1s = op.omega1 * op.omega1, w2s = op.omega2 * op.omega2;
  const double W2 = op.Omega * op.Omega;
  const cplx damp(0.0, 2.0 * op.gamma * op.Omega);
  Eigen::Matrix2cd dyn;
  dyn << w1s + op.D - W2 + damp, -op.D, -op.D, w2s + op.D - W2 + damp;
  const Eigen::Vector2cd force(op.F, op.F);
  const Eigen::Vector2cd X = dyn.fullPivLu().solve(force);
  if (!X.allFinite()) throw std::domain_error("linear_response_amplitudes: resonant drive");
  return {std::abs(X(0)), std::abs(X(1))};
}

ForcedResponseCoefficients forced_response_coefficients(const AnalyticParams& p) {
  const OscParams& op = p.osc;
  ForcedResponseCoefficients c;
  c.K = connectivity(op);
  const double w1s = op.omega1 * op.omega1, w2s = op.omega2 * op.omega2;
  const double split = 0.5 * (w2s - w1s) * std::sqrt(1.0 + c.K * c.K);
  c.nu1 = w1s + w2s + 2.0 * op.D - split;
  c.nu2 = w1s + w2s + 2.0 * op.D + split;
  if (p.A1 && p.A2) {
    c.A1 = *p.A1;
    c.A2 = *p.A2;
  } else {
    std::tie(c.A1, c.A2) = linear_response_amplitudes(op);
    if (p.A1) c.A1 = *p.A1;
    if (p.A2) c.A2 = *p.A2;
  }
  const double amp2 = c.A1 * c.A1 + c.A2 * c.A2;
  c.delta1 = 3.0 * op.xi / 8.0 * std::sqrt(2.0 / (w1s + w2s)) * amp2;
  c.delta2 = 3.0 * op.xi / 8.0 * std::sqrt(2.0 / (w1s + w2s + 4.0 * op.D)) * amp2;
  return c;
}

std::pair<double, double> forced_response(const AnalyticParams& p, double t) {
  const OscParams& op = p.osc;
  const ForcedResponseCoefficients c = forced_response_coefficients(p);
  const double denom = 4.0 * c.nu1 * c.nu2 *
                       std::sqrt(std::pow(c.nu1 + c.delta1 - op.Omega, 2) + op.gamma) *
                       std::sqrt(std::pow(c.nu2 + c.delta2 - op.Omega, 2) + op.gamma);
  if (denom == 0.0 || !std::isfinite(denom)) {
    throw std::domain_error("forced_response: vanishing denominator");
  }
  const double W2 = op.Omega * op.Omega;
  const double phase = std::cos(op.Omega * t);
  const double x1 = op.F * (op.omega2 * op.omega2 - W2 + 2.0 * op.D) * phase / denom;
  const double x2 = op.F * (op.omega1 * op.omega1 - W2 + 2.0 * op.D) * phase / denom;
  return {x1, x2};
}

std::vector<CoefficientSample> propagate_nofeedback(const PrescribedTrajectory& traj,
                                                    const SpinParams& sp, const SpinState& psi0,
                                                    double t_end, double dt_out, double tol) {
  if (!traj) throw std::invalid_argument("propagate_nofeedback: empty trajectory");
  if (t_end < 0.0) throw std::invalid_argument("propagate_nofeedback: negative t_end");
  using Vec = Eigen::VectorXd;
  const cplx minus_i(0.0, -1.0);
  auto rhs = [&](double t, const Vec& y, Vec& dydt) {
    const auto [x1, x2] = traj(t);
    const SpinState psi = Eigen::Map<const SpinState>(reinterpret_cast<const cplx*>(y.data()));
    dydt.resize(8);
    Eigen::Map<SpinState>(reinterpret_cast<cplx*>(dydt.data())) =
        minus_i * (build_spin_hamiltonian(x1, x2, sp) * psi);
  };
  std::vector<CoefficientSample> out;
  auto sample = [&](double t, const Vec& y) {
    out.push_back({t, Eigen::Map<const SpinState>(reinterpret_cast<const cplx*>(y.data()))});
  };
  Vec y0(8);
  Eigen::Map<SpinState>(reinterpret_cast<cplx*>(y0.data())) = psi0;
  StepControl control;
  control.rtol = tol;
  control.atol = tol;
  DormandPrince solver(rhs, control);
  solver.integrate(0.0, y0, t_end, dt_out, sample);
  return out;
}

SpinExpectationComparison spin_expectations_from_coefficients(const SpinState& C) {
  if (std::abs(C.squaredNorm() - 1.0) > 1e-8) {
    throw std::invalid_argument("spin_expectations_from_coefficients: amplitudes not normalized");
  }
  const cplx c1 = C(0), c2 = C(1), c3 = C(2), c4 = C(3);
  SpinExpectationComparison out;

  SpinExpectations& p = out.printed;
  const cplx a = std::conj(c1) * c2 + std::conj(c3) * c4;
  p.s1x = 2.0 * a.real();
  p.s1y = -2.0 * a.imag();
  p.s1z = std::norm(c1) + std::norm(c3) - std::norm(c2) - std::norm(c4);
  const cplx b = c1 * std::conj(c3) + c2 * std::conj(c4);
  p.s2x = 2.0 * b.real();
  p.s2y = -2.0 * b.imag();
  p.s2z = std::norm(c1) + std::norm(c2) - std::norm(c3) - std::norm(c4);

  SpinExpectations& d = out.direct;
  const Operator2 sx = pauli(PauliAxis::X), sy = pauli(PauliAxis::Y), sz = pauli(PauliAxis::Z);
  d.s1x = expectation(C, embed(sx, 1)).real();
  d.s1y = expectation(C, embed(sy, 1)).real();
  d.s1z = expectation(C, embed(sz, 1)).real();
  d.s2x = expectation(C, embed(sx, 2)).real();
  d.s2y = expectation(C, embed(sy, 2)).real();
  d.s2z = expectation(C, embed(sz, 2)).real();

  out.max_disagreement = std::max({std::abs(p.s1x - d.s1x), std::abs(p.s1y - d.s1y),
                                   std::abs(p.s1z - d.s1z), std::abs(p.s2x - d.s2x),
                                   std::abs(p.s2y - d.s2y), std::abs(p.s2z - d.s2z)});
  return out;
}

}  // namespace nvs
