#pragma once

// Closed-form no-feedback reference: the printed steady-state forced response
// of the coupled resonators, and the spin wavefunction propagated under a
// prescribed oscillator trajectory.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nvscramble/hybrid_dynamics.hpp"
#include "nvscramble/spin_algebra.hpp"

namespace nvs {

struct AnalyticParams {
  OscParams osc;
  /// Induced resonator amplitudes. When unset, the linear steady-state
  /// amplitudes from linear_response_amplitudes() are used.
  std::optional<double> A1, A2;
};

struct ForcedResponseCoefficients {
  double K = 0.0;
  double nu1 = 0.0, nu2 = 0.0;
  double delta1 = 0.0, delta2 = 0.0;
  double A1 = 0.0, A2 = 0.0;
};

/// |X1|, |X2| of the damped linear steady state (K - Omega^2 + 2 i gamma Omega) X = F (1, 1),
/// with K the 2x2 stiffness matrix. Nonlinearity is ignored.
std::pair<double, double> linear_response_amplitudes(const OscParams& op);

/// nu_{1,2} = w1^2 + w2^2 + 2D -/+ (w2^2 - w1^2)/2 sqrt(1 + K^2) and the nonlinear
/// shifts delta_{1,2}, evaluated verbatim from the quoted formula.
ForcedResponseCoefficients forced_response_coefficients(const AnalyticParams& p);

/// x_{1,2}(t) = F (w_{2,1}^2 - Omega^2 + 2D) cos(Omega t)
///              / [4 nu1 nu2 sqrt((nu1 + delta1 - Omega)^2 + gamma) sqrt((nu2 + delta2 - Omega)^2 + gamma)]
///
/// This is a reference-formula evaluator. Its dimensional mixing (nu is a squared
/// frequency, gamma appears unsquared) is kept as quoted; it is not used as a
/// numeric oracle anywhere. Throws std::domain_error on a vanishing denominator.
std::pair<double, double> forced_response(const AnalyticParams& p, double t);

using PrescribedTrajectory = std::function<std::pair<double, double>(double t)>;

struct CoefficientSample {
  double t = 0.0;
  SpinState C;  // amplitudes of |00>, |01>, |10>, |11>
};

/// psi(t) = T exp(-i int H_s(x1(tau), x2(tau)) dtau) psi0, sampled every dt_out on [0, t_end].
std::vector<CoefficientSample> propagate_nofeedback(const PrescribedTrajectory& traj,
                                                    const SpinParams& sp, const SpinState& psi0,
                                                    double t_end, double dt_out, double tol);

struct SpinExpectations {
  double s1x = 0.0, s1y = 0.0, s1z = 0.0;
  double s2x = 0.0, s2y = 0.0, s2z = 0.0;
};

struct SpinExpectationComparison {
  SpinExpectations printed;  // quoted coefficient formulas, term for term
  SpinExpectations direct;   // <psi| sigma_i^j |psi> in the library's basis convention
  double max_disagreement = 0.0;
};

/// Both the quoted coefficient formulas and the direct expectations. The
/// quoted formulas pair indices with the opposite site convention, so the
/// two generally disagree; the disagreement is reported, not repaired.
SpinExpectationComparison spin_expectations_from_coefficients(const SpinState& C);

}  // namespace nvs
