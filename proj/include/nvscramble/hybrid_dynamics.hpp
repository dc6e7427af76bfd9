#pragma once

// Two classical Duffing-type oscillators, each coupled to one NV spin, with
// mean-field (Ehrenfest) feedback g<S^z> from the spins onto the oscillators.
//
//   x1'' = -2 gamma x1' - xi x1^3 + F cos(Omega t) - w1^2 x1 - D (x1 - x2) - g <S1^z>
//   x2'' = -2 gamma x2' - xi x2^3 + F cos(Omega t) - w2^2 x2 + D (x1 - x2) - g <S2^z>
//   i d|psi>/dt = H_s(x1, x2) |psi>,   i dU/dt = H_s U
//
// H_s = w0/2 (sigma1^z + sigma2^z) + g x1 S1^z + g x2 S2^z.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nvscramble/correlators.hpp"
#include "nvscramble/spin_algebra.hpp"

namespace nvs {

struct OscParams {
  double omega1 = 1.0;
  double omega2 = 1.5;
  double D = 0.0;      // linear inter-oscillator coupling
  double xi = 0.0;     // quartic nonlinearity
  double gamma = 0.0;  // damping
  double F = 0.0;      // drive amplitude (common to both oscillators)
  double Omega = 1.0;  // drive angular frequency

  /// Sets D from the connectivity K = D / |w1^2 - w2^2|.
  static OscParams with_connectivity(double omega1, double omega2, double K, double xi,
                                     double gamma, double F, double Omega);
};

enum class Regime { AutonomousLinear, AutonomousNonlinear, DrivenLinear, DrivenNonlinear };

std::string_view to_string(Regime r);
std::optional<Regime> regime_from_string(std::string_view name);

/// The regime implied by (F, gamma, xi), or nullopt for combinations outside the four cases.
std::optional<Regime> infer_regime(const OscParams& op);

/// Throws std::invalid_argument when the parameters contradict the regime.
void check_regime(const OscParams& op, Regime regime);

/// K = D / |w1^2 - w2^2|. Throws std::invalid_argument for w1 == w2.
double connectivity(const OscParams& op);

struct HybridState {
  double t = 0.0;
  double x1 = 0.0, v1 = 0.0, x2 = 0.0, v2 = 0.0;
  SpinState psi = states::ket01();
  Operator4 U = Operator4::Identity();
  // Single-site propagators integrated alongside U; U = U1 (x) U2 in exact arithmetic.
  Operator2 U1 = Operator2::Identity();
  Operator2 U2 = Operator2::Identity();
};

struct HybridDerivative {
  double dx1 = 0.0, dv1 = 0.0, dx2 = 0.0, dv2 = 0.0;
  SpinState dpsi;
  Operator4 dU;
  Operator2 dU1, dU2;
};

/// Single-site part w0/2 sigma^z + g x S^z.
Operator2 site_hamiltonian(double x, const SpinParams& sp);

Operator4 build_spin_hamiltonian(double x1, double x2, const SpinParams& sp);

HybridDerivative derivative(const HybridState& s, const OscParams& op, const SpinParams& sp,
                            Regime regime);

/// H0 = (v1^2 + v2^2)/2 + w1^2 x1^2/2 + w2^2 x2^2/2 + xi (x1^4 + x2^4)/4 + D (x1 - x2)^2/2
double classical_energy(const HybridState& s, const OscParams& op);

struct SeriesRecord {
  double t = 0.0;
  double x1 = 0.0, v1 = 0.0, x2 = 0.0, v2 = 0.0;
  double s1x = 0.0, s1y = 0.0, s1z = 0.0;
  double s2x = 0.0, s2y = 0.0, s2z = 0.0;
  double otoc = 0.0;
  cplx two_point{0.0, 0.0};
  double h0 = 0.0;    // classical energy
  double h_nv = 0.0;  // <w0/2 (sigma1^z + sigma2^z)>
  double v_int = 0.0; // g x1 <S1^z> + g x2 <S2^z>
};

struct TimeSeries {
  double dt_out = 0.0;
  std::vector<SeriesRecord> records;
};

struct IntegrationDiagnostics {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
  std::size_t renormalizations = 0;
  double max_norm_drift = 0.0;         // largest per-step | |psi| - 1 |
  double cumulative_norm_drift = 0.0;  // sum of drifts removed by renormalization
  double max_unitarity_defect = 0.0;   // over output times
  double max_factorization_defect = 0.0;  // max |U - U1 (x) U2| over output times
};

struct IntegrateOptions {
  Operator4 W = default_W();
  Operator4 V = default_V();
  /// Per-step norm drift above which psi is renormalized.
  double renormalize_threshold = 1e-12;
  /// The run fails once the drift removed by renormalization exceeds this.
  double max_cumulative_norm_drift = 1e-6;
  /// Optional hook receiving the full state at every output time.
  std::function<void(const HybridState&)> observer;
};

struct Trajectory {
  TimeSeries series;
  IntegrationDiagnostics diagnostics;
  HybridState final_state;
};

/// Adaptive Dormand-Prince integration sampled every dt_out on [initial.t, t_end].
/// tol (in [1e-12, 1e-4]) targets the error accumulated over the run; each step
/// is held to tol / 100, relative and absolute, in the max norm.
/// Throws IntegrationError on step-size underflow or excessive norm drift.
Trajectory integrate(const HybridState& initial, const OscParams& op, const SpinParams& sp,
                     Regime regime, double t_end, double dt_out, double tol,
                     const IntegrateOptions& options = {});

/// Propagates the state to t_target, forward or backward in time, without sampling.
HybridState evolve(const HybridState& initial, const OscParams& op, const SpinParams& sp,
                   Regime regime, double t_target, double tol);

/// Spin-sector observables of one state.
SeriesRecord observe(const HybridState& s, const OscParams& op, const SpinParams& sp,
                     const SpinState& psi0, const Operator4& W, const Operator4& V,
                     double unitarity_tol = kDefaultUnitarityTol);

struct EnergyBudget {
  std::vector<double> t, h0, h_nv, v_int, total;
  double depth_h0 = 0.0;
  double depth_h_nv = 0.0;
  double depth_v_int = 0.0;
  double depth_total = 0.0;
  /// max |total(t) - total(0)| / |total(0)|
  double max_relative_total_drift = 0.0;
  /// mean <H_NV> / mean H0
  double mean_ratio_nv_to_h0 = 0.0;
};

EnergyBudget energy_budget(const TimeSeries& series);

}  // namespace nvs
