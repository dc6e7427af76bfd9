#pragma once

// Two spins coupled through a quantized linear oscillator, treated through the
// effective spin-spin Hamiltonian obtained by eliminating the linear coupling.
// The photon number n = <a^+ a> is a fixed c-number and the Hamiltonian is
// rescaled by 1/(2n + 1):
//
//   H_tot = (w0R + Omega0)(sigma1^z + sigma2^z) + Omega_n (sigma1^+ sigma2^- + sigma1^- sigma2^+)
//
// with Omega0 = g^2/(w0 - w), Omega_n = Omega0/(2n + 1), w0R = w0/(2n + 1).

#include <array>
#include <vector>

#include "nvscramble/spin_algebra.hpp"

namespace nvs {

using DensityMatrix4 = Operator4;

struct QuantumChannelParams {
  double omega0 = 3.0;  // spin frequency
  double omega = 2.0;   // oscillator frequency
  double g = 1.0;
  double n = 0.0;     // mean photon number
  double beta = 0.0;  // inverse temperature

  double Omega0() const;
  double Omega_n() const;
  double omega0R() const;
  /// Omega0 + w0R, half the |00> level.
  double zeeman() const { return Omega0() + omega0R(); }

  /// Throws std::invalid_argument for w0 == w, n < 0 or beta < 0.
  void validate() const;
};

Operator4 h_total(const QuantumChannelParams& p);

struct Eigenpair {
  double energy = 0.0;
  SpinState vector;
};

/// Closed-form spectrum: |00>, (|10> + |01>)/sqrt2, (|10> - |01>)/sqrt2, |11>
/// with energies 2(Omega0 + w0R), Omega_n, -Omega_n, -2(Omega0 + w0R).
std::array<Eigenpair, 4> eigensystem(const QuantumChannelParams& p);

/// The quoted closed form 2 sin^2(4 Omega_n t) for the singlet initial state.
double otoc_analytic(const QuantumChannelParams& p, double t);

/// 1 - cos(4 Omega_n t) = 2 sin^2(2 Omega_n t): the singlet OTOC implied by the
/// spectrum of H_tot (the beta -> infinity restriction of the thermal trace).
double otoc_singlet_spectral(const QuantumChannelParams& p, double t);

/// 1 - Re <psi0| sigma1^z(t) sigma2^z sigma1^z(t) sigma2^z |psi0> with U = exp(-i H_tot t).
double otoc_numeric(const QuantumChannelParams& p, double t, const SpinState& psi0);

/// exp(-beta H_tot) / Z in the computational basis.
DensityMatrix4 thermal_density(const QuantumChannelParams& p);

/// U rho U^dagger with U = exp(-i H_tot t).
DensityMatrix4 evolve_density(const DensityMatrix4& rho, const QuantumChannelParams& p, double t);

struct ThermalValue {
  double closed_form = 0.0;
  double numeric = 0.0;
};

/// Closed form 1 - [cosh 2b(Omega0+w0R) + cos(4 Omega_n t) cosh b Omega_n] / [cosh 2b(Omega0+w0R) + cosh b Omega_n]
/// and the trace 1/2 Tr{rho [sigma1^z(t), sigma2^z]^dagger [sigma1^z(t), sigma2^z]}.
ThermalValue thermal_otoc(const QuantumChannelParams& p, double t);

/// Wootters concurrence max(0, R1 - R2 - R3 - R4). Throws std::domain_error if rho
/// is not a density matrix (eigenvalues below -1e-10, trace or Hermiticity off by > 1e-10).
double concurrence(const DensityMatrix4& rho);

/// Geometric measure of entanglement (1 - sqrt(1 - c)) / 2. Throws for c outside [0, 1].
double gme(double c);

/// GME of a pure two-qubit state. The concurrence deficit 1 - C is taken from
/// the reduced Bloch vector r as r^2 / (1 + sqrt(1 - r^2)), so states near
/// maximal entanglement keep full precision (gme(c) loses half the digits
/// there because of the square root). Throws std::invalid_argument when the
/// state is not normalized within 1e-10.
double gme_pure(const SpinState& psi);

/// Closed form 2 max(0, (|sinh b Omega_n| - 1) / (2 cosh 2b(Omega0+w0R) + 2 cosh b Omega_n))
/// and the Wootters concurrence of the thermal state evolved to time t.
ThermalValue thermal_concurrence(const QuantumChannelParams& p, double t);

struct ClassicalLimitRow {
  double n = 0.0;
  double Omega_n = 0.0;
  double max_otoc = 0.0;          // singlet, propagated numerically
  double max_otoc_published = 0.0;  // 2 sin^2(4 Omega_n t)
  double thermal_amplitude = 0.0;   // max - min of the thermal OTOC
};

/// Sweeps n over an increasing grid and records how large the OTOC gets on [0, t_max].
std::vector<ClassicalLimitRow> classical_limit_report(const QuantumChannelParams& p, double t_max,
                                                      const std::vector<double>& n_grid,
                                                      int samples = 2001);

}  // namespace nvs
