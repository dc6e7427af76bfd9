#pragma once

// Dense one- and two-qubit operator algebra.
//
// Two-qubit states live in the computational basis {|00>, |01>, |10>, |11>}
// with site 1 the left tensor factor. |0> is the sigma^z = +1 state.
// hbar = 1 throughout.

#include <complex>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

namespace nvs {

using cplx = std::complex<double>;
using Operator2 = Eigen::Matrix2cd;
using Operator4 = Eigen::Matrix4cd;
using SpinState = Eigen::Vector4cd;

enum class PauliAxis { X, Y, Z, Plus, Minus };

/// Spin frequency, spin-oscillator coupling and NV mixing angle.
///
/// When both the Rabi frequency and the detuning are given, use
/// SpinParams::from_rabi() so that omega0 and alpha stay consistent.
struct SpinParams {
  double omega0 = 1.5;
  double g = 1.0;
  double alpha = 0.0;
  std::optional<double> omega_R;
  std::optional<double> delta;

  /// omega0 = sqrt(omega_R^2 + delta^2), tan(alpha) = -omega_R / delta.
  static SpinParams from_rabi(double omega_R, double delta, double g);
};

Operator2 pauli(PauliAxis axis);

/// NV-eigenbasis S^z: (cos a sigma^z + sin a (sigma^+ + sigma^-)) / 2.
Operator2 sz_nv(double alpha);

Operator4 embed(const Operator2& op, int site);

cplx expectation(const SpinState& state, const Operator4& op);

/// exp(-i h t) for Hermitian h, via eigendecomposition.
/// Throws std::invalid_argument when h deviates from Hermitian by more than 1e-10.
Operator4 expm_hermitian(const Operator4& h, double t);

/// Same as above on a single qubit.
Operator2 expm_hermitian(const Operator2& h, double t);

Operator4 kron(const Operator2& a, const Operator2& b);

inline Operator4 commutator(const Operator4& a, const Operator4& b) { return a * b - b * a; }

/// Largest absolute entry of U^dagger U - 1.
double unitarity_defect(const Operator4& u);
double unitarity_defect(const Operator2& u);

double hermiticity_defect(const Operator4& h);

namespace states {
SpinState basis(int index);  // 0..3 -> |00>, |01>, |10>, |11>
SpinState ket01();
/// (|01> - |10>) / sqrt(2)
SpinState bell_phi_minus();
}  // namespace states

}  // namespace nvs
