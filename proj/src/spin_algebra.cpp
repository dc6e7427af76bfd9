#include "nvscramble/spin_algebra.hpp"

#include <cmath>
#include <string>

namespace nvs {

namespace {

constexpr double kHermitianTol = 1e-10;

template <typename Mat>
Mat expm_hermitian_impl(const Mat& h, double t) {
  const double defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (defect > kHermitianTol) {
    throw std::invalid_argument("expm_hermitian: matrix is not Hermitian (defect " +
                                std::to_string(defect) + ")");
  }
  if (t == 0.0) return Mat::Identity();
  // Symmetrize so the self-adjoint solver sees an exactly Hermitian input.
  const Mat hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> solver(hs);
  const auto& vals = solver.eigenvalues();
  const Mat& vecs = solver.eigenvectors();
  Mat phases = Mat::Zero();
  for (int k = 0; k < vals.size(); ++k) {
    phases(k, k) = std::exp(cplx(0.0, -vals(k) * t));
  }
  return vecs * phases * vecs.adjoint();
}

}  // namespace

SpinParams SpinParams::from_rabi(double omega_R, double delta, double g) {
  SpinParams sp;
  sp.omega_R = omega_R;
  sp.delta = delta;
  sp.g = g;
  sp.omega0 = std::hypot(omega_R, delta);
  // tan(alpha) = -omega_R / delta; atan keeps alpha in (-pi/2, pi/2].
  sp.alpha = (delta == 0.0) ? (omega_R == 0.0 ? 0.0 : -std::copysign(M_PI / 2.0, omega_R))
                            : std::atan(-omega_R / delta);
  return sp;
}

Operator2 pauli(PauliAxis axis) {
  const cplx i(0.0, 1.0);
  Operator2 m = Operator2::Zero();
  switch (axis) {
    case PauliAxis::X:
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case PauliAxis::Y:
      m << 0.0, -i, i, 0.0;
      break;
    case PauliAxis::Z:
      m << 1.0, 0.0, 0.0, -1.0;
      break;
    case PauliAxis::Plus:
      // (sigma^x + i sigma^y) / 2 = |0><1|
      m << 0.0, 1.0, 0.0, 0.0;
      break;
    case PauliAxis::Minus:
      m << 0.0, 0.0, 1.0, 0.0;
      break;
  }
  return m;
}

Operator2 sz_nv(double alpha) {
  return 0.5 * (std::cos(alpha) * pauli(PauliAxis::Z) +
                std::sin(alpha) * (pauli(PauliAxis::Plus) + pauli(PauliAxis::Minus)));
}

Operator4 kron(const Operator2& a, const Operator2& b) {
  Operator4 out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
  return out;
}

Operator4 embed(const Operator2& op, int site) {
  switch (site) {
    case 1:
      return kron(op, Operator2::Identity());
    case 2:
      return kron(Operator2::Identity(), op);
    default:
      throw std::invalid_argument("embed: site must be 1 or 2, got " + std::to_string(site));
  }
}

cplx expectation(const SpinState& state, const Operator4& op) {
  return state.dot(op * state);  // Eigen's dot conjugates the left operand
}

Operator4 expm_hermitian(const Operator4& h, double t) { return expm_hermitian_impl(h, t); }
Operator2 expm_hermitian(const Operator2& h, double t) { return expm_hermitian_impl(h, t); }

double unitarity_defect(const Operator4& u) {
  return (u.adjoint() * u - Operator4::Identity()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Operator2& u) {
  return (u.adjoint() * u - Operator2::Identity()).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Operator4& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

namespace states {

SpinState basis(int index) {
  if (index < 0 || index > 3) throw std::invalid_argument("basis index out of range");
  SpinState s = SpinState::Zero();
  s(index) = 1.0;
  return s;
}

SpinState ket01() { return basis(1); }

SpinState bell_phi_minus() {
  SpinState s = SpinState::Zero();
  s(1) = M_SQRT1_2;
  s(2) = -M_SQRT1_2;
  return s;
}

}  // namespace states

}  // namespace nvs
