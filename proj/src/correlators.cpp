#include "nvscramble/correlators.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace nvs {

namespace {

constexpr double kOperatorUnitaryTol = 1e-10;
constexpr double kStateNormTol = 1e-8;

void check_inputs(const Operator4& U, const SpinState& psi0, const Operator4& W,
                  const Operator4& V, double unitarity_tol) {
  const double du = unitarity_defect(U);
  if (!(du <= unitarity_tol)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "correlator: propagator is not unitary (defect %.3e > %.3e)", du,
                  unitarity_tol);
    throw std::domain_error(buf);
  }
  if (unitarity_defect(W) > kOperatorUnitaryTol || unitarity_defect(V) > kOperatorUnitaryTol) {
    throw std::domain_error("correlator: W and V must be unitary");
  }
  if (std::abs(psi0.norm() - 1.0) > kStateNormTol) {
    throw std::domain_error("correlator: initial state is not normalized");
  }
}

}  // namespace

Operator4 default_W() { return embed(pauli(PauliAxis::Z), 1); }
Operator4 default_V() { return embed(pauli(PauliAxis::Z), 2); }

CorrelatorRecord otoc_product(const Operator4& U, const SpinState& psi0, const Operator4& W,
                              const Operator4& V, double unitarity_tol) {
  check_inputs(U, psi0, W, V, unitarity_tol);
  const Operator4 Wt = U.adjoint() * W * U;
  const SpinState rhs = Wt * (V * psi0);          // W(t) V |psi>
  const SpinState lhs = V * (Wt * psi0);          // V W(t) |psi>
  CorrelatorRecord rec;
  rec.F = lhs.dot(rhs);  // <psi| W(t)^dag V^dag W(t) V |psi>
  rec.C = 1.0 - rec.F.real();
  rec.G2 = psi0.dot(rhs);
  return rec;
}

double otoc_commutator(const Operator4& U, const SpinState& psi0, const Operator4& W,
                       const Operator4& V, double unitarity_tol) {
  check_inputs(U, psi0, W, V, unitarity_tol);
  const Operator4 Wt = U.adjoint() * W * U;
  const SpinState c = commutator(Wt, V) * psi0;
  return 0.5 * c.squaredNorm();
}

cplx two_point(const Operator4& U, const SpinState& psi0, const Operator4& W, const Operator4& V,
               double unitarity_tol) {
  check_inputs(U, psi0, W, V, unitarity_tol);
  return psi0.dot(U.adjoint() * (W * (U * (V * psi0))));
}

CorrelatorRecord correlate(double t, const Operator4& U, const SpinState& psi0,
                           const Operator4& W, const Operator4& V, double unitarity_tol) {
  CorrelatorRecord rec = otoc_product(U, psi0, W, V, unitarity_tol);
  rec.t = t;
  return rec;
}

}  // namespace nvs
