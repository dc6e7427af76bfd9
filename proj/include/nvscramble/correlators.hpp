#pragma once

// Out-of-time-ordered and two-point correlators evaluated from an accumulated
// propagator U(t, t0) and the initial state. W(t) = U^dagger W U.

#include "nvscramble/spin_algebra.hpp"

namespace nvs {

struct CorrelatorRecord {
  double t = 0.0;
  cplx F{1.0, 0.0};  // <W(t)^dag V^dag W(t) V>
  double C = 0.0;    // 1 - Re F
  cplx G2{0.0, 0.0};  // <W(t) V>
};

/// Default tolerance on the unitarity defect of U accepted by the correlators.
inline constexpr double kDefaultUnitarityTol = 1e-8;

/// Product form: C = 1 - Re <psi0| W(t)^dag V^dag W(t) V |psi0>.
/// Throws std::domain_error when U, W or V are not unitary or psi0 is not normalized.
CorrelatorRecord otoc_product(const Operator4& U, const SpinState& psi0, const Operator4& W,
                              const Operator4& V, double unitarity_tol = kDefaultUnitarityTol);

/// Commutator form: 1/2 <psi0| [W(t), V]^dag [W(t), V] |psi0>.
double otoc_commutator(const Operator4& U, const SpinState& psi0, const Operator4& W,
                       const Operator4& V, double unitarity_tol = kDefaultUnitarityTol);

/// Time-ordered two-point function <psi0| W(t) V |psi0>.
cplx two_point(const Operator4& U, const SpinState& psi0, const Operator4& W, const Operator4& V,
               double unitarity_tol = kDefaultUnitarityTol);

/// Product-form OTOC and two-point function in one pass; `t` is copied into the record.
CorrelatorRecord correlate(double t, const Operator4& U, const SpinState& psi0,
                           const Operator4& W, const Operator4& V,
                           double unitarity_tol = kDefaultUnitarityTol);

/// sigma_1^z and sigma_2^z, the default OTOC pair.
Operator4 default_W();
Operator4 default_V();

}  // namespace nvs
