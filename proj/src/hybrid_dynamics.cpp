#include "nvscramble/hybrid_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nvscramble/dormand_prince.hpp"

namespace nvs {

namespace {

// Packed layout of the real state vector.
constexpr Eigen::Index kOsc = 4;
constexpr Eigen::Index kPsi = kOsc;          // 4 complex
constexpr Eigen::Index kU = kPsi + 8;        // 16 complex, column-major
constexpr Eigen::Index kU1 = kU + 32;        // 4 complex
constexpr Eigen::Index kU2 = kU1 + 8;        // 4 complex
constexpr Eigen::Index kDim = kU2 + 8;

using Vec = Eigen::VectorXd;

template <typename Mat>
void store(Vec& y, Eigen::Index offset, const Mat& m) {
  Eigen::Map<Mat>(reinterpret_cast<cplx*>(y.data() + offset)) = m;
}

template <typename Mat>
Mat load(const Vec& y, Eigen::Index offset) {
  return Eigen::Map<const Mat>(reinterpret_cast<const cplx*>(y.data() + offset));
}

Vec pack(const HybridState& s) {
  Vec y(kDim);
  y(0) = s.x1;
  y(1) = s.v1;
  y(2) = s.x2;
  y(3) = s.v2;
  store(y, kPsi, s.psi);
  store(y, kU, s.U);
  store(y, kU1, s.U1);
  store(y, kU2, s.U2);
  return y;
}

HybridState unpack(double t, const Vec& y) {
  HybridState s;
  s.t = t;
  s.x1 = y(0);
  s.v1 = y(1);
  s.x2 = y(2);
  s.v2 = y(3);
  s.psi = load<SpinState>(y, kPsi);
  s.U = load<Operator4>(y, kU);
  s.U1 = load<Operator2>(y, kU1);
  s.U2 = load<Operator2>(y, kU2);
  return s;
}

Vec pack(const HybridDerivative& d) {
  Vec y(kDim);
  y(0) = d.dx1;
  y(1) = d.dv1;
  y(2) = d.dx2;
  y(3) = d.dv2;
  store(y, kPsi, d.dpsi);
  store(y, kU, d.dU);
  store(y, kU1, d.dU1);
  store(y, kU2, d.dU2);
  return y;
}

bool is_zero(double v) { return v == 0.0; }

void validate_tol(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-4)) {
    throw std::invalid_argument("integrate: tol must lie in [1e-12, 1e-4]");
  }
}

// The user tolerance is a target for the error accumulated over a run of a
// few hundred oscillator periods. Local errors of DP5 add up roughly linearly
// in the step count, so each step is held to tol / kLocalTolDivisor.
constexpr double kLocalTolDivisor = 100.0;

StepControl step_control(double tol) {
  StepControl c;
  c.rtol = tol / kLocalTolDivisor;
  c.atol = tol / kLocalTolDivisor;
  return c;
}

}  // namespace

OscParams OscParams::with_connectivity(double omega1, double omega2, double K, double xi,
                                       double gamma, double F, double Omega) {
  OscParams op;
  op.omega1 = omega1;
  op.omega2 = omega2;
  op.D = K * std::abs(omega1 * omega1 - omega2 * omega2);
  op.xi = xi;
  op.gamma = gamma;
  op.F = F;
  op.Omega = Omega;
  return op;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::AutonomousLinear:
      return "autonomous_linear";
    case Regime::AutonomousNonlinear:
      return "autonomous_nonlinear";
    case Regime::DrivenLinear:
      return "driven_linear";
    case Regime::DrivenNonlinear:
      return "driven_nonlinear";
  }
  return "unknown";
}

std::optional<Regime> regime_from_string(std::string_view name) {
  for (Regime r : {Regime::AutonomousLinear, Regime::AutonomousNonlinear, Regime::DrivenLinear,
                   Regime::DrivenNonlinear}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::optional<Regime> infer_regime(const OscParams& op) {
  const bool driven = !is_zero(op.F);
  const bool damped = !is_zero(op.gamma);
  const bool nonlinear = !is_zero(op.xi);
  if (!driven && !damped) return nonlinear ? Regime::AutonomousNonlinear : Regime::AutonomousLinear;
  if (driven && damped) return nonlinear ? Regime::DrivenNonlinear : Regime::DrivenLinear;
  return std::nullopt;
}

void check_regime(const OscParams& op, Regime regime) {
  if (op.gamma < 0.0) throw std::invalid_argument("damping gamma must be non-negative");
  if (op.F < 0.0) throw std::invalid_argument("drive amplitude F must be non-negative");
  const auto inferred = infer_regime(op);
  if (!inferred || *inferred != regime) {
    throw std::invalid_argument(
        std::string("parameters (F, gamma, xi) are inconsistent with regime ") +
        std::string(to_string(regime)));
  }
}

double connectivity(const OscParams& op) {
  const double gap = std::abs(op.omega1 * op.omega1 - op.omega2 * op.omega2);
  if (gap == 0.0) {
    throw std::invalid_argument("connectivity: degenerate oscillator frequencies (omega1 == omega2)");
  }
  return op.D / gap;
}

Operator2 site_hamiltonian(double x, const SpinParams& sp) {
  return 0.5 * sp.omega0 * pauli(PauliAxis::Z) + (sp.g * x) * sz_nv(sp.alpha);
}

Operator4 build_spin_hamiltonian(double x1, double x2, const SpinParams& sp) {
  return embed(site_hamiltonian(x1, sp), 1) + embed(site_hamiltonian(x2, sp), 2);
}

HybridDerivative derivative(const HybridState& s, const OscParams& op, const SpinParams& sp,
                            Regime /*regime*/) {
  const cplx minus_i(0.0, -1.0);
  const Operator2 h1 = site_hamiltonian(s.x1, sp);
  const Operator2 h2 = site_hamiltonian(s.x2, sp);
  const Operator4 hs = embed(h1, 1) + embed(h2, 2);

  const Operator2 sz = sz_nv(sp.alpha);
  const double s1 = expectation(s.psi, embed(sz, 1)).real();
  const double s2 = expectation(s.psi, embed(sz, 2)).real();

  const double drive = op.F * std::cos(op.Omega * s.t);
  const double coupling = op.D * (s.x1 - s.x2);

  HybridDerivative d;
  d.dx1 = s.v1;
  d.dx2 = s.v2;
  d.dv1 = -2.0 * op.gamma * s.v1 - op.xi * s.x1 * s.x1 * s.x1 + drive -
          op.omega1 * op.omega1 * s.x1 - coupling - sp.g * s1;
  d.dv2 = -2.0 * op.gamma * s.v2 - op.xi * s.x2 * s.x2 * s.x2 + drive -
          op.omega2 * op.omega2 * s.x2 + coupling - sp.g * s2;
  d.dpsi = minus_i * (hs * s.psi);
  d.dU = minus_i * (hs * s.U);
  d.dU1 = minus_i * (h1 * s.U1);
  d.dU2 = minus_i * (h2 * s.U2);
  return d;
}

double classical_energy(const HybridState& s, const OscParams& op) {
  const double dx = s.x1 - s.x2;
  return 0.5 * (s.v1 * s.v1 + s.v2 * s.v2) + 0.5 * op.omega1 * op.omega1 * s.x1 * s.x1 +
         0.5 * op.omega2 * op.omega2 * s.x2 * s.x2 +
         0.25 * op.xi * (std::pow(s.x1, 4) + std::pow(s.x2, 4)) + 0.5 * op.D * dx * dx;
}

SeriesRecord observe(const HybridState& s, const OscParams& op, const SpinParams& sp,
                     const SpinState& psi0, const Operator4& W, const Operator4& V,
                     double unitarity_tol) {
  SeriesRecord r;
  r.t = s.t;
  r.x1 = s.x1;
  r.v1 = s.v1;
  r.x2 = s.x2;
  r.v2 = s.v2;
  const Operator2 sx = pauli(PauliAxis::X), sy = pauli(PauliAxis::Y), sz = pauli(PauliAxis::Z);
  r.s1x = expectation(s.psi, embed(sx, 1)).real();
  r.s1y = expectation(s.psi, embed(sy, 1)).real();
  r.s1z = expectation(s.psi, embed(sz, 1)).real();
  r.s2x = expectation(s.psi, embed(sx, 2)).real();
  r.s2y = expectation(s.psi, embed(sy, 2)).real();
  r.s2z = expectation(s.psi, embed(sz, 2)).real();

  const CorrelatorRecord c = correlate(s.t, s.U, psi0, W, V, unitarity_tol);
  r.otoc = c.C;
  r.two_point = c.G2;

  const Operator2 snv = sz_nv(sp.alpha);
  r.h0 = classical_energy(s, op);
  r.h_nv = 0.5 * sp.omega0 * (r.s1z + r.s2z);
  r.v_int = sp.g * (s.x1 * expectation(s.psi, embed(snv, 1)).real() +
                    s.x2 * expectation(s.psi, embed(snv, 2)).real());
  return r;
}

Trajectory integrate(const HybridState& initial, const OscParams& op, const SpinParams& sp,
                     Regime regime, double t_end, double dt_out, double tol,
                     const IntegrateOptions& options) {
  check_regime(op, regime);
  validate_tol(tol);
  if (t_end < initial.t) throw std::invalid_argument("integrate: t_end precedes the initial time");
  if (!(dt_out > 0.0)) throw std::invalid_argument("integrate: dt_out must be positive");
  if (std::abs(initial.psi.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("integrate: initial spin state is not normalized");
  }

  // The OTOC refers to the state at the start of the run.
  const SpinState psi0 = initial.psi;
  const double unitarity_tol = std::max(kDefaultUnitarityTol, 100.0 * tol);

  Trajectory out;
  out.series.dt_out = dt_out;
  IntegrationDiagnostics& diag = out.diagnostics;

  auto rhs = [&](double t, const Vec& y, Vec& dydt) {
    dydt = pack(derivative(unpack(t, y), op, sp, regime));
  };
  auto sample = [&](double t, const Vec& y) {
    const HybridState s = unpack(t, y);
    diag.max_unitarity_defect = std::max(diag.max_unitarity_defect, unitarity_defect(s.U));
    diag.max_factorization_defect = std::max(
        diag.max_factorization_defect, (s.U - kron(s.U1, s.U2)).cwiseAbs().maxCoeff());
    out.series.records.push_back(observe(s, op, sp, psi0, options.W, options.V, unitarity_tol));
    if (options.observer) options.observer(s);
  };
  auto post = [&](double t, Vec& y) {
    auto psi = Eigen::Map<SpinState>(reinterpret_cast<cplx*>(y.data() + kPsi));
    const double norm = psi.norm();
    const double drift = std::abs(norm - 1.0);
    diag.max_norm_drift = std::max(diag.max_norm_drift, drift);
    if (drift <= options.renormalize_threshold) return false;
    psi /= norm;
    diag.cumulative_norm_drift += drift;
    ++diag.renormalizations;
    if (diag.cumulative_norm_drift > options.max_cumulative_norm_drift) {
      throw IntegrationError("integrate: cumulative norm drift " +
                                 std::to_string(diag.cumulative_norm_drift) +
                                 " exceeds limit at t=" + std::to_string(t),
                             t);
    }
    return true;
  };

  const StepControl control = step_control(tol);
  DormandPrince solver(rhs, control);
  const Vec y_end = solver.integrate(initial.t, pack(initial), t_end, dt_out, sample, post);
  diag.accepted_steps = solver.stats().accepted;
  diag.rejected_steps = solver.stats().rejected;
  diag.rhs_evaluations = solver.stats().rhs_evaluations;
  out.final_state = unpack(t_end, y_end);
  return out;
}

HybridState evolve(const HybridState& initial, const OscParams& op, const SpinParams& sp,
                   Regime regime, double t_target, double tol) {
  check_regime(op, regime);
  validate_tol(tol);
  auto rhs = [&](double t, const Vec& y, Vec& dydt) {
    dydt = pack(derivative(unpack(t, y), op, sp, regime));
  };
  const StepControl control = step_control(tol);
  DormandPrince solver(rhs, control);
  const double span = std::abs(t_target - initial.t);
  const Vec y = solver.integrate(initial.t, pack(initial), t_target,
                                 span > 0.0 ? span : 1.0, {});
  return unpack(t_target, y);
}

EnergyBudget energy_budget(const TimeSeries& series) {
  EnergyBudget b;
  const auto n = series.records.size();
  b.t.reserve(n);
  for (const SeriesRecord& r : series.records) {
    b.t.push_back(r.t);
    b.h0.push_back(r.h0);
    b.h_nv.push_back(r.h_nv);
    b.v_int.push_back(r.v_int);
    b.total.push_back(r.h0 + r.h_nv + r.v_int);
  }
  if (n == 0) return b;
  auto depth = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  b.depth_h0 = depth(b.h0);
  b.depth_h_nv = depth(b.h_nv);
  b.depth_v_int = depth(b.v_int);
  b.depth_total = depth(b.total);
  const double e0 = b.total.front();
  for (double e : b.total) {
    b.max_relative_total_drift =
        std::max(b.max_relative_total_drift, std::abs(e - e0) / std::abs(e0));
  }
  double mean_h0 = 0.0, mean_nv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_h0 += b.h0[i];
    mean_nv += b.h_nv[i];
  }
  b.mean_ratio_nv_to_h0 = mean_h0 != 0.0 ? mean_nv / mean_h0 : 0.0;
  return b;
}

}  // namespace nvs
