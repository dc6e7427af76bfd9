#include "nvscramble/quantum_channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nvscramble/correlators.hpp"

namespace nvs {

namespace {

constexpr double kDensityTol = 1e-10;

// cosh(x) * exp(-shift), without overflow for large |x|.
double scaled_cosh(double x, double shift) {
  return 0.5 * (std::exp(x - shift) + std::exp(-x - shift));
}

double scaled_abs_sinh(double x, double shift) {
  return 0.5 * std::abs(std::exp(x - shift) - std::exp(-x - shift));
}

}  // namespace

double QuantumChannelParams::Omega0() const { return g * g / (omega0 - omega); }
double QuantumChannelParams::Omega_n() const { return Omega0() / (2.0 * n + 1.0); }
double QuantumChannelParams::omega0R() const { return omega0 / (2.0 * n + 1.0); }

void QuantumChannelParams::validate() const {
  if (omega0 == omega) {
    throw std::invalid_argument("quantum channel: omega0 == omega makes Omega0 diverge");
  }
  if (!(n >= 0.0)) throw std::invalid_argument("quantum channel: photon number must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("quantum channel: beta must be >= 0");
}

Operator4 h_total(const QuantumChannelParams& p) {
  p.validate();
  const double z = 2.0 * p.zeeman();
  const double x = p.Omega_n();
  Operator4 h = Operator4::Zero();
  h(0, 0) = z;
  h(1, 2) = x;
  h(2, 1) = x;
  h(3, 3) = -z;
  return h;
}

std::array<Eigenpair, 4> eigensystem(const QuantumChannelParams& p) {
  p.validate();
  const double z = 2.0 * p.zeeman();
  const double x = p.Omega_n();
  SpinState sym = SpinState::Zero(), anti = SpinState::Zero();
  sym(2) = M_SQRT1_2;  // |10>
  sym(1) = M_SQRT1_2;  // |01>
  anti(2) = M_SQRT1_2;
  anti(1) = -M_SQRT1_2;
  return {{{z, states::basis(0)}, {x, sym}, {-x, anti}, {-z, states::basis(3)}}};
}

double otoc_analytic(const QuantumChannelParams& p, double t) {
  const double s = std::sin(4.0 * p.Omega_n() * t);
  return 2.0 * s * s;
}

double otoc_singlet_spectral(const QuantumChannelParams& p, double t) {
  const double s = std::sin(2.0 * p.Omega_n() * t);
  return 2.0 * s * s;
}

double otoc_numeric(const QuantumChannelParams& p, double t, const SpinState& psi0) {
  const Operator4 U = expm_hermitian(h_total(p), t);
  return otoc_product(U, psi0, default_W(), default_V()).C;
}

DensityMatrix4 thermal_density(const QuantumChannelParams& p) {
  p.validate();
  const auto spectrum = eigensystem(p);
  double e_min = spectrum[0].energy;
  for (const auto& e : spectrum) e_min = std::min(e_min, e.energy);
  DensityMatrix4 rho = DensityMatrix4::Zero();
  double z = 0.0;
  for (const auto& e : spectrum) {
    const double w = std::exp(-p.beta * (e.energy - e_min));
    rho += w * e.vector * e.vector.adjoint();
    z += w;
  }
  return rho / z;
}

DensityMatrix4 evolve_density(const DensityMatrix4& rho, const QuantumChannelParams& p,
                              double t) {
  const Operator4 U = expm_hermitian(h_total(p), t);
  return U * rho * U.adjoint();
}

ThermalValue thermal_otoc(const QuantumChannelParams& p, double t) {
  p.validate();
  ThermalValue out;
  const double a = 2.0 * p.beta * p.zeeman();
  const double b = p.beta * p.Omega_n();
  const double shift = std::max(std::abs(a), std::abs(b));
  const double ca = scaled_cosh(a, shift), cb = scaled_cosh(b, shift);
  // 1 - cos x written as 2 sin^2(x/2) so that t = 0 gives exactly 0.
  const double s = std::sin(2.0 * p.Omega_n() * t);
  out.closed_form = 2.0 * s * s * cb / (ca + cb);

  // Commutator form 1/2 Tr{rho [W(t),V]^dagger [W(t),V]}; equal to 1 - Re Tr{rho W(t)VW(t)V}
  // for unitary involutions, and exactly 0 when U = 1.
  const Operator4 U = expm_hermitian(h_total(p), t);
  const Operator4 wt = U.adjoint() * default_W() * U;
  const Operator4 m = wt * default_V() - default_V() * wt;
  out.numeric = 0.5 * (thermal_density(p) * m.adjoint() * m).trace().real();
  return out;
}

double concurrence(const DensityMatrix4& rho) {
  const double herm = hermiticity_defect(rho);
  const double tr_err = std::abs(rho.trace() - cplx(1.0, 0.0));
  if (herm > kDensityTol || tr_err > kDensityTol) {
    throw std::domain_error("concurrence: not a density matrix (Hermiticity defect " +
                            std::to_string(herm) + ", trace error " + std::to_string(tr_err) +
                            ")");
  }
  Eigen::SelfAdjointEigenSolver<Operator4> solver(0.5 * (rho + rho.adjoint()));
  Eigen::Vector4d p = solver.eigenvalues();
  if (p.minCoeff() < -kDensityTol) {
    throw std::domain_error("concurrence: negative eigenvalue " + std::to_string(p.minCoeff()));
  }
  p = p.cwiseMax(0.0);
  const Operator4 sqrt_rho =
      solver.eigenvectors() * p.cwiseSqrt().asDiagonal() * solver.eigenvectors().adjoint();

  // The square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy) are the
  // singular values of conj(sqrt(rho)) (sy x sy) sqrt(rho); the SVD route avoids
  // amplifying round-off in near-zero eigenvalues through the square root.
  const Operator2 sy = pauli(PauliAxis::Y);
  const Operator4 flip = kron(sy, sy);
  const Operator4 m = sqrt_rho.conjugate() * flip * sqrt_rho;
  Eigen::JacobiSVD<Operator4> svd(m);
  Eigen::Vector4d r = svd.singularValues();  // descending
  std::sort(r.data(), r.data() + 4, std::greater<>());
  return std::max(0.0, r(0) - r(1) - r(2) - r(3));
}

double gme(double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::domain_error("gme: concurrence must lie in [0, 1], got " + std::to_string(c));
  }
  return 0.5 * (1.0 - std::sqrt(1.0 - c));
}

double gme_pure(const SpinState& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("gme_pure: state is not normalized");
  }
  // Reduced state of site 1 (left factor).
  const cplx r00 = std::norm(psi(0)) + std::norm(psi(1));
  const cplx r11 = std::norm(psi(2)) + std::norm(psi(3));
  const cplx r01 = psi(0) * std::conj(psi(2)) + psi(1) * std::conj(psi(3));
  const double rz = (r00 - r11).real();
  const double r2 = std::min(1.0, rz * rz + 4.0 * std::norm(r01));
  const double deficit = r2 / (1.0 + std::sqrt(1.0 - r2));  // 1 - C
  return 0.5 * (1.0 - std::sqrt(deficit));
}

ThermalValue thermal_concurrence(const QuantumChannelParams& p, double t) {
  p.validate();
  ThermalValue out;
  const double a = 2.0 * p.beta * p.zeeman();
  const double b = p.beta * p.Omega_n();
  const double shift = std::max(std::abs(a), std::abs(b));
  const double num = scaled_abs_sinh(b, shift) - std::exp(-shift);
  const double den = 2.0 * scaled_cosh(a, shift) + 2.0 * scaled_cosh(b, shift);
  out.closed_form = 2.0 * std::max(0.0, num / den);
  out.numeric = concurrence(evolve_density(thermal_density(p), p, t));
  return out;
}

std::vector<ClassicalLimitRow> classical_limit_report(const QuantumChannelParams& p, double t_max,
                                                      const std::vector<double>& n_grid,
                                                      int samples) {
  if (!(t_max > 0.0)) throw std::invalid_argument("classical_limit_report: t_max must be positive");
  if (samples < 2) throw std::invalid_argument("classical_limit_report: need at least 2 samples");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (!(n_grid[i] > n_grid[i - 1])) {
      throw std::invalid_argument("classical_limit_report: n grid must be strictly increasing");
    }
  }
  const SpinState singlet = states::bell_phi_minus();
  std::vector<ClassicalLimitRow> rows;
  rows.reserve(n_grid.size());
  for (double n : n_grid) {
    QuantumChannelParams q = p;
    q.n = n;
    q.validate();
    ClassicalLimitRow row;
    row.n = n;
    row.Omega_n = q.Omega_n();
    double th_min = 0.0, th_max = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double t = t_max * static_cast<double>(k) / (samples - 1);
      row.max_otoc = std::max(row.max_otoc, otoc_numeric(q, t, singlet));
      row.max_otoc_published = std::max(row.max_otoc_published, otoc_analytic(q, t));
      const double th = thermal_otoc(q, t).closed_form;
      if (k == 0) {
        th_min = th_max = th;
      } else {
        th_min = std::min(th_min, th);
        th_max = std::max(th_max, th);
      }
    }
    row.thermal_amplitude = th_max - th_min;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nvs
