#include "nvscramble/dormand_prince.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nvs {

namespace {

// Butcher tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// 5th-order minus 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;  // largest shrink per step
constexpr double kFacMax = 10.0;
constexpr double kBeta = 0.04;  // PI stabilization
constexpr double kExpo = 0.2 - kBeta * 0.75;

}  // namespace

DormandPrince::DormandPrince(Rhs rhs, StepControl control)
    : rhs_(std::move(rhs)), control_(control) {
  if (!(control_.rtol > 0.0) || !(control_.atol >= 0.0)) {
    throw std::invalid_argument("DormandPrince: tolerances must be positive");
  }
}

double DormandPrince::error_norm(const Vec& y0, const Vec& y1, const Vec& err) const {
  // Max norm: every component (each entry of U included) must meet the tolerance.
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sk = control_.atol + control_.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    worst = std::max(worst, std::abs(err(i)) / sk);
  }
  return worst;
}

double DormandPrince::initial_step(double t0, const Vec& y0, const Vec& f0, double direction) {
  if (control_.h_initial > 0.0) return control_.h_initial;
  Vec sk(y0.size());
  for (Eigen::Index i = 0; i < y0.size(); ++i)
    sk(i) = control_.atol + control_.rtol * std::abs(y0(i));
  const double n = static_cast<double>(y0.size());
  const double dnf = std::sqrt((f0.array() / sk.array()).square().sum() / n);
  const double dny = std::sqrt((y0.array() / sk.array()).square().sum() / n);
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
  if (control_.h_max > 0.0) h = std::min(h, control_.h_max);

  Vec y1 = y0 + direction * h * f0;
  Vec f1(y0.size());
  rhs_(t0 + direction * h, y1, f1);
  ++stats_.rhs_evaluations;
  const double der2 = std::sqrt(((f1 - f0).array() / sk.array()).square().sum() / n) / h;
  const double der12 = std::max(std::abs(der2), dnf);
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  h = std::min(100.0 * h, h1);
  if (control_.h_max > 0.0) h = std::min(h, control_.h_max);
  return h;
}

DormandPrince::Vec DormandPrince::integrate(double t0, const Vec& y0, double t1, double dt_out,
                                            const Sampler& sample, const PostStep& post,
                                            bool include_end) {
  if (!(dt_out > 0.0)) throw std::invalid_argument("DormandPrince: dt_out must be positive");
  stats_ = {};
  const double span = t1 - t0;
  const double direction = span >= 0.0 ? 1.0 : -1.0;
  const double length = std::abs(span);

  // Sample grid t0 + k*dt_out, |k*dt_out| <= length (with a relative slack for round-off).
  const auto n_samples =
      static_cast<std::size_t>(std::floor(length / dt_out * (1.0 + 1e-12) + 1e-9)) + 1;
  auto sample_time = [&](std::size_t k) {
    return t0 + direction * static_cast<double>(k) * dt_out;
  };
  const bool extra_end = include_end && std::abs(sample_time(n_samples - 1) - t1) >
                                            1e-12 * std::max(1.0, std::abs(t1));
  std::size_t next_sample = 0;

  const Eigen::Index dim = y0.size();
  Vec y = y0;
  if (length == 0.0) {
    if (sample) sample(t0, y);
    return y;
  }

  Vec k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), ytmp(dim), ynew(dim),
      err(dim);
  Vec r1(dim), r2(dim), r3(dim), r4(dim), r5(dim);
  rhs_(t0, y, k1);
  ++stats_.rhs_evaluations;

  if (sample) {
    sample(t0, y);
  }
  next_sample = 1;

  double t = t0;
  double h = initial_step(t0, y, k1, direction);
  double fac_old = 1e-4;
  bool last_rejected = false;
  const double eps = std::numeric_limits<double>::epsilon();

  while (direction * (t1 - t) > 0.0) {
    if (stats_.accepted + stats_.rejected >= control_.max_steps) {
      throw IntegrationError("DormandPrince: step budget exhausted at t=" + std::to_string(t), t);
    }
    if (h < 10.0 * eps * std::max(1.0, std::abs(t))) {
      throw IntegrationError("DormandPrince: step size underflow at t=" + std::to_string(t), t);
    }
    if (control_.h_max > 0.0) h = std::min(h, control_.h_max);
    bool last = false;
    if (h >= direction * (t1 - t)) {
      h = direction * (t1 - t);
      last = true;
    }
    const double hs = direction * h;

    ytmp = y + hs * a21 * k1;
    rhs_(t + c2 * hs, ytmp, k2);
    ytmp = y + hs * (a31 * k1 + a32 * k2);
    rhs_(t + c3 * hs, ytmp, k3);
    ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs_(t + c4 * hs, ytmp, k4);
    ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs_(t + c5 * hs, ytmp, k5);
    ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const double t_new = last ? t1 : t + hs;
    rhs_(t_new, ytmp, k6);
    ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs_(t_new, ynew, k7);
    stats_.rhs_evaluations += 6;

    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err_norm = error_norm(y, ynew, err);
    if (!std::isfinite(err_norm)) {
      throw IntegrationError("DormandPrince: non-finite state at t=" + std::to_string(t), t);
    }

    if (err_norm <= 1.0) {
      ++stats_.accepted;
      // Dense output coefficients for the step [t, t_new].
      if (sample && next_sample < n_samples + (extra_end ? 1 : 0)) {
        r1 = y;
        r2 = ynew - y;
        r3 = hs * k1 - r2;
        r4 = r2 - hs * k7 - r3;
        r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (next_sample < n_samples) {
          const double ts = sample_time(next_sample);
          if (direction * (ts - t_new) > 0.0) break;
          double theta = (ts - t) / hs;
          theta = std::clamp(theta, 0.0, 1.0);
          const double theta1 = 1.0 - theta;
          if (theta == 1.0) {
            sample(ts, ynew);
          } else {
            ytmp = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
            sample(ts, ytmp);
          }
          ++next_sample;
        }
        if (last && extra_end && next_sample == n_samples) {
          sample(t1, ynew);
          ++next_sample;
        }
      }

      t = t_new;
      y = ynew;
      k1 = k7;
      if (post && post(t, y)) {
        rhs_(t, y, k1);
        ++stats_.rhs_evaluations;
      }

      const double fac11 = std::pow(std::max(err_norm, 1e-10), kExpo);
      double fac = fac11 / std::pow(fac_old, kBeta) / kSafety;
      fac = std::clamp(fac, 1.0 / kFacMax, 1.0 / kFacMin);
      double h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      fac_old = std::max(err_norm, 1e-4);
      last_rejected = false;
      stats_.last_step = h;
      h = h_new;
    } else {
      ++stats_.rejected;
      const double fac11 = std::pow(err_norm, kExpo);
      h = h / std::min(1.0 / kFacMin, fac11 / kSafety);
      last_rejected = true;
    }
  }
  return y;
}

}  // namespace nvs
