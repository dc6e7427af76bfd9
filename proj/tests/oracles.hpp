#pragma once

#include <cmath>

namespace test_oracles {

// Exact solution of x'' = -M x with M = [[w1^2 + D, -D], [-D, w2^2 + D]],
// from the closed-form eigensystem of the symmetric 2x2 matrix.
struct NormalModes {
  double lam[2];
  double e[2][2];  // e[k] is the k-th unit eigenvector
  NormalModes(double w1, double w2, double D) {
    const double a = w1 * w1 + D, c = w2 * w2 + D, b = -D;
    const double mid = 0.5 * (a + c), rad = std::hypot(0.5 * (a - c), b);
    lam[0] = mid - rad;
    lam[1] = mid + rad;
    for (int k = 0; k < 2; ++k) {
      // (a - lam) u + b v = 0
      double u = -b, v = a - lam[k];
      if (std::hypot(u, v) < 1e-14) {
        u = c - lam[k];
        v = -b;
      }
      const double nrm = std::hypot(u, v);
      e[k][0] = u / nrm;
      e[k][1] = v / nrm;
    }
  }
  void at(double t, const double x0[2], const double v0[2], double x[2]) const {
    x[0] = x[1] = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double w = std::sqrt(lam[k]);
      const double px = e[k][0] * x0[0] + e[k][1] * x0[1];
      const double pv = e[k][0] * v0[0] + e[k][1] * v0[1];
      const double q = px * std::cos(w * t) + pv * std::sin(w * t) / w;
      x[0] += q * e[k][0];
      x[1] += q * e[k][1];
    }
  }
};

}  // namespace test_oracles
