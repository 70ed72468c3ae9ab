// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
//
// Test-side oracles, independent of the implementation paths they check.

#ifndef MEPQLAB_TESTS_ORACLES_HPP
#define MEPQLAB_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "mepqlab/chain.hpp"
#include "mepqlab/common.hpp"

namespace mepqlab::oracles {

/// Adaptive Simpson quadrature on [a, b]. The first `force` levels always
/// split, so the estimator cannot terminate on accidental zeros of smooth
/// integrands (symmetric moments, tails).
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-12, int depth = 24, int force = 8) {
  std::function<double(double, double, double, double, double, int, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, int d,
          int must) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double fl = f(lmid), fr = f(rmid);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
    if (must <= 0 &&
        (d <= 0 || std::abs(left + right - whole) < 15.0 * tol))
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, flo, fl, fmid, d - 1, must - 1) +
           rec(mid, hi, fmid, fr, fhi, d - 1, must - 1);
  };
  const double mid = 0.5 * (a + b);
  return rec(a, b, f(a), f(mid), f(b), depth, force);
}

/// 2D phase-space integral of exp(-l1 q - l3 q^2 - l2 p - l4 p^2) dq dp / v
/// over a box wide enough for double precision.
inline double partition_quadrature(double l1, double l2, double l3, double l4,
                                   double v) {
  const double wq = 10.0 / std::sqrt(l3) + std::abs(l1) / l3;
  const double wp = 10.0 / std::sqrt(l4) + std::abs(l2) / l4;
  const double cq = -l1 / (2.0 * l3), cp = -l2 / (2.0 * l4);
  const double iq = simpson(
      [&](double q) { return std::exp(-l1 * q - l3 * q * q); }, cq - wq, cq + wq);
  const double ip = simpson(
      [&](double p) { return std::exp(-l2 * p - l4 * p * p); }, cp - wp, cp + wp);
  return iq * ip / v;
}

/// Brute-force chain length variance: per odd mode, a truncated Fock-basis
/// Gibbs trace with explicit ladder matrices (no closed thermal factor).
inline double chain_dl2_fock_gibbs(const ChainParams& params, int cutoff = 40) {
  const auto omega = mode_frequencies(params.N, params.kappa, params.mu);
  double dl2 = 0;
  for (int m = 1; m < params.N; m += 2) {
    const double w = omega[static_cast<size_t>(m)];
    // u = sqrt(hbar/(2 mu w)) (a + a^dag) as a dense matrix
    RealMatrix u = RealMatrix::Zero(cutoff, cutoff);
    const double scale = std::sqrt(params.hbar / (2.0 * params.mu * w));
    for (int k = 1; k < cutoff; ++k) {
      u(k - 1, k) = scale * std::sqrt(double(k));
      u(k, k - 1) = scale * std::sqrt(double(k));
    }
    // Gibbs weights over phonon occupation
    RealVector gw(cutoff);
    double z = 0;
    for (int k = 0; k < cutoff; ++k) {
      gw(k) = std::exp(-params.lambda * params.hbar * w * k);
      z += gw(k);
    }
    gw /= z;
    const RealMatrix u2 = u * u;
    double mean_u = 0, mean_u2 = 0;
    for (int k = 0; k < cutoff; ++k) {
      mean_u += gw(k) * u(k, k);
      mean_u2 += gw(k) * u2(k, k);
    }
    const double theta = 0.5 * M_PI * m / params.N;
    const double coeff2 = 8.0 / params.N * std::cos(theta) * std::cos(theta);
    dl2 += coeff2 * (mean_u2 - mean_u * mean_u);
  }
  return dl2;
}

/// Eigenfrequencies of the chain coupling matrix by dense diagonalization
/// of the stiffness quadratic form (free-free chain).
inline std::vector<double> chain_frequencies_eigen(int N, double kappa, double mu) {
  RealMatrix k = RealMatrix::Zero(N, N);
  for (int n = 1; n < N; ++n) {
    k(n - 1, n - 1) += kappa * kappa;
    k(n, n) += kappa * kappa;
    k(n - 1, n) -= kappa * kappa;
    k(n, n - 1) -= kappa * kappa;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(k / mu);
  std::vector<double> w;
  for (int i = 0; i < N; ++i)
    w.push_back(std::sqrt(std::max(es.eigenvalues()(i), 0.0)));
  return w;
}

/// Differential entropy -int f ln f of a 1D density by quadrature.
inline double entropy_1d(const std::function<double(double)>& f, double lo,
                         double hi) {
  return simpson(
      [&](double x) {
        const double v = f(x);
        return (v > 1e-300) ? -v * std::log(v) : 0.0;
      },
      lo, hi, 1e-12);
}

}  // namespace mepqlab::oracles

#endif
