// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef MEPQLAB_CHAIN_HPP
#define MEPQLAB_CHAIN_HPP

#include <string>
#include <vector>

#include "mepqlab/common.hpp"

namespace mepqlab {

/// Linear chain of N identical particles, nearest-neighbour elastic coupling
/// kappa^2/2 (x_n - x_{n-1} - xi)^2, Gibbs state of the internal modes at
/// Lagrange multiplier lambda.
struct ChainParams {
  int N = 2;
  double mu = 1.0;     // particle mass
  double kappa = 1.0;  // oscillator strength
  double xi = 1.0;     // equilibrium spacing
  double lambda = 1.0; // inverse-energy multiplier
  double hbar = 1.0;

  void validate() const;
};

/// Orthogonal normal-mode transform Y (rows m = 0..N-1); row 0 is the
/// center-of-mass combination 1/sqrt(N).
struct ModeTransform {
  RealMatrix Y;
};

struct ChainReport {
  std::vector<double> omega;
  double L_avg;
  double dL;
  double ratio;      // dL / L_avg
  double asymptote;  // 2 sqrt(3) / (pi kappa xi sqrt(lambda)) / sqrt(N)
  double rel_err;    // |ratio - asymptote| / asymptote
};

ModeTransform mode_matrix(int N);
std::vector<double> mode_frequencies(int N, double kappa, double mu);

/// <L> = (N-1) xi exactly; dL^2 from the odd-mode sum with per-mode thermal
/// factor coth(lambda hbar omega / 2). Block-deterministic mode sum.
ChainReport length_statistics(const ChainParams& params, bool parallel = true);

/// Internal energy sum_m hbar omega_m / (e^(lambda hbar omega_m) - 1) over
/// modes m = 1..N-1.
double internal_energy(const ChainParams& params);

/// Relative internal-energy spread dE/E in the Gibbs state.
double energy_relative_spread(const ChainParams& params);

/// Bisection for lambda reproducing a target internal energy.
double solve_lambda(const ChainParams& params_without_lambda, double e_target,
                    double rel_tol = 1e-12);

struct ScalingRow {
  int N;
  double L_avg, dL, ratio, asymptote, rel_err;
};

std::vector<ScalingRow> scaling_study(const ChainParams& base,
                                      const std::vector<int>& Ns,
                                      bool parallel = true);

/// Least-squares slope of ln(ratio) vs ln(N).
double scaling_slope(const std::vector<ScalingRow>& rows);

void scaling_to_csv(const std::vector<ScalingRow>& rows, const std::string& path);

}  // namespace mepqlab

#endif
