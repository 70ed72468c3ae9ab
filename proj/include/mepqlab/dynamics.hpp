// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef MEPQLAB_DYNAMICS_HPP
#define MEPQLAB_DYNAMICS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "mepqlab/mepacket.hpp"

namespace mepqlab {

/// V(q) = V0 + V1 q + (1/2) V2 q^2 for a particle of mass mu.
struct QuadraticPotential {
  double V0 = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  double mu = 1.0;
};

/// Linear flow coefficients q(t) = f0 + q f1 + p f2, p(t) = g0 + q g1 + p g2.
/// Trig branch for V2 > 0, hyperbolic continuation for V2 < 0, polynomial
/// for V2 = 0; the flow is symplectic: f1 g2 - f2 g1 = 1.
struct EvolutionCoeffs {
  double f0, f1, f2, g0, g1, g2;
};

EvolutionCoeffs evolution_coeffs(const QuadraticPotential& pot, double t);

struct MomentTrajectory {
  std::vector<double> t;
  std::vector<double> Q, P, dQ, dP;
  // standard errors, filled by the Monte Carlo oracle
  std::vector<double> seQ, seP, sedQ, sedP;
};

MomentTrajectory closed_form_trajectory(const MEPacketParams& params,
                                        const QuadraticPotential& pot,
                                        const std::vector<double>& times);

/// Monte Carlo realization of the classical ensemble averages: samples the
/// ME Gaussian, evolves each sample (exactly for quadratic potentials, by
/// adaptive Runge-Kutta for a general potential callback) and reports sample
/// moments with standard errors. Bitwise deterministic for a fixed seed,
/// independent of thread count.
MomentTrajectory mc_classical_oracle(
    const MEPacketParams& params, const QuadraticPotential& pot,
    const std::vector<double>& times, std::int64_t n_samples,
    std::uint64_t seed,
    const std::function<double(double)>* dV = nullptr,  // optional dV/dq
    bool parallel = true);

/// Heisenberg-picture quantum oracle in the packet's truncated Fock basis;
/// moments from q(t), p(t) as ladder-operator matrices. Cutoff convergence
/// is monitored by doubling. Requires nu >= 1 and V2 >= 0.
MomentTrajectory fock_quantum_oracle(const MEPacketParams& params,
                                     const QuadraticPotential& pot,
                                     const std::vector<double>& times,
                                     int cutoff = 0, double conv_tol = 1e-8);

void trajectory_to_csv(const MomentTrajectory& tr, const std::string& path);

}  // namespace mepqlab

#endif
