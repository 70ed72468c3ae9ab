// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef MEPQLAB_MEPACKET_HPP
#define MEPQLAB_MEPACKET_HPP

#include <string>
#include <vector>

#include "mepqlab/grid.hpp"
#include "mepqlab/hilbert.hpp"

namespace mepqlab {

/// First and second moments of one degree of freedom plus the units.
/// nu = 2 dP dQ / hbar is the uncertainty measure; quantum packets
/// require nu >= 1.
struct MEPacketParams {
  double Q = 0.0;
  double P = 0.0;
  double dQ = 1.0;
  double dP = 1.0;
  double hbar = 1.0;
  double v = 1.0;  // classical phase-space volume unit

  double nu() const { return 2.0 * dP * dQ / hbar; }
  void validate_classical() const;
  void validate_quantum() const;
};

MEPacketParams params_from_file(const std::string& path);
void params_to_file(const MEPacketParams& p, const std::string& path);

/// Gaussian phase-space density maximizing entropy at fixed moments.
struct ClassicalMEPacket {
  MEPacketParams params;

  double density(double q, double p) const;
  /// differential entropy with the dq dp / v measure
  double entropy() const;
  void sample(SplitMix64& rng, double& q, double& p) const;
};

ClassicalMEPacket classical_density(const MEPacketParams& params);

double classical_partition(double l1, double l2, double l3, double l4, double v);
double quantum_partition(double l1, double l2, double l3, double l4, double hbar);

/// Eigenvalue weights R_m = 2 (nu-1)^m / (nu+1)^(m+1) of the packet state.
std::vector<double> me_weights(double nu, int cutoff);

/// Smallest cutoff M with geometric tail ((nu-1)/(nu+1))^(M+1) < tail_tol.
int adaptive_cutoff(double nu, double tail_tol = 1e-12);

/// Fock-basis ladder realization of the packet's effective oscillator
/// (frequency 1, mass dP/dQ, centered at (Q, P)).
struct FockRep {
  MEPacketParams params;
  int cutoff;
  Matrix q;  // position operator
  Matrix p;  // momentum operator
};

FockRep fock_rep(const MEPacketParams& params, int cutoff);

enum class Representation { fock, grid };

/// ME packet state operator; grid representation uses Hermite functions of
/// the effective oscillator evaluated by recurrence.
StateOperator quantum_state(const MEPacketParams& params, Representation rep,
                            int cutoff = 0, const Grid1D* grid = nullptr,
                            double tail_tol = 1e-12);

/// Ground eigenfunction of the packet's effective oscillator on a grid
/// (Gaussian with exponent -nu (q-Q)^2 / (4 dQ^2) and phase i P q / hbar).
GridWavefunction ground_wavefunction(const MEPacketParams& params, const Grid1D& grid);

struct ClassicalLimitRow {
  double nu;
  double x;          // hbar sqrt(l3 l4) = (1/2) ln((nu+1)/(nu-1))
  double deviation;  // sinh(x)/x - 1 (classical/quantum partition ratio at v = h)
};

std::vector<ClassicalLimitRow> classical_limit_report(const std::vector<double>& nus);

}  // namespace mepqlab

#endif
