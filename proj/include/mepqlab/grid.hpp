// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef MEPQLAB_GRID_HPP
#define MEPQLAB_GRID_HPP

#include <functional>
#include <string>
#include <vector>

#include "mepqlab/povm.hpp"

namespace mepqlab {

/// Uniform periodic 1D position grid. Momentum lattice:
/// p_j = 2 pi hbar j / (n dx), j = -n/2 .. n/2-1.
struct Grid1D {
  double x0 = 0.0;
  double dx = 1.0;
  int n = 8;
  double hbar = 1.0;

  Grid1D() = default;
  Grid1D(double x0_, double dx_, int n_, double hbar_ = 1.0);

  double x(int i) const { return x0 + i * dx; }
  double length() const { return n * dx; }
  double dp() const { return 2.0 * M_PI * hbar / length(); }
  /// centered momentum lattice index j for storage slot i
  int pindex(int i) const { return (i < n / 2) ? i : i - n; }
  double p(int i) const { return dp() * pindex(i); }
  HilbertSpace space(const std::string& label = "grid") const;
  bool same_as(const Grid1D& g) const;
};

/// Complex samples psi(x_i); state normalization dx * sum |psi|^2 = 1.
struct GridWavefunction {
  Grid1D grid;
  Vector values;

  double norm() const;
  GridWavefunction normalized() const;
  /// l2 unit Ket (amplitudes sqrt(dx) * psi)
  Ket to_ket() const;
  static GridWavefunction from_ket(const Grid1D& grid, const Ket& k);
};

/// Two-particle wavefunction Psi(x1, x2) stored as an n x n matrix
/// (first index = x1); normalization dx^2 * sum |Psi|^2 = 1.
struct GridWavefunction2 {
  Grid1D grid;
  Matrix values;

  double norm() const;
  GridWavefunction2 swapped() const { return {grid, values.transpose()}; }
};

/// Sampled open region D: indicator per grid point.
struct RegionMask {
  Grid1D grid;
  std::vector<bool> indicator;

  int count() const;
  bool disjoint_from(const RegionMask& other) const;
  static RegionMask interval(const Grid1D& grid, double lo, double hi);
};

/// Integral-operator kernel A(x;x') with weight dx:
/// (A psi)(x) = dx * sum_x' A(x;x') psi(x').
struct KernelOp {
  Grid1D grid;
  Matrix k;

  GridWavefunction apply(const GridWavefunction& psi) const;
  /// l2 matrix (dx * k), the LinOp acting on to_ket() amplitudes
  LinOp to_linop(const std::string& label = "grid") const;
  static KernelOp from_linop(const Grid1D& grid, const LinOp& a);
  static KernelOp position(const Grid1D& grid);
  static KernelOp identity(const Grid1D& grid);
};

/// Two-particle observable built from a one-particle kernel:
/// A = a x delta + delta x a (deltas are Kronecker/dx on the grid).
struct SymmetricObservable {
  KernelOp a;

  GridWavefunction2 apply(const GridWavefunction2& psi) const;
  double expectation(const GridWavefunction2& psi) const;
  /// dense n^2 x n^2 l2 matrix; intended for small grids
  Matrix dense() const;
};

// --- Fourier ----------------------------------------------------------------

/// Unitary centered DFT, position -> momentum lattice amplitudes.
struct Fourier {
  explicit Fourier(const Grid1D& grid);
  Vector forward(const Vector& pos) const;
  Vector inverse(const Vector& mom) const;
  Matrix forward2d(const Matrix& pos) const;  // both axes
  Matrix inverse2d(const Matrix& mom) const;

  Grid1D grid;
  Matrix f;  // n x n forward matrix
};

// --- operations -------------------------------------------------------------

struct Interval {
  double lo, hi;  // [lo, hi)
};

DiscretePOVM position_pvm(const Grid1D& grid, const std::vector<Interval>& cells);
DiscretePOVM momentum_pvm(const Grid1D& grid, const std::vector<Interval>& cells);

GridWavefunction shift(const GridWavefunction& psi, double a);
GridWavefunction boost(const GridWavefunction& psi, double mu_v);

double position_mean(const GridWavefunction& psi);
double position_variance(const GridWavefunction& psi);
double momentum_mean(const GridWavefunction& psi);
double momentum_variance(const GridWavefunction& psi);

/// Gaussian packet with mean Q, momentum P and position spread dq
/// (continuum normalization, renormalized on the grid).
GridWavefunction gaussian_packet(const Grid1D& grid, double q, double p, double dq);

KernelOp d_localise(const KernelOp& a, const RegionMask& d);
bool is_d_local(const KernelOp& a, const RegionMask& d, double tol = 1e-12);

std::pair<GridWavefunction2, double> symmetrize_pair(const GridWavefunction& psi,
                                                     const GridWavefunction& phi,
                                                     int epsilon);

SymmetricObservable symmetric_observable(const KernelOp& a);

struct ClusterSeparabilityReport {
  double lhs;
  double rhs;
  double normalization;  // tr[P (T1 x T2) P]
  bool pass;
};

/// Cluster-separability check on the grid: E registered on the
/// symmetrized pair of a
/// D-local and a D'-local state equals tr[E T1]. States are l2 StateOperators
/// on grid.space(); E must be D-local.
ClusterSeparabilityReport cluster_separability_check(
    const StateOperator& t1, const RegionMask& d1, const StateOperator& t2,
    const RegionMask& d2, const Effect& e, int epsilon, double tol = 1e-8);

// --- CSV interfaces ---------------------------------------------------------

void wavefunction_to_csv(const GridWavefunction& psi, const std::string& path);
GridWavefunction wavefunction_from_csv(const std::string& path, double hbar = 1.0);
void mask_to_csv(const RegionMask& mask, const std::string& path);
RegionMask mask_from_csv(const std::string& path, double hbar = 1.0);

}  // namespace mepqlab

#endif
