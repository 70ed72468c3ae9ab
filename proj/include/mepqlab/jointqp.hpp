// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef MEPQLAB_JOINTQP_HPP
#define MEPQLAB_JOINTQP_HPP

#include <string>
#include <vector>

#include "mepqlab/grid.hpp"

namespace mepqlab {

/// Rectangular cells X_k = [a-, a+] x [b-, b+] of the (q - Q, p + P) plane.
struct CellGrid {
  std::vector<double> a_edges;  // ascending, n_a + 1 entries
  std::vector<double> b_edges;  // ascending, n_b + 1 entries

  int n_a() const { return static_cast<int>(a_edges.size()) - 1; }
  int n_b() const { return static_cast<int>(b_edges.size()) - 1; }
  double a_center(int i) const { return 0.5 * (a_edges[i] + a_edges[i + 1]); }
  double b_center(int j) const { return 0.5 * (b_edges[j] + b_edges[j + 1]); }
  double area(int i, int j) const {
    return (a_edges[i + 1] - a_edges[i]) * (b_edges[j + 1] - b_edges[j]);
  }
  static CellGrid uniform(double a_lo, double a_hi, int n_a, double b_lo,
                          double b_hi, int n_b);
  /// refine both axes by a factor of two
  CellGrid halved() const;
};

/// Minimum-uncertainty ancilla Psi_sigma centered at the phase-space origin.
struct AncillaPacket {
  double sigma = 1.0;
  Grid1D grid;

  GridWavefunction wavefunction() const;
  /// ancilla first shifted by a, then boosted by -b
  GridWavefunction shifted_boosted(double a, double b) const;
};

struct CellTable {
  CellGrid cells;
  RealMatrix p_exact;        // n_a x n_b
  RealMatrix p_approx_raw;   // uncalibrated S_k/(2 pi hbar)^2 tr[T_S T_A[a,b]]
  RealMatrix p_approx_cal;   // raw rescaled by the fitted global ratio
  double fitted_ratio;       // least-squares p_exact / p_approx_raw
  double exact_total;        // sum over the covering grid
};

/// Exact bipartite cell probabilities tr[E_k (T_S x T_A)] with E_k the
/// product of the commuting position-difference and total-momentum
/// projections on the two-particle grid, plus the approximate effective-POVM
/// values and their calibration. Cells are evaluated in parallel.
CellTable cell_probabilities(const GridWavefunction& system,
                             const AncillaPacket& ancilla, const CellGrid& cells,
                             bool parallel = true);

/// Covering cell grid for the whole wrapped difference range and total
/// momentum lattice (normalization check: probabilities sum to 1).
CellGrid covering_cells(const Grid1D& grid, int n_a, int n_b);

struct ConvergenceRow {
  int level;
  int n_a, n_b;
  double max_err_raw;
  double max_err_cal;
  double fitted_ratio;
};

/// Successive cell halvings; max |p_exact - p_approx| per level.
std::vector<ConvergenceRow> convergence_study(const GridWavefunction& system,
                                              const AncillaPacket& ancilla,
                                              const CellGrid& base, int levels,
                                              bool parallel = true);

void cell_table_to_csv(const CellTable& table, const std::string& path);

}  // namespace mepqlab

#endif
