// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include "mepqlab/jointqp.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "mepqlab/parallel.hpp"

namespace mepqlab {

CellGrid CellGrid::uniform(double a_lo, double a_hi, int n_a, double b_lo,
                           double b_hi, int n_b) {
  require(n_a >= 1 && n_b >= 1 && a_hi > a_lo && b_hi > b_lo,
          "CellGrid: bad window");
  CellGrid c;
  for (int i = 0; i <= n_a; ++i)
    c.a_edges.push_back(a_lo + (a_hi - a_lo) * i / n_a);
  for (int j = 0; j <= n_b; ++j)
    c.b_edges.push_back(b_lo + (b_hi - b_lo) * j / n_b);
  return c;
}

CellGrid CellGrid::halved() const {
  return uniform(a_edges.front(), a_edges.back(), 2 * n_a(), b_edges.front(),
                 b_edges.back(), 2 * n_b());
}

GridWavefunction AncillaPacket::wavefunction() const {
  require(sigma > 0, "AncillaPacket: sigma must be positive");
  Vector v(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    v(i) = std::exp(-x * x / (2.0 * sigma * sigma));
  }
  GridWavefunction psi{grid, v};
  return psi.normalized();
}

GridWavefunction AncillaPacket::shifted_boosted(double a, double b) const {
  return boost(shift(wavefunction(), a), -b);
}

CellGrid covering_cells(const Grid1D& grid, int n_a, int n_b) {
  const double L = grid.length();
  const double dp = grid.dp();
  // wrapped difference range and the wrapped total-momentum lattice
  return CellGrid::uniform(-0.5 * L, 0.5 * L, n_a, -0.5 * grid.n * dp,
                           0.5 * grid.n * dp, n_b);
}

CellTable cell_probabilities(const GridWavefunction& system,
                             const AncillaPacket& ancilla, const CellGrid& cells,
                             bool parallel) {
  const Grid1D& g = system.grid;
  require(g.same_as(ancilla.grid), "cell_probabilities: grid mismatch");
  const int n = g.n;
  const double hbar = g.hbar;
  const GridWavefunction psi_a = ancilla.wavefunction();

  // two-particle product state Psi(x, X) = psi_S(x) psi_A(X)
  Matrix psi2 = system.values * psi_a.values.transpose();

  const Fourier fr(g);
  const Matrix mom = fr.forward2d(psi2);

  // Wrapped position difference and wrapped total momentum per point pair.
  // Both masks are functions of the torus translation groups (difference
  // modes and simultaneous shifts), so the two projection families commute
  // exactly on the grid.
  RealMatrix diff(n, n), ptot(n, n);
  const double L = g.length();
  const double pspan = g.n * g.dp();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double d = std::remainder(g.x(i) - g.x(j), L);
      if (d >= 0.5 * L) d -= L;
      diff(i, j) = d;
      double s = std::remainder(g.p(i) + g.p(j), pspan);
      if (s >= 0.5 * pspan) s -= pspan;
      ptot(i, j) = s;
    }

  // grid-aliasing guard: momentum mass near the wrap boundary
  {
    const Fourier frs(g);
    double edge_mass = 0;
    auto band = [&](const Vector& mom) {
      double m = 0;
      for (int i = 0; i < n; ++i)
        if (std::abs(g.p(i)) >= 0.5 * pspan - 2.5 * g.dp())
          m += std::norm(mom(i)) * g.dp();
      return m;
    };
    edge_mass = std::max(band(frs.forward(system.values)),
                         band(frs.forward(psi_a.values)));
    if (edge_mass > 1e-8)
      throw numerical_error(
          "cell_probabilities: grid aliasing (momentum mass near the lattice "
          "boundary)");
  }

  CellTable table;
  table.cells = cells;
  const int na = cells.n_a(), nb = cells.n_b();
  table.p_exact = RealMatrix::Zero(na, nb);
  table.p_approx_raw = RealMatrix::Zero(na, nb);
  table.p_approx_cal = RealMatrix::Zero(na, nb);

  // b-cell bucket of every momentum pair (-1 = outside the window)
  Eigen::MatrixXi bucket(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bucket(i, j) = -1;
      const double v = ptot(i, j);
      for (int c = 0; c < nb; ++c)
        if (v >= cells.b_edges[c] && v < cells.b_edges[c + 1]) {
          bucket(i, j) = c;
          break;
        }
    }

  const double dp2 = g.dp() * g.dp();
  parallel_for(
      na,
      [&](std::int64_t ai) {
        // mask the position-difference band, transform, accumulate per b-cell
        Matrix masked = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (diff(i, j) >= cells.a_edges[ai] &&
                diff(i, j) < cells.a_edges[ai + 1])
              masked(i, j) = psi2(i, j);
        const Matrix gmom = fr.forward2d(masked);
        RealVector acc = RealVector::Zero(nb);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const int c = bucket(i, j);
            if (c >= 0)
              acc(c) += (std::conj(gmom(i, j)) * mom(i, j)).real();
          }
        for (int c = 0; c < nb; ++c) table.p_exact(ai, c) = dp2 * acc(c);
      },
      parallel);

  // effective-POVM approximation, cells in parallel. The kernel is the one
  // the trace calculation produces, exp(i b (q - q')/hbar) T_A(q'-a, q-a):
  // for the real ancilla this is the packet at momentum +b, so the effective
  // state registers the ancilla momentum inverted (p ~ b - P).
  parallel_for(
      static_cast<std::int64_t>(na) * nb,
      [&](std::int64_t idx) {
        const int ai = static_cast<int>(idx / nb);
        const int bj = static_cast<int>(idx % nb);
        const GridWavefunction pa =
            ancilla.shifted_boosted(cells.a_center(ai), -cells.b_center(bj));
        const cx ov = g.dx * pa.values.dot(system.values);
        table.p_approx_raw(ai, bj) = cells.area(ai, bj) /
                                     (4.0 * M_PI * M_PI * hbar * hbar) *
                                     std::norm(ov);
      },
      parallel);

  // global least-squares ratio through the origin
  double num = 0, den = 0;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      num += table.p_exact(i, j) * table.p_approx_raw(i, j);
      den += table.p_approx_raw(i, j) * table.p_approx_raw(i, j);
    }
  table.fitted_ratio = (den > 0) ? num / den : 0.0;
  table.p_approx_cal = table.fitted_ratio * table.p_approx_raw;
  table.exact_total = table.p_exact.sum();
  return table;
}

std::vector<ConvergenceRow> convergence_study(const GridWavefunction& system,
                                              const AncillaPacket& ancilla,
                                              const CellGrid& base, int levels,
                                              bool parallel) {
  std::vector<ConvergenceRow> rows;
  CellGrid cells = base;
  for (int lev = 0; lev <= levels; ++lev) {
    const CellTable t = cell_probabilities(system, ancilla, cells, parallel);
    double raw = 0, cal = 0;
    for (int i = 0; i < cells.n_a(); ++i)
      for (int j = 0; j < cells.n_b(); ++j) {
        raw = std::max(raw, std::abs(t.p_exact(i, j) - t.p_approx_raw(i, j)));
        cal = std::max(cal, std::abs(t.p_exact(i, j) - t.p_approx_cal(i, j)));
      }
    rows.push_back({lev, cells.n_a(), cells.n_b(), raw, cal, t.fitted_ratio});
    cells = cells.halved();
  }
  return rows;
}

void cell_table_to_csv(const CellTable& table, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cell_table_to_csv: cannot open " + path);
  out << "a_k,b_k,S_k,p_exact,p_approx_raw,p_approx_calibrated\n";
  out << std::scientific << std::setprecision(16);
  for (int i = 0; i < table.cells.n_a(); ++i)
    for (int j = 0; j < table.cells.n_b(); ++j)
      out << table.cells.a_center(i) << "," << table.cells.b_center(j) << ","
          << table.cells.area(i, j) << "," << table.p_exact(i, j) << ","
          << table.p_approx_raw(i, j) << "," << table.p_approx_cal(i, j) << "\n";
}

}  // namespace mepqlab
