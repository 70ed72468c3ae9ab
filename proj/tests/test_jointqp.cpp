// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include <doctest.h>

#include <cmath>

#include "mepqlab/jointqp.hpp"
#include "mepqlab/mepacket.hpp"

using namespace mepqlab;

namespace {

Grid1D qp_grid(int n = 64, double extent = 16.0) {
  return Grid1D(-0.5 * extent, extent / n, n, 1.0);
}

}  // namespace

TEST_CASE("ancilla packet moments") {
  const Grid1D g = qp_grid(128, 24.0);
  const AncillaPacket anc{1.3, g};
  const GridWavefunction psi = anc.wavefunction();
  CHECK(std::abs(position_mean(psi)) < 1e-9);
  CHECK(std::abs(momentum_mean(psi)) < 1e-9);
  CHECK(std::sqrt(position_variance(psi)) ==
        doctest::Approx(anc.sigma / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(std::sqrt(momentum_variance(psi)) ==
        doctest::Approx(g.hbar / (anc.sigma * std::sqrt(2.0))).epsilon(1e-6));

  // shifted-then-boosted moments (avvar identities)
  const GridWavefunction sb = anc.shifted_boosted(1.2, -0.7);
  CHECK(position_mean(sb) == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(momentum_mean(sb) == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(std::sqrt(position_variance(sb)) ==
        doctest::Approx(anc.sigma / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("exact cells are a PV partition") {
  const Grid1D g = qp_grid(64, 16.0);
  const AncillaPacket anc{1.0, g};
  const GridWavefunction sys = boost(shift(anc.wavefunction(), 1.0), -0.5);

  // covering grid: probabilities sum to one
  const CellTable t = cell_probabilities(sys, anc, covering_cells(g, 8, 8));
  CHECK(t.exact_total == doctest::Approx(1.0).epsilon(1e-10));
  // every cell probability is within [0 - tol, 1 + tol]
  for (int i = 0; i < t.cells.n_a(); ++i)
    for (int j = 0; j < t.cells.n_b(); ++j) {
      CHECK(t.p_exact(i, j) > -1e-10);
      CHECK(t.p_exact(i, j) < 1.0 + 1e-10);
      CHECK(t.p_approx_raw(i, j) >= 0.0);  // effective POVM positivity
    }

  // disjoint-cell effects are orthogonal: E_k E_j = 0 on a small grid
  const Grid1D gs = qp_grid(16, 8.0);
  const Fourier fr(gs);
  const int n2 = gs.n * gs.n;
  auto cell_projector = [&](double alo, double ahi, double blo, double bhi) {
    // chi_a(q - Q) in position, chi_b(p + P) through the 2D transform
    Matrix pa = Matrix::Zero(n2, n2);
    for (int i = 0; i < gs.n; ++i)
      for (int j = 0; j < gs.n; ++j) {
        double d = std::remainder(gs.x(i) - gs.x(j), gs.length());
        if (d >= 0.5 * gs.length()) d -= gs.length();
        if (d >= alo && d < ahi) pa(i * gs.n + j, i * gs.n + j) = 1.0;
      }
    Matrix f2(n2, n2);
    for (int i = 0; i < gs.n; ++i)
      for (int j = 0; j < gs.n; ++j)
        for (int k = 0; k < gs.n; ++k)
          for (int l = 0; l < gs.n; ++l)
            f2(i * gs.n + j, k * gs.n + l) = fr.f(i, k) * fr.f(j, l);
    Vector mask = Vector::Zero(n2);
    const double pspan = gs.n * gs.dp();
    for (int i = 0; i < gs.n; ++i)
      for (int j = 0; j < gs.n; ++j) {
        double s = std::remainder(gs.p(i) + gs.p(j), pspan);
        if (s >= 0.5 * pspan) s -= pspan;
        if (s >= blo && s < bhi) mask(i * gs.n + j) = 1.0;
      }
    const double sc = (gs.dp() / gs.dx) * (gs.dp() / gs.dx);
    const Matrix pb = sc * (f2.adjoint() * mask.asDiagonal() * f2);
    return (pa * pb).eval();
  };
  const Matrix e1 = cell_projector(-1.0, 0.5, -2.0, 0.0);
  const Matrix e2 = cell_projector(0.5, 2.0, 0.0, 2.0);
  CHECK((e1 * e2).cwiseAbs().maxCoeff() < 1e-10);
  // commuting masks: the cell operator is idempotent (projection)
  CHECK((e1 * e1 - e1).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("approximation converges under cell halving") {
  const Grid1D g = qp_grid(128, 24.0);
  const AncillaPacket anc{1.0, g};
  const double a0 = 1.5, b0 = 1.0;
  // system momentum +b0, so the registered total momentum peaks at b0
  const GridWavefunction sys = boost(shift(anc.wavefunction(), a0), b0);

  const CellGrid base = CellGrid::uniform(a0 - 2.0, a0 + 2.0, 4, b0 - 2.0,
                                          b0 + 2.0, 4);
  const auto rows = convergence_study(sys, anc, base, 3);
  REQUIRE(rows.size() == 4);
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].max_err_cal < rows[i - 1].max_err_cal);
    CHECK(rows[i].max_err_raw < rows[i - 1].max_err_raw);
  }

  // the raw normalization is off by a constant close to 2 pi hbar
  CHECK(rows.back().fitted_ratio ==
        doctest::Approx(2.0 * M_PI * g.hbar).epsilon(0.05));

  // probability concentrates at the cell containing (shift, boost)
  const CellTable fine = cell_probabilities(sys, anc, base.halved().halved());
  int bi = 0, bj = 0;
  double best = -1;
  for (int i = 0; i < fine.cells.n_a(); ++i)
    for (int j = 0; j < fine.cells.n_b(); ++j)
      if (fine.p_exact(i, j) > best) {
        best = fine.p_exact(i, j);
        bi = i;
        bj = j;
      }
  CHECK(std::abs(fine.cells.a_center(bi) - a0) < 0.5);
  CHECK(std::abs(fine.cells.b_center(bj) - b0) < 0.5);
}

TEST_CASE("ME packet as the detected state") {
  // with a quantum ME packet target, the registered (a, b) distribution is a
  // proper probability distribution concentrated around the packet's (Q, P)
  const Grid1D g = qp_grid(128, 32.0);
  const AncillaPacket anc{1.0, g};
  MEPacketParams p;
  p.Q = 2.0;
  p.P = -1.5;
  p.dQ = 1.0;
  p.dP = 1.0;
  const GridWavefunction packet = ground_wavefunction(p, g);

  const CellGrid cells = CellGrid::uniform(-4.0, 8.0, 12, -8.0, 4.0, 12);
  const CellTable t = cell_probabilities(packet, anc, cells);
  int bi = 0, bj = 0;
  double best = -1;
  double total = 0;
  for (int i = 0; i < cells.n_a(); ++i)
    for (int j = 0; j < cells.n_b(); ++j) {
      CHECK(t.p_approx_cal(i, j) >= 0.0);
      total += t.p_approx_cal(i, j);
      if (t.p_approx_cal(i, j) > best) {
        best = t.p_approx_cal(i, j);
        bi = i;
        bj = j;
      }
    }
  CHECK(total <= 1.0 + 1e-6);
  CHECK(total > 0.9);  // window captures nearly all the mass
  CHECK(std::abs(cells.a_center(bi) - p.Q) < 1.0);
  CHECK(std::abs(cells.b_center(bj) - p.P) < 1.0);
}
