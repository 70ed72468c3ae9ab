// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include <doctest.h>

#include <cmath>

#include "mepqlab/chain.hpp"
#include "support/oracles.hpp"

using namespace mepqlab;

TEST_CASE("mode matrix") {
  // N = 2 explicit rows (global row signs fixed by the defining formulas)
  const ModeTransform y2 = mode_matrix(2);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(y2.Y(0, 0) == doctest::Approx(r));
  CHECK(y2.Y(0, 1) == doctest::Approx(r));
  CHECK(std::abs(y2.Y(1, 0)) == doctest::Approx(r));
  CHECK(std::abs(y2.Y(1, 1)) == doctest::Approx(r));
  CHECK(y2.Y(1, 0) == doctest::Approx(-y2.Y(1, 1)));

  // orthogonality Y Y^T = 1 and the constant zero-mode row
  for (int n : {2, 3, 8, 33, 128, 512}) {
    const ModeTransform y = mode_matrix(n);
    const RealMatrix gram = y.Y * y.Y.transpose();
    CHECK((gram - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    for (int col = 0; col < n; ++col)
      CHECK(y.Y(0, col) == doctest::Approx(1.0 / std::sqrt(double(n))));
  }

  // even-mode coefficients of L vanish: Y^m_N - Y^m_1 = 0 for even m
  const ModeTransform y = mode_matrix(64);
  for (int m = 0; m < 64; m += 2)
    CHECK(std::abs(y.Y(m, 63) - y.Y(m, 0)) < 1e-12);
}

TEST_CASE("mode frequencies") {
  const auto w2 = mode_frequencies(2, 1.0, 1.0);
  CHECK(w2[0] == 0.0);
  CHECK(w2[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  // zero mode first, then monotone in the mode index
  const auto w64 = mode_frequencies(64, 2.0, 0.5);
  for (size_t m = 1; m < w64.size(); ++m) CHECK(w64[m] > w64[m - 1]);

  // independent oracle: diagonalization of the stiffness quadratic form
  // (compared as squared frequencies; the zero mode is exact only in omega^2)
  for (int n : {2, 5, 16, 64}) {
    const double kappa = 1.3, mu = 0.7;
    auto w = mode_frequencies(n, kappa, mu);
    std::sort(w.begin(), w.end());
    const auto oracle = oracles::chain_frequencies_eigen(n, kappa, mu);
    for (int m = 0; m < n; ++m) {
      const double w2 = w[static_cast<size_t>(m)] * w[static_cast<size_t>(m)];
      const double o2 =
          oracle[static_cast<size_t>(m)] * oracle[static_cast<size_t>(m)];
      CHECK(std::abs(w2 - o2) < 1e-10 * std::max(1.0, o2));
    }
  }

  // substitution diagonalizes the Hamiltonian: off-diagonal stiffness
  for (int n : {16, 128, 512}) {
    const ModeTransform y = mode_matrix(n);
    RealMatrix k = RealMatrix::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      k(i - 1, i - 1) += 1.0;
      k(i, i) += 1.0;
      k(i - 1, i) -= 1.0;
      k(i, i - 1) -= 1.0;
    }
    const RealMatrix transformed = y.Y * k * y.Y.transpose();
    double offdiag = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) offdiag = std::max(offdiag, std::abs(transformed(i, j)));
    CHECK(offdiag < 1e-10);
  }
}

TEST_CASE("length statistics") {
  ChainParams p;
  p.N = 100;
  CHECK(length_statistics(p).L_avg == doctest::Approx(99.0).epsilon(1e-15));

  // brute-force Gibbs oracle at N = 4 certifies the thermal factor
  ChainParams p4;
  p4.N = 4;
  const ChainReport rep = length_statistics(p4);
  const double brute = oracles::chain_dl2_fock_gibbs(p4, 40);
  CHECK(rep.dL * rep.dL == doctest::Approx(brute).epsilon(1e-8));

  // parallel and serial mode sums agree bitwise
  ChainParams big;
  big.N = 4096;
  CHECK(length_statistics(big, true).dL == length_statistics(big, false).dL);
}

TEST_CASE("scaling study") {
  ChainParams base;
  const auto rows = scaling_study(base, {64, 128, 256, 512, 1024, 2048, 4096});
  const double slope = scaling_slope(rows);
  CHECK(std::abs(slope + 0.5) < 0.02);
  for (const auto& r : rows)
    CHECK(r.L_avg == doctest::Approx((r.N - 1.0)).epsilon(1e-15));
}

TEST_CASE("lambda solver") {
  ChainParams p;
  p.N = 16;
  const double e0 = internal_energy(p);
  const double lam = solve_lambda(p, e0);
  CHECK(lam == doctest::Approx(p.lambda).epsilon(1e-10));

  // round trip at other targets
  for (double target : {0.3 * e0, 2.0 * e0}) {
    ChainParams q = p;
    q.lambda = solve_lambda(p, target);
    CHECK(internal_energy(q) == doctest::Approx(target).epsilon(1e-10));
  }

  // single-mode chain matches the analytic Bose-factor inversion
  ChainParams two;
  two.N = 2;
  const double w = mode_frequencies(2, two.kappa, two.mu)[1];
  const double target = 0.35;
  const double lam2 = solve_lambda(two, target);
  const double analytic = std::log(1.0 + two.hbar * w / target) / (two.hbar * w);
  CHECK(lam2 == doctest::Approx(analytic).epsilon(1e-9));

  // monotonicity: smaller energy needs larger lambda
  CHECK(solve_lambda(two, 0.01) > solve_lambda(two, 1.0));
  CHECK_THROWS_AS(solve_lambda(two, -1.0), error);
}

TEST_CASE("internal energy spread shrinks with N") {
  ChainParams p;
  double last = 1e9;
  for (int n : {8, 32, 128, 512}) {
    p.N = n;
    const double spread = energy_relative_spread(p);
    CHECK(spread < last);
    last = spread;
  }
}
