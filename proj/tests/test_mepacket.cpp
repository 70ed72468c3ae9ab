// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "mepqlab/mepacket.hpp"
#include "support/oracles.hpp"

using namespace mepqlab;

TEST_CASE("classical density") {
  MEPacketParams p;
  p.Q = 1.5;
  p.P = -0.5;
  p.dQ = 0.8;
  p.dP = 1.2;
  const ClassicalMEPacket packet = classical_density(p);

  // normalization and moments by quadrature
  const double norm = oracles::simpson(
      [&](double q) {
        return oracles::simpson(
            [&](double pp) { return packet.density(q, pp); }, p.P - 12 * p.dP,
            p.P + 12 * p.dP, 1e-12);
      },
      p.Q - 12 * p.dQ, p.Q + 12 * p.dQ, 1e-12) / p.v;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));

  const double mq = oracles::simpson(
      [&](double q) {
        return q * oracles::simpson(
                       [&](double pp) { return packet.density(q, pp); },
                       p.P - 12 * p.dP, p.P + 12 * p.dP, 1e-12);
      },
      p.Q - 12 * p.dQ, p.Q + 12 * p.dQ, 1e-12) / p.v;
  CHECK(mq == doctest::Approx(p.Q).epsilon(1e-8));

  // entropy closed form
  CHECK(packet.entropy() ==
        doctest::Approx(1.0 + std::log(2.0 * M_PI * p.dQ * p.dP / p.v)));

  // sampler moments at 3 sigma with 1e5 samples
  MEPacketParams unit;
  const ClassicalMEPacket up = classical_density(unit);
  SplitMix64 rng(79);
  const int n = 100000;
  double sq = 0, sq2 = 0;
  for (int i = 0; i < n; ++i) {
    double q, pp;
    up.sample(rng, q, pp);
    sq += q;
    sq2 += q * q;
  }
  const double var = sq2 / n - (sq / n) * (sq / n);
  CHECK(std::abs(var - 1.0) < 0.02);

  MEPacketParams bad = p;
  bad.dQ = -1.0;
  CHECK_THROWS_AS(classical_density(bad), error);
}

TEST_CASE("partition functions") {
  // direct value at l1 = l2 = 0, l3 = l4 = v = 1: pi
  CHECK(classical_partition(0, 0, 1, 1, 1) == doctest::Approx(M_PI).epsilon(1e-14));

  // quadrature oracle
  for (const auto& l : {std::array<double, 4>{0.3, -0.2, 0.8, 1.4},
                        std::array<double, 4>{0.0, 0.0, 2.0, 0.5}}) {
    const double want = oracles::partition_quadrature(l[0], l[1], l[2], l[3], 1.0);
    CHECK(classical_partition(l[0], l[1], l[2], l[3], 1.0) ==
          doctest::Approx(want).epsilon(1e-8));
  }

  // symmetry under (l1,l3) <-> (l2,l4)
  CHECK(classical_partition(0.3, 0.7, 1.1, 0.9, 2.0) ==
        doctest::Approx(classical_partition(0.7, 0.3, 0.9, 1.1, 2.0)).epsilon(1e-14));

  CHECK_THROWS_AS(classical_partition(0, 0, -1, 1, 1), error);

  // quantum/classical ratio at v = h is sinh(x)/x
  const double hbar = 1.0;
  for (double l3 : {0.5, 1.0}) {
    for (double l4 : {0.8, 2.0}) {
      const double x = hbar * std::sqrt(l3 * l4);
      const double zc = classical_partition(0.4, 0.1, l3, l4, 2.0 * M_PI * hbar);
      const double zq = quantum_partition(0.4, 0.1, l3, l4, hbar);
      CHECK(zc / zq == doctest::Approx(std::sinh(x) / x).epsilon(1e-12));
    }
  }
}

TEST_CASE("quantum state weights") {
  // nu = 1: pure ground state
  MEPacketParams min;
  min.dQ = 1.0;
  min.dP = 0.5;
  min.hbar = 1.0;
  CHECK(min.nu() == doctest::Approx(1.0));
  const StateOperator t0 = quantum_state(min, Representation::fock, 8);
  CHECK(t0.op.mat(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(t0) < 1e-10);

  // nu = 3: geometric weights 0.5, 0.25, 0.125, ...
  MEPacketParams p3;
  p3.dQ = 1.5;
  p3.dP = 1.0;
  CHECK(p3.nu() == doctest::Approx(3.0));
  const auto w = me_weights(3.0, 10);
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(w[2] == doctest::Approx(0.125).epsilon(1e-14));

  // weights sum to 1 within the tail tolerance
  const int cut = adaptive_cutoff(3.0);
  double sum = 0;
  for (double x : me_weights(3.0, cut)) sum += x;
  CHECK(1.0 - sum < 1e-11);
  CHECK(1.0 - sum >= 0.0);

  // purity decreases strictly with nu
  double last = 2.0;
  for (double nu : {1.0, 1.5, 2.0, 4.0, 8.0}) {
    const auto ws = me_weights(nu, adaptive_cutoff(nu));
    double purity = 0;
    for (double x : ws) purity += x * x;
    CHECK(purity < last);
    last = purity;
  }

  // nu < 1 rejected for quantum packets
  MEPacketParams bad;
  bad.dQ = 0.4;
  bad.dP = 0.4;
  CHECK_THROWS_AS(quantum_state(bad, Representation::fock, 8), error);
  // too-small explicit cutoff rejected
  MEPacketParams wide;
  wide.dQ = 10.0;
  wide.dP = 10.0;
  CHECK_THROWS_AS(quantum_state(wide, Representation::fock, 3), error);
}

TEST_CASE("fock moments and grid representation") {
  MEPacketParams p;
  p.Q = 0.8;
  p.P = -1.1;
  p.dQ = 1.2;
  p.dP = 0.9;
  const int cut = adaptive_cutoff(p.nu()) + 8;
  const FockRep rep = fock_rep(p, cut);
  const StateOperator t = quantum_state(p, Representation::fock, cut);

  // moments per the defining constraints, exact up to the geometric tail
  CHECK((t.op.mat * rep.q).real().trace() == doctest::Approx(p.Q).epsilon(1e-9));
  CHECK((t.op.mat * rep.p).real().trace() == doctest::Approx(p.P).epsilon(1e-9));
  CHECK((t.op.mat * rep.q * rep.q).real().trace() ==
        doctest::Approx(p.Q * p.Q + p.dQ * p.dQ).epsilon(1e-8));
  CHECK((t.op.mat * rep.p * rep.p).real().trace() ==
        doctest::Approx(p.P * p.P + p.dP * p.dP).epsilon(1e-8));

  // canonical commutator in the truncated ladder basis (interior block)
  const Matrix comm = rep.q * rep.p - rep.p * rep.q;
  for (int i = 0; i < cut - 1; ++i)
    CHECK(std::abs(comm(i, i) - cx(0, p.hbar)) < 1e-12);

  // grid representation: same moments on a wide grid
  const Grid1D grid(-16.0 + p.Q, 32.0 / 256, 256, p.hbar);
  const StateOperator tg = quantum_state(p, Representation::grid, cut, &grid);
  const KernelOp qop = KernelOp::position(grid);
  const LinOp ql2 = qop.to_linop();
  CHECK((tg.op.mat * ql2.mat).real().trace() == doctest::Approx(p.Q).epsilon(1e-6));
  CHECK((tg.op.mat * ql2.mat * ql2.mat).real().trace() ==
        doctest::Approx(p.Q * p.Q + p.dQ * p.dQ).epsilon(1e-6));

  // variance of the module-level operator agrees with dQ for nu = 1
  MEPacketParams min;
  min.dQ = 0.9;
  min.dP = min.hbar / (2.0 * min.dQ);
  const GridWavefunction ground = ground_wavefunction(min, grid);
  CHECK(std::sqrt(position_variance(ground)) ==
        doctest::Approx(min.dQ).epsilon(1e-6));

  // ground wavefunction exponent: |psi|^2 variance dQ^2/nu, phase carries P
  MEPacketParams p2 = p;
  const GridWavefunction g2 = ground_wavefunction(p2, grid);
  CHECK(position_variance(g2) ==
        doctest::Approx(p2.dQ * p2.dQ / p2.nu()).epsilon(1e-6));
  CHECK(momentum_mean(g2) == doctest::Approx(p2.P).epsilon(1e-6));
}

TEST_CASE("maximum entropy optimality") {
  // classical: factorized perturbations with matched first/second moments
  MEPacketParams p;
  const ClassicalMEPacket packet = classical_density(p);
  const double s_me = packet.entropy();
  SplitMix64 rng(83);
  for (int rep = 0; rep < 200; ++rep) {
    // two-Gaussian mixture in q with the same mean and variance
    const double d = 0.2 + 1.2 * rng.next_double();
    const double s2 = 1.0 - d * d;  // component variance, total stays 1
    if (s2 <= 0.01) continue;
    auto fq = [&](double q) {
      const double a = (q - d) / std::sqrt(s2), b = (q + d) / std::sqrt(s2);
      return 0.5 / std::sqrt(2 * M_PI * s2) *
             (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
    };
    auto fp = [&](double pp) {
      return 1.0 / std::sqrt(2 * M_PI) * std::exp(-0.5 * pp * pp);
    };
    // moment check of the perturbed density
    const double var = oracles::simpson(
        [&](double q) { return q * q * fq(q); }, -14, 14, 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
    // joint entropy of the factorized density, in the dq dp / v measure
    const double s_pert = oracles::entropy_1d(fq, -14, 14) +
                          oracles::entropy_1d(fp, -14, 14);
    CHECK(s_pert <= s_me + 1e-9);
  }

  // quantum: random diagonal-in-K states with the same four moments
  const double nu = 3.0;
  const int cut = 60;
  const auto r = me_weights(nu, cut);
  double s_q = 0;
  for (double w : r)
    if (w > 1e-300) s_q -= w * std::log(w);
  for (int rep = 0; rep < 200; ++rep) {
    // random weights, then mix toward a two-point anchor to pin
    // sum w (2m+1) = nu (this pins both dQ and dP at once)
    std::vector<double> w(cut, 0.0);
    double norm = 0;
    for (int m = 0; m < 12; ++m) {
      w[m] = rng.next_double();
      norm += w[m];
    }
    for (auto& x : w) x /= norm;
    double s1 = 0;
    for (int m = 0; m < cut; ++m) s1 += w[m] * (2 * m + 1);
    // anchor at level K with 2K+1 > nu or at 0
    const int anchor = (s1 < nu) ? 20 : 0;
    const double sa = 2.0 * anchor + 1.0;
    const double t = (nu - s1) / (sa - s1);
    if (t < 0 || t > 1) continue;
    for (auto& x : w) x *= (1 - t);
    w[anchor] += t;
    double check = 0, entropy = 0;
    for (int m = 0; m < cut; ++m) {
      check += w[m] * (2 * m + 1);
      if (w[m] > 1e-300) entropy -= w[m] * std::log(w[m]);
    }
    CHECK(check == doctest::Approx(nu).epsilon(1e-10));
    CHECK(entropy <= s_q + 1e-9);
  }
}

TEST_CASE("classical limit report") {
  const auto rows = classical_limit_report({3.0, 100.0});
  CHECK(rows[0].x == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  CHECK(rows[0].deviation == doctest::Approx(0.0202).epsilon(5e-3));
  CHECK(rows[1].deviation < 2e-5);
  // x -> ln pole as nu -> 1+: the deviation diverges
  const auto near = classical_limit_report({1.0 + 1e-9});
  CHECK(near[0].x > 10.0);
  CHECK(near[0].deviation > 1e3);
  CHECK(classical_limit_report({1.0 + 1e-12})[0].deviation > near[0].deviation);
  CHECK_THROWS_AS(classical_limit_report({1.0}), error);
}

TEST_CASE("params file round trip") {
  MEPacketParams p;
  p.Q = 0.25;
  p.P = -1.5;
  p.dQ = 2.0;
  p.dP = 0.75;
  p.hbar = 0.9;
  p.v = 2.0;
  const std::string path = "/tmp/mepqlab_test_params.txt";
  params_to_file(p, path);
  const MEPacketParams back = params_from_file(path);
  CHECK(back.Q == p.Q);
  CHECK(back.dP == p.dP);
  CHECK(back.nu() == doctest::Approx(p.nu()).epsilon(1e-15));
  std::remove(path.c_str());
}
