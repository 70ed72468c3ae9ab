// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include <doctest.h>

#include <cmath>

#include "mepqlab/povm.hpp"

using namespace mepqlab;

namespace {

const HilbertSpace q3 = HilbertSpace::single(3, "S");

DiscretePOVM spin_z_povm() {
  const SpinOps s = spin_ops(0.5, 1.0);
  return sharp_povm(s.s3);
}

}  // namespace

TEST_CASE("Born rule and additivity") {
  SplitMix64 rng(31);
  // sharp nondegenerate A on a superposition: p_k = |c_k|^2
  const LinOp a = random_hermitian(q3, rng);
  const DiscretePOVM povm = sharp_povm(a);
  REQUIRE(povm.n_outcomes() == 3);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat);
  Vector c(3);
  c << 0.6, cx(0.0, 0.48), 0.64;
  Vector psi = Vector::Zero(3);
  for (int k = 0; k < 3; ++k) psi += c(k) * es.eigenvectors().col(k);
  const StateOperator t = make_state(Ket{q3, psi});
  for (int k = 0; k < 3; ++k)
    CHECK(probability(povm, t, k) ==
          doctest::Approx(std::norm(c(k))).epsilon(1e-10));

  CHECK(probability(povm, t, {0, 1, 2}) == doctest::Approx(1.0).epsilon(1e-12));
  // sigma-additivity over disjoint sets
  CHECK(std::abs(probability(povm, t, {0, 2}) - probability(povm, t, 0) -
                 probability(povm, t, 2)) < 1e-12);
  CHECK_THROWS_AS(probability(povm, t, 7), error);
}

TEST_CASE("PV multiplicativity") {
  SplitMix64 rng(37);
  const LinOp a = random_hermitian(q3, rng);
  const DiscretePOVM povm = sharp_povm(a);
  for (int i = 0; i < povm.n_outcomes(); ++i)
    for (int j = 0; j < povm.n_outcomes(); ++j) {
      const Matrix prod = povm.effects[i].op.mat * povm.effects[j].op.mat;
      const Matrix want = (i == j) ? povm.effects[i].op.mat
                                   : Matrix::Zero(3, 3);
      CHECK((prod - want).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("eigenstate detection") {
  SplitMix64 rng(41);
  const Ket phi = random_ket(q3, rng);
  const Effect p{projector(phi)};
  const auto [ok1, a1] = is_eigenstate(p, make_state(phi));
  CHECK(ok1);
  CHECK(a1 == doctest::Approx(1.0).epsilon(1e-12));

  // orthogonal state: eigenvalue 0
  Vector orth = random_ket(q3, rng).amp;
  orth -= phi.amp * (phi.amp.dot(orth));
  orth /= orth.norm();
  const auto [ok0, a0] = is_eigenstate(p, make_state(Ket{q3, orth}));
  CHECK(ok0);
  CHECK(std::abs(a0) < 1e-10);

  // both directions of the eigenstate equivalence: tr[TE] = 1 iff E T = T
  for (int rep = 0; rep < 20; ++rep) {
    const Ket v = random_ket(q3, rng);
    const Effect e{projector(v)};
    const StateOperator t = make_state(v);
    CHECK((e.op.mat * t.op.mat - t.op.mat).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((e.op.mat * t.op.mat).real().trace() ==
          doctest::Approx(1.0).epsilon(1e-10));
    const StateOperator tr = random_state(q3, rng);
    const double p1 = (e.op.mat * tr.op.mat).real().trace();
    if (std::abs(p1 - 1.0) > 1e-6)
      CHECK_FALSE(is_eigenstate(e, tr).first);
  }
}

TEST_CASE("joint measurability") {
  SplitMix64 rng(43);
  // commuting projections
  const LinOp a = random_hermitian(q3, rng);
  const DiscretePOVM povm = sharp_povm(a);
  const Effect p = povm.effects[0];
  const Effect q{{q3, povm.effects[0].op.mat + povm.effects[1].op.mat}};
  const JointVerdict v1 = jointly_measurable(p, q);
  CHECK(v1.status == JointVerdict::Status::jointly_measurable);
  // witness reconstructs the inputs
  CHECK((v1.e1p->op.mat + v1.e12p->op.mat - p.op.mat).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((v1.e2p->op.mat + v1.e12p->op.mat - q.op.mat).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((v1.e12p->op.mat - p.op.mat * q.op.mat).cwiseAbs().maxCoeff() < 1e-10);
  Effect::checked({q3, v1.e1p->op.mat + v1.e2p->op.mat + v1.e12p->op.mat});

  // halves of the identity: sum bound
  const Effect half{{q3, 0.5 * Matrix::Identity(3, 3)}};
  const JointVerdict v2 = jointly_measurable(half, half);
  CHECK(v2.status == JointVerdict::Status::jointly_measurable);
  CHECK(v2.e12p->op.mat.cwiseAbs().maxCoeff() < 1e-14);

  // non-commuting spin projections: honestly unknown
  const SpinOps s = spin_ops(0.5, 1.0);
  Vector zp(2), xp(2);
  zp << 1, 0;
  xp << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const JointVerdict v3 = jointly_measurable(Effect{projector({s.s3.space, zp})},
                                             Effect{projector({s.s3.space, xp})});
  CHECK(v3.status == JointVerdict::Status::unknown);
}

TEST_CASE("compound observables") {
  SplitMix64 rng(47);
  const HilbertSpace h1 = HilbertSpace::single(2, "S1");
  const HilbertSpace h2 = HilbertSpace::single(2, "S2");
  const LinOp a{h1, (Matrix(2, 2) << 0, 0, 0, 1).finished()};
  const LinOp b{h2, (Matrix(2, 2) << 0, 0, 0, 1).finished()};
  DiscretePOVM ea = sharp_povm(a), eb = sharp_povm(b);
  // lift to the product space
  DiscretePOVM eaf, ebf;
  eaf.value_dim = ebf.value_dim = 1;
  for (int i = 0; i < 2; ++i) {
    eaf.outcomes.push_back(ea.outcomes[i]);
    eaf.effects.push_back(Effect{tensor(ea.effects[i].op, identity(h2))});
    ebf.outcomes.push_back(eb.outcomes[i]);
    ebf.effects.push_back(Effect{tensor(identity(h1), eb.effects[i].op)});
  }
  const DiscretePOVM joint = compound(eaf, ebf);
  CHECK(joint.n_outcomes() == 4);
  CHECK(joint.value_dim == 2);

  // trivial second factor: compound isomorphic to the first
  DiscretePOVM trivial;
  trivial.value_dim = 1;
  trivial.outcomes.push_back({1.0});
  trivial.effects.push_back(Effect{identity(eaf.effects[0].op.space)});
  const DiscretePOVM same = compound(eaf, trivial);
  for (int i = 0; i < 2; ++i)
    CHECK((same.effects[i].op.mat - eaf.effects[i].op.mat).cwiseAbs().maxCoeff() <
          1e-12);

  // marginals recover the factor probabilities in random states
  for (int rep = 0; rep < 10; ++rep) {
    const StateOperator t =
        random_state(HilbertSpace({2, 2}, {"S1", "S2"}), rng);
    for (int i = 0; i < 2; ++i) {
      double marg = 0;
      for (int j = 0; j < 2; ++j) marg += probability(joint, t, i * 2 + j);
      CHECK(marg == doctest::Approx(probability(eaf, t, i)).epsilon(1e-10));
    }
  }

  // non-commuting inputs rejected
  const SpinOps s = spin_ops(0.5, 1.0);
  CHECK_THROWS_AS(compound(sharp_povm(s.s1), sharp_povm(s.s3)), error);
}

TEST_CASE("uncertainty relation") {
  const SpinOps s = spin_ops(0.5, 1.0);
  const StateOperator up = make_state(basis_ket(s.s3.space, 0));

  // commuting pair: rhs = 0
  const UncertaintyReport r0 = uncertainty_check(s.s3, s.s3, up);
  CHECK(r0.rhs == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r0.holds);

  // s1, s2 in |+z>: equality at 1/4
  const UncertaintyReport r1 = uncertainty_check(s.s1, s.s2, up);
  CHECK(r1.lhs == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r1.rhs == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r1.holds);

  // random sweep
  SplitMix64 rng(53);
  for (int rep = 0; rep < 200; ++rep) {
    const StateOperator t = random_state(q3, rng);
    const UncertaintyReport r = uncertainty_check(random_hermitian(q3, rng),
                                                  random_hermitian(q3, rng), t);
    CHECK(r.holds);
  }
}

TEST_CASE("state determined by a spanning effect family") {
  // desk version of the separation property: reconstruct a state from the
  // probabilities of a tomographically complete effect family
  SplitMix64 rng(59);
  const int d = 3;
  std::vector<Effect> frame;
  for (int i = 0; i < d; ++i) {
    Vector e = Vector::Zero(d);
    e(i) = 1;
    frame.push_back(Effect{projector({q3, e})});
    for (int j = i + 1; j < d; ++j) {
      Vector f = Vector::Zero(d);
      f(i) = 1.0 / std::sqrt(2.0);
      f(j) = 1.0 / std::sqrt(2.0);
      frame.push_back(Effect{projector({q3, f})});
      Vector g = Vector::Zero(d);
      g(i) = 1.0 / std::sqrt(2.0);
      g(j) = cx(0, 1.0 / std::sqrt(2.0));
      frame.push_back(Effect{projector({q3, g})});
    }
  }
  const StateOperator t1 = random_state(q3, rng);
  // rebuild the matrix from frame probabilities alone
  Matrix rec = Matrix::Zero(d, d);
  size_t idx = 0;
  for (int i = 0; i < d; ++i) {
    rec(i, i) = (frame[idx].op.mat * t1.op.mat).trace().real();
    idx += 1 + 2 * (d - i - 1);
  }
  idx = 0;
  for (int i = 0; i < d; ++i) {
    idx += 1;
    for (int j = i + 1; j < d; ++j) {
      const double pr = (frame[idx].op.mat * t1.op.mat).trace().real();
      const double pi = (frame[idx + 1].op.mat * t1.op.mat).trace().real();
      idx += 2;
      const double diag = 0.5 * (rec(i, i).real() + rec(j, j).real());
      // Re <i|T|j> = pr - diag ; Im <i|T|j> = diag - pi
      rec(i, j) = cx(pr - diag, diag - pi);
      rec(j, i) = std::conj(rec(i, j));
    }
  }
  CHECK(trace_norm(LinOp{q3, rec - t1.op.mat}) < 1e-10);
}

TEST_CASE("povm json round trip") {
  const DiscretePOVM z = spin_z_povm();
  const std::string text = povm_to_json(z);
  const DiscretePOVM back = povm_from_json(text, z.effects[0].op.space);
  REQUIRE(back.n_outcomes() == z.n_outcomes());
  for (int k = 0; k < z.n_outcomes(); ++k) {
    CHECK(back.outcomes[k] == z.outcomes[k]);
    CHECK((back.effects[k].op.mat - z.effects[k].op.mat).cwiseAbs().maxCoeff() <
          1e-15);
  }
}
