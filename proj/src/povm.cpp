// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include "mepqlab/povm.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace mepqlab {

using nlohmann::json;

bool Effect::is_projection(double tol) const {
  return (op.mat * op.mat - op.mat).cwiseAbs().maxCoeff() <= tol;
}

Effect Effect::checked(const LinOp& op, double tol) {
  require(op.is_hermitian(tol), "Effect: not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.mat);
  require(es.eigenvalues().minCoeff() > -tol, "Effect: negative spectrum");
  require(es.eigenvalues().maxCoeff() < 1.0 + tol, "Effect: spectrum above 1");
  return Effect{op};
}

void DiscretePOVM::validate(double tol) const {
  require(!effects.empty(), "DiscretePOVM: no effects");
  require(effects.size() == outcomes.size(), "DiscretePOVM: outcome/effect mismatch");
  const int n = effects[0].op.space.dim();
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& e : effects) {
    Effect::checked(e.op, tol);
    for (const auto& o : outcomes)
      require(static_cast<int>(o.size()) == value_dim,
              "DiscretePOVM: outcome tuple length != value_dim");
    sum += e.op.mat;
  }
  require((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= tol,
          "DiscretePOVM: effects do not sum to identity");
}

bool DiscretePOVM::is_projective(double tol) const {
  for (const auto& e : effects)
    if (!e.is_projection(tol)) return false;
  return true;
}

double probability(const DiscretePOVM& povm, const StateOperator& t,
                   const std::vector<int>& outcome_subset) {
  double p = 0;
  for (int k : outcome_subset) {
    require(k >= 0 && k < povm.n_outcomes(), "probability: unknown outcome label");
    p += (t.op.mat * povm.effects[k].op.mat).real().trace();
  }
  return p;
}

double probability(const DiscretePOVM& povm, const StateOperator& t, int outcome) {
  return probability(povm, t, std::vector<int>{outcome});
}

std::pair<bool, double> is_eigenstate(const Effect& e, const StateOperator& t,
                                      double tol) {
  // candidate eigenvalue from tr[E T] (T has unit trace)
  const double a = (e.op.mat * t.op.mat).real().trace();
  const double dev = (e.op.mat * t.op.mat - a * t.op.mat).cwiseAbs().maxCoeff();
  if (dev <= tol) return {true, a};
  return {false, 0.0};
}

JointVerdict jointly_measurable(const Effect& e1, const Effect& e2, double tol) {
  require(e1.op.space.same_as(e2.op.space), "jointly_measurable: space mismatch");
  JointVerdict v;
  const Matrix comm = e1.op.mat * e2.op.mat - e2.op.mat * e1.op.mat;
  if (e1.is_projection(tol) && e2.is_projection(tol) &&
      comm.cwiseAbs().maxCoeff() <= tol) {
    // commuting projections: E12' = E1 E2
    Matrix e12 = e1.op.mat * e2.op.mat;
    v.status = JointVerdict::Status::jointly_measurable;
    v.e12p = Effect{{e1.op.space, e12}};
    v.e1p = Effect{{e1.op.space, e1.op.mat - e12}};
    v.e2p = Effect{{e1.op.space, e2.op.mat - e12}};
    return v;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(e1.op.mat + e2.op.mat);
  if (es.eigenvalues().maxCoeff() <= 1.0 + tol) {
    // sum bounded by one: trivial witness E12' = 0
    v.status = JointVerdict::Status::jointly_measurable;
    v.e12p = Effect{{e1.op.space, Matrix::Zero(e1.op.mat.rows(), e1.op.mat.cols())}};
    v.e1p = e1;
    v.e2p = e2;
    return v;
  }
  return v;  // unknown
}

DiscretePOVM compound(const DiscretePOVM& a, const DiscretePOVM& b, double tol) {
  require(a.is_projective(1e-8) && b.is_projective(1e-8),
          "compound: inputs must be sharp");
  for (const auto& ea : a.effects)
    for (const auto& eb : b.effects) {
      const Matrix comm = ea.op.mat * eb.op.mat - eb.op.mat * ea.op.mat;
      require(comm.cwiseAbs().maxCoeff() <= tol, "compound: non-commuting inputs");
    }
  DiscretePOVM out;
  out.value_dim = a.value_dim + b.value_dim;
  for (int i = 0; i < a.n_outcomes(); ++i)
    for (int j = 0; j < b.n_outcomes(); ++j) {
      std::vector<double> label = a.outcomes[i];
      label.insert(label.end(), b.outcomes[j].begin(), b.outcomes[j].end());
      out.outcomes.push_back(label);
      out.effects.push_back(
          Effect{{a.effects[i].op.space, a.effects[i].op.mat * b.effects[j].op.mat}});
    }
  out.validate(1e-8);
  return out;
}

UncertaintyReport uncertainty_check(const LinOp& a, const LinOp& b,
                                    const StateOperator& t, double tol) {
  require(a.is_hermitian(1e-8) && b.is_hermitian(1e-8),
          "uncertainty_check: operators must be hermitian");
  const double da = variance(a, t);
  const double db = variance(b, t);
  const cx mean_comm = (t.op.mat * commutator(a, b).mat).trace();
  const double rhs = 0.5 * std::abs(mean_comm);
  return {da * db, rhs, da * db >= rhs - tol};
}

DiscretePOVM sharp_povm(const LinOp& a, double degeneracy_tol) {
  require(a.is_hermitian(1e-8), "sharp_povm: operator not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat);
  DiscretePOVM out;
  out.value_dim = 1;
  int i = 0;
  const int n = static_cast<int>(es.eigenvalues().size());
  while (i < n) {
    int j = i;
    while (j + 1 < n &&
           std::abs(es.eigenvalues()(j + 1) - es.eigenvalues()(i)) <= degeneracy_tol)
      ++j;
    Matrix p = Matrix::Zero(n, n);
    for (int k = i; k <= j; ++k)
      p += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
    out.outcomes.push_back({es.eigenvalues()(i)});
    out.effects.push_back(Effect{{a.space, p}});
    i = j + 1;
  }
  return out;
}

std::string povm_to_json(const DiscretePOVM& povm) {
  json j;
  j["dim"] = povm.effects.empty() ? 0 : povm.effects[0].op.space.dim();
  j["value_dim"] = povm.value_dim;
  j["outcomes"] = povm.outcomes;
  json effs = json::array();
  for (const auto& e : povm.effects) {
    json rows = json::array();
    const Matrix& m = e.op.mat;
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c)
        rows.push_back({m(r, c).real(), m(r, c).imag()});
    effs.push_back(rows);
  }
  j["effects"] = effs;
  return j.dump(2);
}

DiscretePOVM povm_from_json(const std::string& text, const HilbertSpace& space) {
  json j = json::parse(text);
  DiscretePOVM out;
  const int dim = j.at("dim").get<int>();
  require(dim == space.dim(), "povm_from_json: dimension mismatch");
  out.value_dim = j.at("value_dim").get<int>();
  out.outcomes = j.at("outcomes").get<std::vector<std::vector<double>>>();
  for (const auto& rows : j.at("effects")) {
    Matrix m(dim, dim);
    int idx = 0;
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        m(r, c) = cx(rows[idx][0].get<double>(), rows[idx][1].get<double>());
        ++idx;
      }
    out.effects.push_back(Effect{{space, m}});
  }
  out.validate(1e-8);
  return out;
}

}  // namespace mepqlab
