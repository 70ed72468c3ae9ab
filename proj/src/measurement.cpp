// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include "mepqlab/measurement.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mepqlab/parallel.hpp"

namespace mepqlab {

using nlohmann::json;

// --- BCLSpec -----------------------------------------------------------------

void BCLSpec::validate(double tol) const {
  require(!eigenvalues.empty(), "BCLSpec: no eigenvalue groups");
  require(eigvecs.size() == eigenvalues.size() &&
              targets.size() == eigenvalues.size(),
          "BCLSpec: group count mismatch");
  for (size_t i = 0; i < eigenvalues.size(); ++i)
    for (size_t j = i + 1; j < eigenvalues.size(); ++j)
      require(std::abs(eigenvalues[i] - eigenvalues[j]) > tol,
              "BCLSpec: eigenvalues must be distinct");

  // eigenvectors: orthonormal and complete on H_S
  std::vector<Vector> flat;
  for (const auto& g : eigvecs)
    for (const auto& v : g) flat.push_back(v);
  require(static_cast<int>(flat.size()) == dim_s,
          "BCLSpec: eigenvectors must be complete");
  for (size_t i = 0; i < flat.size(); ++i)
    for (size_t j = 0; j < flat.size(); ++j) {
      const cx g = flat[i].dot(flat[j]);
      const double want = (i == j) ? 1.0 : 0.0;
      require(std::abs(g - want) < 1e-8, "BCLSpec: eigenvectors not orthonormal");
    }

  // targets: per-group orthonormality (the isometry condition)
  for (size_t k = 0; k < targets.size(); ++k) {
    require(targets[k].size() == eigvecs[k].size(),
            "BCLSpec: target/eigenvector layout mismatch");
    for (size_t l = 0; l < targets[k].size(); ++l)
      for (size_t j = 0; j < targets[k].size(); ++j) {
        const cx g = targets[k][l].dot(targets[k][j]);
        const double want = (l == j) ? 1.0 : 0.0;
        require(std::abs(g - want) < 1e-8,
                "BCLSpec: targets violate the orthogonality conditions");
      }
  }

  // apparatus: ready state and pointers orthonormal
  require(pointer.size() == eigenvalues.size(), "BCLSpec: pointer count mismatch");
  require(dim_a >= static_cast<int>(pointer.size()) + 1,
          "BCLSpec: apparatus space too small");
  std::vector<Vector> app{psi};
  for (const auto& v : pointer) app.push_back(v);
  for (size_t i = 0; i < app.size(); ++i)
    for (size_t j = 0; j < app.size(); ++j) {
      const cx g = app[i].dot(app[j]);
      const double want = (i == j) ? 1.0 : 0.0;
      require(std::abs(g - want) < 1e-8,
              "BCLSpec: apparatus states not orthonormal");
    }
}

BCLSpec BCLSpec::von_neumann(const std::vector<double>& eigenvalues,
                             const std::vector<std::vector<Vector>>& eigvecs,
                             int dim_a) {
  BCLSpec s;
  s.eigenvalues = eigenvalues;
  s.eigvecs = eigvecs;
  s.targets = eigvecs;
  s.dim_s = 0;
  for (const auto& g : eigvecs) s.dim_s += static_cast<int>(g.size());
  s.dim_a = dim_a;
  s.psi = Vector::Zero(dim_a);
  s.psi(0) = 1.0;
  for (size_t k = 0; k < eigenvalues.size(); ++k) {
    Vector pk = Vector::Zero(dim_a);
    pk(static_cast<int>(k) + 1) = 1.0;
    s.pointer.push_back(pk);
  }
  return s;
}

BCLSpec BCLSpec::random(int dim_s, int n_groups, SplitMix64& rng, bool von_neumann) {
  require(n_groups >= 1 && n_groups <= dim_s, "BCLSpec::random: bad group count");
  const Matrix basis = random_unitary(dim_s, rng);
  // split dim_s vectors into n_groups nonempty groups
  std::vector<int> sizes(static_cast<size_t>(n_groups), 1);
  for (int extra = dim_s - n_groups; extra > 0; --extra)
    sizes[rng.next_u64() % static_cast<size_t>(n_groups)] += 1;

  BCLSpec s;
  s.dim_s = dim_s;
  s.dim_a = n_groups + 1;
  int col = 0;
  for (int k = 0; k < n_groups; ++k) {
    s.eigenvalues.push_back(k + 1.0);
    std::vector<Vector> g;
    for (int l = 0; l < sizes[static_cast<size_t>(k)]; ++l)
      g.push_back(basis.col(col++));
    s.eigvecs.push_back(g);
  }
  if (von_neumann) {
    s.targets = s.eigvecs;
  } else {
    // per-group random isometries from fresh unitaries
    for (int k = 0; k < n_groups; ++k) {
      const Matrix u = random_unitary(dim_s, rng);
      std::vector<Vector> g;
      for (size_t l = 0; l < s.eigvecs[static_cast<size_t>(k)].size(); ++l)
        g.push_back(u.col(static_cast<int>(l)));
      s.targets.push_back(g);
    }
  }
  s.psi = Vector::Zero(s.dim_a);
  s.psi(0) = 1.0;
  for (int k = 0; k < n_groups; ++k) {
    Vector pk = Vector::Zero(s.dim_a);
    pk(k + 1) = 1.0;
    s.pointer.push_back(pk);
  }
  s.validate();
  return s;
}

// --- unitary extension ---------------------------------------------------------

static Vector kron_vec(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (int i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// orthonormal basis of the orthogonal complement of the columns of m
static Matrix complement_basis(const Matrix& m, int dim) {
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ();
  return q.rightCols(dim - m.cols());
}

LinOp build_unitary(const BCLSpec& spec, std::uint64_t completion_seed) {
  spec.validate();
  const int dim = spec.dim_s * spec.dim_a;
  Matrix domain(dim, spec.dim_s), range(dim, spec.dim_s);
  int col = 0;
  for (size_t k = 0; k < spec.eigvecs.size(); ++k)
    for (size_t l = 0; l < spec.eigvecs[k].size(); ++l) {
      domain.col(col) = kron_vec(spec.eigvecs[k][l], spec.psi);
      range.col(col) = kron_vec(spec.targets[k][l], spec.pointer[k]);
      ++col;
    }

  // isometry of the defining map (fails when the target orthogonality
  // conditions are violated)
  const Matrix gd = domain.adjoint() * domain;
  const Matrix gr = range.adjoint() * range;
  require((gd - Matrix::Identity(col, col)).cwiseAbs().maxCoeff() < 1e-8 &&
              (gr - Matrix::Identity(col, col)).cwiseAbs().maxCoeff() < 1e-8,
          "build_unitary: defining map is not isometric");

  Matrix dc = complement_basis(domain, dim);
  Matrix rc = complement_basis(range, dim);
  if (completion_seed != 0) {
    SplitMix64 rng(completion_seed);
    const Matrix w = random_unitary(static_cast<int>(dc.cols()), rng);
    rc = rc * w;
  }
  Matrix u = range * domain.adjoint() + rc * dc.adjoint();
  HilbertSpace space({spec.dim_s, spec.dim_a}, {"S", "A"});
  return {space, u};
}

// --- premeasurement --------------------------------------------------------------

PremeasurementResult premeasure(const BCLSpec& spec, const Ket& phi) {
  spec.validate();
  require(std::abs(phi.norm() - 1.0) < 1e-9, "premeasure: input must be a unit ket");
  const int n = spec.n_outcomes();

  PremeasurementResult res;
  res.p.assign(static_cast<size_t>(n), 0.0);
  res.phi1.assign(static_cast<size_t>(n), Vector::Zero(spec.dim_s));

  Vector phi_end = Vector::Zero(spec.dim_s * spec.dim_a);
  for (int k = 0; k < n; ++k) {
    Vector target_sum = Vector::Zero(spec.dim_s);
    double pk = 0;
    for (size_t l = 0; l < spec.eigvecs[static_cast<size_t>(k)].size(); ++l) {
      const cx c = spec.eigvecs[static_cast<size_t>(k)][l].dot(phi.amp);
      pk += std::norm(c);
      target_sum += c * spec.targets[static_cast<size_t>(k)][l];
    }
    res.p[static_cast<size_t>(k)] = pk;
    if (pk > 1e-14)
      res.phi1[static_cast<size_t>(k)] = target_sum / std::sqrt(pk);
    phi_end += kron_vec(target_sum, spec.pointer[static_cast<size_t>(k)]);
  }
  HilbertSpace sa({spec.dim_s, spec.dim_a}, {"S", "A"});
  res.phi_end = Ket{sa, phi_end};

  // apparatus state by partial trace over the system
  const Matrix full = phi_end * phi_end.adjoint();
  const Matrix rho_a = partial_trace_matrix(full, {spec.dim_s, spec.dim_a}, {1});
  res.apparatus_state = make_state(LinOp{HilbertSpace::single(spec.dim_a, "A"), rho_a});

  // probability reproducibility: pointer distribution vs Born probabilities
  double max_dev = 0;
  for (int k = 0; k < n; ++k) {
    const Vector& pk_vec = spec.pointer[static_cast<size_t>(k)];
    const double p_pointer = (pk_vec.adjoint() * rho_a * pk_vec)(0).real();
    max_dev = std::max(max_dev, std::abs(p_pointer - res.p[static_cast<size_t>(k)]));
  }
  res.probability_reproducible = max_dev < 1e-12;

  double defect = 0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      const cx ov = res.phi1[static_cast<size_t>(k)].dot(res.phi1[static_cast<size_t>(l)]);
      defect += std::abs(std::sqrt(res.p[static_cast<size_t>(k)] *
                                   res.p[static_cast<size_t>(l)]) * ov);
    }
  res.defect = defect;
  res.composite_pure = true;  // unitary image of a vector state
  int support = 0;
  for (double pk : res.p)
    if (pk > 1e-12) ++support;
  res.objectified = (support == 1);
  return res;
}

// --- state transformer ------------------------------------------------------------

StateTransformer state_transformer(const BCLSpec& spec) {
  spec.validate();
  StateTransformer tr;
  for (size_t k = 0; k < spec.eigvecs.size(); ++k) {
    Matrix kk = Matrix::Zero(spec.dim_s, spec.dim_s);
    for (size_t l = 0; l < spec.eigvecs[k].size(); ++l)
      kk += spec.targets[k][l] * spec.eigvecs[k][l].adjoint();
    tr.K.push_back(kk);
  }
  return tr;
}

Matrix StateTransformer::apply(const std::vector<int>& outcome_set,
                               const Matrix& t) const {
  Matrix out = Matrix::Zero(t.rows(), t.cols());
  for (int k : outcome_set) {
    require(k >= 0 && k < static_cast<int>(K.size()),
            "StateTransformer: unknown outcome");
    out += K[static_cast<size_t>(k)] * t * K[static_cast<size_t>(k)].adjoint();
  }
  return out;
}

double StateTransformer::completeness_defect() const {
  const int n = static_cast<int>(K[0].rows());
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& kk : K) sum += kk.adjoint() * kk;
  return (sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

RepeatabilityReport repeatability_check(const StateTransformer& tr, int trials,
                                        std::uint64_t seed, double tol) {
  const int n = static_cast<int>(tr.K.size());
  double viol = 0;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      const Matrix want = (l == k) ? tr.K[static_cast<size_t>(k)]
                                   : Matrix::Zero(tr.K[0].rows(), tr.K[0].cols());
      viol = std::max(viol, (tr.K[static_cast<size_t>(l)] * tr.K[static_cast<size_t>(k)] -
                             want).cwiseAbs().maxCoeff());
    }
  const bool repeatable = viol < tol;

  // trace identity tr[I(Y)(I(X)(T))] = tr[I(Y n X)(T)] on random instances;
  // binding only for repeatable transformers
  if (repeatable) {
    const int dim = static_cast<int>(tr.K[0].rows());
    SplitMix64 rng(seed);
    HilbertSpace hs = HilbertSpace::single(dim, "S");
    for (int t = 0; t < trials; ++t) {
      const StateOperator st = random_state(hs, rng);
      std::vector<int> x, y, xy;
      for (int k = 0; k < n; ++k) {
        const bool in_x = rng.next_double() < 0.5;
        const bool in_y = rng.next_double() < 0.5;
        if (in_x) x.push_back(k);
        if (in_y) y.push_back(k);
        if (in_x && in_y) xy.push_back(k);
      }
      const double lhs = tr.apply(y, tr.apply(x, st.op.mat)).real().trace();
      const double rhs = tr.apply(xy, st.op.mat).real().trace();
      viol = std::max(viol, std::abs(lhs - rhs));
    }
  }
  return {repeatable && viol < tol, viol};
}

// --- trigger model -----------------------------------------------------------------

void TriggerModel::validate(double tol) const {
  require(d >= 2 && n_detectors >= 1, "TriggerModel: bad dimensions");
  require(epsilon == 1 || epsilon == -1, "TriggerModel: epsilon must be +-1");
  require(static_cast<int>(block_lo.size()) == n_detectors &&
              static_cast<int>(block_hi.size()) == n_detectors &&
              static_cast<int>(M.size()) == n_detectors &&
              static_cast<int>(targets.size()) == n_detectors &&
              static_cast<int>(eigvecs.size()) == n_detectors,
          "TriggerModel: per-detector field size mismatch");
  for (int k = 0; k < n_detectors; ++k) {
    require(block_lo[k] >= 0 && block_hi[k] <= d && block_lo[k] < block_hi[k],
            "TriggerModel: bad label block");
    for (int j = 0; j < k; ++j)
      require(block_hi[j] <= block_lo[k] || block_hi[k] <= block_lo[j],
              "TriggerModel: label blocks must be disjoint");
    require(M[k] == 0 || M[k] == 1, "TriggerModel: M_k must be 0 or 1 at desk scale");
    require(std::abs(targets[k].norm() - 1.0) < 1e-9,
            "TriggerModel: targets must be unit");
    for (int i = 0; i < d; ++i)
      if (i < block_lo[k] || i >= block_hi[k])
        require(std::abs(targets[k](i)) < tol,
                "TriggerModel: target leaks outside its block");
    if (M[k] == 1) {
      const Matrix& t = T_pollution[static_cast<size_t>(k)];
      require(t.rows() == d && std::abs(t.real().trace() - 1.0) < 1e-9,
              "TriggerModel: pollution state must be trace 1");
      for (int i = 0; i < d; ++i)
        if (i < block_lo[k] || i >= block_hi[k]) {
          require(t.row(i).cwiseAbs().maxCoeff() < tol &&
                      t.col(i).cwiseAbs().maxCoeff() < tol,
                  "TriggerModel: pollution state leaks outside its block");
        }
    }
  }
  for (int k = 0; k < n_detectors; ++k)
    for (int j = 0; j < n_detectors; ++j) {
      const cx g = eigvecs[static_cast<size_t>(k)].dot(eigvecs[static_cast<size_t>(j)]);
      require(std::abs(g - ((k == j) ? 1.0 : 0.0)) < 1e-8,
              "TriggerModel: eigenvectors not orthonormal");
    }
  double a2 = 0;
  for (double a : a_amp) a2 += a * a;
  require(std::abs(a2 - 1.0) < 1e-9, "TriggerModel: sum |a_n|^2 must be 1");
  require(static_cast<int>(a_amp.size()) == ion_levels - 1,
          "TriggerModel: need one amplitude per ionised level");
}

int TriggerModel::matter_dim() const {
  int slots = 1;
  for (int m : M) slots += m;
  int dim = 1;
  for (int s = 0; s < slots; ++s) dim *= d;
  return dim;
}

int TriggerModel::apparatus_dim() const {
  int dim = 1;
  for (int k = 0; k < n_detectors; ++k) dim *= ion_levels;
  return dim;
}

Vector TriggerModel::pointer_vector(int k) const {
  Vector one = Vector::Zero(ion_levels);
  for (int n = 1; n < ion_levels; ++n) one(n) = a_amp[static_cast<size_t>(n - 1)];
  Vector ground = Vector::Zero(ion_levels);
  ground(0) = 1.0;
  Vector out = Vector::Ones(1);
  for (int j = 0; j < n_detectors; ++j) {
    const Vector& factor = (j == k) ? one : ground;
    Vector next(out.size() * ion_levels);
    for (int i = 0; i < out.size(); ++i)
      next.segment(i * ion_levels, ion_levels) = out(i) * factor;
    out = next;
  }
  return out;
}

Vector TriggerModel::ready_vector() const { return pointer_vector(-1); }

TriggerModel TriggerModel::random(int d, int n_detectors, int epsilon,
                                  SplitMix64& rng, int ion_levels) {
  require(d >= n_detectors, "TriggerModel::random: need a label per block");
  // single-label blocks with fermions are always Pauli-blocked
  require(epsilon == 1 || d >= 2 * n_detectors,
          "TriggerModel::random: fermionic blocks need 2 labels");
  TriggerModel m;
  m.d = d;
  m.n_detectors = n_detectors;
  m.epsilon = epsilon;
  m.ion_levels = ion_levels;
  // equal-ish contiguous blocks
  for (int k = 0; k < n_detectors; ++k) {
    m.block_lo.push_back(k * d / n_detectors);
    m.block_hi.push_back((k + 1) * d / n_detectors);
  }
  for (int k = 0; k < n_detectors; ++k) {
    const int lo = m.block_lo[static_cast<size_t>(k)];
    const int hi = m.block_hi[static_cast<size_t>(k)];
    const int bs = hi - lo;
    // random target on the block
    Vector t = Vector::Zero(d);
    for (int i = lo; i < hi; ++i) t(i) = rng.next_complex_normal();
    t /= t.norm();
    m.targets.push_back(t);
    // random rank-1 or rank-2 pollution state on the block
    m.M.push_back(1);
    Matrix g = Matrix::Zero(d, std::min(2, bs));
    for (int i = lo; i < hi; ++i)
      for (int c = 0; c < g.cols(); ++c) g(i, c) = rng.next_complex_normal();
    Matrix tp = g * g.adjoint();
    tp /= tp.real().trace();
    m.T_pollution.push_back(tp);
  }
  // orthonormal measured eigenvectors: random unitary columns
  const Matrix u = random_unitary(d, rng);
  for (int k = 0; k < n_detectors; ++k) m.eigvecs.push_back(u.col(k));
  // trigger amplitudes
  std::vector<double> a(static_cast<size_t>(ion_levels - 1));
  double norm = 0;
  for (auto& x : a) {
    x = 0.25 + rng.next_double();
    norm += x * x;
  }
  for (auto& x : a) x /= std::sqrt(norm);
  m.a_amp = a;
  m.validate();
  return m;
}

// --- factored operators --------------------------------------------------------------

double FactoredOperator::trace() const {
  double tr = 0;
  for (const auto& t : terms)
    tr += (t.matter.trace() * t.apparatus.trace()).real();
  return tr;
}

cx FactoredOperator::trace_against(const Matrix& b_matter, const Matrix& b_app) const {
  cx acc = 0;
  for (const auto& t : terms)
    acc += (b_matter * t.matter).trace() * (b_app * t.apparatus).trace();
  return acc;
}

Matrix FactoredOperator::apparatus_marginal() const {
  require(!terms.empty(), "FactoredOperator: empty");
  Matrix out = Matrix::Zero(terms[0].apparatus.rows(), terms[0].apparatus.cols());
  for (const auto& t : terms) out += t.matter.trace() * t.apparatus;
  return out;
}

// --- trigger states --------------------------------------------------------------------

namespace {

// dense operator on (x)^n_slots C^d from a joint operator on a slot subset
// and single-slot factors elsewhere
Matrix embed_joint(int d, int n_slots, const std::vector<int>& subset,
                   const Matrix& joint, const std::vector<Matrix>& singles) {
  const int dim = static_cast<int>(std::llround(std::pow(double(d), n_slots)));
  std::vector<int> pos_of_slot(static_cast<size_t>(n_slots), -1);
  for (size_t s = 0; s < subset.size(); ++s)
    pos_of_slot[static_cast<size_t>(subset[s])] = static_cast<int>(s);

  std::vector<long long> stride(static_cast<size_t>(n_slots), 1);
  for (int f = n_slots - 2; f >= 0; --f)
    stride[static_cast<size_t>(f)] = stride[static_cast<size_t>(f + 1)] * d;

  const int sub_n = static_cast<int>(subset.size());
  std::vector<long long> sub_stride(static_cast<size_t>(sub_n), 1);
  for (int f = sub_n - 2; f >= 0; --f)
    sub_stride[static_cast<size_t>(f)] = sub_stride[static_cast<size_t>(f + 1)] * d;

  Matrix out(dim, dim);
  std::vector<int> ri(static_cast<size_t>(n_slots)), ci(static_cast<size_t>(n_slots));
  for (int r = 0; r < dim; ++r) {
    long long rr = r;
    for (int f = n_slots - 1; f >= 0; --f) {
      ri[static_cast<size_t>(f)] = static_cast<int>(rr % d);
      rr /= d;
    }
    for (int c = 0; c < dim; ++c) {
      long long cc = c;
      for (int f = n_slots - 1; f >= 0; --f) {
        ci[static_cast<size_t>(f)] = static_cast<int>(cc % d);
        cc /= d;
      }
      long long jr = 0, jc = 0;
      cx val = 1.0;
      bool zero = false;
      for (int f = 0; f < n_slots && !zero; ++f) {
        const int sp = pos_of_slot[static_cast<size_t>(f)];
        if (sp >= 0) {
          jr += ri[static_cast<size_t>(f)] * sub_stride[static_cast<size_t>(sp)];
          jc += ci[static_cast<size_t>(f)] * sub_stride[static_cast<size_t>(sp)];
        } else {
          const cx s = singles[static_cast<size_t>(f)](ri[static_cast<size_t>(f)],
                                                       ci[static_cast<size_t>(f)]);
          if (s == cx(0, 0)) zero = true;
          val *= s;
        }
      }
      out(r, c) = zero ? cx(0, 0) : val * joint(jr, jc);
    }
  }
  return out;
}

// symmetric/antisymmetric projector on n equal slots of dim d
Matrix sym_projector(int d, int n, int epsilon) {
  HilbertSpace hs(std::vector<int>(static_cast<size_t>(n), d),
                  [n] {
                    std::vector<std::string> l;
                    for (int i = 0; i < n; ++i) l.push_back("f" + std::to_string(i));
                    return l;
                  }());
  return symmetrizer(hs, epsilon == 1 ? SymKind::symmetric : SymKind::antisymmetric)
      .mat;
}

}  // namespace

TriggerStates trigger_states(const TriggerModel& model, const Ket& phi,
                             bool build_states, bool build_trig1) {
  model.validate();
  require(std::abs(phi.amp.norm() - 1.0) < 1e-9, "trigger_states: non-unit input");
  const int N = model.n_detectors;
  const int d = model.d;

  TriggerStates out;
  // Born decomposition of the input
  double psum = 0;
  for (int k = 0; k < N; ++k) {
    const cx c = model.eigvecs[static_cast<size_t>(k)].dot(phi.amp);
    out.p.push_back(std::norm(c));
    psum += std::norm(c);
  }
  require(std::abs(psum - 1.0) < 1e-9,
          "trigger_states: input not in the measured span");
  out.phi1 = model.targets;

  // W_kk on (sys, poll_k) and normalizations
  const Matrix p2 = sym_projector(d, 2, model.epsilon);
  std::vector<Matrix> wkk(static_cast<size_t>(N));
  out.w_trace = Matrix::Zero(N, N);
  for (int k = 0; k < N; ++k) {
    const Vector& f = out.phi1[static_cast<size_t>(k)];
    if (model.M[static_cast<size_t>(k)] == 1) {
      Matrix mid = Matrix::Zero(d * d, d * d);
      // |phi1><phi1| on sys (slot 0) x T_k on poll (slot 1)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          mid.block(i * d, j * d, d, d) =
              (f(i) * std::conj(f(j))) * model.T_pollution[static_cast<size_t>(k)];
      wkk[static_cast<size_t>(k)] = p2 * mid * p2;
    } else {
      wkk[static_cast<size_t>(k)] = f * f.adjoint();
    }
    const double tr = wkk[static_cast<size_t>(k)].real().trace();
    out.w_trace(k, k) = tr;
    require(tr > 1e-10,
            "trigger_states: Pauli-blocked configuration (tr[W_kk] ~ 0) for "
            "detector " + std::to_string(k));
    out.nu.push_back(1.0 / std::sqrt(tr));
  }

  // cross W_kl traces for k != l: build on slots (poll_k, sys, poll_l)
  std::map<std::pair<int, int>, Matrix> wkl;
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      if (k == l) continue;
      const Vector& fk = out.phi1[static_cast<size_t>(k)];
      const Vector& fl = out.phi1[static_cast<size_t>(l)];
      const int mk = model.M[static_cast<size_t>(k)];
      const int ml = model.M[static_cast<size_t>(l)];
      // slots: [poll_k (if any), sys, poll_l (if any)]
      const int slots = 1 + mk + ml;
      const int dim = static_cast<int>(std::llround(std::pow(double(d), slots)));
      Matrix mid(dim, dim);
      // mid = T_k x |phi1_k><phi1_l| x T_l in that slot order
      {
        std::vector<Matrix> facs;
        if (mk) facs.push_back(model.T_pollution[static_cast<size_t>(k)]);
        facs.push_back(fk * fl.adjoint());
        if (ml) facs.push_back(model.T_pollution[static_cast<size_t>(l)]);
        Matrix acc = facs[0];
        for (size_t i = 1; i < facs.size(); ++i) {
          Matrix next(acc.rows() * d, acc.cols() * d);
          for (int r = 0; r < acc.rows(); ++r)
            for (int c = 0; c < acc.cols(); ++c)
              next.block(r * d, c * d, d, d) = acc(r, c) * facs[i];
          acc = next;
        }
        mid = acc;
      }
      // left projector over (poll_k, sys); right projector over (sys, poll_l)
      Matrix left = Matrix::Identity(dim, dim);
      Matrix right = Matrix::Identity(dim, dim);
      if (mk) {
        // slots 0,1 of [poll_k, sys, (poll_l)]
        std::vector<int> subset{0, 1};
        std::vector<Matrix> singles(static_cast<size_t>(slots),
                                    Matrix::Identity(d, d));
        left = embed_joint(d, slots, subset, p2, singles);
      }
      if (ml) {
        const int sys_slot = mk;  // sys position
        std::vector<int> subset{sys_slot, sys_slot + 1};
        std::vector<Matrix> singles(static_cast<size_t>(slots),
                                    Matrix::Identity(d, d));
        right = embed_joint(d, slots, subset, p2, singles);
      }
      Matrix w = left * mid * right;
      out.w_trace(k, l) = w.trace();
      wkl[{k, l}] = w;
    }

  if (!build_states) return out;

  // assemble the four trigger-stage operators on matter x apparatus;
  // matter slot order (sys, poll_1, .., poll_N) over detectors with M = 1
  std::vector<int> poll_slot(static_cast<size_t>(N), -1);
  int slot = 1;
  for (int k = 0; k < N; ++k)
    if (model.M[static_cast<size_t>(k)] == 1) poll_slot[static_cast<size_t>(k)] = slot++;
  const int n_slots = slot;

  auto rest_single = [&](const std::vector<int>& used) {
    std::vector<Matrix> singles(static_cast<size_t>(n_slots), Matrix::Identity(d, d));
    for (int j = 0; j < N; ++j) {
      const int sj = poll_slot[static_cast<size_t>(j)];
      if (sj < 0) continue;
      if (std::find(used.begin(), used.end(), j) == used.end())
        singles[static_cast<size_t>(sj)] = model.T_pollution[static_cast<size_t>(j)];
    }
    return singles;
  };

  // pointer projectors on the ionisation space
  std::vector<Vector> psi_k;
  for (int k = 0; k < N; ++k) psi_k.push_back(model.pointer_vector(k));

  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      const double coeff = std::sqrt(out.p[static_cast<size_t>(k)] *
                                     out.p[static_cast<size_t>(l)]) *
                           out.nu[static_cast<size_t>(k)] *
                           out.nu[static_cast<size_t>(l)];
      if (coeff < 1e-15) continue;
      Matrix matter;
      if (k == l) {
        std::vector<int> subset;
        subset.push_back(0);
        if (model.M[static_cast<size_t>(k)] == 1)
          subset.push_back(poll_slot[static_cast<size_t>(k)]);
        // wkk slot order is (sys, poll_k) which matches ascending subset
        matter = embed_joint(d, n_slots, subset, wkk[static_cast<size_t>(k)],
                             rest_single({k}));
      } else {
        // wkl slot order is (poll_k, sys, poll_l)
        std::vector<int> subset;
        if (model.M[static_cast<size_t>(k)] == 1)
          subset.push_back(poll_slot[static_cast<size_t>(k)]);
        subset.push_back(0);
        if (model.M[static_cast<size_t>(l)] == 1)
          subset.push_back(poll_slot[static_cast<size_t>(l)]);
        matter = embed_joint(d, n_slots, subset, wkl[{k, l}], rest_single({k, l}));
      }
      const Matrix app = psi_k[static_cast<size_t>(k)] *
                         psi_k[static_cast<size_t>(l)].adjoint();
      out.trig2.terms.push_back({coeff * matter, app});
      if (k == l) {
        out.trig3.terms.push_back({coeff * matter, app});
        out.trig.terms.push_back({coeff * matter, app});
        out.gemenge_weights.push_back(out.p[static_cast<size_t>(k)]);
      }
    }

  // maximal-entanglement attempt: global symmetrizer over all matter slots,
  // unspecified global normalization (built with nu = 1, trace reported)
  if (build_trig1) {
    const Matrix pfull = sym_projector(d, n_slots, model.epsilon);
    for (int k = 0; k < N; ++k)
      for (int l = 0; l < N; ++l) {
        const double coeff = std::sqrt(out.p[static_cast<size_t>(k)] *
                                       out.p[static_cast<size_t>(l)]);
        if (coeff < 1e-15) continue;
        const Vector& fk = out.phi1[static_cast<size_t>(k)];
        const Vector& fl = out.phi1[static_cast<size_t>(l)];
        Matrix core = embed_joint(d, n_slots, {0}, fk * fl.adjoint(), rest_single({}));
        Matrix matter = pfull * core * pfull;
        out.trig1.terms.push_back({coeff * matter,
                                   psi_k[static_cast<size_t>(k)] *
                                       psi_k[static_cast<size_t>(l)].adjoint()});
      }
    out.trig1_trace = out.trig1.trace();
  }
  return out;
}

Prop23Report prop23_check(const TriggerModel& model, const TriggerStates& ts,
                          int trials, std::uint64_t seed, bool parallel) {
  require(trials >= 1, "prop23_check: trials must be >= 1");
  const int N = model.n_detectors;
  const int md = model.matter_dim();

  std::vector<Vector> psi_k;
  for (int k = 0; k < N; ++k) psi_k.push_back(model.pointer_vector(k));

  std::vector<double> comm_dev(static_cast<size_t>(trials));
  std::vector<double> ctrl_dev(static_cast<size_t>(trials));

  parallel_for(
      trials,
      [&](std::int64_t i) {
        SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(i)));
        // commuting draw: B = sum_l B_l x |psi_l><psi_l|
        cx t2 = 0, t3 = 0;
        for (int l = 0; l < N; ++l) {
          Matrix bl(md, md);
          for (int r = 0; r < md; ++r)
            for (int c = 0; c < md; ++c) bl(r, c) = rng.next_complex_normal();
          bl = 0.5 * (bl + bl.adjoint());
          const Matrix bapp = psi_k[static_cast<size_t>(l)] *
                              psi_k[static_cast<size_t>(l)].adjoint();
          t2 += ts.trig2.trace_against(bl, bapp);
          t3 += ts.trig3.trace_against(bl, bapp);
        }
        comm_dev[static_cast<size_t>(i)] = std::abs(t2 - t3);

        // non-commuting control: off-diagonal pointer block
        const int m = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(N));
        int mp = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(N));
        if (N > 1 && mp == m) mp = (m + 1) % N;
        Matrix bo(md, md);
        for (int r = 0; r < md; ++r)
          for (int c = 0; c < md; ++c) bo(r, c) = rng.next_complex_normal();
        const Matrix bapp = psi_k[static_cast<size_t>(m)] *
                            psi_k[static_cast<size_t>(mp)].adjoint();
        // hermitian B = bo x |psi_m><psi_m'| + h.c.
        const cx dev2 = ts.trig2.trace_against(bo, bapp) +
                        ts.trig2.trace_against(bo.adjoint(), bapp.adjoint());
        const cx dev3 = ts.trig3.trace_against(bo, bapp) +
                        ts.trig3.trace_against(bo.adjoint(), bapp.adjoint());
        ctrl_dev[static_cast<size_t>(i)] = std::abs(dev2 - dev3);
      },
      parallel);

  Prop23Report rep;
  rep.trials = trials;
  rep.max_commuting_dev = 0;
  rep.min_noncommuting_dev = std::numeric_limits<double>::max();
  rep.noncommuting_detected = 0;
  for (int i = 0; i < trials; ++i) {
    rep.max_commuting_dev = std::max(rep.max_commuting_dev,
                                     comm_dev[static_cast<size_t>(i)]);
    rep.min_noncommuting_dev = std::min(rep.min_noncommuting_dev,
                                        ctrl_dev[static_cast<size_t>(i)]);
    if (ctrl_dev[static_cast<size_t>(i)] > 1e-3) ++rep.noncommuting_detected;
  }
  return rep;
}

// --- JSON ---------------------------------------------------------------------------

static json vec_to_json(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

static Vector vec_from_json(const json& arr) {
  Vector v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i)
    v(static_cast<int>(i)) = cx(arr[i][0].get<double>(), arr[i][1].get<double>());
  return v;
}

std::string bcl_spec_to_json(const BCLSpec& spec) {
  json j;
  j["dim_s"] = spec.dim_s;
  j["dim_a"] = spec.dim_a;
  j["eigenvalues"] = spec.eigenvalues;
  json groups = json::array(), targets = json::array();
  for (const auto& g : spec.eigvecs) {
    json gg = json::array();
    for (const auto& v : g) gg.push_back(vec_to_json(v));
    groups.push_back(gg);
  }
  for (const auto& g : spec.targets) {
    json gg = json::array();
    for (const auto& v : g) gg.push_back(vec_to_json(v));
    targets.push_back(gg);
  }
  j["eigvecs"] = groups;
  j["targets"] = targets;
  j["psi"] = vec_to_json(spec.psi);
  json ptr = json::array();
  for (const auto& v : spec.pointer) ptr.push_back(vec_to_json(v));
  j["pointer"] = ptr;
  return j.dump(2);
}

BCLSpec bcl_spec_from_json(const std::string& text) {
  json j = json::parse(text);
  BCLSpec s;
  s.dim_s = j.at("dim_s").get<int>();
  s.dim_a = j.at("dim_a").get<int>();
  s.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  for (const auto& gg : j.at("eigvecs")) {
    std::vector<Vector> g;
    for (const auto& v : gg) g.push_back(vec_from_json(v));
    s.eigvecs.push_back(g);
  }
  for (const auto& gg : j.at("targets")) {
    std::vector<Vector> g;
    for (const auto& v : gg) g.push_back(vec_from_json(v));
    s.targets.push_back(g);
  }
  s.psi = vec_from_json(j.at("psi"));
  for (const auto& v : j.at("pointer")) s.pointer.push_back(vec_from_json(v));
  s.validate();
  return s;
}

std::string bcl_report_to_json(const BCLReport& report) {
  json j;
  j["p"] = report.p;
  j["defect"] = report.defect;
  j["repeatable"] = report.repeatable;
  j["prop22_max"] = report.prop22_max;
  j["prop23_max"] = report.prop23_max;
  return j.dump(2);
}

}  // namespace mepqlab
