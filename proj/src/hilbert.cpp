// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include "mepqlab/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace mepqlab {

HilbertSpace::HilbertSpace(std::vector<int> d, std::vector<std::string> l)
    : dims(std::move(d)), labels(std::move(l)) {
  require(!dims.empty(), "HilbertSpace: needs at least one factor");
  require(dims.size() == labels.size(), "HilbertSpace: dims/labels size mismatch");
  for (int dd : dims) require(dd >= 1, "HilbertSpace: factor dim must be >= 1");
  std::set<std::string> uniq(labels.begin(), labels.end());
  require(uniq.size() == labels.size(), "HilbertSpace: factor labels must be unique");
}

HilbertSpace HilbertSpace::single(int d, const std::string& label) {
  return HilbertSpace({d}, {label});
}

int HilbertSpace::dim() const {
  long long p = 1;
  for (int d : dims) p *= d;
  require(p < (1LL << 31), "HilbertSpace: dimension overflow");
  return static_cast<int>(p);
}

bool HilbertSpace::same_as(const HilbertSpace& other) const {
  return dims == other.dims && labels == other.labels;
}

Ket Ket::normalized() const {
  const double n = amp.norm();
  require(n > 0, "Ket: cannot normalize zero vector");
  return {space, amp / n};
}

bool LinOp::is_hermitian(double tol) const {
  return (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

LinOp identity(const HilbertSpace& space) {
  return {space, Matrix::Identity(space.dim(), space.dim())};
}

Ket basis_ket(const HilbertSpace& space, int index) {
  require(index >= 0 && index < space.dim(), "basis_ket: index out of range");
  Vector v = Vector::Zero(space.dim());
  v(index) = 1.0;
  return {space, v};
}

LinOp projector(const Ket& phi) {
  Vector v = phi.amp / phi.amp.norm();
  return {phi.space, v * v.adjoint()};
}

StateOperator make_state(const LinOp& op) {
  require(op.is_hermitian(1e-8), "make_state: operator not hermitian");
  Matrix h = 0.5 * (op.mat + op.mat.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RealVector ev = es.eigenvalues();
  require(ev.minCoeff() > -kStateTol,
          "make_state: negative eigenvalue beyond tolerance");
  const double tr = h.real().trace();
  require(std::abs(tr - 1.0) < 1e-8, "make_state: trace must be 1");
  // clip rounding-level negatives and renormalize
  RealVector clipped = ev.cwiseMax(0.0);
  Matrix cleaned = es.eigenvectors() * clipped.asDiagonal() *
                   es.eigenvectors().adjoint();
  cleaned /= cleaned.real().trace();
  return StateOperator{{op.space, cleaned}, {}};
}

StateOperator make_state(const Ket& phi) { return make_state(projector(phi)); }

StateOperator make_gemenge(const std::vector<std::pair<double, StateOperator>>& parts) {
  require(!parts.empty(), "make_gemenge: empty decomposition");
  double wsum = 0;
  Matrix acc = Matrix::Zero(parts[0].second.dim(), parts[0].second.dim());
  StateOperator out;
  for (const auto& [w, t] : parts) {
    require(w >= 0.0 && w <= 1.0, "make_gemenge: weight outside [0,1]");
    acc += w * t.op.mat;
    wsum += w;
    out.gemenge.push_back({w, t.op});
  }
  require(std::abs(wsum - 1.0) < 1e-12, "make_gemenge: weights must sum to 1");
  out.op = {parts[0].second.op.space, acc};
  return out;
}

SpinOps spin_ops(double s, double hbar) {
  const int n = static_cast<int>(std::lround(2 * s + 1));
  require(std::abs(2 * s - std::lround(2 * s)) < 1e-12 && n >= 1,
          "spin_ops: s must be a non-negative half-integer");
  HilbertSpace space = HilbertSpace::single(n, "spin");
  Matrix sp = Matrix::Zero(n, n);  // raising operator
  for (int k = 1; k < n; ++k) {
    const double m = s - k;  // s+ |s,m> = hbar sqrt(s(s+1)-m(m+1)) |s,m+1>
    sp(k - 1, k) = hbar * std::sqrt(s * (s + 1) - m * (m + 1));
  }
  Matrix sm = sp.adjoint();
  Matrix s1 = 0.5 * (sp + sm);
  Matrix s2 = cx(0, -0.5) * (sp - sm);
  Matrix s3 = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) s3(k, k) = hbar * (s - k);
  return SpinOps{{space, s1}, {space, s2}, {space, s3}, hbar};
}

static HilbertSpace joined(const HilbertSpace& a, const HilbertSpace& b) {
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  std::vector<std::string> labels = a.labels;
  labels.insert(labels.end(), b.labels.begin(), b.labels.end());
  return HilbertSpace(dims, labels);  // ctor enforces disjoint labels
}

Ket tensor(const Ket& a, const Ket& b) {
  const int na = a.space.dim(), nb = b.space.dim();
  Vector v(na * nb);
  for (int i = 0; i < na; ++i)
    v.segment(i * nb, nb) = a.amp(i) * b.amp;
  return {joined(a.space, b.space), v};
}

LinOp tensor(const LinOp& a, const LinOp& b) {
  const int na = a.space.dim(), nb = b.space.dim();
  Matrix m(na * nb, na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      m.block(i * nb, j * nb, nb, nb) = a.mat(i, j) * b.mat;
  return {joined(a.space, b.space), m};
}

StateOperator tensor(const StateOperator& a, const StateOperator& b) {
  StateOperator out;
  out.op = tensor(a.op, b.op);
  return out;
}

Matrix partial_trace_matrix(const Matrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  const int nf = static_cast<int>(dims.size());
  for (int k : keep) require(k >= 0 && k < nf, "partial_trace: bad factor index");
  std::vector<int> drop;
  for (int f = 0; f < nf; ++f)
    if (std::find(keep.begin(), keep.end(), f) == keep.end()) drop.push_back(f);

  int dkeep = 1, ddrop = 1;
  for (int f : keep) dkeep *= dims[f];
  for (int f : drop) ddrop *= dims[f];
  require(dkeep * ddrop == m.rows(), "partial_trace: dims mismatch");

  // strides of each factor in the row-major composite index
  std::vector<long long> stride(nf, 1);
  for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

  auto flat = [&](const std::vector<int>& kees, const std::vector<int>& drs) {
    long long idx = 0;
    for (size_t i = 0; i < keep.size(); ++i) idx += kees[i] * stride[keep[i]];
    for (size_t i = 0; i < drop.size(); ++i) idx += drs[i] * stride[drop[i]];
    return idx;
  };

  // split a rank within the listed factors into per-factor indices
  auto unrank = [&dims](long long r, const std::vector<int>& order) {
    std::vector<int> out(order.size());
    for (int i = static_cast<int>(order.size()) - 1; i >= 0; --i) {
      out[static_cast<size_t>(i)] = static_cast<int>(r % dims[order[i]]);
      r /= dims[order[i]];
    }
    return out;
  };

  Matrix out = Matrix::Zero(dkeep, dkeep);
  for (long long i = 0; i < dkeep; ++i) {
    const auto ki = unrank(i, keep);
    for (long long j = 0; j < dkeep; ++j) {
      const auto kj = unrank(j, keep);
      cx acc = 0;
      for (long long t = 0; t < ddrop; ++t) {
        const auto dt = unrank(t, drop);
        acc += m(flat(ki, dt), flat(kj, dt));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

StateOperator partial_trace(const StateOperator& w, const std::vector<int>& keep) {
  require(std::abs(w.op.mat.real().trace() - 1.0) < 1e-8,
          "partial_trace: input is not a state (trace != 1)");
  Matrix red = partial_trace_matrix(w.op.mat, w.op.space.dims, keep);
  std::vector<int> dims;
  std::vector<std::string> labels;
  for (int f : keep) {
    dims.push_back(w.op.space.dims[f]);
    labels.push_back(w.op.space.labels[f]);
  }
  return make_state(LinOp{HilbertSpace(dims, labels), red});
}

LinOp permutation_operator(const HilbertSpace& space, const std::vector<int>& perm) {
  const int nf = space.n_factors();
  require(static_cast<int>(perm.size()) == nf, "permutation: size mismatch");
  const int d0 = space.dims[0];
  for (int d : space.dims) require(d == d0, "permutation: factor dims must be equal");
  const int dim = space.dim();

  std::vector<long long> stride(nf, 1);
  for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * d0;

  Matrix m = Matrix::Zero(dim, dim);
  std::vector<int> idx(nf);
  for (int col = 0; col < dim; ++col) {
    long long r = col;
    for (int f = nf - 1; f >= 0; --f) {
      idx[f] = static_cast<int>(r % d0);
      r /= d0;
    }
    // g(psi_1 x...x psi_n) = psi_{g(1)} x...x psi_{g(n)}:
    // slot f of the output carries the factor that was in slot perm[f]
    long long row = 0;
    for (int f = 0; f < nf; ++f) row += idx[perm[f]] * stride[f];
    m(row, col) = 1.0;
  }
  return {space, m};
}

static void permutations_with_sign(
    int n, const std::function<void(const std::vector<int>&, int)>& visit) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  // iterate in lexicographic order, tracking parity by inversion count
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inv;
    visit(perm, (inv % 2 == 0) ? 1 : -1);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

LinOp symmetrizer(const HilbertSpace& space, SymKind kind) {
  const int nf = space.n_factors();
  const int d0 = space.dims[0];
  for (int d : space.dims) require(d == d0, "symmetrizer: factor dims must be equal");
  Matrix acc = Matrix::Zero(space.dim(), space.dim());
  double nperm = 0;
  permutations_with_sign(nf, [&](const std::vector<int>& perm, int sign) {
    const double w = (kind == SymKind::symmetric) ? 1.0 : sign;
    acc += w * permutation_operator(space, perm).mat;
    nperm += 1.0;
  });
  return {space, acc / nperm};
}

double von_neumann_entropy(const StateOperator& t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(t.op.mat);
  double s = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-15) s -= p * std::log(p);  // 0 ln 0 := 0
  }
  return std::max(s, 0.0);
}

double variance(const LinOp& a, const StateOperator& t) {
  require(a.is_hermitian(1e-8), "variance: operator not hermitian");
  const double mean = (t.op.mat * a.mat).real().trace();
  const double sq = (t.op.mat * a.mat * a.mat).real().trace();
  const double var = sq - mean * mean;
  require(var > -1e-9, "variance: negative radicand");
  return std::sqrt(std::max(var, 0.0));
}

double normalized_correlation(const LinOp& a, const LinOp& b, const StateOperator& t) {
  const double comm = commutator(a, b).mat.cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, a.mat.cwiseAbs().maxCoeff() *
                                         b.mat.cwiseAbs().maxCoeff());
  require(comm <= 1e-9 * scale,
          "normalized_correlation: observables must commute");
  const double da = variance(a, t);
  const double db = variance(b, t);
  require(da > 1e-12 && db > 1e-12,
          "normalized_correlation: zero variance divisor");
  const double mab = (t.op.mat * a.mat * b.mat).real().trace();
  const double ma = (t.op.mat * a.mat).real().trace();
  const double mb = (t.op.mat * b.mat).real().trace();
  return (mab - ma * mb) / (da * db);
}

Matrix hermitian_exp(const Matrix& h, double scale) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RealVector ev = es.eigenvalues();
  Vector ex(ev.size());
  for (int i = 0; i < ev.size(); ++i) ex(i) = std::exp(scale * ev(i));
  return es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().adjoint();
}

std::pair<StateOperator, double> gibbs_state(const LinOp& h, double e_target,
                                             double rel_tol) {
  require(h.is_hermitian(1e-8), "gibbs_state: H not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat);
  RealVector ev = es.eigenvalues();
  const double emin = ev.minCoeff(), emax = ev.maxCoeff();
  require(e_target > emin && e_target < emax,
          "gibbs_state: target energy outside spectral range");

  // average energy at inverse temperature lambda, on the spectrum
  auto energy = [&](double lambda) {
    // shift by emin for numerical stability of exp
    double z = 0, ez = 0;
    for (int i = 0; i < ev.size(); ++i) {
      const double w = std::exp(-lambda * (ev(i) - emin));
      z += w;
      ez += w * ev(i);
    }
    return ez / z;
  };

  // tr[T_lambda H] is monotone decreasing in lambda; expand bracket
  double lo = -1.0, hi = 1.0;
  while (energy(lo) < e_target) lo *= 2.0;
  while (energy(hi) > e_target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (energy(mid) > e_target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < rel_tol * std::max(1.0, std::abs(hi))) break;
  }
  const double lambda = 0.5 * (lo + hi);

  RealVector w(ev.size());
  for (int i = 0; i < ev.size(); ++i) w(i) = std::exp(-lambda * (ev(i) - emin));
  w /= w.sum();
  Matrix t = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  return {make_state(LinOp{h.space, t}), lambda};
}

double trace_norm(const LinOp& a) {
  require(a.is_hermitian(1e-8),
          "trace_norm: defined for hermitian operators only");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat);
  return es.eigenvalues().cwiseAbs().sum();
}

LinOp commutator(const LinOp& a, const LinOp& b) {
  return {a.space, a.mat * b.mat - b.mat * a.mat};
}

StateOperator evolve(const StateOperator& t, const LinOp& u) {
  StateOperator out;
  out.op = {t.op.space, u.mat * t.op.mat * u.mat.adjoint()};
  for (const auto& c : t.gemenge)
    out.gemenge.push_back({c.weight, LinOp{c.op.space, u.mat * c.op.mat * u.mat.adjoint()}});
  return out;
}

Matrix random_unitary(int dim, SplitMix64& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.next_complex_normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    cx d = r(i, i);
    q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : cx(1, 0);
  }
  return q;
}

Ket random_ket(const HilbertSpace& space, SplitMix64& rng) {
  Vector v(space.dim());
  for (int i = 0; i < v.size(); ++i) v(i) = rng.next_complex_normal();
  return Ket{space, v / v.norm()};
}

LinOp random_hermitian(const HilbertSpace& space, SplitMix64& rng) {
  const int n = space.dim();
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.next_complex_normal();
  return {space, 0.5 * (g + g.adjoint())};
}

StateOperator random_state(const HilbertSpace& space, SplitMix64& rng, int rank) {
  const int n = space.dim();
  if (rank <= 0 || rank > n) rank = n;
  Matrix g(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = rng.next_complex_normal();
  Matrix t = g * g.adjoint();
  t /= t.real().trace();
  return make_state(LinOp{space, t});
}

}  // namespace mepqlab
