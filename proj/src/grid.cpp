// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include "mepqlab/grid.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mepqlab {

Grid1D::Grid1D(double x0_, double dx_, int n_, double hbar_)
    : x0(x0_), dx(dx_), n(n_), hbar(hbar_) {
  require(n >= 8, "Grid1D: n must be >= 8");
  require(dx > 0 && hbar > 0, "Grid1D: dx and hbar must be positive");
}

HilbertSpace Grid1D::space(const std::string& label) const {
  return HilbertSpace::single(n, label);
}

bool Grid1D::same_as(const Grid1D& g) const {
  return x0 == g.x0 && dx == g.dx && n == g.n && hbar == g.hbar;
}

double GridWavefunction::norm() const {
  return std::sqrt(grid.dx) * values.norm();
}

GridWavefunction GridWavefunction::normalized() const {
  const double nn = norm();
  require(nn > 0, "GridWavefunction: zero norm");
  return {grid, values / nn};
}

Ket GridWavefunction::to_ket() const {
  return {grid.space(), std::sqrt(grid.dx) * values};
}

GridWavefunction GridWavefunction::from_ket(const Grid1D& grid, const Ket& k) {
  return {grid, k.amp / std::sqrt(grid.dx)};
}

double GridWavefunction2::norm() const { return grid.dx * values.norm(); }

int RegionMask::count() const {
  int c = 0;
  for (bool b : indicator) c += b ? 1 : 0;
  return c;
}

bool RegionMask::disjoint_from(const RegionMask& other) const {
  for (size_t i = 0; i < indicator.size(); ++i)
    if (indicator[i] && other.indicator[i]) return false;
  return true;
}

RegionMask RegionMask::interval(const Grid1D& grid, double lo, double hi) {
  RegionMask m{grid, std::vector<bool>(grid.n, false)};
  for (int i = 0; i < grid.n; ++i)
    if (grid.x(i) >= lo && grid.x(i) < hi) m.indicator[i] = true;
  return m;
}

GridWavefunction KernelOp::apply(const GridWavefunction& psi) const {
  require(grid.same_as(psi.grid), "KernelOp: grid mismatch");
  return {grid, grid.dx * (k * psi.values)};
}

LinOp KernelOp::to_linop(const std::string& label) const {
  return {grid.space(label), grid.dx * k};
}

KernelOp KernelOp::from_linop(const Grid1D& grid, const LinOp& a) {
  return {grid, a.mat / grid.dx};
}

KernelOp KernelOp::position(const Grid1D& grid) {
  Matrix k = Matrix::Zero(grid.n, grid.n);
  for (int i = 0; i < grid.n; ++i) k(i, i) = grid.x(i) / grid.dx;
  return {grid, k};
}

KernelOp KernelOp::identity(const Grid1D& grid) {
  return {grid, Matrix::Identity(grid.n, grid.n) / grid.dx};
}

GridWavefunction2 SymmetricObservable::apply(const GridWavefunction2& psi) const {
  const double dx = a.grid.dx;
  Matrix out = dx * (a.k * psi.values) + dx * (psi.values * a.k.transpose());
  return {a.grid, out};
}

double SymmetricObservable::expectation(const GridWavefunction2& psi) const {
  const GridWavefunction2 ap = apply(psi);
  const double dx2 = a.grid.dx * a.grid.dx;
  return (dx2 * (psi.values.conjugate().cwiseProduct(ap.values)).sum()).real();
}

Matrix SymmetricObservable::dense() const {
  const int n = a.grid.n;
  require(n <= 64, "SymmetricObservable::dense: grid too large");
  const Matrix al2 = a.grid.dx * a.k;  // l2 one-particle matrix
  const Matrix id = Matrix::Identity(n, n);
  Matrix out(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.block(i * n, j * n, n, n) = al2(i, j) * id + (i == j ? 1.0 : 0.0) * al2;
  return out;
}

Fourier::Fourier(const Grid1D& g) : grid(g), f(g.n, g.n) {
  // psi_hat(p_j) = dx/sqrt(2 pi hbar) * sum_k exp(-i p_j x_k / hbar) psi(x_k)
  // scaled so that sum_j |psi_hat|^2 dp = sum_k |psi|^2 dx exactly.
  const double norm = grid.dx / std::sqrt(2.0 * M_PI * grid.hbar);
  for (int j = 0; j < grid.n; ++j)
    for (int k = 0; k < grid.n; ++k)
      f(j, k) = norm * std::exp(cx(0, -grid.p(j) * grid.x(k) / grid.hbar));
}

Vector Fourier::forward(const Vector& pos) const { return f * pos; }

Vector Fourier::inverse(const Vector& mom) const {
  // unitary inverse: F^dagger * (dp/dx) scaling; with the chosen norm the
  // matrix dp/dx * F^dagger is the exact inverse
  return (grid.dp() / grid.dx) * (f.adjoint() * mom);
}

Matrix Fourier::forward2d(const Matrix& pos) const {
  return f * pos * f.transpose();
}

Matrix Fourier::inverse2d(const Matrix& mom) const {
  const double s = grid.dp() / grid.dx;
  return s * s * (f.adjoint() * mom * f.conjugate());
}

static void check_partition(const std::vector<Interval>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    require(cells[i].hi > cells[i].lo, "cells: empty interval");
    for (size_t j = i + 1; j < cells.size(); ++j) {
      const bool disjoint =
          cells[i].hi <= cells[j].lo || cells[j].hi <= cells[i].lo;
      require(disjoint, "cells: overlapping intervals");
    }
  }
}

DiscretePOVM position_pvm(const Grid1D& grid, const std::vector<Interval>& cells) {
  check_partition(cells);
  DiscretePOVM out;
  out.value_dim = 1;
  std::vector<bool> covered(grid.n, false);
  for (const auto& c : cells) {
    Matrix e = Matrix::Zero(grid.n, grid.n);
    for (int i = 0; i < grid.n; ++i)
      if (grid.x(i) >= c.lo && grid.x(i) < c.hi) {
        e(i, i) = 1.0;
        covered[i] = true;
      }
    out.outcomes.push_back({0.5 * (c.lo + c.hi)});
    out.effects.push_back(Effect{{grid.space(), e}});
  }
  for (bool b : covered) require(b, "position_pvm: cells do not cover the grid");
  out.validate(1e-12);
  return out;
}

DiscretePOVM momentum_pvm(const Grid1D& grid, const std::vector<Interval>& cells) {
  check_partition(cells);
  const Fourier fr(grid);
  DiscretePOVM out;
  out.value_dim = 1;

  // Edge snapping: the partition's outer edges snap outward (floor on the
  // global left, ceil on the global right) so coverage never shrinks;
  // interior edges snap to the nearest lattice point, consistently for the
  // two cells that share them.
  double gmin = cells[0].lo, gmax = cells[0].hi;
  for (const auto& c : cells) {
    gmin = std::min(gmin, c.lo);
    gmax = std::max(gmax, c.hi);
  }
  auto snap = [&](double edge) {
    if (edge <= gmin) return std::floor(edge / grid.dp()) * grid.dp();
    if (edge >= gmax) return std::ceil(edge / grid.dp()) * grid.dp();
    return std::round(edge / grid.dp()) * grid.dp();
  };

  std::vector<bool> covered(grid.n, false);
  for (const auto& c : cells) {
    const double lo = snap(c.lo);
    const double hi = snap(c.hi);
    Vector mask = Vector::Zero(grid.n);
    for (int i = 0; i < grid.n; ++i)
      if (grid.p(i) >= lo && grid.p(i) < hi) {
        mask(i) = 1.0;
        covered[i] = true;
      }
    // E = Finv diag(mask) F, with Finv the exact unitary inverse
    Matrix e = (grid.dp() / grid.dx) *
               (fr.f.adjoint() * mask.asDiagonal() * fr.f);
    out.outcomes.push_back({0.5 * (lo + hi)});
    out.effects.push_back(Effect{{grid.space(), e}});
  }
  for (bool b : covered)
    require(b, "momentum_pvm: cells do not cover the momentum lattice");
  out.validate(1e-9);
  return out;
}

GridWavefunction shift(const GridWavefunction& psi, double a) {
  const Fourier fr(psi.grid);
  Vector mom = fr.forward(psi.values);
  for (int i = 0; i < psi.grid.n; ++i)
    mom(i) *= std::exp(cx(0, -psi.grid.p(i) * a / psi.grid.hbar));
  return {psi.grid, fr.inverse(mom)};
}

GridWavefunction boost(const GridWavefunction& psi, double mu_v) {
  Vector v = psi.values;
  for (int i = 0; i < psi.grid.n; ++i)
    v(i) *= std::exp(cx(0, mu_v * psi.grid.x(i) / psi.grid.hbar));
  return {psi.grid, v};
}

double position_mean(const GridWavefunction& psi) {
  double acc = 0;
  for (int i = 0; i < psi.grid.n; ++i)
    acc += psi.grid.x(i) * std::norm(psi.values(i));
  return acc * psi.grid.dx;
}

double position_variance(const GridWavefunction& psi) {
  const double m = position_mean(psi);
  double acc = 0;
  for (int i = 0; i < psi.grid.n; ++i) {
    const double d = psi.grid.x(i) - m;
    acc += d * d * std::norm(psi.values(i));
  }
  return acc * psi.grid.dx;
}

double momentum_mean(const GridWavefunction& psi) {
  const Fourier fr(psi.grid);
  Vector mom = fr.forward(psi.values);
  double acc = 0;
  for (int i = 0; i < psi.grid.n; ++i)
    acc += psi.grid.p(i) * std::norm(mom(i));
  return acc * psi.grid.dp();
}

double momentum_variance(const GridWavefunction& psi) {
  const Fourier fr(psi.grid);
  Vector mom = fr.forward(psi.values);
  double mean = 0, sq = 0;
  for (int i = 0; i < psi.grid.n; ++i) {
    const double w = std::norm(mom(i)) * psi.grid.dp();
    mean += psi.grid.p(i) * w;
    sq += psi.grid.p(i) * psi.grid.p(i) * w;
  }
  return sq - mean * mean;
}

GridWavefunction gaussian_packet(const Grid1D& grid, double q, double p, double dq) {
  Vector v(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    v(i) = std::exp(cx(-(x - q) * (x - q) / (4.0 * dq * dq),
                       p * x / grid.hbar));
  }
  GridWavefunction psi{grid, v};
  return psi.normalized();
}

KernelOp d_localise(const KernelOp& a, const RegionMask& d) {
  require(a.grid.same_as(d.grid), "d_localise: grid mismatch");
  require(d.count() > 0, "d_localise: empty mask");
  Matrix k = a.k;
  for (int i = 0; i < a.grid.n; ++i)
    if (!d.indicator[i]) {
      k.row(i).setZero();
      k.col(i).setZero();
    }
  return {a.grid, k};
}

bool is_d_local(const KernelOp& a, const RegionMask& d, double tol) {
  for (int i = 0; i < a.grid.n; ++i)
    if (!d.indicator[i]) {
      if (a.k.row(i).cwiseAbs().maxCoeff() > tol) return false;
      if (a.k.col(i).cwiseAbs().maxCoeff() > tol) return false;
    }
  return true;
}

std::pair<GridWavefunction2, double> symmetrize_pair(const GridWavefunction& psi,
                                                     const GridWavefunction& phi,
                                                     int epsilon) {
  require(psi.grid.same_as(phi.grid), "symmetrize_pair: grid mismatch");
  require(epsilon == 1 || epsilon == -1, "symmetrize_pair: epsilon must be +-1");
  const cx c = psi.grid.dx * psi.values.dot(phi.values);  // <psi|phi>
  const double denom = 2.0 * (1.0 + epsilon * std::norm(c));
  require(denom > 1e-12,
          "symmetrize_pair: zero vector (Pauli exclusion for epsilon = -1)");
  const double nu = 1.0 / std::sqrt(denom);
  Matrix v = psi.values * phi.values.transpose() +
             static_cast<double>(epsilon) * phi.values * psi.values.transpose();
  return {{psi.grid, nu * v}, nu};
}

SymmetricObservable symmetric_observable(const KernelOp& a) { return {a}; }

ClusterSeparabilityReport cluster_separability_check(
    const StateOperator& t1, const RegionMask& d1, const StateOperator& t2,
    const RegionMask& d2, const Effect& e, int epsilon, double tol) {
  const Grid1D& g = d1.grid;
  require(g.same_as(d2.grid), "cluster check: grid mismatch");
  require(d1.disjoint_from(d2), "cluster check: masks overlap");
  require(is_d_local(KernelOp::from_linop(g, t1.op), d1, 1e-10),
          "cluster check: T1 not D-local");
  require(is_d_local(KernelOp::from_linop(g, t2.op), d2, 1e-10),
          "cluster check: T2 not D'-local");
  require(is_d_local(KernelOp::from_linop(g, e.op), d1, 1e-10),
          "cluster check: E not D-local");

  // spectral decompositions; the symmetrized pair state is assembled from
  // two-particle vectors, never as a dense n^2 x n^2 operator
  Eigen::SelfAdjointEigenSolver<Matrix> es1(t1.op.mat), es2(t2.op.mat);
  const Matrix& emat = e.op.mat;

  double lhs_num = 0, norm = 0;
  for (int i = 0; i < es1.eigenvalues().size(); ++i) {
    const double li = es1.eigenvalues()(i);
    if (li < 1e-14) continue;
    const Vector u = es1.eigenvectors().col(i);
    for (int j = 0; j < es2.eigenvalues().size(); ++j) {
      const double mj = es2.eigenvalues()(j);
      if (mj < 1e-14) continue;
      const Vector v = es2.eigenvectors().col(j);
      // w = P (u x v), P = (1 + eps S)/2
      Matrix w = 0.5 * (u * v.transpose() +
                        static_cast<double>(epsilon) * v * u.transpose());
      const double w2 = w.squaredNorm();
      const Matrix ew = emat * w;             // (E x 1) w
      const Matrix we = w * emat.transpose(); // (1 x E) w
      lhs_num += li * mj * ((w.conjugate().cwiseProduct(ew)).sum().real() +
                            (w.conjugate().cwiseProduct(we)).sum().real());
      norm += li * mj * w2;
    }
  }
  require(norm > 1e-14, "cluster check: vanishing symmetrized norm");
  const double lhs = lhs_num / norm;
  const double rhs = (emat * t1.op.mat).real().trace();
  return {lhs, rhs, norm, std::abs(lhs - rhs) < tol};
}

// --- CSV --------------------------------------------------------------------

static std::string fmt17(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(16) << v;
  return os.str();
}

void wavefunction_to_csv(const GridWavefunction& psi, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "wavefunction_to_csv: cannot open " + path);
  out << "x,re,im\n";
  for (int i = 0; i < psi.grid.n; ++i)
    out << fmt17(psi.grid.x(i)) << "," << fmt17(psi.values(i).real()) << ","
        << fmt17(psi.values(i).imag()) << "\n";
}

GridWavefunction wavefunction_from_csv(const std::string& path, double hbar) {
  std::ifstream in(path);
  require(in.good(), "wavefunction_from_csv: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> xs;
  std::vector<cx> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string fx, fre, fim;
    std::getline(ls, fx, ',');
    std::getline(ls, fre, ',');
    std::getline(ls, fim, ',');
    xs.push_back(std::stod(fx));
    vals.push_back(cx(std::stod(fre), std::stod(fim)));
  }
  require(xs.size() >= 8, "wavefunction_from_csv: too few samples");
  const double dx = xs[1] - xs[0];
  Grid1D grid(xs[0], dx, static_cast<int>(xs.size()), hbar);
  Vector v(grid.n);
  for (int i = 0; i < grid.n; ++i) v(i) = vals[i];
  return {grid, v};
}

void mask_to_csv(const RegionMask& mask, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "mask_to_csv: cannot open " + path);
  out << "x,indicator\n";
  for (int i = 0; i < mask.grid.n; ++i)
    out << fmt17(mask.grid.x(i)) << "," << (mask.indicator[i] ? 1 : 0) << "\n";
}

RegionMask mask_from_csv(const std::string& path, double hbar) {
  std::ifstream in(path);
  require(in.good(), "mask_from_csv: cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<double> xs;
  std::vector<bool> ind;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string fx, fi;
    std::getline(ls, fx, ',');
    std::getline(ls, fi, ',');
    xs.push_back(std::stod(fx));
    ind.push_back(std::stoi(fi) != 0);
  }
  require(xs.size() >= 8, "mask_from_csv: too few samples");
  Grid1D grid(xs[0], xs[1] - xs[0], static_cast<int>(xs.size()), hbar);
  return {grid, ind};
}

}  // namespace mepqlab
