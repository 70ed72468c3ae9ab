// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef MEPQLAB_HILBERT_HPP
#define MEPQLAB_HILBERT_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mepqlab/common.hpp"

namespace mepqlab {

/// Finite-dimensional Hilbert space with a tensor-factor structure.
/// Total dimension is the product of the factor dimensions; factor labels
/// must be unique within one space.
struct HilbertSpace {
  std::vector<int> dims;
  std::vector<std::string> labels;

  HilbertSpace() = default;
  HilbertSpace(std::vector<int> d, std::vector<std::string> l);

  static HilbertSpace single(int d, const std::string& label = "H");

  int dim() const;
  int n_factors() const { return static_cast<int>(dims.size()); }
  bool same_as(const HilbertSpace& other) const;
};

struct Ket {
  HilbertSpace space;
  Vector amp;

  double norm() const { return amp.norm(); }
  Ket normalized() const;
};

struct LinOp {
  HilbertSpace space;
  Matrix mat;

  bool is_hermitian(double tol = kHermTol) const;
  LinOp adjoint() const { return {space, mat.adjoint()}; }
};

/// Positive unit-trace hermitian operator, optionally carrying the convex
/// decomposition fixed by the preparation (gemenge). The decomposition is
/// extra information: recombining it must reproduce `op`.
struct StateOperator {
  struct Component {
    double weight;
    LinOp op;
  };

  LinOp op;
  std::vector<Component> gemenge;  // empty = no decomposition recorded

  int dim() const { return op.space.dim(); }
};

struct SpinOps {
  LinOp s1, s2, s3;
  double hbar;
};

// --- constructors / validation ---------------------------------------------

LinOp identity(const HilbertSpace& space);
Ket basis_ket(const HilbertSpace& space, int index);
LinOp projector(const Ket& phi);

/// Validates positivity (eigenvalues >= -1e-10, clipped and renormalized)
/// and unit trace; throws on larger violations.
StateOperator make_state(const LinOp& op);
StateOperator make_state(const Ket& phi);
StateOperator make_gemenge(const std::vector<std::pair<double, StateOperator>>& parts);

/// Spin matrices for spin s (2s+1 levels); s = 0.5 reproduces the standard
/// Pauli form exactly.
SpinOps spin_ops(double s, double hbar);

// --- algebra ----------------------------------------------------------------

Ket tensor(const Ket& a, const Ket& b);
LinOp tensor(const LinOp& a, const LinOp& b);
StateOperator tensor(const StateOperator& a, const StateOperator& b);

/// Partial trace keeping the listed factors (0-based positions, ascending
/// output order as listed).
StateOperator partial_trace(const StateOperator& w, const std::vector<int>& keep);
Matrix partial_trace_matrix(const Matrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep);

enum class SymKind { symmetric, antisymmetric };

/// Permutation operator g on an n-factor space of equal factor dims:
/// g(psi_1 x ... x psi_n) = psi_{g(1)} x ... x psi_{g(n)}.
LinOp permutation_operator(const HilbertSpace& space, const std::vector<int>& perm);

/// Projector onto the (anti)symmetric subspace of n equal factors.
LinOp symmetrizer(const HilbertSpace& space, SymKind kind);

double von_neumann_entropy(const StateOperator& t);

double variance(const LinOp& a, const StateOperator& t);

/// C(A,B,T) per the commuting-observable correlation formula; requires
/// [A,B] = 0 within tol and nonzero variances.
double normalized_correlation(const LinOp& a, const LinOp& b, const StateOperator& t);

/// Gibbs state e^{-lambda H}/Z with tr[T H] = e_target, solved by bisection
/// on the monotone map lambda -> tr[T_lambda H].
std::pair<StateOperator, double> gibbs_state(const LinOp& h, double e_target,
                                             double rel_tol = 1e-12);

/// Sum of |eigenvalues|; defined for hermitian operators only.
double trace_norm(const LinOp& a);

LinOp commutator(const LinOp& a, const LinOp& b);

/// Unitary evolution of a state; maps gemenge components individually
/// (preparation mixing commutes with dynamics).
StateOperator evolve(const StateOperator& t, const LinOp& u);

Matrix hermitian_exp(const Matrix& h, double scale);  // exp(scale * h)

Matrix random_unitary(int dim, SplitMix64& rng);
Ket random_ket(const HilbertSpace& space, SplitMix64& rng);
LinOp random_hermitian(const HilbertSpace& space, SplitMix64& rng);
StateOperator random_state(const HilbertSpace& space, SplitMix64& rng, int rank = 0);

}  // namespace mepqlab

#endif
