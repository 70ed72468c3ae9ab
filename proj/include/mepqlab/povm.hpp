// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef MEPQLAB_POVM_HPP
#define MEPQLAB_POVM_HPP

#include <optional>
#include <string>
#include <vector>

#include "mepqlab/hilbert.hpp"

namespace mepqlab {

/// Positive operator bounded by the identity (0 <= E <= 1).
struct Effect {
  LinOp op;

  bool is_projection(double tol = 1e-9) const;
  static Effect checked(const LinOp& op, double tol = 1e-8);
};

/// Outcome labels are real tuples mirroring value spaces Omega in R^n;
/// `value_dim` is the tuple length shared by all outcomes.
struct DiscretePOVM {
  int value_dim = 1;
  std::vector<std::vector<double>> outcomes;
  std::vector<Effect> effects;

  int n_outcomes() const { return static_cast<int>(effects.size()); }
  /// Checks positivity of every effect and normalization sum(E) = 1.
  void validate(double tol = 1e-9) const;
  bool is_projective(double tol = 1e-9) const;
};

struct JointVerdict {
  enum class Status { jointly_measurable, unknown };
  Status status = Status::unknown;
  // witness decomposition E1 = E1' + E12', E2 = E2' + E12'
  std::optional<Effect> e1p, e2p, e12p;
};

double probability(const DiscretePOVM& povm, const StateOperator& t,
                   const std::vector<int>& outcome_subset);
double probability(const DiscretePOVM& povm, const StateOperator& t, int outcome);

/// True with eigenvalue a iff E T = a T within tol; a = 1 is the
/// predictable-outcome case tr[T E] = 1.
std::pair<bool, double> is_eigenstate(const Effect& e, const StateOperator& t,
                                      double tol = 1e-9);

/// Decides joint measurability by the two sufficient conditions (commuting
/// projections; sum bounded by 1). Anything else is honestly "unknown".
JointVerdict jointly_measurable(const Effect& e1, const Effect& e2,
                                double tol = 1e-9);

/// Compound of two commuting sharp observables: effects are the operator
/// products, outcomes the label pairs.
DiscretePOVM compound(const DiscretePOVM& a, const DiscretePOVM& b,
                      double tol = 1e-8);

struct UncertaintyReport {
  double lhs;  // dA * dB
  double rhs;  // |<[A,B]>| / 2
  bool holds;
};

UncertaintyReport uncertainty_check(const LinOp& a, const LinOp& b,
                                    const StateOperator& t, double tol = 1e-10);

/// Sharp observable from a hermitian operator: one effect per distinct
/// eigenvalue (degenerate levels merged at `degeneracy_tol`).
DiscretePOVM sharp_povm(const LinOp& a, double degeneracy_tol = 1e-9);

std::string povm_to_json(const DiscretePOVM& povm);
DiscretePOVM povm_from_json(const std::string& text, const HilbertSpace& space);

}  // namespace mepqlab

#endif
