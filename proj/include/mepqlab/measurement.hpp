// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef MEPQLAB_MEASUREMENT_HPP
#define MEPQLAB_MEASUREMENT_HPP

#include <string>
#include <vector>

#include "mepqlab/hilbert.hpp"

namespace mepqlab {

/// Measurement coupling data: system eigenstructure, apparatus ready/pointer
/// states, and target vectors. Targets must satisfy <phi~_kl | phi~_kj> =
/// delta_lj within each eigenvalue group.
struct BCLSpec {
  int dim_s = 2;
  int dim_a = 2;
  std::vector<double> eigenvalues;            // o_k, distinct
  std::vector<std::vector<Vector>> eigvecs;   // phi_kl, grouped by k
  std::vector<std::vector<Vector>> targets;   // phi~_kl, same layout
  Vector psi;                                 // apparatus ready state
  std::vector<Vector> pointer;                // psi_k, orthonormal, _|_ psi

  int n_outcomes() const { return static_cast<int>(eigenvalues.size()); }
  void validate(double tol = 1e-9) const;
  /// von Neumann coupling: targets equal eigenvectors
  static BCLSpec von_neumann(const std::vector<double>& eigenvalues,
                             const std::vector<std::vector<Vector>>& eigvecs,
                             int dim_a);
  /// random spec: random eigenbasis, random isometry targets
  static BCLSpec random(int dim_s, int n_groups, SplitMix64& rng,
                        bool von_neumann = false);
};

struct PremeasurementResult {
  Ket phi_end;                    // on H_S x H_A
  std::vector<double> p;          // outcome probabilities
  std::vector<Vector> phi1;       // conditional system kets (unit, or zero if p_k = 0)
  StateOperator apparatus_state;  // partial trace over the system
  double defect;                  // distance from the gemenge target
  bool probability_reproducible;  // tr[T E_k] = pointer distribution
  bool composite_pure;
  bool objectified;               // definite single outcome
};

/// Unitary extension of phi_kl x psi -> phi~_kl x psi_k; the completion on
/// the orthogonal complement is an arbitrary isometry selected by
/// `completion_seed` (results on the physical domain are independent of it).
LinOp build_unitary(const BCLSpec& spec, std::uint64_t completion_seed = 0);

PremeasurementResult premeasure(const BCLSpec& spec, const Ket& phi);

/// Kraus operators K_k = sum_l |phi~_kl><phi_kl|.
struct StateTransformer {
  std::vector<Matrix> K;

  /// I(X)(T) = sum_{k in X} K_k T K_k^dagger (unnormalized)
  Matrix apply(const std::vector<int>& outcome_set, const Matrix& t) const;
  double completeness_defect() const;  // || sum K^dag K - 1 ||_max
};

StateTransformer state_transformer(const BCLSpec& spec);

struct RepeatabilityReport {
  bool repeatable;
  double max_violation;
};

/// Checks K_l K_k = delta_kl K_k entrywise and the trace identity
/// tr[I(Y)(I(X)(T))] = tr[I(Y n X)(T)] on random states and outcome sets.
RepeatabilityReport repeatability_check(const StateTransformer& tr,
                                        int trials = 20, std::uint64_t seed = 1,
                                        double tol = 1e-12);

// --- modified model with identical particles ---------------------------------

/// Detector array with identical-particle pollution. Single-particle labels
/// are split into disjoint blocks, one per detector; detector k holds M_k
/// pollution particles (0 or 1 at desk scale) in state T_k supported on its
/// block, and fires into the ionisation state sum_n a_n chi_kn.
struct TriggerModel {
  int d = 4;            // single-particle dimension
  int n_detectors = 2;  // N
  int epsilon = 1;      // +1 bosons, -1 fermions
  std::vector<int> block_lo, block_hi;  // label block [lo, hi) per detector
  std::vector<int> M;                   // pollution count per detector (0/1)
  std::vector<Matrix> T_pollution;      // d x d, supported on own block (M_k = 1)
  std::vector<Vector> eigvecs;          // measured-observable eigenvectors phi_k
  std::vector<Vector> targets;          // trigger-stage states phi1_k, on own block
  std::vector<double> a_amp;            // trigger amplitudes a_n, sum |a|^2 = 1
  int ion_levels = 3;                   // per-detector ionisation levels incl. 0

  void validate(double tol = 1e-9) const;
  int matter_dim() const;     // d^(1 + sum M_k) arranged (sys, poll_1.., poll_N)
  int apparatus_dim() const;  // ion_levels^N
  /// product trigger vector psi_k in the ionisation basis
  Vector pointer_vector(int k) const;
  Vector ready_vector() const;
  static TriggerModel random(int d, int n_detectors, int epsilon,
                             SplitMix64& rng, int ion_levels = 3);
};

/// One operator on matter x apparatus stored in factored block form:
/// sum of (matter matrix) x (apparatus matrix) terms.
struct FactoredOperator {
  struct Term {
    Matrix matter;
    Matrix apparatus;
  };
  std::vector<Term> terms;

  double trace() const;
  /// tr[(B_matter x B_app) * this]
  cx trace_against(const Matrix& b_matter, const Matrix& b_app) const;
  Matrix apparatus_marginal() const;  // partial trace over matter
};

struct TriggerStates {
  std::vector<double> p;        // Born probabilities of the input ket
  std::vector<Vector> phi1;     // conditional system states
  std::vector<double> nu;       // normalization 1/sqrt(tr W_kk)
  Matrix w_trace;               // tr[W_kl] (N x N, complex)
  FactoredOperator trig1;       // maximal entanglement attempt (trace reported)
  double trig1_trace;
  FactoredOperator trig2;       // minimal entanglement (Eq.-level state)
  FactoredOperator trig3;       // diagonal part of trig2
  FactoredOperator trig;        // Rule-17 gemenge
  std::vector<double> gemenge_weights;  // of trig (= p)
};

/// Builds W_kl on the extended space, the four trigger-stage operators and
/// the gemenge structure; throws on Pauli-blocked configurations
/// (tr[W_kk] ~ 0). `build_states` disabled leaves only p, phi1, nu and the
/// W traces (cheap path for randomized sweeps); trig1 assembly is the most
/// expensive piece and can be skipped separately.
TriggerStates trigger_states(const TriggerModel& model, const Ket& phi,
                             bool build_states = true, bool build_trig1 = true);

struct Prop23Report {
  double max_commuting_dev;      // max |tr[B T2] - tr[B T3]| over commuting B
  double min_noncommuting_dev;   // smallest deviation seen among control B
  int noncommuting_detected;     // count of control trials with dev > 1e-3
  int trials;
};

Prop23Report prop23_check(const TriggerModel& model, const TriggerStates& ts,
                          int trials, std::uint64_t seed, bool parallel = true);

// --- JSON interfaces ----------------------------------------------------------

std::string bcl_spec_to_json(const BCLSpec& spec);
BCLSpec bcl_spec_from_json(const std::string& text);

struct BCLReport {
  std::vector<double> p;
  double defect;
  bool repeatable;
  double prop22_max;
  double prop23_max;
};

std::string bcl_report_to_json(const BCLReport& report);

}  // namespace mepqlab

#endif
