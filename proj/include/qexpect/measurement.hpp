// Copyright 2026 The qexpect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "qexpect/hilbert.hpp"

namespace qexpect {

struct OutcomeProbability {
  double outcome;
  double probability;
};

// One entry per distinct outcome, in the observable's outcome order
// (descending eigenvalue).
struct OutcomeDistribution {
  std::vector<OutcomeProbability> entries;

  // Throws InvalidInput when the outcome is absent.
  double probability_of(double outcome) const;
  double total() const;
};

struct JointEntry {
  double first;   // outcome of the observable measured first
  double second;  // outcome of the observable measured second
  double probability;
};

// Probabilities of ordered outcome pairs for a measurement of `first_name`
// followed by `second_name`. Rows are first-major in outcome order.
struct JointTable {
  std::string first_name;
  std::string second_name;
  std::vector<JointEntry> rows;

  double probability(double first, double second) const;
  double total() const;
  // Sum over the second outcome, in first-outcome order.
  OutcomeDistribution first_marginal() const;
};

struct InterferenceReport {
  double p_direct;
  double p_classical_sum;
  double interference;  // p_direct - p_classical_sum
};

struct UncertaintyReport {
  double delta_a;
  double delta_b;
  double product;          // delta_a * delta_b
  double robertson_bound;  // |<[A,B]>| / 2
};

// ||Pi psi||^2, clamped into [0, 1].
double born_probability(const StateVector& psi, const Projector& proj);

OutcomeDistribution born_distribution(const StateVector& psi, const Observable& obs);

// born_distribution(evolve(psi, h, t), obs).
OutcomeDistribution evolved_born(const StateVector& psi, const Hamiltonian& h, double t,
                                 const Observable& obs);

// Lüders update Pi psi / ||Pi psi||. Throws ImpossibleOutcome when
// ||Pi psi||^2 < 1e-12.
StateVector collapse(const StateVector& psi, const Projector& proj);

// |<a|b>|^2; symmetric in its arguments.
double transition_probability(const StateVector& a, const StateVector& b);

// T(k, m) = |<a_k|b_m>|^2 over the eigenvectors of two observables. Doubly
// stochastic for any pair of orthonormal bases.
Eigen::MatrixXd transition_matrix(const Observable& a, const Observable& b);

// p(alpha, beta) = p_first(alpha) * p(beta | collapsed onto alpha).
// Zero-probability first outcomes give zero rows without collapsing.
JointTable sequential_joint(const StateVector& psi, const Observable& first, const Observable& second);

// max over (alpha, beta) of |p_ij(alpha, beta) - p_ji(beta, alpha)| where
// `ij` measures i first and `ji` measures j first.
double order_effect(const JointTable& ij, const JointTable& ji);
double order_effect(const StateVector& psi, const Observable& obs_i, const Observable& obs_j);

// Direct probability of `target` against the classical total-probability sum
// over the branches of `partition`. The partition projectors must sum to the
// identity within kInputTol, otherwise InvalidInput.
InterferenceReport interference_term(const StateVector& psi, const Projector& target,
                                     std::span<const Projector> partition);
InterferenceReport interference_term(const StateVector& psi, const Projector& target,
                                     const Observable& partition);

// Standard deviations of A and B in psi and the Robertson lower bound
// |<psi|[A,B]|psi>| / 2.
UncertaintyReport uncertainty_product(const StateVector& psi, const Observable& a, const Observable& b);

}  // namespace qexpect
