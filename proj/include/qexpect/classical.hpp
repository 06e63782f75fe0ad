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
#include <vector>

namespace qexpect {

// Disjoint partition {B_k} of the sample space with p(B_k) and p(A | B_k).
struct ClassicalConditionalModel {
  std::vector<double> partition_probs;
  std::vector<double> conditionals;
};

// Sum_k p(A | B_k) p(B_k). Throws InvalidInput when the partition does not sum
// to 1 within 1e-9, has a non-positive cell, or a conditional lies outside
// [0, 1].
double total_probability(const ClassicalConditionalModel& model);

// posterior_k = prior_k L_k / Sum_m prior_m L_m. Throws ImpossibleEvidence when
// the evidence probability is zero.
std::vector<double> bayes_update(std::span<const double> prior, std::span<const double> likelihoods);

struct ClassicalStep {
  std::vector<double> belief;
  double expected_direction;
};

// Bayes update followed by the belief-weighted mean of `outcome_values`.
ClassicalStep classical_agent_step(std::span<const double> belief, std::span<const double> likelihoods,
                                   std::span<const double> outcome_values);
// Two-state form over {+1, -1}.
ClassicalStep classical_agent_step(std::span<const double> belief, std::span<const double> likelihoods);

}  // namespace qexpect
