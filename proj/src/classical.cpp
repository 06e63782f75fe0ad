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

#include "qexpect/classical.hpp"

#include <array>
#include <cmath>
#include <string>

#include "qexpect/error.hpp"

namespace qexpect {
namespace {

constexpr double kPartitionTol = 1e-9;

void check_distribution(std::span<const double> p, const char* what) {
  if (p.empty()) throw InvalidInput(std::string(what) + ": empty distribution");
  double s = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidInput(std::string(what) + ": negative or non-finite mass");
    s += x;
  }
  if (std::abs(s - 1.0) > kPartitionTol) throw InvalidInput(std::string(what) + ": does not sum to 1");
}

void check_unit_interval(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput(std::string(what) + ": value outside [0, 1]");
  }
}

}  // namespace

double total_probability(const ClassicalConditionalModel& model) {
  check_distribution(model.partition_probs, "total_probability partition");
  if (model.conditionals.size() != model.partition_probs.size()) {
    throw InvalidInput("total_probability: one conditional per partition cell required");
  }
  for (double p : model.partition_probs) {
    if (p <= 0.0) throw InvalidInput("total_probability: partition cell with zero mass");
  }
  check_unit_interval(model.conditionals, "total_probability conditionals");
  double total = 0.0;
  for (std::size_t k = 0; k < model.partition_probs.size(); ++k) {
    total += model.conditionals[k] * model.partition_probs[k];
  }
  return total;
}

std::vector<double> bayes_update(std::span<const double> prior, std::span<const double> likelihoods) {
  check_distribution(prior, "bayes_update prior");
  if (likelihoods.size() != prior.size()) throw InvalidInput("bayes_update: size mismatch");
  check_unit_interval(likelihoods, "bayes_update likelihoods");
  double evidence = 0.0;
  for (std::size_t k = 0; k < prior.size(); ++k) evidence += prior[k] * likelihoods[k];
  if (evidence <= 0.0) throw ImpossibleEvidence("bayes_update: evidence has probability zero");
  std::vector<double> posterior(prior.size());
  for (std::size_t k = 0; k < prior.size(); ++k) posterior[k] = prior[k] * likelihoods[k] / evidence;
  return posterior;
}

ClassicalStep classical_agent_step(std::span<const double> belief, std::span<const double> likelihoods,
                                   std::span<const double> outcome_values) {
  if (outcome_values.size() != belief.size()) throw InvalidInput("classical_agent_step: size mismatch");
  ClassicalStep step{bayes_update(belief, likelihoods), 0.0};
  for (std::size_t k = 0; k < step.belief.size(); ++k) step.expected_direction += step.belief[k] * outcome_values[k];
  return step;
}

ClassicalStep classical_agent_step(std::span<const double> belief, std::span<const double> likelihoods) {
  static constexpr std::array<double, 2> kUpDown{1.0, -1.0};
  return classical_agent_step(belief, likelihoods, kUpDown);
}

}  // namespace qexpect
