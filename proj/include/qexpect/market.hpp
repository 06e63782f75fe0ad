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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qexpect/hilbert.hpp"
#include "qexpect/measurement.hpp"
#include "qexpect/rng.hpp"

namespace qexpect {

enum class PopulationKind { quantum, classical };

// Agents sharing one initial belief state. For classical populations the
// belief is a distribution over the price observable's eigenvectors; when
// `classical_belief` is empty it defaults to the Born weights of
// `initial_state`.
struct AgentPopulation {
  std::string name;
  std::size_t count = 1;
  StateVector initial_state = StateVector::basis(2, 0);
  PopulationKind kind = PopulationKind::quantum;
  std::vector<double> classical_belief;
};

// Information arriving between two measurements: agents evolve under
// `hamiltonian` for `duration`. `observable` replaces the scenario's price
// observable for this period only. `classical_likelihoods` replaces the
// default news-to-likelihood mapping L_k = |<e_k|U|e_k>|^2.
struct NewsEntry {
  Hamiltonian hamiltonian = Hamiltonian::zero(2);
  double duration = 0.0;
  std::optional<Observable> observable;
  std::optional<std::vector<double>> classical_likelihoods;
};

struct Scenario {
  std::uint64_t seed = 0;
  std::vector<AgentPopulation> populations;
  // One entry (repeated every period) or exactly `periods` entries.
  std::vector<NewsEntry> news;
  Observable price_observable = qexpect::price_observable();
  double impact = 0.0;
  double initial_price = 100.0;
  std::size_t periods = 1;
};

// Throws InvalidInput naming the offending field.
void validate(const Scenario& scenario);

struct PricePeriod {
  double price_open;
  double up_fraction;
  double down_fraction;
  double price_close;
};

// Comparison series of the classical populations for one period.
struct ClassicalPeriod {
  double up_fraction;
  double down_fraction;
  double expected_direction;
  double price_close;
};

struct PricePath {
  double initial_price = 0.0;
  std::vector<PricePeriod> periods;
  std::vector<ClassicalPeriod> classical;  // empty without classical populations
};

// Price left (0, inf); carries every completed period.
class SimulationHalt : public std::runtime_error {
 public:
  SimulationHalt(const std::string& what, PricePath partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const PricePath& partial() const { return partial_; }

 private:
  PricePath partial_;
};

struct RunOptions {
  unsigned threads = 1;
};

struct Measurement {
  double outcome;
  StateVector post_state;
};

// Inverse-CDF draw over the outcomes in descending eigenvalue order, then
// Lüders collapse. Outcomes with ||Pi psi||^2 < 1e-12 are never drawn.
Measurement sample_measurement(const StateVector& psi, const Observable& obs, CounterRng& rng);

enum class MeasurementOrder { i_then_j, j_then_i };

// Empirical outcome frequencies; agent k draws from CounterRng(seed, k).
// Throws InvalidInput for a classical population.
OutcomeDistribution run_ensemble(const AgentPopulation& population, const Observable& obs, std::uint64_t seed,
                                 RunOptions options = {});

// Each agent measures both observables in the given order with collapse in
// between. The table is keyed (first measured, second measured).
JointTable run_sequential_ensemble(const AgentPopulation& population, const Observable& obs_i,
                                   const Observable& obs_j, MeasurementOrder order, std::uint64_t seed,
                                   RunOptions options = {});

// Classical two-stage sampler: first outcome k from `prior`, second outcome m
// from row k of `conditionals` (row-stochastic).
JointTable run_classical_sequential_ensemble(std::size_t count, std::span<const double> prior,
                                             const Eigen::MatrixXd& conditionals,
                                             std::span<const double> first_values,
                                             std::span<const double> second_values, std::uint64_t seed);

// Per period: evolve every quantum agent, measure the period's price
// observable, aggregate f+ and f-, and set
// price_close = price_open * (1 + impact * (f+ - f-)).
// Bit-identical output for any thread count.
PricePath run_market(const Scenario& scenario, RunOptions options = {});

// Threads requested through QEXPECT_THREADS, or 1 when unset/invalid.
unsigned threads_from_environment();

}  // namespace qexpect
