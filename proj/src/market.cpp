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

#include "qexpect/market.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "qexpect/classical.hpp"
#include "qexpect/error.hpp"

namespace qexpect {
namespace {

constexpr double kImpossibleTol = 1e-12;

// Stream tags keep the draws of different procedures independent.
enum StreamTag : std::uint64_t {
  kEnsembleStream = 1,
  kSequentialStream = 2,
  kMarketQuantumStream = 3,
  kMarketClassicalStream = 4,
  kClassicalJointStream = 5,
};

// Outcome projectors of one observable, built once and reused per draw.
class MeasurementPlan {
 public:
  explicit MeasurementPlan(const Observable& obs) {
    for (const auto& g : obs.outcomes()) {
      values_.push_back(g.value);
      projectors_.push_back(projector_for(obs, g.value).matrix());
    }
  }

  // Draws an outcome index and collapses `psi` in place.
  std::size_t measure(CVector& psi, CounterRng& rng) const {
    const std::size_t n = projectors_.size();
    std::vector<CVector> images(n);
    std::vector<double> weights(n);
    for (std::size_t k = 0; k < n; ++k) {
      images[k] = projectors_[k] * psi;
      const double w = images[k].squaredNorm();
      weights[k] = w < kImpossibleTol ? 0.0 : w;
    }
    std::size_t chosen = n;
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (weights[k] == 0.0) continue;
      cum += weights[k];
      chosen = k;
      if (u < cum) break;
    }
    if (chosen == n) throw InvalidInput("measurement: state has no possible outcome");
    psi = images[chosen] / std::sqrt(weights[chosen]);
    return chosen;
  }

  double value(std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
  std::vector<CMatrix> projectors_;
};

// Splits [0, count) into contiguous chunks, one per thread. `body(begin, end,
// chunk)` must only write chunk-local data.
template <typename Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers == 1) {
    body(std::size_t{0}, count, std::size_t{0});
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t step = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * step);
    const std::size_t end = std::min(count, begin + step);
    pool.emplace_back([&body, begin, end, w] { body(begin, end, w); });
  }
}

std::size_t chunk_count(std::size_t count, unsigned threads) {
  return std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
}

void require_quantum(const AgentPopulation& p) {
  if (p.kind != PopulationKind::quantum) {
    throw InvalidInput("population '" + p.name + "' is classical; use the classical agent pipeline");
  }
  if (p.count < 1) throw InvalidInput("population '" + p.name + "' must have at least one agent");
}

bool is_up_down(const Observable& obs) {
  for (const auto& g : obs.outcomes()) {
    if (g.value != 1.0 && g.value != -1.0) return false;
  }
  return true;
}

void sum_into(std::vector<std::size_t>& total, const std::vector<std::size_t>& part) {
  for (std::size_t k = 0; k < total.size(); ++k) total[k] += part[k];
}

}  // namespace

Measurement sample_measurement(const StateVector& psi, const Observable& obs, CounterRng& rng) {
  if (psi.dim() != obs.dim()) throw InvalidInput("sample_measurement: dimension mismatch");
  const MeasurementPlan plan(obs);
  CVector state = psi.amplitudes();
  const std::size_t k = plan.measure(state, rng);
  return {plan.value(k), StateVector(std::move(state))};
}

OutcomeDistribution run_ensemble(const AgentPopulation& population, const Observable& obs, std::uint64_t seed,
                                 RunOptions options) {
  require_quantum(population);
  if (population.initial_state.dim() != obs.dim()) throw InvalidInput("run_ensemble: dimension mismatch");
  const MeasurementPlan plan(obs);
  const std::size_t chunks = chunk_count(population.count, options.threads);
  std::vector<std::vector<std::size_t>> counts(chunks, std::vector<std::size_t>(plan.size(), 0));
  parallel_chunks(population.count, options.threads, [&](std::size_t begin, std::size_t end, std::size_t c) {
    for (std::size_t agent = begin; agent < end; ++agent) {
      CounterRng rng(seed, agent, 0, kEnsembleStream);
      CVector psi = population.initial_state.amplitudes();
      ++counts[c][plan.measure(psi, rng)];
    }
  });
  std::vector<std::size_t> total(plan.size(), 0);
  for (const auto& part : counts) sum_into(total, part);

  OutcomeDistribution d;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    d.entries.push_back({plan.value(k), static_cast<double>(total[k]) / static_cast<double>(population.count)});
  }
  return d;
}

JointTable run_sequential_ensemble(const AgentPopulation& population, const Observable& obs_i,
                                   const Observable& obs_j, MeasurementOrder order, std::uint64_t seed,
                                   RunOptions options) {
  require_quantum(population);
  if (population.initial_state.dim() != obs_i.dim() || obs_i.dim() != obs_j.dim()) {
    throw InvalidInput("run_sequential_ensemble: dimension mismatch");
  }
  const bool forward = order == MeasurementOrder::i_then_j;
  const Observable& first = forward ? obs_i : obs_j;
  const Observable& second = forward ? obs_j : obs_i;
  const MeasurementPlan plan_first(first);
  const MeasurementPlan plan_second(second);
  const std::size_t n_first = plan_first.size();
  const std::size_t n_second = plan_second.size();
  const std::uint64_t tag = forward ? 0 : 1;

  const std::size_t chunks = chunk_count(population.count, options.threads);
  std::vector<std::vector<std::size_t>> counts(chunks, std::vector<std::size_t>(n_first * n_second, 0));
  parallel_chunks(population.count, options.threads, [&](std::size_t begin, std::size_t end, std::size_t c) {
    for (std::size_t agent = begin; agent < end; ++agent) {
      CounterRng rng(seed, agent, tag, kSequentialStream);
      CVector psi = population.initial_state.amplitudes();
      const std::size_t a = plan_first.measure(psi, rng);
      const std::size_t b = plan_second.measure(psi, rng);
      ++counts[c][a * n_second + b];
    }
  });
  std::vector<std::size_t> total(n_first * n_second, 0);
  for (const auto& part : counts) sum_into(total, part);

  JointTable table{first.name(), second.name(), {}};
  for (std::size_t a = 0; a < n_first; ++a) {
    for (std::size_t b = 0; b < n_second; ++b) {
      table.rows.push_back({plan_first.value(a), plan_second.value(b),
                            static_cast<double>(total[a * n_second + b]) / static_cast<double>(population.count)});
    }
  }
  return table;
}

JointTable run_classical_sequential_ensemble(std::size_t count, std::span<const double> prior,
                                             const Eigen::MatrixXd& conditionals,
                                             std::span<const double> first_values,
                                             std::span<const double> second_values, std::uint64_t seed) {
  if (count < 1) throw InvalidInput("classical ensemble needs at least one agent");
  const std::size_t n_first = prior.size();
  const std::size_t n_second = second_values.size();
  if (first_values.size() != n_first || static_cast<std::size_t>(conditionals.rows()) != n_first ||
      static_cast<std::size_t>(conditionals.cols()) != n_second) {
    throw InvalidInput("classical ensemble: shape mismatch");
  }
  // Validates the prior and every conditional row.
  const std::vector<double> uniform(n_first, 1.0);
  (void)bayes_update(prior, uniform);
  for (std::size_t a = 0; a < n_first; ++a) {
    std::vector<double> row(n_second);
    for (std::size_t b = 0; b < n_second; ++b) row[b] = conditionals(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    (void)bayes_update(row, std::vector<double>(n_second, 1.0));
  }

  auto draw = [](CounterRng& rng, auto&& weight, std::size_t n) {
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t chosen = n;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = weight(k);
      if (w <= 0.0) continue;
      cum += w;
      chosen = k;
      if (u < cum) break;
    }
    return chosen;
  };

  std::vector<std::size_t> counts(n_first * n_second, 0);
  for (std::size_t agent = 0; agent < count; ++agent) {
    CounterRng rng(seed, agent, 0, kClassicalJointStream);
    const std::size_t a = draw(rng, [&](std::size_t k) { return prior[k]; }, n_first);
    const std::size_t b = draw(
        rng, [&](std::size_t k) { return conditionals(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k)); },
        n_second);
    ++counts[a * n_second + b];
  }
  JointTable table{"classical_first", "classical_second", {}};
  for (std::size_t a = 0; a < n_first; ++a) {
    for (std::size_t b = 0; b < n_second; ++b) {
      table.rows.push_back(
          {first_values[a], second_values[b], static_cast<double>(counts[a * n_second + b]) / static_cast<double>(count)});
    }
  }
  return table;
}

void validate(const Scenario& s) {
  if (s.periods < 1) throw InvalidInput("scenario.periods must be at least 1");
  if (!(std::isfinite(s.impact) && s.impact >= 0.0)) throw InvalidInput("scenario.impact must be finite and >= 0");
  if (!(std::isfinite(s.initial_price) && s.initial_price > 0.0)) {
    throw InvalidInput("scenario.initial_price must be finite and > 0");
  }
  const std::size_t d = s.price_observable.dim();
  if (!is_up_down(s.price_observable)) {
    throw InvalidInput("scenario.price_observable eigenvalues must be +1 (up) or -1 (down)");
  }
  if (s.populations.empty()) throw InvalidInput("scenario.populations must not be empty");
  bool any_quantum = false;
  for (std::size_t p = 0; p < s.populations.size(); ++p) {
    const auto& pop = s.populations[p];
    const std::string field = "scenario.populations[" + std::to_string(p) + "]";
    if (pop.count < 1) throw InvalidInput(field + ".count must be at least 1");
    if (pop.initial_state.dim() != d) throw InvalidInput(field + ".state has the wrong dimension");
    if (pop.kind == PopulationKind::quantum) any_quantum = true;
    if (!pop.classical_belief.empty()) {
      if (pop.classical_belief.size() != d) throw InvalidInput(field + ".belief has the wrong length");
      try {
        (void)bayes_update(pop.classical_belief, std::vector<double>(d, 1.0));
      } catch (const InvalidInput& e) {
        throw InvalidInput(field + ".belief: " + e.what());
      }
    }
  }
  if (!any_quantum) throw InvalidInput("scenario.populations needs at least one quantum population");
  if (s.news.empty()) throw InvalidInput("scenario.news must not be empty");
  if (s.news.size() != 1 && s.news.size() != s.periods) {
    throw InvalidInput("scenario.news must have 1 or `periods` entries");
  }
  for (std::size_t k = 0; k < s.news.size(); ++k) {
    const auto& n = s.news[k];
    const std::string field = "scenario.news[" + std::to_string(k) + "]";
    if (n.hamiltonian.dim() != d) throw InvalidInput(field + ".hamiltonian has the wrong dimension");
    if (!(std::isfinite(n.duration) && n.duration >= 0.0)) throw InvalidInput(field + ".duration must be >= 0");
    if (n.observable) {
      if (n.observable->dim() != d) throw InvalidInput(field + ".observable has the wrong dimension");
      if (!is_up_down(*n.observable)) throw InvalidInput(field + ".observable eigenvalues must be +1 or -1");
    }
    if (n.classical_likelihoods) {
      if (n.classical_likelihoods->size() != d) throw InvalidInput(field + ".classical_likelihoods has the wrong length");
      for (double l : *n.classical_likelihoods) {
        if (!(l >= 0.0 && l <= 1.0)) throw InvalidInput(field + ".classical_likelihoods outside [0, 1]");
      }
    }
  }
}

PricePath run_market(const Scenario& s, RunOptions options) {
  validate(s);
  const std::size_t d = s.price_observable.dim();

  struct AgentRef {
    std::size_t population;
    std::size_t index;
  };
  std::vector<AgentRef> quantum_agents;
  std::vector<CVector> states;
  struct ClassicalGroup {
    std::size_t population;
    std::vector<double> belief;
  };
  std::vector<ClassicalGroup> classical;
  std::size_t classical_agents = 0;

  for (std::size_t p = 0; p < s.populations.size(); ++p) {
    const auto& pop = s.populations[p];
    if (pop.kind == PopulationKind::quantum) {
      for (std::size_t a = 0; a < pop.count; ++a) {
        quantum_agents.push_back({p, a});
        states.push_back(pop.initial_state.amplitudes());
      }
    } else {
      std::vector<double> belief = pop.classical_belief;
      if (belief.empty()) {
        for (const auto& e : s.price_observable.eigenvectors()) {
          belief.push_back(transition_probability(e, pop.initial_state));
        }
      }
      classical.push_back({p, std::move(belief)});
      classical_agents += pop.count;
    }
  }

  PricePath path;
  path.initial_price = s.initial_price;
  double price = s.initial_price;
  double classical_price = s.initial_price;
  const std::size_t n_agents = quantum_agents.size();
  const std::size_t chunks = chunk_count(n_agents, options.threads);

  for (std::size_t t = 0; t < s.periods; ++t) {
    const NewsEntry& news = s.news.size() == 1 ? s.news.front() : s.news[t];
    const Observable& obs = news.observable ? *news.observable : s.price_observable;
    const MeasurementPlan plan(obs);
    const bool moves = !news.hamiltonian.is_zero() && news.duration != 0.0;
    const CMatrix propagator = news.hamiltonian.propagator(news.duration);

    std::vector<std::size_t> ups(chunks, 0);
    parallel_chunks(n_agents, options.threads, [&](std::size_t begin, std::size_t end, std::size_t c) {
      for (std::size_t k = begin; k < end; ++k) {
        CVector& psi = states[k];
        if (moves) {
          psi = StateVector(CVector(propagator * psi)).amplitudes();
        }
        CounterRng rng(s.seed, quantum_agents[k].population, quantum_agents[k].index,
                       (static_cast<std::uint64_t>(t) << 8) | kMarketQuantumStream);
        if (plan.value(plan.measure(psi, rng)) > 0.0) ++ups[c];
      }
    });
    std::size_t up_total = 0;
    for (std::size_t u : ups) up_total += u;

    PricePeriod period{};
    period.price_open = price;
    period.up_fraction = static_cast<double>(up_total) / static_cast<double>(n_agents);
    period.down_fraction = static_cast<double>(n_agents - up_total) / static_cast<double>(n_agents);
    period.price_close = price * (1.0 + s.impact * (period.up_fraction - period.down_fraction));

    std::optional<ClassicalPeriod> cperiod;
    if (!classical.empty()) {
      std::vector<double> likelihoods;
      if (news.classical_likelihoods) {
        likelihoods = *news.classical_likelihoods;
      } else {
        for (const auto& e : obs.eigenvectors()) {
          likelihoods.push_back(std::clamp(std::norm(e.amplitudes().dot(propagator * e.amplitudes())), 0.0, 1.0));
        }
      }
      std::size_t c_ups = 0;
      double direction = 0.0;
      for (auto& group : classical) {
        try {
          group.belief = bayes_update(group.belief, likelihoods);
        } catch (const ImpossibleEvidence&) {
          // Uninformative period: the belief is kept.
        }
        const auto& pop = s.populations[group.population];
        for (std::size_t a = 0; a < pop.count; ++a) {
          CounterRng rng(s.seed, group.population, a, (static_cast<std::uint64_t>(t) << 8) | kMarketClassicalStream);
          const double u = rng.uniform();
          double cum = 0.0;
          std::size_t chosen = d;
          for (std::size_t k = 0; k < d; ++k) {
            if (group.belief[k] <= 0.0) continue;
            cum += group.belief[k];
            chosen = k;
            if (u < cum) break;
          }
          if (obs.eigenvalues()[chosen] > 0.0) ++c_ups;
        }
        double dir = 0.0;
        for (std::size_t k = 0; k < d; ++k) dir += group.belief[k] * obs.eigenvalues()[k];
        direction += dir * static_cast<double>(pop.count);
      }
      ClassicalPeriod cp{};
      cp.up_fraction = static_cast<double>(c_ups) / static_cast<double>(classical_agents);
      cp.down_fraction = static_cast<double>(classical_agents - c_ups) / static_cast<double>(classical_agents);
      cp.expected_direction = direction / static_cast<double>(classical_agents);
      cp.price_close = classical_price * (1.0 + s.impact * (cp.up_fraction - cp.down_fraction));
      cperiod = cp;
    }

    const bool price_ok = std::isfinite(period.price_close) && period.price_close > 0.0;
    const bool cprice_ok = !cperiod || (std::isfinite(cperiod->price_close) && cperiod->price_close > 0.0);
    if (!price_ok || !cprice_ok) {
      throw SimulationHalt("price left (0, inf) in period " + std::to_string(t + 1), path);
    }
    path.periods.push_back(period);
    price = period.price_close;
    if (cperiod) {
      path.classical.push_back(*cperiod);
      classical_price = cperiod->price_close;
    }
  }
  return path;
}

unsigned threads_from_environment() {
  const char* env = std::getenv("QEXPECT_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<unsigned>(std::min<long>(v, 256));
}

}  // namespace qexpect
