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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qexpect/error.hpp"
#include "qexpect/market.hpp"

using namespace qexpect;

namespace {
constexpr double kPi = std::numbers::pi;

AgentPopulation quantum(std::size_t count, StateVector psi) {
  return {"q", count, std::move(psi), PopulationKind::quantum, {}};
}

Scenario basic_scenario(std::size_t agents, StateVector psi, Hamiltonian h, double duration, double impact,
                        std::size_t periods) {
  Scenario s;
  s.seed = 2024;
  s.populations.push_back(quantum(agents, std::move(psi)));
  s.news.push_back({std::move(h), duration, std::nullopt, std::nullopt});
  s.impact = impact;
  s.initial_price = 100.0;
  s.periods = periods;
  return s;
}
}  // namespace

TEST_CASE("CounterRng is a pure function of its key and counter") {
  CounterRng a(42, 7, 3, 1);
  CounterRng b(42, 7, 3, 1);
  CounterRng c(42, 8, 3, 1);
  for (int k = 0; k < 100; ++k) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  CounterRng u(1, 2);
  for (int k = 0; k < 10000; ++k) {
    const double v = u.uniform();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("sample_measurement") {
  const Observable p = price_observable();
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    CounterRng rng(seed, 0);
    const auto m = sample_measurement(StateVector::basis(2, 0), p, rng);
    CHECK(m.outcome == 1.0);
    CHECK(m.post_state.same_ray(StateVector::basis(2, 0)));
  }

  const double r = 1.0 / std::sqrt(2.0);
  const StateVector even{r, r};
  std::size_t ups = 0;
  const std::size_t n = 100000;
  CounterRng rng(42, 0);
  std::vector<double> first_run;
  for (std::size_t k = 0; k < n; ++k) {
    const auto m = sample_measurement(even, p, rng);
    if (m.outcome > 0) ++ups;
    if (k < 50) first_run.push_back(m.outcome);
    REQUIRE(m.post_state.same_ray(StateVector::basis(2, m.outcome > 0 ? 0 : 1)));
  }
  CHECK(std::abs(static_cast<double>(ups) / n - 0.5) < 0.01);

  CounterRng again(42, 0);
  for (double expected : first_run) CHECK(sample_measurement(even, p, again).outcome == expected);
}

TEST_CASE("run_ensemble") {
  const Observable p = price_observable();
  const auto single = run_ensemble(quantum(1, StateVector{0.6, 0.8}), p, 5);
  CHECK((single.entries[0].probability == 1.0 || single.entries[1].probability == 1.0));

  const auto eig = run_ensemble(quantum(1234, StateVector::basis(2, 1)), p, 5);
  CHECK(eig.probability_of(-1.0) == 1.0);

  const std::size_t n = 100000;
  const auto d = run_ensemble(quantum(n, StateVector{std::cos(kPi / 8), std::sin(kPi / 8)}), p, 42);
  const double born = std::pow(std::cos(kPi / 8), 2);
  CHECK(std::abs(d.probability_of(1.0) - born) < 0.01);
  CHECK(std::abs(d.probability_of(1.0) - born) < 5 * std::sqrt(born * (1 - born) / n));

  AgentPopulation classical = quantum(10, StateVector::basis(2, 0));
  classical.kind = PopulationKind::classical;
  CHECK_THROWS_AS(run_ensemble(classical, p, 1), InvalidInput);
}

TEST_CASE("run_ensemble does not depend on thread count") {
  const Observable obs = rotated_observable(0.3, 0.2);
  const auto pop = quantum(30001, StateVector{0.6, Complex(0.0, 0.8)});
  const auto one = run_ensemble(pop, obs, 9, {1});
  const auto four = run_ensemble(pop, obs, 9, {4});
  const auto seven = run_ensemble(pop, obs, 9, {7});
  CHECK(one.entries[0].probability == four.entries[0].probability);
  CHECK(one.entries[0].probability == seven.entries[0].probability);
}

TEST_CASE("run_sequential_ensemble") {
  const Observable i = price_observable("i");
  const Observable j = rotated_observable(kPi / 3, 0.0, "j");
  const auto pop = quantum(100000, StateVector::basis(2, 0));
  const JointTable ij = run_sequential_ensemble(pop, i, j, MeasurementOrder::i_then_j, 42);
  const JointTable ji = run_sequential_ensemble(pop, i, j, MeasurementOrder::j_then_i, 42);
  CHECK(ij.first_name == "i");
  CHECK(ji.first_name == "j");
  CHECK(std::abs(ij.probability(1.0, 1.0) - ji.probability(1.0, 1.0) - 0.1875) < 0.01);
  CHECK(order_effect(ij, ji) > 0.15);

  const JointTable same = run_sequential_ensemble(pop, j, j, MeasurementOrder::i_then_j, 3);
  CHECK(same.probability(1.0, -1.0) == 0.0);
  CHECK(same.probability(-1.0, 1.0) == 0.0);

  const Observable relabeled = make_observable(j.eigenvectors(), {-1.0, 1.0}, "j'");
  const auto psi_pop = quantum(100000, StateVector{0.6, Complex(0.0, 0.8)});
  const auto a = run_sequential_ensemble(psi_pop, j, relabeled, MeasurementOrder::i_then_j, 8);
  const auto b = run_sequential_ensemble(psi_pop, j, relabeled, MeasurementOrder::j_then_i, 8);
  CHECK(order_effect(a, b) < 0.01);
}

TEST_CASE("run_market: zero impact keeps the price constant") {
  const auto s = basic_scenario(500, StateVector{0.6, 0.8}, Hamiltonian::rabi(0.4), 1.0, 0.0, 6);
  const PricePath path = run_market(s);
  REQUIRE(path.periods.size() == 6);
  for (const auto& p : path.periods) {
    CHECK(p.price_close == 100.0);
    CHECK(std::abs(p.up_fraction + p.down_fraction - 1.0) < 1e-12);
  }
}

TEST_CASE("run_market: unanimous buyers compound geometrically") {
  const auto s = basic_scenario(100, StateVector::basis(2, 0), Hamiltonian::zero(2), 1.0, 0.1, 3);
  const PricePath path = run_market(s);
  CHECK(path.periods[0].price_close == doctest::Approx(110.0).epsilon(1e-14));
  CHECK(path.periods[1].price_close == doctest::Approx(121.0).epsilon(1e-14));
  CHECK(path.periods[2].price_close == doctest::Approx(133.1).epsilon(1e-14));
}

TEST_CASE("run_market: Rabi news alternates the crowd") {
  // omega * duration = pi / 2 swaps |+> and |-> every period (up to phase).
  const double lambda = 0.05;
  const auto s = basic_scenario(250, StateVector::basis(2, 0), Hamiltonian::rabi(1.0), kPi / 2, lambda, 4);
  const PricePath path = run_market(s);
  double price = 100.0;
  const double expected_up[4] = {0.0, 1.0, 0.0, 1.0};
  for (int t = 0; t < 4; ++t) {
    CHECK(path.periods[t].up_fraction == expected_up[t]);
    price *= 1.0 + lambda * (2.0 * expected_up[t] - 1.0);
    CHECK(path.periods[t].price_close == doctest::Approx(price).epsilon(1e-14));
  }
}

TEST_CASE("run_market: collapse persists without news") {
  const double r = 1.0 / std::sqrt(2.0);
  const auto s = basic_scenario(5000, StateVector{r, r}, Hamiltonian::zero(2), 0.0, 0.01, 8);
  const PricePath path = run_market(s);
  for (const auto& p : path.periods) CHECK(p.up_fraction == path.periods.front().up_fraction);
}

TEST_CASE("run_market: bit-identical across thread counts") {
  auto s = basic_scenario(20000, StateVector{0.6, Complex(0.0, 0.8)}, Hamiltonian::pauli(0.3, 0.1, 0.2), 0.7, 0.05, 12);
  AgentPopulation c = quantum(3000, StateVector{0.8, 0.6});
  c.kind = PopulationKind::classical;
  s.populations.push_back(c);
  const PricePath a = run_market(s, {1});
  const PricePath b = run_market(s, {4});
  REQUIRE(a.periods.size() == b.periods.size());
  for (std::size_t t = 0; t < a.periods.size(); ++t) {
    CHECK(a.periods[t].price_close == b.periods[t].price_close);
    CHECK(a.periods[t].up_fraction == b.periods[t].up_fraction);
    CHECK(a.classical[t].price_close == b.classical[t].price_close);
  }
}

TEST_CASE("run_market: positivity for impact below one") {
  qexpect::testing::Generator gen(17);
  for (int k = 0; k < 20; ++k) {
    auto s = basic_scenario(200, gen.state(2), Hamiltonian(gen.hermitian(2)), gen.uniform(0, 2), gen.uniform(0, 0.99), 30);
    s.seed = k;
    for (const auto& p : run_market(s).periods) REQUIRE(p.price_close > 0.0);
  }
}

TEST_CASE("run_market: classical populations follow the Bayesian baseline") {
  auto s = basic_scenario(10, StateVector::basis(2, 0), Hamiltonian::zero(2), 0.0, 0.1, 2);
  AgentPopulation c = quantum(1000, StateVector::basis(2, 0));
  c.kind = PopulationKind::classical;
  c.classical_belief = {0.25, 0.75};
  s.populations.push_back(c);
  s.news[0].classical_likelihoods = std::vector<double>{0.8, 0.4};
  const PricePath path = run_market(s);
  REQUIRE(path.classical.size() == 2);
  CHECK(path.classical[0].expected_direction == doctest::Approx(-0.2).epsilon(1e-13));
  // Second update: (0.4 * 0.8, 0.6 * 0.4) / 0.56.
  CHECK(path.classical[1].expected_direction == doctest::Approx((0.32 - 0.24) / 0.56).epsilon(1e-13));
  CHECK(std::abs(path.classical[0].up_fraction - 0.4) < 0.06);

  // Rabi news at pi/2 carries zero evidence under the default mapping: belief held.
  auto r = basic_scenario(10, StateVector::basis(2, 0), Hamiltonian::rabi(1.0), kPi / 2, 0.1, 2);
  c.classical_belief = {0.7, 0.3};
  r.populations.push_back(c);
  const PricePath held = run_market(r);
  CHECK(held.classical[1].expected_direction == doctest::Approx(0.4).epsilon(1e-13));
}

TEST_CASE("run_market: validation and halting") {
  auto s = basic_scenario(10, StateVector::basis(2, 0), Hamiltonian::zero(2), 0.0, 0.1, 3);
  s.periods = 0;
  CHECK_THROWS_AS(run_market(s), InvalidInput);
  s.periods = 3;
  s.news.push_back(s.news.front());
  CHECK_THROWS_AS(run_market(s), InvalidInput);
  s.news.resize(1);
  s.impact = -0.1;
  CHECK_THROWS_AS(run_market(s), InvalidInput);
  s.impact = 0.1;
  s.price_observable = make_observable({StateVector::basis(2, 0), StateVector::basis(2, 1)}, {2.0, -1.0});
  CHECK_THROWS_AS(run_market(s), InvalidInput);

  // All sellers with impact 1 drive the price to zero in the first period.
  auto crash = basic_scenario(10, StateVector::basis(2, 1), Hamiltonian::zero(2), 0.0, 1.0, 5);
  try {
    run_market(crash);
    FAIL("expected SimulationHalt");
  } catch (const SimulationHalt& h) {
    CHECK(h.partial().periods.empty());
  }
  auto late = basic_scenario(10, StateVector::basis(2, 0), Hamiltonian::rabi(1.0), kPi / 2, 1.0, 5);
  try {
    run_market(late);
    FAIL("expected SimulationHalt");
  } catch (const SimulationHalt& h) {
    CHECK(h.partial().periods.empty());
  }
  auto grow = basic_scenario(10, StateVector::basis(2, 0), Hamiltonian::zero(2), 0.0, 1e300, 5);
  try {
    run_market(grow);
    FAIL("expected SimulationHalt");
  } catch (const SimulationHalt& h) {
    CHECK(h.partial().periods.size() == 1);
  }
}

TEST_CASE("classical two-stage sampler") {
  const std::vector<double> prior{0.3, 0.7};
  Eigen::MatrixXd cond(2, 2);
  cond << 1.0, 0.0, 0.2, 0.8;
  const std::vector<double> values{1.0, -1.0};
  const auto t = run_classical_sequential_ensemble(50000, prior, cond, values, values, 4);
  CHECK(t.probability(1.0, -1.0) == 0.0);
  CHECK(std::abs(t.probability(-1.0, -1.0) - 0.56) < 0.01);
  CHECK(std::abs(t.total() - 1.0) < 1e-12);
}

TEST_CASE("empirical frequencies stay within 5 sigma of Born for every outcome") {
  qexpect::testing::Generator gen(606);
  const std::size_t n = 100000;
  for (int k = 0; k < 3; ++k) {
    const std::size_t d = 2 + static_cast<std::size_t>(k);
    const StateVector psi = gen.state(d);
    const Observable obs = gen.observable(d);
    const auto empirical = run_ensemble(quantum(n, psi), obs, 1000 + k);
    const auto born = born_distribution(psi, obs);
    for (std::size_t m = 0; m < born.entries.size(); ++m) {
      const double p = born.entries[m].probability;
      REQUIRE(std::abs(empirical.entries[m].probability - p) <= 5 * std::sqrt(p * (1 - p) / n));
    }
  }
}

TEST_CASE("classical limit: commuting observables match the classical two-stage sampler") {
  qexpect::testing::Generator gen(707);
  const std::size_t n = 50000;
  for (int k = 0; k < 3; ++k) {
    const std::size_t d = 2 + static_cast<std::size_t>(k);
    const CMatrix u = gen.unitary(d);
    const Observable a = gen.observable_in(u, d);
    const Observable b = gen.observable_in(u, d);
    const StateVector psi = gen.state(d);

    // Classical model induced by the shared basis: prior from Born weights,
    // conditionals from the analytic joint.
    const JointTable analytic = sequential_joint(psi, a, b);
    const auto prior_dist = born_distribution(psi, a);
    std::vector<double> prior;
    std::vector<double> first_values;
    for (const auto& e : prior_dist.entries) {
      prior.push_back(e.probability);
      first_values.push_back(e.outcome);
    }
    const std::vector<double> second_values = b.outcome_values();
    Eigen::MatrixXd cond(static_cast<Eigen::Index>(prior.size()), static_cast<Eigen::Index>(second_values.size()));
    for (std::size_t x = 0; x < prior.size(); ++x) {
      for (std::size_t y = 0; y < second_values.size(); ++y) {
        cond(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
            prior[x] > 0 ? analytic.probability(first_values[x], second_values[y]) / prior[x]
                         : (y == 0 ? 1.0 : 0.0);
      }
      const double row = cond.row(static_cast<Eigen::Index>(x)).sum();
      cond.row(static_cast<Eigen::Index>(x)) /= row;
    }

    const JointTable q = run_sequential_ensemble(quantum(n, psi), a, b, MeasurementOrder::i_then_j, 31 + k);
    const JointTable c = run_classical_sequential_ensemble(n, prior, cond, first_values, second_values, 41 + k);
    // Table-level agreement: RMS of the per-cell z-scores within 2 standard
    // errors; no single cell beyond 5.
    double z2 = 0.0;
    std::size_t cells = 0;
    for (const auto& row : q.rows) {
      const double p = analytic.probability(row.first, row.second);
      const double diff = row.probability - c.probability(row.first, row.second);
      if (p <= 0.0 || p >= 1.0) {
        REQUIRE(diff == 0.0);
        continue;
      }
      const double z = diff / std::sqrt(p * (1 - p) * 2.0 / n);
      REQUIRE(std::abs(z) <= 5.0);
      z2 += z * z;
      ++cells;
    }
    if (cells > 0) CHECK(std::sqrt(z2 / static_cast<double>(cells)) <= 2.0);
  }
}
