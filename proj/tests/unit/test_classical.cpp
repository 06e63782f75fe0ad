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

#include <vector>

#include "oracles.hpp"
#include "qexpect/classical.hpp"
#include "qexpect/error.hpp"

using namespace qexpect;

TEST_CASE("total_probability") {
  CHECK(total_probability({{0.5, 0.5}, {0.3, 0.3}}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(total_probability({{1.0}, {0.7}}) == 0.7);
  CHECK(total_probability({{0.625, 0.375}, {0.4, 0.0}}) == doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(total_probability({{0.5, 0.4}, {0.1, 0.1}}), InvalidInput);
  CHECK_THROWS_AS(total_probability({{1.0, 0.0}, {0.1, 0.1}}), InvalidInput);
  CHECK_THROWS_AS(total_probability({{0.5, 0.5}, {0.1, 1.1}}), InvalidInput);
  CHECK_THROWS_AS(total_probability({{0.5, 0.5}, {0.1}}), InvalidInput);
}

TEST_CASE("total probability is invariant under refinement of the partition") {
  qexpect::testing::Generator gen(12);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 1 + gen.index(5);
    ClassicalConditionalModel coarse;
    ClassicalConditionalModel fine;
    std::vector<double> w(n);
    double s = 0.0;
    for (double& x : w) s += (x = gen.uniform(0.05, 1.0));
    for (std::size_t m = 0; m < n; ++m) {
      const double p = w[m] / s;
      const double split = gen.uniform(0.1, 0.9);
      const double c1 = gen.uniform(0, 1);
      const double c2 = gen.uniform(0, 1);
      fine.partition_probs.insert(fine.partition_probs.end(), {p * split, p * (1 - split)});
      fine.conditionals.insert(fine.conditionals.end(), {c1, c2});
      coarse.partition_probs.push_back(p);
      coarse.conditionals.push_back(split * c1 + (1 - split) * c2);
    }
    REQUIRE(std::abs(total_probability(coarse) - total_probability(fine)) < 1e-12);
  }
}

TEST_CASE("bayes_update") {
  const std::vector<double> uniform{0.5, 0.5};
  const std::vector<double> flat{0.3, 0.3};
  CHECK(bayes_update(uniform, flat) == std::vector<double>{0.5, 0.5});

  const std::vector<double> certain{1.0, 0.0};
  const auto post = bayes_update(uniform, certain);
  CHECK(post[0] == 1.0);
  CHECK(post[1] == 0.0);

  const std::vector<double> prior{0.25, 0.75};
  const std::vector<double> lik{0.8, 0.4};
  const auto p = bayes_update(prior, lik);
  CHECK(p[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(std::abs(p[0] + p[1] - 1.0) < 1e-12);

  const std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(bayes_update(prior, zero), ImpossibleEvidence);
  CHECK_THROWS_AS(bayes_update(std::vector<double>{0.5, 0.6}, lik), InvalidInput);
  CHECK_THROWS_AS(bayes_update(prior, std::vector<double>{0.5}), InvalidInput);
}

TEST_CASE("uniform likelihoods leave the prior unchanged") {
  qexpect::testing::Generator gen(13);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + gen.index(4);
    std::vector<double> prior(n);
    double s = 0.0;
    for (double& x : prior) s += (x = gen.uniform(0.01, 1.0));
    for (double& x : prior) x /= s;
    const auto post = bayes_update(prior, std::vector<double>(n, gen.uniform(0.1, 1.0)));
    for (std::size_t m = 0; m < n; ++m) REQUIRE(std::abs(post[m] - prior[m]) < 1e-12);
  }
}

TEST_CASE("classical_agent_step") {
  const std::vector<double> sure{1.0, 0.0};
  CHECK(classical_agent_step(sure, std::vector<double>{0.2, 0.9}).expected_direction == 1.0);

  const std::vector<double> even{0.5, 0.5};
  CHECK(classical_agent_step(even, std::vector<double>{0.6, 0.6}).expected_direction == 0.0);

  const auto step = classical_agent_step(std::vector<double>{0.25, 0.75}, std::vector<double>{0.8, 0.4});
  CHECK(step.belief[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(step.expected_direction == doctest::Approx(-0.2).epsilon(1e-13));
  CHECK_THROWS_AS(classical_agent_step(sure, std::vector<double>{0.0, 0.5}), ImpossibleEvidence);
}
