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

#include "qexpect/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "qexpect/error.hpp"

namespace qexpect {
namespace {

constexpr double kImpossibleTol = 1e-12;
constexpr double kOutcomeMatchTol = 1e-12;

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InvalidInput(std::string(what) + ": dimension mismatch");
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

bool same_outcome(double a, double b) { return std::abs(a - b) <= kOutcomeMatchTol; }

// Born weight of one outcome group: sum of |<e|psi>|^2 over its eigenvectors.
double group_probability(const StateVector& psi, const Observable& obs, const OutcomeGroup& g) {
  double p = 0.0;
  for (std::size_t k : g.members) p += std::norm(inner_product(obs.eigenvectors()[k], psi));
  return clamp01(p);
}

double expectation(const StateVector& psi, const CMatrix& op) {
  return psi.amplitudes().dot(op * psi.amplitudes()).real();
}

}  // namespace

double OutcomeDistribution::probability_of(double outcome) const {
  for (const auto& e : entries) {
    if (same_outcome(e.outcome, outcome)) return e.probability;
  }
  throw InvalidInput("outcome " + std::to_string(outcome) + " not in distribution");
}

double OutcomeDistribution::total() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.probability;
  return s;
}

double JointTable::probability(double first, double second) const {
  for (const auto& r : rows) {
    if (same_outcome(r.first, first) && same_outcome(r.second, second)) return r.probability;
  }
  throw InvalidInput("outcome pair not in joint table");
}

double JointTable::total() const {
  double s = 0.0;
  for (const auto& r : rows) s += r.probability;
  return s;
}

OutcomeDistribution JointTable::first_marginal() const {
  OutcomeDistribution d;
  for (const auto& r : rows) {
    if (d.entries.empty() || !same_outcome(d.entries.back().outcome, r.first)) {
      d.entries.push_back({r.first, 0.0});
    }
    d.entries.back().probability += r.probability;
  }
  return d;
}

double born_probability(const StateVector& psi, const Projector& proj) {
  require_same_dim(psi.dim(), proj.dim(), "born_probability");
  return clamp01((proj.matrix() * psi.amplitudes()).squaredNorm());
}

OutcomeDistribution born_distribution(const StateVector& psi, const Observable& obs) {
  require_same_dim(psi.dim(), obs.dim(), "born_distribution");
  OutcomeDistribution d;
  d.entries.reserve(obs.outcomes().size());
  for (const auto& g : obs.outcomes()) d.entries.push_back({g.value, group_probability(psi, obs, g)});
  return d;
}

OutcomeDistribution evolved_born(const StateVector& psi, const Hamiltonian& h, double t,
                                 const Observable& obs) {
  return born_distribution(evolve(psi, h, t), obs);
}

StateVector collapse(const StateVector& psi, const Projector& proj) {
  require_same_dim(psi.dim(), proj.dim(), "collapse");
  CVector projected = proj.matrix() * psi.amplitudes();
  if (projected.squaredNorm() < kImpossibleTol) {
    throw ImpossibleOutcome("collapse onto an outcome with zero Born probability");
  }
  return StateVector(std::move(projected));
}

double transition_probability(const StateVector& a, const StateVector& b) {
  require_same_dim(a.dim(), b.dim(), "transition_probability");
  return clamp01(std::norm(inner_product(a, b)));
}

Eigen::MatrixXd transition_matrix(const Observable& a, const Observable& b) {
  require_same_dim(a.dim(), b.dim(), "transition_matrix");
  const auto d = static_cast<Eigen::Index>(a.dim());
  Eigen::MatrixXd t(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index m = 0; m < d; ++m) {
      t(k, m) = transition_probability(a.eigenvectors()[static_cast<std::size_t>(k)],
                                       b.eigenvectors()[static_cast<std::size_t>(m)]);
    }
  }
  return t;
}

JointTable sequential_joint(const StateVector& psi, const Observable& first, const Observable& second) {
  require_same_dim(psi.dim(), first.dim(), "sequential_joint");
  require_same_dim(first.dim(), second.dim(), "sequential_joint");
  JointTable table{first.name(), second.name(), {}};
  table.rows.reserve(first.outcomes().size() * second.outcomes().size());
  for (const auto& a : first.outcomes()) {
    const Projector proj = projector_for(first, a.value);
    if ((proj.matrix() * psi.amplitudes()).squaredNorm() < kImpossibleTol) {
      for (const auto& b : second.outcomes()) table.rows.push_back({a.value, b.value, 0.0});
      continue;
    }
    const double pa = group_probability(psi, first, a);
    const StateVector post = collapse(psi, proj);
    for (const auto& b : second.outcomes()) {
      table.rows.push_back({a.value, b.value, pa * group_probability(post, second, b)});
    }
  }
  return table;
}

double order_effect(const JointTable& ij, const JointTable& ji) {
  double worst = 0.0;
  for (const auto& r : ij.rows) {
    worst = std::max(worst, std::abs(r.probability - ji.probability(r.second, r.first)));
  }
  return worst;
}

double order_effect(const StateVector& psi, const Observable& obs_i, const Observable& obs_j) {
  return order_effect(sequential_joint(psi, obs_i, obs_j), sequential_joint(psi, obs_j, obs_i));
}

InterferenceReport interference_term(const StateVector& psi, const Projector& target,
                                     std::span<const Projector> partition) {
  require_same_dim(psi.dim(), target.dim(), "interference_term");
  if (partition.empty()) throw InvalidInput("interference_term: empty partition");
  const auto d = static_cast<Eigen::Index>(psi.dim());
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& p : partition) {
    require_same_dim(psi.dim(), p.dim(), "interference_term");
    sum += p.matrix();
  }
  if ((sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kInputTol) {
    throw InvalidInput("interference_term: partition projectors do not sum to the identity");
  }

  InterferenceReport r{};
  r.p_direct = born_probability(psi, target);
  r.p_classical_sum = 0.0;
  for (const auto& p : partition) {
    const double pk = born_probability(psi, p);
    if ((p.matrix() * psi.amplitudes()).squaredNorm() < kImpossibleTol) continue;
    r.p_classical_sum += pk * born_probability(collapse(psi, p), target);
  }
  r.interference = r.p_direct - r.p_classical_sum;
  return r;
}

InterferenceReport interference_term(const StateVector& psi, const Projector& target,
                                     const Observable& partition) {
  std::vector<Projector> projs;
  projs.reserve(partition.outcomes().size());
  for (const auto& g : partition.outcomes()) projs.push_back(projector_for(partition, g.value));
  return interference_term(psi, target, projs);
}

UncertaintyReport uncertainty_product(const StateVector& psi, const Observable& a, const Observable& b) {
  require_same_dim(psi.dim(), a.dim(), "uncertainty_product");
  require_same_dim(a.dim(), b.dim(), "uncertainty_product");
  const CMatrix& ma = a.matrix();
  const CMatrix& mb = b.matrix();
  const double ea = expectation(psi, ma);
  const double eb = expectation(psi, mb);
  UncertaintyReport r{};
  r.delta_a = std::sqrt(std::max(0.0, expectation(psi, ma * ma) - ea * ea));
  r.delta_b = std::sqrt(std::max(0.0, expectation(psi, mb * mb) - eb * eb));
  r.product = r.delta_a * r.delta_b;
  const CMatrix comm = ma * mb - mb * ma;
  r.robertson_bound = 0.5 * std::abs(psi.amplitudes().dot(comm * psi.amplitudes()));
  return r;
}

}  // namespace qexpect
