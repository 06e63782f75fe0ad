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
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qexpect/hilbert.hpp"
#include "qexpect/market.hpp"

namespace qexpect {

inline constexpr int kConfigVersion = 1;

// Malformed document; the message carries line/column or the field path.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed document whose contents breach an invariant; the message names
// the field.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct BornSection {
  std::string state;
  std::string observable;
};

struct EvolveSection {
  std::string state;
  std::string hamiltonian;
  std::string observable;
  double t = 1.0;
};

struct InterferenceSection {
  std::string state;
  std::string target_observable;
  double target_outcome = 1.0;
  std::string partition;
};

struct PairSection {
  std::string state;
  std::string first;
  std::string second;
};

struct EnsembleSection {
  std::string state;
  std::string observable;
  std::size_t count = 1000;
  std::uint64_t seed = 0;
};

struct PopulationSection {
  std::string name;
  PopulationKind kind = PopulationKind::quantum;
  std::size_t count = 1;
  std::string state;
  std::vector<double> belief;
};

struct NewsSection {
  std::string hamiltonian;
  double duration = 0.0;
  std::optional<std::string> observable;
  std::optional<std::vector<double>> classical_likelihoods;
};

struct MarketSection {
  std::uint64_t seed = 0;
  double initial_price = 100.0;
  double impact = 0.0;
  std::size_t periods = 1;
  std::string price_observable;
  std::vector<PopulationSection> populations;
  std::vector<NewsSection> news;
};

// A validated configuration document with every named object resolved.
struct Config {
  std::size_t dimension = 2;
  std::map<std::string, StateVector> states;
  std::map<std::string, Observable> observables;
  std::map<std::string, Hamiltonian> hamiltonians;

  std::optional<BornSection> born;
  std::optional<EvolveSection> evolve;
  std::optional<InterferenceSection> interference;
  std::optional<PairSection> order_effect;
  std::optional<PairSection> uncertainty;
  std::optional<EnsembleSection> ensemble;
  std::optional<MarketSection> market;

  // Lookups throw ValidationError naming the missing object.
  const StateVector& state(const std::string& name) const;
  const Observable& observable(const std::string& name) const;
  const Hamiltonian& hamiltonian(const std::string& name) const;

  // Resolves the market section. Throws ValidationError without one.
  Scenario scenario() const;
};

Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

// Canonical document: every state, observable and Hamiltonian written in
// explicit numeric form, angles resolved, doubles at round-trip precision.
// parse_config(to_json(c).dump()) reproduces `c`.
nlohmann::json to_json(const Config& config);

}  // namespace qexpect
