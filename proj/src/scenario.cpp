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

#include "qexpect/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qexpect/error.hpp"

namespace qexpect {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) parse_fail(path, "missing field '" + key + "'");
  return *it;
}

const json& object_at(const json& j, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  return j;
}

const json& array_at(const json& j, const std::string& path) {
  if (!j.is_array()) parse_fail(path, "expected an array");
  return j;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(path, "must be finite");
  return v;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, path + "." + key);
}

std::uint64_t unsigned_int(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) invalid(path, "must be non-negative");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  parse_fail(path, "expected a non-negative integer");
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) parse_fail(path, "expected a string");
  return j.get<std::string>();
}

Complex complex_at(const json& j, const std::string& path) {
  if (j.is_number()) return {number(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) parse_fail(path, "expected a complex number [re, im]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

CVector complex_vector(const json& j, const std::string& path) {
  array_at(j, path);
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = complex_at(j[k], path + "[" + std::to_string(k) + "]");
  }
  return v;
}

std::vector<double> real_vector(const json& j, const std::string& path) {
  array_at(j, path);
  std::vector<double> v;
  for (std::size_t k = 0; k < j.size(); ++k) v.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
  return v;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json vector_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_json(v(k)));
  return out;
}

class Loader {
 public:
  Loader(const json& doc, Config& cfg) : doc_(doc), cfg_(cfg) {}

  void run() {
    object_at(doc_, "$");
    check_version();
    static const std::vector<std::string> known = {"version", "degrees", "dimension", "states", "observables",
                                                   "hamiltonians", "born", "evolve", "interference",
                                                   "order_effect", "uncertainty", "ensemble", "market", "name",
                                                   "description"};
    for (const auto& [key, _] : doc_.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) parse_fail("$", "unknown field '" + key + "'");
    }
    if (doc_.contains("degrees")) {
      if (!doc_["degrees"].is_boolean()) parse_fail("degrees", "expected true or false");
      degrees_ = doc_["degrees"].get<bool>();
    }
    if (doc_.contains("dimension")) {
      cfg_.dimension = static_cast<std::size_t>(unsigned_int(doc_["dimension"], "dimension"));
      if (cfg_.dimension < 2) invalid("dimension", "must be at least 2");
    }
    // Observables first: states may be defined as their eigenvectors.
    if (doc_.contains("observables")) load_observables(object_at(doc_["observables"], "observables"));
    if (doc_.contains("states")) load_states(object_at(doc_["states"], "states"));
    if (doc_.contains("hamiltonians")) load_hamiltonians(object_at(doc_["hamiltonians"], "hamiltonians"));
    load_sections();
  }

 private:
  double angle(const json& obj, const std::string& key, const std::string& path) const {
    const double a = number_or(obj, key, 0.0, path);
    return degrees_ ? a * std::numbers::pi / 180.0 : a;
  }

  void check_version() const {
    const auto it = doc_.find("version");
    if (it == doc_.end()) throw VersionError("version: field missing (expected " + std::to_string(kConfigVersion) + ")");
    if (!it->is_number_integer() || it->get<std::int64_t>() != kConfigVersion) {
      throw VersionError("version: unsupported version " + it->dump() + " (expected " +
                         std::to_string(kConfigVersion) + ")");
    }
  }

  void require_dim(std::size_t d, const std::string& path) const {
    if (d != cfg_.dimension) {
      invalid(path, "dimension " + std::to_string(d) + " does not match document dimension " +
                        std::to_string(cfg_.dimension));
    }
  }

  void require_two_level(const std::string& path) const {
    if (cfg_.dimension != 2) invalid(path, "angle/preset form is only defined for dimension 2");
  }

  StateVector checked_state(CVector v, bool normalize, const std::string& path) const {
    require_dim(static_cast<std::size_t>(v.size()), path);
    const double n2 = v.squaredNorm();
    if (n2 == 0.0) invalid(path, "zero vector");
    if (!normalize && std::abs(n2 - 1.0) > kInputTol) {
      invalid(path, "not normalized (squared norm " + std::to_string(n2) + "); set \"normalize\": true to rescale");
    }
    return StateVector(std::move(v));
  }

  void load_observables(const json& obs) {
    for (const auto& [name, spec] : obs.items()) {
      const std::string path = "observables." + name;
      object_at(spec, path);
      try {
        if (spec.contains("preset")) {
          const std::string preset = string_at(spec["preset"], path + ".preset");
          if (preset != "price") invalid(path + ".preset", "unknown preset '" + preset + "'");
          require_two_level(path);
          cfg_.observables.emplace(name, price_observable(name));
        } else if (spec.contains("vectors")) {
          const json& vecs = array_at(spec["vectors"], path + ".vectors");
          std::vector<StateVector> basis;
          for (std::size_t k = 0; k < vecs.size(); ++k) {
            const std::string vpath = path + ".vectors[" + std::to_string(k) + "]";
            basis.push_back(checked_state(complex_vector(vecs[k], vpath), false, vpath));
          }
          require_dim(basis.size(), path + ".vectors");
          std::vector<double> values = real_vector(member(spec, "eigenvalues", path), path + ".eigenvalues");
          if (values.size() != basis.size()) invalid(path + ".eigenvalues", "need one eigenvalue per vector");
          cfg_.observables.emplace(name, make_observable(std::move(basis), std::move(values), name));
        } else if (spec.contains("angle")) {
          require_two_level(path);
          cfg_.observables.emplace(
              name, rotated_observable(angle(spec, "angle", path), angle(spec, "phase", path), name));
        } else {
          parse_fail(path, "expected one of 'preset', 'vectors', 'angle'");
        }
      } catch (const InvalidInput& e) {
        invalid(path, e.what());
      }
    }
  }

  void load_states(const json& states) {
    for (const auto& [name, spec] : states.items()) {
      const std::string path = "states." + name;
      object_at(spec, path);
      const bool normalize = spec.contains("normalize") && spec["normalize"].is_boolean() && spec["normalize"].get<bool>();
      try {
        if (spec.contains("amplitudes")) {
          cfg_.states.emplace(name, checked_state(complex_vector(spec["amplitudes"], path + ".amplitudes"), normalize,
                                                  path + ".amplitudes"));
        } else if (spec.contains("angle")) {
          require_two_level(path);
          const double theta = angle(spec, "angle", path);
          const double phi = angle(spec, "phase", path);
          cfg_.states.emplace(name, StateVector{Complex(std::cos(theta)), std::polar(1.0, phi) * std::sin(theta)});
        } else if (spec.contains("eigenvector_of")) {
          const std::string obs_name = string_at(spec["eigenvector_of"], path + ".eigenvector_of");
          const auto it = cfg_.observables.find(obs_name);
          if (it == cfg_.observables.end()) invalid(path + ".eigenvector_of", "unknown observable '" + obs_name + "'");
          const double outcome = number(member(spec, "outcome", path), path + ".outcome");
          const auto& group = it->second.outcomes()[it->second.outcome_index(outcome)];
          if (group.members.size() != 1) invalid(path + ".outcome", "outcome is degenerate; eigenvector is not unique");
          cfg_.states.emplace(name, it->second.eigenvectors()[group.members.front()]);
        } else {
          parse_fail(path, "expected one of 'amplitudes', 'angle', 'eigenvector_of'");
        }
      } catch (const InvalidInput& e) {
        invalid(path, e.what());
      }
    }
  }

  void load_hamiltonians(const json& hs) {
    for (const auto& [name, spec] : hs.items()) {
      const std::string path = "hamiltonians." + name;
      object_at(spec, path);
      if (spec.contains("preset")) {
        const std::string preset = string_at(spec["preset"], path + ".preset");
        if (preset == "zero") {
          cfg_.hamiltonians.emplace(name, Hamiltonian::zero(cfg_.dimension));
        } else if (preset == "rabi") {
          require_two_level(path);
          cfg_.hamiltonians.emplace(name, Hamiltonian::rabi(number(member(spec, "omega", path), path + ".omega")));
        } else if (preset == "pauli") {
          require_two_level(path);
          cfg_.hamiltonians.emplace(name, Hamiltonian::pauli(number_or(spec, "x", 0.0, path), number_or(spec, "y", 0.0, path),
                                                             number_or(spec, "z", 0.0, path)));
        } else {
          invalid(path + ".preset", "unknown preset '" + preset + "'");
        }
      } else if (spec.contains("matrix")) {
        const json& rows = array_at(spec["matrix"], path + ".matrix");
        require_dim(rows.size(), path + ".matrix");
        const auto d = static_cast<Eigen::Index>(rows.size());
        CMatrix m(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
          const std::string rpath = path + ".matrix[" + std::to_string(r) + "]";
          const CVector row = complex_vector(rows[static_cast<std::size_t>(r)], rpath);
          if (row.size() != d) invalid(rpath, "row length does not match dimension");
          m.row(r) = row.transpose();
        }
        for (Eigen::Index r = 0; r < d; ++r) {
          for (Eigen::Index c = r; c < d; ++c) {
            if (std::abs(m(r, c) - std::conj(m(c, r))) > kInputTol) {
              invalid(path + ".matrix[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                      "not Hermitian: entry differs from the conjugate of [" + std::to_string(c) + "][" +
                          std::to_string(r) + "]");
            }
          }
        }
        cfg_.hamiltonians.emplace(name, Hamiltonian(std::move(m)));
      } else {
        parse_fail(path, "expected one of 'preset', 'matrix'");
      }
    }
  }

  std::string ref(const json& obj, const std::string& key, const std::string& path) const {
    return string_at(member(obj, key, path), path + "." + key);
  }

  void load_sections() {
    if (doc_.contains("born")) {
      const json& s = object_at(doc_["born"], "born");
      cfg_.born = BornSection{ref(s, "state", "born"), ref(s, "observable", "born")};
    }
    if (doc_.contains("evolve")) {
      const json& s = object_at(doc_["evolve"], "evolve");
      cfg_.evolve = EvolveSection{ref(s, "state", "evolve"), ref(s, "hamiltonian", "evolve"),
                                  ref(s, "observable", "evolve"), number_or(s, "t", 1.0, "evolve")};
    }
    if (doc_.contains("interference")) {
      const json& s = object_at(doc_["interference"], "interference");
      cfg_.interference = InterferenceSection{ref(s, "state", "interference"), ref(s, "target_observable", "interference"),
                                              number_or(s, "target_outcome", 1.0, "interference"),
                                              ref(s, "partition", "interference")};
    }
    if (doc_.contains("order_effect")) {
      const json& s = object_at(doc_["order_effect"], "order_effect");
      cfg_.order_effect = PairSection{ref(s, "state", "order_effect"), ref(s, "first", "order_effect"),
                                      ref(s, "second", "order_effect")};
    }
    if (doc_.contains("uncertainty")) {
      const json& s = object_at(doc_["uncertainty"], "uncertainty");
      cfg_.uncertainty = PairSection{ref(s, "state", "uncertainty"), ref(s, "first", "uncertainty"),
                                     ref(s, "second", "uncertainty")};
    }
    if (doc_.contains("ensemble")) {
      const json& s = object_at(doc_["ensemble"], "ensemble");
      EnsembleSection e{ref(s, "state", "ensemble"), ref(s, "observable", "ensemble")};
      if (s.contains("count")) e.count = static_cast<std::size_t>(unsigned_int(s["count"], "ensemble.count"));
      if (s.contains("seed")) e.seed = unsigned_int(s["seed"], "ensemble.seed");
      if (e.count < 1) invalid("ensemble.count", "must be at least 1");
      cfg_.ensemble = e;
    }
    if (doc_.contains("market")) load_market(object_at(doc_["market"], "market"));

    // Every reference must resolve.
    auto check = [&](auto& map, const std::string& name, const std::string& path, const char* kind) {
      if (!map.contains(name)) invalid(path, std::string("unknown ") + kind + " '" + name + "'");
    };
    if (cfg_.born) {
      check(cfg_.states, cfg_.born->state, "born.state", "state");
      check(cfg_.observables, cfg_.born->observable, "born.observable", "observable");
    }
    if (cfg_.evolve) {
      check(cfg_.states, cfg_.evolve->state, "evolve.state", "state");
      check(cfg_.hamiltonians, cfg_.evolve->hamiltonian, "evolve.hamiltonian", "hamiltonian");
      check(cfg_.observables, cfg_.evolve->observable, "evolve.observable", "observable");
    }
    if (cfg_.interference) {
      const auto& s = *cfg_.interference;
      check(cfg_.states, s.state, "interference.state", "state");
      check(cfg_.observables, s.target_observable, "interference.target_observable", "observable");
      check(cfg_.observables, s.partition, "interference.partition", "observable");
      try {
        (void)cfg_.observables.at(s.target_observable).outcome_index(s.target_outcome);
      } catch (const InvalidInput& e) {
        invalid("interference.target_outcome", e.what());
      }
    }
    for (auto [section, path] : {std::pair{&cfg_.order_effect, "order_effect"}, std::pair{&cfg_.uncertainty, "uncertainty"}}) {
      if (!*section) continue;
      check(cfg_.states, (*section)->state, std::string(path) + ".state", "state");
      check(cfg_.observables, (*section)->first, std::string(path) + ".first", "observable");
      check(cfg_.observables, (*section)->second, std::string(path) + ".second", "observable");
    }
    if (cfg_.ensemble) {
      check(cfg_.states, cfg_.ensemble->state, "ensemble.state", "state");
      check(cfg_.observables, cfg_.ensemble->observable, "ensemble.observable", "observable");
    }
    if (cfg_.market) {
      const auto& m = *cfg_.market;
      check(cfg_.observables, m.price_observable, "market.price_observable", "observable");
      for (std::size_t k = 0; k < m.populations.size(); ++k) {
        check(cfg_.states, m.populations[k].state, "market.populations[" + std::to_string(k) + "].state", "state");
      }
      for (std::size_t k = 0; k < m.news.size(); ++k) {
        const std::string p = "market.news[" + std::to_string(k) + "]";
        check(cfg_.hamiltonians, m.news[k].hamiltonian, p + ".hamiltonian", "hamiltonian");
        if (m.news[k].observable) check(cfg_.observables, *m.news[k].observable, p + ".observable", "observable");
      }
      try {
        validate(cfg_.scenario());
      } catch (const InvalidInput& e) {
        throw ValidationError(std::string("market: ") + e.what());
      }
    }
  }

  void load_market(const json& s) {
    MarketSection m;
    if (s.contains("seed")) m.seed = unsigned_int(s["seed"], "market.seed");
    m.initial_price = number_or(s, "initial_price", m.initial_price, "market");
    m.impact = number_or(s, "impact", m.impact, "market");
    if (s.contains("periods")) m.periods = static_cast<std::size_t>(unsigned_int(s["periods"], "market.periods"));
    m.price_observable = ref(s, "price_observable", "market");
    const json& pops = array_at(member(s, "populations", "market"), "market.populations");
    for (std::size_t k = 0; k < pops.size(); ++k) {
      const std::string path = "market.populations[" + std::to_string(k) + "]";
      const json& p = object_at(pops[k], path);
      PopulationSection pop;
      pop.name = p.contains("name") ? string_at(p["name"], path + ".name") : "population" + std::to_string(k);
      const std::string kind = p.contains("kind") ? string_at(p["kind"], path + ".kind") : "quantum";
      if (kind == "quantum") {
        pop.kind = PopulationKind::quantum;
      } else if (kind == "classical") {
        pop.kind = PopulationKind::classical;
      } else {
        invalid(path + ".kind", "expected 'quantum' or 'classical'");
      }
      pop.count = static_cast<std::size_t>(unsigned_int(member(p, "count", path), path + ".count"));
      pop.state = ref(p, "state", path);
      if (p.contains("belief")) pop.belief = real_vector(p["belief"], path + ".belief");
      m.populations.push_back(std::move(pop));
    }
    const json& news = array_at(member(s, "news", "market"), "market.news");
    for (std::size_t k = 0; k < news.size(); ++k) {
      const std::string path = "market.news[" + std::to_string(k) + "]";
      const json& n = object_at(news[k], path);
      NewsSection entry;
      entry.hamiltonian = ref(n, "hamiltonian", path);
      entry.duration = number_or(n, "duration", 0.0, path);
      if (n.contains("observable")) entry.observable = string_at(n["observable"], path + ".observable");
      if (n.contains("classical_likelihoods")) {
        entry.classical_likelihoods = real_vector(n["classical_likelihoods"], path + ".classical_likelihoods");
      }
      m.news.push_back(std::move(entry));
    }
    cfg_.market = std::move(m);
  }

  const json& doc_;
  Config& cfg_;
  bool degrees_ = false;
};

template <typename Map>
const auto& lookup(const Map& map, const std::string& name, const char* kind) {
  const auto it = map.find(name);
  if (it == map.end()) throw ValidationError(std::string("unknown ") + kind + " '" + name + "'");
  return it->second;
}

}  // namespace

const StateVector& Config::state(const std::string& name) const { return lookup(states, name, "state"); }
const Observable& Config::observable(const std::string& name) const { return lookup(observables, name, "observable"); }
const Hamiltonian& Config::hamiltonian(const std::string& name) const {
  return lookup(hamiltonians, name, "hamiltonian");
}

Scenario Config::scenario() const {
  if (!market) throw ValidationError("market: section missing");
  const auto& m = *market;
  Scenario s;
  s.seed = m.seed;
  s.initial_price = m.initial_price;
  s.impact = m.impact;
  s.periods = m.periods;
  s.price_observable = observable(m.price_observable);
  for (const auto& p : m.populations) {
    s.populations.push_back({p.name, p.count, state(p.state), p.kind, p.belief});
  }
  for (const auto& n : m.news) {
    NewsEntry e{hamiltonian(n.hamiltonian), n.duration, std::nullopt, n.classical_likelihoods};
    if (n.observable) e.observable = observable(*n.observable);
    s.news.push_back(std::move(e));
  }
  return s;
}

Config parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  Config cfg;
  Loader(doc, cfg).run();
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Scenario load_scenario(const std::filesystem::path& path) { return load_config(path).scenario(); }

json to_json(const Config& c) {
  json doc;
  doc["version"] = kConfigVersion;
  doc["dimension"] = c.dimension;
  json states = json::object();
  for (const auto& [name, s] : c.states) states[name] = {{"amplitudes", vector_json(s.amplitudes())}};
  doc["states"] = states;
  json observables = json::object();
  for (const auto& [name, o] : c.observables) {
    json vecs = json::array();
    for (const auto& v : o.eigenvectors()) vecs.push_back(vector_json(v.amplitudes()));
    observables[name] = {{"vectors", vecs}, {"eigenvalues", o.eigenvalues()}};
  }
  doc["observables"] = observables;
  json hams = json::object();
  for (const auto& [name, h] : c.hamiltonians) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < h.matrix().rows(); ++r) rows.push_back(vector_json(h.matrix().row(r).transpose()));
    hams[name] = {{"matrix", rows}};
  }
  doc["hamiltonians"] = hams;

  if (c.born) doc["born"] = {{"state", c.born->state}, {"observable", c.born->observable}};
  if (c.evolve) {
    doc["evolve"] = {{"state", c.evolve->state}, {"hamiltonian", c.evolve->hamiltonian},
                     {"observable", c.evolve->observable}, {"t", c.evolve->t}};
  }
  if (c.interference) {
    doc["interference"] = {{"state", c.interference->state},
                           {"target_observable", c.interference->target_observable},
                           {"target_outcome", c.interference->target_outcome},
                           {"partition", c.interference->partition}};
  }
  if (c.order_effect) {
    doc["order_effect"] = {{"state", c.order_effect->state}, {"first", c.order_effect->first}, {"second", c.order_effect->second}};
  }
  if (c.uncertainty) {
    doc["uncertainty"] = {{"state", c.uncertainty->state}, {"first", c.uncertainty->first}, {"second", c.uncertainty->second}};
  }
  if (c.ensemble) {
    doc["ensemble"] = {{"state", c.ensemble->state}, {"observable", c.ensemble->observable},
                       {"count", c.ensemble->count}, {"seed", c.ensemble->seed}};
  }
  if (c.market) {
    const auto& m = *c.market;
    json pops = json::array();
    for (const auto& p : m.populations) {
      json pj = {{"name", p.name}, {"kind", p.kind == PopulationKind::quantum ? "quantum" : "classical"},
                 {"count", p.count}, {"state", p.state}};
      if (!p.belief.empty()) pj["belief"] = p.belief;
      pops.push_back(pj);
    }
    json news = json::array();
    for (const auto& n : m.news) {
      json nj = {{"hamiltonian", n.hamiltonian}, {"duration", n.duration}};
      if (n.observable) nj["observable"] = *n.observable;
      if (n.classical_likelihoods) nj["classical_likelihoods"] = *n.classical_likelihoods;
      news.push_back(nj);
    }
    doc["market"] = {{"seed", m.seed},         {"initial_price", m.initial_price}, {"impact", m.impact},
                     {"periods", m.periods},   {"price_observable", m.price_observable},
                     {"populations", pops},    {"news", news}};
  }
  return doc;
}

}  // namespace qexpect
