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

#include "qexpect/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "qexpect/error.hpp"

namespace qexpect {

std::string format_number(double value) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.12f", value);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

void write_distribution_csv(std::ostream& out, const OutcomeDistribution& d) {
  out << "outcome,probability\n";
  for (const auto& e : d.entries) out << format_number(e.outcome) << ',' << format_number(e.probability) << '\n';
}

void write_joint_csv(std::ostream& out, const std::vector<JointTable>& tables) {
  out << "first_observable,second_observable,first_outcome,second_outcome,probability\n";
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      out << t.first_name << ',' << t.second_name << ',' << format_number(r.first) << ','
          << format_number(r.second) << ',' << format_number(r.probability) << '\n';
    }
  }
}

void write_price_path_csv(std::ostream& out, const PricePath& path) {
  const bool classical = !path.classical.empty();
  out << "period,price_open,up_fraction,down_fraction,price_close";
  if (classical) {
    out << ",classical_up_fraction,classical_down_fraction,classical_expected_direction,classical_price_close";
  }
  out << '\n';
  for (std::size_t t = 0; t < path.periods.size(); ++t) {
    const auto& p = path.periods[t];
    out << (t + 1) << ',' << format_number(p.price_open) << ',' << format_number(p.up_fraction) << ','
        << format_number(p.down_fraction) << ',' << format_number(p.price_close);
    if (classical) {
      const auto& c = path.classical[t];
      out << ',' << format_number(c.up_fraction) << ',' << format_number(c.down_fraction) << ','
          << format_number(c.expected_direction) << ',' << format_number(c.price_close);
    }
    out << '\n';
  }
}

nlohmann::json market_results(const PricePath& path, bool halted) {
  nlohmann::json periods = nlohmann::json::array();
  for (const auto& p : path.periods) {
    periods.push_back({{"price_open", p.price_open},
                       {"up_fraction", p.up_fraction},
                       {"down_fraction", p.down_fraction},
                       {"price_close", p.price_close}});
  }
  nlohmann::json classical = nlohmann::json::array();
  for (const auto& c : path.classical) {
    classical.push_back({{"up_fraction", c.up_fraction},
                         {"down_fraction", c.down_fraction},
                         {"expected_direction", c.expected_direction},
                         {"price_close", c.price_close}});
  }
  return {{"initial_price", path.initial_price}, {"periods", periods}, {"classical", classical}, {"halted", halted}};
}

nlohmann::json run_report(const Config& config, std::uint64_t seed, const PricePath& path, bool halted,
                          double wall_seconds) {
  Config echoed = config;
  if (echoed.market) echoed.market->seed = seed;
  return {{"library_version", std::string(kLibraryVersion)},
          {"seed", seed},
          {"config", to_json(echoed)},
          {"results", market_results(path, halted)},
          {"wall_clock_seconds", wall_seconds}};
}

namespace {

struct MarketRun {
  PricePath path;
  bool halted = false;
  std::string halt_reason;
};

MarketRun simulate(const Config& config, std::uint64_t seed, RunOptions options) {
  Scenario s = config.scenario();
  s.seed = seed;
  MarketRun run;
  try {
    run.path = run_market(s, options);
  } catch (const SimulationHalt& h) {
    run.path = h.partial();
    run.halted = true;
    run.halt_reason = h.what();
  }
  return run;
}

template <typename T>
const T& need(const std::optional<T>& section, const char* name) {
  if (!section) throw ValidationError(std::string(name) + ": section missing from config");
  return *section;
}

}  // namespace

nlohmann::json replay_report(const nlohmann::json& report, RunOptions options) {
  const Config config = parse_config(report.at("config").dump());
  const MarketRun run = simulate(config, report.at("seed").get<std::uint64_t>(), options);
  return market_results(run.path, run.halted);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qexpect: quantum-probability model of investor expectations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kLibraryVersion));

  std::string config_path;
  double t_end = 0.0;
  std::size_t grid = 0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string csv_path;
  std::string report_path;

  auto* born = app.add_subcommand("born", "Born distribution of a state for an observable");
  auto* evolve = app.add_subcommand("evolve", "Born distribution after e^{-iHt} evolution");
  auto* interference = app.add_subcommand("interference", "Direct vs classical total probability");
  auto* order = app.add_subcommand("order-effect", "Sequential joint tables in both orders");
  auto* ensemble = app.add_subcommand("ensemble", "Empirical vs analytic outcome frequencies");
  auto* market = app.add_subcommand("simulate-market", "Run the ensemble market simulation");
  auto* uncertainty = app.add_subcommand("uncertainty", "Uncertainty product and Robertson bound");
  for (auto* sub : {born, evolve, interference, order, ensemble, market, uncertainty}) {
    sub->add_option("config", config_path, "Scenario config (JSON)")->required();
  }
  auto* t_opt = evolve->add_option("--t", t_end, "End time (defaults to the config value)");
  evolve->add_option("--grid", grid, "Emit N evenly spaced samples on [0, t]")->check(CLI::PositiveNumber);
  auto* n_opt = ensemble->add_option("--n", count, "Number of agents")->check(CLI::PositiveNumber);
  auto* ens_seed = ensemble->add_option("--seed", seed, "RNG seed");
  auto* mkt_seed = market->add_option("--seed", seed, "RNG seed");
  market->add_option("--out", csv_path, "Write the price path CSV here instead of stdout");
  market->add_option("--report", report_path, "Write the JSON run report here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kLibraryVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    const Config cfg = load_config(config_path);
    if (born->parsed()) {
      const auto& s = need(cfg.born, "born");
      write_distribution_csv(out, born_distribution(cfg.state(s.state), cfg.observable(s.observable)));
    } else if (evolve->parsed()) {
      const auto& s = need(cfg.evolve, "evolve");
      const double horizon = t_opt->count() > 0 ? t_end : s.t;
      const auto& psi = cfg.state(s.state);
      const auto& h = cfg.hamiltonian(s.hamiltonian);
      const auto& obs = cfg.observable(s.observable);
      out << "t,outcome,probability\n";
      const std::size_t samples = std::max<std::size_t>(grid, 1);
      for (std::size_t k = 0; k < samples; ++k) {
        const double t = samples == 1 ? horizon : horizon * static_cast<double>(k) / static_cast<double>(samples - 1);
        for (const auto& e : evolved_born(psi, h, t, obs).entries) {
          out << format_number(t) << ',' << format_number(e.outcome) << ',' << format_number(e.probability) << '\n';
        }
      }
    } else if (interference->parsed()) {
      const auto& s = need(cfg.interference, "interference");
      const auto r = interference_term(cfg.state(s.state),
                                       projector_for(cfg.observable(s.target_observable), s.target_outcome),
                                       cfg.observable(s.partition));
      out << "p_direct=" << format_number(r.p_direct) << " p_classical=" << format_number(r.p_classical_sum)
          << " IT=" << format_number(r.interference) << '\n';
    } else if (order->parsed()) {
      const auto& s = need(cfg.order_effect, "order_effect");
      const auto& psi = cfg.state(s.state);
      const auto ij = sequential_joint(psi, cfg.observable(s.first), cfg.observable(s.second));
      const auto ji = sequential_joint(psi, cfg.observable(s.second), cfg.observable(s.first));
      write_joint_csv(out, {ij, ji});
      out << "order_effect=" << format_number(order_effect(ij, ji)) << '\n';
    } else if (ensemble->parsed()) {
      const auto& s = need(cfg.ensemble, "ensemble");
      AgentPopulation pop;
      pop.name = "ensemble";
      pop.count = n_opt->count() > 0 ? count : s.count;
      pop.initial_state = cfg.state(s.state);
      const auto& obs = cfg.observable(s.observable);
      const auto empirical =
          run_ensemble(pop, obs, ens_seed->count() > 0 ? seed : s.seed, RunOptions{threads_from_environment()});
      const auto analytic = born_distribution(pop.initial_state, obs);
      out << "outcome,empirical,analytic,deviation\n";
      for (std::size_t k = 0; k < analytic.entries.size(); ++k) {
        const double e = empirical.entries[k].probability;
        const double a = analytic.entries[k].probability;
        out << format_number(analytic.entries[k].outcome) << ',' << format_number(e) << ',' << format_number(a) << ','
            << format_number(e - a) << '\n';
      }
    } else if (uncertainty->parsed()) {
      const auto& s = need(cfg.uncertainty, "uncertainty");
      const auto r = uncertainty_product(cfg.state(s.state), cfg.observable(s.first), cfg.observable(s.second));
      out << "delta_a=" << format_number(r.delta_a) << " delta_b=" << format_number(r.delta_b)
          << " product=" << format_number(r.product) << " robertson_bound=" << format_number(r.robertson_bound) << '\n';
    } else if (market->parsed()) {
      const std::uint64_t run_seed = mkt_seed->count() > 0 ? seed : need(cfg.market, "market").seed;
      const auto start = std::chrono::steady_clock::now();
      const MarketRun run = simulate(cfg, run_seed, RunOptions{threads_from_environment()});
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (csv_path.empty()) {
        write_price_path_csv(out, run.path);
      } else {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw ValidationError("--out: cannot open '" + csv_path + "' for writing");
        write_price_path_csv(f, run.path);
      }
      if (!report_path.empty()) {
        std::ofstream f(report_path, std::ios::binary);
        if (!f) throw ValidationError("--report: cannot open '" + report_path + "' for writing");
        f << run_report(cfg, run_seed, run.path, run.halted, wall).dump(2) << '\n';
      }
      if (run.halted) {
        err << "simulation halted: " << run.halt_reason << '\n';
        return kExitHalted;
      }
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InvalidInput& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ImpossibleOutcome& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace qexpect
