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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qexpect/market.hpp"
#include "qexpect/measurement.hpp"
#include "qexpect/scenario.hpp"

namespace qexpect {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitParse = 2,
  kExitHalted = 3,
  kExitUsage = 64,
};

// Fixed notation with 12 digits after the decimal point; negative zero is
// printed without its sign.
std::string format_number(double value);

// CSV writers: header row, ',' separator, LF line endings.
void write_distribution_csv(std::ostream& out, const OutcomeDistribution& d);
void write_joint_csv(std::ostream& out, const std::vector<JointTable>& tables);
void write_price_path_csv(std::ostream& out, const PricePath& path);

// Result payload of one market run; identical for identical (config, seed).
nlohmann::json market_results(const PricePath& path, bool halted);

// Report of a market run: resolved config echo (with the seed in effect),
// seed, library version, results, wall-clock seconds.
nlohmann::json run_report(const Config& config, std::uint64_t seed, const PricePath& path, bool halted,
                          double wall_seconds);

// Re-runs the echoed config and seed of a report and returns the fresh
// result payload.
nlohmann::json replay_report(const nlohmann::json& report, RunOptions options = {});

// Entry point behind the qexpect executable. `args` excludes the program
// name. Results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qexpect
