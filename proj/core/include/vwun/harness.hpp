// Copyright 2026 The VWUN Auction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vwun/engine.hpp"
#include "vwun/market.hpp"
#include "vwun/world.hpp"

namespace vwun {

// Serializable scheme descriptor: "offline", "online" or "ppoda:<epsilon>".
struct SchemeSpec {
  enum class Kind { kOffline, kOnline, kPpoda };
  Kind kind = Kind::kOffline;
  double epsilon = 0.0;  // PPODA only

  static SchemeSpec parse(const std::string& text);
  std::string to_string() const;
  // Concrete scheme using the config's delta, valuation range and sensitivity mode.
  AuctionScheme resolve(const ScenarioConfig& config) const;

  bool operator==(const SchemeSpec&) const = default;
};

struct SweepSpec {
  enum class Parameter { kMaxWaitingTime, kEpsilon };

  Parameter parameter = Parameter::kMaxWaitingTime;
  std::vector<double> values;
  std::vector<SchemeSpec> schemes;
  int num_seeds = 1;
  ScenarioConfig base_config;

  // Throws INVALID_CONFIG.
  void validate() const;
  std::size_t num_cells() const { return schemes.size() * values.size() * static_cast<std::size_t>(num_seeds); }
};

// Waiting times {10, 20, 30, 40, 60, 90} s; Offline, Online, PPODA at
// eps 1.0 and 0.1; 30 seeds.
SweepSpec default_sweep(const ScenarioConfig& base = {});

struct ResultRow {
  std::string scheme;
  double waiting_time_s = 0.0;
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  double total_payoff_cents = 0.0;
  std::size_t num_trades = 0;
  WattHours traded_energy_wh = 0;
  double runtime_ms = 0.0;

  bool operator==(const ResultRow&) const = default;
};

struct ExperimentOptions {
  // Wall-clock runtime makes rows nondeterministic; off by default, the
  // runtime_ms column is then 0.
  bool record_runtime = false;
  StepObserver observer;
};

struct ExperimentResult {
  ResultRow row;
  BookInputs reported;
  RoundOutcome outcome;
  PayoffRecord payoffs;
  WorldState world;  // after every session completed
};

// Errors are rethrown with the failing stage prefixed to the message.
ExperimentResult run_experiment_detailed(const ScenarioConfig& config, const SchemeSpec& scheme, std::uint64_t seed,
                                         const ExperimentOptions& options = {});

ResultRow run_experiment(const ScenarioConfig& config, const SchemeSpec& scheme, std::uint64_t seed,
                         const ExperimentOptions& options = {});

struct CellFailure {
  std::size_t cell = 0;
  std::string scheme;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string error;
};

struct SweepOptions {
  unsigned jobs = 1;
  bool record_runtime = false;
};

struct SweepResult {
  std::vector<ResultRow> rows;  // sorted by (scheme order, value, seed)
  std::vector<CellFailure> failures;
};

SweepResult sweep(const SweepSpec& spec, const SweepOptions& options = {});

// CSV with a single header line and the ResultRow columns in order.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);

struct SeriesPoint {
  double x = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;  // standard error of the mean; 0 for a single sample
  std::size_t n = 0;
};

struct Series {
  std::string label;
  std::string scheme;
  std::optional<double> epsilon;
  std::vector<SeriesPoint> points;  // ascending x
};

// Seed-averaged total payoff per (scheme, epsilon) against waiting time.
// Series keep first-appearance order.
std::vector<Series> aggregate_payoff_by_waiting_time(const std::vector<ResultRow>& rows);

// Standalone SVG line chart with a ±1 standard-error band per series.
// Throws EMPTY_TABLE.
void render_chart(std::ostream& out, const std::vector<ResultRow>& rows);

struct Diagnostic {
  std::string check;
  bool passed = true;
  std::string message;
};

std::vector<Diagnostic> validate(const ScenarioConfig& config);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Config and sweep spec files (JSON). Missing keys take defaults; unknown
// keys are rejected.
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& config);
ScenarioConfig load_config(const std::string& path);

SweepSpec sweep_spec_from_json(const nlohmann::json& j);
SweepSpec load_sweep_spec(const std::string& path);

}  // namespace vwun
