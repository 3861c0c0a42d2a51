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

// vwun: command-line front end for the charging-auction experiments.
//
//   vwun run      --scheme ppoda:1 --seed 7 --out results/ [--config c.json] [--trace t.jsonl]
//   vwun sweep    [--spec s.json | --parameter ... --values ... --schemes ... --seeds N] --out table.csv
//   vwun chart    --in table.csv --out fig.svg
//   vwun validate [--config c.json]
//
// Exit status is 0 on success. Failures print one JSON line
// {"error": CODE, "message": ...} on stderr.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "vwun/error.hpp"
#include "vwun/harness.hpp"

namespace {

int report_error(std::string_view code, const std::string& message, int status = 1) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << std::endl;
  return status;
}

vwun::ScenarioConfig config_or_default(const std::string& path) {
  return path.empty() ? vwun::ScenarioConfig{} : vwun::load_config(path);
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vwun::Error(vwun::ErrorCode::kIo, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving online double auction for UGV-assisted UAV charging"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one (config, scheme, seed) cell");
  std::string run_config;
  std::string run_scheme;
  std::optional<std::uint64_t> run_seed;
  std::optional<double> run_waiting;
  std::string run_out;
  std::string run_trace;
  std::size_t trace_every = 10;
  bool run_timing = false;
  run->add_option("--config,-c", run_config, "Scenario config file (JSON)")->check(CLI::ExistingFile);
  run->add_option("--scheme,-s", run_scheme, "offline | online | ppoda:<eps>")->required();
  run->add_option("--seed", run_seed, "Seed (defaults to the config seed)");
  run->add_option("--waiting-time", run_waiting, "Override max waiting time (s)");
  run->add_option("--out,-o", run_out, "Output directory for result.csv")->required();
  run->add_option("--trace", run_trace, "Write a JSON-lines trace of the charging sessions");
  run->add_option("--trace-every", trace_every, "Trace every N simulation steps")->check(CLI::PositiveNumber);
  run->add_flag("--record-runtime", run_timing, "Fill runtime_ms with wall-clock time");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run a parameter sweep and write the result table");
  std::string sw_spec;
  std::string sw_config;
  std::string sw_param;
  std::vector<double> sw_values;
  std::vector<std::string> sw_schemes;
  std::optional<int> sw_seeds;
  std::string sw_out;
  unsigned sw_jobs = 1;
  bool sw_timing = false;
  sw->add_option("--spec", sw_spec, "Sweep spec file (JSON)")->check(CLI::ExistingFile);
  sw->add_option("--config,-c", sw_config, "Base scenario config (JSON)")->check(CLI::ExistingFile);
  sw->add_option("--parameter", sw_param, "max_waiting_time | epsilon")
      ->check(CLI::IsMember({"max_waiting_time", "epsilon"}));
  sw->add_option("--values", sw_values, "Sweep values, strictly increasing");
  sw->add_option("--schemes", sw_schemes, "Schemes, e.g. offline online ppoda:1 ppoda:0.1");
  sw->add_option("--seeds", sw_seeds, "Seeds per cell")->check(CLI::PositiveNumber);
  sw->add_option("--out,-o", sw_out, "Output CSV (stdout when omitted)");
  sw->add_option("--jobs,-j", sw_jobs, "Worker threads")->check(CLI::PositiveNumber);
  sw->add_flag("--record-runtime", sw_timing, "Fill runtime_ms with wall-clock time (output no longer reproducible)");

  // chart
  auto* chart = app.add_subcommand("chart", "Render payoff vs waiting time as SVG");
  std::string chart_in;
  std::string chart_out;
  chart->add_option("--in,-i", chart_in, "Result CSV")->required()->check(CLI::ExistingFile);
  chart->add_option("--out,-o", chart_out, "Output SVG")->required();

  // validate
  auto* val = app.add_subcommand("validate", "Check a scenario config");
  std::string val_config;
  val->add_option("--config,-c", val_config, "Scenario config file (JSON)")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("USAGE", e.what(), 2);
  }

  try {
    if (*run) {
      vwun::ScenarioConfig cfg = config_or_default(run_config);
      if (run_waiting) cfg.max_waiting_time_s = *run_waiting;
      const auto scheme = vwun::SchemeSpec::parse(run_scheme);
      vwun::ExperimentOptions opts;
      opts.record_runtime = run_timing;
      std::ofstream trace;
      std::optional<vwun::TraceWriter> writer;
      if (!run_trace.empty()) {
        trace = open_output(run_trace);
        writer.emplace(trace, trace_every);
        opts.observer = [&](const vwun::WorldState& w) { (*writer)(w); };
      }
      const auto row = vwun::run_experiment(cfg, scheme, run_seed.value_or(cfg.seed), opts);
      auto out = open_output(std::filesystem::path(run_out) / "result.csv");
      vwun::write_csv(out, {row});
      vwun::write_csv(std::cout, {row});
      return 0;
    }

    if (*sw) {
      vwun::SweepSpec spec = sw_spec.empty() ? vwun::default_sweep() : vwun::load_sweep_spec(sw_spec);
      if (!sw_config.empty()) spec.base_config = vwun::load_config(sw_config);
      if (!sw_param.empty()) {
        spec.parameter = sw_param == "epsilon" ? vwun::SweepSpec::Parameter::kEpsilon
                                               : vwun::SweepSpec::Parameter::kMaxWaitingTime;
      }
      if (!sw_values.empty()) spec.values = sw_values;
      if (!sw_schemes.empty()) {
        spec.schemes.clear();
        for (const auto& s : sw_schemes) spec.schemes.push_back(vwun::SchemeSpec::parse(s));
      }
      if (sw_seeds) spec.num_seeds = *sw_seeds;

      const auto result = vwun::sweep(spec, {sw_jobs, sw_timing});
      if (sw_out.empty()) {
        vwun::write_csv(std::cout, result.rows);
      } else {
        auto out = open_output(sw_out);
        vwun::write_csv(out, result.rows);
      }
      for (const auto& f : result.failures) {
        std::cerr << nlohmann::json{{"failed_cell", f.cell}, {"scheme", f.scheme}, {"value", f.value},
                                    {"seed", f.seed}, {"message", f.error}}
                         .dump()
                  << '\n';
      }
      if (!result.failures.empty()) {
        return report_error("PARTIAL_FAILURE", std::to_string(result.failures.size()) + " of " +
                                                   std::to_string(spec.num_cells()) + " cells failed");
      }
      return 0;
    }

    if (*chart) {
      std::ifstream in(chart_in);
      const auto rows = vwun::read_csv(in);
      auto out = open_output(chart_out);
      vwun::render_chart(out, rows);
      return 0;
    }

    if (*val) {
      const auto diagnostics = vwun::validate(config_or_default(val_config));
      bool ok = true;
      for (const auto& d : diagnostics) {
        std::cout << (d.passed ? "PASS " : "FAIL ") << d.check << ": " << d.message << '\n';
        ok = ok && d.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const vwun::Error& e) {
    return report_error(vwun::to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return report_error("INTERNAL", e.what());
  }
  return 0;
}
