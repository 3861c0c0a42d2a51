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

#include "vwun/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "vwun/error.hpp"

namespace vwun {

namespace {

constexpr const char* kCsvHeader =
    "scheme,waiting_time_s,epsilon,seed,total_payoff_cents,num_trades,traded_energy_wh,runtime_ms";

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("stage '{}': {}", name, e.what()));
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string series_label(const std::string& scheme, const std::optional<double>& epsilon) {
  if (scheme == "offline") return "Offline";
  if (scheme == "online") return "Online";
  if (scheme == "ppoda") return epsilon ? fmt::format("PPODA (eps={})", *epsilon) : "PPODA";
  return scheme;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

SchemeSpec SchemeSpec::parse(const std::string& text) {
  if (text == "offline") return {Kind::kOffline, 0.0};
  if (text == "online") return {Kind::kOnline, 0.0};
  if (text.rfind("ppoda:", 0) == 0) {
    const std::string eps = text.substr(6);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(eps, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != eps.size() || eps.empty() || !(value > 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "bad PPODA budget in scheme '" + text + "'");
    }
    return {Kind::kPpoda, value};
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown scheme '" + text + "' (expected offline, online, ppoda:<eps>)");
}

std::string SchemeSpec::to_string() const {
  switch (kind) {
    case Kind::kOffline: return "offline";
    case Kind::kOnline: return "online";
    case Kind::kPpoda: return fmt::format("ppoda:{}", epsilon);
  }
  return "unknown";
}

AuctionScheme SchemeSpec::resolve(const ScenarioConfig& config) const {
  switch (kind) {
    case Kind::kOffline: return OfflineScheme{};
    case Kind::kOnline: return OnlineScheme{};
    case Kind::kPpoda:
      return make_ppoda(epsilon, config.privacy_delta, {config.valuation_min, config.valuation_max},
                        config.sensitivity_mode);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown scheme kind");
}

void SweepSpec::validate() const {
  if (values.empty()) throw Error(ErrorCode::kInvalidConfig, "sweep values are empty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw Error(ErrorCode::kInvalidConfig, "sweep values must strictly increase");
  }
  if (schemes.empty()) throw Error(ErrorCode::kInvalidConfig, "sweep has no schemes");
  if (num_seeds < 1) throw Error(ErrorCode::kInvalidConfig, "num_seeds must be >= 1");
  for (double v : values) {
    if (parameter == Parameter::kEpsilon ? !(v > 0.0) : !(v >= 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, fmt::format("sweep value {} out of range", v));
    }
  }
  base_config.validate();
}

SweepSpec default_sweep(const ScenarioConfig& base) {
  SweepSpec spec;
  spec.parameter = SweepSpec::Parameter::kMaxWaitingTime;
  spec.values = {10, 20, 30, 40, 60, 90};
  spec.schemes = {SchemeSpec::parse("offline"), SchemeSpec::parse("online"), SchemeSpec::parse("ppoda:1"),
                  SchemeSpec::parse("ppoda:0.1")};
  spec.num_seeds = 30;
  spec.base_config = base;
  return spec;
}

ExperimentResult run_experiment_detailed(const ScenarioConfig& config, const SchemeSpec& scheme_spec,
                                         std::uint64_t seed, const ExperimentOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult r;
  ScenarioConfig cfg = config;
  cfg.seed = seed;
  const RngStreams rng(seed);

  r.world = stage("init", [&] { return init_scenario(cfg, rng.derive("world")); });
  r.reported = stage("bidding", [&] { return make_bids(r.world, rng.derive("bids")); });
  r.outcome = stage("auction", [&] {
    const AuctionScheme scheme = scheme_spec.resolve(cfg);
    return run_auction(r.reported, scheme, cfg.max_waiting_time_s, rng.derive("auction"),
                       nearest_rendezvous_pairing(r.world));
  });
  r.payoffs = stage("payoff", [&] {
    return compute_payoffs(r.outcome.clearing, r.outcome.assignments, r.outcome.pairing, true_valuations(r.world));
  });
  stage("charging", [&] {
    start_sessions(r.world, r.outcome);
    run_sessions(r.world, options.observer);
    return 0;
  });

  r.row.scheme = std::string(scheme_spec.kind == SchemeSpec::Kind::kOffline  ? "offline"
                             : scheme_spec.kind == SchemeSpec::Kind::kOnline ? "online"
                                                                             : "ppoda");
  r.row.waiting_time_s = cfg.max_waiting_time_s;
  if (scheme_spec.kind == SchemeSpec::Kind::kPpoda) r.row.epsilon = scheme_spec.epsilon;
  r.row.seed = seed;
  r.row.total_payoff_cents = r.payoffs.total;
  r.row.num_trades = r.payoffs.num_trades;
  r.row.traded_energy_wh = r.payoffs.traded_energy;
  if (options.record_runtime) {
    r.row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  }
  return r;
}

ResultRow run_experiment(const ScenarioConfig& config, const SchemeSpec& scheme, std::uint64_t seed,
                         const ExperimentOptions& options) {
  return run_experiment_detailed(config, scheme, seed, options).row;
}

SweepResult sweep(const SweepSpec& spec, const SweepOptions& options) {
  spec.validate();
  const std::size_t n_values = spec.values.size();
  const auto n_seeds = static_cast<std::size_t>(spec.num_seeds);
  const std::size_t n_cells = spec.num_cells();

  // Cell index = (scheme, value, seed) in row-major order, which is also the output order.
  std::vector<std::optional<ResultRow>> rows(n_cells);
  std::vector<std::optional<CellFailure>> failures(n_cells);

  auto run_cell = [&](std::size_t cell) {
    const std::size_t s = cell / (n_values * n_seeds);
    const std::size_t v = (cell / n_seeds) % n_values;
    const std::size_t k = cell % n_seeds;
    SchemeSpec scheme = spec.schemes[s];
    ScenarioConfig cfg = spec.base_config;
    if (spec.parameter == SweepSpec::Parameter::kMaxWaitingTime) {
      cfg.max_waiting_time_s = spec.values[v];
    } else if (scheme.kind == SchemeSpec::Kind::kPpoda) {
      scheme.epsilon = spec.values[v];
    }
    const std::uint64_t seed = spec.base_config.seed + k;
    try {
      ExperimentOptions opts;
      opts.record_runtime = options.record_runtime;
      rows[cell] = run_experiment(cfg, scheme, seed, opts);
    } catch (const std::exception& e) {
      failures[cell] = CellFailure{cell, scheme.to_string(), spec.values[v], seed, e.what()};
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(n_cells)));
  if (jobs == 1) {
    for (std::size_t c = 0; c < n_cells; ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < jobs; ++t) {
      workers.emplace_back([&] {
        for (std::size_t c = next++; c < n_cells; c = next++) run_cell(c);
      });
    }
  }

  SweepResult out;
  for (std::size_t c = 0; c < n_cells; ++c) {
    if (rows[c]) out.rows.push_back(std::move(*rows[c]));
    if (failures[c]) out.failures.push_back(std::move(*failures[c]));
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", r.scheme, r.waiting_time_s,
                       r.epsilon ? fmt::format("{}", *r.epsilon) : std::string(), r.seed, r.total_payoff_cents,
                       r.num_trades, r.traded_energy_wh, r.runtime_ms);
  }
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kEmptyTable, "CSV input is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw Error(ErrorCode::kInvalidConfig, "unexpected CSV header: " + line);

  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw Error(ErrorCode::kInvalidConfig, fmt::format("CSV line {}: expected 8 fields", line_no));
    try {
      ResultRow r;
      r.scheme = f[0];
      r.waiting_time_s = std::stod(f[1]);
      if (!f[2].empty()) r.epsilon = std::stod(f[2]);
      r.seed = std::stoull(f[3]);
      r.total_payoff_cents = std::stod(f[4]);
      r.num_trades = std::stoull(f[5]);
      r.traded_energy_wh = std::stoll(f[6]);
      r.runtime_ms = std::stod(f[7]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidConfig, fmt::format("CSV line {}: malformed number", line_no));
    }
  }
  return rows;
}

std::vector<Series> aggregate_payoff_by_waiting_time(const std::vector<ResultRow>& rows) {
  using Key = std::pair<std::string, std::optional<double>>;
  std::vector<Key> order;
  std::map<Key, std::map<double, std::vector<double>>> samples;
  for (const auto& r : rows) {
    Key key{r.scheme, r.epsilon};
    if (!samples.count(key)) order.push_back(key);
    samples[key][r.waiting_time_s].push_back(r.total_payoff_cents);
  }

  std::vector<Series> out;
  for (const auto& key : order) {
    Series s;
    s.scheme = key.first;
    s.epsilon = key.second;
    s.label = series_label(key.first, key.second);
    for (const auto& [x, ys] : samples[key]) {
      SeriesPoint p;
      p.x = x;
      p.n = ys.size();
      p.mean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(p.n);
      if (p.n > 1) {
        double ss = 0.0;
        for (double y : ys) ss += (y - p.mean) * (y - p.mean);
        p.stderr_ = std::sqrt(ss / static_cast<double>(p.n - 1)) / std::sqrt(static_cast<double>(p.n));
      }
      s.points.push_back(p);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void render_chart(std::ostream& out, const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyTable, "cannot chart an empty table");
  const auto series = aggregate_payoff_by_waiting_time(rows);

  constexpr double kWidth = 800, kHeight = 500;
  constexpr double kLeft = 90, kRight = 200, kTop = 40, kBottom = 70;
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.mean - p.stderr_);
      y_hi = std::max(y_hi, p.mean + p.stderr_);
    }
  }
  if (x_hi == x_lo) x_lo -= 1, x_hi += 1;
  if (y_hi == y_lo) y_lo -= 1, y_hi += 1;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  out << fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  out << fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
                     kLeft, kTop, plot_w, plot_h);

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / kTicks;
    const double yv = y_lo + (y_hi - y_lo) * i / kTicks;
    out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", sx(xv),
                       kTop + plot_h, kTop + plot_h + 5);
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.4g}</text>\n", sx(xv),
                       kTop + plot_h + 20, xv);
    out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n",
                       kLeft - 5, sy(yv), kLeft);
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n", kLeft - 8, sy(yv) + 4,
                       yv);
  }
  out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">Maximum waiting time (s)</text>\n",
                     kLeft + plot_w / 2, kHeight - 20);
  out << fmt::format(
      "<text x=\"20\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0:.2f})\">"
      "Total payoff of participants (cents)</text>\n",
      kTop + plot_h / 2);

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % std::size(kColors)];
    std::string band;
    for (const auto& p : s.points) band += fmt::format("{:.2f},{:.2f} ", sx(p.x), sy(p.mean + p.stderr_));
    for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) {
      band += fmt::format("{:.2f},{:.2f} ", sx(it->x), sy(it->mean - it->stderr_));
    }
    out << fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n", band, color);
    std::string line;
    for (const auto& p : s.points) line += fmt::format("{:.2f},{:.2f} ", sx(p.x), sy(p.mean));
    out << fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", line, color);
    for (const auto& p : s.points) {
      out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", sx(p.x), sy(p.mean), color);
    }
    const double ly = kTop + 20 + 20.0 * static_cast<double>(i);
    out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                       kLeft + plot_w + 15, ly, kLeft + plot_w + 40, color);
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", kLeft + plot_w + 45, ly + 4,
                       escape_xml(s.label));
  }
  out << "</svg>\n";
}

std::vector<Diagnostic> validate(const ScenarioConfig& config) {
  std::vector<Diagnostic> out;
  const auto problems = config.problems();
  if (problems.empty()) {
    out.push_back({"config.invariants", true, "all scenario invariants hold"});
  } else {
    for (const auto& p : problems) out.push_back({"config.invariants", false, p});
  }

  const long capacity = config.placement_capacity();
  if (config.num_ugvs > capacity) {
    out.push_back({"placement.feasible", false,
                   fmt::format("placement infeasible: {} UGVs exceed {} slots ({} lanes, {} m separation)",
                               config.num_ugvs, capacity, config.lanes, config.ugv_min_separation_m)});
  } else {
    out.push_back({"placement.feasible", true, fmt::format("{} UGVs within {} slots", config.num_ugvs, capacity)});
  }

  const double range = config.valuation_max - config.valuation_min;
  if (!(config.privacy_delta > 0.0 && config.privacy_delta < 1.0)) {
    out.push_back({"privacy.delta", false, fmt::format("privacy.delta {} outside (0, 1)", config.privacy_delta)});
  } else if (!(range > 0.0)) {
    out.push_back({"privacy.sensitivity", false, "valuation range has zero width; Gaussian perturbation is disabled"});
  } else {
    const double sigma = dp::gaussian_sigma({1.0, config.privacy_delta, range});
    out.push_back({"privacy.calibration", true, fmt::format("sigma at eps=1 is {:.4f} cents/kWh", sigma)});
  }
  return out;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::kEmptyInput, "spearman needs two equal-length samples of size >= 2");
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace vwun
