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

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "vwun/error.hpp"
#include "vwun/harness.hpp"

namespace vwun {

using nlohmann::json;

namespace {

// Reads keys from one object and rejects anything it did not consume.
class Section {
 public:
  Section(const json& parent, const std::string& name) : name_(name) {
    if (!parent.contains(name)) return;
    const json& j = parent.at(name);
    if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "'" + name + "' must be an object");
    obj_ = &j;
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (obj_ == nullptr || !obj_->contains(key)) return;
    try {
      out = obj_->at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, name_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  void read_range(const char* key, T& lo, T& hi) {
    seen_.insert(key);
    if (obj_ == nullptr || !obj_->contains(key)) return;
    const json& r = obj_->at(key);
    if (!r.is_array() || r.size() != 2) {
      throw Error(ErrorCode::kInvalidConfig, name_ + "." + key + " must be a [lo, hi] pair");
    }
    try {
      lo = r[0].get<T>();
      hi = r[1].get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, name_ + "." + key + ": " + e.what());
    }
  }

  void finish() const {
    if (obj_ == nullptr) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!seen_.count(key)) throw Error(ErrorCode::kInvalidConfig, "unknown key '" + name_ + "." + key + "'");
    }
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> seen_;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be a JSON object");
  static const std::set<std::string> kSections = {"road", "uav", "ugv", "market", "privacy", "charging", "simulation"};
  for (const auto& [key, value] : j.items()) {
    if (!kSections.count(key)) throw Error(ErrorCode::kInvalidConfig, "unknown section '" + key + "'");
  }

  ScenarioConfig c;
  Section road(j, "road");
  road.read("length_m", c.road_length_m);
  road.read("width_m", c.road_width_m);
  road.read("lanes", c.lanes);
  road.finish();

  Section uav(j, "uav");
  uav.read("count", c.num_uavs);
  uav.read("spacing_m", c.uav_spacing_m);
  uav.read("offset_m", c.uav_offset_m);
  uav.read("altitude_m", c.uav_altitude_m);
  uav.read("max_speed_mps", c.uav_max_speed_mps);
  uav.read("battery_capacity_wh", c.uav_battery_capacity_wh);
  uav.finish();

  Section ugv(j, "ugv");
  ugv.read("count", c.num_ugvs);
  ugv.read_range("speed_kmh", c.ugv_speed_min_kmh, c.ugv_speed_max_kmh);
  ugv.read("min_separation_m", c.ugv_min_separation_m);
  ugv.read("supply_capacity_wh", c.ugv_supply_capacity_wh);
  ugv.finish();

  Section market(j, "market");
  market.read_range("demand_wh", c.demand_min_wh, c.demand_max_wh);
  market.read_range("valuation_cents_per_kwh", c.valuation_min, c.valuation_max);
  market.read("strategic_fraction", c.strategic_fraction);
  market.read("max_waiting_time_s", c.max_waiting_time_s);
  market.read("arrival_horizon_s", c.arrival_horizon_s);
  market.finish();

  Section privacy(j, "privacy");
  privacy.read("delta", c.privacy_delta);
  std::string mode = c.sensitivity_mode == dp::SensitivityMode::kRange ? "range" : "realized";
  privacy.read("sensitivity_mode", mode);
  if (mode == "range") {
    c.sensitivity_mode = dp::SensitivityMode::kRange;
  } else if (mode == "realized") {
    c.sensitivity_mode = dp::SensitivityMode::kRealized;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "privacy.sensitivity_mode must be 'range' or 'realized'");
  }
  privacy.finish();

  Section charging(j, "charging");
  charging.read("wpt_efficiency", c.wpt_efficiency);
  charging.read("power_w", c.charge_power_w);
  charging.read("tracking_duration_s", c.tracking_duration_s);
  charging.read("landing_duration_s", c.landing_duration_s);
  charging.finish();

  Section sim(j, "simulation");
  sim.read("dt_s", c.dt_s);
  sim.read("seed", c.seed);
  sim.finish();
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  return json{
      {"road", {{"length_m", c.road_length_m}, {"width_m", c.road_width_m}, {"lanes", c.lanes}}},
      {"uav",
       {{"count", c.num_uavs},
        {"spacing_m", c.uav_spacing_m},
        {"offset_m", c.uav_offset_m},
        {"altitude_m", c.uav_altitude_m},
        {"max_speed_mps", c.uav_max_speed_mps},
        {"battery_capacity_wh", c.uav_battery_capacity_wh}}},
      {"ugv",
       {{"count", c.num_ugvs},
        {"speed_kmh", {c.ugv_speed_min_kmh, c.ugv_speed_max_kmh}},
        {"min_separation_m", c.ugv_min_separation_m},
        {"supply_capacity_wh", c.ugv_supply_capacity_wh}}},
      {"market",
       {{"demand_wh", {c.demand_min_wh, c.demand_max_wh}},
        {"valuation_cents_per_kwh", {c.valuation_min, c.valuation_max}},
        {"strategic_fraction", c.strategic_fraction},
        {"max_waiting_time_s", c.max_waiting_time_s},
        {"arrival_horizon_s", c.arrival_horizon_s}}},
      {"privacy",
       {{"delta", c.privacy_delta},
        {"sensitivity_mode", c.sensitivity_mode == dp::SensitivityMode::kRange ? "range" : "realized"}}},
      {"charging",
       {{"wpt_efficiency", c.wpt_efficiency},
        {"power_w", c.charge_power_w},
        {"tracking_duration_s", c.tracking_duration_s},
        {"landing_duration_s", c.landing_duration_s}}},
      {"simulation", {{"dt_s", c.dt_s}, {"seed", c.seed}}},
  };
}

ScenarioConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

SweepSpec sweep_spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "sweep spec must be a JSON object");
  static const std::set<std::string> kKeys = {"parameter", "values", "schemes", "num_seeds", "config"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw Error(ErrorCode::kInvalidConfig, "unknown sweep key '" + key + "'");
  }
  SweepSpec spec = default_sweep();
  try {
    if (j.contains("parameter")) {
      const auto p = j.at("parameter").get<std::string>();
      if (p == "max_waiting_time") {
        spec.parameter = SweepSpec::Parameter::kMaxWaitingTime;
      } else if (p == "epsilon") {
        spec.parameter = SweepSpec::Parameter::kEpsilon;
      } else {
        throw Error(ErrorCode::kInvalidConfig, "parameter must be 'max_waiting_time' or 'epsilon'");
      }
    }
    if (j.contains("values")) spec.values = j.at("values").get<std::vector<double>>();
    if (j.contains("schemes")) {
      spec.schemes.clear();
      for (const auto& s : j.at("schemes")) spec.schemes.push_back(SchemeSpec::parse(s.get<std::string>()));
    }
    if (j.contains("num_seeds")) spec.num_seeds = j.at("num_seeds").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("sweep spec: ") + e.what());
  }
  if (j.contains("config")) spec.base_config = config_from_json(j.at("config"));
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::string& path) { return sweep_spec_from_json(read_json_file(path)); }

}  // namespace vwun
