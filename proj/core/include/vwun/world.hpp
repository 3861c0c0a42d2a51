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

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "vwun/dp.hpp"
#include "vwun/engine.hpp"
#include "vwun/market.hpp"
#include "vwun/rng.hpp"

namespace vwun {

/// Case-study scenario. Defaults reproduce the two-lane road setup.
struct ScenarioConfig {
  // Road.
  double road_length_m = 3000.0;
  double road_width_m = 20.0;
  int lanes = 2;

  // UAVs (buyers).
  int num_uavs = 30;
  double uav_spacing_m = 100.0;
  double uav_offset_m = 50.0;
  double uav_altitude_m = 5.0;
  double uav_max_speed_mps = 10.0;
  double uav_battery_capacity_wh = 17.0;

  // UGVs (sellers).
  int num_ugvs = 40;
  double ugv_speed_min_kmh = 20.0;
  double ugv_speed_max_kmh = 60.0;
  double ugv_min_separation_m = 30.0;
  double ugv_supply_capacity_wh = 200.0;

  // Market.
  WattHours demand_min_wh = 5;
  WattHours demand_max_wh = 10;
  Price valuation_min = 0.0;
  Price valuation_max = 15.0;
  double strategic_fraction = 0.2;
  Seconds max_waiting_time_s = 45.0;
  // Arrivals are drawn U[0, arrival_horizon_s]; fixed while the waiting time is swept.
  Seconds arrival_horizon_s = 90.0;
  double privacy_delta = 1e-5;
  dp::SensitivityMode sensitivity_mode = dp::SensitivityMode::kRange;

  // Charging.
  double wpt_efficiency = 0.8;
  double charge_power_w = 100.0;
  Seconds tracking_duration_s = 10.0;
  Seconds landing_duration_s = 15.0;

  // Simulation.
  Seconds dt_s = 0.1;
  std::uint64_t seed = 1;

  // Human-readable list of violated invariants; empty when valid.
  std::vector<std::string> problems() const;
  // Throws INVALID_CONFIG listing the first problem.
  void validate() const;

  // UGV slots available under the separation rule: lanes * floor(length / separation).
  long placement_capacity() const;

  bool operator==(const ScenarioConfig&) const = default;
};

struct UavState {
  AgentId id;
  double x = 0.0;
  double altitude = 0.0;
  double soc = 0.0;
  double capacity = 0.0;
  double max_speed = 0.0;
  Price valuation = 0.0;
  WattHours desirable_demand = 0;
  WattHours min_demand = 0;
  bool honest = true;
  std::optional<double> target_x;

  bool operator==(const UavState&) const = default;
};

struct UgvState {
  AgentId id;
  double x = 0.0;
  int lane = 0;
  double speed = 0.0;  // m/s
  Price cost_valuation = 0.0;
  double supply = 0.0;  // remaining dispensable energy, Wh
  bool honest = true;
  std::optional<double> target_x;

  bool operator==(const UgvState&) const = default;
};

enum class SessionPhase { kUgvSelection, kRoutePlanning, kRendezvous, kTracking, kLanding, kCharging, kComplete };

std::string_view to_string(SessionPhase phase);

struct ChargingSession {
  AgentId uav_id;
  AgentId ugv_id;
  std::size_t uav_index = 0;
  std::size_t ugv_index = 0;
  SessionPhase phase = SessionPhase::kUgvSelection;
  double rendezvous_x = 0.0;
  Seconds phase_timer = 0.0;
  double energy_target = 0.0;
  double energy_delivered = 0.0;
  double energy_dispensed = 0.0;
  Seconds completed_at = 0.0;

  bool operator==(const ChargingSession&) const = default;
};

struct WorldState {
  ScenarioConfig config;
  Seconds clock = 0.0;
  std::vector<UavState> uavs;
  std::vector<UgvState> ugvs;
  std::vector<ChargingSession> sessions;

  bool operator==(const WorldState&) const = default;
};

WorldState init_scenario(const ScenarioConfig& config, const RngStreams& rng);

struct Rendezvous {
  double x = 0.0;
  Seconds eta = 0.0;
};

// Meeting point minimizing the later of the two arrival times on the road axis.
Rendezvous plan_rendezvous(const UavState& uav, const UgvState& ugv);

// Moves `delivered` Wh into the UAV, drawing delivered / efficiency from the UGV.
void apply_charging(UavState& uav, UgvState& ugv, double delivered, double efficiency);

// Advances one session by dt. Agent motion is handled by advance_world.
void step_session(ChargingSession& session, WorldState& world, Seconds dt);

using StepObserver = std::function<void(const WorldState&)>;

// Moves agents toward their targets, steps every active session, retires
// completed sessions' agents to idle, and advances the clock.
void advance_world(WorldState& world, Seconds dt);

/// Reported bids/asks with arrival times. Strategic UAVs shade their bid by
/// U[0.5, 0.9]; strategic UGVs inflate their ask by U[1.1, 1.5].
BookInputs make_bids(const WorldState& world, const RngStreams& rng);

std::map<AgentId, Price> true_valuations(const WorldState& world);

// Greedy pairing: repeatedly match the buyer/seller pair with the earliest
// rendezvous, ties by ids.
PairingFn nearest_rendezvous_pairing(const WorldState& world);

// One session per paired winner, targeting its assigned energy.
void start_sessions(WorldState& world, const RoundOutcome& outcome);

bool sessions_complete(const WorldState& world);

// Steps until every session is Complete. Throws SIMULATION_ERROR past max_steps.
void run_sessions(WorldState& world, const StepObserver& observer = {}, std::size_t max_steps = 10'000'000);

/// Line-delimited JSON trace: one record per agent per sample.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out, std::size_t every_n_steps = 1) : out_(out), every_(every_n_steps) {}

  void operator()(const WorldState& world);

 private:
  std::ostream& out_;
  std::size_t every_;
  std::size_t calls_ = 0;
};

}  // namespace vwun
