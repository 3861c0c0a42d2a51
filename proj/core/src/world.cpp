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

#include "vwun/world.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <tuple>

#include "vwun/error.hpp"

namespace vwun {

namespace {

constexpr double kArrivalTolerance = 1.0;  // m
constexpr double kTimerEpsilon = 1e-9;
constexpr double kEnergyEpsilon = 1e-9;

std::string make_id(std::string_view prefix, int index, int count) {
  const int width = std::max(2, static_cast<int>(std::to_string(std::max(count - 1, 0)).size()));
  return fmt::format("{}-{:0{}d}", prefix, index, width);
}

double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Marks round(fraction * n) agents strategic.
std::vector<bool> draw_honesty(std::size_t n, double fraction, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const auto strategic = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<bool> honest(n, true);
  for (std::size_t i = 0; i < strategic; ++i) honest[order[i]] = false;
  return honest;
}

void move_toward(double& x, std::optional<double>& target, double speed, Seconds dt, double road_length) {
  if (!target) return;
  const double goal = std::clamp(*target, 0.0, road_length);
  const double step = speed * dt;
  if (std::abs(goal - x) <= step) {
    x = goal;
  } else {
    x += goal > x ? step : -step;
  }
  x = std::clamp(x, 0.0, road_length);
}

bool timer_done(ChargingSession& s, Seconds dt, Seconds duration) {
  s.phase_timer += dt;
  if (s.phase_timer + kTimerEpsilon >= duration) {
    s.phase_timer = 0.0;
    return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(SessionPhase phase) {
  switch (phase) {
    case SessionPhase::kUgvSelection: return "ugv_selection";
    case SessionPhase::kRoutePlanning: return "route_planning";
    case SessionPhase::kRendezvous: return "rendezvous";
    case SessionPhase::kTracking: return "tracking";
    case SessionPhase::kLanding: return "landing";
    case SessionPhase::kCharging: return "charging";
    case SessionPhase::kComplete: return "complete";
  }
  return "unknown";
}

std::vector<std::string> ScenarioConfig::problems() const {
  std::vector<std::string> out;
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back(fmt::format("{} must be positive (got {})", name, v));
  };
  auto non_negative = [&](const char* name, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) out.push_back(fmt::format("{} must be >= 0 (got {})", name, v));
  };
  positive("road_length_m", road_length_m);
  positive("road_width_m", road_width_m);
  positive("lanes", lanes);
  positive("num_uavs", num_uavs);
  positive("num_ugvs", num_ugvs);
  non_negative("uav_spacing_m", uav_spacing_m);
  non_negative("uav_offset_m", uav_offset_m);
  non_negative("uav_altitude_m", uav_altitude_m);
  positive("uav_max_speed_mps", uav_max_speed_mps);
  positive("uav_battery_capacity_wh", uav_battery_capacity_wh);
  positive("ugv_speed_min_kmh", ugv_speed_min_kmh);
  positive("ugv_speed_max_kmh", ugv_speed_max_kmh);
  non_negative("ugv_min_separation_m", ugv_min_separation_m);
  positive("ugv_supply_capacity_wh", ugv_supply_capacity_wh);
  positive("charge_power_w", charge_power_w);
  non_negative("tracking_duration_s", tracking_duration_s);
  non_negative("landing_duration_s", landing_duration_s);
  positive("dt_s", dt_s);
  non_negative("max_waiting_time_s", max_waiting_time_s);
  non_negative("arrival_horizon_s", arrival_horizon_s);

  if (ugv_speed_min_kmh > ugv_speed_max_kmh) out.push_back("ugv speed range is not ordered");
  if (demand_min_wh <= 0) out.push_back("demand_min_wh must be positive");
  if (demand_min_wh > demand_max_wh) out.push_back("demand range is not ordered");
  if (!(valuation_min >= 0.0) || valuation_min > valuation_max) out.push_back("valuation range is not ordered");
  if (!(wpt_efficiency > 0.0 && wpt_efficiency <= 1.0)) {
    out.push_back(fmt::format("wpt_efficiency must lie in (0, 1] (got {})", wpt_efficiency));
  }
  if (!(strategic_fraction >= 0.0 && strategic_fraction <= 1.0)) {
    out.push_back(fmt::format("strategic_fraction must lie in [0, 1] (got {})", strategic_fraction));
  }
  if (!(privacy_delta > 0.0 && privacy_delta < 1.0)) {
    out.push_back(fmt::format("privacy_delta must lie in (0, 1) (got {})", privacy_delta));
  }
  if (num_uavs > 0 && uav_offset_m + uav_spacing_m * (num_uavs - 1) > road_length_m) {
    out.push_back("uav row does not fit on the road");
  }
  if (static_cast<double>(demand_max_wh) > uav_battery_capacity_wh) {
    out.push_back("demand_max_wh exceeds uav_battery_capacity_wh");
  }
  if (static_cast<double>(demand_max_wh) / wpt_efficiency > ugv_supply_capacity_wh) {
    out.push_back("ugv_supply_capacity_wh cannot cover the largest demand");
  }
  return out;
}

void ScenarioConfig::validate() const {
  const auto p = problems();
  if (!p.empty()) throw Error(ErrorCode::kInvalidConfig, p.front());
}

long ScenarioConfig::placement_capacity() const {
  if (ugv_min_separation_m <= 0.0) return std::numeric_limits<long>::max();
  return static_cast<long>(lanes) * static_cast<long>(std::floor(road_length_m / ugv_min_separation_m));
}

WorldState init_scenario(const ScenarioConfig& config, const RngStreams& rng) {
  config.validate();
  if (config.num_ugvs > config.placement_capacity()) {
    throw Error(ErrorCode::kPlacementFailure,
                fmt::format("{} UGVs exceed the {} slots allowed by {} m separation", config.num_ugvs,
                            config.placement_capacity(), config.ugv_min_separation_m));
  }

  WorldState world;
  world.config = config;

  Rng valuation = rng.stream(streams::kValuation);
  Rng demand = rng.stream(streams::kDemand);
  Rng strategy = rng.stream(streams::kStrategy);
  Rng placement = rng.stream(streams::kPlacement);
  Rng speed = rng.stream(streams::kSpeed);

  const auto uav_honest = draw_honesty(static_cast<std::size_t>(config.num_uavs), config.strategic_fraction, strategy);
  const auto ugv_honest = draw_honesty(static_cast<std::size_t>(config.num_ugvs), config.strategic_fraction, strategy);

  for (int i = 0; i < config.num_uavs; ++i) {
    UavState u;
    u.id = make_id("uav", i, config.num_uavs);
    u.x = config.uav_offset_m + config.uav_spacing_m * i;
    u.altitude = config.uav_altitude_m;
    u.capacity = config.uav_battery_capacity_wh;
    u.max_speed = config.uav_max_speed_mps;
    u.valuation = uniform(valuation, config.valuation_min, config.valuation_max);
    u.desirable_demand = std::uniform_int_distribution<WattHours>(config.demand_min_wh, config.demand_max_wh)(demand);
    u.min_demand = std::uniform_int_distribution<WattHours>(config.demand_min_wh, u.desirable_demand)(demand);
    // Room for the full desirable volume.
    u.soc = uniform(demand, 0.0, u.capacity - static_cast<double>(u.desirable_demand));
    u.honest = uav_honest[static_cast<std::size_t>(i)];
    world.uavs.push_back(std::move(u));
  }

  std::vector<std::vector<double>> occupied(static_cast<std::size_t>(config.lanes));
  for (int j = 0; j < config.num_ugvs; ++j) {
    UgvState g;
    g.id = make_id("ugv", j, config.num_ugvs);
    bool placed = false;
    for (int attempt = 0; attempt < 10'000 && !placed; ++attempt) {
      const int lane = std::uniform_int_distribution<int>(0, config.lanes - 1)(placement);
      const double x = uniform(placement, 0.0, config.road_length_m);
      auto& taken = occupied[static_cast<std::size_t>(lane)];
      const bool clear = std::all_of(taken.begin(), taken.end(), [&](double other) {
        return std::abs(other - x) >= config.ugv_min_separation_m;
      });
      if (clear) {
        taken.push_back(x);
        g.lane = lane;
        g.x = x;
        placed = true;
      }
    }
    if (!placed) {
      throw Error(ErrorCode::kPlacementFailure,
                  fmt::format("could not place {} within 10000 attempts at {} m separation", g.id,
                              config.ugv_min_separation_m));
    }
    g.speed = uniform(speed, config.ugv_speed_min_kmh, config.ugv_speed_max_kmh) / 3.6;
    g.cost_valuation = uniform(valuation, config.valuation_min, config.valuation_max);
    g.supply = config.ugv_supply_capacity_wh;
    g.honest = ugv_honest[static_cast<std::size_t>(j)];
    world.ugvs.push_back(std::move(g));
  }
  return world;
}

Rendezvous plan_rendezvous(const UavState& uav, const UgvState& ugv) {
  const double xu = uav.x;
  const double xg = ugv.x;
  const double vu = uav.max_speed;
  const double vg = ugv.speed;
  if (xu == xg) return {xu, 0.0};
  if (std::isinf(vg)) return {xu, 0.0};
  if (std::isinf(vu)) return {xg, 0.0};
  if (vu <= 0.0 && vg <= 0.0) throw Error(ErrorCode::kInvalidParams, "both agents are immobile");
  // Equal-arrival point; always lies between the two agents.
  const double x = (xu * vg + xg * vu) / (vu + vg);
  const double eta = vu > 0.0 ? std::abs(x - xu) / vu : std::abs(x - xg) / vg;
  return {x, eta};
}

void apply_charging(UavState& uav, UgvState& ugv, double delivered, double efficiency) {
  if (delivered < 0.0) throw Error(ErrorCode::kInvalidParams, "delivered energy must be >= 0");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw Error(ErrorCode::kInvalidParams, "efficiency outside (0, 1]");
  if (delivered == 0.0) return;
  const double dispensed = delivered / efficiency;
  if (uav.soc + delivered > uav.capacity + kEnergyEpsilon) {
    throw Error(ErrorCode::kEnergyOverflow,
                fmt::format("{} would reach {} Wh of {} Wh", uav.id, uav.soc + delivered, uav.capacity));
  }
  if (ugv.supply + kEnergyEpsilon < dispensed) {
    throw Error(ErrorCode::kSupplyExhausted,
                fmt::format("{} holds {} Wh but must dispense {} Wh", ugv.id, ugv.supply, dispensed));
  }
  uav.soc = std::min(uav.soc + delivered, uav.capacity);
  ugv.supply = std::max(ugv.supply - dispensed, 0.0);
}

void step_session(ChargingSession& s, WorldState& world, Seconds dt) {
  UavState& uav = world.uavs.at(s.uav_index);
  UgvState& ugv = world.ugvs.at(s.ugv_index);
  const ScenarioConfig& cfg = world.config;

  switch (s.phase) {
    case SessionPhase::kUgvSelection:
      s.phase = SessionPhase::kRoutePlanning;
      break;
    case SessionPhase::kRoutePlanning: {
      const Rendezvous r = plan_rendezvous(uav, ugv);
      s.rendezvous_x = r.x;
      uav.target_x = r.x;
      ugv.target_x = r.x;
      s.phase = SessionPhase::kRendezvous;
      break;
    }
    case SessionPhase::kRendezvous:
      if (std::abs(uav.x - s.rendezvous_x) <= kArrivalTolerance &&
          std::abs(ugv.x - s.rendezvous_x) <= kArrivalTolerance) {
        s.phase = SessionPhase::kTracking;
        s.phase_timer = 0.0;
      }
      break;
    case SessionPhase::kTracking:
      // UGV settles directly beneath the hovering UAV.
      ugv.target_x = uav.x;
      if (timer_done(s, dt, cfg.tracking_duration_s)) s.phase = SessionPhase::kLanding;
      break;
    case SessionPhase::kLanding:
      if (timer_done(s, dt, cfg.landing_duration_s)) s.phase = SessionPhase::kCharging;
      break;
    case SessionPhase::kCharging: {
      const double per_step = cfg.charge_power_w * dt * cfg.wpt_efficiency / 3600.0;
      const double remaining = s.energy_target - s.energy_delivered;
      const double delivered = std::min(per_step, remaining);
      apply_charging(uav, ugv, delivered, cfg.wpt_efficiency);
      s.energy_delivered += delivered;
      s.energy_dispensed += delivered / cfg.wpt_efficiency;
      if (s.energy_target - s.energy_delivered <= kEnergyEpsilon) {
        s.energy_delivered = s.energy_target;
        s.phase = SessionPhase::kComplete;
        s.completed_at = world.clock + dt;
      }
      break;
    }
    case SessionPhase::kComplete:
      break;
  }
}

void advance_world(WorldState& world, Seconds dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidParams, "dt must be positive");
  const double length = world.config.road_length_m;
  for (auto& u : world.uavs) move_toward(u.x, u.target_x, u.max_speed, dt, length);
  for (auto& g : world.ugvs) move_toward(g.x, g.target_x, g.speed, dt, length);
  for (auto& s : world.sessions) {
    if (s.phase == SessionPhase::kComplete) continue;
    step_session(s, world, dt);
    if (s.phase == SessionPhase::kComplete) {
      world.uavs[s.uav_index].target_x.reset();
      world.ugvs[s.ugv_index].target_x.reset();
    }
  }
  world.clock += dt;
}

BookInputs make_bids(const WorldState& world, const RngStreams& rng) {
  Rng arrival = rng.stream(streams::kArrival);
  Rng shading = rng.stream("misreport");
  const Seconds horizon = world.config.arrival_horizon_s;

  BookInputs out;
  for (const auto& u : world.uavs) {
    BuyerBid b;
    b.bidder_id = u.id;
    b.unit_price = u.honest ? u.valuation : u.valuation * uniform(shading, 0.5, 0.9);
    b.desirable_demand = u.desirable_demand;
    b.min_demand = u.min_demand;
    b.arrival_time = uniform(arrival, 0.0, horizon);
    out.bids.push_back(std::move(b));
  }
  for (const auto& g : world.ugvs) {
    SellerAsk a;
    a.bidder_id = g.id;
    a.unit_price = g.honest ? g.cost_valuation : g.cost_valuation * uniform(shading, 1.1, 1.5);
    a.desirable_supply = static_cast<WattHours>(std::floor(g.supply * world.config.wpt_efficiency));
    a.min_supply = std::min<WattHours>(1, a.desirable_supply);
    a.arrival_time = uniform(arrival, 0.0, horizon);
    out.asks.push_back(std::move(a));
  }
  return out;
}

std::map<AgentId, Price> true_valuations(const WorldState& world) {
  std::map<AgentId, Price> out;
  for (const auto& u : world.uavs) out.emplace(u.id, u.valuation);
  for (const auto& g : world.ugvs) out.emplace(g.id, g.cost_valuation);
  return out;
}

PairingFn nearest_rendezvous_pairing(const WorldState& world) {
  return [&world](const std::vector<BuyerBid>& buyers, const std::vector<SellerAsk>& sellers) {
    auto find_uav = [&](const AgentId& id) -> const UavState& {
      for (const auto& u : world.uavs) {
        if (u.id == id) return u;
      }
      throw Error(ErrorCode::kInvalidParams, "unknown UAV '" + id + "'");
    };
    auto find_ugv = [&](const AgentId& id) -> const UgvState& {
      for (const auto& g : world.ugvs) {
        if (g.id == id) return g;
      }
      throw Error(ErrorCode::kInvalidParams, "unknown UGV '" + id + "'");
    };

    std::vector<std::tuple<Seconds, AgentId, AgentId>> candidates;
    for (const auto& b : buyers) {
      const UavState& u = find_uav(b.bidder_id);
      for (const auto& a : sellers) {
        candidates.emplace_back(plan_rendezvous(u, find_ugv(a.bidder_id)).eta, b.bidder_id, a.bidder_id);
      }
    }
    std::sort(candidates.begin(), candidates.end());

    std::map<AgentId, AgentId> pairing;
    IdSet used_sellers;
    for (const auto& [eta, buyer, seller] : candidates) {
      if (pairing.count(buyer) || used_sellers.count(seller)) continue;
      pairing.emplace(buyer, seller);
      used_sellers.insert(seller);
    }
    return pairing;
  };
}

void start_sessions(WorldState& world, const RoundOutcome& outcome) {
  auto index_of = [](const auto& agents, const AgentId& id) {
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (agents[i].id == id) return i;
    }
    throw Error(ErrorCode::kInvalidParams, "unknown agent '" + id + "'");
  };
  for (const auto& [buyer, seller] : outcome.pairing) {
    ChargingSession s;
    s.uav_id = buyer;
    s.ugv_id = seller;
    s.uav_index = index_of(world.uavs, buyer);
    s.ugv_index = index_of(world.ugvs, seller);
    const auto a = outcome.assignments.find(buyer);
    if (a == outcome.assignments.end()) {
      throw Error(ErrorCode::kMissingAssignment, "paired buyer '" + buyer + "' has no assignment");
    }
    s.energy_target = static_cast<double>(a->second);
    world.sessions.push_back(std::move(s));
  }
}

bool sessions_complete(const WorldState& world) {
  return std::all_of(world.sessions.begin(), world.sessions.end(),
                     [](const ChargingSession& s) { return s.phase == SessionPhase::kComplete; });
}

void run_sessions(WorldState& world, const StepObserver& observer, std::size_t max_steps) {
  if (observer) observer(world);
  for (std::size_t step = 0; !sessions_complete(world); ++step) {
    if (step >= max_steps) {
      throw Error(ErrorCode::kSimulation, fmt::format("sessions unfinished after {} steps", max_steps));
    }
    advance_world(world, world.config.dt_s);
    if (observer) observer(world);
  }
}

void TraceWriter::operator()(const WorldState& world) {
  if (calls_++ % every_ != 0) return;
  std::vector<std::string_view> uav_phase(world.uavs.size(), "idle");
  std::vector<std::string_view> ugv_phase(world.ugvs.size(), "idle");
  for (const auto& s : world.sessions) {
    uav_phase[s.uav_index] = to_string(s.phase);
    ugv_phase[s.ugv_index] = to_string(s.phase);
  }
  for (std::size_t i = 0; i < world.uavs.size(); ++i) {
    const auto& u = world.uavs[i];
    out_ << nlohmann::json{{"t", world.clock}, {"id", u.id}, {"x", u.x}, {"soc", u.soc}, {"phase", uav_phase[i]}}.dump()
         << '\n';
  }
  for (std::size_t j = 0; j < world.ugvs.size(); ++j) {
    const auto& g = world.ugvs[j];
    out_ << nlohmann::json{{"t", world.clock}, {"id", g.id}, {"x", g.x}, {"soc", g.supply}, {"phase", ugv_phase[j]}}
                .dump()
         << '\n';
  }
}

}  // namespace vwun
