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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "vwun/error.hpp"
#include "vwun/world.hpp"

namespace vwun {
namespace {

UavState uav_at(double x, double speed = 10.0) {
  UavState u;
  u.id = "uav-00";
  u.x = x;
  u.max_speed = speed;
  u.capacity = 17.0;
  return u;
}

UgvState ugv_at(double x, double speed) {
  UgvState g;
  g.id = "ugv-00";
  g.x = x;
  g.speed = speed;
  g.supply = 200.0;
  return g;
}

// One UAV, one UGV, one session starting in `phase`.
WorldState tiny_world(SessionPhase phase) {
  WorldState w;
  w.config.num_uavs = 1;
  w.config.num_ugvs = 1;
  w.uavs.push_back(uav_at(1000.0));
  w.ugvs.push_back(ugv_at(1000.0, 10.0));
  ChargingSession s;
  s.uav_id = "uav-00";
  s.ugv_id = "ugv-00";
  s.phase = phase;
  s.rendezvous_x = 1000.0;
  s.energy_target = 8.0;
  w.sessions.push_back(s);
  return w;
}

TEST(InitScenario, DefaultCaseStudy) {
  const ScenarioConfig cfg;
  const auto w = init_scenario(cfg, RngStreams(7));
  ASSERT_EQ(w.uavs.size(), 30u);
  ASSERT_EQ(w.ugvs.size(), 40u);
  int strategic_uavs = 0, strategic_ugvs = 0;
  for (std::size_t i = 0; i < w.uavs.size(); ++i) {
    const auto& u = w.uavs[i];
    EXPECT_DOUBLE_EQ(u.x, 50.0 + 100.0 * static_cast<double>(i));
    EXPECT_EQ(u.altitude, 5.0);
    EXPECT_EQ(u.capacity, 17.0);
    EXPECT_GE(u.valuation, 0.0);
    EXPECT_LE(u.valuation, 15.0);
    EXPECT_GE(u.min_demand, 5);
    EXPECT_LE(u.min_demand, u.desirable_demand);
    EXPECT_LE(u.desirable_demand, 10);
    EXPECT_GE(u.soc, 0.0);
    EXPECT_LE(u.soc + static_cast<double>(u.desirable_demand), 17.0);
    strategic_uavs += !u.honest;
  }
  for (const auto& g : w.ugvs) {
    EXPECT_GE(g.speed, 20.0 / 3.6 - 1e-12);
    EXPECT_LE(g.speed, 60.0 / 3.6 + 1e-12);
    EXPECT_GE(g.x, 0.0);
    EXPECT_LE(g.x, 3000.0);
    EXPECT_TRUE(g.lane == 0 || g.lane == 1);
    strategic_ugvs += !g.honest;
    for (const auto& h : w.ugvs) {
      if (&g != &h && g.lane == h.lane) EXPECT_GE(std::abs(g.x - h.x), 30.0);
    }
  }
  EXPECT_EQ(strategic_uavs, 6);
  EXPECT_EQ(strategic_ugvs, 8);
}

TEST(InitScenario, Deterministic) {
  const ScenarioConfig cfg;
  EXPECT_EQ(init_scenario(cfg, RngStreams(5)), init_scenario(cfg, RngStreams(5)));
  EXPECT_NE(init_scenario(cfg, RngStreams(5)), init_scenario(cfg, RngStreams(6)));
}

TEST(InitScenario, InfeasiblePacking) {
  ScenarioConfig cfg;
  cfg.num_ugvs = 201;  // 2 lanes * floor(3000 / 30) = 200 slots
  try {
    init_scenario(cfg, RngStreams(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPlacementFailure);
  }
}

TEST(InitScenario, RejectsInvalidConfig) {
  ScenarioConfig cfg;
  cfg.wpt_efficiency = 1.2;
  EXPECT_THROW(init_scenario(cfg, RngStreams(1)), Error);
}

TEST(PlanRendezvous, EqualArrivalPoint) {
  const auto r = plan_rendezvous(uav_at(1000.0, 10.0), ugv_at(1300.0, 15.0));
  EXPECT_DOUBLE_EQ(r.x, 1120.0);
  EXPECT_DOUBLE_EQ(r.eta, 12.0);
}

TEST(PlanRendezvous, CoLocated) {
  const auto r = plan_rendezvous(uav_at(700.0), ugv_at(700.0, 12.0));
  EXPECT_EQ(r.x, 700.0);
  EXPECT_EQ(r.eta, 0.0);
}

TEST(PlanRendezvous, FastUgvComesToUav) {
  const auto r = plan_rendezvous(uav_at(400.0), ugv_at(2500.0, std::numeric_limits<double>::infinity()));
  EXPECT_EQ(r.x, 400.0);
  // Approaching the limit from finite speeds.
  EXPECT_NEAR(plan_rendezvous(uav_at(400.0), ugv_at(2500.0, 1e9)).x, 400.0, 1e-4);
}

TEST(PlanRendezvous, MinimizesLaterArrival) {
  const auto u = uav_at(200.0, 10.0);
  const auto g = ugv_at(2000.0, 16.0);
  const auto r = plan_rendezvous(u, g);
  for (double x = 0.0; x <= 3000.0; x += 0.5) {
    const double t = std::max(std::abs(x - u.x) / u.max_speed, std::abs(x - g.x) / g.speed);
    ASSERT_GE(t + 1e-9, r.eta);
  }
}

TEST(ApplyCharging, EfficiencyLoss) {
  auto u = uav_at(0.0);
  auto g = ugv_at(0.0, 10.0);
  u.soc = 4.0;
  apply_charging(u, g, 8.0, 0.8);
  EXPECT_DOUBLE_EQ(u.soc, 12.0);
  EXPECT_DOUBLE_EQ(g.supply, 190.0);
}

TEST(ApplyCharging, ZeroIsNoop) {
  auto u = uav_at(0.0);
  auto g = ugv_at(0.0, 10.0);
  const auto u0 = u;
  const auto g0 = g;
  apply_charging(u, g, 0.0, 0.8);
  EXPECT_EQ(u, u0);
  EXPECT_EQ(g, g0);
}

TEST(ApplyCharging, Overflow) {
  auto u = uav_at(0.0);
  auto g = ugv_at(0.0, 10.0);
  u.soc = 16.0;
  try {
    apply_charging(u, g, 2.0, 0.8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEnergyOverflow);
  }
  EXPECT_EQ(u.soc, 16.0);
}

TEST(ApplyCharging, SupplyExhausted) {
  auto u = uav_at(0.0);
  auto g = ugv_at(0.0, 10.0);
  g.supply = 5.0;
  try {
    apply_charging(u, g, 5.0, 0.8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSupplyExhausted);
  }
}

TEST(StepSession, TrackingTimerBoundary) {
  auto w = tiny_world(SessionPhase::kTracking);
  w.config.tracking_duration_s = 10.0;
  step_session(w.sessions[0], w, 10.0);
  EXPECT_EQ(w.sessions[0].phase, SessionPhase::kLanding);

  auto w2 = tiny_world(SessionPhase::kTracking);
  step_session(w2.sessions[0], w2, 9.9);
  EXPECT_EQ(w2.sessions[0].phase, SessionPhase::kTracking);
}

TEST(StepSession, ChargingIncrement) {
  auto w = tiny_world(SessionPhase::kCharging);
  step_session(w.sessions[0], w, 0.1);
  EXPECT_NEAR(w.uavs[0].soc, 100.0 * 0.1 * 0.8 / 3600.0, 1e-15);
  EXPECT_NEAR(w.uavs[0].soc, 0.00222, 1e-5);
}

TEST(StepSession, ChargingDuration) {
  auto w = tiny_world(SessionPhase::kCharging);
  int steps = 0;
  while (w.sessions[0].phase == SessionPhase::kCharging) {
    step_session(w.sessions[0], w, 0.1);
    ++steps;
  }
  // 8 Wh * 3600 / (100 W * 0.8) = 360 s
  EXPECT_NEAR(steps * 0.1, 360.0, 0.1 + 1e-9);
  EXPECT_EQ(w.sessions[0].phase, SessionPhase::kComplete);
  EXPECT_EQ(w.sessions[0].energy_delivered, w.sessions[0].energy_target);
  EXPECT_NEAR(w.uavs[0].soc, 8.0, 1e-9);
  EXPECT_NEAR(w.sessions[0].energy_delivered, 0.8 * w.sessions[0].energy_dispensed, 1e-9);
}

TEST(StepSession, FullPhaseSequence) {
  auto w = tiny_world(SessionPhase::kUgvSelection);
  w.uavs[0].x = 900.0;
  w.ugvs[0].x = 1200.0;
  std::vector<SessionPhase> seen{w.sessions[0].phase};
  run_sessions(w, [&](const WorldState& s) {
    if (s.sessions[0].phase != seen.back()) seen.push_back(s.sessions[0].phase);
  });
  EXPECT_EQ(seen, (std::vector<SessionPhase>{SessionPhase::kUgvSelection, SessionPhase::kRoutePlanning,
                                             SessionPhase::kRendezvous, SessionPhase::kTracking,
                                             SessionPhase::kLanding, SessionPhase::kCharging,
                                             SessionPhase::kComplete}));
  EXPECT_FALSE(w.uavs[0].target_x.has_value());
  EXPECT_NEAR(w.uavs[0].x, w.ugvs[0].x, 1.0);
}

TEST(AdvanceWorld, UnitConversion) {
  WorldState w;
  auto g = ugv_at(0.0, 36.0 / 3.6);
  g.target_x = 100.0;
  w.ugvs.push_back(g);
  advance_world(w, 1.0);
  EXPECT_DOUBLE_EQ(w.ugvs[0].x, 10.0);
}

TEST(AdvanceWorld, IdleWorldOnlyTicksClock) {
  auto w = init_scenario(ScenarioConfig{}, RngStreams(2));
  auto before = w;
  advance_world(w, 0.5);
  EXPECT_EQ(w.clock, 0.5);
  before.clock = 0.5;
  EXPECT_EQ(w, before);
}

TEST(AdvanceWorld, NoOvershoot) {
  WorldState w;
  auto u = uav_at(99.0, 10.0);
  u.target_x = 100.0;
  w.uavs.push_back(u);
  advance_world(w, 1.0);
  EXPECT_EQ(w.uavs[0].x, 100.0);
  EXPECT_THROW(advance_world(w, 0.0), Error);
}

TEST(AdvanceWorld, ClipsToRoad) {
  WorldState w;
  auto u = uav_at(2995.0, 10.0);
  u.target_x = 5000.0;
  w.uavs.push_back(u);
  advance_world(w, 1.0);
  EXPECT_EQ(w.uavs[0].x, 3000.0);
}

TEST(MakeBids, HonestWorldReportsTruth) {
  ScenarioConfig cfg;
  cfg.strategic_fraction = 0.0;
  const auto w = init_scenario(cfg, RngStreams(3));
  const auto bids = make_bids(w, RngStreams(4));
  const auto truth = true_valuations(w);
  for (const auto& b : bids.bids) EXPECT_EQ(b.unit_price, truth.at(b.bidder_id));
  for (const auto& a : bids.asks) EXPECT_EQ(a.unit_price, truth.at(a.bidder_id));
}

TEST(MakeBids, StrategicShadingFactors) {
  ScenarioConfig cfg;
  cfg.strategic_fraction = 1.0;
  const auto w = init_scenario(cfg, RngStreams(3));
  const auto bids = make_bids(w, RngStreams(4));
  const auto truth = true_valuations(w);
  for (const auto& b : bids.bids) {
    const double v = truth.at(b.bidder_id);
    EXPECT_GE(b.unit_price, 0.5 * v);
    EXPECT_LE(b.unit_price, 0.9 * v);
    EXPECT_GE(b.arrival_time, 0.0);
    EXPECT_LE(b.arrival_time, cfg.arrival_horizon_s);
  }
  for (const auto& a : bids.asks) {
    const double c = truth.at(a.bidder_id);
    EXPECT_GE(a.unit_price, 1.1 * c);
    EXPECT_LE(a.unit_price, 1.5 * c);
  }
}

TEST(Pairing, GreedyNearestRendezvous) {
  WorldState w;
  w.uavs = {uav_at(100.0), uav_at(2000.0)};
  w.uavs[1].id = "uav-01";
  w.ugvs = {ugv_at(2100.0, 10.0), ugv_at(150.0, 10.0)};
  w.ugvs[1].id = "ugv-01";
  const auto pair = nearest_rendezvous_pairing(w);
  const auto p = pair({{"uav-00", 1, 10, 5, 0}, {"uav-01", 1, 10, 5, 0}}, {{"ugv-00", 1, 10, 1, 0}, {"ugv-01", 1, 10, 1, 0}});
  EXPECT_EQ(p, (std::map<AgentId, AgentId>{{"uav-00", "ugv-01"}, {"uav-01", "ugv-00"}}));
}

TEST(TraceWriter, OneRecordPerAgent) {
  auto w = init_scenario(ScenarioConfig{}, RngStreams(2));
  std::ostringstream out;
  TraceWriter trace(out);
  trace(w);
  std::istringstream lines(out.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    EXPECT_NE(line.find("\"phase\":\"idle\""), std::string::npos);
    ++n;
  }
  EXPECT_EQ(n, 70);
}

}  // namespace
}  // namespace vwun
