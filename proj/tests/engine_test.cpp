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

#include "oracles.hpp"
#include "vwun/engine.hpp"
#include "vwun/error.hpp"

namespace vwun {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BuyerBid bid(const std::string& id, Price p, Seconds t = 0.0, WattHours lo = 5, WattHours hi = 10) {
  return {id, p, hi, lo, t};
}
SellerAsk ask(const std::string& id, Price p, Seconds t = 0.0) { return {id, p, 100, 1, t}; }

AuctionScheme zero_noise_ppoda() {
  PpodaParams p;
  p.valuation = {1.0, 1e-5, 0.0};
  p.assignment_epsilon = kInf;
  p.price_range = {0.0, 15.0};
  return PpodaScheme{p};
}

TEST(CollectBids, WindowMembership) {
  const BookInputs stream{{bid("A", 5, 1.0), bid("B", 5, 5.0), bid("C", 5, 12.0)}, {}};
  const auto round = collect_bids(stream, 10.0);
  EXPECT_EQ(round.open_time, 1.0);
  EXPECT_EQ(round.close_time, 11.0);
  ASSERT_EQ(round.inputs.bids.size(), 2u);
  EXPECT_EQ(round.inputs.bids[0].bidder_id, "A");
  EXPECT_EQ(round.inputs.bids[1].bidder_id, "B");
}

TEST(CollectBids, ZeroWindowKeepsOpeningInstantOnly) {
  const BookInputs stream{{bid("A", 5, 2.0), bid("B", 5, 2.0001)}, {ask("X", 1, 2.0)}};
  const auto round = collect_bids(stream, 0.0);
  EXPECT_EQ(round.inputs.bids.size(), 1u);
  EXPECT_EQ(round.inputs.asks.size(), 1u);
}

TEST(CollectBids, WideWindowKeepsEverything) {
  const BookInputs stream{{bid("A", 5, 0.5), bid("B", 5, 80.0)}, {ask("X", 1, 40.0)}};
  const auto round = collect_bids(stream, 1000.0);
  EXPECT_EQ(round.inputs.bids, stream.bids);
  EXPECT_EQ(round.inputs.asks, stream.asks);
}

TEST(CollectBids, EmptyStreamThrows) {
  try {
    collect_bids({}, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyStream);
  }
}

TEST(AssignEnergy, BaselineGivesDesirable) {
  Rng rng(1);
  const auto a = assign_energy({bid("A", 5, 0, 5, 10)}, OnlineScheme{}, rng);
  EXPECT_EQ(a.at("A"), 10);
}

TEST(AssignEnergy, PpodaZeroBudgetIsUniform) {
  PpodaParams p;
  p.assignment_epsilon = 0.0;
  const AuctionScheme scheme = PpodaScheme{p};
  std::vector<int> counts(6, 0);
  constexpr int kSeeds = 60'000;
  for (int s = 0; s < kSeeds; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    const WattHours e = assign_energy({bid("A", 5, 0, 5, 10)}, scheme, rng).at("A");
    ASSERT_GE(e, 5);
    ASSERT_LE(e, 10);
    ++counts[static_cast<std::size_t>(e - 5)];
  }
  for (int c : counts) EXPECT_NEAR(c / static_cast<double>(kSeeds), 1.0 / 6.0, 0.01);
}

TEST(AssignEnergy, PpodaSingletonRange) {
  Rng rng(4);
  const auto a = assign_energy({bid("A", 5, 0, 7, 7)}, make_ppoda(1.0, 1e-5, {0.0, 15.0}), rng);
  EXPECT_EQ(a.at("A"), 7);
}

TEST(AssignEnergy, InvalidRangePropagates) {
  Rng rng(4);
  EXPECT_THROW(assign_energy({bid("A", 5, 0, 9, 7)}, OnlineScheme{}, rng), Error);
}

TEST(RunRound, ZeroNoiseDegeneratesToOnline) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rb = testing::random_book(gen, 10, trial % 2 == 0);
    const BookInputs inputs{rb.bids, rb.asks};
    const RngStreams rng(static_cast<std::uint64_t>(trial));
    EXPECT_EQ(run_round(inputs, OnlineScheme{}, rng), run_round(inputs, zero_noise_ppoda(), rng));
  }
}

TEST(RunRound, CaseStudyBookShape) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> price(0.0, 15.0);
  BookInputs inputs;
  for (int i = 0; i < 30; ++i) inputs.bids.push_back(bid("uav-" + std::to_string(i), price(gen)));
  for (int j = 0; j < 40; ++j) inputs.asks.push_back(ask("ugv-" + std::to_string(j), price(gen)));
  for (const auto& scheme : {AuctionScheme{OnlineScheme{}}, make_ppoda(1.0, 1e-5, {0, 15})}) {
    const auto out = run_round(inputs, scheme, RngStreams(11));
    EXPECT_LE(out.clearing.w, 30u);
    EXPECT_EQ(out.assignments.size(), out.clearing.w);
    EXPECT_EQ(out.pairing.size(), out.clearing.w);
    EXPECT_EQ(out.unmatched_buyers.size() + out.clearing.w, 30u);
  }
}

TEST(RunRound, EmptyAskSide) {
  const BookInputs inputs{{bid("A", 10), bid("B", 4)}, {}};
  const auto out = run_round(inputs, OnlineScheme{}, RngStreams(1));
  EXPECT_EQ(out.clearing.w, 0u);
  EXPECT_TRUE(out.assignments.empty());
  EXPECT_EQ(out.unmatched_buyers, (IdSet{"A", "B"}));
}

TEST(RunRound, AssignmentsStayInRange) {
  std::mt19937_64 gen(19);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rb = testing::random_book(gen, 10, false);
    const auto out = run_round({rb.bids, rb.asks}, make_ppoda(0.5, 1e-5, {0, 15}), RngStreams(trial));
    std::set<AgentId> keys;
    for (const auto& [id, e] : out.assignments) {
      keys.insert(id);
      const auto it = std::find_if(rb.bids.begin(), rb.bids.end(), [&](const BuyerBid& b) { return b.bidder_id == id; });
      ASSERT_NE(it, rb.bids.end());
      ASSERT_GE(e, it->min_demand);
      ASSERT_LE(e, it->desirable_demand);
    }
    ASSERT_EQ(keys, out.clearing.winning_buyers);
    for (const auto& id : out.unmatched_buyers) ASSERT_FALSE(out.clearing.winning_buyers.count(id));
  }
}

TEST(RunRound, PpodaClearsOnPerturbedPrices) {
  const BookInputs inputs{{bid("A", 10), bid("B", 8), bid("C", 5)}, {ask("X", 4), ask("Y", 6), ask("Z", 9)}};
  const auto out = run_round(inputs, make_ppoda(1.0, 1e-5, {0, 15}), RngStreams(42));
  if (out.clearing.w > 0) {
    // Perturbed clearing prices are continuous draws; none coincides with a raw report.
    for (double raw : {10.0, 8.0, 5.0, 4.0, 6.0, 9.0}) {
      EXPECT_NE(out.clearing.bcp, raw);
      EXPECT_NE(out.clearing.scp, raw);
    }
  }
}

TEST(RunRound, IdOnBothSidesThrows) {
  const BookInputs inputs{{bid("A", 10)}, {ask("A", 4)}};
  EXPECT_THROW(run_round(inputs, OnlineScheme{}, RngStreams(1)), Error);
}

TEST(RunAuction, WideWindowOnlineEqualsOffline) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> t(0.0, 90.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto rb = testing::random_book(gen, 10, false);
    for (auto& b : rb.bids) b.arrival_time = t(gen);
    for (auto& a : rb.asks) a.arrival_time = t(gen);
    if (rb.bids.empty() && rb.asks.empty()) continue;
    const BookInputs stream{rb.bids, rb.asks};
    const RngStreams rng(static_cast<std::uint64_t>(trial));
    const auto online = run_auction(stream, OnlineScheme{}, 90.0, rng);
    const auto offline = run_auction(stream, OfflineScheme{}, 90.0, rng);
    EXPECT_EQ(online.clearing, offline.clearing);
    EXPECT_EQ(online.assignments, offline.assignments);
    EXPECT_EQ(online.payments, offline.payments);
  }
}

TEST(RunAuction, LateBuyersAreUnmatched) {
  const BookInputs stream{{bid("A", 10, 0.0), bid("B", 12, 50.0)}, {ask("X", 1, 0.0), ask("Y", 1, 1.0)}};
  const auto out = run_auction(stream, OnlineScheme{}, 10.0, RngStreams(3));
  EXPECT_EQ(out.clearing.winning_buyers, IdSet{"A"});
  EXPECT_EQ(out.unmatched_buyers, IdSet{"B"});
  EXPECT_EQ(out.round_close_time, 10.0);
}

TEST(ReleaseOutcome, FlagsLosersForFallback) {
  const BookInputs inputs{{bid("A", 10), bid("B", 9), bid("C", 1)}, {ask("X", 2), ask("Y", 3)}};
  const auto out = run_round(inputs, OnlineScheme{}, RngStreams(1));
  ASSERT_EQ(out.clearing.w, 2u);
  const auto ann = release_outcome(out);
  EXPECT_EQ(ann.fallback_buyers, IdSet{"C"});
  EXPECT_EQ(ann.winning_buyers.size(), 2u);
  for (const auto& e : ann.winning_buyers) {
    EXPECT_EQ(e.payment, out.clearing.bcp);
    EXPECT_TRUE(e.assignment.has_value());
    EXPECT_TRUE(e.partner.has_value());
  }
  for (const auto& e : ann.winning_sellers) EXPECT_EQ(e.payment, out.clearing.scp);
}

TEST(ReleaseOutcome, NoTradeFlagsEveryone) {
  const BookInputs inputs{{bid("A", 1), bid("B", 2)}, {ask("X", 5)}};
  const auto ann = release_outcome(run_round(inputs, OnlineScheme{}, RngStreams(1)));
  EXPECT_TRUE(ann.winning_buyers.empty());
  EXPECT_EQ(ann.fallback_buyers, (IdSet{"A", "B"}));
}

TEST(ReleaseOutcome, PpodaAnnouncementHidesRawReports) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> price(0.0, 15.0);
  BookInputs inputs;
  for (int i = 0; i < 20; ++i) inputs.bids.push_back(bid("b" + std::to_string(i), price(gen), 0, 5, 10));
  for (int j = 0; j < 20; ++j) inputs.asks.push_back(ask("s" + std::to_string(j), price(gen)));
  const auto ann = release_outcome(run_round(inputs, make_ppoda(1.0, 1e-5, {0, 15}), RngStreams(9)));
  std::vector<double> announced{ann.scp, ann.bcp};
  for (const auto& e : ann.winning_buyers) announced.push_back(e.payment);
  for (const auto& e : ann.winning_sellers) announced.push_back(e.payment);
  for (double v : announced) {
    for (const auto& b : inputs.bids) EXPECT_NE(v, b.unit_price);
    for (const auto& a : inputs.asks) EXPECT_NE(v, a.unit_price);
  }
}

TEST(Auctioneer, ReleaseResetsForNextRound) {
  Auctioneer auctioneer(OnlineScheme{});
  const BookInputs stream{{bid("A", 10)}, {ask("X", 2)}};
  auctioneer.run(stream, 10.0, RngStreams(1));
  EXPECT_TRUE(auctioneer.round_open());
  EXPECT_THROW(auctioneer.run(stream, 10.0, RngStreams(1)), Error);
  const auto first = auctioneer.release();
  EXPECT_EQ(first.round, 0u);
  EXPECT_FALSE(auctioneer.round_open());
  EXPECT_THROW(auctioneer.release(), Error);
  auctioneer.run(stream, 10.0, RngStreams(2));
  EXPECT_EQ(auctioneer.release().round, 1u);
  EXPECT_EQ(auctioneer.rounds_released(), 2u);
}

TEST(Scheme, NamesAndLabels) {
  EXPECT_EQ(scheme_name(OfflineScheme{}), "offline");
  EXPECT_EQ(scheme_name(OnlineScheme{}), "online");
  EXPECT_EQ(scheme_name(make_ppoda(0.1, 1e-5, {0, 15})), "ppoda");
  EXPECT_EQ(scheme_label(make_ppoda(0.1, 1e-5, {0, 15})), "PPODA (eps=0.1)");
  EXPECT_THROW(make_ppoda(0.0, 1e-5, {0, 15}), Error);
}

}  // namespace
}  // namespace vwun
