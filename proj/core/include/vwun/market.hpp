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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vwun/rng.hpp"

namespace vwun {

using AgentId = std::string;
using IdSet = std::set<AgentId>;

// Unit price in cents per kWh.
using Price = double;
// Energy in Wh.
using WattHours = std::int64_t;
// Seconds since scenario start.
using Seconds = double;

/// A UAV's charging request.
struct BuyerBid {
  AgentId bidder_id;
  Price unit_price = 0.0;
  WattHours desirable_demand = 0;
  WattHours min_demand = 0;
  Seconds arrival_time = 0.0;

  bool operator==(const BuyerBid&) const = default;
};

/// A UGV's energy offer.
struct SellerAsk {
  AgentId bidder_id;
  Price unit_price = 0.0;
  WattHours desirable_supply = 0;
  WattHours min_supply = 0;
  Seconds arrival_time = 0.0;

  bool operator==(const SellerAsk&) const = default;
};

/// Bids by price non-increasing, asks by price non-decreasing; ties by
/// ascending bidder id.
struct SortedBook {
  std::vector<BuyerBid> bids;
  std::vector<SellerAsk> asks;
};

struct Intersection {
  std::size_t k = 0;  // number of crossing pairs; 0 means no feasible trade
  Price scp = 0.0;
  Price bcp = 0.0;

  bool operator==(const Intersection&) const = default;
};

struct PotentialWinners {
  IdSet buyers;
  IdSet sellers;
};

struct Winners {
  IdSet buyers;
  IdSet sellers;
  std::size_t w = 0;
};

struct ClearingOutcome {
  std::size_t k = 0;
  Price scp = 0.0;
  Price bcp = 0.0;
  IdSet potential_buyers;
  IdSet potential_sellers;
  IdSet winning_buyers;
  IdSet winning_sellers;
  std::size_t w = 0;

  bool operator==(const ClearingOutcome&) const = default;
};

struct PayoffRecord {
  std::map<AgentId, double> per_agent;  // cents
  double total = 0.0;                   // cents
  std::size_t num_trades = 0;
  WattHours traded_energy = 0;
};

SortedBook sort_book(std::vector<BuyerBid> bids, std::vector<SellerAsk> asks);

Intersection find_intersection(const SortedBook& book);

// Throws NO_MARKET when the intersection is empty.
PotentialWinners determine_potential_winners(const SortedBook& book, const Intersection& cross);

// Uniform random w-subsets with w = min(|buyers|, |sellers|).
Winners select_winners(const IdSet& potential_buyers, const IdSet& potential_sellers, Rng& rng);

// Winning buyers pay bcp, winning sellers receive scp (cents/kWh).
std::map<AgentId, Price> uniform_payments(const IdSet& winning_buyers, const IdSet& winning_sellers,
                                          Price scp, Price bcp);

// Full Phase-2 clearing on an already sorted book. k = 0 yields an empty
// outcome rather than an error.
ClearingOutcome clear(const SortedBook& book, Rng& selection_rng);

/// Quasilinear surplus at true valuations: buyer (v - bcp) e / 1000, paired
/// seller (scp - c) e / 1000, with e the buyer's assignment in Wh.
PayoffRecord compute_payoffs(const ClearingOutcome& outcome,
                             const std::map<AgentId, WattHours>& assignments,
                             const std::map<AgentId, AgentId>& pairing,
                             const std::map<AgentId, Price>& true_valuations);

}  // namespace vwun
