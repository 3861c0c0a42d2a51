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
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vwun/dp.hpp"
#include "vwun/market.hpp"
#include "vwun/rng.hpp"

namespace vwun {

// Privacy settings for one PPODA round. The valuation (Gaussian) and
// assignment (exponential) phases draw on separate budgets.
struct PpodaParams {
  dp::PrivacyParams valuation;
  double assignment_epsilon = 1.0;
  dp::SensitivityMode sensitivity_mode = dp::SensitivityMode::kRange;
  // Perturbed prices are clamped into this range.
  dp::PriceRange price_range{0.0, 15.0};
};

struct OfflineScheme {};
struct OnlineScheme {};
struct PpodaScheme {
  PpodaParams params;
};

using AuctionScheme = std::variant<OfflineScheme, OnlineScheme, PpodaScheme>;

// "offline", "online", "ppoda".
std::string scheme_name(const AuctionScheme& scheme);
// Human-readable series label, e.g. "PPODA (eps=0.1)".
std::string scheme_label(const AuctionScheme& scheme);

/// Single-budget PPODA as used in the case study: one epsilon for both phases.
AuctionScheme make_ppoda(double epsilon, double delta, dp::PriceRange price_range,
                         dp::SensitivityMode mode = dp::SensitivityMode::kRange);

struct BookInputs {
  std::vector<BuyerBid> bids;
  std::vector<SellerAsk> asks;
};

struct CollectedRound {
  BookInputs inputs;
  Seconds open_time = 0.0;
  Seconds close_time = 0.0;
};

// Opens at the first arrival and admits everything arriving within
// [open, open + max_waiting_time]. Throws EMPTY_STREAM on no arrivals.
CollectedRound collect_bids(const BookInputs& stream, Seconds max_waiting_time);

// Assigns winning buyers to winning sellers. Must return a bijection.
using PairingFn = std::function<std::map<AgentId, AgentId>(const std::vector<BuyerBid>& buyers,
                                                           const std::vector<SellerAsk>& sellers)>;

// Pairs in ascending id order on both sides.
std::map<AgentId, AgentId> pair_by_id(const std::vector<BuyerBid>& buyers,
                                      const std::vector<SellerAsk>& sellers);

struct RoundOutcome {
  ClearingOutcome clearing;
  std::map<AgentId, Price> payments;
  std::map<AgentId, WattHours> assignments;
  std::map<AgentId, AgentId> pairing;
  IdSet unmatched_buyers;
  Seconds round_open_time = 0.0;
  Seconds round_close_time = 0.0;

  bool operator==(const RoundOutcome&) const = default;
};

std::map<AgentId, WattHours> assign_energy(const std::vector<BuyerBid>& winners, const AuctionScheme& scheme,
                                           Rng& rng);

/// Clears exactly the given inputs under `scheme`. Baselines clear on
/// reported prices; PPODA perturbs every reported price first and clears,
/// prices and selects on the perturbed book.
RoundOutcome run_round(const BookInputs& inputs, const AuctionScheme& scheme, const RngStreams& rng,
                       const PairingFn& pairing = pair_by_id);

/// Offline clears the whole stream; Online and PPODA clear the window
/// gathered by collect_bids.
RoundOutcome run_auction(const BookInputs& stream, const AuctionScheme& scheme, Seconds max_waiting_time,
                         const RngStreams& rng, const PairingFn& pairing = pair_by_id);

struct OutcomeAnnouncement {
  struct Entry {
    AgentId id;
    Price payment = 0.0;
    std::optional<WattHours> assignment;  // buyers only
    std::optional<AgentId> partner;
  };
  std::size_t round = 0;
  std::vector<Entry> winning_buyers;
  std::vector<Entry> winning_sellers;
  Price scp = 0.0;
  Price bcp = 0.0;
  IdSet fallback_buyers;  // sent to a fixed charging/swap station
};

// Tracks rounds: the announcement is produced from a finished round and the
// auctioneer is then ready for the next one.
class Auctioneer {
 public:
  explicit Auctioneer(AuctionScheme scheme) : scheme_(std::move(scheme)) {}

  const AuctionScheme& scheme() const { return scheme_; }
  std::size_t rounds_released() const { return round_; }
  bool round_open() const { return pending_.has_value(); }

  const RoundOutcome& run(const BookInputs& stream, Seconds max_waiting_time, const RngStreams& rng,
                          const PairingFn& pairing = pair_by_id);

  OutcomeAnnouncement release();

 private:
  AuctionScheme scheme_;
  std::optional<RoundOutcome> pending_;
  std::size_t round_ = 0;
};

// Non-winning buyers of the round are flagged for fixed-station fallback.
// Raw (pre-perturbation) prices and demands never appear in the result.
OutcomeAnnouncement release_outcome(const RoundOutcome& outcome, std::size_t round = 0);

}  // namespace vwun
