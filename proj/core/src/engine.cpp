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

#include "vwun/engine.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "vwun/error.hpp"

namespace vwun {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const PpodaParams* ppoda_params(const AuctionScheme& scheme) {
  const auto* p = std::get_if<PpodaScheme>(&scheme);
  return p ? &p->params : nullptr;
}

void require_globally_unique(const BookInputs& inputs) {
  IdSet buyers;
  for (const auto& b : inputs.bids) buyers.insert(b.bidder_id);
  for (const auto& a : inputs.asks) {
    if (buyers.count(a.bidder_id)) {
      throw Error(ErrorCode::kDuplicateId, "id '" + a.bidder_id + "' appears as both buyer and seller");
    }
  }
}

// Replaces every reported price with its perturbed counterpart.
BookInputs perturb_book(const BookInputs& inputs, const PpodaParams& params, Rng& rng) {
  dp::PrivacyParams privacy = params.valuation;
  if (params.sensitivity_mode == dp::SensitivityMode::kRealized) {
    std::vector<Price> reported;
    for (const auto& b : inputs.bids) reported.push_back(b.unit_price);
    for (const auto& a : inputs.asks) reported.push_back(a.unit_price);
    if (reported.size() >= 2) privacy.sensitivity = dp::realized_sensitivity(reported);
  }

  std::map<AgentId, Price> bid_prices;
  std::map<AgentId, Price> ask_prices;
  for (const auto& b : inputs.bids) bid_prices.emplace(b.bidder_id, b.unit_price);
  for (const auto& a : inputs.asks) ask_prices.emplace(a.bidder_id, a.unit_price);
  const auto noisy_bids = dp::perturb_valuations(bid_prices, privacy, params.price_range, rng);
  const auto noisy_asks = dp::perturb_valuations(ask_prices, privacy, params.price_range, rng);

  BookInputs out = inputs;
  for (auto& b : out.bids) b.unit_price = noisy_bids.at(b.bidder_id);
  for (auto& a : out.asks) a.unit_price = noisy_asks.at(a.bidder_id);
  return out;
}

}  // namespace

std::string scheme_name(const AuctionScheme& scheme) {
  return std::visit(Overloaded{[](const OfflineScheme&) { return std::string("offline"); },
                               [](const OnlineScheme&) { return std::string("online"); },
                               [](const PpodaScheme&) { return std::string("ppoda"); }},
                    scheme);
}

std::string scheme_label(const AuctionScheme& scheme) {
  return std::visit(
      Overloaded{[](const OfflineScheme&) { return std::string("Offline"); },
                 [](const OnlineScheme&) { return std::string("Online"); },
                 [](const PpodaScheme& p) { return fmt::format("PPODA (eps={:g})", p.params.valuation.epsilon); }},
      scheme);
}

AuctionScheme make_ppoda(double epsilon, double delta, dp::PriceRange price_range, dp::SensitivityMode mode) {
  PpodaParams p;
  p.valuation = dp::PrivacyParams{epsilon, delta, dp::range_sensitivity(price_range.lo, price_range.hi)};
  p.valuation.validate();
  p.assignment_epsilon = epsilon;
  p.sensitivity_mode = mode;
  p.price_range = price_range;
  return PpodaScheme{p};
}

CollectedRound collect_bids(const BookInputs& stream, Seconds max_waiting_time) {
  if (stream.bids.empty() && stream.asks.empty()) {
    throw Error(ErrorCode::kEmptyStream, "no bids or asks arrived");
  }
  if (max_waiting_time < 0.0) throw Error(ErrorCode::kInvalidParams, "max waiting time must be >= 0");

  Seconds open = std::numeric_limits<double>::infinity();
  for (const auto& b : stream.bids) open = std::min(open, b.arrival_time);
  for (const auto& a : stream.asks) open = std::min(open, a.arrival_time);

  CollectedRound round;
  round.open_time = open;
  round.close_time = open + max_waiting_time;
  for (const auto& b : stream.bids) {
    if (b.arrival_time <= round.close_time) round.inputs.bids.push_back(b);
  }
  for (const auto& a : stream.asks) {
    if (a.arrival_time <= round.close_time) round.inputs.asks.push_back(a);
  }
  return round;
}

std::map<AgentId, AgentId> pair_by_id(const std::vector<BuyerBid>& buyers, const std::vector<SellerAsk>& sellers) {
  std::vector<AgentId> b;
  std::vector<AgentId> s;
  for (const auto& x : buyers) b.push_back(x.bidder_id);
  for (const auto& x : sellers) s.push_back(x.bidder_id);
  std::sort(b.begin(), b.end());
  std::sort(s.begin(), s.end());
  std::map<AgentId, AgentId> out;
  for (std::size_t i = 0; i < std::min(b.size(), s.size()); ++i) out.emplace(b[i], s[i]);
  return out;
}

std::map<AgentId, WattHours> assign_energy(const std::vector<BuyerBid>& winners, const AuctionScheme& scheme,
                                           Rng& rng) {
  std::vector<const BuyerBid*> ordered;
  for (const auto& b : winners) ordered.push_back(&b);
  std::sort(ordered.begin(), ordered.end(),
            [](const BuyerBid* a, const BuyerBid* b) { return a->bidder_id < b->bidder_id; });

  std::map<AgentId, WattHours> out;
  const PpodaParams* privacy = ppoda_params(scheme);
  for (const BuyerBid* b : ordered) {
    const auto set = dp::build_assignment_set(b->min_demand, b->desirable_demand);
    if (privacy == nullptr) {
      out.emplace(b->bidder_id, set.desirable());
      continue;
    }
    const auto dist = dp::exp_mech_distribution(set, privacy->assignment_epsilon);
    out.emplace(b->bidder_id, dp::sample_assignment(dist, rng));
  }
  return out;
}

RoundOutcome run_round(const BookInputs& inputs, const AuctionScheme& scheme, const RngStreams& rng,
                       const PairingFn& pairing) {
  require_globally_unique(inputs);

  const PpodaParams* privacy = ppoda_params(scheme);
  BookInputs cleared_on = inputs;
  if (privacy != nullptr) {
    Rng noise = rng.stream(streams::kPerturbation);
    cleared_on = perturb_book(inputs, *privacy, noise);
  }

  const SortedBook book = sort_book(cleared_on.bids, cleared_on.asks);
  Rng selection = rng.stream(streams::kSelection);

  RoundOutcome out;
  out.clearing = clear(book, selection);
  out.payments = uniform_payments(out.clearing.winning_buyers, out.clearing.winning_sellers, out.clearing.scp,
                                  out.clearing.bcp);

  // Assignments and pairing come from the raw bids; demand is never perturbed
  // on input, only the released assignment is randomized.
  std::vector<BuyerBid> winning_bids;
  std::vector<SellerAsk> winning_asks;
  for (const auto& b : inputs.bids) {
    if (out.clearing.winning_buyers.count(b.bidder_id)) {
      winning_bids.push_back(b);
    } else {
      out.unmatched_buyers.insert(b.bidder_id);
    }
  }
  for (const auto& a : inputs.asks) {
    if (out.clearing.winning_sellers.count(a.bidder_id)) winning_asks.push_back(a);
  }

  Rng assignment = rng.stream(streams::kAssignment);
  out.assignments = assign_energy(winning_bids, scheme, assignment);
  if (!winning_bids.empty()) {
    out.pairing = pairing(winning_bids, winning_asks);
    if (out.pairing.size() != winning_bids.size()) {
      throw Error(ErrorCode::kMissingAssignment, "pairing did not cover every winning buyer");
    }
  }
  return out;
}

RoundOutcome run_auction(const BookInputs& stream, const AuctionScheme& scheme, Seconds max_waiting_time,
                         const RngStreams& rng, const PairingFn& pairing) {
  RoundOutcome out;
  if (std::holds_alternative<OfflineScheme>(scheme)) {
    out = run_round(stream, scheme, rng, pairing);
    Seconds open = std::numeric_limits<double>::infinity();
    Seconds close = 0.0;
    for (const auto& b : stream.bids) open = std::min(open, b.arrival_time), close = std::max(close, b.arrival_time);
    for (const auto& a : stream.asks) open = std::min(open, a.arrival_time), close = std::max(close, a.arrival_time);
    out.round_open_time = std::isinf(open) ? 0.0 : open;
    out.round_close_time = close;
  } else {
    const CollectedRound round = collect_bids(stream, max_waiting_time);
    out = run_round(round.inputs, scheme, rng, pairing);
    out.round_open_time = round.open_time;
    out.round_close_time = round.close_time;
  }
  // Buyers that missed the window are not served this round either.
  for (const auto& b : stream.bids) {
    if (!out.clearing.winning_buyers.count(b.bidder_id)) out.unmatched_buyers.insert(b.bidder_id);
  }
  return out;
}

OutcomeAnnouncement release_outcome(const RoundOutcome& outcome, std::size_t round) {
  OutcomeAnnouncement ann;
  ann.round = round;
  ann.scp = outcome.clearing.scp;
  ann.bcp = outcome.clearing.bcp;
  std::map<AgentId, AgentId> seller_partner;
  for (const auto& [buyer, seller] : outcome.pairing) seller_partner.emplace(seller, buyer);

  for (const auto& id : outcome.clearing.winning_buyers) {
    OutcomeAnnouncement::Entry e{id, outcome.payments.at(id), std::nullopt, std::nullopt};
    if (auto a = outcome.assignments.find(id); a != outcome.assignments.end()) e.assignment = a->second;
    if (auto p = outcome.pairing.find(id); p != outcome.pairing.end()) e.partner = p->second;
    ann.winning_buyers.push_back(std::move(e));
  }
  for (const auto& id : outcome.clearing.winning_sellers) {
    OutcomeAnnouncement::Entry e{id, outcome.payments.at(id), std::nullopt, std::nullopt};
    if (auto p = seller_partner.find(id); p != seller_partner.end()) e.partner = p->second;
    ann.winning_sellers.push_back(std::move(e));
  }
  ann.fallback_buyers = outcome.unmatched_buyers;
  return ann;
}

const RoundOutcome& Auctioneer::run(const BookInputs& stream, Seconds max_waiting_time, const RngStreams& rng,
                                    const PairingFn& pairing) {
  if (pending_) throw Error(ErrorCode::kSimulation, "previous round has not been released");
  pending_ = run_auction(stream, scheme_, max_waiting_time, rng, pairing);
  return *pending_;
}

OutcomeAnnouncement Auctioneer::release() {
  if (!pending_) throw Error(ErrorCode::kSimulation, "no round to release");
  OutcomeAnnouncement ann = release_outcome(*pending_, round_);
  pending_.reset();
  ++round_;
  return ann;
}

}  // namespace vwun
