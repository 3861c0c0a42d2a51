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

#include "vwun/market.hpp"

#include <algorithm>

#include "vwun/error.hpp"

namespace vwun {

namespace {

template <typename Order>
void require_unique_ids(const std::vector<Order>& side, const char* what) {
  IdSet seen;
  for (const auto& o : side) {
    if (!seen.insert(o.bidder_id).second) {
      throw Error(ErrorCode::kDuplicateId, std::string("duplicate ") + what + " id '" + o.bidder_id + "'");
    }
  }
}

// Partial Fisher-Yates: the first `count` entries become a uniform random subset.
IdSet sample_subset(const IdSet& pool, std::size_t count, Rng& rng) {
  std::vector<AgentId> items(pool.begin(), pool.end());
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, items.size() - 1);
    std::swap(items[i], items[pick(rng)]);
  }
  return IdSet(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(count));
}

}  // namespace

SortedBook sort_book(std::vector<BuyerBid> bids, std::vector<SellerAsk> asks) {
  require_unique_ids(bids, "buyer");
  require_unique_ids(asks, "seller");
  std::sort(bids.begin(), bids.end(), [](const BuyerBid& a, const BuyerBid& b) {
    if (a.unit_price != b.unit_price) return a.unit_price > b.unit_price;
    return a.bidder_id < b.bidder_id;
  });
  std::sort(asks.begin(), asks.end(), [](const SellerAsk& a, const SellerAsk& b) {
    if (a.unit_price != b.unit_price) return a.unit_price < b.unit_price;
    return a.bidder_id < b.bidder_id;
  });
  return SortedBook{std::move(bids), std::move(asks)};
}

Intersection find_intersection(const SortedBook& book) {
  const std::size_t depth = std::min(book.bids.size(), book.asks.size());
  // bid_i - ask_i is non-increasing, so the crossing indices form a prefix.
  std::size_t k = 0;
  while (k < depth && book.bids[k].unit_price >= book.asks[k].unit_price) ++k;
  if (k == 0) return {};
  return Intersection{k, book.asks[k - 1].unit_price, book.bids[k - 1].unit_price};
}

PotentialWinners determine_potential_winners(const SortedBook& book, const Intersection& cross) {
  if (cross.k == 0) throw Error(ErrorCode::kNoMarket, "supply and demand curves do not cross");
  PotentialWinners out;
  for (const auto& b : book.bids) {
    if (b.unit_price >= cross.bcp) out.buyers.insert(b.bidder_id);
  }
  for (const auto& a : book.asks) {
    if (a.unit_price <= cross.scp) out.sellers.insert(a.bidder_id);
  }
  return out;
}

Winners select_winners(const IdSet& potential_buyers, const IdSet& potential_sellers, Rng& rng) {
  const std::size_t w = std::min(potential_buyers.size(), potential_sellers.size());
  Winners out;
  out.w = w;
  out.buyers = sample_subset(potential_buyers, w, rng);
  out.sellers = sample_subset(potential_sellers, w, rng);
  return out;
}

std::map<AgentId, Price> uniform_payments(const IdSet& winning_buyers, const IdSet& winning_sellers,
                                          Price scp, Price bcp) {
  std::map<AgentId, Price> payments;
  for (const auto& id : winning_buyers) payments[id] = bcp;
  for (const auto& id : winning_sellers) payments[id] = scp;
  return payments;
}

ClearingOutcome clear(const SortedBook& book, Rng& selection_rng) {
  const Intersection cross = find_intersection(book);
  ClearingOutcome out;
  if (cross.k == 0) return out;
  out.k = cross.k;
  out.scp = cross.scp;
  out.bcp = cross.bcp;
  auto potential = determine_potential_winners(book, cross);
  auto winners = select_winners(potential.buyers, potential.sellers, selection_rng);
  out.potential_buyers = std::move(potential.buyers);
  out.potential_sellers = std::move(potential.sellers);
  out.winning_buyers = std::move(winners.buyers);
  out.winning_sellers = std::move(winners.sellers);
  out.w = winners.w;
  return out;
}

PayoffRecord compute_payoffs(const ClearingOutcome& outcome,
                             const std::map<AgentId, WattHours>& assignments,
                             const std::map<AgentId, AgentId>& pairing,
                             const std::map<AgentId, Price>& true_valuations) {
  auto valuation_of = [&](const AgentId& id) {
    auto it = true_valuations.find(id);
    if (it == true_valuations.end()) {
      throw Error(ErrorCode::kInvalidParams, "no true valuation for '" + id + "'");
    }
    return it->second;
  };

  PayoffRecord rec;
  for (const auto& buyer : outcome.winning_buyers) {
    auto a = assignments.find(buyer);
    if (a == assignments.end()) {
      throw Error(ErrorCode::kMissingAssignment, "winning buyer '" + buyer + "' has no assignment");
    }
    auto p = pairing.find(buyer);
    if (p == pairing.end()) {
      throw Error(ErrorCode::kMissingAssignment, "winning buyer '" + buyer + "' has no paired seller");
    }
    const double energy = static_cast<double>(a->second);
    rec.per_agent[buyer] += (valuation_of(buyer) - outcome.bcp) * energy / 1000.0;
    rec.per_agent[p->second] += (outcome.scp - valuation_of(p->second)) * energy / 1000.0;
    rec.traded_energy += a->second;
  }
  for (const auto& [id, payoff] : rec.per_agent) rec.total += payoff;
  rec.num_trades = outcome.w;
  return rec;
}

}  // namespace vwun
