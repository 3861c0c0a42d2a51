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

#include "vwun/dp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vwun/error.hpp"

namespace vwun::dp {

void PrivacyParams::validate() const {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "epsilon must be > 0, got " + std::to_string(epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "delta must lie in (0, 1), got " + std::to_string(delta));
  }
  if (!(sensitivity >= 0.0) || !std::isfinite(sensitivity)) {
    throw Error(ErrorCode::kInvalidParams, "sensitivity must be finite and >= 0");
  }
}

Price range_sensitivity(Price lo, Price hi) {
  if (!(hi >= lo)) throw Error(ErrorCode::kInvalidRange, "valuation range upper bound below lower bound");
  return hi - lo;
}

Price realized_sensitivity(std::span<const Price> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kEmptyInput, "realized sensitivity needs at least two valuations");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

double gaussian_sigma(const PrivacyParams& params) {
  params.validate();
  return params.sensitivity * std::sqrt(2.0 * std::log(1.25 / params.delta)) / params.epsilon;
}

std::vector<Price> perturb_prices(std::span<const Price> prices, double sigma, PriceRange clamp, Rng& rng) {
  std::vector<Price> out(prices.begin(), prices.end());
  if (sigma == 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& p : out) p = std::clamp(p + noise(rng), clamp.lo, clamp.hi);
  return out;
}

std::map<AgentId, Price> perturb_valuations(const std::map<AgentId, Price>& values,
                                            const PrivacyParams& params, PriceRange clamp, Rng& rng) {
  std::vector<Price> raw;
  raw.reserve(values.size());
  for (const auto& [id, v] : values) raw.push_back(v);
  const auto noisy = perturb_prices(raw, gaussian_sigma(params), clamp, rng);
  std::map<AgentId, Price> out;
  std::size_t i = 0;
  for (const auto& [id, v] : values) out.emplace(id, noisy[i++]);
  return out;
}

AssignmentSet build_assignment_set(WattHours min_demand, WattHours desirable_demand) {
  if (min_demand <= 0 || min_demand > desirable_demand) {
    throw Error(ErrorCode::kInvalidRange, "assignment range [" + std::to_string(min_demand) + ", " +
                                              std::to_string(desirable_demand) + "] is invalid");
  }
  AssignmentSet set;
  set.values.resize(static_cast<std::size_t>(desirable_demand - min_demand + 1));
  std::iota(set.values.begin(), set.values.end(), min_demand);
  return set;
}

double quality(WattHours energy, WattHours desirable_demand) {
  return static_cast<double>(energy) / static_cast<double>(desirable_demand);
}

AssignmentDistribution exp_mech_distribution(const AssignmentSet& set, double epsilon) {
  if (set.values.empty()) throw Error(ErrorCode::kEmptyInput, "empty assignment set");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::kInvalidParams, "epsilon must be >= 0");

  AssignmentDistribution dist{set, std::vector<double>(set.values.size(), 0.0)};
  const WattHours desirable = set.desirable();
  if (std::isinf(epsilon)) {
    dist.probabilities.back() = 1.0;
    return dist;
  }
  // Subtract the maximum quality (the desirable element, Q = 1) before exponentiating.
  const double q_max = quality(desirable, desirable);
  double norm = 0.0;
  for (std::size_t i = 0; i < set.values.size(); ++i) {
    dist.probabilities[i] = std::exp(epsilon * (quality(set.values[i], desirable) - q_max));
    norm += dist.probabilities[i];
  }
  for (auto& p : dist.probabilities) p /= norm;
  return dist;
}

WattHours sample_assignment(const AssignmentDistribution& dist, Rng& rng) {
  if (dist.support.values.size() == 1) return dist.support.values.front();
  std::discrete_distribution<std::size_t> pick(dist.probabilities.begin(), dist.probabilities.end());
  return dist.support.values[pick(rng)];
}

}  // namespace vwun::dp
