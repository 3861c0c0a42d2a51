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

#include <limits>
#include <map>
#include <span>
#include <vector>

#include "vwun/market.hpp"
#include "vwun/rng.hpp"

namespace vwun::dp {

struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-5;
  Price sensitivity = 15.0;

  // Throws INVALID_PARAMS unless epsilon > 0, 0 < delta < 1, sensitivity >= 0.
  void validate() const;
};

enum class SensitivityMode {
  kRange,     // declared [lo, hi] valuation range, data independent
  kRealized,  // max minus min of the reported valuations
};

struct PriceRange {
  Price lo = 0.0;
  Price hi = std::numeric_limits<double>::infinity();
};

Price range_sensitivity(Price lo, Price hi);
Price realized_sensitivity(std::span<const Price> values);

/// Classic analytic Gaussian calibration: Δ·sqrt(2 ln(1.25/δ)) / ε.
double gaussian_sigma(const PrivacyParams& params);

// Adds N(0, sigma^2) to each price, then clamps to `clamp`. sigma = 0 is
// the identity.
std::vector<Price> perturb_prices(std::span<const Price> prices, double sigma, PriceRange clamp, Rng& rng);

std::map<AgentId, Price> perturb_valuations(const std::map<AgentId, Price>& values,
                                            const PrivacyParams& params, PriceRange clamp, Rng& rng);

/// Consecutive integer energy levels [min_demand, desirable_demand].
struct AssignmentSet {
  std::vector<WattHours> values;

  WattHours desirable() const { return values.back(); }
};

struct AssignmentDistribution {
  AssignmentSet support;
  std::vector<double> probabilities;
};

AssignmentSet build_assignment_set(WattHours min_demand, WattHours desirable_demand);

double quality(WattHours energy, WattHours desirable_demand);

// Pr(e) ∝ exp(epsilon * Q(e)). epsilon = +inf puts all mass on the
// desirable element.
AssignmentDistribution exp_mech_distribution(const AssignmentSet& set, double epsilon);

WattHours sample_assignment(const AssignmentDistribution& dist, Rng& rng);

}  // namespace vwun::dp
