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
#include <random>
#include <string_view>

namespace vwun {

using Rng = std::mt19937_64;

// Deterministic family of independent random streams keyed by name.
// The same (seed, name) pair always yields the same sequence, and distinct
// names yield unrelated sequences, so adding draws to one stream never
// shifts another.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  Rng stream(std::string_view name) const;

  // Child family, e.g. one per sweep cell.
  RngStreams derive(std::string_view name) const;

 private:
  std::uint64_t seed_;
};

// Well-known stream names.
namespace streams {
inline constexpr std::string_view kPlacement = "placement";
inline constexpr std::string_view kValuation = "valuation";
inline constexpr std::string_view kDemand = "demand";
inline constexpr std::string_view kSpeed = "speed";
inline constexpr std::string_view kStrategy = "strategy";
inline constexpr std::string_view kArrival = "arrival";
inline constexpr std::string_view kSelection = "selection";
inline constexpr std::string_view kPerturbation = "perturbation";
inline constexpr std::string_view kAssignment = "assignment";
}  // namespace streams

}  // namespace vwun
