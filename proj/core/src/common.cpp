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

#include "vwun/error.hpp"
#include "vwun/rng.hpp"

namespace vwun {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDuplicateId: return "DUPLICATE_ID";
    case ErrorCode::kNoMarket: return "NO_MARKET";
    case ErrorCode::kMissingAssignment: return "MISSING_ASSIGNMENT";
    case ErrorCode::kEmptyInput: return "EMPTY_INPUT";
    case ErrorCode::kInvalidRange: return "INVALID_RANGE";
    case ErrorCode::kInvalidParams: return "INVALID_PARAMS";
    case ErrorCode::kEmptyStream: return "EMPTY_STREAM";
    case ErrorCode::kPlacementFailure: return "PLACEMENT_FAILURE";
    case ErrorCode::kEnergyOverflow: return "ENERGY_OVERFLOW";
    case ErrorCode::kSupplyExhausted: return "SUPPLY_EXHAUSTED";
    case ErrorCode::kEmptyTable: return "EMPTY_TABLE";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::kIo: return "IO_ERROR";
    case ErrorCode::kSimulation: return "SIMULATION_ERROR";
  }
  return "UNKNOWN";
}

namespace {

// FNV-1a, 64-bit.
std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng RngStreams::stream(std::string_view name) const {
  const std::uint64_t h = hash_name(name);
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

RngStreams RngStreams::derive(std::string_view name) const {
  Rng r = stream(name);
  return RngStreams(r());
}

}  // namespace vwun
