// Copyright 2026 The r5guard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef R5_HPC_HPP_
#define R5_HPC_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "r5/cpu.hpp"

namespace r5 {

/// The six countable events.
///  INT  integer computational instructions
///  JAL  direct jump-and-link instructions
///  CB   conditional branches
///  MIO  data accesses into configured memory-mapped I/O ranges
///  PFE  trap entries plus fence.i instructions
///  BDM  conditional branches the per-zone predictor mispredicted
enum class HpcEvent : uint8_t { kInt = 0, kJal, kCb, kMio, kPfe, kBdm };

constexpr int kHpcEventCount = 6;

const char* to_string(HpcEvent ev);
std::optional<HpcEvent> hpc_event_from_name(const std::string& name);

/// CSR event selector values are the event index plus one; zero is idle.
uint32_t hpc_event_selector(HpcEvent ev);
std::optional<HpcEvent> hpc_event_from_selector(uint32_t sel);

struct MmioRange {
  uint32_t base = 0;
  uint32_t size = 0;
};

struct HpcConfig {
  std::vector<MmioRange> mmio_ranges{{MemoryBus::kMmioBase,
                                      MemoryBus::kMmioSize}};
};

/// Per-zone branch direction model: 2^10 two-bit saturating counters
/// indexed by pc[11:2], starting weakly-not-taken. Values 2 and 3
/// predict taken.
class BranchPredictor {
 public:
  static constexpr int kIndexBits = 10;
  static constexpr size_t kTableSize = 1u << kIndexBits;

  BranchPredictor() { reset(); }

  bool predict(uint32_t pc) const { return table_[index(pc)] >= 2; }

  /// Applies the outcome and reports whether the prediction was wrong.
  bool update(uint32_t pc, bool taken);

  void reset() { table_.fill(1); }

 private:
  static size_t index(uint32_t pc) { return (pc >> 2) & (kTableSize - 1); }

  std::array<uint8_t, kTableSize> table_;
};

/// Bitmask of events fired by one step. Conditional branches feed the
/// predictor as a side effect.
uint32_t classify_events(const StepInfo& info, const HpcConfig& cfg,
                         BranchPredictor& bp);

inline bool event_fired(uint32_t mask, HpcEvent ev) {
  return mask & (1u << static_cast<int>(ev));
}

using HpcTally = std::array<uint64_t, kHpcEventCount>;

}  // namespace r5

#endif  // R5_HPC_HPP_
