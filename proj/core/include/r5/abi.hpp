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

#ifndef R5_ABI_HPP_
#define R5_ABI_HPP_

#include <cstdint>
#include <optional>

namespace r5 {

/// Service codes a zone passes in x17 when it executes ecall.
enum class MonitorCall : uint32_t {
  kSsPush = 1,  // record x1 on the zone's shadow stack
  kSsPop = 2,   // pop the shadow stack into x1
  kYield = 3,   // give up the rest of the time slice
  kCfiFail = 4, // injected check sequence found no matching label
};

constexpr int kMonitorCallReg = 17;  // x17 / a7

/// Registers reserved for injected check sequences.
constexpr int kScratchRegHi = 31;  // x31 holds the loaded label word
constexpr int kScratchRegLo = 30;  // x30 holds the expected label word

/// A label is the word lui x0, id sitting at a function's public address.
constexpr uint32_t kLabelOpcodeBits = 0x37u;  // lui x0

inline uint32_t label_word(uint32_t id) {
  return (id << 12) | kLabelOpcodeBits;
}

inline std::optional<uint32_t> label_id_of(uint32_t word) {
  if ((word & 0xFFFu) != kLabelOpcodeBits) return std::nullopt;
  return word >> 12;
}

}  // namespace r5

#endif  // R5_ABI_HPP_
