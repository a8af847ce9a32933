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

#ifndef R5_SHADOW_STACK_HPP_
#define R5_SHADOW_STACK_HPP_

#include <cstdint>
#include <optional>

#include "r5/bus.hpp"

namespace r5 {

/// A monitor-managed return-address stack living in simulated memory that
/// no zone can reach. Slots are 4 bytes, growing upward from base.
class ShadowStack {
 public:
  static constexpr uint32_t kDefaultCapacity = 256;

  ShadowStack() = default;
  ShadowStack(uint32_t base, uint32_t capacity)
      : base_(base), capacity_(capacity) {}

  enum class PushResult { kOk, kOverflow };

  PushResult push(MemoryBus& bus, uint32_t ra);

  /// nullopt signals underflow.
  std::optional<uint32_t> pop(MemoryBus& bus);

  uint32_t depth() const { return depth_; }
  uint32_t high_watermark() const { return high_; }
  uint32_t base() const { return base_; }
  uint32_t capacity() const { return capacity_; }

  void clear() {
    depth_ = 0;
    high_ = 0;
  }

 private:
  uint32_t base_ = 0;
  uint32_t capacity_ = 0;
  uint32_t depth_ = 0;
  uint32_t high_ = 0;
};

}  // namespace r5

#endif  // R5_SHADOW_STACK_HPP_
