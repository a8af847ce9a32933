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

#include "r5/shadow_stack.hpp"

namespace r5 {

ShadowStack::PushResult ShadowStack::push(MemoryBus& bus, uint32_t ra) {
  if (depth_ >= capacity_) return PushResult::kOverflow;
  bus.store32(base_ + depth_ * 4, ra);
  ++depth_;
  if (depth_ > high_) high_ = depth_;
  return PushResult::kOk;
}

std::optional<uint32_t> ShadowStack::pop(MemoryBus& bus) {
  if (depth_ == 0) return std::nullopt;
  --depth_;
  return bus.load32(base_ + depth_ * 4);
}

}  // namespace r5
