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

#include <random>
#include <vector>

#include <doctest.h>

#include "r5/shadow_stack.hpp"

using r5::MemoryBus;
using r5::ShadowStack;

namespace {
constexpr uint32_t kBase = 0x80F01000u;
}

TEST_CASE("push then pop returns the same address") {
  MemoryBus bus;
  ShadowStack ss(kBase, 8);
  CHECK(ss.push(bus, 0x80000123u) == ShadowStack::PushResult::kOk);
  CHECK(ss.depth() == 1);
  auto ra = ss.pop(bus);
  REQUIRE(ra.has_value());
  CHECK(*ra == 0x80000123u);
  CHECK(ss.depth() == 0);
}

TEST_CASE("slots land in simulated memory at base") {
  MemoryBus bus;
  ShadowStack ss(kBase, 8);
  ss.push(bus, 0x11111111u);
  ss.push(bus, 0x22222222u);
  CHECK(bus.load32(kBase) == 0x11111111u);
  CHECK(bus.load32(kBase + 4) == 0x22222222u);
}

TEST_CASE("overflow leaves depth unchanged") {
  MemoryBus bus;
  ShadowStack ss(kBase, 4);
  for (uint32_t n = 0; n < 4; ++n)
    CHECK(ss.push(bus, 0x80000000u + n) == ShadowStack::PushResult::kOk);
  CHECK(ss.push(bus, 0xDEADBEEFu) == ShadowStack::PushResult::kOverflow);
  CHECK(ss.depth() == 4);
  // The stored slots are intact.
  for (uint32_t n = 0; n < 4; ++n) {
    auto ra = ss.pop(bus);
    REQUIRE(ra.has_value());
    CHECK(*ra == 0x80000003u - n);
  }
}

TEST_CASE("underflow is reported not executed") {
  MemoryBus bus;
  ShadowStack ss(kBase, 4);
  CHECK_FALSE(ss.pop(bus).has_value());
  ss.push(bus, 1);
  ss.pop(bus);
  CHECK_FALSE(ss.pop(bus).has_value());
  CHECK(ss.depth() == 0);
}

TEST_CASE("high watermark tracks the deepest point") {
  MemoryBus bus;
  ShadowStack ss(kBase, 16);
  CHECK(ss.high_watermark() == 0);
  ss.push(bus, 1);
  ss.push(bus, 2);
  ss.push(bus, 3);
  ss.pop(bus);
  ss.pop(bus);
  CHECK(ss.depth() == 1);
  CHECK(ss.high_watermark() == 3);
  ss.clear();
  CHECK(ss.depth() == 0);
  CHECK(ss.high_watermark() == 0);
}

TEST_CASE("ten thousand randomized ops against a reference stack") {
  MemoryBus bus;
  ShadowStack ss(kBase, ShadowStack::kDefaultCapacity);
  std::vector<uint32_t> ref;
  std::mt19937 rng(0x55AA1234u);

  uint32_t overflows = 0;
  uint32_t underflows = 0;
  for (int step = 0; step < 10000; ++step) {
    // Bias toward pushes so the stack actually hits its capacity.
    bool do_push = (rng() % 100) < 55;
    if (do_push) {
      uint32_t ra = rng();
      ShadowStack::PushResult r = ss.push(bus, ra);
      if (ref.size() < ShadowStack::kDefaultCapacity) {
        REQUIRE(r == ShadowStack::PushResult::kOk);
        ref.push_back(ra);
      } else {
        REQUIRE(r == ShadowStack::PushResult::kOverflow);
        ++overflows;
      }
    } else {
      auto got = ss.pop(bus);
      if (ref.empty()) {
        REQUIRE_FALSE(got.has_value());
        ++underflows;
      } else {
        REQUIRE(got.has_value());
        REQUIRE(*got == ref.back());
        ref.pop_back();
      }
    }
    REQUIRE(ss.depth() == ref.size());
  }

  // The schedule must have exercised both failure edges.
  CHECK(overflows > 0);
  CHECK(underflows > 0);
  CHECK(ss.high_watermark() == ShadowStack::kDefaultCapacity);
}
