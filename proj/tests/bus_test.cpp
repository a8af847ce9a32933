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

#include <doctest.h>

#include "r5/bus.hpp"

using r5::MemoryBus;

TEST_CASE("uninitialized memory reads as zero") {
  MemoryBus bus;
  CHECK(bus.load8(0) == 0);
  CHECK(bus.load32(0x80000000u) == 0);
  CHECK(bus.load32(0xFFFFFFF0u) == 0);
  CHECK(bus.fetch32(0x1234u) == 0);
}

TEST_CASE("store and load round trips, little endian") {
  MemoryBus bus;
  bus.store32(0x80000000u, 0x11223344u);
  CHECK(bus.load32(0x80000000u) == 0x11223344u);
  CHECK(bus.load8(0x80000000u) == 0x44);
  CHECK(bus.load8(0x80000003u) == 0x11);
  CHECK(bus.load16(0x80000000u) == 0x3344);
  CHECK(bus.load16(0x80000002u) == 0x1122);

  bus.store8(0x80000001u, 0xAB);
  CHECK(bus.load32(0x80000000u) == 0x1122AB44u);
  bus.store16(0x80000002u, 0xBEEF);
  CHECK(bus.load32(0x80000000u) == 0xBEEFAB44u);
}

TEST_CASE("block writes can cross page boundaries") {
  MemoryBus bus;
  std::vector<uint8_t> data;
  for (int k = 0; k < 16; ++k) data.push_back(static_cast<uint8_t>(k + 1));
  bus.write_block(0x80000FF8u, data.data(), data.size());
  CHECK(bus.read_block(0x80000FF8u, 16) == data);
  CHECK(bus.load8(0x80000FFFu) == 8);
  CHECK(bus.load8(0x80001000u) == 9);
}

TEST_CASE("output window stores are captured, not stored") {
  MemoryBus bus;
  std::vector<r5::MmioWrite> sink;
  bus.set_mmio_sink(&sink);

  bus.store32(MemoryBus::kMmioBase, 0xDEADBEEFu);
  bus.store16(MemoryBus::kMmioBase + 8, 0x1234);
  bus.store8(MemoryBus::kMmioBase + 12, 0x56);

  REQUIRE(sink.size() == 3);
  CHECK(sink[0] == r5::MmioWrite{MemoryBus::kMmioBase, 0xDEADBEEFu, 4});
  CHECK(sink[1] == r5::MmioWrite{MemoryBus::kMmioBase + 8, 0x1234u, 2});
  CHECK(sink[2] == r5::MmioWrite{MemoryBus::kMmioBase + 12, 0x56u, 1});

  // Loads from the window do not see the stored values.
  CHECK(bus.load32(MemoryBus::kMmioBase) == 0);

  // Without a sink the stores are discarded, not crashed on.
  bus.set_mmio_sink(nullptr);
  bus.store32(MemoryBus::kMmioBase + 16, 1);
  CHECK(sink.size() == 3);
}

TEST_CASE("window boundaries") {
  CHECK(MemoryBus::in_mmio(MemoryBus::kMmioBase));
  CHECK(MemoryBus::in_mmio(MemoryBus::kMmioBase + MemoryBus::kMmioSize - 1));
  CHECK(!MemoryBus::in_mmio(MemoryBus::kMmioBase + MemoryBus::kMmioSize));
  CHECK(!MemoryBus::in_mmio(MemoryBus::kMmioBase - 1));

  MemoryBus bus;
  std::vector<r5::MmioWrite> sink;
  bus.set_mmio_sink(&sink);
  bus.store32(MemoryBus::kMmioBase + MemoryBus::kMmioSize, 7);
  CHECK(sink.empty());
  CHECK(bus.load32(MemoryBus::kMmioBase + MemoryBus::kMmioSize) == 7);
}
