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

#ifndef R5_BUS_HPP_
#define R5_BUS_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

namespace r5 {

/// One value written to the output port window.
struct MmioWrite {
  uint32_t addr = 0;
  uint32_t value = 0;
  uint8_t width = 4;

  bool operator==(const MmioWrite&) const = default;
};

/// Sparse 32-bit physical memory with a single memory-mapped output window.
/// Stores inside the window are captured into the current sink instead of
/// RAM; loads from it return zero. Uninitialized RAM reads as zero.
class MemoryBus {
 public:
  static constexpr uint32_t kMmioBase = 0x10000000u;
  static constexpr uint32_t kMmioSize = 0x1000u;

  uint8_t load8(uint32_t addr) const;
  uint16_t load16(uint32_t addr) const;
  uint32_t load32(uint32_t addr) const;

  void store8(uint32_t addr, uint8_t v);
  void store16(uint32_t addr, uint16_t v);
  void store32(uint32_t addr, uint32_t v);

  /// Instruction fetch. Same as load32 but never touches the output window.
  uint32_t fetch32(uint32_t addr) const;

  void write_block(uint32_t addr, const uint8_t* data, size_t n);
  std::vector<uint8_t> read_block(uint32_t addr, size_t n) const;

  static bool in_mmio(uint32_t addr) {
    return addr >= kMmioBase && addr - kMmioBase < kMmioSize;
  }

  /// Redirects captured output-window stores. Pass nullptr to discard.
  void set_mmio_sink(std::vector<MmioWrite>* sink) { mmio_sink_ = sink; }

 private:
  static constexpr uint32_t kPageBits = 12;
  static constexpr uint32_t kPageSize = 1u << kPageBits;

  using Page = std::array<uint8_t, kPageSize>;

  Page* page_for(uint32_t addr);
  const Page* page_if_present(uint32_t addr) const;

  std::unordered_map<uint32_t, std::unique_ptr<Page>> pages_;
  std::vector<MmioWrite>* mmio_sink_ = nullptr;
};

}  // namespace r5

#endif  // R5_BUS_HPP_
