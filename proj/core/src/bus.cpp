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

#include "r5/bus.hpp"

#include <cstring>

namespace r5 {

MemoryBus::Page* MemoryBus::page_for(uint32_t addr) {
  uint32_t key = addr >> kPageBits;
  auto it = pages_.find(key);
  if (it == pages_.end()) {
    auto page = std::make_unique<Page>();
    page->fill(0);
    it = pages_.emplace(key, std::move(page)).first;
  }
  return it->second.get();
}

const MemoryBus::Page* MemoryBus::page_if_present(uint32_t addr) const {
  auto it = pages_.find(addr >> kPageBits);
  return it == pages_.end() ? nullptr : it->second.get();
}

uint8_t MemoryBus::load8(uint32_t addr) const {
  if (in_mmio(addr)) return 0;
  const Page* p = page_if_present(addr);
  return p ? (*p)[addr & (kPageSize - 1)] : 0;
}

uint16_t MemoryBus::load16(uint32_t addr) const {
  return static_cast<uint16_t>(load8(addr) | (uint16_t{load8(addr + 1)} << 8));
}

uint32_t MemoryBus::load32(uint32_t addr) const {
  if (in_mmio(addr)) return 0;
  return fetch32(addr);
}

uint32_t MemoryBus::fetch32(uint32_t addr) const {
  // Aligned fast path; callers guarantee alignment for fetches.
  if ((addr & 3) == 0) {
    const Page* p = page_if_present(addr);
    if (!p) return 0;
    uint32_t off = addr & (kPageSize - 1);
    uint32_t v;
    std::memcpy(&v, p->data() + off, 4);
    return v;
  }
  uint32_t v = 0;
  for (int k = 3; k >= 0; --k) {
    const Page* p = page_if_present(addr + k);
    uint8_t b = p ? (*p)[(addr + k) & (kPageSize - 1)] : 0;
    v = (v << 8) | b;
  }
  return v;
}

void MemoryBus::store8(uint32_t addr, uint8_t v) {
  if (in_mmio(addr)) {
    if (mmio_sink_) mmio_sink_->push_back({addr, v, 1});
    return;
  }
  (*page_for(addr))[addr & (kPageSize - 1)] = v;
}

void MemoryBus::store16(uint32_t addr, uint16_t v) {
  if (in_mmio(addr)) {
    if (mmio_sink_) mmio_sink_->push_back({addr, v, 2});
    return;
  }
  store8(addr, static_cast<uint8_t>(v));
  store8(addr + 1, static_cast<uint8_t>(v >> 8));
}

void MemoryBus::store32(uint32_t addr, uint32_t v) {
  if (in_mmio(addr)) {
    if (mmio_sink_) mmio_sink_->push_back({addr, v, 4});
    return;
  }
  if ((addr & 3) == 0) {
    Page* p = page_for(addr);
    std::memcpy(p->data() + (addr & (kPageSize - 1)), &v, 4);
    return;
  }
  for (int k = 0; k < 4; ++k) store8(addr + k, static_cast<uint8_t>(v >> (8 * k)));
}

void MemoryBus::write_block(uint32_t addr, const uint8_t* data, size_t n) {
  for (size_t k = 0; k < n; ++k) store8(addr + static_cast<uint32_t>(k), data[k]);
}

std::vector<uint8_t> MemoryBus::read_block(uint32_t addr, size_t n) const {
  std::vector<uint8_t> out(n);
  for (size_t k = 0; k < n; ++k) out[k] = load8(addr + static_cast<uint32_t>(k));
  return out;
}

}  // namespace r5
