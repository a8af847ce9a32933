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

#include "r5/pmp.hpp"

namespace r5 {

uint8_t PmpEntry::cfg_byte() const {
  return static_cast<uint8_t>((r ? 1 : 0) | (w ? 2 : 0) | (x ? 4 : 0) |
                              (static_cast<uint8_t>(a) << 3) |
                              (locked ? 0x80 : 0));
}

PmpEntry PmpEntry::from_cfg(uint8_t cfg, uint32_t addr) {
  PmpEntry e;
  e.r = cfg & 1;
  e.w = cfg & 2;
  e.x = cfg & 4;
  e.a = static_cast<PmpAddrMode>((cfg >> 3) & 3);
  e.locked = cfg & 0x80;
  e.addr = addr;
  return e;
}

std::optional<PmpRange> pmp_entry_range(const PmpEntry& e,
                                        uint32_t prev_addr) {
  switch (e.a) {
    case PmpAddrMode::kOff:
      return std::nullopt;
    case PmpAddrMode::kTor: {
      uint64_t base = uint64_t{prev_addr} << 2;
      uint64_t top = uint64_t{e.addr} << 2;
      if (top <= base) return std::nullopt;
      if (base > 0xFFFFFFFFull) return std::nullopt;
      return PmpRange{static_cast<uint32_t>(base), top - base};
    }
    case PmpAddrMode::kNa4:
      return PmpRange{e.addr << 2, 4};
    case PmpAddrMode::kNapot: {
      int t = 0;
      while (t < 32 && (e.addr & (1u << t))) ++t;
      uint64_t mask = (t == 32) ? 0xFFFFFFFFull : ((1ull << t) - 1);
      uint64_t base = (uint64_t{e.addr} & ~mask) << 2;
      uint64_t size = 8ull << t;
      if (base > 0xFFFFFFFFull) return std::nullopt;
      return PmpRange{static_cast<uint32_t>(base), size};
    }
  }
  return std::nullopt;
}

uint32_t napot_addr(uint32_t base, uint32_t size) {
  return (base >> 2) | ((size >> 3) - 1);
}

bool PmpUnit::set_cfg(int idx, uint8_t cfg, PrivMode mode) {
  if (mode != PrivMode::kMachine) return false;
  if (idx < 0 || idx >= kEntries) return false;
  if (entries_[idx].locked) return false;
  uint32_t addr = entries_[idx].addr;
  entries_[idx] = PmpEntry::from_cfg(cfg, addr);
  return true;
}

bool PmpUnit::set_addr(int idx, uint32_t addr, PrivMode mode) {
  if (mode != PrivMode::kMachine) return false;
  if (idx < 0 || idx >= kEntries) return false;
  if (entries_[idx].locked) return false;
  if (idx + 1 < kEntries && entries_[idx + 1].locked &&
      entries_[idx + 1].a == PmpAddrMode::kTor)
    return false;
  entries_[idx].addr = addr;
  return true;
}

uint8_t PmpUnit::cfg(int idx) const { return entries_[idx].cfg_byte(); }

uint32_t PmpUnit::addr(int idx) const { return entries_[idx].addr; }

void PmpUnit::program(int idx, const PmpEntry& e) {
  if (idx < 0 || idx >= kEntries) return;
  if (entries_[idx].locked) return;
  entries_[idx] = e;
}

void PmpUnit::clear_unlocked() {
  for (auto& e : entries_) {
    if (!e.locked) e = PmpEntry{};
  }
}

void PmpUnit::reset() {
  for (auto& e : entries_) e = PmpEntry{};
}

bool PmpUnit::allows(uint32_t addr, uint32_t width, AccessKind kind,
                     PrivMode mode) const {
  uint64_t lo = addr;
  uint64_t hi = lo + width;
  for (int i = 0; i < kEntries; ++i) {
    const PmpEntry& e = entries_[i];
    auto range = pmp_entry_range(e, i > 0 ? entries_[i - 1].addr : 0);
    if (!range) continue;
    uint64_t rlo = range->base;
    uint64_t rhi = rlo + range->size;
    if (hi <= rlo || lo >= rhi) continue;
    if (lo < rlo || hi > rhi) return false;  // straddles the entry edge
    if (mode == PrivMode::kMachine && !e.locked) return true;
    switch (kind) {
      case AccessKind::kRead:
        return e.r;
      case AccessKind::kWrite:
        return e.w;
      case AccessKind::kExec:
        return e.x;
    }
  }
  return mode == PrivMode::kMachine;
}

}  // namespace r5
