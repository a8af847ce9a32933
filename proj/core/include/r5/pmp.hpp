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

#ifndef R5_PMP_HPP_
#define R5_PMP_HPP_

#include <cstdint>
#include <optional>

namespace r5 {

enum class PrivMode : uint8_t { kUser = 0, kMachine = 3 };

enum class AccessKind : uint8_t { kRead, kWrite, kExec };

enum class PmpAddrMode : uint8_t { kOff = 0, kTor = 1, kNa4 = 2, kNapot = 3 };

/// One pmpcfg byte split into fields plus its pmpaddr register.
struct PmpEntry {
  bool r = false;
  bool w = false;
  bool x = false;
  PmpAddrMode a = PmpAddrMode::kOff;
  bool locked = false;
  uint32_t addr = 0;  // pmpaddr register value (address >> 2 granularity)

  uint8_t cfg_byte() const;
  static PmpEntry from_cfg(uint8_t cfg, uint32_t addr);
};

/// Decoded byte range of an entry, [base, base + size).
struct PmpRange {
  uint32_t base = 0;
  uint64_t size = 0;
};

/// Range covered by entry i. TOR needs the previous pmpaddr (0 for entry 0).
/// Returns nullopt for Off entries and for NAPOT encodings wider than 2^32.
std::optional<PmpRange> pmp_entry_range(const PmpEntry& e,
                                        uint32_t prev_addr);

/// pmpaddr value that makes a NAPOT entry cover [base, base+size).
/// size must be a power of two >= 8 and base size-aligned.
uint32_t napot_addr(uint32_t base, uint32_t size);

/// 16-entry physical memory protection unit.
class PmpUnit {
 public:
  static constexpr int kEntries = 16;

  /// Write pmpcfg/pmpaddr from M-Mode. Writes to locked entries (and to the
  /// pmpaddr of the entry above a locked TOR entry) are ignored, as are all
  /// writes from U-Mode. Returns false when the write was ignored.
  bool set_cfg(int idx, uint8_t cfg, PrivMode mode);
  bool set_addr(int idx, uint32_t addr, PrivMode mode);

  uint8_t cfg(int idx) const;
  uint32_t addr(int idx) const;
  const PmpEntry& entry(int idx) const { return entries_[idx]; }

  /// Replace the whole table (boot/context switch path). Locked entries
  /// keep their old contents.
  void program(int idx, const PmpEntry& e);

  /// Clear every non-locked entry to Off.
  void clear_unlocked();

  /// Full reset including locked entries.
  void reset();

  /// Access check for a width-byte access at addr by the given mode.
  /// Lowest-numbered matching entry wins. An access that only partially
  /// matches an entry is denied. With no match, M-Mode is allowed and
  /// U-Mode is denied. Locked entries bind M-Mode as well.
  bool allows(uint32_t addr, uint32_t width, AccessKind kind,
              PrivMode mode) const;

 private:
  PmpEntry entries_[kEntries];
};

}  // namespace r5

#endif  // R5_PMP_HPP_
