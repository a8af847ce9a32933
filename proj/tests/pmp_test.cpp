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

#include <doctest.h>

#include "r5/pmp.hpp"

using r5::AccessKind;
using r5::PmpAddrMode;
using r5::PmpEntry;
using r5::PmpUnit;
using r5::PrivMode;

namespace {

PmpEntry napot(uint32_t base, uint32_t size, bool r, bool w, bool x,
               bool locked = false) {
  PmpEntry e;
  e.r = r;
  e.w = w;
  e.x = x;
  e.a = PmpAddrMode::kNapot;
  e.locked = locked;
  e.addr = r5::napot_addr(base, size);
  return e;
}

}  // namespace

TEST_CASE("napot address encoding") {
  CHECK(r5::napot_addr(0x80000000u, 4096) == 0x200001FFu);
  CHECK(r5::napot_addr(0x80000000u, 8) == 0x20000000u);
  CHECK(r5::napot_addr(0x00000000u, 0x100000000ull >> 1) == 0x0FFFFFFFu);

  PmpEntry e = napot(0x80000000u, 4096, true, false, false);
  auto range = r5::pmp_entry_range(e, 0);
  REQUIRE(range.has_value());
  CHECK(range->base == 0x80000000u);
  CHECK(range->size == 4096);

  PmpEntry tiny = napot(0x80001000u, 8, true, false, false);
  range = r5::pmp_entry_range(tiny, 0);
  REQUIRE(range.has_value());
  CHECK(range->base == 0x80001000u);
  CHECK(range->size == 8);
}

TEST_CASE("na4 and tor ranges") {
  PmpEntry na4;
  na4.a = PmpAddrMode::kNa4;
  na4.addr = 0x80000040u >> 2;
  auto range = r5::pmp_entry_range(na4, 0);
  REQUIRE(range.has_value());
  CHECK(range->base == 0x80000040u);
  CHECK(range->size == 4);

  PmpEntry tor;
  tor.a = PmpAddrMode::kTor;
  tor.addr = 0x80002000u >> 2;
  range = r5::pmp_entry_range(tor, 0x80001000u >> 2);
  REQUIRE(range.has_value());
  CHECK(range->base == 0x80001000u);
  CHECK(range->size == 0x1000);

  // An empty or inverted interval matches nothing.
  CHECK(!r5::pmp_entry_range(tor, 0x80002000u >> 2).has_value());
  CHECK(!r5::pmp_entry_range(tor, 0x80003000u >> 2).has_value());

  PmpEntry off;
  CHECK(!r5::pmp_entry_range(off, 0).has_value());
}

TEST_CASE("cfg byte round trip") {
  PmpEntry e = napot(0x80000000u, 64, true, false, true, true);
  PmpEntry back = PmpEntry::from_cfg(e.cfg_byte(), e.addr);
  CHECK(back.r == e.r);
  CHECK(back.w == e.w);
  CHECK(back.x == e.x);
  CHECK(back.a == e.a);
  CHECK(back.locked == e.locked);
  CHECK(back.addr == e.addr);
}

TEST_CASE("default policy: machine allowed, user denied") {
  PmpUnit pmp;
  CHECK(pmp.allows(0x80000000u, 4, AccessKind::kRead, PrivMode::kMachine));
  CHECK(pmp.allows(0x80000000u, 4, AccessKind::kWrite, PrivMode::kMachine));
  CHECK(!pmp.allows(0x80000000u, 4, AccessKind::kRead, PrivMode::kUser));
  CHECK(!pmp.allows(0x80000000u, 4, AccessKind::kExec, PrivMode::kUser));
}

TEST_CASE("user access honors entry permissions") {
  PmpUnit pmp;
  pmp.program(0, napot(0x80000000u, 0x1000, true, false, true));
  pmp.program(1, napot(0x80001000u, 0x1000, true, true, false));

  CHECK(pmp.allows(0x80000000u, 4, AccessKind::kRead, PrivMode::kUser));
  CHECK(pmp.allows(0x80000ffcu, 4, AccessKind::kExec, PrivMode::kUser));
  CHECK(!pmp.allows(0x80000000u, 4, AccessKind::kWrite, PrivMode::kUser));
  CHECK(pmp.allows(0x80001000u, 4, AccessKind::kWrite, PrivMode::kUser));
  CHECK(!pmp.allows(0x80001000u, 4, AccessKind::kExec, PrivMode::kUser));
  CHECK(!pmp.allows(0x80002000u, 4, AccessKind::kRead, PrivMode::kUser));
}

TEST_CASE("lowest-numbered matching entry wins") {
  PmpUnit pmp;
  pmp.program(0, napot(0x80000100u, 0x100, true, false, false));
  pmp.program(1, napot(0x80000000u, 0x1000, true, true, true));

  // Inside the narrow read-only entry the wide entry does not rescue writes.
  CHECK(!pmp.allows(0x80000100u, 4, AccessKind::kWrite, PrivMode::kUser));
  CHECK(pmp.allows(0x80000100u, 4, AccessKind::kRead, PrivMode::kUser));
  // Outside it the wide entry applies.
  CHECK(pmp.allows(0x80000200u, 4, AccessKind::kWrite, PrivMode::kUser));
}

TEST_CASE("accesses that straddle an entry edge are denied") {
  PmpUnit pmp;
  pmp.program(0, napot(0x80000000u, 0x100, true, true, true));
  CHECK(pmp.allows(0x800000fcu, 4, AccessKind::kRead, PrivMode::kUser));
  CHECK(!pmp.allows(0x800000feu, 4, AccessKind::kRead, PrivMode::kUser));
  // Machine mode cannot cross the edge either: the partial match denies.
  CHECK(!pmp.allows(0x800000feu, 4, AccessKind::kRead, PrivMode::kMachine));
}

TEST_CASE("locked entries bind machine mode") {
  PmpUnit pmp;
  pmp.program(0, napot(0x80000000u, 0x1000, true, false, false, true));

  CHECK(pmp.allows(0x80000000u, 4, AccessKind::kRead, PrivMode::kMachine));
  CHECK(!pmp.allows(0x80000000u, 4, AccessKind::kWrite, PrivMode::kMachine));
  CHECK(!pmp.allows(0x80000000u, 4, AccessKind::kExec, PrivMode::kMachine));
  // Unlocked entries do not restrict machine mode.
  pmp.program(1, napot(0x80001000u, 0x1000, false, false, false));
  CHECK(pmp.allows(0x80001000u, 4, AccessKind::kWrite, PrivMode::kMachine));
}

TEST_CASE("locked entries resist reconfiguration until reset") {
  PmpUnit pmp;
  PmpEntry e = napot(0x80000000u, 0x1000, true, false, false, true);
  pmp.program(0, e);
  uint8_t cfg0 = pmp.cfg(0);
  uint32_t addr0 = pmp.addr(0);

  CHECK(!pmp.set_cfg(0, 0x1F, PrivMode::kMachine));
  CHECK(!pmp.set_addr(0, 0, PrivMode::kMachine));
  PmpEntry open = napot(0x80000000u, 0x1000, true, true, true);
  pmp.program(0, open);
  pmp.clear_unlocked();
  CHECK(pmp.cfg(0) == cfg0);
  CHECK(pmp.addr(0) == addr0);

  pmp.reset();
  CHECK(pmp.cfg(0) == 0);
  CHECK(pmp.addr(0) == 0);
}

TEST_CASE("user mode can never write the pmp") {
  PmpUnit pmp;
  CHECK(!pmp.set_cfg(0, 0x0F, PrivMode::kUser));
  CHECK(!pmp.set_addr(0, 123, PrivMode::kUser));
  CHECK(pmp.cfg(0) == 0);
  CHECK(pmp.addr(0) == 0);
}

TEST_CASE("a locked tor entry locks the address register below it") {
  PmpUnit pmp;
  pmp.set_addr(2, 0x80001000u >> 2, PrivMode::kMachine);
  PmpEntry tor;
  tor.a = PmpAddrMode::kTor;
  tor.r = true;
  tor.locked = true;
  tor.addr = 0x80002000u >> 2;
  pmp.program(3, tor);

  CHECK(!pmp.set_addr(2, 0, PrivMode::kMachine));
  CHECK(pmp.addr(2) == 0x80001000u >> 2);
  // The cfg of the entry below stays writable.
  CHECK(pmp.set_cfg(2, 0x0F, PrivMode::kMachine));
}

TEST_CASE("1000 randomized lock sequences hold") {
  std::mt19937 rng(12345);
  for (int seq = 0; seq < 1000; ++seq) {
    PmpUnit pmp;
    int idx = static_cast<int>(rng() % PmpUnit::kEntries);
    uint32_t size = 8u << (rng() % 10);  // 8 bytes to 4 KiB
    uint32_t base = (0x80000000u + (rng() % 0x10000) * 8) & ~(size - 1);
    bool r = rng() & 1, w = rng() & 1, x = rng() & 1;
    PmpEntry locked = napot(base, size, r, w, x, true);
    pmp.program(idx, locked);
    uint8_t cfg_snapshot = pmp.cfg(idx);
    uint32_t addr_snapshot = pmp.addr(idx);

    // Reconfiguration attempts from both modes must bounce.
    for (int n = 0; n < 8; ++n) {
      PrivMode mode = (rng() & 1) ? PrivMode::kMachine : PrivMode::kUser;
      if (rng() & 1)
        CHECK(!pmp.set_cfg(idx, static_cast<uint8_t>(rng()), mode));
      else
        CHECK(!pmp.set_addr(idx, rng(), mode));
    }
    pmp.program(idx, napot(base, size, true, true, true, false));
    if (rng() & 1) pmp.clear_unlocked();
    CHECK(pmp.cfg(idx) == cfg_snapshot);
    CHECK(pmp.addr(idx) == addr_snapshot);

    // The locked permissions bind both modes at random probe points.
    for (int n = 0; n < 8; ++n) {
      uint32_t off = (rng() % size) & ~3u;
      AccessKind kind = static_cast<AccessKind>(rng() % 3);
      bool permitted = kind == AccessKind::kRead    ? r
                       : kind == AccessKind::kWrite ? w
                                                    : x;
      CHECK(pmp.allows(base + off, 4, kind, PrivMode::kMachine) == permitted);
      CHECK(pmp.allows(base + off, 4, kind, PrivMode::kUser) == permitted);
    }

    pmp.reset();
    CHECK(pmp.cfg(idx) == 0);
  }
}
