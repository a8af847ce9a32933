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

#include <string>
#include <vector>

#include <doctest.h>

#include "r5/assembler.hpp"
#include "r5/monitor.hpp"

using r5::BootError;
using r5::BootErrorKind;
using r5::HpcEvent;
using r5::Image;
using r5::Manifest;
using r5::ManifestError;
using r5::MemoryBus;
using r5::RegionSpec;
using r5::RunOptions;
using r5::RunReport;
using r5::System;
using r5::ViolationType;
using r5::ZoneSpec;
using r5::ZoneStatus;

namespace {

Image img_of(const std::string& source) {
  r5::AsmOptions opts;
  opts.allow_reserved_regs = true;
  r5::AsmOutput out = r5::assemble(source, opts);
  if (!out.ok())
    for (const r5::AsmError& e : out.errors) MESSAGE(r5::format_error(e));
  REQUIRE(out.ok());
  return out.image;
}

std::vector<RegionSpec> standard_regions() {
  RegionSpec text{0x80000000u, 0x10000, true, false, true,
                  r5::PmpAddrMode::kNapot, false};
  RegionSpec data{0x80010000u, 0x10000, true, true, false,
                  r5::PmpAddrMode::kNapot, false};
  RegionSpec mmio{MemoryBus::kMmioBase, MemoryBus::kMmioSize,
                  true, true, false, r5::PmpAddrMode::kNapot, true};
  return {text, data, mmio};
}

ZoneSpec make_zone(int id, bool monitor = false) {
  ZoneSpec z;
  z.id = id;
  z.monitor = monitor;
  z.regions = standard_regions();
  return z;
}

System one_zone(const std::string& source) {
  Manifest m;
  m.zones.push_back(make_zone(0));
  std::vector<Image> images;
  images.push_back(img_of(source));
  return System(std::move(m), std::move(images));
}

}  // namespace

TEST_CASE("manifest json round trips") {
  Manifest m;
  m.default_quantum = 7777;
  m.active_events = {"INT", "JAL"};
  m.mmio_ranges = {{0x10000000u, 0x1000}};
  ZoneSpec z = make_zone(3, true);
  z.image_path = "corpus:idle";
  z.quantum_cycles = 1234;
  m.zones.push_back(z);
  m.zones.push_back(make_zone(7));

  Manifest back = r5::manifest_from_json(r5::manifest_to_json(m));
  CHECK(back.default_quantum == 7777);
  CHECK(back.active_events == m.active_events);
  REQUIRE(back.mmio_ranges.size() == 1);
  CHECK(back.mmio_ranges[0].base == 0x10000000u);
  REQUIRE(back.zones.size() == 2);
  CHECK(back.zones[0].id == 3);
  CHECK(back.zones[0].monitor);
  CHECK(back.zones[0].image_path == "corpus:idle");
  CHECK(back.zones[0].quantum_cycles == 1234);
  REQUIRE(back.zones[0].regions.size() == 3);
  CHECK(back.zones[0].regions[0].base == 0x80000000u);
  CHECK(back.zones[0].regions[0].x);
  CHECK_FALSE(back.zones[0].regions[0].w);
  CHECK(back.zones[0].regions[2].shared);
  CHECK_FALSE(back.zones[1].monitor);
}

TEST_CASE("manifest parsing rejects malformed input") {
  CHECK_THROWS_AS(r5::manifest_from_json("not json"), ManifestError);
  CHECK_THROWS_AS(r5::manifest_from_json("{}"), ManifestError);
  CHECK_THROWS_AS(r5::manifest_from_json(R"({"zones": [{"id": 0,
    "regions": [{"base": 0, "size": 8, "perms": "rq"}]}]})"),
                  ManifestError);
  CHECK_THROWS_AS(r5::manifest_from_json(R"({"zones": [{"id": 0,
    "regions": [{"base": 0, "size": 8, "perms": "rw",
                 "pmp_mode": "exotic"}]}]})"),
                  ManifestError);
  CHECK_THROWS_AS(r5::load_manifest("/tmp/missing_manifest_r5.json"),
                  ManifestError);
}

TEST_CASE("boot validation catches bad configurations") {
  auto boot = [](Manifest m, std::vector<Image> images) {
    return System(std::move(m), std::move(images));
  };
  const std::string src = "main:\n  ebreak\n";

  {
    // Zone and image counts must agree.
    Manifest m;
    m.zones.push_back(make_zone(0));
    try {
      boot(std::move(m), {});
      FAIL("expected BootError");
    } catch (const BootError& e) {
      CHECK(e.kind() == BootErrorKind::kBadManifest);
    }
  }
  {
    Manifest m;  // no zones at all
    try {
      boot(std::move(m), {});
      FAIL("expected BootError");
    } catch (const BootError& e) {
      CHECK(e.kind() == BootErrorKind::kBadManifest);
    }
  }
  {
    // Nine regions in one zone.
    Manifest m;
    ZoneSpec z = make_zone(0);
    while (z.regions.size() < 9) {
      RegionSpec r{0x90000000u + 0x1000u *
                       static_cast<uint32_t>(z.regions.size()),
                   0x1000, true, false, false, r5::PmpAddrMode::kNapot,
                   false};
      z.regions.push_back(r);
    }
    m.zones.push_back(z);
    std::vector<Image> imgs;
    imgs.push_back(img_of(src));
    try {
      boot(std::move(m), std::move(imgs));
      FAIL("expected BootError");
    } catch (const BootError& e) {
      CHECK(e.kind() == BootErrorKind::kTooManyRegions);
    }
  }
  {
    // Unshared regions of two zones may not overlap.
    Manifest m;
    ZoneSpec a = make_zone(0);
    ZoneSpec b = make_zone(1);
    b.regions[0].shared = false;
    a.regions[2].shared = false;  // the would-be shared mmio window
    b.regions[2].shared = false;
    b.regions[1].base = a.regions[1].base;
    m.zones = {a, b};
    std::vector<Image> imgs;
    imgs.push_back(img_of(src));
    imgs.push_back(img_of(src));
    try {
      boot(std::move(m), std::move(imgs));
      FAIL("expected BootError");
    } catch (const BootError& e) {
      CHECK(e.kind() == BootErrorKind::kRegionOverlap);
    }
  }
  {
    // No zone region may reach into the monitor reserve.
    Manifest m;
    ZoneSpec z = make_zone(0);
    RegionSpec bad{System::kMonitorReserveBase, 0x1000, true, true, false,
                   r5::PmpAddrMode::kNapot, false};
    z.regions[1] = bad;
    m.zones.push_back(z);
    std::vector<Image> imgs;
    imgs.push_back(img_of(src));
    try {
      boot(std::move(m), std::move(imgs));
      FAIL("expected BootError");
    } catch (const BootError& e) {
      CHECK(e.kind() == BootErrorKind::kRegionOverlap);
    }
  }
  {
    // Every image segment needs a covering region.
    Manifest m;
    ZoneSpec z = make_zone(0);
    z.regions = {z.regions[0]};  // text only
    m.zones.push_back(z);
    std::vector<Image> imgs;
    imgs.push_back(img_of("main:\n  ebreak\n  .data 0x80010000\n  .word 1\n"));
    try {
      boot(std::move(m), std::move(imgs));
      FAIL("expected BootError");
    } catch (const BootError& e) {
      CHECK(e.kind() == BootErrorKind::kSegmentUncovered);
    }
  }
  {
    // The same label id twice in one zone.
    Manifest m;
    m.zones.push_back(make_zone(0));
    std::vector<Image> imgs;
    imgs.push_back(img_of(
        "main:\n  .word 0x0002f037\n  ebreak\n  .word 0x0002f037\n"));
    try {
      boot(std::move(m), std::move(imgs));
      FAIL("expected BootError");
    } catch (const BootError& e) {
      CHECK(e.kind() == BootErrorKind::kDuplicateLabel);
    }
  }
  {
    // Only two CSR-backed counters exist.
    Manifest m;
    m.zones.push_back(make_zone(0));
    m.active_events = {"INT", "JAL", "CB"};
    std::vector<Image> imgs;
    imgs.push_back(img_of(src));
    try {
      boot(std::move(m), std::move(imgs));
      FAIL("expected BootError");
    } catch (const BootError& e) {
      CHECK(e.kind() == BootErrorKind::kBadManifest);
    }
  }
  {
    Manifest m;
    m.zones.push_back(make_zone(0));
    m.active_events = {"CYCLES"};
    std::vector<Image> imgs;
    imgs.push_back(img_of(src));
    try {
      boot(std::move(m), std::move(imgs));
      FAIL("expected BootError");
    } catch (const BootError& e) {
      CHECK(e.kind() == BootErrorKind::kBadManifest);
    }
  }
  {
    // Duplicate zone ids.
    Manifest m;
    m.zones.push_back(make_zone(2));
    m.zones.push_back(make_zone(2));
    m.zones[1].regions[0].base = 0x80100000u;
    m.zones[1].regions[1].base = 0x80110000u;
    std::vector<Image> imgs;
    imgs.push_back(img_of(src));
    imgs.push_back(img_of(src));
    try {
      boot(std::move(m), std::move(imgs));
      FAIL("expected BootError");
    } catch (const BootError& e) {
      CHECK(e.kind() == BootErrorKind::kBadManifest);
    }
  }
}

TEST_CASE("ebreak finishes a zone cleanly") {
  System sys = one_zone("main:\n  addi x10, x0, 9\n  ebreak\n");
  RunReport rep = sys.run();
  CHECK(rep.halted);
  CHECK(rep.halt_reason == "all zones finished");
  REQUIRE(rep.zones.size() == 1);
  CHECK(rep.zones[0].status == ZoneStatus::kFinished);
  CHECK(rep.zones[0].violations.empty());
  CHECK(sys.zone_reg(0, 10) == 9);
}

TEST_CASE("shadow stack services restore the return register") {
  System sys = one_zone(R"(
main:
  li x1, 0x80001234
  addi x17, x0, 1
  ecall
  addi x1, x0, 0
  addi x17, x0, 2
  ecall
  ebreak
)");
  RunReport rep = sys.run();
  REQUIRE(rep.zones[0].status == ZoneStatus::kFinished);
  CHECK(sys.zone_reg(0, 1) == 0x80001234u);
  CHECK(rep.zones[0].ss_depth == 0);
  CHECK(rep.zones[0].ss_high_watermark == 1);
  // The saved slot lives in monitor memory.
  CHECK(sys.bus().load32(System::kShadowStackBase) == 0x80001234u);
}

TEST_CASE("yield gives up the slice without harming the zone") {
  System sys = one_zone(R"(
main:
  addi x17, x0, 3
  ecall
  addi x10, x0, 5
  ebreak
)");
  RunReport rep = sys.run();
  CHECK(rep.zones[0].status == ZoneStatus::kFinished);
  CHECK(rep.zones[0].violations.empty());
  CHECK(sys.zone_reg(0, 10) == 5);
}

TEST_CASE("cfi fail ecall suspends with the read label word") {
  System sys = one_zone(R"(
main:
  li x31, 0x0002f037
  addi x17, x0, 4
  ecall
  ebreak
)");
  RunReport rep = sys.run();
  REQUIRE(rep.zones[0].status == ZoneStatus::kSuspended);
  REQUIRE(rep.zones[0].violations.size() == 1);
  const r5::Violation& v = rep.zones[0].violations[0];
  CHECK(v.type == ViolationType::kLabelMismatch);
  CHECK(v.detail == 0x0002F037u);
}

TEST_CASE("unknown monitor calls are violations") {
  System sys = one_zone(R"(
main:
  addi x17, x0, 99
  ecall
  ebreak
)");
  RunReport rep = sys.run();
  REQUIRE(rep.zones[0].status == ZoneStatus::kSuspended);
  REQUIRE(rep.zones[0].violations.size() == 1);
  CHECK(rep.zones[0].violations[0].type ==
        ViolationType::kIllegalInstruction);
  CHECK(rep.zones[0].violations[0].note.find("unknown monitor call") !=
        std::string::npos);
}

TEST_CASE("illegal instructions suspend the zone") {
  System sys = one_zone("main:\n  .word 0xffffffff\n");
  RunReport rep = sys.run();
  REQUIRE(rep.zones[0].status == ZoneStatus::kSuspended);
  REQUIRE(rep.zones[0].violations.size() == 1);
  CHECK(rep.zones[0].violations[0].type ==
        ViolationType::kIllegalInstruction);
  CHECK(rep.zones[0].violations[0].detail == 0xFFFFFFFFu);
}

TEST_CASE("stores outside declared regions are pmp faults") {
  System sys = one_zone(R"(
main:
  lui x5, 0x90000
  sw x0, 0(x5)
  ebreak
)");
  RunReport rep = sys.run();
  REQUIRE(rep.zones[0].status == ZoneStatus::kSuspended);
  REQUIRE(rep.zones[0].violations.size() == 1);
  CHECK(rep.zones[0].violations[0].type == ViolationType::kPmpFault);
  CHECK(rep.zones[0].violations[0].detail == 0x90000000u);
}

TEST_CASE("shadow stack overflow is caught at push 257") {
  System sys = one_zone(R"(
main:
  addi x5, x0, 0
  li x6, 300
loop:
  addi x17, x0, 1
  ecall
  addi x5, x5, 1
  blt x5, x6, loop
  ebreak
)");
  RunReport rep = sys.run();
  REQUIRE(rep.zones[0].status == ZoneStatus::kSuspended);
  REQUIRE(rep.zones[0].violations.size() == 1);
  CHECK(rep.zones[0].violations[0].type == ViolationType::kSsOverflow);
  CHECK(rep.zones[0].ss_high_watermark == 256);
  CHECK(sys.zone_reg(0, 5) == 256);  // the 257th push never returned
}

TEST_CASE("shadow stack underflow is caught immediately") {
  System sys = one_zone("main:\n  addi x17, x0, 2\n  ecall\n  ebreak\n");
  RunReport rep = sys.run();
  REQUIRE(rep.zones[0].status == ZoneStatus::kSuspended);
  REQUIRE(rep.zones[0].violations.size() == 1);
  CHECK(rep.zones[0].violations[0].type == ViolationType::kSsUnderflow);
}

TEST_CASE("timed writes are validated against zone permissions") {
  const std::string src = "main:\n  ebreak\n";

  {
    System sys = one_zone(src);
    RunOptions opts;
    opts.writes.push_back({5, 0, 0x80010000u, {1, 2, 3, 4}});
    CHECK_THROWS_AS(sys.run(opts), r5::RunError);
  }
  {
    // Text is not writable from U-Mode.
    System sys = one_zone(src);
    RunOptions opts;
    opts.writes.push_back({0, 0, 0x80000000u, {1, 2, 3, 4}});
    CHECK_THROWS_AS(sys.run(opts), r5::RunError);
  }
  {
    // Monitor memory is out of reach regardless.
    System sys = one_zone(src);
    RunOptions opts;
    opts.writes.push_back({0, 0, System::kShadowStackBase, {1, 2, 3, 4}});
    CHECK_THROWS_AS(sys.run(opts), r5::RunError);
  }
}

TEST_CASE("timed writes land at their cycle") {
  System sys = one_zone(R"(
main:
  la x5, flag
wait:
  lw x6, 0(x5)
  beq x6, x0, wait
  ebreak

  .data 0x80010000
flag:
  .word 0
)");
  RunOptions opts;
  opts.max_cycles = 100000;
  opts.writes.push_back({0, 200, 0x80010000u, {1, 0, 0, 0}});
  RunReport rep = sys.run(opts);
  CHECK(rep.zones[0].status == ZoneStatus::kFinished);
  CHECK(rep.total_cycles < 1000);
  CHECK(rep.total_cycles >= 200);
}

TEST_CASE("interrupts stash and restore the worker registers") {
  Image img = img_of(R"(
main:
  addi x5, x0, 0
  li x6, 2000
loop:
  addi x5, x5, 1
  blt x5, x6, loop
  ebreak

irq_handler:
  addi x10, x10, 1
  addi x5, x0, 0
  addi x6, x0, 0
  addi x7, x0, 0
  ret
)");
  Manifest m;
  m.zones.push_back(make_zone(0));
  std::vector<Image> imgs;
  imgs.push_back(img);
  System sys(std::move(m), std::move(imgs));
  RunOptions opts;
  opts.irq_period = 500;
  opts.irq_zone = 0;
  opts.irq_handler = img.meta.symbols.at("irq_handler");
  RunReport rep = sys.run(opts);
  CHECK(rep.zones[0].status == ZoneStatus::kFinished);
  CHECK(rep.zones[0].violations.empty());
  CHECK(rep.irqs_delivered > 0);
  // Handler wipes x5 to x7 every time; the stash undoes the damage, so the
  // loop still terminates with the exact count.
  CHECK(sys.zone_reg(0, 5) == 2000);
  CHECK(sys.zone_reg(0, 10) == static_cast<uint32_t>(rep.irqs_delivered));
}

TEST_CASE("interrupt accounting diverts handler events") {
  const std::string src = R"(
main:
  addi x5, x0, 0
  li x6, 3000
loop:
  addi x5, x5, 1
  blt x5, x6, loop
  ebreak

irq_handler:
  addi x10, x10, 1
  ret
)";
  auto run_with = [&](bool accounting) {
    Image img = img_of(src);
    Manifest m;
    m.zones.push_back(make_zone(0));
    std::vector<Image> imgs;
    imgs.push_back(img);
    System sys(std::move(m), std::move(imgs));
    RunOptions opts;
    opts.irq_period = 700;
    opts.irq_zone = 0;
    opts.irq_handler = img.meta.symbols.at("irq_handler");
    opts.irq_accounting = accounting;
    return sys.run(opts);
  };

  RunReport off = run_with(false);
  RunReport on = run_with(true);
  REQUIRE(off.irqs_delivered > 0);
  CHECK(off.irqs_delivered == on.irqs_delivered);

  uint64_t zero = 0;
  for (uint64_t v : off.zones[0].irq_tally) zero += v;
  CHECK(zero == 0);
  uint64_t diverted = 0;
  for (uint64_t v : on.zones[0].irq_tally) diverted += v;
  CHECK(diverted > 0);

  // With accounting the zone tally matches an undisturbed run.
  System clean = one_zone(src);
  RunReport base = clean.run();
  CHECK(on.zones[0].tally == base.zones[0].tally);
}

TEST_CASE("interrupt options must name a live zone and handler") {
  System sys = one_zone("main:\n  ebreak\n");
  RunOptions opts;
  opts.irq_period = 100;
  opts.irq_zone = 9;  // no such zone
  opts.irq_handler = 0x80000000u;
  CHECK_THROWS_AS(sys.run(opts), r5::RunError);

  System sys2 = one_zone("main:\n  ebreak\n");
  RunOptions opts2;
  opts2.irq_period = 100;
  opts2.irq_zone = 0;
  opts2.irq_handler = 0;  // no handler
  CHECK_THROWS_AS(sys2.run(opts2), r5::RunError);
}

TEST_CASE("csr-backed counters follow the configured events") {
  Manifest m;
  m.zones.push_back(make_zone(0));
  m.active_events = {"INT", "CB"};
  std::vector<Image> imgs;
  imgs.push_back(img_of(R"(
main:
  addi x5, x0, 0
  addi x6, x0, 10
loop:
  addi x5, x5, 1
  blt x5, x6, loop
  ebreak
)"));
  System sys(std::move(m), std::move(imgs));
  RunReport rep = sys.run();
  REQUIRE(rep.zones[0].status == ZoneStatus::kFinished);
  const r5::Csrs& c = sys.cpu().state().csrs;
  CHECK(c.mhpmcounter[0] ==
        rep.zones[0].tally[static_cast<int>(HpcEvent::kInt)]);
  CHECK(c.mhpmcounter[1] ==
        rep.zones[0].tally[static_cast<int>(HpcEvent::kCb)]);
  CHECK(c.mhpmcounter[0] > 0);
  CHECK(c.mhpmcounter[1] == 10);
}

TEST_CASE("a monitoring zone mirrors counters into its page") {
  Manifest m;
  ZoneSpec mon = make_zone(0, true);
  mon.quantum_cycles = 500;
  ZoneSpec worker = make_zone(1);
  worker.regions[0].base = 0x80100000u;
  worker.regions[1].base = 0x80110000u;
  worker.quantum_cycles = 2000;
  m.zones = {mon, worker};

  std::vector<Image> imgs;
  imgs.push_back(img_of("main:\n  j main\n"));
  imgs.push_back(img_of(R"(
  .text 0x80100000
main:
  addi x5, x0, 0
  li x6, 4000
loop:
  addi x5, x5, 1
  blt x5, x6, loop
  ebreak
)"));
  System sys(std::move(m), std::move(imgs));
  RunOptions opts;
  opts.max_cycles = 200000;
  RunReport rep = sys.run(opts);

  CHECK(rep.zones[1].status == ZoneStatus::kFinished);
  CHECK(rep.detection_snapshots > 0);
  CHECK(sys.mirrored_counter(1, HpcEvent::kInt) > 0);
  CHECK(sys.mirrored_counter(1, HpcEvent::kCb) > 0);
  // The monitor zone itself has no mirror slot written by others.
  CHECK(rep.zones[0].monitor);
}
