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

#include "r5/monitor.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace r5 {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string hex(uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

uint32_t parse_addr_field(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number_unsigned() || v.is_number_integer())
    return v.get<uint32_t>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      return static_cast<uint32_t>(std::stoul(s, nullptr, 0));
    } catch (const std::exception&) {
      throw ManifestError(std::string("bad address in field ") + key + ": " +
                          s);
    }
  }
  throw ManifestError(std::string("field ") + key +
                      " must be a number or hex string");
}

PmpAddrMode parse_pmp_mode(const std::string& s) {
  if (s == "tor") return PmpAddrMode::kTor;
  if (s == "napot") return PmpAddrMode::kNapot;
  if (s == "na4") return PmpAddrMode::kNa4;
  throw ManifestError("bad pmp_mode: " + s);
}

const char* pmp_mode_name(PmpAddrMode m) {
  switch (m) {
    case PmpAddrMode::kTor: return "tor";
    case PmpAddrMode::kNapot: return "napot";
    case PmpAddrMode::kNa4: return "na4";
    case PmpAddrMode::kOff: return "off";
  }
  return "?";
}

}  // namespace

Manifest manifest_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ManifestError(std::string("manifest is not valid JSON: ") +
                        e.what());
  }
  Manifest m;
  m.default_quantum = j.value("default_quantum", Manifest::kDefaultQuantum);
  if (j.contains("active_events"))
    for (const auto& e : j["active_events"])
      m.active_events.push_back(e.get<std::string>());
  if (j.contains("mmio"))
    for (const auto& r : j["mmio"]) {
      MmioRange mr;
      mr.base = parse_addr_field(r, "base");
      mr.size = parse_addr_field(r, "size");
      m.mmio_ranges.push_back(mr);
    }
  if (!j.contains("zones") || !j["zones"].is_array())
    throw ManifestError("manifest needs a zones array");
  for (const auto& zj : j["zones"]) {
    ZoneSpec z;
    z.id = zj.at("id").get<int>();
    z.image_path = zj.value("image", "");
    z.monitor = zj.value("monitor", false);
    z.quantum_cycles = zj.value("quantum_cycles", uint64_t{0});
    if (zj.contains("regions"))
      for (const auto& rj : zj["regions"]) {
        RegionSpec r;
        r.base = parse_addr_field(rj, "base");
        r.size = parse_addr_field(rj, "size");
        std::string perms = rj.value("perms", "");
        for (char c : perms) {
          if (c == 'r') r.r = true;
          else if (c == 'w') r.w = true;
          else if (c == 'x') r.x = true;
          else throw ManifestError("bad perms: " + perms);
        }
        r.mode = parse_pmp_mode(rj.value("pmp_mode", "napot"));
        r.shared = rj.value("shared", false);
        z.regions.push_back(r);
      }
    m.zones.push_back(std::move(z));
  }
  return m;
}

std::string manifest_to_json(const Manifest& m) {
  ordered_json j;
  j["default_quantum"] = m.default_quantum;
  j["active_events"] = m.active_events;
  ordered_json mmio = ordered_json::array();
  for (const MmioRange& r : m.mmio_ranges)
    mmio.push_back({{"base", hex(r.base)}, {"size", r.size}});
  j["mmio"] = mmio;
  ordered_json zones = ordered_json::array();
  for (const ZoneSpec& z : m.zones) {
    ordered_json zj;
    zj["id"] = z.id;
    zj["image"] = z.image_path;
    zj["monitor"] = z.monitor;
    zj["quantum_cycles"] = z.quantum_cycles;
    ordered_json regions = ordered_json::array();
    for (const RegionSpec& r : z.regions) {
      std::string perms;
      if (r.r) perms += 'r';
      if (r.w) perms += 'w';
      if (r.x) perms += 'x';
      regions.push_back({{"base", hex(r.base)},
                         {"size", r.size},
                         {"perms", perms},
                         {"pmp_mode", pmp_mode_name(r.mode)},
                         {"shared", r.shared}});
    }
    zj["regions"] = regions;
    zones.push_back(zj);
  }
  j["zones"] = zones;
  return j.dump(2) + "\n";
}

Manifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ManifestError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return manifest_from_json(text);
}

const char* to_string(BootErrorKind kind) {
  switch (kind) {
    case BootErrorKind::kBadManifest: return "bad-manifest";
    case BootErrorKind::kDuplicateLabel: return "duplicate-label";
    case BootErrorKind::kRegionOverlap: return "region-overlap";
    case BootErrorKind::kTooManyRegions: return "too-many-regions";
    case BootErrorKind::kSegmentUncovered: return "segment-uncovered";
  }
  return "?";
}

const char* to_string(ViolationType type) {
  switch (type) {
    case ViolationType::kPmpFault: return "pmp-fault";
    case ViolationType::kIllegalInstruction: return "illegal-instruction";
    case ViolationType::kLabelMismatch: return "label-mismatch";
    case ViolationType::kSsOverflow: return "shadow-stack-overflow";
    case ViolationType::kSsUnderflow: return "shadow-stack-underflow";
  }
  return "?";
}

const char* to_string(ZoneStatus status) {
  switch (status) {
    case ZoneStatus::kReady: return "ready";
    case ZoneStatus::kFinished: return "finished";
    case ZoneStatus::kSuspended: return "suspended";
  }
  return "?";
}

System::System(Manifest manifest, std::vector<Image> images)
    : manifest_(std::move(manifest)) {
  if (manifest_.zones.size() != images.size())
    throw BootError(BootErrorKind::kBadManifest,
                    "zone and image counts differ");
  zones_.resize(manifest_.zones.size());
  for (size_t k = 0; k < zones_.size(); ++k) {
    zones_[k].spec = manifest_.zones[k];
    zones_[k].image = std::move(images[k]);
    zones_[k].quantum = zones_[k].spec.quantum_cycles
                            ? zones_[k].spec.quantum_cycles
                            : manifest_.default_quantum;
    zones_[k].pc = zones_[k].image.entry_pc;
  }

  validate_manifest();
  build_pmp_entries();
  load_images();
  scan_labels();

  for (size_t k = 0; k < zones_.size(); ++k) {
    zones_[k].sstack = ShadowStack(
        kShadowStackBase + static_cast<uint32_t>(k) * kShadowStackStride,
        ShadowStack::kDefaultCapacity);
  }

  if (!manifest_.mmio_ranges.empty())
    hpc_.mmio_ranges = manifest_.mmio_ranges;

  if (manifest_.active_events.size() > Manifest::kMaxActiveEvents)
    throw BootError(BootErrorKind::kBadManifest,
                    "more CSR-backed events than counters");
  Csrs& c = cpu_.state().csrs;
  c.mtvec = kMtvecAddr;
  for (size_t k = 0; k < manifest_.active_events.size(); ++k) {
    auto ev = hpc_event_from_name(manifest_.active_events[k]);
    if (!ev)
      throw BootError(BootErrorKind::kBadManifest,
                      "unknown event " + manifest_.active_events[k]);
    c.mhpmevent[k] = hpc_event_selector(*ev);
  }

  enter_zone(0);
}

void System::validate_manifest() const {
  if (zones_.empty())
    throw BootError(BootErrorKind::kBadManifest, "no zones");
  std::set<int> ids;
  int monitors = 0;
  for (const Zone& z : zones_) {
    if (!ids.insert(z.spec.id).second)
      throw BootError(BootErrorKind::kBadManifest,
                      "duplicate zone id " + std::to_string(z.spec.id));
    if (z.spec.monitor) ++monitors;
    if (z.quantum == 0)
      throw BootError(BootErrorKind::kBadManifest, "zero quantum");
    if (z.spec.regions.size() > Manifest::kMaxRegionsPerZone)
      throw BootError(
          BootErrorKind::kTooManyRegions,
          "zone " + std::to_string(z.spec.id) + " has too many regions");
    int slots = z.spec.monitor ? 1 : 0;
    for (const RegionSpec& r : z.spec.regions) {
      slots += r.mode == PmpAddrMode::kTor ? 2 : 1;
      if (r.size == 0)
        throw BootError(BootErrorKind::kBadManifest, "empty region");
      switch (r.mode) {
        case PmpAddrMode::kNapot:
          if (r.size < 8 || (r.size & (r.size - 1)) != 0 ||
              (r.base % r.size) != 0)
            throw BootError(BootErrorKind::kBadManifest,
                            "napot region must be a power-of-two block: " +
                                hex(r.base));
          break;
        case PmpAddrMode::kNa4:
          if (r.size != 4)
            throw BootError(BootErrorKind::kBadManifest,
                            "na4 region must be 4 bytes");
          break;
        case PmpAddrMode::kTor:
          if ((r.base & 3) != 0 || (r.size & 3) != 0)
            throw BootError(BootErrorKind::kBadManifest,
                            "tor region must be word-aligned");
          break;
        case PmpAddrMode::kOff:
          throw BootError(BootErrorKind::kBadManifest, "region mode off");
      }
      uint64_t lo = r.base, hi = uint64_t{r.base} + r.size;
      if (lo < uint64_t{kMonitorReserveBase} + kMonitorReserveSize &&
          hi > kMonitorReserveBase)
        throw BootError(BootErrorKind::kRegionOverlap,
                        "region " + hex(r.base) + " overlaps monitor memory");
    }
    if (slots > PmpUnit::kEntries)
      throw BootError(BootErrorKind::kTooManyRegions,
                      "zone " + std::to_string(z.spec.id) +
                          " needs more PMP entries than exist");
  }
  if (monitors > 1)
    throw BootError(BootErrorKind::kBadManifest,
                    "more than one monitoring zone");

  for (size_t a = 0; a < zones_.size(); ++a) {
    for (size_t b = a + 1; b < zones_.size(); ++b) {
      for (const RegionSpec& ra : zones_[a].spec.regions) {
        for (const RegionSpec& rb : zones_[b].spec.regions) {
          uint64_t alo = ra.base, ahi = uint64_t{ra.base} + ra.size;
          uint64_t blo = rb.base, bhi = uint64_t{rb.base} + rb.size;
          if (ahi <= blo || bhi <= alo) continue;
          bool same = ra.base == rb.base && ra.size == rb.size;
          if (ra.shared && rb.shared && same) continue;
          throw BootError(BootErrorKind::kRegionOverlap,
                          "regions " + hex(ra.base) + " and " + hex(rb.base) +
                              " overlap across zones");
        }
      }
    }
  }
}

void System::build_pmp_entries() {
  for (Zone& z : zones_) {
    z.pmp_entries.clear();
    for (const RegionSpec& r : z.spec.regions) {
      PmpEntry e;
      e.r = r.r;
      e.w = r.w;
      e.x = r.x;
      switch (r.mode) {
        case PmpAddrMode::kTor: {
          PmpEntry lo;  // Off entry carrying the base address
          lo.a = PmpAddrMode::kOff;
          lo.addr = r.base >> 2;
          z.pmp_entries.push_back(lo);
          e.a = PmpAddrMode::kTor;
          e.addr = (r.base + r.size) >> 2;
          break;
        }
        case PmpAddrMode::kNapot:
          e.a = PmpAddrMode::kNapot;
          e.addr = napot_addr(r.base, r.size);
          break;
        case PmpAddrMode::kNa4:
          e.a = PmpAddrMode::kNa4;
          e.addr = r.base >> 2;
          break;
        case PmpAddrMode::kOff:
          break;
      }
      z.pmp_entries.push_back(e);
    }
    if (z.spec.monitor) {
      // Read window over the counter mirror page.
      PmpEntry e;
      e.r = true;
      e.a = PmpAddrMode::kNapot;
      e.addr = napot_addr(kCounterPageBase, 0x1000);
      z.pmp_entries.push_back(e);
    }
  }
}

void System::load_images() {
  for (Zone& z : zones_) {
    for (const Segment& seg : z.image.segments) {
      if (seg.bytes.empty()) continue;
      uint64_t lo = seg.load_addr;
      uint64_t hi = lo + seg.bytes.size();
      bool covered = false;
      for (const RegionSpec& r : z.spec.regions) {
        uint64_t rlo = r.base, rhi = uint64_t{r.base} + r.size;
        if (lo >= rlo && hi <= rhi) {
          if (seg.executable() && !r.x) continue;
          if (seg.writable() && !r.w) continue;
          covered = true;
          break;
        }
      }
      if (!covered)
        throw BootError(BootErrorKind::kSegmentUncovered,
                        "segment " + hex(seg.load_addr) + " of zone " +
                            std::to_string(z.spec.id) +
                            " fits no declared region");
      bus_.write_block(seg.load_addr, seg.bytes.data(), seg.bytes.size());
    }
  }
}

void System::scan_labels() const {
  for (const Zone& z : zones_) {
    std::set<uint32_t> seen;
    for (const Segment& seg : z.image.segments) {
      if (!seg.executable()) continue;
      for (size_t off = 0; off + 4 <= seg.bytes.size(); off += 4) {
        uint32_t w = uint32_t{seg.bytes[off]} |
                     (uint32_t{seg.bytes[off + 1]} << 8) |
                     (uint32_t{seg.bytes[off + 2]} << 16) |
                     (uint32_t{seg.bytes[off + 3]} << 24);
        auto id = label_id_of(w);
        if (!id) continue;
        if (!seen.insert(*id).second)
          throw BootError(BootErrorKind::kDuplicateLabel,
                          "zone " + std::to_string(z.spec.id) +
                              " carries label " + std::to_string(*id) +
                              " twice");
      }
    }
  }
}

void System::program_pmp(const Zone& z) {
  pmp_.clear_unlocked();
  for (size_t k = 0; k < z.pmp_entries.size(); ++k)
    pmp_.program(static_cast<int>(k), z.pmp_entries[k]);
}

void System::enter_zone(int idx) {
  current_ = idx;
  Zone& z = zones_[idx];
  CpuState& s = cpu_.state();
  s.regs = z.regs;
  s.pc = z.pc;
  s.priv = PrivMode::kUser;
  s.csrs.mhpmcounter = z.hpm_save;
  program_pmp(z);
  bus_.set_mmio_sink(&z.mmio);
}

void System::save_zone(int idx) {
  Zone& z = zones_[idx];
  const CpuState& s = cpu_.state();
  z.regs = s.regs;
  z.pc = s.pc;
  z.hpm_save = s.csrs.mhpmcounter;
}

bool System::any_user_zone_ready() const {
  for (const Zone& z : zones_)
    if (!z.spec.monitor && z.status == ZoneStatus::kReady) return true;
  return false;
}

int System::next_ready_zone(int after) const {
  int n = static_cast<int>(zones_.size());
  for (int k = 1; k <= n; ++k) {
    int idx = (after + k) % n;
    if (zones_[idx].status == ZoneStatus::kReady) return idx;
  }
  return -1;
}

void System::run_detection_slice() {
  for (size_t k = 0; k < zones_.size(); ++k) {
    const Zone& z = zones_[k];
    if (z.spec.monitor) continue;
    uint32_t slot = kCounterPageBase + static_cast<uint32_t>(k) * 64;
    for (int e = 0; e < kHpcEventCount; ++e) {
      uint64_t v = z.tally[e];
      bus_.store32(slot + e * 8, static_cast<uint32_t>(v));
      bus_.store32(slot + e * 8 + 4, static_cast<uint32_t>(v >> 32));
    }
  }
  ++detection_snapshots_;
}

uint64_t System::mirrored_counter(int zone_idx, HpcEvent ev) const {
  uint32_t slot = kCounterPageBase + static_cast<uint32_t>(zone_idx) * 64 +
                  static_cast<uint32_t>(ev) * 8;
  return uint64_t{bus_.load32(slot)} |
         (uint64_t{bus_.load32(slot + 4)} << 32);
}

uint32_t System::zone_reg(int idx, int reg) const {
  if (idx == current_) return cpu_.state().regs[reg];
  return zones_[idx].regs[reg];
}

void System::record_violation(Zone& z, ViolationType type,
                              const StepInfo& si, const std::string& note) {
  Violation v;
  v.type = type;
  v.pc = si.pc;
  v.detail = si.tval;
  v.cycle = cpu_.state().csrs.mcycle;
  v.note = note;
  z.violations.push_back(v);
  z.status = ZoneStatus::kSuspended;
}

void System::deliver_irq(Zone& z, uint32_t handler) {
  CpuState& s = cpu_.state();
  z.irq_stash = {s.pc, s.regs[1], s.regs[5], s.regs[6], s.regs[7]};
  s.regs[1] = kIrqReturnSentinel;
  s.pc = handler;
  z.in_irq = true;
  ++irqs_delivered_;
}

System::SliceEnd System::handle_trap(Zone& z, const StepInfo& si) {
  CpuState& s = cpu_.state();
  auto resume_after = [&] {
    s.pc = s.csrs.mepc + 4;
    s.priv = PrivMode::kUser;
  };

  switch (si.cause) {
    case TrapCause::kEcallFromU: {
      uint32_t code = s.regs[kMonitorCallReg];
      switch (static_cast<MonitorCall>(code)) {
        case MonitorCall::kSsPush: {
          if (z.sstack.push(bus_, s.regs[1]) ==
              ShadowStack::PushResult::kOverflow) {
            record_violation(z, ViolationType::kSsOverflow, si,
                             "shadow stack full");
            return SliceEnd::kStopped;
          }
          resume_after();
          return SliceEnd::kContinue;
        }
        case MonitorCall::kSsPop: {
          auto v = z.sstack.pop(bus_);
          if (!v) {
            record_violation(z, ViolationType::kSsUnderflow, si,
                             "shadow stack empty");
            return SliceEnd::kStopped;
          }
          s.regs[1] = *v;
          resume_after();
          return SliceEnd::kContinue;
        }
        case MonitorCall::kYield:
          resume_after();
          return SliceEnd::kYield;
        case MonitorCall::kCfiFail: {
          Violation v;
          v.type = ViolationType::kLabelMismatch;
          v.pc = si.pc;
          v.detail = s.regs[kScratchRegHi];  // the label word that was read
          v.cycle = s.csrs.mcycle;
          v.note = "indirect jump to unlisted target";
          z.violations.push_back(v);
          z.status = ZoneStatus::kSuspended;
          return SliceEnd::kStopped;
        }
      }
      record_violation(z, ViolationType::kIllegalInstruction, si,
                       "unknown monitor call " + std::to_string(code));
      return SliceEnd::kStopped;
    }
    case TrapCause::kBreakpoint:
      z.status = ZoneStatus::kFinished;
      return SliceEnd::kStopped;
    case TrapCause::kInstrAccessFault:
      if (z.in_irq && si.tval == kIrqReturnSentinel) {
        s.pc = z.irq_stash[0];
        s.regs[1] = z.irq_stash[1];
        s.regs[5] = z.irq_stash[2];
        s.regs[6] = z.irq_stash[3];
        s.regs[7] = z.irq_stash[4];
        s.priv = PrivMode::kUser;
        z.in_irq = false;
        return SliceEnd::kContinue;
      }
      record_violation(z, ViolationType::kPmpFault, si,
                       to_string(si.cause));
      return SliceEnd::kStopped;
    case TrapCause::kLoadAccessFault:
    case TrapCause::kStoreAccessFault:
      record_violation(z, ViolationType::kPmpFault, si, to_string(si.cause));
      return SliceEnd::kStopped;
    case TrapCause::kIllegalInstruction:
    case TrapCause::kEcallFromM:
      record_violation(z, ViolationType::kIllegalInstruction, si,
                       to_string(si.cause));
      return SliceEnd::kStopped;
  }
  record_violation(z, ViolationType::kIllegalInstruction, si, "unhandled");
  return SliceEnd::kStopped;
}

RunReport System::run(const RunOptions& opts) {
  opts_ = &opts;

  std::vector<TimedWrite> writes = opts.writes;
  std::stable_sort(writes.begin(), writes.end(),
                   [](const TimedWrite& a, const TimedWrite& b) {
                     return a.cycle < b.cycle;
                   });
  for (const TimedWrite& w : writes) {
    const Zone* owner = nullptr;
    for (const Zone& z : zones_)
      if (z.spec.id == w.zone_id) owner = &z;
    if (!owner) throw RunError("write names unknown zone");
    PmpUnit view;
    for (size_t k = 0; k < owner->pmp_entries.size(); ++k)
      view.program(static_cast<int>(k), owner->pmp_entries[k]);
    for (size_t k = 0; k < w.bytes.size(); ++k) {
      uint32_t a = w.addr + static_cast<uint32_t>(k);
      if (!view.allows(a, 1, AccessKind::kWrite, PrivMode::kUser))
        throw RunError("write at " + hex(a) + " is outside zone " +
                       std::to_string(w.zone_id) + " writable memory");
    }
  }

  int irq_zone_idx = -1;
  if (opts.irq_period) {
    for (size_t k = 0; k < zones_.size(); ++k)
      if (zones_[k].spec.id == opts.irq_zone)
        irq_zone_idx = static_cast<int>(k);
    if (irq_zone_idx < 0 || opts.irq_handler == 0)
      throw RunError("interrupt config names no zone or handler");
  }

  size_t next_write = 0;
  uint64_t next_irq = opts.irq_period;
  bool halted = false;
  std::string reason = "cycle budget exhausted";

  while (cpu_.state().csrs.mcycle < opts.max_cycles) {
    if (!any_user_zone_ready()) {
      halted = true;
      bool all_done = true;
      for (const Zone& z : zones_)
        if (!z.spec.monitor && z.status != ZoneStatus::kFinished)
          all_done = false;
      reason = all_done ? "all zones finished" : "no runnable zone";
      break;
    }
    if (zones_[current_].status != ZoneStatus::kReady) {
      int nxt = next_ready_zone(current_);
      if (nxt < 0) continue;
      enter_zone(nxt);
    }
    Zone& z = zones_[current_];

    if (z.spec.monitor) run_detection_slice();

    uint64_t slice = z.quantum;
    while (slice > 0 && cpu_.state().csrs.mcycle < opts.max_cycles) {
      --slice;
      uint64_t now = cpu_.state().csrs.mcycle;
      while (next_write < writes.size() && writes[next_write].cycle <= now) {
        const TimedWrite& w = writes[next_write];
        bus_.write_block(w.addr, w.bytes.data(), w.bytes.size());
        ++next_write;
      }
      if (opts.irq_period && current_ == irq_zone_idx && !z.in_irq &&
          now >= next_irq) {
        deliver_irq(z, opts.irq_handler);
        next_irq += opts.irq_period;
      }

      StepInfo si = cpu_.step(bus_, pmp_);
      z.cycles++;
      if (si.retired) z.retired++;

      uint32_t mask = classify_events(si, hpc_, z.predictor);
      HpcTally& tally =
          (z.in_irq && opts.irq_accounting) ? z.irq_tally : z.tally;
      for (int e = 0; e < kHpcEventCount; ++e)
        if (mask & (1u << e)) {
          tally[e]++;
          trace_tally_[e]++;
        }
      Csrs& c = cpu_.state().csrs;
      for (int k = 0; k < 2; ++k) {
        auto ev = hpc_event_from_selector(c.mhpmevent[k]);
        if (ev && event_fired(mask, *ev)) c.mhpmcounter[k]++;
      }

      if (si.trapped) {
        SliceEnd end = handle_trap(z, si);
        if (end == SliceEnd::kYield || end == SliceEnd::kStopped) break;
      }
    }

    save_zone(current_);
    int nxt = next_ready_zone(current_);
    if (nxt >= 0) enter_zone(nxt);
  }

  if (!any_user_zone_ready() && !halted) {
    halted = true;
    reason = "no runnable zone";
  }

  RunReport rep;
  rep.total_cycles = cpu_.state().csrs.mcycle;
  rep.halted = halted;
  rep.halt_reason = reason;
  rep.detection_snapshots = detection_snapshots_;
  rep.irqs_delivered = irqs_delivered_;
  rep.trace_tally = trace_tally_;
  for (const Zone& z : zones_) {
    ZoneReport zr;
    zr.id = z.spec.id;
    zr.monitor = z.spec.monitor;
    zr.status = z.status;
    zr.cycles = z.cycles;
    zr.retired = z.retired;
    zr.tally = z.tally;
    zr.irq_tally = z.irq_tally;
    zr.violations = z.violations;
    zr.ss_high_watermark = z.sstack.high_watermark();
    zr.ss_depth = z.sstack.depth();
    zr.mmio = z.mmio;
    rep.zones.push_back(std::move(zr));
  }
  return rep;
}

std::string RunReport::to_json() const {
  ordered_json j;
  j["total_cycles"] = total_cycles;
  j["halted"] = halted;
  j["halt_reason"] = halt_reason;
  j["detection_snapshots"] = detection_snapshots;
  j["irqs_delivered"] = irqs_delivered;
  ordered_json trace;
  for (int e = 0; e < kHpcEventCount; ++e)
    trace[to_string(static_cast<HpcEvent>(e))] = trace_tally[e];
  j["trace_events"] = trace;
  ordered_json zones_j = ordered_json::array();
  for (const ZoneReport& z : zones) {
    ordered_json zj;
    zj["id"] = z.id;
    zj["monitor"] = z.monitor;
    zj["status"] = to_string(z.status);
    zj["cycles"] = z.cycles;
    zj["retired"] = z.retired;
    ordered_json ev;
    for (int e = 0; e < kHpcEventCount; ++e)
      ev[to_string(static_cast<HpcEvent>(e))] = z.tally[e];
    zj["events"] = ev;
    ordered_json irq_ev;
    for (int e = 0; e < kHpcEventCount; ++e)
      irq_ev[to_string(static_cast<HpcEvent>(e))] = z.irq_tally[e];
    zj["irq_events"] = irq_ev;
    ordered_json viols = ordered_json::array();
    for (const Violation& v : z.violations) {
      ordered_json vj;
      vj["type"] = to_string(v.type);
      vj["pc"] = hex(v.pc);
      vj["detail"] = hex(v.detail);
      vj["cycle"] = v.cycle;
      vj["note"] = v.note;
      viols.push_back(vj);
    }
    zj["violations"] = viols;
    zj["shadow_stack"] = {{"high_watermark", z.ss_high_watermark},
                          {"depth", z.ss_depth}};
    ordered_json mm = ordered_json::array();
    for (const MmioWrite& w : z.mmio)
      mm.push_back({{"addr", hex(w.addr)},
                    {"value", hex(w.value)},
                    {"width", w.width}});
    zj["mmio"] = mm;
    zones_j.push_back(zj);
  }
  j["zones"] = zones_j;
  return j.dump(2) + "\n";
}

}  // namespace r5
