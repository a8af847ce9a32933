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

#ifndef R5_MONITOR_HPP_
#define R5_MONITOR_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "r5/abi.hpp"
#include "r5/bus.hpp"
#include "r5/cpu.hpp"
#include "r5/hpc.hpp"
#include "r5/image.hpp"
#include "r5/pmp.hpp"
#include "r5/shadow_stack.hpp"

namespace r5 {

struct RegionSpec {
  uint32_t base = 0;
  uint32_t size = 0;
  bool r = false, w = false, x = false;
  PmpAddrMode mode = PmpAddrMode::kNapot;
  bool shared = false;
};

struct ZoneSpec {
  int id = 0;
  std::string image_path;
  std::vector<RegionSpec> regions;
  uint64_t quantum_cycles = 0;  // 0 picks the manifest default
  bool monitor = false;
};

struct Manifest {
  static constexpr uint64_t kDefaultQuantum = 10000;
  static constexpr int kMaxRegionsPerZone = 8;
  static constexpr int kMaxActiveEvents = 2;

  std::vector<ZoneSpec> zones;
  uint64_t default_quantum = kDefaultQuantum;
  std::vector<std::string> active_events;  // CSR-backed counters, max 2
  std::vector<MmioRange> mmio_ranges;      // empty keeps the bus window
};

class ManifestError : public std::runtime_error {
 public:
  explicit ManifestError(const std::string& what)
      : std::runtime_error(what) {}
};

Manifest manifest_from_json(const std::string& text);
std::string manifest_to_json(const Manifest& m);
Manifest load_manifest(const std::string& path);

enum class BootErrorKind {
  kBadManifest,
  kDuplicateLabel,
  kRegionOverlap,
  kTooManyRegions,
  kSegmentUncovered,
};

const char* to_string(BootErrorKind kind);

class BootError : public std::runtime_error {
 public:
  BootError(BootErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  BootErrorKind kind() const { return kind_; }

 private:
  BootErrorKind kind_;
};

class RunError : public std::runtime_error {
 public:
  explicit RunError(const std::string& what) : std::runtime_error(what) {}
};

enum class ViolationType {
  kPmpFault,
  kIllegalInstruction,
  kLabelMismatch,
  kSsOverflow,
  kSsUnderflow,
};

const char* to_string(ViolationType type);

struct Violation {
  ViolationType type = ViolationType::kPmpFault;
  uint32_t pc = 0;
  uint32_t detail = 0;
  uint64_t cycle = 0;
  std::string note;
};

enum class ZoneStatus { kReady, kFinished, kSuspended };

const char* to_string(ZoneStatus status);

/// A memory write applied mid-run on behalf of a compromised zone. It must
/// land in memory that zone can write from U-Mode.
struct TimedWrite {
  int zone_id = 0;
  uint64_t cycle = 0;  // applied when global mcycle reaches this
  uint32_t addr = 0;
  std::vector<uint8_t> bytes;
};

struct RunOptions {
  uint64_t max_cycles = 50'000'000;
  std::vector<TimedWrite> writes;

  // Monitor-orchestrated periodic interrupt for one zone.
  uint64_t irq_period = 0;
  int irq_zone = -1;
  uint32_t irq_handler = 0;
  bool irq_accounting = false;
};

struct ZoneReport {
  int id = 0;
  bool monitor = false;
  ZoneStatus status = ZoneStatus::kReady;
  uint64_t cycles = 0;
  uint64_t retired = 0;
  HpcTally tally{};
  HpcTally irq_tally{};
  std::vector<Violation> violations;
  uint32_t ss_high_watermark = 0;
  uint32_t ss_depth = 0;
  std::vector<MmioWrite> mmio;
};

struct RunReport {
  uint64_t total_cycles = 0;
  bool halted = false;
  std::string halt_reason;
  int detection_snapshots = 0;
  int irqs_delivered = 0;
  HpcTally trace_tally{};  // every event the core saw, zone-agnostic
  std::vector<ZoneReport> zones;

  std::string to_json() const;
};

/// The whole machine: one hart, the PMP, RAM, the zones and the secure
/// monitor. The monitor runs natively inside this class; it costs no
/// simulated cycles and touches memory as M-Mode would.
class System {
 public:
  static constexpr uint32_t kMonitorReserveBase = 0x80F00000u;
  static constexpr uint32_t kMonitorReserveSize = 0x00100000u;
  static constexpr uint32_t kCounterPageBase = kMonitorReserveBase;
  static constexpr uint32_t kShadowStackBase = kMonitorReserveBase + 0x1000u;
  static constexpr uint32_t kShadowStackStride = 0x1000u;
  static constexpr uint32_t kMtvecAddr = kMonitorReserveBase + 0xFF000u;
  static constexpr uint32_t kIrqReturnSentinel = 0xFFFFFFF0u;

  /// Validates the manifest, loads the images and prepares the first zone.
  /// Throws BootError.
  System(Manifest manifest, std::vector<Image> images);

  RunReport run(const RunOptions& opts = {});

  int zone_count() const { return static_cast<int>(zones_.size()); }

  MemoryBus& bus() { return bus_; }
  PmpUnit& pmp() { return pmp_; }
  Cpu& cpu() { return cpu_; }
  const Manifest& manifest() const { return manifest_; }

  /// Zone state peeks for tests.
  ZoneStatus zone_status(int idx) const { return zones_[idx].status; }
  const HpcTally& zone_tally(int idx) const { return zones_[idx].tally; }
  const std::vector<Violation>& zone_violations(int idx) const {
    return zones_[idx].violations;
  }
  const ShadowStack& zone_shadow_stack(int idx) const {
    return zones_[idx].sstack;
  }
  uint32_t zone_reg(int idx, int reg) const;

  /// Counter mirror slot written during monitoring slices.
  uint64_t mirrored_counter(int zone_idx, HpcEvent ev) const;

 private:
  struct Zone {
    ZoneSpec spec;
    Image image;
    ZoneStatus status = ZoneStatus::kReady;
    std::array<uint32_t, 32> regs{};
    uint32_t pc = 0;
    uint64_t quantum = 0;
    ShadowStack sstack;
    BranchPredictor predictor;
    HpcTally tally{};
    HpcTally irq_tally{};
    uint64_t cycles = 0;
    uint64_t retired = 0;
    std::array<uint64_t, 2> hpm_save{};
    std::vector<MmioWrite> mmio;
    std::vector<Violation> violations;
    std::vector<PmpEntry> pmp_entries;
    // Interrupt state.
    bool in_irq = false;
    std::array<uint32_t, 5> irq_stash{};  // pc, x1, x5, x6, x7
  };

  void validate_manifest() const;
  void build_pmp_entries();
  void load_images();
  void scan_labels() const;
  void enter_zone(int idx);
  void save_zone(int idx);
  void program_pmp(const Zone& z);
  void run_detection_slice();
  bool any_user_zone_ready() const;
  int next_ready_zone(int after) const;

  enum class SliceEnd { kContinue, kYield, kStopped };
  SliceEnd handle_trap(Zone& z, const StepInfo& si);
  void record_violation(Zone& z, ViolationType type, const StepInfo& si,
                        const std::string& note);
  void deliver_irq(Zone& z, uint32_t handler);

  Manifest manifest_;
  MemoryBus bus_;
  PmpUnit pmp_;
  Cpu cpu_;
  HpcConfig hpc_;
  std::vector<Zone> zones_;
  HpcTally trace_tally_{};
  int current_ = 0;
  int detection_snapshots_ = 0;
  int irqs_delivered_ = 0;
  const RunOptions* opts_ = nullptr;
};

}  // namespace r5

#endif  // R5_MONITOR_HPP_
