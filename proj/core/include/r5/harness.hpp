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

#ifndef R5_HARNESS_HPP_
#define R5_HARNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "r5/cfi.hpp"
#include "r5/corpus.hpp"
#include "r5/detector.hpp"
#include "r5/monitor.hpp"

namespace r5 {

/// Standard zone placement: one megabyte per zone, data after text.
struct ZoneLayout {
  uint32_t text_base = 0;
  uint32_t data_base = 0;
};
ZoneLayout zone_layout(int idx);

/// Corpus program assembled at the standard bases for zone slot `idx`,
/// optionally run through the CFI rewriter. Throws on assembly errors.
Image build_corpus_image(const std::string& name, bool instrumented,
                         int idx = 0);

/// Manifest plus images for one zone per program name; `monitor_idx`
/// marks that slot as the monitoring zone (-1 for none).
struct SystemSpec {
  Manifest manifest;
  std::vector<Image> images;
};
SystemSpec make_system(const std::vector<std::string>& programs,
                       bool instrumented, int monitor_idx = -1);

bool trace_equal(const std::vector<MmioWrite>& a,
                 const std::vector<MmioWrite>& b);

/// Every zone event must appear in the zone-agnostic core tally.
bool tallies_conserved(const RunReport& rep);

// Return-slot corruption. The monitor restores the true return address,
// so the instrumented run must match the benign trace; the uninstrumented
// contrast run lands in the gadget.
struct Attack1Result {
  std::vector<MmioWrite> benign;
  std::vector<MmioWrite> attacked;
  std::vector<MmioWrite> uninstrumented;
  bool attacked_clean = false;  // finished, no violations
  bool passed = false;
};

// Shadow-stack tampering from U-Mode must die on the PMP.
struct Attack2Result {
  ZoneStatus status = ZoneStatus::kReady;
  std::vector<Violation> violations;
  bool passed = false;
};

// Function-pointer overwrite: an unlisted target fails the label check,
// a listed one slips through silently.
struct Attack3Result {
  Violation violation;
  bool mismatch_caught = false;
  bool legal_silent = false;
  std::vector<MmioWrite> benign;
  std::vector<MmioWrite> legal;
  bool passed = false;
};

struct AttackSuite {
  Attack1Result a1;
  Attack2Result a2;
  Attack3Result a3;
  bool passed = false;

  std::string to_json() const;
  std::string to_text() const;
};
AttackSuite run_attacks();

/// One checked run against a trained signature.
struct HpcVariantRow {
  std::string label;
  HpcTally tally{};
  MatchResult match;
};

struct HpcExperiment {
  std::string program;
  int train_runs = 0;
  HpcSignature signature;
  std::vector<HpcVariantRow> rows;

  const HpcVariantRow* row(const std::string& label) const;
  std::string to_json() const;
  std::string to_text() const;
};

/// Trains on the default input repeated `train_runs` times, then checks
/// three fresh inputs plus the mod1/mod2 variants. Uninstrumented images,
/// so ecall traps never pollute the counters.
HpcExperiment run_hpc_experiment(const std::string& program, int train_runs);

struct IrqScenario {
  HpcSignature signature;  // trained without interrupts
  HpcTally polluted{};     // handler events charged to the zone
  HpcTally accounted{};    // handler events kept aside
  MatchResult match_polluted;
  MatchResult match_accounted;
  int irqs_delivered = 0;
  bool passed = false;  // alarm without accounting, none with it

  std::string to_json() const;
  std::string to_text() const;
};
IrqScenario run_irq_scenario(int train_runs = 20);

struct OverheadRow {
  std::string name;
  uint64_t base_cycles = 0;
  uint64_t instr_cycles = 0;
  double cycle_pct = 0.0;
  uint64_t base_bytes = 0;
  uint64_t instr_bytes = 0;
  double size_pct = 0.0;
  int labels = 0;
  int sites = 0;
};
std::vector<OverheadRow> measure_overhead();

/// Same-size programs whose pointer tables name 1..6 distinct functions.
struct SizeFamilyRow {
  int labeled = 0;
  uint64_t base_bytes = 0;
  uint64_t instr_bytes = 0;
  double size_pct = 0.0;
};
std::vector<SizeFamilyRow> size_monotonicity();

struct FairnessResult {
  uint64_t monitor_cycles = 0;
  uint64_t spin_cycles = 0;
  uint64_t budget = 0;
  uint64_t monitor_quantum = 0;
  uint64_t spin_quantum = 0;
  int snapshots = 0;
  double share = 0.0;
  double expected_share = 0.0;
  bool passed = false;  // share error within one slice of cycles
};
FairnessResult run_fairness(int rotations = 100);

struct ReproReport {
  AttackSuite attacks;
  HpcExperiment cipher_exp;
  HpcExperiment decoder_exp;
  IrqScenario irq;
  std::vector<OverheadRow> overhead;
  std::vector<SizeFamilyRow> sizes;
  FairnessResult fairness;

  bool passed() const;
  std::string to_json() const;
  std::string to_text() const;
};
ReproReport run_all(int hpc_train_runs = 1000);

std::string overhead_to_json(const std::vector<OverheadRow>& rows,
                             const std::vector<SizeFamilyRow>& sizes);
std::string overhead_to_text(const std::vector<OverheadRow>& rows,
                             const std::vector<SizeFamilyRow>& sizes);

}  // namespace r5

#endif  // R5_HARNESS_HPP_
