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

#include "r5/harness.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace r5 {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string hex(uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

std::vector<uint8_t> le32(uint32_t v) {
  return {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
          static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
}

[[noreturn]] void fail_asm(const std::string& what,
                           const std::vector<AsmError>& errors) {
  std::string msg = what;
  for (const AsmError& e : errors) {
    msg += "\n  ";
    msg += format_error(e);
  }
  throw std::runtime_error(msg);
}

uint32_t symbol_of(const Image& img, const std::string& name) {
  auto it = img.meta.symbols.find(name);
  if (it == img.meta.symbols.end())
    throw std::runtime_error("image lacks symbol " + name);
  return it->second;
}

RunReport checked_run(SystemSpec spec, const RunOptions& opts = {}) {
  System sys(std::move(spec.manifest), std::move(spec.images));
  RunReport rep = sys.run(opts);
  if (!tallies_conserved(rep))
    throw RunError("per-zone tallies do not add up to the core trace");
  return rep;
}

ordered_json tally_json(const HpcTally& t) {
  ordered_json j;
  for (int e = 0; e < kHpcEventCount; ++e)
    j[to_string(static_cast<HpcEvent>(e))] = t[e];
  return j;
}

ordered_json trace_json(const std::vector<MmioWrite>& trace) {
  ordered_json arr = ordered_json::array();
  for (const MmioWrite& w : trace)
    arr.push_back({{"addr", hex(w.addr)},
                   {"value", hex(w.value)},
                   {"width", w.width}});
  return arr;
}

ordered_json violation_json(const Violation& v) {
  return {{"type", to_string(v.type)},
          {"pc", hex(v.pc)},
          {"detail", hex(v.detail)},
          {"cycle", v.cycle},
          {"note", v.note}};
}

ordered_json match_json(const MatchResult& m) {
  ordered_json ev;
  for (int e = 0; e < kHpcEventCount; ++e) {
    const EventCheck& c = m.events[e];
    ev[to_string(static_cast<HpcEvent>(e))] = {
        {"observed", c.observed},
        {"deviation_pct", c.deviation_pct},
        {"alarmed", c.alarmed},
        {"skipped", c.skipped}};
  }
  return {{"alarm", m.alarm}, {"events", ev}};
}

}  // namespace

ZoneLayout zone_layout(int idx) {
  ZoneLayout l;
  l.text_base = 0x80000000u + static_cast<uint32_t>(idx) * 0x100000u;
  l.data_base = l.text_base + 0x10000u;
  return l;
}

Image build_corpus_image(const std::string& name, bool instrumented,
                         int idx) {
  ZoneLayout l = zone_layout(idx);
  std::string source = corpus_source(name, l.text_base, l.data_base);
  if (instrumented) {
    AsmProgram prog = parse_asm(source);
    if (!prog.ok()) fail_asm("parse of " + name + " failed", prog.errors);
    CfiResult res = rewrite_cfi(prog);
    if (!res.ok()) fail_asm("rewrite of " + name + " failed", res.errors);
    return res.image;
  }
  AsmOutput out = assemble(source);
  if (!out.ok()) fail_asm("assembly of " + name + " failed", out.errors);
  return out.image;
}

SystemSpec make_system(const std::vector<std::string>& programs,
                       bool instrumented, int monitor_idx) {
  SystemSpec spec;
  for (size_t i = 0; i < programs.size(); ++i) {
    int idx = static_cast<int>(i);
    ZoneLayout l = zone_layout(idx);
    ZoneSpec z;
    z.id = idx;
    z.image_path = programs[i];
    z.monitor = idx == monitor_idx;
    z.regions.push_back(
        {l.text_base, 0x10000u, true, false, true, PmpAddrMode::kNapot, false});
    z.regions.push_back(
        {l.data_base, 0x10000u, true, true, false, PmpAddrMode::kNapot, false});
    z.regions.push_back({MemoryBus::kMmioBase, MemoryBus::kMmioSize, true,
                         true, false, PmpAddrMode::kNapot, true});
    spec.manifest.zones.push_back(std::move(z));
    spec.images.push_back(build_corpus_image(programs[i], instrumented, idx));
  }
  return spec;
}

bool trace_equal(const std::vector<MmioWrite>& a,
                 const std::vector<MmioWrite>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].addr != b[i].addr || a[i].value != b[i].value ||
        a[i].width != b[i].width)
      return false;
  return true;
}

bool tallies_conserved(const RunReport& rep) {
  for (int e = 0; e < kHpcEventCount; ++e) {
    uint64_t sum = 0;
    for (const ZoneReport& z : rep.zones) sum += z.tally[e] + z.irq_tally[e];
    if (sum != rep.trace_tally[e]) return false;
  }
  return true;
}

AttackSuite run_attacks() {
  AttackSuite suite;

  {
    // Attack 1: corrupt the spilled return address mid-call.
    SystemSpec benign_spec = make_system({"retvictim"}, true);
    uint32_t slot = symbol_of(benign_spec.images[0], "__stack_top") - 4;
    uint32_t gadget = symbol_of(benign_spec.images[0], "gadget");
    RunReport benign = checked_run(std::move(benign_spec));

    RunOptions strike;
    strike.writes.push_back({0, 400, slot, le32(gadget)});
    RunReport attacked = checked_run(make_system({"retvictim"}, true), strike);

    SystemSpec raw_spec = make_system({"retvictim"}, false);
    uint32_t raw_gadget = symbol_of(raw_spec.images[0], "gadget");
    RunOptions raw_strike;
    raw_strike.writes.push_back({0, 400, slot, le32(raw_gadget)});
    RunReport raw = checked_run(std::move(raw_spec), raw_strike);

    Attack1Result& a = suite.a1;
    a.benign = benign.zones[0].mmio;
    a.attacked = attacked.zones[0].mmio;
    a.uninstrumented = raw.zones[0].mmio;
    a.attacked_clean = attacked.zones[0].status == ZoneStatus::kFinished &&
                       attacked.zones[0].violations.empty();
    a.passed = a.attacked_clean && trace_equal(a.benign, a.attacked);
  }

  {
    // Attack 2: touch the shadow stack from inside the zone.
    RunReport rep = checked_run(make_system({"sstamper"}, true));
    Attack2Result& a = suite.a2;
    a.status = rep.zones[0].status;
    a.violations = rep.zones[0].violations;
    a.passed = a.status == ZoneStatus::kSuspended && a.violations.size() == 1 &&
               a.violations[0].type == ViolationType::kPmpFault &&
               a.violations[0].detail == System::kShadowStackBase;
  }

  {
    // Attack 3: redirect a function-pointer table slot.
    SystemSpec spec = make_system({"dispatch"}, true);
    uint32_t slot = symbol_of(spec.images[0], "handlers") + 12;
    uint32_t evil = symbol_of(spec.images[0], "evil");
    uint32_t func2 = symbol_of(spec.images[0], "func2");
    RunReport benign = checked_run(std::move(spec));

    RunOptions strike;
    strike.writes.push_back({0, 0, slot, le32(evil)});
    RunReport attacked = checked_run(make_system({"dispatch"}, true), strike);

    RunOptions swap;
    swap.writes.push_back({0, 0, slot, le32(func2)});
    RunReport legal = checked_run(make_system({"dispatch"}, true), swap);

    Attack3Result& a = suite.a3;
    a.benign = benign.zones[0].mmio;
    a.legal = legal.zones[0].mmio;
    a.mismatch_caught =
        attacked.zones[0].status == ZoneStatus::kSuspended &&
        attacked.zones[0].violations.size() == 1 &&
        attacked.zones[0].violations[0].type == ViolationType::kLabelMismatch;
    if (!attacked.zones[0].violations.empty())
      a.violation = attacked.zones[0].violations[0];
    a.legal_silent = legal.zones[0].status == ZoneStatus::kFinished &&
                     legal.zones[0].violations.empty();
    a.passed = a.mismatch_caught && a.legal_silent;
  }

  suite.passed = suite.a1.passed && suite.a2.passed && suite.a3.passed;
  return suite;
}

std::string AttackSuite::to_json() const {
  ordered_json j;
  j["attack1"] = {{"benign_trace", trace_json(a1.benign)},
                  {"attacked_trace", trace_json(a1.attacked)},
                  {"uninstrumented_trace", trace_json(a1.uninstrumented)},
                  {"attacked_clean", a1.attacked_clean},
                  {"passed", a1.passed}};
  ordered_json v2 = ordered_json::array();
  for (const Violation& v : a2.violations) v2.push_back(violation_json(v));
  j["attack2"] = {{"status", to_string(a2.status)},
                  {"violations", v2},
                  {"passed", a2.passed}};
  j["attack3"] = {{"violation", violation_json(a3.violation)},
                  {"mismatch_caught", a3.mismatch_caught},
                  {"legal_silent", a3.legal_silent},
                  {"benign_trace", trace_json(a3.benign)},
                  {"legal_trace", trace_json(a3.legal)},
                  {"passed", a3.passed}};
  j["passed"] = passed;
  return j.dump(2) + "\n";
}

std::string AttackSuite::to_text() const {
  std::string out;
  out += "attack 1, return slot corruption: ";
  out += a1.passed ? "neutralized, trace matches benign run\n"
                   : "FAILED\n";
  out += "attack 2, shadow stack tamper:    ";
  if (a2.passed) {
    out += "stopped, ";
    out += a2.violations[0].note;
    out += " at " + hex(a2.violations[0].detail) + "\n";
  } else {
    out += "FAILED\n";
  }
  out += "attack 3, pointer redirect:       ";
  out += a3.mismatch_caught ? "unlisted target caught" : "FAILED";
  out += a3.legal_silent ? ", listed swap ran silently\n" : ", swap FAILED\n";
  return out;
}

const HpcVariantRow* HpcExperiment::row(const std::string& label) const {
  for (const HpcVariantRow& r : rows)
    if (r.label == label) return &r;
  return nullptr;
}

HpcExperiment run_hpc_experiment(const std::string& program, int train_runs) {
  HpcExperiment exp;
  exp.program = program;
  exp.train_runs = train_runs;

  SystemSpec base_spec = make_system({program}, false);
  uint32_t buf = symbol_of(base_spec.images[0],
                           corpus_input_symbol(program));

  auto run_tally = [&](const SystemSpec& spec, int input) {
    RunOptions o;
    o.writes.push_back({0, 0, buf, corpus_input(program, input)});
    RunReport rep = checked_run(spec, o);
    if (rep.zones[0].status != ZoneStatus::kFinished)
      throw RunError(program + " did not finish");
    return rep.zones[0].tally;
  };

  std::vector<HpcTally> training;
  for (int n = 0; n < train_runs; ++n)
    training.push_back(run_tally(base_spec, 0));
  exp.signature = train_signature(0, training);

  auto add_row = [&](const std::string& label, const SystemSpec& spec,
                     int input) {
    HpcVariantRow row;
    row.label = label;
    row.tally = run_tally(spec, input);
    row.match = match_signature(exp.signature, row.tally);
    exp.rows.push_back(std::move(row));
  };

  add_row("inp1", base_spec, 1);
  add_row("inp2", base_spec, 2);
  add_row("inp3", base_spec, 3);
  add_row("mod1", make_system({program + "-mod1"}, false), 0);
  add_row("mod2", make_system({program + "-mod2"}, false), 0);
  return exp;
}

std::string HpcExperiment::to_json() const {
  ordered_json j;
  j["program"] = program;
  j["train_runs"] = train_runs;
  j["signature"] = ordered_json::parse(signature_to_json(signature));
  ordered_json rows_j = ordered_json::array();
  for (const HpcVariantRow& r : rows)
    rows_j.push_back({{"label", r.label},
                      {"tally", tally_json(r.tally)},
                      {"match", match_json(r.match)}});
  j["rows"] = rows_j;
  return j.dump(2) + "\n";
}

std::string HpcExperiment::to_text() const {
  std::string out = program + ", deviation from the trained run (%):\n";
  out += "  run   ";
  for (int e = 0; e < kHpcEventCount; ++e) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%8s", to_string(static_cast<HpcEvent>(e)));
    out += buf;
  }
  out += "  verdict\n";
  for (const HpcVariantRow& r : rows) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "  %-6s", r.label.c_str());
    out += buf;
    for (int e = 0; e < kHpcEventCount; ++e) {
      if (r.match.events[e].skipped)
        std::snprintf(buf, sizeof buf, "%8s", "-");
      else
        std::snprintf(buf, sizeof buf, "%8.1f", r.match.events[e].deviation_pct);
      out += buf;
    }
    out += r.match.alarm ? "  alarm\n" : "  ok\n";
  }
  return out;
}

IrqScenario run_irq_scenario(int train_runs) {
  IrqScenario sc;
  SystemSpec spec = make_system({"cipher-irq"}, false);
  uint32_t handler = symbol_of(spec.images[0], "irq_handler");

  std::vector<HpcTally> training;
  for (int n = 0; n < train_runs; ++n) {
    RunReport rep = checked_run(spec);
    if (rep.zones[0].status != ZoneStatus::kFinished)
      throw RunError("cipher-irq did not finish");
    training.push_back(rep.zones[0].tally);
  }
  sc.signature = train_signature(0, training);

  RunOptions irq;
  irq.irq_period = 977;
  irq.irq_zone = 0;
  irq.irq_handler = handler;

  irq.irq_accounting = false;
  RunReport polluted = checked_run(spec, irq);
  sc.polluted = polluted.zones[0].tally;
  sc.irqs_delivered = polluted.irqs_delivered;

  irq.irq_accounting = true;
  RunReport accounted = checked_run(spec, irq);
  sc.accounted = accounted.zones[0].tally;

  sc.match_polluted = match_signature(sc.signature, sc.polluted);
  sc.match_accounted = match_signature(sc.signature, sc.accounted);
  sc.passed = sc.match_polluted.alarm && !sc.match_accounted.alarm &&
              sc.irqs_delivered > 0;
  return sc;
}

std::string IrqScenario::to_json() const {
  ordered_json j;
  j["signature"] = ordered_json::parse(signature_to_json(signature));
  j["irqs_delivered"] = irqs_delivered;
  j["polluted"] = {{"tally", tally_json(polluted)},
                   {"match", match_json(match_polluted)}};
  j["accounted"] = {{"tally", tally_json(accounted)},
                    {"match", match_json(match_accounted)}};
  j["passed"] = passed;
  return j.dump(2) + "\n";
}

std::string IrqScenario::to_text() const {
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "interrupts delivered: %d\n"
                "  handler charged to zone:  %s\n"
                "  handler kept aside:       %s\n",
                irqs_delivered, match_polluted.alarm ? "alarm" : "ok",
                match_accounted.alarm ? "alarm" : "ok");
  return buf;
}

std::vector<OverheadRow> measure_overhead() {
  std::vector<OverheadRow> rows;
  for (const char* name : {"recurse", "cipher", "decoder", "dispatch"}) {
    OverheadRow row;
    row.name = name;

    RunReport base = checked_run(make_system({name}, false));
    row.base_cycles = base.zones[0].cycles;
    row.base_bytes = build_corpus_image(name, false, 0).total_size();

    ZoneLayout l = zone_layout(0);
    AsmProgram prog = parse_asm(corpus_source(name, l.text_base, l.data_base));
    if (!prog.ok()) fail_asm("parse of " + row.name + " failed", prog.errors);
    CfiResult res = rewrite_cfi(prog);
    if (!res.ok()) fail_asm("rewrite of " + row.name + " failed", res.errors);
    row.labels = res.summary.labels_added;
    row.sites = res.summary.sites_instrumented;
    row.instr_bytes = res.image.total_size();

    SystemSpec spec = make_system({name}, false);
    spec.images[0] = res.image;
    RunReport instr = checked_run(std::move(spec));
    row.instr_cycles = instr.zones[0].cycles;

    row.cycle_pct = 100.0 *
                    (static_cast<double>(row.instr_cycles) -
                     static_cast<double>(row.base_cycles)) /
                    static_cast<double>(row.base_cycles);
    row.size_pct = 100.0 *
                   (static_cast<double>(row.instr_bytes) -
                    static_cast<double>(row.base_bytes)) /
                   static_cast<double>(row.base_bytes);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string size_member_source(int k) {
  ZoneLayout l = zone_layout(0);
  char head[64];
  std::snprintf(head, sizeof head, "  .text 0x%08x\n  .entry main\n\n",
                l.text_base);
  std::string text = std::string(head) + R"(main:
  la x2, __stack_top
  jal x1, spin_table
  ebreak

spin_table:
  addi x2, x2, -16
  sw x1, 12(x2)
  sw x8, 8(x2)
  sw x9, 4(x2)
  la x8, table
  addi x9, x0, 6
.Ln:
  lw x5, 0(x8)
  jalr x1, x5, 0
  addi x8, x8, 4
  addi x9, x9, -1
  bne x9, x0, .Ln
  lw x1, 12(x2)
  lw x8, 8(x2)
  lw x9, 4(x2)
  addi x2, x2, 16
  ret
)";
  for (int i = 1; i <= 6; ++i) {
    char fn[96];
    std::snprintf(fn, sizeof fn,
                  "\nh%d:\n  addi x5, x0, %d\n  slli x5, x5, 2\n  ret\n", i,
                  i * 3 + 1);
    text += fn;
  }
  char dhead[32];
  std::snprintf(dhead, sizeof dhead, "\n  .data 0x%08x\n", l.data_base);
  std::string data = std::string(dhead) + "table:\n";
  for (int i = 0; i < 6; ++i) {
    char w[32];
    std::snprintf(w, sizeof w, "  .word h%d\n", i < k ? i + 1 : 1);
    data += w;
  }
  data += "__stack:\n  .zero 1024\n__stack_top:\n";
  return text + data;
}

}  // namespace

std::vector<SizeFamilyRow> size_monotonicity() {
  std::vector<SizeFamilyRow> rows;
  for (int k = 1; k <= 6; ++k) {
    std::string source = size_member_source(k);
    AsmOutput base = assemble(source);
    if (!base.ok()) fail_asm("size family member failed", base.errors);
    AsmProgram prog = parse_asm(source);
    CfiResult res = rewrite_cfi(prog);
    if (!res.ok()) fail_asm("size family rewrite failed", res.errors);
    SizeFamilyRow row;
    row.labeled = k;
    row.base_bytes = base.image.total_size();
    row.instr_bytes = res.image.total_size();
    row.size_pct = 100.0 *
                   (static_cast<double>(row.instr_bytes) -
                    static_cast<double>(row.base_bytes)) /
                   static_cast<double>(row.base_bytes);
    rows.push_back(row);
  }
  return rows;
}

FairnessResult run_fairness(int rotations) {
  FairnessResult f;
  f.spin_quantum = 7000;
  f.monitor_quantum = 3000;
  f.budget = static_cast<uint64_t>(rotations) *
             (f.spin_quantum + f.monitor_quantum);

  SystemSpec spec = make_system({"idle", "idle"}, false, 1);
  spec.manifest.zones[0].quantum_cycles = f.spin_quantum;
  spec.manifest.zones[1].quantum_cycles = f.monitor_quantum;

  RunOptions o;
  o.max_cycles = f.budget;
  System sys(std::move(spec.manifest), std::move(spec.images));
  RunReport rep = sys.run(o);

  f.spin_cycles = rep.zones[0].cycles;
  f.monitor_cycles = rep.zones[1].cycles;
  f.snapshots = rep.detection_snapshots;
  f.expected_share = static_cast<double>(f.monitor_quantum) /
                     static_cast<double>(f.spin_quantum + f.monitor_quantum);
  f.share = static_cast<double>(f.monitor_cycles) /
            static_cast<double>(f.budget);
  double expected_cycles =
      f.expected_share * static_cast<double>(f.budget);
  double slack = static_cast<double>(
      std::max(f.spin_quantum, f.monitor_quantum));
  f.passed = std::abs(static_cast<double>(f.monitor_cycles) -
                      expected_cycles) <= slack;
  return f;
}

ReproReport run_all(int hpc_train_runs) {
  ReproReport rep;
  rep.attacks = run_attacks();
  rep.cipher_exp = run_hpc_experiment("cipher", hpc_train_runs);
  rep.decoder_exp = run_hpc_experiment("decoder", hpc_train_runs);
  rep.irq = run_irq_scenario();
  rep.overhead = measure_overhead();
  rep.sizes = size_monotonicity();
  rep.fairness = run_fairness();
  return rep;
}

bool ReproReport::passed() const {
  if (!attacks.passed || !irq.passed || !fairness.passed) return false;

  for (const char* label : {"inp1", "inp2", "inp3"}) {
    const HpcVariantRow* r = cipher_exp.row(label);
    if (!r || r->match.alarm) return false;
  }
  const HpcVariantRow* mod2 = cipher_exp.row("mod2");
  if (!mod2 || !mod2->match.alarm ||
      mod2->match.strongest_event() != static_cast<int>(HpcEvent::kJal))
    return false;

  bool fp = false;
  for (const char* label : {"inp1", "inp2", "inp3"}) {
    const HpcVariantRow* r = decoder_exp.row(label);
    if (r && r->match.alarm) fp = true;
  }
  if (!fp) return false;

  const OverheadRow* recurse = nullptr;
  const OverheadRow* cipher = nullptr;
  for (const OverheadRow& r : overhead) {
    if (r.name == "recurse") recurse = &r;
    if (r.name == "cipher") cipher = &r;
  }
  if (!recurse || !cipher) return false;
  for (const OverheadRow& r : overhead) {
    if (r.cycle_pct > recurse->cycle_pct) return false;
    if (r.cycle_pct < cipher->cycle_pct) return false;
  }
  for (size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i].size_pct <= sizes[i - 1].size_pct) return false;
  return true;
}

std::string overhead_to_json(const std::vector<OverheadRow>& rows,
                             const std::vector<SizeFamilyRow>& sizes) {
  ordered_json j;
  ordered_json rj = ordered_json::array();
  for (const OverheadRow& r : rows)
    rj.push_back({{"name", r.name},
                  {"base_cycles", r.base_cycles},
                  {"instr_cycles", r.instr_cycles},
                  {"cycle_pct", r.cycle_pct},
                  {"base_bytes", r.base_bytes},
                  {"instr_bytes", r.instr_bytes},
                  {"size_pct", r.size_pct},
                  {"labels", r.labels},
                  {"sites", r.sites}});
  j["programs"] = rj;
  ordered_json sj = ordered_json::array();
  for (const SizeFamilyRow& r : sizes)
    sj.push_back({{"labeled_functions", r.labeled},
                  {"base_bytes", r.base_bytes},
                  {"instr_bytes", r.instr_bytes},
                  {"size_pct", r.size_pct}});
  j["size_family"] = sj;
  return j.dump(2) + "\n";
}

std::string overhead_to_text(const std::vector<OverheadRow>& rows,
                             const std::vector<SizeFamilyRow>& sizes) {
  std::string out = "instrumentation overhead:\n";
  out += "  program     cycles      instr       cycle%   bytes   instr   "
         "size%\n";
  for (const OverheadRow& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "  %-10s %9llu  %9llu  %7.2f  %6llu  %6llu  %6.2f\n",
                  r.name.c_str(),
                  static_cast<unsigned long long>(r.base_cycles),
                  static_cast<unsigned long long>(r.instr_cycles), r.cycle_pct,
                  static_cast<unsigned long long>(r.base_bytes),
                  static_cast<unsigned long long>(r.instr_bytes), r.size_pct);
    out += buf;
  }
  out += "size growth by labeled-function count:\n";
  for (const SizeFamilyRow& r : sizes) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "  %d labeled: %.3f%%\n", r.labeled,
                  r.size_pct);
    out += buf;
  }
  return out;
}

std::string ReproReport::to_json() const {
  ordered_json j;
  j["attacks"] = ordered_json::parse(attacks.to_json());
  j["hpc_cipher"] = ordered_json::parse(cipher_exp.to_json());
  j["hpc_decoder"] = ordered_json::parse(decoder_exp.to_json());
  j["interrupts"] = ordered_json::parse(irq.to_json());
  j["overhead"] = ordered_json::parse(overhead_to_json(overhead, sizes));
  j["fairness"] = {{"monitor_cycles", fairness.monitor_cycles},
                   {"spin_cycles", fairness.spin_cycles},
                   {"budget", fairness.budget},
                   {"share", fairness.share},
                   {"expected_share", fairness.expected_share},
                   {"snapshots", fairness.snapshots},
                   {"passed", fairness.passed}};
  j["passed"] = passed();
  return j.dump(2) + "\n";
}

std::string ReproReport::to_text() const {
  std::string out;
  out += attacks.to_text();
  out += "\n";
  out += cipher_exp.to_text();
  out += "\n";
  out += decoder_exp.to_text();
  out += "\n";
  out += irq.to_text();
  out += "\n";
  out += overhead_to_text(overhead, sizes);
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "\nmonitor cycle share: %.4f (quantum share %.4f), "
                "snapshots %d\n",
                fairness.share, fairness.expected_share, fairness.snapshots);
  out += buf;
  out += passed() ? "\nall scenarios behaved as expected\n"
                  : "\nSOME SCENARIOS FAILED\n";
  return out;
}

}  // namespace r5
