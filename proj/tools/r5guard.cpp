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

// Command line front door. Exit codes: 0 means every expectation was met,
// 1 means a mismatch (violation, alarm or failed scenario), 2 means the
// setup itself was bad (unreadable file, malformed manifest, asm errors).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "r5/assembler.hpp"
#include "r5/cfi.hpp"
#include "r5/corpus.hpp"
#include "r5/detector.hpp"
#include "r5/harness.hpp"
#include "r5/monitor.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kSetupError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

bool is_r5img(const std::string& bytes) {
  return bytes.size() >= 4 && bytes.compare(0, 4, "R5IM") == 0;
}

[[noreturn]] void die_asm(const std::string& what,
                          const std::vector<r5::AsmError>& errors) {
  std::string msg = what;
  for (const r5::AsmError& e : errors) {
    msg += "\n  ";
    msg += r5::format_error(e);
  }
  throw std::runtime_error(msg);
}

/// Image paths in manifests may use "corpus:NAME" or "corpus+cfi:NAME" to
/// pull a built-in program, assembled at the standard base for its slot.
r5::Image resolve_image(const std::string& spec, int idx) {
  const std::string cfi = "corpus+cfi:";
  const std::string plain = "corpus:";
  if (spec.rfind(cfi, 0) == 0)
    return r5::build_corpus_image(spec.substr(cfi.size()), true, idx);
  if (spec.rfind(plain, 0) == 0)
    return r5::build_corpus_image(spec.substr(plain.size()), false, idx);
  return r5::load_image(spec);
}

std::vector<r5::Image> resolve_images(const r5::Manifest& m) {
  std::vector<r5::Image> images;
  for (size_t i = 0; i < m.zones.size(); ++i)
    images.push_back(
        resolve_image(m.zones[i].image_path, static_cast<int>(i)));
  return images;
}

r5::RunReport run_manifest(const std::string& manifest_path,
                           uint64_t budget) {
  r5::Manifest m = r5::load_manifest(manifest_path);
  std::vector<r5::Image> images = resolve_images(m);
  r5::System sys(std::move(m), std::move(images));
  r5::RunOptions o;
  if (budget) o.max_cycles = budget;
  return sys.run(o);
}

void emit(const std::string& json_path, const std::string& json_text,
          const std::string& stdout_text) {
  if (!json_path.empty())
    write_file(json_path, json_text);
  else if (stdout_text.empty())
    std::cout << json_text;
  if (!stdout_text.empty()) std::cout << stdout_text;
}

int cmd_asm(const std::string& src, const std::string& out) {
  r5::AsmOutput res = r5::assemble(read_file(src));
  if (!res.ok()) die_asm("assembly failed", res.errors);
  r5::save_image(res.image, out);
  std::printf("%s: %llu bytes, entry 0x%08x, %zu segments\n", out.c_str(),
              static_cast<unsigned long long>(res.image.total_size()),
              res.image.entry_pc, res.image.segments.size());
  return kOk;
}

r5::CfiOptions load_hints(const std::string& path) {
  r5::CfiOptions opts;
  if (path.empty()) return opts;
  ordered_json j = ordered_json::parse(read_file(path));
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::vector<std::string> targets;
    for (const auto& t : it.value()) targets.push_back(t.get<std::string>());
    opts.hints[it.key()] = std::move(targets);
  }
  return opts;
}

int cmd_rewrite(const std::string& input, const std::string& out,
                const std::string& hints_path) {
  std::string raw = read_file(input);
  std::string source;
  if (is_r5img(raw)) {
    r5::Image img = r5::load_image(input);
    if (img.meta.instrumented)
      throw std::runtime_error(input + " is already instrumented");
    source = r5::disassemble(img);
  } else {
    source = raw;
  }
  r5::AsmProgram prog = r5::parse_asm(source);
  if (!prog.ok()) die_asm("parse failed", prog.errors);
  r5::CfiResult res = r5::rewrite_cfi(prog, load_hints(hints_path));
  if (!res.ok()) die_asm("rewrite failed", res.errors);
  r5::save_image(res.image, out);
  std::printf(
      "%s: %d labels, %d checked sites, %d return saves, %d return loads\n",
      out.c_str(), res.summary.labels_added, res.summary.sites_instrumented,
      res.summary.return_saves, res.summary.return_loads);
  return kOk;
}

int cmd_overhead(const std::string& base_path,
                 const std::string& instr_path) {
  r5::Image base = r5::load_image(base_path);
  r5::Image instr = r5::load_image(instr_path);
  double base_bytes = static_cast<double>(base.total_size());
  double pct =
      100.0 * (static_cast<double>(instr.total_size()) - base_bytes) /
      base_bytes;
  std::printf("size: %llu -> %llu bytes (%+.2f%%)\n",
              static_cast<unsigned long long>(base.total_size()),
              static_cast<unsigned long long>(instr.total_size()), pct);
  int labels = 0;
  for (const r5::FunctionInfo& f : instr.meta.functions)
    if (f.has_label) ++labels;
  if (!instr.meta.functions.empty())
    std::printf("instrumented: %d labeled functions, %zu checked sites\n",
                labels, instr.meta.sites.size());
  return kOk;
}

int cmd_run(const std::string& manifest, uint64_t budget,
            const std::string& json_path) {
  r5::RunReport rep = run_manifest(manifest, budget);
  std::string text;
  bool clean = true;
  for (const r5::ZoneReport& z : rep.zones) {
    char line[128];
    std::snprintf(line, sizeof line, "zone %d: %s, %llu cycles, %zu violations\n",
                  z.id, r5::to_string(z.status),
                  static_cast<unsigned long long>(z.cycles),
                  z.violations.size());
    text += line;
    if (!z.monitor && z.status != r5::ZoneStatus::kFinished) clean = false;
    if (!z.violations.empty()) clean = false;
  }
  emit(json_path, rep.to_json(), text);
  return clean ? kOk : kMismatch;
}

int cmd_train(const std::string& manifest, int runs, int zone,
              uint64_t budget, const std::string& sig_path) {
  std::vector<r5::HpcTally> tallies;
  for (int n = 0; n < runs; ++n) {
    r5::RunReport rep = run_manifest(manifest, budget);
    if (zone < 0 || zone >= static_cast<int>(rep.zones.size()))
      throw std::runtime_error("no such zone");
    tallies.push_back(rep.zones[zone].tally);
  }
  r5::HpcSignature sig = r5::train_signature(zone, tallies);
  r5::save_signature(sig, sig_path);
  std::printf("%s: zone %d signature from %d runs\n", sig_path.c_str(), zone,
              runs);
  return kOk;
}

int cmd_check(const std::string& manifest, const std::string& sig_path,
              uint64_t budget, const std::string& json_path) {
  r5::HpcSignature sig = r5::load_signature(sig_path);
  r5::RunReport rep = run_manifest(manifest, budget);
  if (sig.zone_id < 0 || sig.zone_id >= static_cast<int>(rep.zones.size()))
    throw std::runtime_error("signature names a zone the manifest lacks");
  r5::MatchResult match =
      r5::match_signature(sig, rep.zones[sig.zone_id].tally);

  ordered_json j;
  j["zone_id"] = sig.zone_id;
  j["alarm"] = match.alarm;
  ordered_json ev;
  for (int e = 0; e < r5::kHpcEventCount; ++e) {
    const r5::EventCheck& c = match.events[e];
    ev[r5::to_string(static_cast<r5::HpcEvent>(e))] = {
        {"observed", c.observed},
        {"deviation_pct", c.deviation_pct},
        {"alarmed", c.alarmed},
        {"skipped", c.skipped}};
  }
  j["events"] = ev;

  std::string text = match.alarm ? "alarm\n" : "ok\n";
  emit(json_path, j.dump(2) + "\n", text);
  return match.alarm ? kMismatch : kOk;
}

int cmd_attack(const std::string& json_path) {
  r5::AttackSuite suite = r5::run_attacks();
  emit(json_path, suite.to_json(), suite.to_text());
  return suite.passed ? kOk : kMismatch;
}

int cmd_bench(const std::string& json_path) {
  std::vector<r5::OverheadRow> rows = r5::measure_overhead();
  std::vector<r5::SizeFamilyRow> sizes = r5::size_monotonicity();
  emit(json_path, r5::overhead_to_json(rows, sizes),
       r5::overhead_to_text(rows, sizes));

  const r5::OverheadRow* recurse = nullptr;
  const r5::OverheadRow* cipher = nullptr;
  for (const r5::OverheadRow& r : rows) {
    if (r.name == "recurse") recurse = &r;
    if (r.name == "cipher") cipher = &r;
  }
  bool ok = recurse && cipher;
  for (const r5::OverheadRow& r : rows) {
    ok = ok && r.cycle_pct <= recurse->cycle_pct;
    ok = ok && r.cycle_pct >= cipher->cycle_pct;
  }
  for (size_t i = 1; i < sizes.size(); ++i)
    ok = ok && sizes[i].size_pct > sizes[i - 1].size_pct;
  return ok ? kOk : kMismatch;
}

int cmd_report(int train_runs, const std::string& json_path) {
  r5::ReproReport rep = r5::run_all(train_runs);
  emit(json_path, rep.to_json(), rep.to_text());
  return rep.passed() ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RV32 zone monitor, CFI toolchain and detection harness"};
  app.require_subcommand(1);

  std::string src, input, output, hints, manifest, signature, json_path;
  std::string base_path, instr_path;
  uint64_t budget = 0;
  int runs = 20;
  int zone = 0;
  int train_runs = 1000;

  CLI::App* c_asm = app.add_subcommand("asm", "Assemble a source file");
  c_asm->add_option("src", src, "assembly source")->required();
  c_asm->add_option("-o,--output", output, "image path")->required();

  CLI::App* c_rw = app.add_subcommand(
      "rewrite", "Add CFI labels, checks and return protection");
  c_rw->add_option("input", input, "assembly source or image")->required();
  c_rw->add_option("-o,--output", output, "image path")->required();
  c_rw->add_option("--hints", hints, "per-site allowed-target JSON");

  CLI::App* c_ov = app.add_subcommand(
      "overhead", "Compare a baseline image against its instrumented form");
  c_ov->add_option("base", base_path, "baseline image")->required();
  c_ov->add_option("instr", instr_path, "instrumented image")->required();

  CLI::App* c_run = app.add_subcommand("run", "Run a zone manifest");
  c_run->add_option("--manifest", manifest, "zone manifest JSON")->required();
  c_run->add_option("--budget", budget, "cycle budget");
  c_run->add_option("--json", json_path, "write the run report here");

  CLI::App* c_train =
      app.add_subcommand("train", "Train an HPC signature from benign runs");
  c_train->add_option("--manifest", manifest, "zone manifest JSON")
      ->required();
  c_train->add_option("--signature", signature, "signature output path")
      ->required();
  c_train->add_option("--runs", runs, "training runs (default 20)");
  c_train->add_option("--zone", zone, "zone to profile (default 0)");
  c_train->add_option("--budget", budget, "cycle budget");

  CLI::App* c_check =
      app.add_subcommand("check", "Run once and match against a signature");
  c_check->add_option("--manifest", manifest, "zone manifest JSON")
      ->required();
  c_check->add_option("--signature", signature, "trained signature JSON")
      ->required();
  c_check->add_option("--budget", budget, "cycle budget");
  c_check->add_option("--json", json_path, "write the verdict here");

  CLI::App* c_attack =
      app.add_subcommand("attack", "Run the three scripted attacks");
  c_attack->add_option("--json", json_path, "write the attack report here");

  CLI::App* c_bench = app.add_subcommand(
      "bench", "Measure instrumentation overhead on the corpus");
  c_bench->add_option("--json", json_path, "write the overhead report here");

  CLI::App* c_report = app.add_subcommand(
      "report", "Run every scenario and emit the full report");
  c_report->add_option("--json", json_path, "write the full report here");
  c_report->add_option("--train-runs", train_runs,
                       "HPC training runs (default 1000)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_asm->parsed()) return cmd_asm(src, output);
    if (c_rw->parsed()) return cmd_rewrite(input, output, hints);
    if (c_ov->parsed()) return cmd_overhead(base_path, instr_path);
    if (c_run->parsed()) return cmd_run(manifest, budget, json_path);
    if (c_train->parsed())
      return cmd_train(manifest, runs, zone, budget, signature);
    if (c_check->parsed())
      return cmd_check(manifest, signature, budget, json_path);
    if (c_attack->parsed()) return cmd_attack(json_path);
    if (c_bench->parsed()) return cmd_bench(json_path);
    if (c_report->parsed()) return cmd_report(train_runs, json_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSetupError;
  }
  return kSetupError;
}
