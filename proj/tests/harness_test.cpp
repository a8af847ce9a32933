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

#include <doctest.h>

#include "r5/harness.hpp"

using r5::MmioWrite;
using r5::RunOptions;
using r5::RunReport;
using r5::System;
using r5::SystemSpec;

namespace {

RunReport run_one(const std::string& name, bool instrumented) {
  SystemSpec spec = r5::make_system({name}, instrumented);
  System sys(std::move(spec.manifest), std::move(spec.images));
  RunOptions opts;
  opts.max_cycles = 100000;
  return sys.run(opts);
}

}  // namespace

TEST_CASE("trace comparison is order and value sensitive") {
  std::vector<MmioWrite> a = {{0x10000000u, 1, 4}, {0x10000004u, 2, 4}};
  std::vector<MmioWrite> b = a;
  CHECK(r5::trace_equal(a, b));
  b[1].value = 3;
  CHECK_FALSE(r5::trace_equal(a, b));
  b = a;
  b.pop_back();
  CHECK_FALSE(r5::trace_equal(a, b));
  std::swap(a[0], a[1]);
  CHECK_FALSE(r5::trace_equal(a, b));
  CHECK(r5::trace_equal({}, {}));
}

TEST_CASE("instrumentation preserves observable behaviour") {
  for (const std::string& name : r5::corpus_names()) {
    CAPTURE(name);
    RunReport base = run_one(name, false);
    RunReport instr = run_one(name, true);
    REQUIRE(base.zones.size() == 1);
    REQUIRE(instr.zones.size() == 1);
    CHECK(base.zones[0].status == instr.zones[0].status);
    CHECK(r5::trace_equal(base.zones[0].mmio, instr.zones[0].mmio));
    CHECK(r5::tallies_conserved(base));
    CHECK(r5::tallies_conserved(instr));
  }
}

TEST_CASE("tallies stay conserved across zones") {
  SystemSpec spec = r5::make_system({"cipher", "recurse"}, true);
  System sys(std::move(spec.manifest), std::move(spec.images));
  RunReport rep = sys.run();
  CHECK(rep.halted);
  CHECK(rep.halt_reason == "all zones finished");
  CHECK(r5::tallies_conserved(rep));

  // Per-zone counts actually differ; the sum is what matches the core.
  CHECK(rep.zones[0].tally != rep.zones[1].tally);
}

TEST_CASE("fairness holds on a short run") {
  r5::FairnessResult fr = r5::run_fairness(10);
  CHECK(fr.passed);
  CHECK(fr.snapshots == 10);
  CHECK(fr.expected_share == doctest::Approx(0.3));
  CHECK(fr.share == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("overhead measurement covers the four programs") {
  std::vector<r5::OverheadRow> rows = r5::measure_overhead();
  REQUIRE(rows.size() == 4);
  for (const r5::OverheadRow& row : rows) {
    CAPTURE(row.name);
    CHECK(row.base_cycles > 0);
    CHECK(row.instr_cycles >= row.base_cycles);
    CHECK(row.instr_bytes > row.base_bytes);
    CHECK(row.cycle_pct >= 0.0);
  }
  // The indirect-call program carries labels and sites.
  bool saw_dispatch = false;
  for (const r5::OverheadRow& row : rows) {
    if (row.name != "dispatch") continue;
    saw_dispatch = true;
    CHECK(row.labels > 0);
    CHECK(row.sites > 0);
  }
  CHECK(saw_dispatch);
}
