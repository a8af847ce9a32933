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

#include <cstdio>
#include <vector>

#include <doctest.h>

#include "r5/detector.hpp"

using r5::DetectorError;
using r5::HpcEvent;
using r5::HpcSignature;
using r5::HpcTally;
using r5::MatchResult;

namespace {

constexpr int kInt = static_cast<int>(HpcEvent::kInt);
constexpr int kJal = static_cast<int>(HpcEvent::kJal);

HpcTally tally_of(uint64_t v) {
  HpcTally t{};
  t.fill(v);
  return t;
}

}  // namespace

TEST_CASE("training summarizes mean and worst deviation") {
  std::vector<HpcTally> runs = {tally_of(1000), tally_of(1002),
                                tally_of(998)};
  HpcSignature sig = r5::train_signature(4, runs);
  CHECK(sig.zone_id == 4);
  CHECK(sig.runs == 3);
  const r5::EventModel& m = sig.events[kInt];
  CHECK(m.mean == doctest::Approx(1000.0));
  CHECK(m.max_dev_pct == doctest::Approx(0.2));
  // 1.5 x 0.2 = 0.3 is below the floor, so the floor wins.
  CHECK(m.threshold_pct == doctest::Approx(1.0));
  CHECK_FALSE(m.degenerate);
}

TEST_CASE("identical runs leave the threshold at the floor") {
  std::vector<HpcTally> runs = {tally_of(500), tally_of(500)};
  HpcSignature sig = r5::train_signature(0, runs);
  CHECK(sig.events[kInt].max_dev_pct == 0.0);
  CHECK(sig.events[kInt].threshold_pct ==
        doctest::Approx(HpcSignature::kThresholdFloorPct));
}

TEST_CASE("wide training spreads scale the threshold") {
  std::vector<HpcTally> runs = {tally_of(900), tally_of(1100)};
  HpcSignature sig = r5::train_signature(0, runs);
  // mean 1000, worst dev 10 pct, threshold 15 pct.
  CHECK(sig.events[kInt].max_dev_pct == doctest::Approx(10.0));
  CHECK(sig.events[kInt].threshold_pct == doctest::Approx(15.0));
}

TEST_CASE("training refuses fewer than two runs") {
  CHECK_THROWS_AS(r5::train_signature(0, {}), DetectorError);
  CHECK_THROWS_AS(r5::train_signature(0, {tally_of(10)}), DetectorError);
}

TEST_CASE("zero-mean events are degenerate and skipped") {
  HpcTally a{};
  a[kInt] = 100;
  HpcTally b{};
  b[kInt] = 100;
  HpcSignature sig = r5::train_signature(0, {a, b});
  CHECK_FALSE(sig.events[kInt].degenerate);
  CHECK(sig.events[kJal].degenerate);

  HpcTally probe{};
  probe[kInt] = 100;
  probe[kJal] = 50;  // would be infinite deviation if judged
  MatchResult r = r5::match_signature(sig, probe);
  CHECK_FALSE(r.alarm);
  CHECK(r.events[kJal].skipped);
  CHECK_FALSE(r.events[kJal].alarmed);
}

TEST_CASE("matching alarms strictly above the threshold") {
  std::vector<HpcTally> runs = {tally_of(1000), tally_of(1000)};
  HpcSignature sig = r5::train_signature(0, runs);
  // Threshold is the 1 pct floor. 1010 sits exactly on it: no alarm.
  MatchResult at = r5::match_signature(sig, tally_of(1010));
  CHECK_FALSE(at.alarm);
  MatchResult above = r5::match_signature(sig, tally_of(1011));
  CHECK(above.alarm);
  CHECK(above.events[kInt].alarmed);
  CHECK(above.events[kInt].deviation_pct > 1.0);
}

TEST_CASE("a near-doubling of one event is an alarm") {
  std::vector<HpcTally> runs = {tally_of(1000), tally_of(1000)};
  HpcSignature sig = r5::train_signature(0, runs);
  HpcTally probe = tally_of(1000);
  probe[kJal] = 1950;
  MatchResult r = r5::match_signature(sig, probe);
  CHECK(r.alarm);
  CHECK(r.events[kJal].alarmed);
  CHECK(r.events[kJal].deviation_pct == doctest::Approx(95.0));
  CHECK(r.strongest_event() == kJal);
}

TEST_CASE("observation equal to the means never alarms") {
  std::vector<HpcTally> runs = {tally_of(123), tally_of(123)};
  HpcSignature sig = r5::train_signature(0, runs);
  MatchResult r = r5::match_signature(sig, tally_of(123));
  CHECK_FALSE(r.alarm);
  for (const r5::EventCheck& c : r.events)
    CHECK(c.deviation_pct == doctest::Approx(0.0));
}

TEST_CASE("training data matches its own signature") {
  std::vector<HpcTally> runs = {tally_of(990), tally_of(1000),
                                tally_of(1010)};
  HpcSignature sig = r5::train_signature(0, runs);
  for (const HpcTally& t : runs)
    CHECK_FALSE(r5::match_signature(sig, t).alarm);
}

TEST_CASE("deviations scale with the counts not the units") {
  // Same relative spread at two magnitudes: equal thresholds.
  std::vector<HpcTally> small = {tally_of(90), tally_of(110)};
  std::vector<HpcTally> large = {tally_of(90000), tally_of(110000)};
  HpcSignature s = r5::train_signature(0, small);
  HpcSignature l = r5::train_signature(0, large);
  CHECK(s.events[kInt].threshold_pct ==
        doctest::Approx(l.events[kInt].threshold_pct));
}

TEST_CASE("larger deviations judge strictly larger") {
  std::vector<HpcTally> runs = {tally_of(1000), tally_of(1000)};
  HpcSignature sig = r5::train_signature(0, runs);
  double last = -1.0;
  for (uint64_t v : {1000, 1100, 1300, 2000, 5000}) {
    MatchResult r = r5::match_signature(sig, tally_of(v));
    CHECK(r.events[kInt].deviation_pct > last);
    last = r.events[kInt].deviation_pct;
  }
}

TEST_CASE("strongest event ignores skipped counters") {
  HpcTally a{};
  a[kInt] = 100;
  HpcSignature sig = r5::train_signature(0, {a, a});
  HpcTally probe{};
  probe[kInt] = 300;
  probe[kJal] = 99999;  // degenerate in training, must not win
  MatchResult r = r5::match_signature(sig, probe);
  CHECK(r.strongest_event() == kInt);

  // All-degenerate signatures have no strongest event.
  HpcTally zero{};
  HpcSignature empty = r5::train_signature(0, {zero, zero});
  MatchResult none = r5::match_signature(empty, zero);
  CHECK(none.strongest_event() == -1);
  CHECK_FALSE(none.alarm);
}

TEST_CASE("signature json round trips") {
  std::vector<HpcTally> runs = {tally_of(1000), tally_of(1010)};
  HpcSignature sig = r5::train_signature(7, runs);
  HpcSignature back = r5::signature_from_json(r5::signature_to_json(sig));
  CHECK(back.zone_id == 7);
  CHECK(back.runs == 2);
  for (int e = 0; e < r5::kHpcEventCount; ++e) {
    CHECK(back.events[e].mean == doctest::Approx(sig.events[e].mean));
    CHECK(back.events[e].max_dev_pct ==
          doctest::Approx(sig.events[e].max_dev_pct));
    CHECK(back.events[e].threshold_pct ==
          doctest::Approx(sig.events[e].threshold_pct));
    CHECK(back.events[e].degenerate == sig.events[e].degenerate);
  }

  CHECK_THROWS_AS(r5::signature_from_json("nope"), DetectorError);
  CHECK_THROWS_AS(r5::signature_from_json("{\"zone_id\": 1}"),
                  DetectorError);
}

TEST_CASE("signature files save and load") {
  const char* path = "/tmp/r5_sig_test.json";
  std::vector<HpcTally> runs = {tally_of(10), tally_of(12)};
  HpcSignature sig = r5::train_signature(2, runs);
  r5::save_signature(sig, path);
  HpcSignature back = r5::load_signature(path);
  CHECK(back.zone_id == 2);
  CHECK(back.events[kInt].mean == doctest::Approx(11.0));
  std::remove(path);

  CHECK_THROWS_AS(r5::load_signature("/tmp/missing_sig_r5.json"),
                  DetectorError);
}
