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

#include "r5/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace r5 {

namespace {
using ordered_json = nlohmann::ordered_json;
}

HpcSignature train_signature(int zone_id,
                             const std::vector<HpcTally>& runs) {
  if (runs.size() < 2) throw DetectorError("training needs at least two runs");
  HpcSignature sig;
  sig.zone_id = zone_id;
  sig.runs = static_cast<int>(runs.size());
  for (int e = 0; e < kHpcEventCount; ++e) {
    EventModel& m = sig.events[e];
    double sum = 0.0;
    for (const HpcTally& t : runs) sum += static_cast<double>(t[e]);
    m.mean = sum / static_cast<double>(runs.size());
    if (m.mean == 0.0) {
      m.degenerate = true;
      continue;
    }
    double worst = 0.0;
    for (const HpcTally& t : runs) {
      double dev =
          std::abs(static_cast<double>(t[e]) - m.mean) / m.mean * 100.0;
      worst = std::max(worst, dev);
    }
    m.max_dev_pct = worst;
    m.threshold_pct = std::max(HpcSignature::kThresholdScale * worst,
                               HpcSignature::kThresholdFloorPct);
  }
  return sig;
}

int MatchResult::strongest_event() const {
  int best = -1;
  double best_dev = -1.0;
  for (int e = 0; e < kHpcEventCount; ++e) {
    if (events[e].skipped) continue;
    if (events[e].deviation_pct > best_dev) {
      best_dev = events[e].deviation_pct;
      best = e;
    }
  }
  return best;
}

MatchResult match_signature(const HpcSignature& sig,
                            const HpcTally& observed) {
  MatchResult r;
  for (int e = 0; e < kHpcEventCount; ++e) {
    const EventModel& m = sig.events[e];
    EventCheck& c = r.events[e];
    c.observed = static_cast<double>(observed[e]);
    if (m.degenerate) {
      c.skipped = true;
      continue;
    }
    c.deviation_pct = std::abs(c.observed - m.mean) / m.mean * 100.0;
    c.alarmed = c.deviation_pct > m.threshold_pct;
    if (c.alarmed) r.alarm = true;
  }
  return r;
}

std::string signature_to_json(const HpcSignature& sig) {
  ordered_json j;
  j["zone_id"] = sig.zone_id;
  j["runs"] = sig.runs;
  ordered_json ev;
  for (int e = 0; e < kHpcEventCount; ++e) {
    const EventModel& m = sig.events[e];
    ev[to_string(static_cast<HpcEvent>(e))] = {
        {"mean", m.mean},
        {"max_dev_pct", m.max_dev_pct},
        {"threshold_pct", m.threshold_pct},
        {"degenerate", m.degenerate}};
  }
  j["events"] = ev;
  return j.dump(2) + "\n";
}

HpcSignature signature_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw DetectorError(std::string("signature is not valid JSON: ") +
                        e.what());
  }
  HpcSignature sig;
  try {
    sig.zone_id = j.at("zone_id").get<int>();
    sig.runs = j.at("runs").get<int>();
    const auto& ev = j.at("events");
    for (int e = 0; e < kHpcEventCount; ++e) {
      const auto& mj = ev.at(to_string(static_cast<HpcEvent>(e)));
      EventModel& m = sig.events[e];
      m.mean = mj.at("mean").get<double>();
      m.max_dev_pct = mj.at("max_dev_pct").get<double>();
      m.threshold_pct = mj.at("threshold_pct").get<double>();
      m.degenerate = mj.at("degenerate").get<bool>();
    }
  } catch (const DetectorError&) {
    throw;
  } catch (const std::exception& e) {
    throw DetectorError(std::string("signature misses fields: ") + e.what());
  }
  return sig;
}

HpcSignature load_signature(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DetectorError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return signature_from_json(text);
}

void save_signature(const HpcSignature& sig, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DetectorError("cannot write " + path);
  f << signature_to_json(sig);
}

}  // namespace r5
