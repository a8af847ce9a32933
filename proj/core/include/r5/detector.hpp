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

#ifndef R5_DETECTOR_HPP_
#define R5_DETECTOR_HPP_

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "r5/hpc.hpp"

namespace r5 {

class DetectorError : public std::runtime_error {
 public:
  explicit DetectorError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Learned behaviour of one event counter. Events whose training mean is
/// zero carry no signal and are marked degenerate; matching skips them.
struct EventModel {
  double mean = 0.0;
  double max_dev_pct = 0.0;     // worst relative deviation seen in training
  double threshold_pct = 0.0;   // alarm above this
  bool degenerate = false;
};

struct HpcSignature {
  /// threshold = max(kThresholdScale * max_dev_pct, kThresholdFloorPct)
  static constexpr double kThresholdScale = 1.5;
  static constexpr double kThresholdFloorPct = 1.0;

  int zone_id = 0;
  int runs = 0;
  std::array<EventModel, kHpcEventCount> events{};
};

/// Builds per-event models from repeated benign runs. Needs at least two.
HpcSignature train_signature(int zone_id, const std::vector<HpcTally>& runs);

struct EventCheck {
  double observed = 0.0;
  double deviation_pct = 0.0;
  bool alarmed = false;
  bool skipped = false;  // degenerate in training
};

struct MatchResult {
  bool alarm = false;
  std::array<EventCheck, kHpcEventCount> events{};

  /// Event with the largest judged deviation, or -1 when all were skipped.
  int strongest_event() const;
};

MatchResult match_signature(const HpcSignature& sig, const HpcTally& observed);

std::string signature_to_json(const HpcSignature& sig);
HpcSignature signature_from_json(const std::string& text);
HpcSignature load_signature(const std::string& path);
void save_signature(const HpcSignature& sig, const std::string& path);

}  // namespace r5

#endif  // R5_DETECTOR_HPP_
