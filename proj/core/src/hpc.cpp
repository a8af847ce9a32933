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

#include "r5/hpc.hpp"

namespace r5 {

const char* to_string(HpcEvent ev) {
  switch (ev) {
    case HpcEvent::kInt: return "INT";
    case HpcEvent::kJal: return "JAL";
    case HpcEvent::kCb: return "CB";
    case HpcEvent::kMio: return "MIO";
    case HpcEvent::kPfe: return "PFE";
    case HpcEvent::kBdm: return "BDM";
  }
  return "?";
}

std::optional<HpcEvent> hpc_event_from_name(const std::string& name) {
  for (int k = 0; k < kHpcEventCount; ++k) {
    HpcEvent ev = static_cast<HpcEvent>(k);
    if (name == to_string(ev)) return ev;
  }
  return std::nullopt;
}

uint32_t hpc_event_selector(HpcEvent ev) {
  return static_cast<uint32_t>(ev) + 1;
}

std::optional<HpcEvent> hpc_event_from_selector(uint32_t sel) {
  if (sel == 0 || sel > static_cast<uint32_t>(kHpcEventCount))
    return std::nullopt;
  return static_cast<HpcEvent>(sel - 1);
}

bool BranchPredictor::update(uint32_t pc, bool taken) {
  uint8_t& c = table_[index(pc)];
  bool mispredicted = (c >= 2) != taken;
  if (taken) {
    if (c < 3) ++c;
  } else {
    if (c > 0) --c;
  }
  return mispredicted;
}

namespace {

bool is_int_computational(InstrKind k) {
  switch (k) {
    case InstrKind::kAddi:
    case InstrKind::kSlti:
    case InstrKind::kSltiu:
    case InstrKind::kXori:
    case InstrKind::kOri:
    case InstrKind::kAndi:
    case InstrKind::kSlli:
    case InstrKind::kSrli:
    case InstrKind::kSrai:
    case InstrKind::kAdd:
    case InstrKind::kSub:
    case InstrKind::kSll:
    case InstrKind::kSlt:
    case InstrKind::kSltu:
    case InstrKind::kXor:
    case InstrKind::kSrl:
    case InstrKind::kSra:
    case InstrKind::kOr:
    case InstrKind::kAnd:
      return true;
    default:
      return false;
  }
}

}  // namespace

uint32_t classify_events(const StepInfo& info, const HpcConfig& cfg,
                         BranchPredictor& bp) {
  uint32_t mask = 0;
  auto fire = [&mask](HpcEvent ev) { mask |= 1u << static_cast<int>(ev); };

  if (info.trapped) {
    fire(HpcEvent::kPfe);
    return mask;
  }
  if (!info.retired || !info.inst) return mask;

  const Instruction& in = *info.inst;
  if (is_int_computational(in.kind)) fire(HpcEvent::kInt);
  if (in.kind == InstrKind::kJal) fire(HpcEvent::kJal);
  if (in.kind == InstrKind::kFenceI) fire(HpcEvent::kPfe);
  if (is_cond_branch(in.kind)) {
    fire(HpcEvent::kCb);
    if (bp.update(info.pc, info.branch_taken)) fire(HpcEvent::kBdm);
  }
  if (info.mem_access) {
    for (const MmioRange& r : cfg.mmio_ranges) {
      if (info.mem_addr >= r.base && info.mem_addr - r.base < r.size) {
        fire(HpcEvent::kMio);
        break;
      }
    }
  }
  return mask;
}

}  // namespace r5
