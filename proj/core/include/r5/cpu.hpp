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

#ifndef R5_CPU_HPP_
#define R5_CPU_HPP_

#include <array>
#include <cstdint>
#include <optional>

#include "r5/bus.hpp"
#include "r5/isa.hpp"
#include "r5/pmp.hpp"

namespace r5 {

enum class TrapCause : uint32_t {
  kInstrAccessFault = 1,
  kIllegalInstruction = 2,
  kBreakpoint = 3,
  kLoadAccessFault = 5,
  kStoreAccessFault = 7,
  kEcallFromU = 8,
  kEcallFromM = 11,
};

const char* to_string(TrapCause cause);

/// Machine-level CSR state. mstatus carries only MIE, MPIE and MPP.
struct Csrs {
  static constexpr uint32_t kMstatusMie = 1u << 3;
  static constexpr uint32_t kMstatusMpie = 1u << 7;
  static constexpr uint32_t kMstatusMppShift = 11;
  static constexpr uint32_t kMstatusMppMask = 3u << kMstatusMppShift;

  uint32_t mstatus = 0;
  uint32_t mtvec = 0;
  uint32_t mepc = 0;
  uint32_t mcause = 0;
  uint32_t mtval = 0;
  uint64_t mcycle = 0;
  uint64_t minstret = 0;
  // Counters 3 and 4, the two programmable slots.
  std::array<uint64_t, 2> mhpmcounter{};
  std::array<uint32_t, 2> mhpmevent{};
};

struct CpuState {
  std::array<uint32_t, 32> regs{};
  uint32_t pc = 0;
  PrivMode priv = PrivMode::kMachine;
  Csrs csrs;
};

/// What one step did. When trapped is set the architectural trap state has
/// already been written and pc points at the handler.
struct StepInfo {
  uint32_t pc = 0;
  uint32_t raw = 0;
  std::optional<Instruction> inst;
  bool retired = false;
  bool trapped = false;
  TrapCause cause = TrapCause::kIllegalInstruction;
  uint32_t tval = 0;
  bool branch_taken = false;
  bool mem_access = false;
  bool mem_is_store = false;
  uint32_t mem_addr = 0;
};

class Cpu {
 public:
  CpuState& state() { return s_; }
  const CpuState& state() const { return s_; }

  /// Executes one instruction (or takes one trap). Advances mcycle by one
  /// and minstret by one per retired instruction.
  StepInfo step(MemoryBus& bus, PmpUnit& pmp);

  /// Takes a trap at the current pc without executing anything.
  void enter_trap(TrapCause cause, uint32_t tval);

  uint32_t reg(int idx) const { return s_.regs[idx]; }
  void set_reg(int idx, uint32_t v) {
    if (idx != 0) s_.regs[idx] = v;
  }

 private:
  std::optional<uint32_t> csr_read(uint32_t csr, const PmpUnit& pmp) const;
  bool csr_write(uint32_t csr, uint32_t v, PmpUnit& pmp);

  CpuState s_;
};

}  // namespace r5

#endif  // R5_CPU_HPP_
