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

#ifndef R5_ISA_HPP_
#define R5_ISA_HPP_

#include <cstdint>
#include <optional>
#include <string>

namespace r5 {

/// Instruction kinds for RV32IM plus Zicsr, Zifencei and the one privileged
/// instruction the monitor needs (MRET).
enum class InstrKind : uint8_t {
  kLui,
  kAuipc,
  kJal,
  kJalr,
  kBeq,
  kBne,
  kBlt,
  kBge,
  kBltu,
  kBgeu,
  kLb,
  kLh,
  kLw,
  kLbu,
  kLhu,
  kSb,
  kSh,
  kSw,
  kAddi,
  kSlti,
  kSltiu,
  kXori,
  kOri,
  kAndi,
  kSlli,
  kSrli,
  kSrai,
  kAdd,
  kSub,
  kSll,
  kSlt,
  kSltu,
  kXor,
  kSrl,
  kSra,
  kOr,
  kAnd,
  kMul,
  kMulh,
  kMulhsu,
  kMulhu,
  kDiv,
  kDivu,
  kRem,
  kRemu,
  kFence,
  kFenceI,
  kEcall,
  kEbreak,
  kMret,
  kCsrrw,
  kCsrrs,
  kCsrrc,
  kCsrrwi,
  kCsrrsi,
  kCsrrci,
};

/// A decoded instruction. Field meaning depends on the kind:
///  - imm holds the sign-extended immediate for I/S/B/U/J formats
///    (U-format keeps the raw 20-bit field, not shifted),
///  - imm holds the shift amount for kSlli/kSrli/kSrai,
///  - imm holds the CSR address for Zicsr kinds (rs1 doubles as uimm
///    for the immediate forms),
///  - imm holds the raw fm/pred/succ field for kFence.
struct Instruction {
  InstrKind kind = InstrKind::kAddi;
  uint8_t rd = 0;
  uint8_t rs1 = 0;
  uint8_t rs2 = 0;
  int32_t imm = 0;

  bool operator==(const Instruction&) const = default;
};

/// Decodes a 32-bit word. Returns nullopt for anything that is not a valid
/// instruction of the supported subset. Total: never traps or UB on any of
/// the 2^32 inputs.
std::optional<Instruction> decode(uint32_t word);

/// Re-encodes a decoded instruction. decode(w) == i implies encode(i) == w.
uint32_t encode(const Instruction& inst);

/// Canonical one-line text. Registers print as xN, branch and jump targets
/// as pc-relative ".+N"/".-N", CSR addresses in hex.
std::string to_string(const Instruction& inst);

/// True for jal/jalr and taken-or-not conditional branches.
bool is_control_flow(InstrKind kind);

/// True for the conditional branch kinds.
bool is_cond_branch(InstrKind kind);

/// True for lb/lh/lw/lbu/lhu.
bool is_load(InstrKind kind);

/// True for sb/sh/sw.
bool is_store(InstrKind kind);

/// Register name xN -> index, accepts both xN and ABI names.
std::optional<uint8_t> parse_reg(const std::string& name);

}  // namespace r5

#endif  // R5_ISA_HPP_
