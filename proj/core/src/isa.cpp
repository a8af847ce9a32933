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

#include "r5/isa.hpp"

#include <array>
#include <cstdio>
#include <unordered_map>

namespace r5 {
namespace {

constexpr uint32_t kEcallWord = 0x00000073u;
constexpr uint32_t kEbreakWord = 0x00100073u;
constexpr uint32_t kMretWord = 0x30200073u;

inline uint32_t bits(uint32_t w, int hi, int lo) {
  return (w >> lo) & ((1u << (hi - lo + 1)) - 1u);
}

inline int32_t sext(uint32_t v, int width) {
  uint32_t m = 1u << (width - 1);
  return static_cast<int32_t>((v ^ m) - m);
}

inline int32_t imm_i(uint32_t w) { return sext(bits(w, 31, 20), 12); }

inline int32_t imm_s(uint32_t w) {
  return sext((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12);
}

inline int32_t imm_b(uint32_t w) {
  uint32_t v = (bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) |
               (bits(w, 30, 25) << 5) | (bits(w, 11, 8) << 1);
  return sext(v, 13);
}

inline int32_t imm_j(uint32_t w) {
  uint32_t v = (bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) |
               (bits(w, 20, 20) << 11) | (bits(w, 30, 21) << 1);
  return sext(v, 21);
}

Instruction make(InstrKind k, uint8_t rd, uint8_t rs1, uint8_t rs2,
                 int32_t imm) {
  Instruction i;
  i.kind = k;
  i.rd = rd;
  i.rs1 = rs1;
  i.rs2 = rs2;
  i.imm = imm;
  return i;
}

std::optional<Instruction> decode_op_imm(uint32_t w) {
  uint8_t rd = static_cast<uint8_t>(bits(w, 11, 7));
  uint8_t rs1 = static_cast<uint8_t>(bits(w, 19, 15));
  uint32_t f3 = bits(w, 14, 12);
  uint32_t f7 = bits(w, 31, 25);
  int32_t imm = imm_i(w);
  switch (f3) {
    case 0:
      return make(InstrKind::kAddi, rd, rs1, 0, imm);
    case 1:
      if (f7 != 0) return std::nullopt;
      return make(InstrKind::kSlli, rd, rs1, 0,
                  static_cast<int32_t>(bits(w, 24, 20)));
    case 2:
      return make(InstrKind::kSlti, rd, rs1, 0, imm);
    case 3:
      return make(InstrKind::kSltiu, rd, rs1, 0, imm);
    case 4:
      return make(InstrKind::kXori, rd, rs1, 0, imm);
    case 5:
      if (f7 == 0x00)
        return make(InstrKind::kSrli, rd, rs1, 0,
                    static_cast<int32_t>(bits(w, 24, 20)));
      if (f7 == 0x20)
        return make(InstrKind::kSrai, rd, rs1, 0,
                    static_cast<int32_t>(bits(w, 24, 20)));
      return std::nullopt;
    case 6:
      return make(InstrKind::kOri, rd, rs1, 0, imm);
    case 7:
      return make(InstrKind::kAndi, rd, rs1, 0, imm);
    default:
      return std::nullopt;
  }
}

std::optional<Instruction> decode_op(uint32_t w) {
  uint8_t rd = static_cast<uint8_t>(bits(w, 11, 7));
  uint8_t rs1 = static_cast<uint8_t>(bits(w, 19, 15));
  uint8_t rs2 = static_cast<uint8_t>(bits(w, 24, 20));
  uint32_t f3 = bits(w, 14, 12);
  uint32_t f7 = bits(w, 31, 25);
  static constexpr InstrKind base[8] = {
      InstrKind::kAdd, InstrKind::kSll,  InstrKind::kSlt, InstrKind::kSltu,
      InstrKind::kXor, InstrKind::kSrl,  InstrKind::kOr,  InstrKind::kAnd};
  static constexpr InstrKind muldiv[8] = {
      InstrKind::kMul, InstrKind::kMulh, InstrKind::kMulhsu,
      InstrKind::kMulhu, InstrKind::kDiv, InstrKind::kDivu,
      InstrKind::kRem, InstrKind::kRemu};
  if (f7 == 0x00) return make(base[f3], rd, rs1, rs2, 0);
  if (f7 == 0x20) {
    if (f3 == 0) return make(InstrKind::kSub, rd, rs1, rs2, 0);
    if (f3 == 5) return make(InstrKind::kSra, rd, rs1, rs2, 0);
    return std::nullopt;
  }
  if (f7 == 0x01) return make(muldiv[f3], rd, rs1, rs2, 0);
  return std::nullopt;
}

std::optional<Instruction> decode_system(uint32_t w) {
  uint8_t rd = static_cast<uint8_t>(bits(w, 11, 7));
  uint8_t rs1 = static_cast<uint8_t>(bits(w, 19, 15));
  uint32_t f3 = bits(w, 14, 12);
  int32_t csr = static_cast<int32_t>(bits(w, 31, 20));
  switch (f3) {
    case 0:
      if (w == kEcallWord) return make(InstrKind::kEcall, 0, 0, 0, 0);
      if (w == kEbreakWord) return make(InstrKind::kEbreak, 0, 0, 0, 0);
      if (w == kMretWord) return make(InstrKind::kMret, 0, 0, 0, 0);
      return std::nullopt;
    case 1:
      return make(InstrKind::kCsrrw, rd, rs1, 0, csr);
    case 2:
      return make(InstrKind::kCsrrs, rd, rs1, 0, csr);
    case 3:
      return make(InstrKind::kCsrrc, rd, rs1, 0, csr);
    case 5:
      return make(InstrKind::kCsrrwi, rd, rs1, 0, csr);
    case 6:
      return make(InstrKind::kCsrrsi, rd, rs1, 0, csr);
    case 7:
      return make(InstrKind::kCsrrci, rd, rs1, 0, csr);
    default:
      return std::nullopt;
  }
}

}  // namespace

std::optional<Instruction> decode(uint32_t w) {
  uint32_t opcode = bits(w, 6, 0);
  uint8_t rd = static_cast<uint8_t>(bits(w, 11, 7));
  uint8_t rs1 = static_cast<uint8_t>(bits(w, 19, 15));
  uint8_t rs2 = static_cast<uint8_t>(bits(w, 24, 20));
  uint32_t f3 = bits(w, 14, 12);
  switch (opcode) {
    case 0x37:
      return make(InstrKind::kLui, rd, 0, 0,
                  static_cast<int32_t>(bits(w, 31, 12)));
    case 0x17:
      return make(InstrKind::kAuipc, rd, 0, 0,
                  static_cast<int32_t>(bits(w, 31, 12)));
    case 0x6F:
      return make(InstrKind::kJal, rd, 0, 0, imm_j(w));
    case 0x67:
      if (f3 != 0) return std::nullopt;
      return make(InstrKind::kJalr, rd, rs1, 0, imm_i(w));
    case 0x63: {
      static constexpr int kNone = -1;
      static constexpr int table[8] = {0, 1, kNone, kNone, 2, 3, 4, 5};
      static constexpr InstrKind kinds[6] = {
          InstrKind::kBeq,  InstrKind::kBne,  InstrKind::kBlt,
          InstrKind::kBge,  InstrKind::kBltu, InstrKind::kBgeu};
      if (table[f3] == kNone) return std::nullopt;
      return make(kinds[table[f3]], 0, rs1, rs2, imm_b(w));
    }
    case 0x03: {
      static constexpr int kNone = -1;
      static constexpr int table[8] = {0, 1, 2, kNone, 3, 4, kNone, kNone};
      static constexpr InstrKind kinds[5] = {InstrKind::kLb, InstrKind::kLh,
                                             InstrKind::kLw, InstrKind::kLbu,
                                             InstrKind::kLhu};
      if (table[f3] == kNone) return std::nullopt;
      return make(kinds[table[f3]], rd, rs1, 0, imm_i(w));
    }
    case 0x23: {
      static constexpr int kNone = -1;
      static constexpr int table[8] = {0, 1, 2, kNone, kNone, kNone, kNone,
                                       kNone};
      static constexpr InstrKind kinds[3] = {InstrKind::kSb, InstrKind::kSh,
                                             InstrKind::kSw};
      if (table[f3] == kNone) return std::nullopt;
      return make(kinds[table[f3]], 0, rs1, rs2, imm_s(w));
    }
    case 0x13:
      return decode_op_imm(w);
    case 0x33:
      return decode_op(w);
    case 0x0F:
      if (f3 == 0)
        return make(InstrKind::kFence, rd, rs1, 0,
                    static_cast<int32_t>(bits(w, 31, 20)));
      if (f3 == 1)
        return make(InstrKind::kFenceI, rd, rs1, 0,
                    static_cast<int32_t>(bits(w, 31, 20)));
      return std::nullopt;
    case 0x73:
      return decode_system(w);
    default:
      return std::nullopt;
  }
}

namespace {

uint32_t enc_r(uint32_t f7, uint8_t rs2, uint8_t rs1, uint32_t f3, uint8_t rd,
               uint32_t opcode) {
  return (f7 << 25) | (uint32_t{rs2} << 20) | (uint32_t{rs1} << 15) |
         (f3 << 12) | (uint32_t{rd} << 7) | opcode;
}

uint32_t enc_i(int32_t imm, uint8_t rs1, uint32_t f3, uint8_t rd,
               uint32_t opcode) {
  return (static_cast<uint32_t>(imm & 0xFFF) << 20) | (uint32_t{rs1} << 15) |
         (f3 << 12) | (uint32_t{rd} << 7) | opcode;
}

uint32_t enc_s(int32_t imm, uint8_t rs2, uint8_t rs1, uint32_t f3,
               uint32_t opcode) {
  uint32_t u = static_cast<uint32_t>(imm);
  return (bits(u, 11, 5) << 25) | (uint32_t{rs2} << 20) |
         (uint32_t{rs1} << 15) | (f3 << 12) | (bits(u, 4, 0) << 7) | opcode;
}

uint32_t enc_b(int32_t imm, uint8_t rs2, uint8_t rs1, uint32_t f3,
               uint32_t opcode) {
  uint32_t u = static_cast<uint32_t>(imm);
  return (bits(u, 12, 12) << 31) | (bits(u, 10, 5) << 25) |
         (uint32_t{rs2} << 20) | (uint32_t{rs1} << 15) | (f3 << 12) |
         (bits(u, 4, 1) << 8) | (bits(u, 11, 11) << 7) | opcode;
}

uint32_t enc_u(int32_t imm, uint8_t rd, uint32_t opcode) {
  return (static_cast<uint32_t>(imm & 0xFFFFF) << 12) | (uint32_t{rd} << 7) |
         opcode;
}

uint32_t enc_j(int32_t imm, uint8_t rd, uint32_t opcode) {
  uint32_t u = static_cast<uint32_t>(imm);
  return (bits(u, 20, 20) << 31) | (bits(u, 10, 1) << 21) |
         (bits(u, 11, 11) << 20) | (bits(u, 19, 12) << 12) |
         (uint32_t{rd} << 7) | opcode;
}

}  // namespace

uint32_t encode(const Instruction& i) {
  switch (i.kind) {
    case InstrKind::kLui:
      return enc_u(i.imm, i.rd, 0x37);
    case InstrKind::kAuipc:
      return enc_u(i.imm, i.rd, 0x17);
    case InstrKind::kJal:
      return enc_j(i.imm, i.rd, 0x6F);
    case InstrKind::kJalr:
      return enc_i(i.imm, i.rs1, 0, i.rd, 0x67);
    case InstrKind::kBeq:
      return enc_b(i.imm, i.rs2, i.rs1, 0, 0x63);
    case InstrKind::kBne:
      return enc_b(i.imm, i.rs2, i.rs1, 1, 0x63);
    case InstrKind::kBlt:
      return enc_b(i.imm, i.rs2, i.rs1, 4, 0x63);
    case InstrKind::kBge:
      return enc_b(i.imm, i.rs2, i.rs1, 5, 0x63);
    case InstrKind::kBltu:
      return enc_b(i.imm, i.rs2, i.rs1, 6, 0x63);
    case InstrKind::kBgeu:
      return enc_b(i.imm, i.rs2, i.rs1, 7, 0x63);
    case InstrKind::kLb:
      return enc_i(i.imm, i.rs1, 0, i.rd, 0x03);
    case InstrKind::kLh:
      return enc_i(i.imm, i.rs1, 1, i.rd, 0x03);
    case InstrKind::kLw:
      return enc_i(i.imm, i.rs1, 2, i.rd, 0x03);
    case InstrKind::kLbu:
      return enc_i(i.imm, i.rs1, 4, i.rd, 0x03);
    case InstrKind::kLhu:
      return enc_i(i.imm, i.rs1, 5, i.rd, 0x03);
    case InstrKind::kSb:
      return enc_s(i.imm, i.rs2, i.rs1, 0, 0x23);
    case InstrKind::kSh:
      return enc_s(i.imm, i.rs2, i.rs1, 1, 0x23);
    case InstrKind::kSw:
      return enc_s(i.imm, i.rs2, i.rs1, 2, 0x23);
    case InstrKind::kAddi:
      return enc_i(i.imm, i.rs1, 0, i.rd, 0x13);
    case InstrKind::kSlti:
      return enc_i(i.imm, i.rs1, 2, i.rd, 0x13);
    case InstrKind::kSltiu:
      return enc_i(i.imm, i.rs1, 3, i.rd, 0x13);
    case InstrKind::kXori:
      return enc_i(i.imm, i.rs1, 4, i.rd, 0x13);
    case InstrKind::kOri:
      return enc_i(i.imm, i.rs1, 6, i.rd, 0x13);
    case InstrKind::kAndi:
      return enc_i(i.imm, i.rs1, 7, i.rd, 0x13);
    case InstrKind::kSlli:
      return enc_r(0x00, static_cast<uint8_t>(i.imm & 31), i.rs1, 1, i.rd,
                   0x13);
    case InstrKind::kSrli:
      return enc_r(0x00, static_cast<uint8_t>(i.imm & 31), i.rs1, 5, i.rd,
                   0x13);
    case InstrKind::kSrai:
      return enc_r(0x20, static_cast<uint8_t>(i.imm & 31), i.rs1, 5, i.rd,
                   0x13);
    case InstrKind::kAdd:
      return enc_r(0x00, i.rs2, i.rs1, 0, i.rd, 0x33);
    case InstrKind::kSub:
      return enc_r(0x20, i.rs2, i.rs1, 0, i.rd, 0x33);
    case InstrKind::kSll:
      return enc_r(0x00, i.rs2, i.rs1, 1, i.rd, 0x33);
    case InstrKind::kSlt:
      return enc_r(0x00, i.rs2, i.rs1, 2, i.rd, 0x33);
    case InstrKind::kSltu:
      return enc_r(0x00, i.rs2, i.rs1, 3, i.rd, 0x33);
    case InstrKind::kXor:
      return enc_r(0x00, i.rs2, i.rs1, 4, i.rd, 0x33);
    case InstrKind::kSrl:
      return enc_r(0x00, i.rs2, i.rs1, 5, i.rd, 0x33);
    case InstrKind::kSra:
      return enc_r(0x20, i.rs2, i.rs1, 5, i.rd, 0x33);
    case InstrKind::kOr:
      return enc_r(0x00, i.rs2, i.rs1, 6, i.rd, 0x33);
    case InstrKind::kAnd:
      return enc_r(0x00, i.rs2, i.rs1, 7, i.rd, 0x33);
    case InstrKind::kMul:
      return enc_r(0x01, i.rs2, i.rs1, 0, i.rd, 0x33);
    case InstrKind::kMulh:
      return enc_r(0x01, i.rs2, i.rs1, 1, i.rd, 0x33);
    case InstrKind::kMulhsu:
      return enc_r(0x01, i.rs2, i.rs1, 2, i.rd, 0x33);
    case InstrKind::kMulhu:
      return enc_r(0x01, i.rs2, i.rs1, 3, i.rd, 0x33);
    case InstrKind::kDiv:
      return enc_r(0x01, i.rs2, i.rs1, 4, i.rd, 0x33);
    case InstrKind::kDivu:
      return enc_r(0x01, i.rs2, i.rs1, 5, i.rd, 0x33);
    case InstrKind::kRem:
      return enc_r(0x01, i.rs2, i.rs1, 6, i.rd, 0x33);
    case InstrKind::kRemu:
      return enc_r(0x01, i.rs2, i.rs1, 7, i.rd, 0x33);
    case InstrKind::kFence:
      return enc_i(i.imm, i.rs1, 0, i.rd, 0x0F);
    case InstrKind::kFenceI:
      return enc_i(i.imm, i.rs1, 1, i.rd, 0x0F);
    case InstrKind::kEcall:
      return kEcallWord;
    case InstrKind::kEbreak:
      return kEbreakWord;
    case InstrKind::kMret:
      return kMretWord;
    case InstrKind::kCsrrw:
      return enc_i(i.imm, i.rs1, 1, i.rd, 0x73);
    case InstrKind::kCsrrs:
      return enc_i(i.imm, i.rs1, 2, i.rd, 0x73);
    case InstrKind::kCsrrc:
      return enc_i(i.imm, i.rs1, 3, i.rd, 0x73);
    case InstrKind::kCsrrwi:
      return enc_i(i.imm, i.rs1, 5, i.rd, 0x73);
    case InstrKind::kCsrrsi:
      return enc_i(i.imm, i.rs1, 6, i.rd, 0x73);
    case InstrKind::kCsrrci:
      return enc_i(i.imm, i.rs1, 7, i.rd, 0x73);
  }
  return 0;
}

namespace {

const char* mnemonic(InstrKind k) {
  switch (k) {
    case InstrKind::kLui: return "lui";
    case InstrKind::kAuipc: return "auipc";
    case InstrKind::kJal: return "jal";
    case InstrKind::kJalr: return "jalr";
    case InstrKind::kBeq: return "beq";
    case InstrKind::kBne: return "bne";
    case InstrKind::kBlt: return "blt";
    case InstrKind::kBge: return "bge";
    case InstrKind::kBltu: return "bltu";
    case InstrKind::kBgeu: return "bgeu";
    case InstrKind::kLb: return "lb";
    case InstrKind::kLh: return "lh";
    case InstrKind::kLw: return "lw";
    case InstrKind::kLbu: return "lbu";
    case InstrKind::kLhu: return "lhu";
    case InstrKind::kSb: return "sb";
    case InstrKind::kSh: return "sh";
    case InstrKind::kSw: return "sw";
    case InstrKind::kAddi: return "addi";
    case InstrKind::kSlti: return "slti";
    case InstrKind::kSltiu: return "sltiu";
    case InstrKind::kXori: return "xori";
    case InstrKind::kOri: return "ori";
    case InstrKind::kAndi: return "andi";
    case InstrKind::kSlli: return "slli";
    case InstrKind::kSrli: return "srli";
    case InstrKind::kSrai: return "srai";
    case InstrKind::kAdd: return "add";
    case InstrKind::kSub: return "sub";
    case InstrKind::kSll: return "sll";
    case InstrKind::kSlt: return "slt";
    case InstrKind::kSltu: return "sltu";
    case InstrKind::kXor: return "xor";
    case InstrKind::kSrl: return "srl";
    case InstrKind::kSra: return "sra";
    case InstrKind::kOr: return "or";
    case InstrKind::kAnd: return "and";
    case InstrKind::kMul: return "mul";
    case InstrKind::kMulh: return "mulh";
    case InstrKind::kMulhsu: return "mulhsu";
    case InstrKind::kMulhu: return "mulhu";
    case InstrKind::kDiv: return "div";
    case InstrKind::kDivu: return "divu";
    case InstrKind::kRem: return "rem";
    case InstrKind::kRemu: return "remu";
    case InstrKind::kFence: return "fence";
    case InstrKind::kFenceI: return "fence.i";
    case InstrKind::kEcall: return "ecall";
    case InstrKind::kEbreak: return "ebreak";
    case InstrKind::kMret: return "mret";
    case InstrKind::kCsrrw: return "csrrw";
    case InstrKind::kCsrrs: return "csrrs";
    case InstrKind::kCsrrc: return "csrrc";
    case InstrKind::kCsrrwi: return "csrrwi";
    case InstrKind::kCsrrsi: return "csrrsi";
    case InstrKind::kCsrrci: return "csrrci";
  }
  return "?";
}

std::string rel(int32_t off) {
  char buf[24];
  std::snprintf(buf, sizeof buf, off < 0 ? ".-%d" : ".+%d",
                off < 0 ? -off : off);
  return buf;
}

}  // namespace

std::string to_string(const Instruction& i) {
  char buf[64];
  const char* m = mnemonic(i.kind);
  switch (i.kind) {
    case InstrKind::kLui:
    case InstrKind::kAuipc:
      std::snprintf(buf, sizeof buf, "%s x%d, 0x%x", m, i.rd,
                    static_cast<uint32_t>(i.imm) & 0xFFFFF);
      return buf;
    case InstrKind::kJal:
      return std::string(m) + " x" + std::to_string(i.rd) + ", " + rel(i.imm);
    case InstrKind::kJalr:
      std::snprintf(buf, sizeof buf, "%s x%d, x%d, %d", m, i.rd, i.rs1, i.imm);
      return buf;
    case InstrKind::kBeq:
    case InstrKind::kBne:
    case InstrKind::kBlt:
    case InstrKind::kBge:
    case InstrKind::kBltu:
    case InstrKind::kBgeu:
      std::snprintf(buf, sizeof buf, "%s x%d, x%d, ", m, i.rs1, i.rs2);
      return std::string(buf) + rel(i.imm);
    case InstrKind::kLb:
    case InstrKind::kLh:
    case InstrKind::kLw:
    case InstrKind::kLbu:
    case InstrKind::kLhu:
      std::snprintf(buf, sizeof buf, "%s x%d, %d(x%d)", m, i.rd, i.imm, i.rs1);
      return buf;
    case InstrKind::kSb:
    case InstrKind::kSh:
    case InstrKind::kSw:
      std::snprintf(buf, sizeof buf, "%s x%d, %d(x%d)", m, i.rs2, i.imm,
                    i.rs1);
      return buf;
    case InstrKind::kSlli:
    case InstrKind::kSrli:
    case InstrKind::kSrai:
      std::snprintf(buf, sizeof buf, "%s x%d, x%d, %d", m, i.rd, i.rs1, i.imm);
      return buf;
    case InstrKind::kAddi:
    case InstrKind::kSlti:
    case InstrKind::kSltiu:
    case InstrKind::kXori:
    case InstrKind::kOri:
    case InstrKind::kAndi:
      std::snprintf(buf, sizeof buf, "%s x%d, x%d, %d", m, i.rd, i.rs1, i.imm);
      return buf;
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
    case InstrKind::kMul:
    case InstrKind::kMulh:
    case InstrKind::kMulhsu:
    case InstrKind::kMulhu:
    case InstrKind::kDiv:
    case InstrKind::kDivu:
    case InstrKind::kRem:
    case InstrKind::kRemu:
      std::snprintf(buf, sizeof buf, "%s x%d, x%d, x%d", m, i.rd, i.rs1,
                    i.rs2);
      return buf;
    case InstrKind::kFence:
      if (i.imm == 0x0FF && i.rd == 0 && i.rs1 == 0) return "fence";
      std::snprintf(buf, sizeof buf, "fence 0x%03x",
                    static_cast<uint32_t>(i.imm) & 0xFFF);
      return buf;
    case InstrKind::kFenceI:
      return "fence.i";
    case InstrKind::kEcall:
    case InstrKind::kEbreak:
    case InstrKind::kMret:
      return m;
    case InstrKind::kCsrrw:
    case InstrKind::kCsrrs:
    case InstrKind::kCsrrc:
      std::snprintf(buf, sizeof buf, "%s x%d, 0x%x, x%d", m, i.rd,
                    static_cast<uint32_t>(i.imm) & 0xFFF, i.rs1);
      return buf;
    case InstrKind::kCsrrwi:
    case InstrKind::kCsrrsi:
    case InstrKind::kCsrrci:
      std::snprintf(buf, sizeof buf, "%s x%d, 0x%x, %d", m, i.rd,
                    static_cast<uint32_t>(i.imm) & 0xFFF, i.rs1);
      return buf;
  }
  return "?";
}

bool is_control_flow(InstrKind k) {
  return k == InstrKind::kJal || k == InstrKind::kJalr || is_cond_branch(k);
}

bool is_cond_branch(InstrKind k) {
  switch (k) {
    case InstrKind::kBeq:
    case InstrKind::kBne:
    case InstrKind::kBlt:
    case InstrKind::kBge:
    case InstrKind::kBltu:
    case InstrKind::kBgeu:
      return true;
    default:
      return false;
  }
}

bool is_load(InstrKind k) {
  switch (k) {
    case InstrKind::kLb:
    case InstrKind::kLh:
    case InstrKind::kLw:
    case InstrKind::kLbu:
    case InstrKind::kLhu:
      return true;
    default:
      return false;
  }
}

bool is_store(InstrKind k) {
  return k == InstrKind::kSb || k == InstrKind::kSh || k == InstrKind::kSw;
}

std::optional<uint8_t> parse_reg(const std::string& name) {
  static const std::unordered_map<std::string, uint8_t> abi = {
      {"zero", 0}, {"ra", 1},  {"sp", 2},   {"gp", 3},   {"tp", 4},
      {"t0", 5},   {"t1", 6},  {"t2", 7},   {"s0", 8},   {"fp", 8},
      {"s1", 9},   {"a0", 10}, {"a1", 11},  {"a2", 12},  {"a3", 13},
      {"a4", 14},  {"a5", 15}, {"a6", 16},  {"a7", 17},  {"s2", 18},
      {"s3", 19},  {"s4", 20}, {"s5", 21},  {"s6", 22},  {"s7", 23},
      {"s8", 24},  {"s9", 25}, {"s10", 26}, {"s11", 27}, {"t3", 28},
      {"t4", 29},  {"t5", 30}, {"t6", 31}};
  if (name.size() >= 2 && name[0] == 'x') {
    bool digits = true;
    for (size_t k = 1; k < name.size(); ++k)
      if (name[k] < '0' || name[k] > '9') digits = false;
    if (digits && name.size() <= 3) {
      int v = std::stoi(name.substr(1));
      if (v >= 0 && v < 32) return static_cast<uint8_t>(v);
    }
  }
  auto it = abi.find(name);
  if (it != abi.end()) return it->second;
  return std::nullopt;
}

}  // namespace r5
