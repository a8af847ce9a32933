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

#include "r5/cpu.hpp"

namespace r5 {

namespace {

constexpr uint32_t kCsrMstatus = 0x300;
constexpr uint32_t kCsrMtvec = 0x305;
constexpr uint32_t kCsrMepc = 0x341;
constexpr uint32_t kCsrMcause = 0x342;
constexpr uint32_t kCsrMtval = 0x343;
constexpr uint32_t kCsrPmpcfg0 = 0x3A0;
constexpr uint32_t kCsrPmpaddr0 = 0x3B0;
constexpr uint32_t kCsrMcycle = 0xB00;
constexpr uint32_t kCsrMinstret = 0xB02;
constexpr uint32_t kCsrMhpmcounter3 = 0xB03;
constexpr uint32_t kCsrMcycleH = 0xB80;
constexpr uint32_t kCsrMinstretH = 0xB82;
constexpr uint32_t kCsrMhpmcounter3H = 0xB83;
constexpr uint32_t kCsrMhpmevent3 = 0x323;

inline uint32_t lo32(uint64_t v) { return static_cast<uint32_t>(v); }
inline uint32_t hi32(uint64_t v) { return static_cast<uint32_t>(v >> 32); }
inline void set_lo(uint64_t& c, uint32_t v) {
  c = (c & 0xFFFFFFFF00000000ull) | v;
}
inline void set_hi(uint64_t& c, uint32_t v) {
  c = (c & 0xFFFFFFFFull) | (uint64_t{v} << 32);
}

}  // namespace

const char* to_string(TrapCause cause) {
  switch (cause) {
    case TrapCause::kInstrAccessFault: return "instruction access fault";
    case TrapCause::kIllegalInstruction: return "illegal instruction";
    case TrapCause::kBreakpoint: return "breakpoint";
    case TrapCause::kLoadAccessFault: return "load access fault";
    case TrapCause::kStoreAccessFault: return "store access fault";
    case TrapCause::kEcallFromU: return "ecall from U-Mode";
    case TrapCause::kEcallFromM: return "ecall from M-Mode";
  }
  return "unknown";
}

void Cpu::enter_trap(TrapCause cause, uint32_t tval) {
  Csrs& c = s_.csrs;
  c.mepc = s_.pc;
  c.mcause = static_cast<uint32_t>(cause);
  c.mtval = tval;
  uint32_t mie = (c.mstatus & Csrs::kMstatusMie) ? 1 : 0;
  c.mstatus &= ~(Csrs::kMstatusMie | Csrs::kMstatusMpie | Csrs::kMstatusMppMask);
  if (mie) c.mstatus |= Csrs::kMstatusMpie;
  c.mstatus |= static_cast<uint32_t>(s_.priv) << Csrs::kMstatusMppShift;
  s_.priv = PrivMode::kMachine;
  s_.pc = c.mtvec & ~3u;
}

std::optional<uint32_t> Cpu::csr_read(uint32_t csr, const PmpUnit& pmp) const {
  const Csrs& c = s_.csrs;
  if (csr >= kCsrPmpcfg0 && csr < kCsrPmpcfg0 + 4) {
    int base = static_cast<int>(csr - kCsrPmpcfg0) * 4;
    uint32_t v = 0;
    for (int k = 3; k >= 0; --k) v = (v << 8) | pmp.cfg(base + k);
    return v;
  }
  if (csr >= kCsrPmpaddr0 && csr < kCsrPmpaddr0 + 16)
    return pmp.addr(static_cast<int>(csr - kCsrPmpaddr0));
  switch (csr) {
    case kCsrMstatus: return c.mstatus;
    case kCsrMtvec: return c.mtvec;
    case kCsrMepc: return c.mepc;
    case kCsrMcause: return c.mcause;
    case kCsrMtval: return c.mtval;
    case kCsrMcycle: return lo32(c.mcycle);
    case kCsrMcycleH: return hi32(c.mcycle);
    case kCsrMinstret: return lo32(c.minstret);
    case kCsrMinstretH: return hi32(c.minstret);
    case kCsrMhpmcounter3: return lo32(c.mhpmcounter[0]);
    case kCsrMhpmcounter3 + 1: return lo32(c.mhpmcounter[1]);
    case kCsrMhpmcounter3H: return hi32(c.mhpmcounter[0]);
    case kCsrMhpmcounter3H + 1: return hi32(c.mhpmcounter[1]);
    case kCsrMhpmevent3: return c.mhpmevent[0];
    case kCsrMhpmevent3 + 1: return c.mhpmevent[1];
    default: return std::nullopt;
  }
}

bool Cpu::csr_write(uint32_t csr, uint32_t v, PmpUnit& pmp) {
  Csrs& c = s_.csrs;
  if (csr >= kCsrPmpcfg0 && csr < kCsrPmpcfg0 + 4) {
    int base = static_cast<int>(csr - kCsrPmpcfg0) * 4;
    for (int k = 0; k < 4; ++k)
      pmp.set_cfg(base + k, static_cast<uint8_t>(v >> (8 * k)), s_.priv);
    return true;
  }
  if (csr >= kCsrPmpaddr0 && csr < kCsrPmpaddr0 + 16) {
    pmp.set_addr(static_cast<int>(csr - kCsrPmpaddr0), v, s_.priv);
    return true;
  }
  switch (csr) {
    case kCsrMstatus:
      c.mstatus = v & (Csrs::kMstatusMie | Csrs::kMstatusMpie |
                       Csrs::kMstatusMppMask);
      return true;
    case kCsrMtvec: c.mtvec = v & ~3u; return true;
    case kCsrMepc: c.mepc = v & ~1u; return true;
    case kCsrMcause: c.mcause = v; return true;
    case kCsrMtval: c.mtval = v; return true;
    case kCsrMcycle: set_lo(c.mcycle, v); return true;
    case kCsrMcycleH: set_hi(c.mcycle, v); return true;
    case kCsrMinstret: set_lo(c.minstret, v); return true;
    case kCsrMinstretH: set_hi(c.minstret, v); return true;
    case kCsrMhpmcounter3: set_lo(c.mhpmcounter[0], v); return true;
    case kCsrMhpmcounter3 + 1: set_lo(c.mhpmcounter[1], v); return true;
    case kCsrMhpmcounter3H: set_hi(c.mhpmcounter[0], v); return true;
    case kCsrMhpmcounter3H + 1: set_hi(c.mhpmcounter[1], v); return true;
    case kCsrMhpmevent3: c.mhpmevent[0] = v; return true;
    case kCsrMhpmevent3 + 1: c.mhpmevent[1] = v; return true;
    default: return false;
  }
}

StepInfo Cpu::step(MemoryBus& bus, PmpUnit& pmp) {
  StepInfo info;
  info.pc = s_.pc;
  s_.csrs.mcycle++;

  if ((s_.pc & 3) != 0 || !pmp.allows(s_.pc, 4, AccessKind::kExec, s_.priv)) {
    enter_trap(TrapCause::kInstrAccessFault, s_.pc);
    info.trapped = true;
    info.cause = TrapCause::kInstrAccessFault;
    info.tval = info.pc;
    return info;
  }

  uint32_t w = bus.fetch32(s_.pc);
  info.raw = w;
  auto dec = decode(w);
  if (!dec) {
    enter_trap(TrapCause::kIllegalInstruction, w);
    info.trapped = true;
    info.cause = TrapCause::kIllegalInstruction;
    info.tval = w;
    return info;
  }
  const Instruction& in = *dec;
  info.inst = in;

  auto trap = [&](TrapCause cause, uint32_t tval) {
    enter_trap(cause, tval);
    info.trapped = true;
    info.cause = cause;
    info.tval = tval;
  };

  uint32_t pc = s_.pc;
  uint32_t next = pc + 4;
  uint32_t a = s_.regs[in.rs1];
  uint32_t b = s_.regs[in.rs2];
  bool wrote_minstret = false;

  switch (in.kind) {
    case InstrKind::kLui:
      set_reg(in.rd, static_cast<uint32_t>(in.imm) << 12);
      break;
    case InstrKind::kAuipc:
      set_reg(in.rd, pc + (static_cast<uint32_t>(in.imm) << 12));
      break;
    case InstrKind::kJal:
      set_reg(in.rd, pc + 4);
      next = pc + static_cast<uint32_t>(in.imm);
      break;
    case InstrKind::kJalr: {
      uint32_t target = (a + static_cast<uint32_t>(in.imm)) & ~1u;
      set_reg(in.rd, pc + 4);
      next = target;
      break;
    }
    case InstrKind::kBeq:
    case InstrKind::kBne:
    case InstrKind::kBlt:
    case InstrKind::kBge:
    case InstrKind::kBltu:
    case InstrKind::kBgeu: {
      bool taken = false;
      switch (in.kind) {
        case InstrKind::kBeq: taken = a == b; break;
        case InstrKind::kBne: taken = a != b; break;
        case InstrKind::kBlt:
          taken = static_cast<int32_t>(a) < static_cast<int32_t>(b);
          break;
        case InstrKind::kBge:
          taken = static_cast<int32_t>(a) >= static_cast<int32_t>(b);
          break;
        case InstrKind::kBltu: taken = a < b; break;
        case InstrKind::kBgeu: taken = a >= b; break;
        default: break;
      }
      info.branch_taken = taken;
      if (taken) next = pc + static_cast<uint32_t>(in.imm);
      break;
    }
    case InstrKind::kLb:
    case InstrKind::kLh:
    case InstrKind::kLw:
    case InstrKind::kLbu:
    case InstrKind::kLhu: {
      uint32_t addr = a + static_cast<uint32_t>(in.imm);
      uint32_t width = in.kind == InstrKind::kLw                            ? 4
                       : (in.kind == InstrKind::kLh || in.kind == InstrKind::kLhu) ? 2
                                                                           : 1;
      if ((addr % width) != 0 ||
          !pmp.allows(addr, width, AccessKind::kRead, s_.priv)) {
        trap(TrapCause::kLoadAccessFault, addr);
        return info;
      }
      info.mem_access = true;
      info.mem_addr = addr;
      uint32_t v = 0;
      switch (in.kind) {
        case InstrKind::kLb:
          v = static_cast<uint32_t>(static_cast<int32_t>(
              static_cast<int8_t>(bus.load8(addr))));
          break;
        case InstrKind::kLbu: v = bus.load8(addr); break;
        case InstrKind::kLh:
          v = static_cast<uint32_t>(static_cast<int32_t>(
              static_cast<int16_t>(bus.load16(addr))));
          break;
        case InstrKind::kLhu: v = bus.load16(addr); break;
        case InstrKind::kLw: v = bus.load32(addr); break;
        default: break;
      }
      set_reg(in.rd, v);
      break;
    }
    case InstrKind::kSb:
    case InstrKind::kSh:
    case InstrKind::kSw: {
      uint32_t addr = a + static_cast<uint32_t>(in.imm);
      uint32_t width = in.kind == InstrKind::kSw   ? 4
                       : in.kind == InstrKind::kSh ? 2
                                                   : 1;
      if ((addr % width) != 0 ||
          !pmp.allows(addr, width, AccessKind::kWrite, s_.priv)) {
        trap(TrapCause::kStoreAccessFault, addr);
        return info;
      }
      info.mem_access = true;
      info.mem_is_store = true;
      info.mem_addr = addr;
      switch (in.kind) {
        case InstrKind::kSb: bus.store8(addr, static_cast<uint8_t>(b)); break;
        case InstrKind::kSh: bus.store16(addr, static_cast<uint16_t>(b)); break;
        case InstrKind::kSw: bus.store32(addr, b); break;
        default: break;
      }
      break;
    }
    case InstrKind::kAddi: set_reg(in.rd, a + static_cast<uint32_t>(in.imm)); break;
    case InstrKind::kSlti:
      set_reg(in.rd, static_cast<int32_t>(a) < in.imm ? 1 : 0);
      break;
    case InstrKind::kSltiu:
      set_reg(in.rd, a < static_cast<uint32_t>(in.imm) ? 1 : 0);
      break;
    case InstrKind::kXori: set_reg(in.rd, a ^ static_cast<uint32_t>(in.imm)); break;
    case InstrKind::kOri: set_reg(in.rd, a | static_cast<uint32_t>(in.imm)); break;
    case InstrKind::kAndi: set_reg(in.rd, a & static_cast<uint32_t>(in.imm)); break;
    case InstrKind::kSlli: set_reg(in.rd, a << (in.imm & 31)); break;
    case InstrKind::kSrli: set_reg(in.rd, a >> (in.imm & 31)); break;
    case InstrKind::kSrai:
      set_reg(in.rd,
              static_cast<uint32_t>(static_cast<int32_t>(a) >> (in.imm & 31)));
      break;
    case InstrKind::kAdd: set_reg(in.rd, a + b); break;
    case InstrKind::kSub: set_reg(in.rd, a - b); break;
    case InstrKind::kSll: set_reg(in.rd, a << (b & 31)); break;
    case InstrKind::kSlt:
      set_reg(in.rd, static_cast<int32_t>(a) < static_cast<int32_t>(b) ? 1 : 0);
      break;
    case InstrKind::kSltu: set_reg(in.rd, a < b ? 1 : 0); break;
    case InstrKind::kXor: set_reg(in.rd, a ^ b); break;
    case InstrKind::kSrl: set_reg(in.rd, a >> (b & 31)); break;
    case InstrKind::kSra:
      set_reg(in.rd,
              static_cast<uint32_t>(static_cast<int32_t>(a) >> (b & 31)));
      break;
    case InstrKind::kOr: set_reg(in.rd, a | b); break;
    case InstrKind::kAnd: set_reg(in.rd, a & b); break;
    case InstrKind::kMul: set_reg(in.rd, a * b); break;
    case InstrKind::kMulh: {
      int64_t p = static_cast<int64_t>(static_cast<int32_t>(a)) *
                  static_cast<int64_t>(static_cast<int32_t>(b));
      set_reg(in.rd, static_cast<uint32_t>(static_cast<uint64_t>(p) >> 32));
      break;
    }
    case InstrKind::kMulhsu: {
      int64_t p = static_cast<int64_t>(static_cast<int32_t>(a)) *
                  static_cast<int64_t>(uint64_t{b});
      set_reg(in.rd, static_cast<uint32_t>(static_cast<uint64_t>(p) >> 32));
      break;
    }
    case InstrKind::kMulhu: {
      uint64_t p = uint64_t{a} * uint64_t{b};
      set_reg(in.rd, static_cast<uint32_t>(p >> 32));
      break;
    }
    case InstrKind::kDiv: {
      int32_t sa = static_cast<int32_t>(a), sb = static_cast<int32_t>(b);
      int32_t q = sb == 0 ? -1
                  : (sa == INT32_MIN && sb == -1) ? sa
                                                  : sa / sb;
      set_reg(in.rd, static_cast<uint32_t>(q));
      break;
    }
    case InstrKind::kDivu:
      set_reg(in.rd, b == 0 ? 0xFFFFFFFFu : a / b);
      break;
    case InstrKind::kRem: {
      int32_t sa = static_cast<int32_t>(a), sb = static_cast<int32_t>(b);
      int32_t r = sb == 0 ? sa : (sa == INT32_MIN && sb == -1) ? 0 : sa % sb;
      set_reg(in.rd, static_cast<uint32_t>(r));
      break;
    }
    case InstrKind::kRemu: set_reg(in.rd, b == 0 ? a : a % b); break;
    case InstrKind::kFence:
      break;
    case InstrKind::kFenceI:
      break;
    case InstrKind::kEcall:
      trap(s_.priv == PrivMode::kUser ? TrapCause::kEcallFromU
                                      : TrapCause::kEcallFromM,
           0);
      return info;
    case InstrKind::kEbreak:
      trap(TrapCause::kBreakpoint, pc);
      return info;
    case InstrKind::kMret: {
      if (s_.priv != PrivMode::kMachine) {
        trap(TrapCause::kIllegalInstruction, w);
        return info;
      }
      Csrs& c = s_.csrs;
      uint32_t mpp = (c.mstatus & Csrs::kMstatusMppMask) >> Csrs::kMstatusMppShift;
      s_.priv = mpp == 3 ? PrivMode::kMachine : PrivMode::kUser;
      bool mpie = c.mstatus & Csrs::kMstatusMpie;
      c.mstatus &= ~(Csrs::kMstatusMie | Csrs::kMstatusMppMask);
      c.mstatus |= Csrs::kMstatusMpie;
      if (mpie) c.mstatus |= Csrs::kMstatusMie;
      next = c.mepc;
      break;
    }
    case InstrKind::kCsrrw:
    case InstrKind::kCsrrs:
    case InstrKind::kCsrrc:
    case InstrKind::kCsrrwi:
    case InstrKind::kCsrrsi:
    case InstrKind::kCsrrci: {
      uint32_t csr = static_cast<uint32_t>(in.imm) & 0xFFF;
      if (s_.priv == PrivMode::kUser && ((csr >> 8) & 3) != 0) {
        trap(TrapCause::kIllegalInstruction, w);
        return info;
      }
      auto old = csr_read(csr, pmp);
      if (!old) {
        trap(TrapCause::kIllegalInstruction, w);
        return info;
      }
      bool imm_form = in.kind == InstrKind::kCsrrwi ||
                      in.kind == InstrKind::kCsrrsi ||
                      in.kind == InstrKind::kCsrrci;
      uint32_t src = imm_form ? in.rs1 : a;
      bool do_write = false;
      uint32_t nv = 0;
      switch (in.kind) {
        case InstrKind::kCsrrw:
        case InstrKind::kCsrrwi:
          do_write = true;
          nv = src;
          break;
        case InstrKind::kCsrrs:
        case InstrKind::kCsrrsi:
          do_write = in.rs1 != 0;
          nv = *old | src;
          break;
        case InstrKind::kCsrrc:
        case InstrKind::kCsrrci:
          do_write = in.rs1 != 0;
          nv = *old & ~src;
          break;
        default:
          break;
      }
      if (do_write) {
        if (!csr_write(csr, nv, pmp)) {
          trap(TrapCause::kIllegalInstruction, w);
          return info;
        }
        if (csr == kCsrMinstret || csr == kCsrMinstretH) wrote_minstret = true;
      }
      set_reg(in.rd, *old);
      break;
    }
  }

  s_.pc = next;
  info.retired = true;
  if (!wrote_minstret) s_.csrs.minstret++;
  return info;
}

}  // namespace r5
