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

#include "r5/assembler.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>
#include <unordered_map>

namespace r5 {

const char* to_string(AsmErrorKind kind) {
  switch (kind) {
    case AsmErrorKind::kSyntax: return "syntax error";
    case AsmErrorKind::kUnknownMnemonic: return "unknown mnemonic";
    case AsmErrorKind::kBadOperand: return "bad operand";
    case AsmErrorKind::kUndefinedSymbol: return "undefined symbol";
    case AsmErrorKind::kDuplicateSymbol: return "duplicate symbol";
    case AsmErrorKind::kImmediateRange: return "immediate out of range";
    case AsmErrorKind::kReservedRegister: return "reserved register";
    case AsmErrorKind::kMisalignedTarget: return "misaligned target";
  }
  return "error";
}

std::string format_error(const AsmError& err) {
  std::ostringstream os;
  os << "line " << err.line << ": " << to_string(err.kind);
  if (!err.message.empty()) os << ": " << err.message;
  return os.str();
}

namespace {

struct Parser {
  const AsmOptions& opts;
  AsmProgram prog;
  AsmSection* cur;
  int line_no = 0;

  explicit Parser(const AsmOptions& o) : opts(o), cur(&prog.text) {}

  void error(AsmErrorKind kind, const std::string& msg) {
    prog.errors.push_back({kind, line_no, msg});
  }

  void emit(AsmItem item) {
    item.line = line_no;
    cur->items.push_back(std::move(item));
  }

  bool check_regs(std::initializer_list<uint8_t> regs) {
    if (opts.allow_reserved_regs) return true;
    for (uint8_t r : regs) {
      if (r == 30 || r == 31) {
        error(AsmErrorKind::kReservedRegister,
              "x" + std::to_string(r) + " is reserved for instrumentation");
        return false;
      }
    }
    return true;
  }

  void instr(InstrKind k, uint8_t rd, uint8_t rs1, uint8_t rs2, ImmRef imm) {
    emit(AsmItem::instr(k, rd, rs1, rs2, std::move(imm)));
  }

  void parse_line(const std::string& raw);
  void parse_stmt(const std::string& head, const std::string& rest);
  void parse_directive(const std::string& head, const std::string& rest);
  void parse_instr(const std::string& mnemonic,
                   const std::vector<std::string>& ops);
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '$';
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string curtok;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(curtok));
      curtok.clear();
    } else {
      curtok += c;
    }
  }
  std::string last = trim(curtok);
  if (!last.empty() || !out.empty()) out.push_back(last);
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

std::optional<int64_t> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  size_t pos = 0;
  bool neg = false;
  if (s[pos] == '-' || s[pos] == '+') {
    neg = s[pos] == '-';
    ++pos;
  }
  if (pos >= s.size()) return std::nullopt;
  int base = 10;
  if (s.size() - pos > 2 && s[pos] == '0' && (s[pos + 1] == 'x' || s[pos + 1] == 'X')) {
    base = 16;
    pos += 2;
  }
  int64_t v = 0;
  size_t digits = 0;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (base == 16 && c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (base == 16 && c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else return std::nullopt;
    v = v * base + d;
    if (v > int64_t{1} << 40) return std::nullopt;
    ++digits;
  }
  if (digits == 0) return std::nullopt;
  return neg ? -v : v;
}

// symbol, symbol+N, symbol-N
std::optional<ImmRef> parse_sym_expr(const std::string& s) {
  if (s.empty() || !is_ident_start(s[0])) return std::nullopt;
  size_t k = 0;
  while (k < s.size() && is_ident_char(s[k])) ++k;
  std::string sym = s.substr(0, k);
  int64_t addend = 0;
  if (k < s.size()) {
    auto v = parse_int(s.substr(k));
    if (!v || (s[k] != '+' && s[k] != '-')) return std::nullopt;
    addend = *v;
  }
  return ImmRef::abs(sym, addend);
}

// literal | symbol expr | %hi(...) | %lo(...)
std::optional<ImmRef> parse_imm(const std::string& s) {
  if (auto v = parse_int(s)) return ImmRef::literal(*v);
  if (s.size() > 4 && s[0] == '%' && s.back() == ')') {
    std::string fn = s.substr(1, 2);
    if ((fn == "hi" || fn == "lo") && s[3] == '(') {
      auto inner = parse_sym_expr(trim(s.substr(4, s.size() - 5)));
      if (!inner) return std::nullopt;
      inner->mode = fn == "hi" ? ImmRef::Mode::kSymHi : ImmRef::Mode::kSymLo;
      return inner;
    }
    return std::nullopt;
  }
  return parse_sym_expr(s);
}

// label | sym±N | .+N | .-N  (branch and jump targets)
std::optional<ImmRef> parse_target(const std::string& s) {
  if (s.size() >= 3 && s[0] == '.' && (s[1] == '+' || s[1] == '-')) {
    auto v = parse_int(s.substr(1));
    if (!v) return std::nullopt;
    return ImmRef::literal(*v);
  }
  return parse_sym_expr(s);
}

// off(reg) | (reg) | %lo(sym)(reg)
struct MemOperand {
  uint8_t reg = 0;
  ImmRef off;
};

std::optional<MemOperand> parse_mem(const std::string& s) {
  size_t open = s.rfind('(');
  if (open == std::string::npos || s.back() != ')') return std::nullopt;
  std::string regname = trim(s.substr(open + 1, s.size() - open - 2));
  auto reg = parse_reg(regname);
  if (!reg) return std::nullopt;
  std::string offstr = trim(s.substr(0, open));
  MemOperand m;
  m.reg = *reg;
  if (offstr.empty()) {
    m.off = ImmRef::literal(0);
    return m;
  }
  auto imm = parse_imm(offstr);
  if (!imm) return std::nullopt;
  m.off = *imm;
  return m;
}

const std::unordered_map<std::string, uint32_t>& csr_names() {
  static const std::unordered_map<std::string, uint32_t> map = [] {
    std::unordered_map<std::string, uint32_t> m = {
        {"mstatus", 0x300},      {"mtvec", 0x305},
        {"mepc", 0x341},         {"mcause", 0x342},
        {"mtval", 0x343},        {"mcycle", 0xB00},
        {"mcycleh", 0xB80},      {"minstret", 0xB02},
        {"minstreth", 0xB82},    {"mhpmcounter3", 0xB03},
        {"mhpmcounter4", 0xB04}, {"mhpmcounter3h", 0xB83},
        {"mhpmcounter4h", 0xB84},{"mhpmevent3", 0x323},
        {"mhpmevent4", 0x324},
    };
    for (int k = 0; k < 4; ++k)
      m["pmpcfg" + std::to_string(k)] = 0x3A0 + k;
    for (int k = 0; k < 16; ++k)
      m["pmpaddr" + std::to_string(k)] = 0x3B0 + k;
    return m;
  }();
  return map;
}

std::optional<uint32_t> parse_csr(const std::string& s) {
  auto it = csr_names().find(s);
  if (it != csr_names().end()) return it->second;
  auto v = parse_int(s);
  if (v && *v >= 0 && *v <= 0xFFF) return static_cast<uint32_t>(*v);
  return std::nullopt;
}

void Parser::parse_directive(const std::string& head,
                             const std::string& rest) {
  std::vector<std::string> ops = split_commas(rest);
  if (head == ".text" || head == ".data") {
    AsmSection* sec = head == ".text" ? &prog.text : &prog.data;
    if (!ops.empty()) {
      auto v = parse_int(ops[0]);
      if (!v || *v < 0 || *v > 0xFFFFFFFFll) {
        error(AsmErrorKind::kBadOperand, "bad section base");
        return;
      }
      if (sec->base_set && sec->base != static_cast<uint32_t>(*v)) {
        error(AsmErrorKind::kSyntax, "section base set twice");
        return;
      }
      sec->base = static_cast<uint32_t>(*v);
      sec->base_set = true;
    }
    cur = sec;
    return;
  }
  if (head == ".word") {
    if (ops.empty()) {
      error(AsmErrorKind::kBadOperand, ".word needs values");
      return;
    }
    for (const std::string& op : ops) {
      auto imm = parse_imm(op);
      if (!imm || imm->mode == ImmRef::Mode::kSymHi ||
          imm->mode == ImmRef::Mode::kSymLo) {
        error(AsmErrorKind::kBadOperand, "bad .word value: " + op);
        continue;
      }
      AsmItem item;
      item.type = AsmItem::Type::kWord;
      item.imm = *imm;
      emit(std::move(item));
    }
    return;
  }
  if (head == ".byte") {
    for (const std::string& op : ops) {
      auto v = parse_int(op);
      if (!v || *v < -128 || *v > 255) {
        error(AsmErrorKind::kBadOperand, "bad .byte value: " + op);
        continue;
      }
      AsmItem item;
      item.type = AsmItem::Type::kByte;
      item.imm = ImmRef::literal(*v & 0xFF);
      emit(std::move(item));
    }
    return;
  }
  if (head == ".zero") {
    auto v = ops.size() == 1 ? parse_int(ops[0]) : std::nullopt;
    if (!v || *v < 0 || *v > 1 << 20) {
      error(AsmErrorKind::kBadOperand, ".zero needs a byte count");
      return;
    }
    AsmItem item;
    item.type = AsmItem::Type::kZero;
    item.imm = ImmRef::literal(*v);
    emit(std::move(item));
    return;
  }
  if (head == ".align") {
    auto v = ops.size() == 1 ? parse_int(ops[0]) : std::nullopt;
    if (!v || *v <= 0 || (*v & (*v - 1)) != 0 || *v > 4096) {
      error(AsmErrorKind::kBadOperand, ".align needs a power-of-two boundary");
      return;
    }
    AsmItem item;
    item.type = AsmItem::Type::kAlign;
    item.imm = ImmRef::literal(*v);
    emit(std::move(item));
    return;
  }
  if (head == ".entry") {
    if (ops.size() != 1 || !parse_sym_expr(ops[0])) {
      error(AsmErrorKind::kBadOperand, ".entry needs a symbol");
      return;
    }
    prog.entry_symbol = ops[0];
    return;
  }
  if (head == ".nocfi") {
    if (ops.size() != 1 || !parse_sym_expr(ops[0])) {
      error(AsmErrorKind::kBadOperand, ".nocfi needs a symbol");
      return;
    }
    prog.nocfi.insert(ops[0]);
    return;
  }
  error(AsmErrorKind::kSyntax, "unknown directive " + head);
}

void Parser::parse_instr(const std::string& m,
                         const std::vector<std::string>& ops) {
  auto need = [&](size_t n) {
    if (ops.size() != n) {
      error(AsmErrorKind::kBadOperand,
            m + " expects " + std::to_string(n) + " operands");
      return false;
    }
    return true;
  };
  auto reg_at = [&](size_t k) -> std::optional<uint8_t> {
    auto r = parse_reg(ops[k]);
    if (!r) error(AsmErrorKind::kBadOperand, "bad register: " + ops[k]);
    return r;
  };

  static const std::unordered_map<std::string, InstrKind> rtype = {
      {"add", InstrKind::kAdd},     {"sub", InstrKind::kSub},
      {"sll", InstrKind::kSll},     {"slt", InstrKind::kSlt},
      {"sltu", InstrKind::kSltu},   {"xor", InstrKind::kXor},
      {"srl", InstrKind::kSrl},     {"sra", InstrKind::kSra},
      {"or", InstrKind::kOr},       {"and", InstrKind::kAnd},
      {"mul", InstrKind::kMul},     {"mulh", InstrKind::kMulh},
      {"mulhsu", InstrKind::kMulhsu}, {"mulhu", InstrKind::kMulhu},
      {"div", InstrKind::kDiv},     {"divu", InstrKind::kDivu},
      {"rem", InstrKind::kRem},     {"remu", InstrKind::kRemu}};
  static const std::unordered_map<std::string, InstrKind> itype = {
      {"addi", InstrKind::kAddi},   {"slti", InstrKind::kSlti},
      {"sltiu", InstrKind::kSltiu}, {"xori", InstrKind::kXori},
      {"ori", InstrKind::kOri},     {"andi", InstrKind::kAndi}};
  static const std::unordered_map<std::string, InstrKind> shifts = {
      {"slli", InstrKind::kSlli},
      {"srli", InstrKind::kSrli},
      {"srai", InstrKind::kSrai}};
  static const std::unordered_map<std::string, InstrKind> loads = {
      {"lb", InstrKind::kLb},
      {"lh", InstrKind::kLh},
      {"lw", InstrKind::kLw},
      {"lbu", InstrKind::kLbu},
      {"lhu", InstrKind::kLhu}};
  static const std::unordered_map<std::string, InstrKind> stores = {
      {"sb", InstrKind::kSb}, {"sh", InstrKind::kSh}, {"sw", InstrKind::kSw}};
  static const std::unordered_map<std::string, InstrKind> branches = {
      {"beq", InstrKind::kBeq},   {"bne", InstrKind::kBne},
      {"blt", InstrKind::kBlt},   {"bge", InstrKind::kBge},
      {"bltu", InstrKind::kBltu}, {"bgeu", InstrKind::kBgeu}};
  static const std::unordered_map<std::string, InstrKind> csrops = {
      {"csrrw", InstrKind::kCsrrw},   {"csrrs", InstrKind::kCsrrs},
      {"csrrc", InstrKind::kCsrrc},   {"csrrwi", InstrKind::kCsrrwi},
      {"csrrsi", InstrKind::kCsrrsi}, {"csrrci", InstrKind::kCsrrci}};

  if (auto it = rtype.find(m); it != rtype.end()) {
    if (!need(3)) return;
    auto rd = reg_at(0), rs1 = reg_at(1), rs2 = reg_at(2);
    if (!rd || !rs1 || !rs2 || !check_regs({*rd, *rs1, *rs2})) return;
    instr(it->second, *rd, *rs1, *rs2, ImmRef::literal(0));
    return;
  }
  if (auto it = itype.find(m); it != itype.end()) {
    if (!need(3)) return;
    auto rd = reg_at(0), rs1 = reg_at(1);
    auto imm = parse_imm(ops[2]);
    if (!rd || !rs1 || !check_regs({*rd, *rs1})) return;
    if (!imm || imm->mode == ImmRef::Mode::kSymHi ||
        imm->mode == ImmRef::Mode::kSymAbs) {
      error(AsmErrorKind::kBadOperand, "bad immediate: " + ops[2]);
      return;
    }
    if (imm->mode == ImmRef::Mode::kValue &&
        (imm->value < -2048 || imm->value > 2047)) {
      error(AsmErrorKind::kImmediateRange, ops[2]);
      return;
    }
    instr(it->second, *rd, *rs1, 0, *imm);
    return;
  }
  if (auto it = shifts.find(m); it != shifts.end()) {
    if (!need(3)) return;
    auto rd = reg_at(0), rs1 = reg_at(1);
    auto v = parse_int(ops[2]);
    if (!rd || !rs1 || !check_regs({*rd, *rs1})) return;
    if (!v || *v < 0 || *v > 31) {
      error(AsmErrorKind::kImmediateRange, ops[2]);
      return;
    }
    instr(it->second, *rd, *rs1, 0, ImmRef::literal(*v));
    return;
  }
  if (auto it = loads.find(m); it != loads.end()) {
    if (!need(2)) return;
    auto rd = reg_at(0);
    auto mem = parse_mem(ops[1]);
    if (!rd) return;
    if (!mem) {
      error(AsmErrorKind::kBadOperand, "bad memory operand: " + ops[1]);
      return;
    }
    if (!check_regs({*rd, mem->reg})) return;
    if (mem->off.mode == ImmRef::Mode::kValue &&
        (mem->off.value < -2048 || mem->off.value > 2047)) {
      error(AsmErrorKind::kImmediateRange, ops[1]);
      return;
    }
    instr(it->second, *rd, mem->reg, 0, mem->off);
    return;
  }
  if (auto it = stores.find(m); it != stores.end()) {
    if (!need(2)) return;
    auto rs2 = reg_at(0);
    auto mem = parse_mem(ops[1]);
    if (!rs2) return;
    if (!mem) {
      error(AsmErrorKind::kBadOperand, "bad memory operand: " + ops[1]);
      return;
    }
    if (!check_regs({*rs2, mem->reg})) return;
    if (mem->off.mode == ImmRef::Mode::kValue &&
        (mem->off.value < -2048 || mem->off.value > 2047)) {
      error(AsmErrorKind::kImmediateRange, ops[1]);
      return;
    }
    instr(it->second, 0, mem->reg, *rs2, mem->off);
    return;
  }
  if (auto it = branches.find(m); it != branches.end()) {
    if (!need(3)) return;
    auto rs1 = reg_at(0), rs2 = reg_at(1);
    auto target = parse_target(ops[2]);
    if (!rs1 || !rs2 || !check_regs({*rs1, *rs2})) return;
    if (!target) {
      error(AsmErrorKind::kBadOperand, "bad branch target: " + ops[2]);
      return;
    }
    instr(it->second, 0, *rs1, *rs2, *target);
    return;
  }
  if (auto it = csrops.find(m); it != csrops.end()) {
    if (!need(3)) return;
    auto rd = reg_at(0);
    auto csr = parse_csr(ops[1]);
    if (!rd) return;
    if (!csr) {
      error(AsmErrorKind::kBadOperand, "bad CSR: " + ops[1]);
      return;
    }
    bool imm_form = m.back() == 'i';
    if (imm_form) {
      auto v = parse_int(ops[2]);
      if (!v || *v < 0 || *v > 31) {
        error(AsmErrorKind::kImmediateRange, ops[2]);
        return;
      }
      if (!check_regs({*rd})) return;
      instr(it->second, *rd, static_cast<uint8_t>(*v), 0,
            ImmRef::literal(*csr));
    } else {
      auto rs1 = reg_at(2);
      if (!rs1 || !check_regs({*rd, *rs1})) return;
      instr(it->second, *rd, *rs1, 0, ImmRef::literal(*csr));
    }
    return;
  }
  if (m == "lui" || m == "auipc") {
    if (!need(2)) return;
    auto rd = reg_at(0);
    auto imm = parse_imm(ops[1]);
    if (!rd || !check_regs({*rd})) return;
    if (!imm || imm->mode == ImmRef::Mode::kSymLo ||
        imm->mode == ImmRef::Mode::kSymAbs) {
      error(AsmErrorKind::kBadOperand, "bad upper immediate: " + ops[1]);
      return;
    }
    if (imm->mode == ImmRef::Mode::kValue &&
        (imm->value < 0 || imm->value > 0xFFFFF)) {
      error(AsmErrorKind::kImmediateRange, ops[1]);
      return;
    }
    instr(m == "lui" ? InstrKind::kLui : InstrKind::kAuipc, *rd, 0, 0, *imm);
    return;
  }
  if (m == "jal") {
    if (ops.size() != 1 && ops.size() != 2) {
      error(AsmErrorKind::kBadOperand, "jal expects 1 or 2 operands");
      return;
    }
    uint8_t rd = 1;
    size_t ti = 0;
    if (ops.size() == 2) {
      auto r = reg_at(0);
      if (!r) return;
      rd = *r;
      ti = 1;
    }
    auto target = parse_target(ops[ti]);
    if (!target) {
      error(AsmErrorKind::kBadOperand, "bad jump target: " + ops[ti]);
      return;
    }
    if (!check_regs({rd})) return;
    instr(InstrKind::kJal, rd, 0, 0, *target);
    return;
  }
  if (m == "jalr") {
    if (ops.size() == 1) {
      auto rs1 = reg_at(0);
      if (!rs1 || !check_regs({*rs1})) return;
      instr(InstrKind::kJalr, 1, *rs1, 0, ImmRef::literal(0));
      return;
    }
    if (ops.size() == 2) {
      auto rd = reg_at(0);
      auto mem = parse_mem(ops[1]);
      if (!rd) return;
      if (!mem || mem->off.mode != ImmRef::Mode::kValue) {
        error(AsmErrorKind::kBadOperand, "bad jalr operand: " + ops[1]);
        return;
      }
      if (!check_regs({*rd, mem->reg})) return;
      instr(InstrKind::kJalr, *rd, mem->reg, 0, mem->off);
      return;
    }
    if (!need(3)) return;
    auto rd = reg_at(0), rs1 = reg_at(1);
    auto v = parse_int(ops[2]);
    if (!rd || !rs1 || !check_regs({*rd, *rs1})) return;
    if (!v || *v < -2048 || *v > 2047) {
      error(AsmErrorKind::kImmediateRange, ops[2]);
      return;
    }
    instr(InstrKind::kJalr, *rd, *rs1, 0, ImmRef::literal(*v));
    return;
  }
  if (m == "fence") {
    if (ops.empty()) {
      instr(InstrKind::kFence, 0, 0, 0, ImmRef::literal(0x0FF));
      return;
    }
    auto v = ops.size() == 1 ? parse_int(ops[0]) : std::nullopt;
    if (!v || *v < 0 || *v > 0xFFF) {
      error(AsmErrorKind::kBadOperand, "bad fence operand");
      return;
    }
    instr(InstrKind::kFence, 0, 0, 0, ImmRef::literal(*v));
    return;
  }
  if (m == "fence.i") {
    if (!need(0)) return;
    instr(InstrKind::kFenceI, 0, 0, 0, ImmRef::literal(0));
    return;
  }
  if (m == "ecall") {
    if (!need(0)) return;
    instr(InstrKind::kEcall, 0, 0, 0, ImmRef::literal(0));
    return;
  }
  if (m == "ebreak") {
    if (!need(0)) return;
    instr(InstrKind::kEbreak, 0, 0, 0, ImmRef::literal(0));
    return;
  }
  if (m == "mret") {
    if (!need(0)) return;
    instr(InstrKind::kMret, 0, 0, 0, ImmRef::literal(0));
    return;
  }

  // Pseudoinstructions.
  if (m == "nop") {
    if (!need(0)) return;
    instr(InstrKind::kAddi, 0, 0, 0, ImmRef::literal(0));
    return;
  }
  if (m == "li") {
    if (!need(2)) return;
    auto rd = reg_at(0);
    auto v = parse_int(ops[1]);
    if (!rd || !check_regs({*rd})) return;
    if (!v || *v < INT32_MIN || *v > int64_t{0xFFFFFFFF}) {
      error(AsmErrorKind::kImmediateRange, ops[1]);
      return;
    }
    int32_t imm = static_cast<int32_t>(*v);
    if (imm >= -2048 && imm <= 2047) {
      instr(InstrKind::kAddi, *rd, 0, 0, ImmRef::literal(imm));
      return;
    }
    uint32_t u = static_cast<uint32_t>(imm);
    uint32_t hi = (u + 0x800) >> 12;
    int32_t lo = static_cast<int32_t>(u << 20) >> 20;
    instr(InstrKind::kLui, *rd, 0, 0, ImmRef::literal(hi & 0xFFFFF));
    if (lo != 0)
      instr(InstrKind::kAddi, *rd, *rd, 0, ImmRef::literal(lo));
    return;
  }
  if (m == "la") {
    if (!need(2)) return;
    auto rd = reg_at(0);
    auto sym = parse_sym_expr(ops[1]);
    if (!rd || !check_regs({*rd})) return;
    if (!sym) {
      error(AsmErrorKind::kBadOperand, "bad symbol: " + ops[1]);
      return;
    }
    ImmRef hi = *sym, lo = *sym;
    hi.mode = ImmRef::Mode::kSymHi;
    lo.mode = ImmRef::Mode::kSymLo;
    instr(InstrKind::kLui, *rd, 0, 0, hi);
    instr(InstrKind::kAddi, *rd, *rd, 0, lo);
    return;
  }
  if (m == "mv") {
    if (!need(2)) return;
    auto rd = reg_at(0), rs = reg_at(1);
    if (!rd || !rs || !check_regs({*rd, *rs})) return;
    instr(InstrKind::kAddi, *rd, *rs, 0, ImmRef::literal(0));
    return;
  }
  if (m == "j") {
    if (!need(1)) return;
    auto target = parse_target(ops[0]);
    if (!target) {
      error(AsmErrorKind::kBadOperand, "bad jump target: " + ops[0]);
      return;
    }
    instr(InstrKind::kJal, 0, 0, 0, *target);
    return;
  }
  if (m == "jr") {
    if (!need(1)) return;
    auto rs = reg_at(0);
    if (!rs || !check_regs({*rs})) return;
    instr(InstrKind::kJalr, 0, *rs, 0, ImmRef::literal(0));
    return;
  }
  if (m == "ret") {
    if (!need(0)) return;
    instr(InstrKind::kJalr, 0, 1, 0, ImmRef::literal(0));
    return;
  }
  if (m == "call") {
    if (!need(1)) return;
    auto target = parse_target(ops[0]);
    if (!target) {
      error(AsmErrorKind::kBadOperand, "bad call target: " + ops[0]);
      return;
    }
    instr(InstrKind::kJal, 1, 0, 0, *target);
    return;
  }
  if (m == "beqz" || m == "bnez") {
    if (!need(2)) return;
    auto rs = reg_at(0);
    auto target = parse_target(ops[1]);
    if (!rs || !check_regs({*rs})) return;
    if (!target) {
      error(AsmErrorKind::kBadOperand, "bad branch target: " + ops[1]);
      return;
    }
    instr(m == "beqz" ? InstrKind::kBeq : InstrKind::kBne, 0, *rs, 0,
          *target);
    return;
  }
  if (m == "csrr") {
    if (!need(2)) return;
    auto rd = reg_at(0);
    auto csr = parse_csr(ops[1]);
    if (!rd || !check_regs({*rd})) return;
    if (!csr) {
      error(AsmErrorKind::kBadOperand, "bad CSR: " + ops[1]);
      return;
    }
    instr(InstrKind::kCsrrs, *rd, 0, 0, ImmRef::literal(*csr));
    return;
  }
  if (m == "csrw") {
    if (!need(2)) return;
    auto csr = parse_csr(ops[0]);
    auto rs = reg_at(1);
    if (!rs || !check_regs({*rs})) return;
    if (!csr) {
      error(AsmErrorKind::kBadOperand, "bad CSR: " + ops[0]);
      return;
    }
    instr(InstrKind::kCsrrw, 0, *rs, 0, ImmRef::literal(*csr));
    return;
  }

  error(AsmErrorKind::kUnknownMnemonic, m);
}

void Parser::parse_stmt(const std::string& head, const std::string& rest) {
  if (head[0] == '.') {
    parse_directive(head, rest);
    return;
  }
  parse_instr(head, split_commas(rest));
}

void Parser::parse_line(const std::string& raw) {
  std::string s = raw;
  size_t hash = s.find('#');
  if (hash != std::string::npos) s = s.substr(0, hash);
  s = trim(s);
  if (s.empty()) return;

  // Leading labels, possibly several.
  while (true) {
    size_t k = 0;
    if (!is_ident_start(s[0])) break;
    while (k < s.size() && is_ident_char(s[k])) ++k;
    if (k < s.size() && s[k] == ':') {
      emit(AsmItem::label(s.substr(0, k)));
      s = trim(s.substr(k + 1));
      if (s.empty()) return;
      continue;
    }
    break;
  }

  size_t sp = s.find_first_of(" \t");
  std::string head = sp == std::string::npos ? s : s.substr(0, sp);
  std::string rest = sp == std::string::npos ? "" : trim(s.substr(sp + 1));
  std::transform(head.begin(), head.end(), head.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  parse_stmt(head, rest);
}

}  // namespace

AsmProgram parse_asm(const std::string& source, const AsmOptions& opts) {
  Parser p(opts);
  std::istringstream is(source);
  std::string line;
  while (std::getline(is, line)) {
    ++p.line_no;
    p.parse_line(line);
  }
  return std::move(p.prog);
}

namespace {

struct Layout {
  std::map<std::string, uint32_t> symbols;
  uint32_t text_base = 0, text_end = 0;
  uint32_t data_base = 0, data_end = 0;
};

uint32_t item_size(const AsmItem& it, uint32_t addr) {
  switch (it.type) {
    case AsmItem::Type::kInstr:
    case AsmItem::Type::kWord:
      return 4;
    case AsmItem::Type::kByte:
      return 1;
    case AsmItem::Type::kZero:
      return static_cast<uint32_t>(it.imm.value);
    case AsmItem::Type::kAlign: {
      uint32_t a = static_cast<uint32_t>(it.imm.value);
      return (a - (addr % a)) % a;
    }
    case AsmItem::Type::kLabel:
      return 0;
  }
  return 0;
}

class Resolver {
 public:
  Resolver(AsmProgram& prog, Layout& lay) : prog_(prog), lay_(lay) {}

  void error(AsmErrorKind kind, int line, const std::string& msg) {
    prog_.errors.push_back({kind, line, msg});
  }

  std::optional<uint32_t> sym_value(const ImmRef& imm, int line) {
    auto it = lay_.symbols.find(imm.sym);
    if (it == lay_.symbols.end()) {
      error(AsmErrorKind::kUndefinedSymbol, line, imm.sym);
      return std::nullopt;
    }
    return it->second + static_cast<uint32_t>(imm.value);
  }

  // Immediate value for an encoded instruction, pc-relative when the kind
  // demands it.
  std::optional<int32_t> resolve(const AsmItem& it) {
    bool pcrel = it.kind == InstrKind::kJal || is_cond_branch(it.kind);
    switch (it.imm.mode) {
      case ImmRef::Mode::kValue:
        return static_cast<int32_t>(it.imm.value);
      case ImmRef::Mode::kSymAbs: {
        auto v = sym_value(it.imm, it.line);
        if (!v) return std::nullopt;
        if (pcrel) return static_cast<int32_t>(*v - it.addr);
        return static_cast<int32_t>(*v);
      }
      case ImmRef::Mode::kSymHi: {
        auto v = sym_value(it.imm, it.line);
        if (!v) return std::nullopt;
        return static_cast<int32_t>(((*v + 0x800) >> 12) & 0xFFFFF);
      }
      case ImmRef::Mode::kSymLo: {
        auto v = sym_value(it.imm, it.line);
        if (!v) return std::nullopt;
        return static_cast<int32_t>(*v << 20) >> 20;
      }
    }
    return std::nullopt;
  }

 private:
  AsmProgram& prog_;
  Layout& lay_;
};

void lay_out_section(AsmProgram& prog, AsmSection& sec, uint32_t base,
                     Layout& lay, uint32_t& end) {
  uint32_t cur = base;
  for (AsmItem& it : sec.items) {
    if (it.type == AsmItem::Type::kAlign) {
      it.addr = cur;
      cur += item_size(it, cur);
      continue;
    }
    it.addr = cur;
    if (it.type == AsmItem::Type::kLabel) {
      bool inserted = lay.symbols.insert({it.imm.sym, cur}).second;
      if (!inserted)
        prog.errors.push_back(
            {AsmErrorKind::kDuplicateSymbol, it.line, it.imm.sym});
      continue;
    }
    if (it.type == AsmItem::Type::kInstr && (cur & 3) != 0)
      prog.errors.push_back({AsmErrorKind::kMisalignedTarget, it.line,
                             "instruction not word-aligned"});
    if (it.type == AsmItem::Type::kWord && (cur & 3) != 0)
      prog.errors.push_back({AsmErrorKind::kMisalignedTarget, it.line,
                             ".word not word-aligned"});
    cur += item_size(it, cur);
  }
  end = cur;
}

void emit_section(AsmSection& sec, uint32_t base, Resolver& res,
                  std::vector<uint8_t>& out) {
  out.clear();
  auto put8 = [&out](uint8_t b) { out.push_back(b); };
  auto put32 = [&out](uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
  };
  for (AsmItem& it : sec.items) {
    uint32_t cur = base + static_cast<uint32_t>(out.size());
    switch (it.type) {
      case AsmItem::Type::kLabel:
        break;
      case AsmItem::Type::kAlign: {
        uint32_t pad = item_size(it, cur);
        for (uint32_t k = 0; k < pad; ++k) put8(0);
        break;
      }
      case AsmItem::Type::kZero: {
        for (int64_t k = 0; k < it.imm.value; ++k) put8(0);
        break;
      }
      case AsmItem::Type::kByte:
        put8(static_cast<uint8_t>(it.imm.value));
        break;
      case AsmItem::Type::kWord: {
        if (it.imm.mode == ImmRef::Mode::kValue) {
          put32(static_cast<uint32_t>(it.imm.value));
        } else {
          auto v = res.sym_value(it.imm, it.line);
          put32(v ? *v : 0);
        }
        break;
      }
      case AsmItem::Type::kInstr: {
        auto imm = res.resolve(it);
        if (!imm) {
          put32(0);
          break;
        }
        if (it.kind == InstrKind::kJal) {
          if (*imm < -1048576 || *imm > 1048574 || (*imm & 1)) {
            res.error(AsmErrorKind::kImmediateRange, it.line,
                      "jump offset " + std::to_string(*imm));
            put32(0);
            break;
          }
        } else if (is_cond_branch(it.kind)) {
          if (*imm < -4096 || *imm > 4094 || (*imm & 1)) {
            res.error(AsmErrorKind::kImmediateRange, it.line,
                      "branch offset " + std::to_string(*imm));
            put32(0);
            break;
          }
        }
        Instruction inst;
        inst.kind = it.kind;
        inst.rd = it.rd;
        inst.rs1 = it.rs1;
        inst.rs2 = it.rs2;
        inst.imm = *imm;
        put32(encode(inst));
        break;
      }
    }
  }
}

}  // namespace

AsmOutput assemble_program(AsmProgram& prog, const AsmOptions& opts) {
  AsmOutput out;
  Layout lay;

  lay.text_base = prog.text.base_set ? prog.text.base : opts.default_text_base;
  lay_out_section(prog, prog.text, lay.text_base, lay, lay.text_end);
  lay.data_base = prog.data.base_set
                      ? prog.data.base
                      : (lay.text_end + 0xFFFu) & ~0xFFFu;
  lay_out_section(prog, prog.data, lay.data_base, lay, lay.data_end);

  Resolver res(prog, lay);
  std::vector<uint8_t> text_bytes, data_bytes;
  emit_section(prog.text, lay.text_base, res, text_bytes);
  emit_section(prog.data, lay.data_base, res, data_bytes);

  Image& img = out.image;
  if (!text_bytes.empty()) {
    Segment s;
    s.load_addr = lay.text_base;
    s.flags = Segment::kFlagR | Segment::kFlagX;
    s.bytes = std::move(text_bytes);
    img.segments.push_back(std::move(s));
  }
  if (!data_bytes.empty()) {
    Segment s;
    s.load_addr = lay.data_base;
    s.flags = Segment::kFlagR | Segment::kFlagW;
    s.bytes = std::move(data_bytes);
    img.segments.push_back(std::move(s));
  }

  // Metadata: every label, plus a function list from non-local text labels.
  img.meta.symbols = lay.symbols;
  std::vector<FunctionInfo> funcs;
  for (const AsmItem& it : prog.text.items) {
    if (it.type != AsmItem::Type::kLabel) continue;
    if (it.imm.sym.empty() || it.imm.sym[0] == '.') continue;
    FunctionInfo f;
    f.name = it.imm.sym;
    f.addr = it.addr;
    funcs.push_back(f);
  }
  for (size_t k = 0; k < funcs.size(); ++k) {
    uint32_t next = k + 1 < funcs.size() ? funcs[k + 1].addr : lay.text_end;
    funcs[k].size = next - funcs[k].addr;
  }
  img.meta.functions = std::move(funcs);

  if (!prog.entry_symbol.empty()) {
    auto it = lay.symbols.find(prog.entry_symbol);
    if (it == lay.symbols.end())
      prog.errors.push_back(
          {AsmErrorKind::kUndefinedSymbol, 0, prog.entry_symbol});
    else
      img.entry_pc = it->second;
  } else if (auto it = lay.symbols.find("_start"); it != lay.symbols.end()) {
    img.entry_pc = it->second;
  } else if (!img.meta.functions.empty()) {
    img.entry_pc = img.meta.functions.front().addr;
  } else {
    img.entry_pc = lay.text_base;
  }

  out.errors = prog.errors;
  return out;
}

AsmOutput assemble(const std::string& source, const AsmOptions& opts) {
  AsmProgram prog = parse_asm(source, opts);
  if (!prog.ok()) {
    AsmOutput out;
    out.errors = prog.errors;
    return out;
  }
  return assemble_program(prog, opts);
}

}  // namespace r5
