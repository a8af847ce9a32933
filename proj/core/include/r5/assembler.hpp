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

#ifndef R5_ASSEMBLER_HPP_
#define R5_ASSEMBLER_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "r5/image.hpp"
#include "r5/isa.hpp"

namespace r5 {

enum class AsmErrorKind {
  kSyntax,
  kUnknownMnemonic,
  kBadOperand,
  kUndefinedSymbol,
  kDuplicateSymbol,
  kImmediateRange,
  kReservedRegister,
  kMisalignedTarget,
};

struct AsmError {
  AsmErrorKind kind = AsmErrorKind::kSyntax;
  int line = 0;
  std::string message;
};

const char* to_string(AsmErrorKind kind);
std::string format_error(const AsmError& err);

/// Immediate operand before symbol resolution.
struct ImmRef {
  enum class Mode {
    kValue,    // literal; for branches/jumps a pc-relative byte offset
    kSymAbs,   // symbol+addend, absolute value (words, branch/jump targets)
    kSymHi,    // %hi(symbol+addend)
    kSymLo,    // %lo(symbol+addend)
  };
  Mode mode = Mode::kValue;
  int64_t value = 0;  // literal or addend
  std::string sym;

  static ImmRef literal(int64_t v) { return {Mode::kValue, v, {}}; }
  static ImmRef abs(std::string s, int64_t addend = 0) {
    return {Mode::kSymAbs, addend, std::move(s)};
  }
};

/// One parsed statement. Instructions, data and labels share the item list
/// so rewriting passes can splice around them.
struct AsmItem {
  enum class Type { kInstr, kWord, kByte, kZero, kAlign, kLabel };

  Type type = Type::kInstr;
  int line = 0;

  // kInstr
  InstrKind kind = InstrKind::kAddi;
  uint8_t rd = 0;
  uint8_t rs1 = 0;
  uint8_t rs2 = 0;
  ImmRef imm;

  // kWord reuses imm; kByte/kZero/kAlign use imm.value; kLabel uses imm.sym.

  uint32_t addr = 0;  // assigned by layout

  static AsmItem label(std::string name, int line = 0) {
    AsmItem it;
    it.type = Type::kLabel;
    it.imm.sym = std::move(name);
    it.line = line;
    return it;
  }
  static AsmItem instr(InstrKind k, uint8_t rd, uint8_t rs1, uint8_t rs2,
                       ImmRef imm, int line = 0) {
    AsmItem it;
    it.kind = k;
    it.rd = rd;
    it.rs1 = rs1;
    it.rs2 = rs2;
    it.imm = std::move(imm);
    it.line = line;
    return it;
  }
};

struct AsmSection {
  uint32_t base = 0;
  bool base_set = false;
  std::vector<AsmItem> items;
};

struct AsmProgram {
  AsmSection text;
  AsmSection data;
  std::string entry_symbol;
  std::set<std::string> nocfi;
  std::vector<AsmError> errors;

  bool ok() const { return errors.empty(); }
};

struct AsmOptions {
  /// x30/x31 are reserved for injected check sequences; source code using
  /// them is rejected unless this is set.
  bool allow_reserved_regs = false;
  uint32_t default_text_base = 0x80000000u;
};

struct AsmOutput {
  Image image;
  std::vector<AsmError> errors;

  bool ok() const { return errors.empty(); }
};

/// Source text to item lists. Syntax errors land in program.errors.
AsmProgram parse_asm(const std::string& source, const AsmOptions& opts = {});

/// Layout, symbol resolution and encoding. Fills item addresses in place
/// and produces the image (text and data segments plus metadata).
AsmOutput assemble_program(AsmProgram& prog, const AsmOptions& opts = {});

/// parse_asm followed by assemble_program.
AsmOutput assemble(const std::string& source, const AsmOptions& opts = {});

/// Image back to source. Reassembling the result reproduces the image
/// byte for byte. Words that have no canonical spelling come out as .word.
std::string disassemble(const Image& img);

}  // namespace r5

#endif  // R5_ASSEMBLER_HPP_
