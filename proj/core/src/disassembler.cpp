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
#include <map>
#include <set>
#include <sstream>

#include "r5/assembler.hpp"

namespace r5 {

namespace {

uint32_t word_at(const Segment& seg, uint32_t off) {
  return uint32_t{seg.bytes[off]} | (uint32_t{seg.bytes[off + 1]} << 8) |
         (uint32_t{seg.bytes[off + 2]} << 16) |
         (uint32_t{seg.bytes[off + 3]} << 24);
}

std::string hex(uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

std::string local_label(uint32_t addr) {
  char buf[16];
  std::snprintf(buf, sizeof buf, ".L%08x", addr);
  return buf;
}

/// fence.i words with nonzero reserved fields have no canonical spelling.
bool has_text_form(const Instruction& in) {
  if (in.kind == InstrKind::kFenceI)
    return in.rd == 0 && in.rs1 == 0 && in.imm == 0;
  return true;
}

std::string reg_name(uint8_t r) { return "x" + std::to_string(r); }

}  // namespace

std::string disassemble(const Image& img) {
  const Segment* text = nullptr;
  const Segment* data = nullptr;
  for (const Segment& s : img.segments) {
    if (s.executable()) {
      if (text) throw ImageError("multiple executable segments");
      text = &s;
    } else {
      if (data) throw ImageError("multiple data segments");
      data = &s;
    }
  }

  // Names for every known address, functions preferred over data labels.
  std::map<uint32_t, std::string> names;
  for (const auto& [name, addr] : img.meta.symbols)
    names.emplace(addr, name);
  for (const FunctionInfo& f : img.meta.functions) names[f.addr] = f.name;
  std::set<std::string> func_names;
  for (const FunctionInfo& f : img.meta.functions)
    func_names.insert(f.name);

  std::ostringstream os;

  if (text) {
    uint32_t tbase = text->load_addr;
    uint32_t tsize = static_cast<uint32_t>(text->bytes.size());

    // Branch and jump targets that need labels.
    std::set<uint32_t> targets;
    for (uint32_t off = 0; off + 4 <= tsize; off += 4) {
      auto dec = decode(word_at(*text, off));
      if (!dec) continue;
      if (dec->kind == InstrKind::kJal || is_cond_branch(dec->kind)) {
        uint32_t tgt = tbase + off + static_cast<uint32_t>(dec->imm);
        if (tgt >= tbase && tgt < tbase + tsize && (tgt & 3) == 0)
          targets.insert(tgt);
      }
    }
    for (uint32_t tgt : targets)
      if (!names.count(tgt)) names[tgt] = local_label(tgt);

    if (!names.count(img.entry_pc) && img.entry_pc >= tbase &&
        img.entry_pc < tbase + tsize)
      names[img.entry_pc] = "_start";
    if (names.count(img.entry_pc)) {
      os << ".entry " << names[img.entry_pc] << "\n";
      func_names.insert(names[img.entry_pc]);
    }

    os << ".text " << hex(tbase) << "\n";
    for (uint32_t off = 0; off + 4 <= tsize; off += 4) {
      uint32_t addr = tbase + off;
      auto nm = names.find(addr);
      if (nm != names.end()) {
        if (nm->second[0] != '.') os << "\n";
        os << nm->second << ":\n";
      }
      uint32_t w = word_at(*text, off);
      auto dec = decode(w);
      if (!dec || !has_text_form(*dec)) {
        os << "  .word " << hex(w) << "\n";
        continue;
      }
      const Instruction& in = *dec;
      if (in.kind == InstrKind::kJal || is_cond_branch(in.kind)) {
        uint32_t tgt = addr + static_cast<uint32_t>(in.imm);
        auto t = names.find(tgt);
        bool in_seg = tgt >= tbase && tgt < tbase + tsize && (tgt & 3) == 0;
        if (in_seg && t != names.end()) {
          if (in.kind == InstrKind::kJal) {
            os << "  jal " << reg_name(in.rd) << ", " << t->second << "\n";
          } else {
            std::string s = to_string(in);
            os << "  " << s.substr(0, s.rfind(' ') + 1) << t->second << "\n";
          }
          continue;
        }
      }
      os << "  " << to_string(in) << "\n";
    }
    // Trailing bytes that do not fill a word.
    for (uint32_t off = tsize & ~3u; off < tsize; ++off)
      os << "  .byte " << static_cast<int>(text->bytes[off]) << "\n";
  }

  if (data) {
    uint32_t dbase = data->load_addr;
    uint32_t dsize = static_cast<uint32_t>(data->bytes.size());
    os << "\n.data " << hex(dbase) << "\n";
    // Value to symbol substitution keeps pointer tables symbolic.
    std::map<uint32_t, std::string> by_value;
    for (const auto& [addr, name] : names)
      if (!by_value.count(addr)) by_value[addr] = name;
    uint32_t off = 0;
    for (; off + 4 <= dsize; off += 4) {
      uint32_t addr = dbase + off;
      auto nm = names.find(addr);
      if (nm != names.end()) os << nm->second << ":\n";
      uint32_t w = word_at(*data, off);
      auto sym = by_value.find(w);
      if (sym != by_value.end() && func_names.count(sym->second))
        os << "  .word " << sym->second << "\n";
      else
        os << "  .word " << hex(w) << "\n";
    }
    for (; off < dsize; ++off) {
      uint32_t addr = dbase + off;
      auto nm = names.find(addr);
      if (nm != names.end()) os << nm->second << ":\n";
      os << "  .byte " << static_cast<int>(data->bytes[off]) << "\n";
    }
  }

  return os.str();
}

}  // namespace r5
