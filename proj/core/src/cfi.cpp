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

#include "r5/cfi.hpp"

#include <algorithm>

namespace r5 {

namespace {

struct FuncSpan {
  std::string name;
  size_t begin = 0;  // index of the label item
  size_t end = 0;    // one past the last item
};

std::vector<FuncSpan> function_spans(const AsmProgram& prog) {
  std::vector<FuncSpan> spans;
  const auto& items = prog.text.items;
  for (size_t k = 0; k < items.size(); ++k) {
    const AsmItem& it = items[k];
    if (it.type != AsmItem::Type::kLabel || it.imm.sym.empty() ||
        it.imm.sym[0] == '.')
      continue;
    if (!spans.empty()) spans.back().end = k;
    spans.push_back({it.imm.sym, k, items.size()});
  }
  return spans;
}

bool is_return(const AsmItem& it) {
  return it.type == AsmItem::Type::kInstr && it.kind == InstrKind::kJalr &&
         it.rd == 0 && it.rs1 == 1 && it.imm.mode == ImmRef::Mode::kValue &&
         it.imm.value == 0;
}

bool is_indirect_site(const AsmItem& it) {
  return it.type == AsmItem::Type::kInstr && it.kind == InstrKind::kJalr &&
         !is_return(it);
}

}  // namespace

CallGraph build_call_graph(const AsmProgram& prog) {
  CallGraph cg;
  std::vector<FuncSpan> spans = function_spans(prog);
  for (const FuncSpan& s : spans) {
    CallGraphNode node;
    node.name = s.name;
    cg.order.push_back(s.name);
    cg.nodes[s.name] = node;
  }

  for (const FuncSpan& s : spans) {
    CallGraphNode& node = cg.nodes[s.name];
    for (size_t k = s.begin + 1; k < s.end; ++k) {
      const AsmItem& it = prog.text.items[k];
      if (it.type != AsmItem::Type::kInstr) continue;
      if (it.kind == InstrKind::kJal &&
          it.imm.mode == ImmRef::Mode::kSymAbs &&
          cg.nodes.count(it.imm.sym)) {
        if (std::find(node.callees.begin(), node.callees.end(), it.imm.sym) ==
            node.callees.end())
          node.callees.push_back(it.imm.sym);
        if (it.rd == 1) node.leaf = false;
      }
      if (is_indirect_site(it)) {
        node.has_indirect = true;
        node.leaf = false;
      }
    }
  }

  // A function is address-taken when anything outside direct jumps and
  // branches names it: data words, la expansions, lone %hi/%lo.
  auto scan_refs = [&](const std::vector<AsmItem>& items) {
    for (const AsmItem& it : items) {
      if (it.type == AsmItem::Type::kWord &&
          it.imm.mode == ImmRef::Mode::kSymAbs &&
          cg.nodes.count(it.imm.sym)) {
        cg.nodes[it.imm.sym].address_taken = true;
      }
      if (it.type != AsmItem::Type::kInstr) continue;
      if (it.kind == InstrKind::kJal || is_cond_branch(it.kind)) continue;
      if (it.imm.sym.empty()) continue;
      if (cg.nodes.count(it.imm.sym))
        cg.nodes[it.imm.sym].address_taken = true;
    }
  };
  scan_refs(prog.text.items);
  scan_refs(prog.data.items);
  return cg;
}

uint32_t assign_label_id(const std::string& name,
                         const std::set<uint32_t>& used) {
  uint32_t h = 2166136261u;
  for (char c : name) {
    h ^= static_cast<uint8_t>(c);
    h *= 16777619u;
  }
  uint32_t id = h & 0xFFFFFu;
  while (id == 0 || used.count(id)) id = (id + 1) & 0xFFFFFu;
  return id;
}

std::string site_key(const std::string& func, int index) {
  return func + "#" + std::to_string(index);
}

namespace {

// Pointer tables: a data label directly followed by .word entries naming
// functions. The first non-symbol word ends the table.
std::map<std::string, std::vector<std::string>> collect_tables(
    const AsmProgram& prog, const CallGraph& cg) {
  std::map<std::string, std::vector<std::string>> tables;
  std::string open;
  for (const AsmItem& it : prog.data.items) {
    switch (it.type) {
      case AsmItem::Type::kLabel:
        open = it.imm.sym;
        tables[open];
        break;
      case AsmItem::Type::kWord:
        if (!open.empty() && it.imm.mode == ImmRef::Mode::kSymAbs &&
            cg.nodes.count(it.imm.sym))
          tables[open].push_back(it.imm.sym);
        else
          open.clear();
        break;
      default:
        open.clear();
        break;
    }
  }
  for (auto it = tables.begin(); it != tables.end();) {
    if (it->second.empty())
      it = tables.erase(it);
    else
      ++it;
  }
  return tables;
}

// Backward slice stand-in: the site may target the (unique) pointer table
// whose address is materialized earlier in the same function.
std::optional<std::vector<std::string>> table_targets(
    const AsmProgram& prog, size_t func_begin, size_t site_pos,
    const std::map<std::string, std::vector<std::string>>& tables) {
  std::set<std::string> found;
  for (size_t k = func_begin; k < site_pos; ++k) {
    const AsmItem& it = prog.text.items[k];
    if (it.type != AsmItem::Type::kInstr) continue;
    if (it.imm.mode != ImmRef::Mode::kSymHi &&
        it.imm.mode != ImmRef::Mode::kSymLo)
      continue;
    if (tables.count(it.imm.sym)) found.insert(it.imm.sym);
  }
  if (found.size() != 1) return std::nullopt;
  std::vector<std::string> out;
  for (const std::string& t : tables.at(*found.begin()))
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  return out;
}

struct SiteRecord {
  std::string func;
  int index = 0;
  std::vector<std::string> allowed;
  std::string resolved_by;
  size_t item_pos = 0;  // index of the injected lw in the output items
};

}  // namespace

CfiResult rewrite_cfi(const AsmProgram& input, const CfiOptions& opts) {
  CfiResult res;
  res.prog = input;
  AsmProgram& prog = res.prog;

  auto fail = [&](AsmErrorKind kind, int line, const std::string& msg) {
    res.errors.push_back({kind, line, msg});
  };

  CallGraph cg = build_call_graph(prog);

  std::set<std::string> labeled;
  for (const std::string& name : cg.order)
    if (cg.nodes[name].address_taken && !prog.nocfi.count(name))
      labeled.insert(name);
  for (const auto& [key, targets] : opts.hints) {
    for (const std::string& t : targets) {
      if (!cg.nodes.count(t)) {
        fail(AsmErrorKind::kUndefinedSymbol, 0,
             "hint " + key + " names unknown function " + t);
        continue;
      }
      if (prog.nocfi.count(t)) {
        fail(AsmErrorKind::kBadOperand,
             0, "hint " + key + " targets nocfi function " + t);
        continue;
      }
      labeled.insert(t);
    }
  }
  if (!res.errors.empty()) return res;

  std::map<std::string, uint32_t> label_ids;
  std::set<uint32_t> used_ids;
  for (const std::string& name : cg.order) {
    if (!labeled.count(name)) continue;
    uint32_t id = assign_label_id(name, used_ids);
    used_ids.insert(id);
    label_ids[name] = id;
  }

  auto tables = collect_tables(prog, cg);
  std::vector<FuncSpan> spans = function_spans(prog);
  auto span_of = [&spans](size_t pos) -> const FuncSpan* {
    for (const FuncSpan& s : spans)
      if (pos >= s.begin && pos < s.end) return &s;
    return nullptr;
  };

  std::vector<AsmItem> out;
  out.reserve(prog.text.items.size() * 2);
  std::vector<SiteRecord> sites;
  std::map<std::string, int> site_counts;
  int cfi_label_counter = 0;
  std::string curfunc;
  bool cur_nocfi = false;
  bool cur_leaf = true;

  auto push_instr = [&out](InstrKind k, uint8_t rd, uint8_t rs1, uint8_t rs2,
                           ImmRef imm, int line) {
    out.push_back(AsmItem::instr(k, rd, rs1, rs2, std::move(imm), line));
  };

  for (size_t pos = 0; pos < prog.text.items.size(); ++pos) {
    const AsmItem& it = prog.text.items[pos];

    if (it.type == AsmItem::Type::kLabel && !it.imm.sym.empty() &&
        it.imm.sym[0] != '.') {
      curfunc = it.imm.sym;
      cur_nocfi = prog.nocfi.count(curfunc) > 0;
      cur_leaf = cg.nodes.count(curfunc) ? cg.nodes[curfunc].leaf : true;
      out.push_back(it);
      if (labeled.count(curfunc)) {
        push_instr(InstrKind::kLui, 0, 0, 0,
                   ImmRef::literal(label_ids[curfunc]), it.line);
        res.summary.labels_added++;
      }
      continue;
    }

    if (!cur_nocfi && is_indirect_site(it)) {
      if (it.imm.mode != ImmRef::Mode::kValue || it.imm.value != 0) {
        fail(AsmErrorKind::kBadOperand, it.line,
             "indirect jump with displacement cannot be checked");
        out.push_back(it);
        continue;
      }
      int index = site_counts[curfunc]++;
      std::string key = site_key(curfunc, index);

      std::vector<std::string> allowed;
      std::string resolved;
      if (auto h = opts.hints.find(key); h != opts.hints.end()) {
        allowed = h->second;
        resolved = "hint";
      } else {
        const FuncSpan* span = span_of(pos);
        auto tt = span ? table_targets(prog, span->begin, pos, tables)
                       : std::nullopt;
        if (tt) {
          allowed = *tt;
          resolved = "table";
        } else {
          for (const std::string& name : cg.order)
            if (labeled.count(name)) allowed.push_back(name);
          resolved = "all-labeled";
        }
      }
      if (allowed.empty()) {
        fail(AsmErrorKind::kBadOperand, it.line,
             "indirect site " + key + " has no resolvable targets");
        out.push_back(it);
        continue;
      }

      SiteRecord rec;
      rec.func = curfunc;
      rec.index = index;
      rec.allowed = allowed;
      rec.resolved_by = resolved;
      rec.item_pos = out.size();
      sites.push_back(rec);

      std::string ok_label =
          ".Lcfi" + std::to_string(cfi_label_counter++);
      push_instr(InstrKind::kLw, 31, it.rs1, 0, ImmRef::literal(0), it.line);
      for (const std::string& t : allowed) {
        uint32_t id = label_ids.at(t);
        push_instr(InstrKind::kLui, 30, 0, 0, ImmRef::literal(id), it.line);
        push_instr(InstrKind::kOri, 30, 30, 0,
                   ImmRef::literal(kLabelOpcodeBits), it.line);
        push_instr(InstrKind::kBeq, 0, 31, 30, ImmRef::abs(ok_label),
                   it.line);
      }
      push_instr(InstrKind::kAddi, kMonitorCallReg, 0, 0,
                 ImmRef::literal(static_cast<int>(MonitorCall::kCfiFail)),
                 it.line);
      push_instr(InstrKind::kEcall, 0, 0, 0, ImmRef::literal(0), it.line);
      out.push_back(AsmItem::label(ok_label, it.line));
      push_instr(InstrKind::kJalr, it.rd, it.rs1, 0, ImmRef::literal(4),
                 it.line);
      res.summary.sites_instrumented++;
      continue;
    }

    if (!cur_nocfi && !cur_leaf && it.type == AsmItem::Type::kInstr &&
        it.kind == InstrKind::kSw && it.rs2 == 1 && it.rs1 == 2) {
      push_instr(InstrKind::kAddi, kMonitorCallReg, 0, 0,
                 ImmRef::literal(static_cast<int>(MonitorCall::kSsPush)),
                 it.line);
      push_instr(InstrKind::kEcall, 0, 0, 0, ImmRef::literal(0), it.line);
      res.summary.return_saves++;
      continue;
    }
    if (!cur_nocfi && !cur_leaf && it.type == AsmItem::Type::kInstr &&
        it.kind == InstrKind::kLw && it.rd == 1 && it.rs1 == 2) {
      push_instr(InstrKind::kAddi, kMonitorCallReg, 0, 0,
                 ImmRef::literal(static_cast<int>(MonitorCall::kSsPop)),
                 it.line);
      push_instr(InstrKind::kEcall, 0, 0, 0, ImmRef::literal(0), it.line);
      res.summary.return_loads++;
      continue;
    }

    out.push_back(it);
  }

  prog.text.items = std::move(out);

  AsmOptions aopts;
  aopts.allow_reserved_regs = true;
  AsmOutput assembled = assemble_program(prog, aopts);
  res.errors.insert(res.errors.end(), assembled.errors.begin(),
                    assembled.errors.end());
  res.image = std::move(assembled.image);
  if (!res.errors.empty()) return res;

  ImageMeta& meta = res.image.meta;
  meta.instrumented = true;
  for (FunctionInfo& f : meta.functions) {
    auto node = cg.nodes.find(f.name);
    if (node != cg.nodes.end()) f.leaf = node->second.leaf;
    auto id = label_ids.find(f.name);
    if (id != label_ids.end()) {
      f.has_label = true;
      f.label_id = id->second;
    }
  }
  for (const SiteRecord& rec : sites) {
    SitePolicy sp;
    sp.site_addr = prog.text.items[rec.item_pos].addr;
    sp.func = rec.func;
    sp.index = rec.index;
    sp.allowed = rec.allowed;
    sp.resolved_by = rec.resolved_by;
    meta.sites.push_back(sp);
  }
  return res;
}

}  // namespace r5
