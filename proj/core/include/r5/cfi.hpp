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

#ifndef R5_CFI_HPP_
#define R5_CFI_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "r5/abi.hpp"
#include "r5/assembler.hpp"

namespace r5 {

struct CallGraphNode {
  std::string name;
  std::vector<std::string> callees;
  bool has_indirect = false;
  bool leaf = true;
  bool address_taken = false;
};

struct CallGraph {
  std::map<std::string, CallGraphNode> nodes;
  std::vector<std::string> order;  // definition order
};

CallGraph build_call_graph(const AsmProgram& prog);

struct CfiOptions {
  /// "func#N" (N-th indirect site inside func, 0-based) to the functions
  /// that site may reach. Sites without a hint fall back to pointer-table
  /// analysis, then to every labeled function.
  std::map<std::string, std::vector<std::string>> hints;
};

struct CfiSummary {
  int labels_added = 0;
  int sites_instrumented = 0;
  int return_saves = 0;
  int return_loads = 0;
};

struct CfiResult {
  AsmProgram prog;
  Image image;
  std::vector<AsmError> errors;
  CfiSummary summary;

  bool ok() const { return errors.empty(); }
};

/// The whole pipeline: call graph, label assignment, check-sequence
/// injection, return rewriting, reassembly. The input program is not
/// modified.
CfiResult rewrite_cfi(const AsmProgram& input, const CfiOptions& opts = {});

/// Deterministic 20-bit label id for a name, probing past collisions
/// with the ids already in use. Never returns zero.
uint32_t assign_label_id(const std::string& name,
                         const std::set<uint32_t>& used);

std::string site_key(const std::string& func, int index);

}  // namespace r5

#endif  // R5_CFI_HPP_
