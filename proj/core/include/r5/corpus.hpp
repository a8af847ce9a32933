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

#ifndef R5_CORPUS_HPP_
#define R5_CORPUS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace r5 {

/// Built-in guest programs, by name:
///   idle          endless loop, the monitoring zone's guest
///   cipher        fixed-round block mixer, control flow independent of input
///   cipher-mod1   same, three rounds fewer (call graph preserved)
///   cipher-mod2   same, an injected function called from the round loop
///   cipher-irq    cipher plus an interrupt handler routine
///   decoder       table-driven token decoder, control flow follows input
///   decoder-mod1  same, halved inner mixing budget
///   decoder-mod2  same, an injected function with a pipeline flush
///   recurse       doubly recursive fibonacci, call-heavy
///   dispatch      indirect calls through a function-pointer table
///   retvictim     long-running callee with a spilled return address
///   sstamper      pokes the monitor's shadow-stack memory from U-Mode
std::vector<std::string> corpus_names();

/// Assembly source positioned at the given bases. Throws std::out_of_range
/// for unknown names.
std::string corpus_source(const std::string& name,
                          uint32_t text_base = 0x80000000u,
                          uint32_t data_base = 0x80010000u);

/// Name of the program's input buffer symbol, or "" when it takes none.
std::string corpus_input_symbol(const std::string& name);

/// Deterministic input variants; index 0 reproduces the bytes already
/// assembled into the data section.
std::vector<uint8_t> corpus_input(const std::string& name, int index);

}  // namespace r5

#endif  // R5_CORPUS_HPP_
