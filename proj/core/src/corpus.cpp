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

#include "r5/corpus.hpp"

#include <cstdio>
#include <stdexcept>

namespace r5 {

namespace {

std::string replace_once(const std::string& hay, const std::string& from,
                         const std::string& to) {
  size_t pos = hay.find(from);
  if (pos == std::string::npos)
    throw std::logic_error("corpus anchor missing: " + from);
  if (hay.find(from, pos + 1) != std::string::npos)
    throw std::logic_error("corpus anchor ambiguous: " + from);
  std::string out = hay;
  out.replace(pos, from.size(), to);
  return out;
}

std::string byte_lines(const std::vector<uint8_t>& bytes) {
  std::string out;
  for (size_t i = 0; i < bytes.size(); ++i) {
    if (i % 16 == 0) out += "  .byte ";
    char buf[8];
    std::snprintf(buf, sizeof buf, "%d", bytes[i]);
    out += buf;
    out += (i % 16 == 15 || i + 1 == bytes.size()) ? "\n" : ", ";
  }
  return out;
}

std::string word_lines(const std::vector<uint32_t>& words) {
  std::string out;
  for (uint32_t w : words) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "  .word 0x%08x\n", w);
    out += buf;
  }
  return out;
}

std::vector<uint8_t> cipher_message(int index) {
  std::vector<uint8_t> bytes(64);
  if (index == 0) {
    for (size_t i = 0; i < bytes.size(); ++i)
      bytes[i] = static_cast<uint8_t>(17 * i + 3);
  } else {
    uint32_t mul = 2 * static_cast<uint32_t>(index) + 5;
    uint32_t add = 31 * static_cast<uint32_t>(index) + 7;
    for (size_t i = 0; i < bytes.size(); ++i)
      bytes[i] = static_cast<uint8_t>(mul * i + add);
  }
  return bytes;
}

// Exactly this many 0xFF flush tokens per input, placed deterministically.
constexpr int kFlushCounts[8] = {2, 0, 5, 1, 6, 3, 7, 4};

std::vector<uint8_t> decoder_stream(int index) {
  std::vector<uint8_t> bytes(192);
  uint32_t mul = 37 + 2 * static_cast<uint32_t>(index);
  uint32_t add = 11 + 13 * static_cast<uint32_t>(index);
  for (size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<uint8_t>(mul * i + add);
    if (bytes[i] == 0xFF) bytes[i] = 0xFE;
  }
  int flushes = kFlushCounts[index & 7];
  for (int j = 0; j < flushes; ++j) bytes[20 + 9 * j] = 0xFF;
  return bytes;
}

std::vector<uint32_t> decoder_table() {
  std::vector<uint32_t> words(64);
  for (size_t i = 0; i < words.size(); ++i)
    words[i] = static_cast<uint32_t>(i) * 2654435761u;
  return words;
}

const char kStackData[] =
    "__stack:\n"
    "  .zero 1024\n"
    "__stack_top:\n";

std::string cipher_source() {
  std::string text = R"(main:
  la x2, __stack_top
  jal x1, cipher_run
  ebreak

cipher_run:
  addi x2, x2, -16
  sw x1, 12(x2)
  sw x8, 8(x2)
  sw x9, 4(x2)
  la x8, message
  addi x9, x0, 8
.Lblk:
  add x10, x8, x0
  jal x1, encrypt_block
  addi x8, x8, 8
  addi x9, x9, -1
  bne x9, x0, .Lblk
# stream the mixed message out
  la x8, message
  addi x9, x0, 16
  lui x5, 0x10000
.Ldump:
  lw x6, 0(x8)
  sw x6, 0(x5)
  addi x8, x8, 4
  addi x9, x9, -1
  bne x9, x0, .Ldump
  lw x1, 12(x2)
  lw x8, 8(x2)
  lw x9, 4(x2)
  addi x2, x2, 16
  ret

encrypt_block:
  addi x2, x2, -16
  sw x1, 12(x2)
  lw x11, 0(x10)
  lw x12, 4(x10)
  la x13, key
  lw x14, 0(x13)
  lw x15, 4(x13)
  lw x28, 8(x13)
  lw x29, 12(x13)
  add x5, x0, x0
  lui x6, 0x9e378
  addi x6, x6, -1607
  addi x21, x0, 16
.Lround:
  add x5, x5, x6
  slli x7, x12, 4
  add x7, x7, x14
  add x16, x12, x5
  xor x7, x7, x16
  srli x16, x12, 5
  add x16, x16, x15
  xor x7, x7, x16
  add x11, x11, x7
  slli x7, x11, 4
  add x7, x7, x28
  add x16, x11, x5
  xor x7, x7, x16
  srli x16, x11, 5
  add x16, x16, x29
  xor x7, x7, x16
  add x12, x12, x7
  addi x21, x21, -1
  bne x21, x0, .Lround
  sw x11, 0(x10)
  sw x12, 4(x10)
  lw x1, 12(x2)
  addi x2, x2, 16
  ret
)";
  std::string data = R"(key:
  .word 0xa56babcd
  .word 0x00112233
  .word 0x44556677
  .word 0x8899aabb
message:
)";
  data += byte_lines(cipher_message(0));
  data += kStackData;
  return text + "@DATA@" + data;
}

const char kCipherImplant[] = R"(
implant:
  addi x2, x2, -16
  sw x1, 12(x2)
  jal x1, implant_a
  jal x1, implant_b
  lw x1, 12(x2)
  addi x2, x2, 16
  ret

implant_a:
  xor x16, x16, x5
  ret

implant_b:
  add x16, x16, x6
  ret
)";

const char kIrqRoutine[] = R"(
irq_handler:
  addi x5, x0, 12
.Lih:
  addi x5, x5, -1
  bne x5, x0, .Lih
  ret
)";

std::string decoder_source() {
  std::string text = R"(main:
  la x2, __stack_top
  jal x1, decode_run
  ebreak

decode_run:
  addi x2, x2, -16
  sw x1, 12(x2)
  sw x8, 8(x2)
  sw x9, 4(x2)
  la x8, stream
  addi x9, x0, 192
  add x11, x0, x0
  add x13, x0, x0
  lui x15, 0x10000
.Ltok:
  lbu x5, 0(x8)
  srli x6, x5, 6
  addi x7, x0, 1
  beq x6, x7, .Lc1
  addi x7, x0, 2
  beq x6, x7, .Lc2
  addi x7, x0, 3
  beq x6, x7, .Lc3
  add x11, x11, x5
  jal x0, .Lmark
.Lc1:
  andi x10, x5, 15
  addi x10, x10, 1
  jal x1, mix
  jal x0, .Lmark
.Lc2:
  andi x6, x5, 63
  slli x6, x6, 2
  la x7, table
  add x7, x7, x6
  lw x6, 0(x7)
  xor x11, x11, x6
  jal x0, .Lmark
.Lc3:
  andi x6, x5, 31
  sll x7, x11, x6
  addi x12, x0, 32
  sub x12, x12, x6
  srl x12, x11, x12
  or x11, x7, x12
.Lmark:
# 0xff tokens flush the pipeline and emit
  addi x7, x0, 255
  bne x5, x7, .Lnoflush
  fence.i
  sw x11, 4(x15)
.Lnoflush:
  addi x13, x13, 1
  andi x6, x13, 31
  bne x6, x0, .Lnoout
  sw x11, 0(x15)
.Lnoout:
  addi x8, x8, 1
  addi x9, x9, -1
  bne x9, x0, .Ltok
  sw x11, 0(x15)
  lw x1, 12(x2)
  lw x8, 8(x2)
  lw x9, 4(x2)
  addi x2, x2, 16
  ret

mix:
  addi x2, x2, -16
  sw x1, 12(x2)
.Lmix:
  jal x1, rot
  xor x11, x11, x10
  addi x10, x10, -1
  bne x10, x0, .Lmix
  lw x1, 12(x2)
  addi x2, x2, 16
  ret

rot:
  slli x6, x11, 7
  srli x7, x11, 25
  or x11, x6, x7
  lui x6, 0x9908b
  addi x6, x6, 223
  add x11, x11, x6
  ret
)";
  std::string data = "table:\n" + word_lines(decoder_table()) + "stream:\n" +
                     byte_lines(decoder_stream(0)) + kStackData;
  return text + "@DATA@" + data;
}

const char kDecoderImplant[] = R"(
implant:
  addi x2, x2, -16
  sw x1, 12(x2)
  jal x1, implant_a
  jal x1, implant_b
  fence.i
  lw x1, 12(x2)
  addi x2, x2, 16
  ret

implant_a:
  slli x6, x11, 1
  xor x11, x11, x6
  ret

implant_b:
  addi x11, x11, 57
  ret
)";

std::string recurse_source() {
  std::string text = R"(main:
  la x2, __stack_top
  addi x10, x0, 15
  jal x1, fib
  lui x5, 0x10000
  sw x10, 0(x5)
  ebreak

fib:
  addi x5, x0, 2
  blt x10, x5, .Lleaf
  addi x2, x2, -16
  sw x1, 12(x2)
  sw x8, 8(x2)
  sw x9, 4(x2)
  add x8, x10, x0
  addi x10, x8, -1
  jal x1, fib
  add x9, x10, x0
  addi x10, x8, -2
  jal x1, fib
  add x10, x10, x9
  lw x1, 12(x2)
  lw x8, 8(x2)
  lw x9, 4(x2)
  addi x2, x2, 16
  ret
.Lleaf:
  ret
)";
  return text + "@DATA@" + kStackData;
}

std::string dispatch_source() {
  std::string text = R"(main:
  la x2, __stack_top
  jal x1, run_table
  ebreak

run_table:
  addi x2, x2, -16
  sw x1, 12(x2)
  sw x8, 8(x2)
  sw x9, 4(x2)
  la x8, handlers
  addi x9, x0, 4
.Lnext:
  lw x5, 0(x8)
  jalr x1, x5, 0
  addi x8, x8, 4
  addi x9, x9, -1
  bne x9, x0, .Lnext
  lw x1, 12(x2)
  lw x8, 8(x2)
  lw x9, 4(x2)
  addi x2, x2, 16
  ret

func1:
  addi x6, x0, 24
  addi x5, x0, 161
.Lf1:
  slli x7, x5, 1
  xor x5, x5, x7
  addi x5, x5, 7
  addi x6, x6, -1
  bne x6, x0, .Lf1
  lui x7, 0x10000
  sw x5, 16(x7)
  ret

func2:
  addi x6, x0, 24
  addi x5, x0, 162
.Lf2:
  srli x7, x5, 1
  add x5, x5, x7
  xori x5, x5, 99
  addi x6, x6, -1
  bne x6, x0, .Lf2
  lui x7, 0x10000
  sw x5, 20(x7)
  ret

func3:
  addi x6, x0, 24
  addi x5, x0, 163
.Lf3:
  add x7, x5, x6
  xor x5, x5, x7
  slli x7, x6, 2
  add x5, x5, x7
  addi x6, x6, -1
  bne x6, x0, .Lf3
  lui x7, 0x10000
  sw x5, 24(x7)
  ret

evil:
  addi x5, x0, 1110
  lui x7, 0x10000
  sw x5, 28(x7)
  ebreak
)";
  std::string data = R"(handlers:
  .word func1
  .word func2
  .word func3
  .word func1
)";
  data += kStackData;
  return text + "@DATA@" + data;
}

std::string retvictim_source() {
  std::string text = R"(main:
  la x2, __stack_top
  jal x1, victim
  lui x5, 0x10000
  addi x6, x0, 511
  sw x6, 0(x5)
  ebreak

victim:
  addi x2, x2, -16
  sw x1, 12(x2)
  jal x1, busy
  lw x1, 12(x2)
  addi x2, x2, 16
  ret

busy:
  addi x5, x0, 600
.Lspin:
  addi x5, x5, -1
  bne x5, x0, .Lspin
  lui x6, 0x10000
  addi x7, x0, 345
  sw x7, 4(x6)
  ret

gadget:
  lui x5, 0x10000
  addi x6, x0, 666
  sw x6, 8(x5)
  ebreak
)";
  return text + "@DATA@" + kStackData;
}

std::string sstamper_source() {
  std::string text = R"(main:
  la x2, __stack_top
  jal x1, setup
  lui x5, 0x10000
  addi x6, x0, 77
  sw x6, 0(x5)
  ebreak

setup:
  addi x2, x2, -16
  sw x1, 12(x2)
  jal x1, tamper
  lw x1, 12(x2)
  addi x2, x2, 16
  ret

tamper:
  lui x6, 0x80f01
  lw x5, 0(x6)
  sw x5, 4(x6)
  ret
)";
  return text + "@DATA@" + kStackData;
}

std::string idle_source() {
  return "main:\n  jal x0, main\n@DATA@";
}

std::string body_for(const std::string& name) {
  if (name == "idle") return idle_source();
  if (name == "cipher") return cipher_source();
  if (name == "cipher-mod1")
    return replace_once(cipher_source(), "addi x21, x0, 16",
                        "addi x21, x0, 13");
  if (name == "cipher-mod2") {
    std::string s = replace_once(cipher_source(), "  add x12, x12, x7\n",
                                 "  add x12, x12, x7\n  jal x1, implant\n");
    return replace_once(s, "@DATA@", std::string(kCipherImplant) + "@DATA@");
  }
  if (name == "cipher-irq")
    return replace_once(cipher_source(), "@DATA@",
                        std::string(kIrqRoutine) + "@DATA@");
  if (name == "decoder") return decoder_source();
  if (name == "decoder-mod1")
    return replace_once(decoder_source(), "andi x10, x5, 15",
                        "andi x10, x5, 7");
  if (name == "decoder-mod2") {
    std::string s = replace_once(decoder_source(), "  lbu x5, 0(x8)\n",
                                 "  lbu x5, 0(x8)\n  jal x1, implant\n");
    return replace_once(s, "@DATA@", std::string(kDecoderImplant) + "@DATA@");
  }
  if (name == "recurse") return recurse_source();
  if (name == "dispatch") return dispatch_source();
  if (name == "retvictim") return retvictim_source();
  if (name == "sstamper") return sstamper_source();
  throw std::out_of_range("no corpus program named " + name);
}

}  // namespace

std::vector<std::string> corpus_names() {
  return {"idle",         "cipher",       "cipher-mod1", "cipher-mod2",
          "cipher-irq",   "decoder",      "decoder-mod1", "decoder-mod2",
          "recurse",      "dispatch",     "retvictim",   "sstamper"};
}

std::string corpus_source(const std::string& name, uint32_t text_base,
                          uint32_t data_base) {
  std::string body = body_for(name);
  char head[48];
  std::snprintf(head, sizeof head, "  .text 0x%08x\n  .entry main\n\n",
                text_base);
  size_t mark = body.find("@DATA@");
  std::string text = body.substr(0, mark);
  std::string data = body.substr(mark + 6);
  std::string out = std::string(head) + text;
  if (!data.empty()) {
    char dhead[32];
    std::snprintf(dhead, sizeof dhead, "\n  .data 0x%08x\n", data_base);
    out += dhead;
    out += data;
  }
  return out;
}

std::string corpus_input_symbol(const std::string& name) {
  if (name.rfind("cipher", 0) == 0) return "message";
  if (name.rfind("decoder", 0) == 0) return "stream";
  return "";
}

std::vector<uint8_t> corpus_input(const std::string& name, int index) {
  if (name.rfind("cipher", 0) == 0) return cipher_message(index);
  if (name.rfind("decoder", 0) == 0) return decoder_stream(index);
  return {};
}

}  // namespace r5
