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

#ifndef R5_IMAGE_HPP_
#define R5_IMAGE_HPP_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace r5 {

struct Segment {
  static constexpr uint32_t kFlagR = 1;
  static constexpr uint32_t kFlagW = 2;
  static constexpr uint32_t kFlagX = 4;

  uint32_t load_addr = 0;
  uint32_t flags = 0;
  std::vector<uint8_t> bytes;

  bool executable() const { return flags & kFlagX; }
  bool writable() const { return flags & kFlagW; }
};

struct FunctionInfo {
  std::string name;
  uint32_t addr = 0;
  uint32_t size = 0;
  bool leaf = false;
  bool has_label = false;
  uint32_t label_id = 0;
};

struct SitePolicy {
  uint32_t site_addr = 0;
  std::string func;
  int index = 0;  // n-th indirect site within func
  std::vector<std::string> allowed;  // target function names
  std::string resolved_by;           // "hint", "table" or "all-labeled"
};

struct ImageMeta {
  bool instrumented = false;
  std::map<std::string, uint32_t> symbols;
  std::vector<FunctionInfo> functions;
  std::vector<SitePolicy> sites;

  bool empty() const {
    return !instrumented && symbols.empty() && functions.empty() &&
           sites.empty();
  }
};

struct Image {
  static constexpr uint32_t kVersion = 1;

  uint32_t entry_pc = 0;
  std::vector<Segment> segments;
  ImageMeta meta;

  uint64_t total_size() const {
    uint64_t n = 0;
    for (const Segment& s : segments) n += s.bytes.size();
    return n;
  }
};

class ImageError : public std::runtime_error {
 public:
  explicit ImageError(const std::string& what) : std::runtime_error(what) {}
};

/// Container layout, all fields little-endian:
///   "R5IM" | u32 version | u32 entry_pc | u32 segment_count
///   then per segment: u32 load_addr | u32 size | u32 flags
///   then the segment payloads in header order.
std::vector<uint8_t> serialize_image(const Image& img);

/// Throws ImageError on truncated or malformed input.
Image parse_image(const std::vector<uint8_t>& bytes);

/// Writes path, plus a "<path>.json" metadata sidecar when meta is nonempty.
void save_image(const Image& img, const std::string& path);

/// Reads path and, when present, its metadata sidecar.
Image load_image(const std::string& path);

std::string meta_to_json(const ImageMeta& meta);
ImageMeta meta_from_json(const std::string& text);

}  // namespace r5

#endif  // R5_IMAGE_HPP_
