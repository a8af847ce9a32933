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

#include "r5/image.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace r5 {

namespace {

using ordered_json = nlohmann::ordered_json;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

uint32_t get_u32(const std::vector<uint8_t>& in, size_t off) {
  return uint32_t{in[off]} | (uint32_t{in[off + 1]} << 8) |
         (uint32_t{in[off + 2]} << 16) | (uint32_t{in[off + 3]} << 24);
}

}  // namespace

std::vector<uint8_t> serialize_image(const Image& img) {
  std::vector<uint8_t> out;
  out.push_back('R');
  out.push_back('5');
  out.push_back('I');
  out.push_back('M');
  put_u32(out, Image::kVersion);
  put_u32(out, img.entry_pc);
  put_u32(out, static_cast<uint32_t>(img.segments.size()));
  for (const Segment& s : img.segments) {
    put_u32(out, s.load_addr);
    put_u32(out, static_cast<uint32_t>(s.bytes.size()));
    put_u32(out, s.flags);
  }
  for (const Segment& s : img.segments)
    out.insert(out.end(), s.bytes.begin(), s.bytes.end());
  return out;
}

Image parse_image(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 16) throw ImageError("image too short");
  if (bytes[0] != 'R' || bytes[1] != '5' || bytes[2] != 'I' ||
      bytes[3] != 'M')
    throw ImageError("bad magic");
  uint32_t version = get_u32(bytes, 4);
  if (version != Image::kVersion)
    throw ImageError("unsupported version " + std::to_string(version));
  Image img;
  img.entry_pc = get_u32(bytes, 8);
  uint32_t count = get_u32(bytes, 12);
  if (count > 64) throw ImageError("segment count out of range");
  size_t off = 16;
  if (bytes.size() < off + size_t{count} * 12)
    throw ImageError("truncated segment table");
  std::vector<std::pair<uint32_t, uint32_t>> headers;  // size, flags pairs
  img.segments.resize(count);
  for (uint32_t k = 0; k < count; ++k) {
    img.segments[k].load_addr = get_u32(bytes, off);
    uint32_t size = get_u32(bytes, off + 4);
    img.segments[k].flags = get_u32(bytes, off + 8);
    headers.push_back({size, 0});
    off += 12;
  }
  for (uint32_t k = 0; k < count; ++k) {
    uint32_t size = headers[k].first;
    if (bytes.size() < off + size) throw ImageError("truncated payload");
    img.segments[k].bytes.assign(bytes.begin() + off,
                                 bytes.begin() + off + size);
    off += size;
  }
  if (off != bytes.size()) throw ImageError("trailing bytes");
  return img;
}

std::string meta_to_json(const ImageMeta& meta) {
  ordered_json j;
  j["instrumented"] = meta.instrumented;
  ordered_json syms = ordered_json::object();
  for (const auto& [name, addr] : meta.symbols) syms[name] = addr;
  j["symbols"] = syms;
  ordered_json funcs = ordered_json::array();
  for (const FunctionInfo& f : meta.functions) {
    ordered_json o;
    o["name"] = f.name;
    o["addr"] = f.addr;
    o["size"] = f.size;
    o["leaf"] = f.leaf;
    if (f.has_label) o["label"] = f.label_id;
    funcs.push_back(o);
  }
  j["functions"] = funcs;
  ordered_json sites = ordered_json::array();
  for (const SitePolicy& s : meta.sites) {
    ordered_json o;
    o["addr"] = s.site_addr;
    o["func"] = s.func;
    o["index"] = s.index;
    o["allowed"] = s.allowed;
    o["resolved_by"] = s.resolved_by;
    sites.push_back(o);
  }
  j["sites"] = sites;
  return j.dump(2) + "\n";
}

ImageMeta meta_from_json(const std::string& text) {
  ImageMeta meta;
  ordered_json j = ordered_json::parse(text);
  meta.instrumented = j.value("instrumented", false);
  if (j.contains("symbols"))
    for (auto& [name, addr] : j["symbols"].items())
      meta.symbols[name] = addr.get<uint32_t>();
  if (j.contains("functions"))
    for (auto& o : j["functions"]) {
      FunctionInfo f;
      f.name = o["name"].get<std::string>();
      f.addr = o["addr"].get<uint32_t>();
      f.size = o["size"].get<uint32_t>();
      f.leaf = o.value("leaf", false);
      if (o.contains("label")) {
        f.has_label = true;
        f.label_id = o["label"].get<uint32_t>();
      }
      meta.functions.push_back(f);
    }
  if (j.contains("sites"))
    for (auto& o : j["sites"]) {
      SitePolicy s;
      s.site_addr = o["addr"].get<uint32_t>();
      s.func = o["func"].get<std::string>();
      s.index = o.value("index", 0);
      for (auto& t : o["allowed"]) s.allowed.push_back(t.get<std::string>());
      s.resolved_by = o.value("resolved_by", "");
      meta.sites.push_back(s);
    }
  return meta;
}

void save_image(const Image& img, const std::string& path) {
  std::vector<uint8_t> bytes = serialize_image(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ImageError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ImageError("write failed: " + path);
  if (!img.meta.empty()) {
    std::ofstream m(path + ".json", std::ios::binary);
    if (!m) throw ImageError("cannot open " + path + ".json for writing");
    m << meta_to_json(img.meta);
  }
}

Image load_image(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ImageError("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  Image img = parse_image(bytes);
  std::ifstream m(path + ".json", std::ios::binary);
  if (m) {
    std::string text((std::istreambuf_iterator<char>(m)),
                     std::istreambuf_iterator<char>());
    img.meta = meta_from_json(text);
  }
  return img;
}

}  // namespace r5
