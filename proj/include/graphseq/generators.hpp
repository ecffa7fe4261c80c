// Copyright 2026 The graphseq Authors.
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

#pragma once

// Seeded graph generators over the provenance schema: a fuzz family for
// codec properties and two structural families (stars, chains) for
// end-to-end synthesis.

#include <random>
#include <string>
#include <vector>

#include "graphseq/graph.hpp"
#include "graphseq/schema.hpp"

namespace graphseq {

struct FuzzParams {
  std::size_t max_nodes = 200;
  std::size_t max_edges = 400;
  std::size_t max_attr_chars = 24;
};

namespace detail {

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

template <typename T>
const T& choose(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[uniform(rng, 0, items.size() - 1)];
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

/// Free-form Unicode text. Never contains 0x1F.
inline std::string fuzz_text(std::mt19937_64& rng, std::size_t max_chars) {
  static const std::vector<std::string> kFragments = {
      "<bog>", "<eog>", "<node_3>", "%", "%1F", "<", ">", "\\", "/", "|", ":", "\"", " ", "\n", "\t",
      "\x7f", "\x01"};
  static const std::vector<char32_t> kWide = {0xE9, 0x4E2D, 0x6587, 0x1F600, 0x0416, 0x3042, 0xFFFD,
                                              0x2028, 0x10FFFF};
  std::string s;
  const std::size_t n = uniform(rng, 0, max_chars);
  for (std::size_t i = 0; i < n; ++i) {
    switch (uniform(rng, 0, 9)) {
      case 0:
        s += choose(rng, kFragments);
        break;
      case 1:
        append_utf8(s, choose(rng, kWide));
        break;
      default:
        s.push_back(static_cast<char>(uniform(rng, 0x20, 0x7E)));
    }
  }
  return s;
}

inline std::string fuzz_windows_path(std::mt19937_64& rng, bool exe) {
  static const std::vector<std::string> kDirs = {"Windows", "System32", "Users", "alice", "Temp",
                                                 "Program Files", "AppData", "Local", "日本語"};
  static const std::vector<std::string> kFiles = {"report", "setup", "svchost", "data", "notes",
                                                  "cmd", "update"};
  static const std::vector<std::string> kExts = {".txt", ".dll", ".log", ".dat", ""};
  std::string s(1, static_cast<char>('A' + uniform(rng, 0, 25)));
  s += ":\\";
  for (std::size_t d = uniform(rng, 0, 3); d > 0; --d) s += choose(rng, kDirs) + "\\";
  s += choose(rng, kFiles);
  s += exe ? std::string(".exe") : choose(rng, kExts);
  return s;
}

inline std::string fuzz_address(std::mt19937_64& rng) {
  std::string s;
  for (int i = 0; i < 4; ++i) {
    if (i) s.push_back('.');
    s += std::to_string(uniform(rng, 0, 255));
  }
  return s + "|" + std::to_string(uniform(rng, 0, 65535));
}

}  // namespace detail

/// Random provenance graph: legal triples only, mixed timestamp coverage,
/// Unicode attributes, possibly isolated nodes, self-loops and parallel edges.
inline Graph fuzz_provenance_graph(const SchemaPtr& schema, std::mt19937_64& rng,
                                   const FuzzParams& p = {}) {
  using detail::uniform;
  Graph g(schema);
  const auto process = *schema->find_node_type("Process");
  const auto socket = *schema->find_node_type("Socket");
  const std::size_t n = uniform(rng, 1, p.max_nodes);

  auto attr = [&](const std::string& kind) {
    // Mostly well-formed values, sometimes arbitrary text.
    if (uniform(rng, 0, 3) == 0) return detail::fuzz_text(rng, p.max_attr_chars);
    if (kind == "windows_executable") return detail::fuzz_windows_path(rng, true);
    if (kind == "windows_path") return detail::fuzz_windows_path(rng, false);
    if (kind == "ip_port") return detail::fuzz_address(rng);
    return detail::fuzz_text(rng, p.max_attr_chars / 2);
  };

  std::vector<std::size_t> processes;
  for (std::size_t i = 0; i < n; ++i) {
    const auto roll = uniform(rng, 0, 9);
    NodeTypeId t = i == 0 || roll < 4 ? process : roll < 8 ? *schema->find_node_type("File") : socket;
    std::vector<std::string> attrs;
    for (const auto& slot : schema->node_type(t).slots) attrs.push_back(attr(slot.kind));
    g.add_node("v" + std::to_string(uniform(rng, 0, 999)) + "_" + std::to_string(i), t, std::move(attrs));
    if (t == process) processes.push_back(i);
  }

  const auto stamping = uniform(rng, 0, 3);  // 0,1: all stamped; 2: none; 3: partial
  const std::size_t m = uniform(rng, 0, std::min(p.max_edges, 2 * n));
  for (std::size_t i = 0; i < m; ++i) {
    const auto src = detail::choose(rng, processes);
    const auto dst = uniform(rng, 0, n - 1);
    const auto dtype = g.node(dst).type;
    std::vector<EdgeTypeId> options;
    for (std::uint32_t k = 0; k < schema->edge_types().size(); ++k) {
      if (schema->is_legal(process, EdgeTypeId(k), dtype)) options.push_back(EdgeTypeId(k));
    }
    if (options.empty()) continue;
    const auto etype = detail::choose(rng, options);
    std::vector<std::string> attrs;
    const auto& slots = schema->edge_type(etype).slots;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      std::string v = s + 1 < slots.size() ? std::to_string(uniform(rng, 0, 1 << 20))
                                            : detail::fuzz_text(rng, p.max_attr_chars / 2);
      // The last slot may carry the separator byte.
      if (s + 1 == slots.size() && uniform(rng, 0, 15) == 0) v += "\x1f" + v;
      attrs.push_back(std::move(v));
    }
    std::optional<std::int64_t> ts;
    if (stamping <= 1 || (stamping == 3 && uniform(rng, 0, 1) == 0)) {
      ts = static_cast<std::int64_t>(uniform(rng, 0, 4 * m + 4));
    }
    g.add_edge(src, dst, etype, std::move(attrs), ts);
  }
  return g;
}

inline std::vector<Graph> fuzz_corpus(const SchemaPtr& schema, std::size_t count, std::uint64_t seed,
                                      const FuzzParams& p = {}) {
  std::mt19937_64 rng(seed);
  std::vector<Graph> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(fuzz_provenance_graph(schema, rng, p));
  return out;
}

enum class Family { kStar, kChain };

inline std::string_view to_string(Family f) { return f == Family::kStar ? "star" : "chain"; }

/// Star: one process writing 3..8 files. Chain: 4..9 processes, each creating
/// the next. Attributes come from small fixed pools of valid values; the
/// executable and file pools share no three-byte window, so a byte model
/// with a three-token context cannot splice one into the other.
inline Graph family_graph(const SchemaPtr& schema, Family family, std::mt19937_64& rng) {
  using detail::uniform;
  static const std::vector<std::string> kExes = {"C:\\Windows\\System32\\cmd.exe",
                                                 "C:\\Tools\\run.exe", "C:\\Apps\\sync.exe"};
  static const std::vector<std::string> kFiles = {"D:\\Users\\alice\\notes.txt", "D:\\Cache\\blob.dat",
                                                  "E:\\Logs\\app.log", "D:\\Data\\report.csv"};
  Graph g(schema);
  std::int64_t ts = 0;
  if (family == Family::kStar) {
    g.add_node("p0", "Process", {detail::choose(rng, kExes)});
    const auto leaves = uniform(rng, 3, 8);
    for (std::size_t i = 1; i <= leaves; ++i) {
      g.add_node("f" + std::to_string(i), "File", {detail::choose(rng, kFiles)});
      g.add_edge("p0", "f" + std::to_string(i), "WRITE", {}, ts++);
    }
  } else {
    const auto length = uniform(rng, 4, 9);
    for (std::size_t i = 0; i < length; ++i) {
      g.add_node("p" + std::to_string(i), "Process", {detail::choose(rng, kExes)});
      if (i > 0) g.add_edge("p" + std::to_string(i - 1), "p" + std::to_string(i), "CREATE", {}, ts++);
    }
  }
  return g;
}

}  // namespace graphseq
