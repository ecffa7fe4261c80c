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

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "graphseq/graphseq.hpp"

namespace graphseq::testing {

inline const SchemaPtr& schema() {
  static const SchemaPtr s = provenance_schema();
  return s;
}

inline const VocabPtr& vocab() {
  static const VocabPtr v = build_vocab(schema());
  return v;
}

inline std::vector<TokenId> ids(const Vocabulary& v, std::initializer_list<Token> tokens) {
  std::vector<TokenId> out;
  for (auto t : tokens) out.push_back(v.id(t));
  return out;
}

inline void append_text(const Vocabulary& v, std::vector<TokenId>& out, std::string_view s) {
  for (auto id : v.tokenize_text(s)) out.push_back(id);
}

inline NodeTypeId ntype(std::string_view name) { return *schema()->find_node_type(name); }
inline EdgeTypeId etype(std::string_view name) { return *schema()->find_edge_type(name); }

/// p0(Process, name "x") -WRITE-> f0(File, path "/a").
inline Graph one_edge_graph() {
  Graph g(schema());
  g.add_node("p0", "Process", {"x"});
  g.add_node("f0", "File", {"/a"});
  g.add_edge("p0", "f0", "WRITE");
  return g;
}

/// Five legal edges with valid attributes.
inline Graph five_edge_sample() {
  Graph g(schema());
  g.add_node("p0", "Process", {"C:\\Windows\\System32\\cmd.exe"});
  g.add_node("p1", "Process", {"C:\\Tools\\run.exe"});
  g.add_node("f0", "File", {"C:\\Users\\alice\\notes.txt"});
  g.add_node("f1", "File", {"C:\\Temp\\cache.dat"});
  g.add_node("s0", "Socket", {"10.0.0.5|443"});
  g.add_edge("p0", "p1", "CREATE", {}, 1);
  g.add_edge("p1", "f0", "READ", {}, 2);
  g.add_edge("p1", "f1", "WRITE", {}, 3);
  g.add_edge("p1", "s0", "SEND", {"512", "PSH"}, 4);
  g.add_edge("p0", "f1", "EXECUTE", {}, 5);
  return g;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace graphseq::testing
