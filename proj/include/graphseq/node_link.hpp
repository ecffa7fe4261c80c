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

// Node-link JSON interchange.
//
//   {"directed": true, "multigraph": true,
//    "nodes": [{"id": str, "type": str, "attrs": {slot: str, ...}}, ...],
//    "links": [{"source": str, "target": str, "type": str, "ts": int?,
//               "attrs": {slot: str, ...}}, ...]}
//
// Output key order is exactly as above; attribute keys follow schema slot
// order, and "ts" is written only for timestamped edges. Output therefore
// depends only on the graph and is byte-deterministic. Invalid UTF-8 in
// attribute values is written as U+FFFD.

#include <string>
#include <string_view>

#include <json.hpp>

#include "graphseq/graph.hpp"

namespace graphseq {

namespace detail {

inline std::vector<std::string> read_attrs(const nlohmann::json& obj, const TypeDecl& decl,
                                           const std::string& owner) {
  std::vector<std::string> values(decl.slots.size());
  if (obj.is_null()) return values;
  if (!obj.is_object()) throw ParseError(owner + ": \"attrs\" must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    auto slot = std::find_if(decl.slots.begin(), decl.slots.end(),
                             [&](const AttrSlot& s) { return s.name == it.key(); });
    if (slot == decl.slots.end()) {
      throw SchemaError(owner + ": type " + decl.name + " has no attribute slot '" + it.key() + "'");
    }
    if (!it.value().is_string()) {
      throw ParseError(owner + ": attribute '" + it.key() + "' must be a string");
    }
    values[static_cast<std::size_t>(slot - decl.slots.begin())] = it.value().get<std::string>();
  }
  return values;
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const std::string& owner) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(owner + ": missing \"" + key + "\"");
  return *it;
}

inline std::string require_string(const nlohmann::json& obj, const char* key,
                                  const std::string& owner) {
  const auto& v = require(obj, key, owner);
  if (!v.is_string()) throw ParseError(owner + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace detail

inline Graph load_node_link(std::string_view bytes, SchemaPtr schema) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("node-link: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("node-link: top level must be an object");
  if (doc.contains("directed") && doc["directed"] != true) {
    throw SchemaError("node-link: only directed graphs are supported");
  }
  const auto& nodes = doc.contains("nodes") ? doc["nodes"] : nlohmann::json::array();
  const auto& links = doc.contains("links") ? doc["links"] : nlohmann::json::array();
  if (!nodes.is_array() || !links.is_array()) {
    throw ParseError("node-link: \"nodes\" and \"links\" must be lists");
  }

  Graph g(schema);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    std::string owner = "node #" + std::to_string(i);
    if (!n.is_object()) throw ParseError(owner + ": must be an object");
    std::string id = detail::require_string(n, "id", owner);
    owner = "node '" + id + "'";
    std::string type_name = detail::require_string(n, "type", owner);
    auto type = schema->find_node_type(type_name);
    if (!type) throw SchemaError(owner + ": unknown node type '" + type_name + "'");
    auto attrs = detail::read_attrs(n.contains("attrs") ? n["attrs"] : nlohmann::json(),
                                    schema->node_type(*type), owner);
    g.add_node(std::move(id), *type, std::move(attrs));
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    std::string owner = "link #" + std::to_string(i);
    if (!l.is_object()) throw ParseError(owner + ": must be an object");
    std::string src = detail::require_string(l, "source", owner);
    std::string dst = detail::require_string(l, "target", owner);
    owner += " (" + src + " -> " + dst + ")";
    auto s = g.find(src);
    auto d = g.find(dst);
    if (!s) throw SchemaError(owner + ": unknown source node '" + src + "'");
    if (!d) throw SchemaError(owner + ": unknown target node '" + dst + "'");
    std::string type_name = detail::require_string(l, "type", owner);
    auto type = schema->find_edge_type(type_name);
    if (!type) throw SchemaError(owner + ": unknown edge type '" + type_name + "'");
    std::optional<std::int64_t> ts;
    if (l.contains("ts") && !l["ts"].is_null()) {
      if (!l["ts"].is_number_integer()) throw ParseError(owner + ": \"ts\" must be an integer");
      ts = l["ts"].get<std::int64_t>();
    }
    auto attrs = detail::read_attrs(l.contains("attrs") ? l["attrs"] : nlohmann::json(),
                                    schema->edge_type(*type), owner);
    g.add_edge(*s, *d, *type, std::move(attrs), ts);
  }
  return g;
}

inline nlohmann::ordered_json node_link_json(const Graph& g) {
  const auto& schema = g.schema();
  nlohmann::ordered_json doc;
  doc["directed"] = true;
  doc["multigraph"] = true;
  doc["nodes"] = nlohmann::ordered_json::array();
  doc["links"] = nlohmann::ordered_json::array();
  auto attrs_json = [](const TypeDecl& decl, const std::vector<std::string>& values) {
    nlohmann::ordered_json a = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < decl.slots.size(); ++i) a[decl.slots[i].name] = values[i];
    return a;
  };
  for (const auto& n : g.nodes()) {
    nlohmann::ordered_json j;
    j["id"] = n.id;
    j["type"] = schema.node_type(n.type).name;
    j["attrs"] = attrs_json(schema.node_type(n.type), n.attrs);
    doc["nodes"].push_back(std::move(j));
  }
  for (const auto& e : g.edges()) {
    nlohmann::ordered_json j;
    j["source"] = g.node(e.source).id;
    j["target"] = g.node(e.target).id;
    j["type"] = schema.edge_type(e.type).name;
    if (e.timestamp) j["ts"] = *e.timestamp;
    j["attrs"] = attrs_json(schema.edge_type(e.type), e.attrs);
    doc["links"].push_back(std::move(j));
  }
  return doc;
}

inline std::string save_node_link(const Graph& g) {
  return node_link_json(g).dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) +
         "\n";
}

}  // namespace graphseq
