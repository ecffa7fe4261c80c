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

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "graphseq/common.hpp"
#include "graphseq/rules.hpp"

namespace graphseq {

struct AttrSlot {
  std::string name;
  std::string kind;
  friend bool operator==(const AttrSlot&, const AttrSlot&) = default;
};

/// A node or edge type: its name and ordered attribute slots.
struct TypeDecl {
  std::string name;
  std::vector<AttrSlot> slots;
  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct LegalTriple {
  NodeTypeId source;
  EdgeTypeId relation;
  NodeTypeId target;
  auto operator<=>(const LegalTriple&) const = default;
};

/// Declares node/edge types, their attribute slots, which (source, relation,
/// target) triples are legal and how every attribute kind is validated.
///
/// Type order is significant: the position of a type in its list is the index
/// carried by the corresponding <ntype_j>/<etype_k> token. An empty triple list
/// means every combination is legal.
class GraphSchema {
 public:
  struct NamedTriple {
    std::string source, relation, target;
  };

  GraphSchema(std::vector<TypeDecl> node_types, std::vector<TypeDecl> edge_types,
              const std::vector<NamedTriple>& legal_triples, std::vector<AttributeRule> rules,
              bool strict_legality = false)
      : node_types_(std::move(node_types)),
        edge_types_(std::move(edge_types)),
        rules_(std::move(rules)),
        strict_legality_(strict_legality) {
    index_names(node_types_, node_index_, "node");
    index_names(edge_types_, edge_index_, "edge");
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      if (!rule_index_.emplace(rules_[i].kind(), i).second) {
        throw SchemaError("duplicate rule for attribute kind '" + rules_[i].kind() + "'");
      }
    }
    auto check_slots = [&](const std::vector<TypeDecl>& decls) {
      for (const auto& d : decls) {
        std::set<std::string> seen;
        for (const auto& s : d.slots) {
          if (!seen.insert(s.name).second) {
            throw SchemaError("type '" + d.name + "' declares slot '" + s.name + "' twice");
          }
          if (!rule_index_.contains(s.kind)) {
            throw SchemaError("slot '" + d.name + "." + s.name + "' uses attribute kind '" +
                              s.kind + "' which has no rule");
          }
        }
      }
    };
    check_slots(node_types_);
    check_slots(edge_types_);
    for (const auto& t : legal_triples) {
      auto s = find_node_type(t.source);
      auto r = find_edge_type(t.relation);
      auto d = find_node_type(t.target);
      if (!s) throw SchemaError("legal triple references unknown node type '" + t.source + "'");
      if (!r) throw SchemaError("legal triple references unknown edge type '" + t.relation + "'");
      if (!d) throw SchemaError("legal triple references unknown node type '" + t.target + "'");
      triples_.insert({*s, *r, *d});
    }
  }

  const std::vector<TypeDecl>& node_types() const { return node_types_; }
  const std::vector<TypeDecl>& edge_types() const { return edge_types_; }
  const std::vector<AttributeRule>& rules() const { return rules_; }
  const std::set<LegalTriple>& legal_triples() const { return triples_; }
  bool strict_legality() const { return strict_legality_; }

  const TypeDecl& node_type(NodeTypeId t) const { return node_types_.at(t.value); }
  const TypeDecl& edge_type(EdgeTypeId t) const { return edge_types_.at(t.value); }

  std::optional<NodeTypeId> find_node_type(std::string_view name) const {
    auto it = node_index_.find(name);
    if (it == node_index_.end()) return std::nullopt;
    return NodeTypeId(it->second);
  }
  std::optional<EdgeTypeId> find_edge_type(std::string_view name) const {
    auto it = edge_index_.find(name);
    if (it == edge_index_.end()) return std::nullopt;
    return EdgeTypeId(it->second);
  }

  const AttributeRule& rule(std::string_view kind) const {
    auto it = rule_index_.find(kind);
    if (it == rule_index_.end()) {
      throw SchemaError("no rule for attribute kind '" + std::string(kind) + "'");
    }
    return rules_[it->second];
  }

  bool is_legal(NodeTypeId s, EdgeTypeId r, NodeTypeId d) const {
    return triples_.empty() || triples_.contains({s, r, d});
  }

  /// Stable content hash of the serialized schema.
  std::uint64_t fingerprint() const { return fnv1a64(to_json().dump()); }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    auto decls = [](const std::vector<TypeDecl>& v) {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& d : v) {
        nlohmann::ordered_json t;
        t["name"] = d.name;
        t["attrs"] = nlohmann::ordered_json::array();
        for (const auto& s : d.slots) {
          t["attrs"].push_back({{"name", s.name}, {"kind", s.kind}});
        }
        arr.push_back(std::move(t));
      }
      return arr;
    };
    j["node_types"] = decls(node_types_);
    j["edge_types"] = decls(edge_types_);
    j["legal_triples"] = nlohmann::ordered_json::array();
    for (const auto& t : triples_) {
      j["legal_triples"].push_back({node_types_[t.source.value].name,
                                    edge_types_[t.relation.value].name,
                                    node_types_[t.target.value].name});
    }
    j["strict_legality"] = strict_legality_;
    j["rules"] = nlohmann::ordered_json::array();
    for (const auto& r : rules_) j["rules"].push_back(rule_to_json(r));
    return j;
  }

 private:
  static void index_names(const std::vector<TypeDecl>& decls,
                          std::map<std::string, std::size_t, std::less<>>& index,
                          std::string_view what) {
    for (std::size_t i = 0; i < decls.size(); ++i) {
      if (!index.emplace(decls[i].name, i).second) {
        throw SchemaError("duplicate " + std::string(what) + " type '" + decls[i].name + "'");
      }
    }
  }

  std::vector<TypeDecl> node_types_;
  std::vector<TypeDecl> edge_types_;
  std::vector<AttributeRule> rules_;
  bool strict_legality_;
  std::map<std::string, std::size_t, std::less<>> node_index_;
  std::map<std::string, std::size_t, std::less<>> edge_index_;
  std::map<std::string, std::size_t, std::less<>> rule_index_;
  std::set<LegalTriple> triples_;
};

using SchemaPtr = std::shared_ptr<const GraphSchema>;

/// Parses a schema file. Rules listed in the file override built-in rules of
/// the same kind; built-ins remain available for kinds the file omits.
inline SchemaPtr load_schema(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("schema file: ") + e.what());
  }
  try {
    auto decls = [](const nlohmann::json& arr) {
      std::vector<TypeDecl> out;
      for (const auto& t : arr) {
        TypeDecl d{t.at("name").get<std::string>(), {}};
        for (const auto& s : t.value("attrs", nlohmann::json::array())) {
          d.slots.push_back({s.at("name").get<std::string>(), s.at("kind").get<std::string>()});
        }
        out.push_back(std::move(d));
      }
      return out;
    };
    std::vector<GraphSchema::NamedTriple> triples;
    for (const auto& t : doc.value("legal_triples", nlohmann::json::array())) {
      if (!t.is_array() || t.size() != 3) throw ParseError("legal triple must be [src, rel, dst]");
      triples.push_back({t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()});
    }
    std::vector<AttributeRule> rules;
    std::set<std::string> overridden;
    for (const auto& r : doc.value("rules", nlohmann::json::array())) {
      rules.push_back(rule_from_json(r));
      overridden.insert(rules.back().kind());
    }
    for (auto& r : builtin_rules()) {
      if (!overridden.contains(r.kind())) rules.push_back(std::move(r));
    }
    return std::make_shared<const GraphSchema>(decls(doc.at("node_types")),
                                               decls(doc.at("edge_types")), triples,
                                               std::move(rules),
                                               doc.value("strict_legality", false));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schema file: ") + e.what());
  }
}

inline std::string save_schema(const GraphSchema& schema) { return schema.to_json().dump(2) + "\n"; }

/// System provenance preset: processes, files and sockets connected by
/// READ/WRITE/CREATE/EXECUTE/SEND/RECEIVE events. Mirrors schemas/provenance.json.
inline SchemaPtr provenance_schema() {
  std::vector<TypeDecl> nodes = {
      {"Process", {{"name", "windows_executable"}}},
      {"File", {{"path", "windows_path"}}},
      {"Socket", {{"address", "ip_port"}}},
  };
  std::vector<TypeDecl> edges = {
      {"READ", {}},
      {"WRITE", {}},
      {"CREATE", {}},
      {"EXECUTE", {}},
      {"SEND", {{"size", "text"}, {"flags", "text"}}},
      {"RECEIVE", {{"size", "text"}, {"flags", "text"}}},
  };
  std::vector<GraphSchema::NamedTriple> triples = {
      {"Process", "READ", "File"},      {"Process", "WRITE", "File"},
      {"Process", "CREATE", "Process"}, {"Process", "CREATE", "File"},
      {"Process", "EXECUTE", "File"},   {"Process", "SEND", "Socket"},
      {"Process", "RECEIVE", "Socket"},
  };
  return std::make_shared<const GraphSchema>(std::move(nodes), std::move(edges), triples,
                                             builtin_rules(), /*strict_legality=*/true);
}

}  // namespace graphseq
