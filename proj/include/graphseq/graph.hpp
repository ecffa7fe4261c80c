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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphseq/common.hpp"
#include "graphseq/schema.hpp"

namespace graphseq {

struct Node {
  std::string id;
  NodeTypeId type;
  std::vector<std::string> attrs;  // aligned with the type's slots
  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  std::size_t source = 0;  // position in Graph::nodes()
  std::size_t target = 0;
  EdgeTypeId type;
  std::vector<std::string> attrs;
  std::optional<std::int64_t> timestamp;  // nanoseconds; ordering key only
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed heterogeneous multigraph whose node and edge attributes are
/// aligned with a GraphSchema. Parallel edges and self-loops are allowed.
/// Node and edge insertion order is preserved and is meaningful.
class Graph {
 public:
  explicit Graph(SchemaPtr schema) : schema_(std::move(schema)) {
    if (!schema_) throw SchemaError("graph requires a schema");
  }

  const GraphSchema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty() && edges_.empty(); }

  std::optional<std::size_t> find(std::string_view id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t add_node(std::string id, NodeTypeId type, std::vector<std::string> attrs) {
    if (type.value >= schema_->node_types().size()) {
      throw SchemaError("node '" + id + "': node type index out of range");
    }
    const auto& decl = schema_->node_type(type);
    if (attrs.size() != decl.slots.size()) {
      throw SchemaError("node '" + id + "': type " + decl.name + " expects " +
                        std::to_string(decl.slots.size()) + " attributes, got " +
                        std::to_string(attrs.size()));
    }
    if (by_id_.contains(id)) throw SchemaError("duplicate node id '" + id + "'");
    by_id_.emplace(id, nodes_.size());
    nodes_.push_back({std::move(id), type, std::move(attrs)});
    return nodes_.size() - 1;
  }

  /// Convenience overload taking the type by name; missing attributes are empty.
  std::size_t add_node(std::string id, std::string_view type_name,
                       std::vector<std::string> attrs = {}) {
    auto t = schema_->find_node_type(type_name);
    if (!t) throw SchemaError("node '" + id + "': unknown node type '" + std::string(type_name) + "'");
    attrs.resize(schema_->node_type(*t).slots.size());
    return add_node(std::move(id), *t, std::move(attrs));
  }

  std::size_t add_edge(std::size_t source, std::size_t target, EdgeTypeId type,
                       std::vector<std::string> attrs,
                       std::optional<std::int64_t> timestamp = std::nullopt) {
    if (source >= nodes_.size() || target >= nodes_.size()) {
      throw SchemaError("edge #" + std::to_string(edges_.size()) + ": endpoint does not exist");
    }
    if (type.value >= schema_->edge_types().size()) {
      throw SchemaError("edge #" + std::to_string(edges_.size()) + ": edge type index out of range");
    }
    const auto& decl = schema_->edge_type(type);
    if (attrs.size() != decl.slots.size()) {
      throw SchemaError("edge #" + std::to_string(edges_.size()) + ": type " + decl.name +
                        " expects " + std::to_string(decl.slots.size()) + " attributes, got " +
                        std::to_string(attrs.size()));
    }
    edges_.push_back({source, target, type, std::move(attrs), timestamp});
    return edges_.size() - 1;
  }

  std::size_t add_edge(std::string_view source_id, std::string_view target_id,
                       std::string_view type_name, std::vector<std::string> attrs = {},
                       std::optional<std::int64_t> timestamp = std::nullopt) {
    auto s = find(source_id);
    auto d = find(target_id);
    if (!s) throw SchemaError("edge references unknown node '" + std::string(source_id) + "'");
    if (!d) throw SchemaError("edge references unknown node '" + std::string(target_id) + "'");
    auto t = schema_->find_edge_type(type_name);
    if (!t) throw SchemaError("edge references unknown edge type '" + std::string(type_name) + "'");
    attrs.resize(schema_->edge_type(*t).slots.size());
    return add_edge(*s, *d, *t, std::move(attrs), timestamp);
  }

  /// Field-for-field equality (ids, order, attributes, timestamps).
  friend bool operator==(const Graph& a, const Graph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  SchemaPtr schema_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

}  // namespace graphseq
