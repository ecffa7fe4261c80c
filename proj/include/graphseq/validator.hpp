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

#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "graphseq/encoder.hpp"
#include "graphseq/graph.hpp"

namespace graphseq {

/// Findings for one graph, without modifying it.
struct GraphIssues {
  std::vector<std::size_t> illegal_edges;  // edge positions
  struct BadAttr {
    bool on_edge = false;
    std::size_t owner = 0;  // node or edge position
    std::size_t slot = 0;
    AttributeVerdict verdict;
  };
  std::vector<BadAttr> bad_attributes;
  std::size_t components = 0;  // weakly connected components (isolated nodes count)

  bool clean() const { return illegal_edges.empty() && bad_attributes.empty() && components <= 1; }
};

namespace detail {

/// Weakly connected component label per node, labels in order of lowest member.
inline std::vector<std::size_t> weak_components(std::size_t n,
                                                const std::vector<Edge>& edges,
                                                const std::vector<bool>& keep_edge) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!keep_edge[i]) continue;
    auto a = find(edges[i].source), b = find(edges[i].target);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> label(n);
  std::map<std::size_t, std::size_t> ids;
  for (std::size_t v = 0; v < n; ++v) {
    auto r = find(v);
    auto [it, fresh] = ids.emplace(r, ids.size());
    label[v] = it->second;
  }
  return label;
}

}  // namespace detail

inline GraphIssues inspect_graph(const Graph& g) {
  const auto& schema = g.schema();
  GraphIssues out;
  std::vector<bool> keep(g.edge_count(), true);
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto& e = g.edge(i);
    if (!schema.is_legal(g.node(e.source).type, e.type, g.node(e.target).type)) {
      out.illegal_edges.push_back(i);
    }
  }
  auto check = [&](bool on_edge, std::size_t owner, const TypeDecl& decl,
                   const std::vector<std::string>& values) {
    for (std::size_t s = 0; s < decl.slots.size(); ++s) {
      auto v = schema.rule(decl.slots[s].kind).check(values[s]);
      if (!v.valid()) out.bad_attributes.push_back({on_edge, owner, s, v});
    }
  };
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    check(false, i, schema.node_type(g.node(i).type), g.node(i).attrs);
  }
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    check(true, i, schema.edge_type(g.edge(i).type), g.edge(i).attrs);
  }
  if (g.node_count() > 0) {
    auto label = detail::weak_components(g.node_count(), g.edges(), keep);
    out.components = *std::max_element(label.begin(), label.end()) + 1;
  }
  return out;
}

/// Removes illegal edges, replaces invalid attributes with rule defaults and
/// keeps the largest weakly connected component (ties: the component holding
/// the lowest canonical index). Node order, ids and edge order are preserved.
inline Graph repair_graph(const Graph& g) {
  const auto& schema = g.schema();
  const std::size_t n = g.node_count();
  std::vector<bool> keep_edge(g.edge_count(), true);
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto& e = g.edge(i);
    keep_edge[i] = schema.is_legal(g.node(e.source).type, e.type, g.node(e.target).type);
  }

  std::vector<bool> keep_node(n, true);
  if (n > 0) {
    auto label = detail::weak_components(n, g.edges(), keep_edge);
    const std::size_t count = *std::max_element(label.begin(), label.end()) + 1;
    std::vector<std::size_t> size(count, 0);
    for (auto l : label) ++size[l];

    // Canonical index of each node over the surviving edges.
    Graph legal_only(g.schema_ptr());
    for (const auto& node : g.nodes()) legal_only.add_node(node.id, node.type, node.attrs);
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
      if (!keep_edge[i]) continue;
      const auto& e = g.edge(i);
      legal_only.add_edge(e.source, e.target, e.type, e.attrs, e.timestamp);
    }
    std::vector<std::size_t> index_of(n);
    std::iota(index_of.begin(), index_of.end(), std::size_t{0});
    try {
      index_of = canonical_index(legal_only, order_edges(legal_only, OrderPolicy::kAuto)).index_of;
    } catch (const OrderingError&) {
    }
    std::vector<std::size_t> best_index(count, n);
    for (std::size_t v = 0; v < n; ++v) best_index[label[v]] = std::min(best_index[label[v]], index_of[v]);
    std::size_t winner = 0;
    for (std::size_t c = 1; c < count; ++c) {
      if (size[c] > size[winner] || (size[c] == size[winner] && best_index[c] < best_index[winner])) {
        winner = c;
      }
    }
    for (std::size_t v = 0; v < n; ++v) keep_node[v] = label[v] == winner;
  }

  auto fix = [&](const TypeDecl& decl, std::vector<std::string> values) {
    for (std::size_t s = 0; s < decl.slots.size(); ++s) {
      const auto& rule = schema.rule(decl.slots[s].kind);
      if (!rule.check(values[s]).valid()) values[s] = rule.default_value();
    }
    return values;
  };

  Graph out(g.schema_ptr());
  std::vector<std::size_t> pos(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (!keep_node[v]) continue;
    const auto& node = g.node(v);
    pos[v] = out.add_node(node.id, node.type, fix(schema.node_type(node.type), node.attrs));
  }
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto& e = g.edge(i);
    if (!keep_edge[i] || !keep_node[e.source]) continue;
    out.add_edge(pos[e.source], pos[e.target], e.type, fix(schema.edge_type(e.type), e.attrs),
                 e.timestamp);
  }
  return out;
}

using ValidityPredicate = std::function<bool(const Graph&)>;

/// Default predicate: nonempty and unchanged by repair.
inline bool survives_repair(const Graph& g) {
  if (g.empty()) return false;
  return canonical_equal(repair_graph(g), g);
}

/// Nonempty and weakly connected; attribute content and legality ignored.
inline bool nonempty_connected(const Graph& g) {
  if (g.empty()) return false;
  std::vector<bool> keep(g.edge_count(), true);
  auto label = detail::weak_components(g.node_count(), g.edges(), keep);
  return *std::max_element(label.begin(), label.end()) == 0;
}

/// Legal triples and attributes passing both tiers; connectivity ignored.
inline bool provenance_legal(const Graph& g) {
  if (g.empty()) return false;
  auto issues = inspect_graph(g);
  return issues.illegal_edges.empty() && issues.bad_attributes.empty();
}

inline ValidityPredicate validity_predicate(std::string_view name) {
  if (name == "repair") return survives_repair;
  if (name == "connected") return nonempty_connected;
  if (name == "legal") return provenance_legal;
  throw Error("unknown validity predicate '" + std::string(name) + "'");
}

struct AttributeRate {
  std::string kind;
  std::size_t total = 0;
  std::size_t valid = 0;
  double pct() const { return total == 0 ? 0.0 : 100.0 * static_cast<double>(valid) / static_cast<double>(total); }
};

struct CorpusRates {
  std::size_t generated = 0;
  double pct_valid = 0.0;
  double pct_novel_and_valid = 0.0;
  double pct_novel = 0.0;
  double pct_empty = 0.0;
  std::vector<AttributeRate> attributes;  // sorted by rule kind
  std::size_t attribute_total = 0;
  std::size_t attribute_valid = 0;

  double pct_attribute_valid() const {
    return attribute_total == 0 ? 0.0
                                : 100.0 * static_cast<double>(attribute_valid) /
                                      static_cast<double>(attribute_total);
  }
};

/// Canonical-encoding key; permuting node ids leaves it unchanged.
inline std::string canonical_key(const Graph& g) {
  std::string key;
  for (const auto& t : canonical_tokens(g)) {
    key.push_back(static_cast<char>(t.kind));
    for (int b = 0; b < 4; ++b) key.push_back(static_cast<char>((t.index >> (8 * b)) & 0xFF));
  }
  return key;
}

inline CorpusRates corpus_rates(const std::vector<Graph>& generated,
                                const std::vector<Graph>& reference,
                                const ValidityPredicate& is_valid = survives_repair) {
  std::unordered_set<std::string> seen;
  for (const auto& g : reference) seen.insert(canonical_key(g));

  CorpusRates r;
  r.generated = generated.size();
  std::size_t valid = 0, novel = 0, both = 0, empty = 0;
  std::map<std::string, AttributeRate> per_kind;
  for (const auto& g : generated) {
    const bool v = is_valid(g);
    const bool n = !seen.contains(canonical_key(g));
    valid += v;
    novel += n;
    both += v && n;
    empty += g.empty();

    const auto& schema = g.schema();
    auto count = [&](const TypeDecl& decl, const std::vector<std::string>& values) {
      for (std::size_t s = 0; s < decl.slots.size(); ++s) {
        auto& rate = per_kind[decl.slots[s].kind];
        rate.kind = decl.slots[s].kind;
        ++rate.total;
        ++r.attribute_total;
        if (schema.rule(decl.slots[s].kind).check(values[s]).valid()) {
          ++rate.valid;
          ++r.attribute_valid;
        }
      }
    };
    for (const auto& node : g.nodes()) count(schema.node_type(node.type), node.attrs);
    for (const auto& e : g.edges()) count(schema.edge_type(e.type), e.attrs);
  }
  if (!generated.empty()) {
    const double d = static_cast<double>(generated.size());
    r.pct_valid = 100.0 * static_cast<double>(valid) / d;
    r.pct_novel = 100.0 * static_cast<double>(novel) / d;
    r.pct_novel_and_valid = 100.0 * static_cast<double>(both) / d;
    r.pct_empty = 100.0 * static_cast<double>(empty) / d;
  }
  for (auto& [kind, rate] : per_kind) r.attributes.push_back(rate);
  return r;
}

inline nlohmann::ordered_json to_json(const CorpusRates& r) {
  nlohmann::ordered_json j;
  j["generated"] = r.generated;
  j["pct_valid"] = r.pct_valid;
  j["pct_novel_and_valid"] = r.pct_novel_and_valid;
  j["pct_novel"] = r.pct_novel;
  j["pct_empty"] = r.pct_empty;
  j["pct_attribute_valid"] = r.pct_attribute_valid();
  auto& attrs = j["attributes"] = nlohmann::ordered_json::array();
  for (const auto& a : r.attributes) {
    attrs.push_back({{"kind", a.kind}, {"total", a.total}, {"valid", a.valid}, {"pct_valid", a.pct()}});
  }
  return j;
}

/// Aligned text table. Column order is fixed: valid, novel and valid, novel, empty.
inline std::string rates_table(const CorpusRates& r) {
  auto row = [](const std::vector<std::string>& cells, const std::vector<std::size_t>& widths) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) line += " | ";
      line += std::string(widths[i] - std::min(widths[i], cells[i].size()), ' ') + cells[i];
    }
    return line + "\n";
  };
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::vector<std::string> head = {"% Valid", "% Novel & Valid", "% Novel", "% Empty"};
  std::vector<std::string> body = {pct(r.pct_valid), pct(r.pct_novel_and_valid), pct(r.pct_novel),
                                   pct(r.pct_empty)};
  std::vector<std::size_t> w;
  for (std::size_t i = 0; i < head.size(); ++i) w.push_back(std::max(head[i].size(), body[i].size()));
  std::string out = row(head, w);
  std::string rule;
  for (std::size_t i = 0; i < w.size(); ++i) rule += (i ? "-+-" : "") + std::string(w[i], '-');
  out += rule + "\n" + row(body, w);

  if (!r.attributes.empty()) {
    std::size_t kw = std::string("attribute").size();
    for (const auto& a : r.attributes) kw = std::max(kw, a.kind.size());
    std::vector<std::size_t> aw = {kw, 9, 9, 7};
    out += "\n" + row({"attribute", "instances", "valid", "% Valid"}, aw);
    out += std::string(kw, '-') + "-+-" + std::string(9, '-') + "-+-" + std::string(9, '-') + "-+-" +
           std::string(7, '-') + "\n";
    for (const auto& a : r.attributes) {
      out += row({a.kind, std::to_string(a.total), std::to_string(a.valid), pct(a.pct())}, aw);
    }
  }
  return out;
}

}  // namespace graphseq
