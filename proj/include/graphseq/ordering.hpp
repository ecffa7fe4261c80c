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
#include <functional>
#include <numeric>
#include <queue>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "graphseq/graph.hpp"

namespace graphseq {

enum class OrderPolicy {
  kTimestamp,
  kTopological,
  kAsGiven,
  // Timestamp when every edge carries one, topological otherwise.
  kAuto,
};

inline std::string_view to_string(OrderPolicy p) {
  switch (p) {
    case OrderPolicy::kTimestamp:
      return "timestamp";
    case OrderPolicy::kTopological:
      return "topological";
    case OrderPolicy::kAsGiven:
      return "as-given";
    case OrderPolicy::kAuto:
      return "auto";
  }
  return "auto";
}

inline OrderPolicy order_policy_from_string(std::string_view s) {
  if (s == "timestamp") return OrderPolicy::kTimestamp;
  if (s == "topological") return OrderPolicy::kTopological;
  if (s == "as-given") return OrderPolicy::kAsGiven;
  if (s == "auto") return OrderPolicy::kAuto;
  throw OrderingError("unknown ordering policy '" + std::string(s) + "'");
}

struct EdgeOrder {
  OrderPolicy policy = OrderPolicy::kAsGiven;  // never kAuto once resolved
  std::vector<std::size_t> permutation;        // edge positions, in visiting order
};

/// Topological rank of every node. Kahn's algorithm over the directed simple
/// graph (self-loops ignored), ties broken by lowest input position. When only
/// cycles remain, the lowest-positioned unranked node is forced next.
inline std::vector<std::size_t> topological_ranks(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& e : g.edges()) {
    if (e.source != e.target) succ[e.source].push_back(e.target);
  }
  std::vector<std::size_t> indegree(n, 0);
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (auto t : s) ++indegree[t];
  }

  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> rank(n, n);
  std::vector<bool> done(n, false);
  std::size_t next_rank = 0;
  std::size_t scan = 0;  // lowest position that might still be unranked
  while (next_rank < n) {
    std::size_t v;
    if (!ready.empty()) {
      v = ready.top();
      ready.pop();
      if (done[v]) continue;
    } else {
      while (done[scan]) ++scan;
      v = scan;
    }
    done[v] = true;
    rank[v] = next_rank++;
    for (auto t : succ[v]) {
      if (done[t]) continue;
      if (indegree[t] > 0 && --indegree[t] == 0) ready.push(t);
    }
  }
  return rank;
}

inline EdgeOrder order_edges(const Graph& g, OrderPolicy policy) {
  const auto& edges = g.edges();
  EdgeOrder out;
  out.permutation.resize(edges.size());
  std::iota(out.permutation.begin(), out.permutation.end(), std::size_t{0});

  if (policy == OrderPolicy::kAuto) {
    bool stamped = std::all_of(edges.begin(), edges.end(),
                               [](const Edge& e) { return e.timestamp.has_value(); });
    policy = stamped ? OrderPolicy::kTimestamp : OrderPolicy::kTopological;
  }
  out.policy = policy;

  switch (policy) {
    case OrderPolicy::kAsGiven:
    case OrderPolicy::kAuto:
      break;
    case OrderPolicy::kTimestamp:
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!edges[i].timestamp) {
          throw OrderingError("timestamp ordering: edge #" + std::to_string(i) + " (" +
                              g.node(edges[i].source).id + " -> " + g.node(edges[i].target).id +
                              ") has no timestamp");
        }
      }
      std::stable_sort(out.permutation.begin(), out.permutation.end(),
                       [&](std::size_t a, std::size_t b) {
                         return *edges[a].timestamp < *edges[b].timestamp;
                       });
      break;
    case OrderPolicy::kTopological: {
      auto rank = topological_ranks(g);
      auto key = [&](std::size_t i) {
        const auto& e = edges[i];
        return std::make_tuple(rank[e.source], rank[e.target], e.type.value, i);
      };
      std::sort(out.permutation.begin(), out.permutation.end(),
                [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
      break;
    }
  }
  return out;
}

/// Dense node numbering: first appearance along the edge order, source
/// before target; nodes without edges follow in input order.
struct CanonicalIndexing {
  std::vector<std::size_t> index_of;  // node position -> canonical index
  std::vector<std::size_t> node_at;   // canonical index -> node position
  std::size_t touched = 0;            // nodes reached through edges
};

inline CanonicalIndexing canonical_index(const Graph& g, const EdgeOrder& order) {
  const std::size_t n = g.node_count();
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  CanonicalIndexing ci;
  ci.index_of.assign(n, kUnset);
  ci.node_at.reserve(n);
  auto visit = [&](std::size_t v) {
    if (ci.index_of[v] == kUnset) {
      ci.index_of[v] = ci.node_at.size();
      ci.node_at.push_back(v);
    }
  };
  for (auto ei : order.permutation) {
    const auto& e = g.edge(ei);
    visit(e.source);
    visit(e.target);
  }
  ci.touched = ci.node_at.size();
  for (std::size_t v = 0; v < n; ++v) visit(v);
  return ci;
}

/// Relabels nodes "n<index>", stores nodes in canonical order and edges in
/// visiting order, and replaces timestamps with edge positions. This is the
/// form the decoder produces.
inline Graph canonicalize(const Graph& g, OrderPolicy policy = OrderPolicy::kAuto) {
  auto order = order_edges(g, policy);
  auto ci = canonical_index(g, order);
  Graph out(g.schema_ptr());
  for (std::size_t i = 0; i < ci.node_at.size(); ++i) {
    const auto& n = g.node(ci.node_at[i]);
    out.add_node("n" + std::to_string(i), n.type, n.attrs);
  }
  std::int64_t pos = 0;
  for (auto ei : order.permutation) {
    const auto& e = g.edge(ei);
    out.add_edge(ci.index_of[e.source], ci.index_of[e.target], e.type, e.attrs, pos++);
  }
  return out;
}

}  // namespace graphseq
