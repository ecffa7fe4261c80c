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

// Token sequence -> Graph.
//
// Decoded graphs name nodes "n<index>", store nodes in index order and edges
// in token order, and stamp each edge with its position. encode() therefore
// reproduces the input sequence exactly.
//
// Recovery rules, applied only where the structural grammar rejects a token:
//   - the token is skipped, unless it is an anchor (<boe> <bon> <bof>) or <eog>;
//   - inside an attribute span an anchor first closes the span, as if its
//     <eof> had been lost; a stray <eog> there is skipped;
//   - <boe> abandons any unfinished construct and opens a new edge;
//   - <bon> abandons any unfinished construct and opens a declaration;
//   - a declaration accepts any in-budget node index (redeclaring overwrites);
//   - <bof> supplies a missing edge or node type (index 0) if that is all
//     that blocks the span, and is skipped otherwise;
//   - <eog> abandons any unfinished construct and ends the graph.
// Nodes still undeclared at the end get type 0 and empty attributes.

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphseq/encoder.hpp"
#include "graphseq/grammar.hpp"
#include "graphseq/validator.hpp"

namespace graphseq {

struct AnchorResync {
  std::size_t position = 0;
  TokenKind anchor = TokenKind::kBoe;  // kEof marks an implied span close, kEog an implied end
  friend bool operator==(const AnchorResync&, const AnchorResync&) = default;
};

struct RecoveryReport {
  std::vector<std::size_t> skipped_positions;
  std::vector<AnchorResync> anchor_resyncs;
  std::size_t dropped_fragments = 0;
  std::size_t materialized_nodes = 0;  // undeclared nodes given type 0

  std::size_t skipped_tokens() const { return skipped_positions.size(); }
  bool strict() const {
    return skipped_positions.empty() && anchor_resyncs.empty() && dropped_fragments == 0;
  }
};

inline std::string_view anchor_name(TokenKind k) {
  switch (k) {
    case TokenKind::kBog: return "bog";
    case TokenKind::kEog: return "eog";
    case TokenKind::kBon: return "bon";
    case TokenKind::kEon: return "eon";
    case TokenKind::kBoe: return "boe";
    case TokenKind::kBof: return "bof";
    case TokenKind::kEof: return "eof";
    default: return "other";
  }
}

inline nlohmann::ordered_json to_json(const RecoveryReport& r) {
  nlohmann::ordered_json j;
  j["strict"] = r.strict();
  j["skipped_tokens"] = r.skipped_tokens();
  j["skipped_positions"] = r.skipped_positions;
  auto& resyncs = j["anchor_resyncs"] = nlohmann::ordered_json::array();
  for (const auto& a : r.anchor_resyncs) {
    resyncs.push_back({{"position", a.position}, {"anchor", anchor_name(a.anchor)}});
  }
  j["dropped_fragments"] = r.dropped_fragments;
  j["materialized_nodes"] = r.materialized_nodes;
  return j;
}

struct ParseResult {
  Graph graph;
  RecoveryReport report;
};

namespace detail {

/// Accumulates graph content from tokens the automaton has accepted.
class GraphBuilder {
 public:
  explicit GraphBuilder(const Vocabulary& vocab) : vocab_(vocab) {}

  /// Call before Grammar::apply with the phase the token is accepted in.
  void accept(Phase phase, Token t) {
    switch (phase) {
      case Phase::kAwaitSrcNode:
        edge_ = {};
        edge_.src = t.index;
        break;
      case Phase::kAwaitDstNode:
        edge_.dst = t.index;
        break;
      case Phase::kAwaitEdgeType:
        edge_.type = t.index;
        break;
      case Phase::kAwaitEdgeAttrOpen:
      case Phase::kAwaitNodeAttrOpenOrEnd:
        payload_.clear();
        break;
      case Phase::kInEdgeAttr:
        if (t.kind == TokenKind::kText) {
          payload_.push_back(t.index);
        } else {
          const auto& decl = vocab_.schema().edge_type(EdgeTypeId(edge_.type));
          edges_.push_back({edge_.src, edge_.dst, edge_.type,
                            split_edge_attrs(decode_payload(), decl.slots.size())});
        }
        break;
      case Phase::kAwaitDeclNode:
        node_ = t.index;
        reserve(node_);
        break;
      case Phase::kAwaitNodeType: {
        const auto arity = vocab_.schema().node_type(NodeTypeId(t.index)).slots.size();
        types_[node_] = static_cast<std::int32_t>(t.index);
        attrs_[node_].assign(arity, std::string());
        slot_ = 0;
        break;
      }
      case Phase::kInNodeAttr:
        if (t.kind == TokenKind::kText) {
          payload_.push_back(t.index);
        } else if (slot_ < attrs_[node_].size()) {
          attrs_[node_][slot_++] = decode_payload();
        }
        break;
      default:
        break;
    }
  }

  /// Builds the graph over node indices [0, used). Returns the count of
  /// nodes that never received a type.
  std::size_t build(std::size_t used, Graph& out) {
    reserve(used == 0 ? 0 : used - 1);
    std::size_t materialized = 0;
    for (std::size_t i = 0; i < used; ++i) {
      NodeTypeId type(0);
      std::vector<std::string> attrs;
      if (types_[i] >= 0) {
        type = NodeTypeId(static_cast<std::uint32_t>(types_[i]));
        attrs = attrs_[i];
      } else {
        ++materialized;
        attrs.assign(vocab_.schema().node_type(type).slots.size(), std::string());
      }
      out.add_node("n" + std::to_string(i), type, std::move(attrs));
    }
    std::int64_t ts = 0;
    for (auto& e : edges_) {
      if (e.src >= used || e.dst >= used) continue;
      out.add_edge(e.src, e.dst, EdgeTypeId(e.type), std::move(e.attrs), ts++);
    }
    return materialized;
  }

 private:
  struct PendingEdge {
    std::uint32_t src = 0, dst = 0, type = 0;
    std::vector<std::string> attrs;
  };

  void reserve(std::size_t i) {
    if (types_.size() <= i) {
      types_.resize(i + 1, -1);
      attrs_.resize(i + 1);
    }
  }

  std::string decode_payload() const { return vocab_.text_tokenizer().decode(payload_); }

  const Vocabulary& vocab_;
  PendingEdge edge_;
  std::vector<PendingEdge> edges_;
  std::vector<std::int32_t> types_;
  std::vector<std::vector<std::string>> attrs_;
  std::vector<std::uint32_t> payload_;
  std::uint32_t node_ = 0;
  std::size_t slot_ = 0;
};

inline GrammarOptions structural_options(std::size_t max_span_tokens) {
  GrammarOptions o;
  o.legality_filter = false;
  o.require_connected = false;
  o.allow_isolated_nodes = true;
  o.max_span_tokens = max_span_tokens;
  return o;
}

inline bool in_edge_construct(Phase p) {
  return p == Phase::kAwaitSrcNode || p == Phase::kAwaitDstNode || p == Phase::kAwaitEdgeType ||
         p == Phase::kAwaitEdgeAttrOpen || p == Phase::kInEdgeAttr;
}

inline bool in_node_construct(Phase p) {
  return p == Phase::kAwaitDeclNode || p == Phase::kAwaitNodeType ||
         p == Phase::kAwaitNodeAttrOpenOrEnd || p == Phase::kInNodeAttr;
}

}  // namespace detail

/// Grammar-exact decode. Throws RejectionError at the first violation,
/// including a missing <eog> (reported at position tokens.size()).
inline Graph parse_strict(const std::vector<TokenId>& tokens, const VocabPtr& vocab,
                          std::size_t max_span_tokens = std::numeric_limits<std::size_t>::max()) {
  Grammar grammar(vocab, detail::structural_options(max_span_tokens));
  auto state = grammar.init_state();
  detail::GraphBuilder builder(*vocab);
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    const auto id = tokens[pos];
    if (!grammar.permits(state, id)) throw grammar.rejection(state, id, pos);
    const Token t = vocab->classify(id);
    builder.accept(state.phase, t);
    grammar.apply(state, t);
  }
  if (!grammar.is_terminal(state)) {
    auto expected = grammar.allowed_next(state).to_vector();
    throw RejectionError(tokens.size(), 0, "<end of input>", state.phase, expected,
                         grammar.describe(expected));
  }
  Graph g(vocab->schema_ptr());
  builder.build(state.used(), g);
  return g;
}

/// Total decode: never throws on any token stream.
inline ParseResult parse_recovering(const std::vector<TokenId>& tokens, const VocabPtr& vocab,
                                   std::size_t max_span_tokens = 4096) {
  Grammar grammar(vocab, detail::structural_options(max_span_tokens));
  const auto& v = *vocab;
  auto state = grammar.init_state();
  detail::GraphBuilder builder(v);
  RecoveryReport report;

  auto accept = [&](Token t) {
    builder.accept(state.phase, t);
    grammar.apply(state, t);
  };
  auto resync = [&](std::size_t pos, TokenKind k) { report.anchor_resyncs.push_back({pos, k}); };
  // Drops an unfinished construct. Nodes first used by an abandoned edge are released.
  auto abandon = [&]() {
    if (detail::in_edge_construct(state.phase)) {
      ++report.dropped_fragments;
      while (state.used() > state.prior_used) {
        --state.class_counts[static_cast<std::size_t>(state.node_types.back() + 1)];
        state.node_types.pop_back();
      }
      std::erase_if(state.pending, [&](std::uint32_t i) { return i >= state.used(); });
    } else if (detail::in_node_construct(state.phase)) {
      ++report.dropped_fragments;
    }
    state.phase = Phase::kAwaitDeclOrNext;
  };

  std::size_t pos = 0;
  while (pos < tokens.size()) {
    const auto id = tokens[pos];
    if (state.phase == Phase::kDone || !v.contains(id)) {
      report.skipped_positions.push_back(pos++);
      continue;
    }
    const Token t = v.classify(id);

    if (grammar.permits(state, id)) {
      accept(t);
      ++pos;
      continue;
    }
    if (state.phase == Phase::kAwaitDeclNode && t.kind == TokenKind::kNode) {
      // Out-of-order declaration or redeclaration.
      resync(pos, TokenKind::kBon);
      std::erase(state.pending, t.index);
      grammar.use(state, t.index, false);
      builder.accept(state.phase, t);
      state.current_node = t.index;
      state.declaring_standalone = true;
      state.phase = Phase::kAwaitNodeType;
      ++pos;
      continue;
    }

    const bool in_span = state.phase == Phase::kInEdgeAttr || state.phase == Phase::kInNodeAttr;
    const bool anchor = t.is_anchor() || (t.kind == TokenKind::kEog && !in_span);
    if (state.phase == Phase::kStart) {
      resync(pos, TokenKind::kBog);
      accept(Token::bog());
      continue;
    }
    if (!anchor) {
      report.skipped_positions.push_back(pos++);
      continue;
    }
    if (in_span) {
      resync(pos, TokenKind::kEof);
      accept(Token::eof());
      continue;
    }

    switch (t.kind) {
      case TokenKind::kBoe:
        abandon();
        state.pending.clear();
        state.standalone_tail = false;
        resync(pos, t.kind);
        accept(t);
        ++pos;
        break;
      case TokenKind::kBon:
        abandon();
        resync(pos, t.kind);
        state.phase = Phase::kAwaitDeclNode;
        ++pos;
        break;
      case TokenKind::kBof:
        if (state.phase == Phase::kAwaitEdgeType) {
          resync(pos, t.kind);
          accept(Token::edge_type(EdgeTypeId(0)));
          accept(t);
        } else if (state.phase == Phase::kAwaitNodeType &&
                   !v.schema().node_type(NodeTypeId(0)).slots.empty()) {
          resync(pos, t.kind);
          accept(Token::node_type(NodeTypeId(0)));
          accept(t);
        } else {
          report.skipped_positions.push_back(pos);
        }
        ++pos;
        break;
      default:  // <eog>
        abandon();
        resync(pos, t.kind);
        state.phase = Phase::kDone;
        ++pos;
        break;
    }
  }
  if (state.phase != Phase::kDone) {
    abandon();
    resync(tokens.size(), TokenKind::kEog);
  }

  ParseResult result{Graph(vocab->schema_ptr()), std::move(report)};
  result.report.materialized_nodes = builder.build(state.used(), result.graph);
  return result;
}

/// Recovering decode followed by repair_graph.
inline Graph decode_or_default(const std::vector<TokenId>& tokens, const VocabPtr& vocab) {
  return repair_graph(parse_recovering(tokens, vocab).graph);
}

}  // namespace graphseq
