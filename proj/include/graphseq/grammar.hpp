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

// Decoding automaton for encoded graphs. Given any prefix it reports exactly
// which token ids may follow, so a sampler masking its distribution with
// allowed_next() can only produce sequences the parser accepts.
//
// Node discipline: NODE tokens in an edge may name any already-used index or
// the single lowest unused index ("fresh"), which keeps node numbering dense
// by first appearance. A node referenced for the first time must be declared
// (<bon> <node_i> <ntype_j> spans <eon>) right after the edge that introduced
// it, source first. Standalone declarations of fresh nodes may follow the
// last edge and nothing but further standalone declarations or <eog> may
// come after them.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graphseq/common.hpp"
#include "graphseq/vocab.hpp"

namespace graphseq {

enum class Phase : std::uint8_t {
  kStart,
  kAwaitEdgeOrEnd,
  kAwaitSrcNode,
  kAwaitDstNode,
  kAwaitEdgeType,
  kAwaitEdgeAttrOpen,
  kInEdgeAttr,
  kAwaitDeclOrNext,
  kAwaitDeclNode,
  kAwaitNodeType,
  kAwaitNodeAttrOpenOrEnd,
  kInNodeAttr,
  kDone,
};

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kStart: return "Start";
    case Phase::kAwaitEdgeOrEnd: return "AwaitEdgeOrEnd";
    case Phase::kAwaitSrcNode: return "AwaitSrcNode";
    case Phase::kAwaitDstNode: return "AwaitDstNode";
    case Phase::kAwaitEdgeType: return "AwaitEdgeType";
    case Phase::kAwaitEdgeAttrOpen: return "AwaitEdgeAttrOpen";
    case Phase::kInEdgeAttr: return "InEdgeAttr";
    case Phase::kAwaitDeclOrNext: return "AwaitDeclOrNext";
    case Phase::kAwaitDeclNode: return "AwaitDeclNode";
    case Phase::kAwaitNodeType: return "AwaitNodeType";
    case Phase::kAwaitNodeAttrOpenOrEnd: return "AwaitNodeAttrOpenOrEnd";
    case Phase::kInNodeAttr: return "InNodeAttr";
    case Phase::kDone: return "Done";
  }
  return "?";
}

struct GrammarOptions {
  /// Restrict NODE/ETYPE/NTYPE choices so every edge can end up a legal triple.
  bool legality_filter = false;
  /// After the first edge, every edge must touch an already-used node.
  /// Standalone declarations are then only allowed for an empty graph.
  bool require_connected = false;
  bool allow_isolated_nodes = true;
  /// TEXT tokens allowed per attribute span before only <eof> remains.
  std::size_t max_span_tokens = 4096;

  static GrammarOptions for_schema(const GraphSchema& schema) {
    GrammarOptions o;
    o.legality_filter = schema.strict_legality();
    return o;
  }
};

/// Automaton state. A plain value: copying it forks a decode stream.
struct GrammarState {
  Phase phase = Phase::kStart;
  /// Per used node index: declared type, or -1 while referenced but undeclared.
  /// Used indices are exactly [0, node_types.size()).
  std::vector<std::int32_t> node_types;
  /// Used-node counts per type class (0 = undeclared, t+1 = type t).
  std::vector<std::uint32_t> class_counts;
  /// Referenced but undeclared nodes awaiting declaration, source first.
  std::vector<std::uint32_t> pending;
  std::uint32_t prior_used = 0;  // used-node count when the current edge began
  std::uint32_t edge_src = 0;
  std::uint32_t edge_dst = 0;
  std::uint32_t edge_type = 0;
  std::uint32_t current_node = 0;
  std::uint32_t slots_remaining = 0;
  std::uint32_t span_length = 0;
  bool declaring_standalone = false;
  bool standalone_tail = false;

  std::uint32_t used() const { return static_cast<std::uint32_t>(node_types.size()); }
  bool declared(std::uint32_t i) const { return i < node_types.size() && node_types[i] >= 0; }

  friend bool operator==(const GrammarState&, const GrammarState&) = default;
};

/// Raised when a token is not in the allowed set.
class RejectionError : public Error {
 public:
  RejectionError(std::size_t position, TokenId token, std::string surface, Phase phase,
                 std::vector<TokenId> expected, std::string expected_text)
      : Error("token " + std::to_string(position) + " (" + surface + ") rejected in phase " +
              std::string(to_string(phase)) + "; expected " + expected_text),
        position_(position),
        token_(token),
        phase_(phase),
        expected_(std::move(expected)) {}

  std::size_t position() const { return position_; }
  TokenId token() const { return token_; }
  Phase phase() const { return phase_; }
  const std::vector<TokenId>& expected() const { return expected_; }

 private:
  std::size_t position_;
  TokenId token_;
  Phase phase_;
  std::vector<TokenId> expected_;
};

class Grammar {
 public:
  explicit Grammar(VocabPtr vocab) : Grammar(vocab, GrammarOptions::for_schema(vocab->schema())) {}

  Grammar(VocabPtr vocab, GrammarOptions options)
      : vocab_(std::move(vocab)), options_(options) {
    if (!vocab_) throw VocabError("grammar requires a vocabulary");
    const auto& schema = vocab_->schema();
    types_ = schema.node_types().size();
    etypes_ = schema.edge_types().size();
    budget_ = static_cast<std::uint32_t>(vocab_->node_budget());
    const std::size_t classes = types_ + 1;

    auto matches = [](std::size_t cls, std::size_t t) { return cls == 0 || cls == t + 1; };
    etype_ok_.assign(classes * classes * etypes_, false);
    etype_self_ok_.assign(classes * etypes_, false);
    for (std::size_t cs = 0; cs < classes; ++cs) {
      for (std::size_t k = 0; k < etypes_; ++k) {
        for (std::size_t s = 0; s < types_; ++s) {
          if (!matches(cs, s)) continue;
          if (legal(s, k, s)) etype_self_ok_[cs * etypes_ + k] = true;
          for (std::size_t cd = 0; cd < classes; ++cd) {
            for (std::size_t d = 0; d < types_; ++d) {
              if (matches(cd, d) && legal(s, k, d)) etype_ok_[(cs * classes + cd) * etypes_ + k] = true;
            }
          }
        }
      }
    }
    pair_ok_.assign(classes * classes, false);
    self_ok_.assign(classes, false);
    for (std::size_t cs = 0; cs < classes; ++cs) {
      for (std::size_t k = 0; k < etypes_; ++k) {
        if (etype_self_ok_[cs * etypes_ + k]) self_ok_[cs] = true;
        for (std::size_t cd = 0; cd < classes; ++cd) {
          if (etype_ok_[(cs * classes + cd) * etypes_ + k]) pair_ok_[cs * classes + cd] = true;
        }
      }
    }

    text_mask_ = TokenMask(vocab_->size());
    text_mask_.set_range(vocab_->text_base(), vocab_->size());
  }

  const Vocabulary& vocab() const { return *vocab_; }
  const VocabPtr& vocab_ptr() const { return vocab_; }
  const GrammarOptions& options() const { return options_; }

  GrammarState init_state() const {
    GrammarState s;
    s.class_counts.assign(types_ + 1, 0);
    return s;
  }

  bool is_terminal(const GrammarState& s) const { return s.phase == Phase::kDone; }

  TokenMask allowed_next(const GrammarState& s) const {
    TokenMask m(vocab_->size());
    const auto& v = *vocab_;
    switch (s.phase) {
      case Phase::kStart:
        m.set(v.id(Token::bog()));
        break;
      case Phase::kAwaitEdgeOrEnd:
      case Phase::kAwaitDeclOrNext:
        if (!s.pending.empty()) {
          m.set(v.id(Token::bon()));
          break;
        }
        m.set(v.id(Token::eog()));
        if (can_start_edge(s)) m.set(v.id(Token::boe()));
        if (can_declare_standalone(s)) m.set(v.id(Token::bon()));
        break;
      case Phase::kAwaitSrcNode:
        for (std::uint32_t i = 0; i <= s.used() && i < budget_; ++i) {
          if (src_viable(s, i)) m.set(v.node_base() + i);
        }
        break;
      case Phase::kAwaitDstNode:
        for (std::uint32_t i = 0; i <= s.used() && i < budget_; ++i) {
          if (dst_viable(s, i)) m.set(v.node_base() + i);
        }
        break;
      case Phase::kAwaitEdgeType:
        for (std::uint32_t k = 0; k < etypes_; ++k) {
          if (edge_type_viable(s, k)) m.set(v.edge_type_base() + k);
        }
        break;
      case Phase::kAwaitEdgeAttrOpen:
        m.set(v.id(Token::bof()));
        break;
      case Phase::kInEdgeAttr:
      case Phase::kInNodeAttr:
        if (s.span_length < options_.max_span_tokens) m = text_mask_;
        m.set(v.id(Token::eof()));
        break;
      case Phase::kAwaitDeclNode:
        m.set(v.node_base() + decl_target(s));
        break;
      case Phase::kAwaitNodeType:
        for (std::uint32_t t = 0; t < types_; ++t) {
          if (node_type_viable(s, t)) m.set(v.node_type_base() + t);
        }
        break;
      case Phase::kAwaitNodeAttrOpenOrEnd:
        m.set(v.id(s.slots_remaining > 0 ? Token::bof() : Token::eon()));
        break;
      case Phase::kDone:
        break;
    }
    return m;
  }

  /// Membership test equivalent to allowed_next(s).test(id), without building the mask.
  bool permits(const GrammarState& s, TokenId id) const {
    if (!vocab_->contains(id)) return false;
    const Token t = vocab_->classify(id);
    switch (s.phase) {
      case Phase::kStart:
        return t.kind == TokenKind::kBog;
      case Phase::kAwaitEdgeOrEnd:
      case Phase::kAwaitDeclOrNext:
        if (!s.pending.empty()) return t.kind == TokenKind::kBon;
        if (t.kind == TokenKind::kEog) return true;
        if (t.kind == TokenKind::kBoe) return can_start_edge(s);
        if (t.kind == TokenKind::kBon) return can_declare_standalone(s);
        return false;
      case Phase::kAwaitSrcNode:
        return t.kind == TokenKind::kNode && src_viable(s, t.index);
      case Phase::kAwaitDstNode:
        return t.kind == TokenKind::kNode && dst_viable(s, t.index);
      case Phase::kAwaitEdgeType:
        return t.kind == TokenKind::kEdgeType && edge_type_viable(s, t.index);
      case Phase::kAwaitEdgeAttrOpen:
        return t.kind == TokenKind::kBof;
      case Phase::kInEdgeAttr:
      case Phase::kInNodeAttr:
        return t.kind == TokenKind::kEof ||
               (t.kind == TokenKind::kText && s.span_length < options_.max_span_tokens);
      case Phase::kAwaitDeclNode:
        return t.kind == TokenKind::kNode && t.index == decl_target(s);
      case Phase::kAwaitNodeType:
        return t.kind == TokenKind::kNodeType && node_type_viable(s, t.index);
      case Phase::kAwaitNodeAttrOpenOrEnd:
        return t.kind == (s.slots_remaining > 0 ? TokenKind::kBof : TokenKind::kEon);
      case Phase::kDone:
        return false;
    }
    return false;
  }

  /// Advances in place. Returns false (state untouched) if the token is not allowed.
  bool try_advance(GrammarState& s, TokenId id) const {
    if (!permits(s, id)) return false;
    apply(s, vocab_->classify(id));
    return true;
  }

  /// Returns the successor state or throws RejectionError carrying the expected set.
  [[nodiscard]] GrammarState advance(GrammarState s, TokenId id, std::size_t position = 0) const {
    if (!try_advance(s, id)) throw rejection(s, id, position);
    return s;
  }

  RejectionError rejection(const GrammarState& s, TokenId id, std::size_t position) const {
    auto expected = allowed_next(s).to_vector();
    std::string surface =
        vocab_->contains(id) ? vocab_->surface(id) : "<out-of-vocabulary " + std::to_string(id) + ">";
    return RejectionError(position, id, std::move(surface), s.phase, expected,
                          describe(expected));
  }

  /// Short human-readable summary of a token set.
  std::string describe(const std::vector<TokenId>& ids) const {
    if (ids.empty()) return "nothing";
    std::size_t text = 0;
    std::string out = "{";
    std::size_t shown = 0;
    for (auto id : ids) {
      if (vocab_->kind(id) == TokenKind::kText) {
        ++text;
        continue;
      }
      if (shown == 8) {
        out += ", ...";
        ++shown;
        continue;
      }
      if (shown > 8) continue;
      if (shown > 0) out += ", ";
      out += vocab_->surface(id);
      ++shown;
    }
    if (text > 0) out += std::string(shown > 0 ? ", " : "") + std::to_string(text) + " text tokens";
    return out + "}";
  }

  // Exposed for the recovering parser, which forces state transitions.
  void apply(GrammarState& s, Token t) const {
    switch (s.phase) {
      case Phase::kStart:
        s.phase = Phase::kAwaitEdgeOrEnd;
        break;
      case Phase::kAwaitEdgeOrEnd:
      case Phase::kAwaitDeclOrNext:
        if (t.kind == TokenKind::kEog) {
          s.phase = Phase::kDone;
        } else if (t.kind == TokenKind::kBoe) {
          s.prior_used = s.used();
          s.phase = Phase::kAwaitSrcNode;
        } else {  // <bon>
          if (s.pending.empty()) s.standalone_tail = true;
          s.phase = Phase::kAwaitDeclNode;
        }
        break;
      case Phase::kAwaitSrcNode:
        s.edge_src = t.index;
        use(s, t.index, /*queue=*/true);
        s.phase = Phase::kAwaitDstNode;
        break;
      case Phase::kAwaitDstNode:
        s.edge_dst = t.index;
        use(s, t.index, /*queue=*/true);
        s.phase = Phase::kAwaitEdgeType;
        break;
      case Phase::kAwaitEdgeType:
        s.edge_type = t.index;
        s.phase = Phase::kAwaitEdgeAttrOpen;
        break;
      case Phase::kAwaitEdgeAttrOpen:
        s.span_length = 0;
        s.phase = Phase::kInEdgeAttr;
        break;
      case Phase::kInEdgeAttr:
        if (t.kind == TokenKind::kText) {
          ++s.span_length;
        } else {
          s.phase = Phase::kAwaitDeclOrNext;
        }
        break;
      case Phase::kAwaitDeclNode:
        s.current_node = t.index;
        if (!s.pending.empty() && s.pending.front() == t.index) {
          s.pending.erase(s.pending.begin());
          s.declaring_standalone = false;
        } else {
          use(s, t.index, /*queue=*/false);
          s.declaring_standalone = true;
        }
        s.phase = Phase::kAwaitNodeType;
        break;
      case Phase::kAwaitNodeType:
        declare(s, s.current_node, t.index);
        s.slots_remaining =
            static_cast<std::uint32_t>(vocab_->schema().node_type(NodeTypeId(t.index)).slots.size());
        s.phase = Phase::kAwaitNodeAttrOpenOrEnd;
        break;
      case Phase::kAwaitNodeAttrOpenOrEnd:
        if (t.kind == TokenKind::kBof) {
          s.span_length = 0;
          s.phase = Phase::kInNodeAttr;
        } else {
          s.phase = Phase::kAwaitDeclOrNext;
        }
        break;
      case Phase::kInNodeAttr:
        if (t.kind == TokenKind::kText) {
          ++s.span_length;
        } else {
          --s.slots_remaining;
          s.phase = Phase::kAwaitNodeAttrOpenOrEnd;
        }
        break;
      case Phase::kDone:
        break;
    }
  }

  /// Marks index i used (if new). New nodes are queued for declaration when
  /// `queue` is set. Indices may skip ahead only through forced recovery.
  void use(GrammarState& s, std::uint32_t i, bool queue) const {
    while (s.used() <= i) {
      s.node_types.push_back(-1);
      ++s.class_counts[0];
      if (queue && s.used() == i + 1) s.pending.push_back(i);
    }
  }

  /// Records the declared type of node i, replacing any earlier declaration.
  void declare(GrammarState& s, std::uint32_t i, std::uint32_t type) const {
    use(s, i, false);
    --s.class_counts[static_cast<std::size_t>(s.node_types[i] + 1)];
    s.node_types[i] = static_cast<std::int32_t>(type);
    ++s.class_counts[type + 1];
  }

 private:
  bool legal(std::size_t s, std::size_t k, std::size_t d) const {
    if (!options_.legality_filter) return true;
    return vocab_->schema().is_legal(NodeTypeId(s), EdgeTypeId(k), NodeTypeId(d));
  }

  std::size_t cls(const GrammarState& s, std::uint32_t i) const {
    return i < s.used() ? static_cast<std::size_t>(s.node_types[i] + 1) : 0;
  }
  bool pair_ok(std::size_t cs, std::size_t cd) const { return pair_ok_[cs * (types_ + 1) + cd]; }
  bool etype_ok(std::size_t cs, std::size_t cd, std::size_t k) const {
    return etype_ok_[(cs * (types_ + 1) + cd) * etypes_ + k];
  }
  bool etype_self_ok(std::size_t c, std::size_t k) const { return etype_self_ok_[c * etypes_ + k]; }

  bool fresh_available(const GrammarState& s, std::uint32_t extra = 0) const {
    return s.used() + extra < budget_;
  }

  /// Some used node other than `exclude` has a class cd with pair_ok(cs, cd).
  bool used_partner_exists(const GrammarState& s, std::size_t cs, std::size_t exclude_cls,
                           bool exclude) const {
    for (std::size_t cd = 0; cd <= types_; ++cd) {
      auto n = s.class_counts[cd];
      if (exclude && cd == exclude_cls) --n;
      if (n > 0 && pair_ok(cs, cd)) return true;
    }
    return false;
  }

  bool src_viable(const GrammarState& s, std::uint32_t i) const {
    if (i >= budget_) return false;
    if (i < s.used()) {
      const auto c = cls(s, i);
      return self_ok_[c] || used_partner_exists(s, c, c, true) ||
             (fresh_available(s) && pair_ok(c, 0));
    }
    if (i != s.used() || !fresh_available(s)) return false;
    if (options_.require_connected && s.used() > 0) return used_partner_exists(s, 0, 0, false);
    return used_partner_exists(s, 0, 0, false) || self_ok_[0] ||
           (fresh_available(s, 1) && pair_ok(0, 0));
  }

  bool dst_restricted(const GrammarState& s) const {
    return options_.require_connected && s.prior_used > 0 && s.edge_src >= s.prior_used;
  }

  bool dst_viable(const GrammarState& s, std::uint32_t j) const {
    if (j >= budget_) return false;
    const auto cs = cls(s, s.edge_src);
    if (j < s.used()) {
      if (dst_restricted(s) && j >= s.prior_used) return false;
      if (j == s.edge_src) return self_ok_[cs];
      return pair_ok(cs, cls(s, j));
    }
    return j == s.used() && fresh_available(s) && !dst_restricted(s) && pair_ok(cs, 0);
  }

  bool edge_type_viable(const GrammarState& s, std::uint32_t k) const {
    if (k >= etypes_) return false;
    const auto cs = cls(s, s.edge_src);
    if (s.edge_src == s.edge_dst) return etype_self_ok(cs, k);
    return etype_ok(cs, cls(s, s.edge_dst), k);
  }

  bool node_type_viable(const GrammarState& s, std::uint32_t t) const {
    if (t >= types_) return false;
    if (!options_.legality_filter || s.declaring_standalone) return true;
    const auto x = s.current_node;
    const auto k = s.edge_type;
    const std::size_t c = t + 1;
    if (x == s.edge_src && x == s.edge_dst) return etype_self_ok(c, k);
    if (x == s.edge_src) return etype_ok(c, cls(s, s.edge_dst), k);
    if (x == s.edge_dst) return etype_ok(cls(s, s.edge_src), c, k);
    return true;
  }

  bool can_start_edge(const GrammarState& s) const {
    if (s.standalone_tail || etypes_ == 0) return false;
    if (src_viable(s, s.used())) return true;
    for (std::size_t c = 0; c <= types_; ++c) {
      if (s.class_counts[c] == 0) continue;
      // Every used node of class c is equally viable as a source.
      const bool viable = self_ok_[c] || used_partner_exists(s, c, c, true) ||
                          (fresh_available(s) && pair_ok(c, 0));
      if (viable) return true;
    }
    return false;
  }

  bool can_declare_standalone(const GrammarState& s) const {
    if (!options_.allow_isolated_nodes || types_ == 0 || !fresh_available(s)) return false;
    return !(options_.require_connected && s.used() > 0);
  }

  std::uint32_t decl_target(const GrammarState& s) const {
    return s.pending.empty() ? s.used() : s.pending.front();
  }

  VocabPtr vocab_;
  GrammarOptions options_;
  std::size_t types_ = 0;
  std::size_t etypes_ = 0;
  std::uint32_t budget_ = 0;
  std::vector<bool> etype_ok_;
  std::vector<bool> etype_self_ok_;
  std::vector<bool> pair_ok_;
  std::vector<bool> self_ok_;
  TokenMask text_mask_;
};

}  // namespace graphseq
