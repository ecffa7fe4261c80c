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

// Graph -> token sequence.
//
//   <bog>
//   per edge, in edge order:
//     <boe> <node_u> <node_v> <etype_k> <bof> edge-attrs <eof>
//     for u then v, if not yet declared:
//       <bon> <node_x> <ntype_j> (<bof> attr <eof>) per node slot <eon>
//   per node without edges, in input order:
//     <bon> <node_x> <ntype_j> (<bof> attr <eof>)... <eon>
//   <eog>
//
// All edge attribute slots share one span, joined by 0x1F. Node indices are
// the canonical indexing of the chosen edge order. Timestamps are not emitted.

#include <cctype>
#include <limits>
#include <string>
#include <vector>

#include "graphseq/graph.hpp"
#include "graphseq/node_link.hpp"
#include "graphseq/ordering.hpp"
#include "graphseq/vocab.hpp"

namespace graphseq {

struct TokenSequence {
  std::vector<TokenId> tokens;
  bool complete = true;  // false when generation stopped before <eog>

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

inline std::string join_edge_attrs(const std::vector<std::string>& attrs) {
  std::string out;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i > 0) out.push_back(kUnitSeparator);
    out += attrs[i];
  }
  return out;
}

/// Inverse of join_edge_attrs. Missing trailing slots are empty; surplus
/// separators stay inside the last slot.
inline std::vector<std::string> split_edge_attrs(std::string_view joined, std::size_t arity) {
  std::vector<std::string> out;
  if (arity == 0) return out;
  out.reserve(arity);
  while (out.size() + 1 < arity) {
    auto sep = joined.find(kUnitSeparator);
    if (sep == std::string_view::npos) break;
    out.emplace_back(joined.substr(0, sep));
    joined.remove_prefix(sep + 1);
  }
  out.emplace_back(joined);
  out.resize(arity);
  return out;
}

/// Core emitter. Calls sink(Token) for every token, in order.
template <typename Sink>
void emit_tokens(const Graph& g, const EdgeOrder& order, const TextTokenizer& text,
                 std::size_t node_budget, Sink&& sink) {
  if (g.node_count() > node_budget) {
    throw BudgetError("graph has " + std::to_string(g.node_count()) +
                      " nodes but the node budget is " + std::to_string(node_budget));
  }
  const auto& schema = g.schema();
  auto ci = canonical_index(g, order);

  auto emit_text = [&](std::string_view s) {
    for (auto p : text.encode(s)) sink(Token::text(p));
  };
  std::vector<bool> declared(g.node_count(), false);
  auto declare = [&](std::size_t v) {
    if (declared[v]) return;
    declared[v] = true;
    const auto& n = g.node(v);
    sink(Token::bon());
    sink(Token::node(ci.index_of[v]));
    sink(Token::node_type(n.type));
    for (const auto& value : n.attrs) {
      sink(Token::bof());
      emit_text(value);
      sink(Token::eof());
    }
    sink(Token::eon());
  };

  sink(Token::bog());
  for (auto ei : order.permutation) {
    const auto& e = g.edge(ei);
    for (std::size_t s = 0; s + 1 < e.attrs.size(); ++s) {
      if (e.attrs[s].find(kUnitSeparator) != std::string::npos) {
        throw EncodeError("edge #" + std::to_string(ei) + " attribute '" +
                          schema.edge_type(e.type).slots[s].name +
                          "' contains the 0x1F slot separator");
      }
    }
    sink(Token::boe());
    sink(Token::node(ci.index_of[e.source]));
    sink(Token::node(ci.index_of[e.target]));
    sink(Token::edge_type(e.type));
    sink(Token::bof());
    emit_text(join_edge_attrs(e.attrs));
    sink(Token::eof());
    declare(e.source);
    declare(e.target);
  }
  for (std::size_t i = ci.touched; i < ci.node_at.size(); ++i) declare(ci.node_at[i]);
  sink(Token::eog());
}

inline TokenSequence encode(const Graph& g, const Vocabulary& vocab,
                            OrderPolicy policy = OrderPolicy::kAuto) {
  if (g.schema_ptr() != vocab.schema_ptr() &&
      g.schema().fingerprint() != vocab.schema().fingerprint()) {
    throw VocabError("graph and vocabulary use different schemas");
  }
  TokenSequence seq;
  auto order = order_edges(g, policy);
  emit_tokens(g, order, vocab.text_tokenizer(), vocab.node_budget(),
              [&](Token t) { seq.tokens.push_back(vocab.id(t)); });
  return seq;
}

/// Vocabulary-free canonical token stream (byte-level payloads, unbounded budget).
inline std::vector<Token> canonical_tokens(const Graph& g, OrderPolicy policy = OrderPolicy::kAuto) {
  std::vector<Token> out;
  auto order = order_edges(g, policy);
  emit_tokens(g, order, *byte_tokenizer(), std::numeric_limits<std::size_t>::max(),
              [&](Token t) { out.push_back(t); });
  return out;
}

/// Official graph equality: identical encodings under the default ordering.
/// Node ids do not participate.
inline bool canonical_equal(const Graph& a, const Graph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  return canonical_tokens(a) == canonical_tokens(b);
}

/// Token count of a JSON text: each maximal run of [A-Za-z0-9_.+-] is one
/// token, every other non-whitespace byte is one token.
inline std::size_t json_text_token_count(std::string_view text) {
  auto is_word = [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '+' || c == '-';
  };
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (is_word(c)) {
      while (i < text.size() && is_word(static_cast<unsigned char>(text[i]))) ++i;
      ++n;
    } else {
      ++i;
      ++n;
    }
  }
  return n;
}

struct CompressionReport {
  std::size_t schema_tokens = 0;
  std::size_t baseline_tokens = 0;
  double ratio = 0.0;
};

/// Compares the encoded length with the node-link document's length. Attribute
/// values count one token per text-tokenizer payload token on both sides;
/// the rest of the JSON is counted with json_text_token_count.
inline CompressionReport compression_report(const Graph& g, const Vocabulary& vocab) {
  CompressionReport r;
  r.schema_tokens = encode(g, vocab).size();

  auto doc = node_link_json(g);
  std::size_t payload = 0;
  const auto& text = vocab.text_tokenizer();
  for (auto* list : {&doc["nodes"], &doc["links"]}) {
    for (auto& item : *list) {
      for (auto& [slot, value] : item["attrs"].items()) {
        payload += text.encode(value.get<std::string>()).size();
        value = "";
      }
    }
  }
  r.baseline_tokens =
      json_text_token_count(doc.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace)) +
      payload;
  r.ratio = r.baseline_tokens == 0 ? 0.0
                                   : static_cast<double>(r.schema_tokens) /
                                         static_cast<double>(r.baseline_tokens);
  return r;
}

}  // namespace graphseq
