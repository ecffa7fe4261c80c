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

// Token vocabulary.
//
// Id layout (dense, stable for a given schema and node budget N):
//
//   0..6                      <bog> <eog> <bon> <eon> <boe> <bof> <eof>
//   7 .. 7+N-1                <node_0> .. <node_{N-1}>
//   next |node types|         <ntype_0> ..
//   next |edge types|         <etype_0> ..
//   remaining                 TEXT payload tokens, in text-tokenizer order
//
// Text dump format: whitespace-separated surfaces. Structural surfaces are
// the bracketed names above; a TEXT token is written as its payload bytes
// with everything outside printable ASCII, plus '%', '<' and '>', escaped
// as %XX (uppercase hex).

#include <charconv>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "graphseq/common.hpp"
#include "graphseq/schema.hpp"

namespace graphseq {

using TokenId = std::uint32_t;

inline constexpr std::size_t kDefaultNodeBudget = 512;
inline constexpr std::size_t kFixedTokenCount = 7;

enum class TokenKind : std::uint8_t {
  kBog,
  kEog,
  kBon,
  kEon,
  kBoe,
  kBof,
  kEof,
  kNode,
  kNodeType,
  kEdgeType,
  kText,
};

struct Token {
  TokenKind kind = TokenKind::kBog;
  std::uint32_t index = 0;  // NODE/NTYPE/ETYPE/TEXT payload index; 0 otherwise

  static constexpr Token bog() { return {TokenKind::kBog, 0}; }
  static constexpr Token eog() { return {TokenKind::kEog, 0}; }
  static constexpr Token bon() { return {TokenKind::kBon, 0}; }
  static constexpr Token eon() { return {TokenKind::kEon, 0}; }
  static constexpr Token boe() { return {TokenKind::kBoe, 0}; }
  static constexpr Token bof() { return {TokenKind::kBof, 0}; }
  static constexpr Token eof() { return {TokenKind::kEof, 0}; }
  static constexpr Token node(std::size_t i) { return {TokenKind::kNode, static_cast<std::uint32_t>(i)}; }
  static constexpr Token node_type(NodeTypeId t) { return {TokenKind::kNodeType, t.value}; }
  static constexpr Token edge_type(EdgeTypeId t) { return {TokenKind::kEdgeType, t.value}; }
  static constexpr Token text(std::uint32_t payload) { return {TokenKind::kText, payload}; }

  bool is_anchor() const {
    return kind == TokenKind::kBoe || kind == TokenKind::kBon || kind == TokenKind::kBof;
  }

  auto operator<=>(const Token&) const = default;
};

/// Reversible mapping between byte strings and payload token indices.
class TextTokenizer {
 public:
  virtual ~TextTokenizer() = default;
  virtual std::string name() const = 0;
  virtual std::size_t size() const = 0;
  virtual std::vector<std::uint32_t> encode(std::string_view text) const = 0;
  virtual std::string decode(std::span<const std::uint32_t> payload) const = 0;
  /// Bytes carried by one payload token.
  virtual std::string payload_bytes(std::uint32_t payload) const = 0;
};

/// One token per byte.
class ByteTokenizer final : public TextTokenizer {
 public:
  std::string name() const override { return "byte"; }
  std::size_t size() const override { return 256; }
  std::vector<std::uint32_t> encode(std::string_view text) const override {
    std::vector<std::uint32_t> out;
    out.reserve(text.size());
    for (unsigned char c : text) out.push_back(c);
    return out;
  }
  std::string decode(std::span<const std::uint32_t> payload) const override {
    std::string out;
    out.reserve(payload.size());
    for (auto p : payload) out.push_back(static_cast<char>(p));
    return out;
  }
  std::string payload_bytes(std::uint32_t payload) const override {
    return std::string(1, static_cast<char>(payload));
  }
};

inline std::shared_ptr<const TextTokenizer> byte_tokenizer() {
  static const auto instance = std::make_shared<const ByteTokenizer>();
  return instance;
}

/// Escapes payload bytes for the text dump.
inline std::string escape_payload(std::string_view bytes) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : bytes) {
    if (c > 0x20 && c < 0x7f && c != '%' && c != '<' && c != '>') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

inline std::optional<std::string> unescape_payload(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out.push_back(s[i]);
      continue;
    }
    if (i + 2 >= s.size()) return std::nullopt;
    unsigned v = 0;
    auto [p, ec] = std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16);
    if (ec != std::errc{} || p != s.data() + i + 3) return std::nullopt;
    out.push_back(static_cast<char>(v));
    i += 2;
  }
  return out;
}

class Vocabulary {
 public:
  Vocabulary(SchemaPtr schema, std::size_t node_budget = kDefaultNodeBudget,
             std::shared_ptr<const TextTokenizer> text = byte_tokenizer())
      : schema_(std::move(schema)), node_budget_(node_budget), text_(std::move(text)) {
    if (!schema_) throw VocabError("vocabulary requires a schema");
    if (node_budget_ == 0) throw VocabError("node budget N must be at least 1");
    if (!text_) throw VocabError("vocabulary requires a text tokenizer");
    node_base_ = kFixedTokenCount;
    ntype_base_ = node_base_ + node_budget_;
    etype_base_ = ntype_base_ + schema_->node_types().size();
    text_base_ = etype_base_ + schema_->edge_types().size();
    size_ = text_base_ + text_->size();
    surfaces_.reserve(size_);
    for (TokenId id = 0; id < size_; ++id) {
      auto s = compute_surface(classify(id));
      if (!by_surface_.emplace(s, id).second) {
        throw VocabError("two tokens share the surface '" + s + "'");
      }
      surfaces_.push_back(std::move(s));
    }
  }

  const GraphSchema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }
  const TextTokenizer& text_tokenizer() const { return *text_; }
  std::size_t node_budget() const { return node_budget_; }
  std::size_t size() const { return size_; }
  /// Number of non-TEXT tokens: 7 + N + |node types| + |edge types|.
  std::size_t structural_size() const { return text_base_; }

  TokenId text_base() const { return static_cast<TokenId>(text_base_); }
  TokenId node_base() const { return static_cast<TokenId>(node_base_); }
  TokenId node_type_base() const { return static_cast<TokenId>(ntype_base_); }
  TokenId edge_type_base() const { return static_cast<TokenId>(etype_base_); }

  TokenId id(Token t) const {
    switch (t.kind) {
      case TokenKind::kBog:
      case TokenKind::kEog:
      case TokenKind::kBon:
      case TokenKind::kEon:
      case TokenKind::kBoe:
      case TokenKind::kBof:
      case TokenKind::kEof:
        return static_cast<TokenId>(t.kind);
      case TokenKind::kNode:
        if (t.index >= node_budget_) {
          throw BudgetError("<node_" + std::to_string(t.index) + "> exceeds node budget " +
                            std::to_string(node_budget_));
        }
        return static_cast<TokenId>(node_base_ + t.index);
      case TokenKind::kNodeType:
        if (t.index >= schema_->node_types().size()) throw VocabError("node type index out of range");
        return static_cast<TokenId>(ntype_base_ + t.index);
      case TokenKind::kEdgeType:
        if (t.index >= schema_->edge_types().size()) throw VocabError("edge type index out of range");
        return static_cast<TokenId>(etype_base_ + t.index);
      case TokenKind::kText:
        if (t.index >= text_->size()) throw VocabError("text payload index out of range");
        return static_cast<TokenId>(text_base_ + t.index);
    }
    throw VocabError("invalid token kind");
  }

  bool contains(TokenId id) const { return id < size_; }

  Token classify(TokenId id) const {
    if (id < kFixedTokenCount) return {static_cast<TokenKind>(id), 0};
    if (id < ntype_base_) return Token::node(id - node_base_);
    if (id < etype_base_) return {TokenKind::kNodeType, static_cast<std::uint32_t>(id - ntype_base_)};
    if (id < text_base_) return {TokenKind::kEdgeType, static_cast<std::uint32_t>(id - etype_base_)};
    if (id < size_) return Token::text(static_cast<std::uint32_t>(id - text_base_));
    throw VocabError("token id " + std::to_string(id) + " is outside the vocabulary (size " +
                     std::to_string(size_) + ")");
  }

  TokenKind kind(TokenId id) const { return classify(id).kind; }

  const std::string& surface(TokenId id) const {
    if (id >= size_) classify(id);  // throws
    return surfaces_[id];
  }

  std::optional<TokenId> find_surface(std::string_view s) const {
    auto it = by_surface_.find(std::string(s));
    if (it == by_surface_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<TokenId> tokenize_text(std::string_view s) const {
    auto payload = text_->encode(s);
    std::vector<TokenId> out;
    out.reserve(payload.size());
    for (auto p : payload) out.push_back(static_cast<TokenId>(text_base_ + p));
    return out;
  }

  std::string detokenize_text(std::span<const TokenId> ids) const {
    std::vector<std::uint32_t> payload;
    payload.reserve(ids.size());
    for (auto id : ids) {
      auto t = classify(id);
      if (t.kind != TokenKind::kText) {
        throw VocabError("detokenize: " + surfaces_[id] + " is not a text token");
      }
      payload.push_back(t.index);
    }
    return text_->decode(payload);
  }

  /// JSON manifest: every token's id and surface, for external mask consumers.
  nlohmann::ordered_json manifest() const {
    nlohmann::ordered_json j;
    j["format"] = "graphseq-vocab";
    j["version"] = 1;
    j["node_budget"] = node_budget_;
    j["text_tokenizer"] = text_->name();
    j["schema_fingerprint"] = fingerprint_hex(schema_->fingerprint());
    j["structural_size"] = structural_size();
    j["size"] = size_;
    j["tokens"] = nlohmann::ordered_json::array();
    for (TokenId id = 0; id < size_; ++id) {
      j["tokens"].push_back({{"id", id}, {"surface", surfaces_[id]}});
    }
    return j;
  }

  std::string dump_text(std::span<const TokenId> ids) const {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i > 0) out.push_back(' ');
      out += surface(ids[i]);
    }
    return out;
  }

  std::vector<TokenId> parse_text_dump(std::string_view text) const {
    std::vector<TokenId> out;
    std::size_t i = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; };
    while (i < text.size()) {
      while (i < text.size() && is_space(text[i])) ++i;
      std::size_t j = i;
      while (j < text.size() && !is_space(text[j])) ++j;
      if (j > i) {
        auto item = text.substr(i, j - i);
        auto id = find_surface(item);
        if (!id) {
          // Accept unnormalized escapes such as "%61" for "a".
          auto bytes = unescape_payload(item);
          if (bytes) id = find_surface(escape_payload(*bytes));
        }
        if (!id) throw VocabError("unknown token surface '" + std::string(item) + "'");
        out.push_back(*id);
      }
      i = j;
    }
    return out;
  }

  /// Hash over budget, tokenizer and schema; equal fingerprints mean equal id layouts.
  std::uint64_t fingerprint() const {
    return fnv1a64(std::to_string(node_budget_) + "/" + text_->name() + "/" +
                   fingerprint_hex(schema_->fingerprint()));
  }

  static std::string fingerprint_hex(std::uint64_t v) {
    char buf[17];
    auto [p, ec] = std::to_chars(buf, buf + 16, v, 16);
    std::string s(buf, p);
    return std::string(16 - s.size(), '0') + s;
  }

 private:
  std::string compute_surface(Token t) const {
    switch (t.kind) {
      case TokenKind::kBog:
        return "<bog>";
      case TokenKind::kEog:
        return "<eog>";
      case TokenKind::kBon:
        return "<bon>";
      case TokenKind::kEon:
        return "<eon>";
      case TokenKind::kBoe:
        return "<boe>";
      case TokenKind::kBof:
        return "<bof>";
      case TokenKind::kEof:
        return "<eof>";
      case TokenKind::kNode:
        return "<node_" + std::to_string(t.index) + ">";
      case TokenKind::kNodeType:
        return "<ntype_" + std::to_string(t.index) + ">";
      case TokenKind::kEdgeType:
        return "<etype_" + std::to_string(t.index) + ">";
      case TokenKind::kText:
        return escape_payload(text_->payload_bytes(t.index));
    }
    return {};
  }

  SchemaPtr schema_;
  std::size_t node_budget_;
  std::shared_ptr<const TextTokenizer> text_;
  std::size_t node_base_ = 0, ntype_base_ = 0, etype_base_ = 0, text_base_ = 0, size_ = 0;
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, TokenId> by_surface_;
};

using VocabPtr = std::shared_ptr<const Vocabulary>;

inline VocabPtr build_vocab(SchemaPtr schema, std::size_t node_budget = kDefaultNodeBudget,
                            std::shared_ptr<const TextTokenizer> text = byte_tokenizer()) {
  return std::make_shared<const Vocabulary>(std::move(schema), node_budget, std::move(text));
}

}  // namespace graphseq
