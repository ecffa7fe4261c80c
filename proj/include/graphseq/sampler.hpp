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

// Grammar-masked n-gram sampler and the logit-mask line protocol.
//
// Every history starts with a start marker whose id is vocab.size(); it is
// repeated to pad contexts shorter than order-1. Each condition tag has its
// own count tables. Scores for a step come from the longest context whose
// counts, restricted to the allowed set A, are nonzero:
//   p(t) = (c(t) + k) / (C + k|A|)   for t in A,
// falling back to uniform over A when no context qualifies.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "graphseq/encoder.hpp"
#include "graphseq/grammar.hpp"

namespace graphseq {

struct TaggedSequence {
  std::vector<TokenId> tokens;
  std::string tag;  // empty: untagged
};

class NGramModel {
 public:
  using Counts = std::vector<std::pair<TokenId, std::uint64_t>>;  // sorted by id

  NGramModel(std::size_t order, double k, std::size_t vocab_size, std::string vocab_fingerprint)
      : order_(order), k_(k), vocab_size_(vocab_size), vocab_fingerprint_(std::move(vocab_fingerprint)) {
    if (order_ < 1) throw ModelError("n-gram order must be at least 1");
    if (!(k_ >= 0.0)) throw ModelError("smoothing constant must be non-negative");
  }

  std::size_t order() const { return order_; }
  double k() const { return k_; }
  std::size_t vocab_size() const { return vocab_size_; }
  const std::string& vocab_fingerprint() const { return vocab_fingerprint_; }
  TokenId start_marker() const { return static_cast<TokenId>(vocab_size_); }

  std::vector<std::string> tags() const {
    std::vector<std::string> out;
    for (const auto& [tag, _] : tables_) out.push_back(tag);
    return out;
  }
  bool has_tag(const std::string& tag) const { return tables_.contains(tag); }

  /// Adds one training sequence under `tag`.
  void observe(const std::vector<TokenId>& tokens, const std::string& tag) {
    auto& table = tables_[tag];
    std::vector<TokenId> history(order_ - 1, start_marker());
    for (auto t : tokens) {
      if (t >= vocab_size_) throw ModelError("token id " + std::to_string(t) + " outside the vocabulary");
      for (std::size_t len = 0; len < order_; ++len) {
        auto& counts = table[key(history, len)];
        auto it = std::lower_bound(counts.begin(), counts.end(), t,
                                   [](const auto& e, TokenId id) { return e.first < id; });
        if (it != counts.end() && it->first == t) {
          ++it->second;
        } else {
          counts.insert(it, {t, 1});
        }
      }
      if (!history.empty()) {
        history.erase(history.begin());
        history.push_back(t);
      }
    }
  }

  /// Counts for the last `len` tokens of `history`, or null if never observed.
  const Counts* lookup(const std::string& tag, const std::vector<TokenId>& history,
                       std::size_t len) const {
    auto t = tables_.find(tag);
    if (t == tables_.end()) return nullptr;
    auto c = t->second.find(key(history, len));
    return c == t->second.end() ? nullptr : &c->second;
  }

  /// Fills `probs` (indexed by token id) with the masked distribution.
  void distribution(const std::string& tag, const std::vector<TokenId>& history,
                    const TokenMask& allowed, std::vector<double>& probs) const {
    probs.assign(vocab_size_, 0.0);
    const auto a = static_cast<double>(allowed.count());
    if (a == 0) return;
    for (std::size_t len = order_; len-- > 0;) {
      const Counts* counts = lookup(tag, history, len);
      if (!counts) continue;
      double total = 0.0;
      for (const auto& [id, c] : *counts) {
        if (allowed.test(id)) total += static_cast<double>(c);
      }
      if (total == 0.0) continue;
      const double denom = total + k_ * a;
      allowed.for_each([&](std::size_t id) { probs[id] = k_ / denom; });
      for (const auto& [id, c] : *counts) {
        if (allowed.test(id)) probs[id] += static_cast<double>(c) / denom;
      }
      return;
    }
    allowed.for_each([&](std::size_t id) { probs[id] = 1.0 / a; });
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["format"] = "graphseq-ngram";
    j["version"] = 1;
    j["order"] = order_;
    j["k"] = k_;
    j["vocab_size"] = vocab_size_;
    j["vocab_fingerprint"] = vocab_fingerprint_;
    auto& tags = j["tags"] = nlohmann::ordered_json::object();
    for (const auto& [tag, table] : tables_) {
      std::map<std::vector<TokenId>, const Counts*> sorted;
      for (const auto& [k, counts] : table) sorted.emplace(unkey(k), &counts);
      auto& list = tags[tag] = nlohmann::ordered_json::array();
      for (const auto& [ctx, counts] : sorted) {
        nlohmann::ordered_json next = nlohmann::ordered_json::array();
        for (const auto& [id, c] : *counts) next.push_back({id, c});
        list.push_back({{"context", ctx}, {"next", std::move(next)}});
      }
    }
    return j;
  }

  static NGramModel from_json(const nlohmann::json& j) {
    try {
      if (j.at("format") != "graphseq-ngram") throw ModelError("not a graphseq n-gram model");
      if (j.at("version") != 1) throw ModelError("unsupported model version");
      NGramModel m(j.at("order").get<std::size_t>(), j.at("k").get<double>(),
                   j.at("vocab_size").get<std::size_t>(), j.at("vocab_fingerprint").get<std::string>());
      for (const auto& [tag, list] : j.at("tags").items()) {
        auto& table = m.tables_[tag];
        for (const auto& entry : list) {
          auto ctx = entry.at("context").get<std::vector<TokenId>>();
          if (ctx.size() >= m.order_) throw ModelError("context longer than order-1");
          Counts counts;
          for (const auto& pair : entry.at("next")) {
            counts.emplace_back(pair.at(0).get<TokenId>(), pair.at(1).get<std::uint64_t>());
          }
          std::sort(counts.begin(), counts.end());
          table[m.key(ctx, ctx.size())] = std::move(counts);
        }
      }
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw ModelError(std::string("malformed model file: ") + e.what());
    }
  }

 private:
  std::string key(const std::vector<TokenId>& history, std::size_t len) const {
    std::string k;
    k.reserve(len * 4);
    for (std::size_t i = history.size() - len; i < history.size(); ++i) {
      for (int b = 0; b < 4; ++b) k.push_back(static_cast<char>((history[i] >> (8 * b)) & 0xFF));
    }
    return k;
  }
  static std::vector<TokenId> unkey(const std::string& k) {
    std::vector<TokenId> out(k.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
      TokenId v = 0;
      for (int b = 0; b < 4; ++b) v |= static_cast<TokenId>(static_cast<unsigned char>(k[4 * i + b])) << (8 * b);
      out[i] = v;
    }
    return out;
  }

  std::size_t order_;
  double k_;
  std::size_t vocab_size_;
  std::string vocab_fingerprint_;
  std::map<std::string, std::unordered_map<std::string, Counts>> tables_;
};

inline NGramModel train_ngram(const std::vector<TaggedSequence>& corpus, const Vocabulary& vocab,
                              std::size_t order, double k) {
  if (corpus.empty()) throw ModelError("training corpus is empty");
  NGramModel m(order, k, vocab.size(), Vocabulary::fingerprint_hex(vocab.fingerprint()));
  for (const auto& s : corpus) m.observe(s.tokens, s.tag);
  return m;
}

struct GenerationConfig {
  std::size_t max_tokens = 100000;
  double temperature = 1.0;  // <= 1e-6 selects greedy decoding
  std::uint64_t seed = 0;
  std::optional<std::string> condition_tag;

  void validate() const {
    if (max_tokens < 2) throw ModelError("max_tokens must be at least 2");
    if (!(temperature > 0.0)) throw ModelError("temperature must be positive");
  }
};

/// Grammar used for sampling: schema legality plus connected output.
inline Grammar sampling_grammar(const VocabPtr& vocab) {
  auto o = GrammarOptions::for_schema(vocab->schema());
  o.require_connected = true;
  return Grammar(vocab, o);
}

/// Draws one sequence. Uses `rng` so callers can chain draws from one seed.
inline TokenSequence sample(const NGramModel& model, const Grammar& grammar,
                            const GenerationConfig& config, std::mt19937_64& rng) {
  config.validate();
  if (model.vocab_size() != grammar.vocab().size()) {
    throw ModelError("model and grammar use different vocabularies");
  }
  const std::string tag = config.condition_tag.value_or("");
  if (!model.has_tag(tag)) {
    throw ModelError(tag.empty() ? "model has no untagged counts; pass a condition tag"
                                 : "model has no counts for condition tag '" + tag + "'");
  }
  TokenSequence out;
  out.complete = false;
  auto state = grammar.init_state();
  std::vector<TokenId> history(model.order() - 1, model.start_marker());
  std::vector<double> probs;
  const bool greedy = config.temperature <= 1e-6;
  while (out.tokens.size() < config.max_tokens) {
    const auto allowed = grammar.allowed_next(state);
    if (allowed.none()) throw ModelError("grammar produced an empty mask before the end");
    model.distribution(tag, history, allowed, probs);
    TokenId pick = 0;
    if (greedy) {
      double best = -1.0;
      allowed.for_each([&](std::size_t id) {
        if (probs[id] > best) {
          best = probs[id];
          pick = static_cast<TokenId>(id);
        }
      });
    } else {
      double total = 0.0;
      if (config.temperature != 1.0) {
        allowed.for_each([&](std::size_t id) { probs[id] = std::pow(probs[id], 1.0 / config.temperature); });
      }
      allowed.for_each([&](std::size_t id) { total += probs[id]; });
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      bool chosen = false;
      allowed.for_each([&](std::size_t id) {
        if (chosen) return;
        pick = static_cast<TokenId>(id);
        u -= probs[id];
        if (u < 0.0 && probs[id] > 0.0) chosen = true;
      });
    }
    if (!grammar.try_advance(state, pick)) throw ModelError("sampler chose a masked token");
    out.tokens.push_back(pick);
    if (!history.empty()) {
      history.erase(history.begin());
      history.push_back(pick);
    }
    if (grammar.is_terminal(state)) {
      out.complete = true;
      break;
    }
  }
  return out;
}

inline TokenSequence sample(const NGramModel& model, const Grammar& grammar,
                            const GenerationConfig& config) {
  std::mt19937_64 rng(config.seed);
  return sample(model, grammar, config, rng);
}

/// One automaton behind the JSON-lines mask protocol.
///   request:  {"op":"reset"} | {"op":"advance","token":id} | {"op":"mask"}
///   reply:    {"state":"ok"|"rejected"|"error","allowed":[ids],"terminal":bool}
/// Error replies add "error"; a rejected or malformed request leaves the state unchanged.
class MaskServer {
 public:
  explicit MaskServer(Grammar grammar) : grammar_(std::move(grammar)), state_(grammar_.init_state()) {}

  std::string handle(std::string_view line) {
    std::string status = "ok";
    std::string error;
    try {
      auto req = nlohmann::json::parse(line);
      if (!req.is_object() || !req.contains("op") || !req["op"].is_string()) {
        throw std::invalid_argument("request needs a string \"op\"");
      }
      const auto op = req["op"].get<std::string>();
      if (op == "reset") {
        state_ = grammar_.init_state();
      } else if (op == "mask") {
      } else if (op == "advance") {
        if (!req.contains("token") || !req["token"].is_number_unsigned()) {
          throw std::invalid_argument("advance needs a non-negative integer \"token\"");
        }
        const auto id = req["token"].get<std::uint64_t>();
        if (id > std::numeric_limits<TokenId>::max() ||
            !grammar_.try_advance(state_, static_cast<TokenId>(id))) {
          status = "rejected";
        }
      } else {
        throw std::invalid_argument("unknown op '" + op + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      status = "error";
      error = e.what();
    } catch (const std::invalid_argument& e) {
      status = "error";
      error = e.what();
    }
    nlohmann::ordered_json reply;
    reply["state"] = status;
    reply["allowed"] = grammar_.allowed_next(state_).to_vector();
    reply["terminal"] = grammar_.is_terminal(state_);
    if (!error.empty()) reply["error"] = error;
    return reply.dump();
  }

  const GrammarState& state() const { return state_; }

 private:
  Grammar grammar_;
  GrammarState state_;
};

}  // namespace graphseq
