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


#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

namespace graphseq {
namespace {

using testing::schema;
using testing::vocab;

TEST(Encode, EmptyGraph) {
  Graph g(schema());
  EXPECT_EQ(encode(g, *vocab()).tokens, testing::ids(*vocab(), {Token::bog(), Token::eog()}));
}

TEST(Encode, OneEdgeTrace) {
  const auto& v = *vocab();
  auto g = testing::one_edge_graph();
  std::vector<TokenId> want =
      testing::ids(v, {Token::bog(), Token::boe(), Token::node(0), Token::node(1),
                       Token::edge_type(testing::etype("WRITE")), Token::bof(), Token::eof(), Token::bon(),
                       Token::node(0), Token::node_type(testing::ntype("Process")), Token::bof()});
  testing::append_text(v, want, "x");
  for (auto t : {Token::eof(), Token::eon(), Token::bon(), Token::node(1),
                 Token::node_type(testing::ntype("File")), Token::bof()}) {
    want.push_back(v.id(t));
  }
  testing::append_text(v, want, "/a");
  for (auto t : {Token::eof(), Token::eon(), Token::eog()}) want.push_back(v.id(t));
  EXPECT_EQ(encode(g, v).tokens, want);
}

TEST(Encode, ReusedNodesAreNotRedeclared) {
  const auto& v = *vocab();
  auto g = testing::one_edge_graph();
  g.add_edge("p0", "f0", "READ");
  auto t = encode(g, v, OrderPolicy::kAsGiven).tokens;
  EXPECT_EQ(std::count(t.begin(), t.end(), v.id(Token::bon())), 2);
  EXPECT_EQ(std::count(t.begin(), t.end(), v.id(Token::boe())), 2);
  // The second edge's construct directly follows the second declaration.
  const std::vector<TokenId> tail = testing::ids(
      v, {Token::eon(), Token::boe(), Token::node(0), Token::node(1), Token::edge_type(testing::etype("READ")),
          Token::bof(), Token::eof(), Token::eog()});
  ASSERT_GE(t.size(), tail.size());
  EXPECT_TRUE(std::equal(tail.begin(), tail.end(), t.end() - static_cast<std::ptrdiff_t>(tail.size())));
}

TEST(Encode, StructuralCountClosedForm) {
  std::mt19937_64 rng(17);
  const auto& v = *vocab();
  for (int i = 0; i < 200; ++i) {
    auto g = fuzz_provenance_graph(schema(), rng, {30, 60, 12});
    std::size_t structural = 0, text = 0;
    for (auto id : encode(g, v).tokens) (v.kind(id) == TokenKind::kText ? text : structural)++;

    // Two graph markers, six per edge, four plus two per slot per node.
    std::size_t want_structural = 2 + 6 * g.edge_count();
    std::size_t want_text = 0;
    for (const auto& n : g.nodes()) {
      want_structural += 4 + 2 * n.attrs.size();
      for (const auto& a : n.attrs) want_text += a.size();
    }
    for (const auto& e : g.edges()) {
      for (const auto& a : e.attrs) want_text += a.size();
      if (!e.attrs.empty()) want_text += e.attrs.size() - 1;
    }
    EXPECT_EQ(structural, want_structural);
    EXPECT_EQ(text, want_text);
  }
}

TEST(Encode, DeterministicAndBudgeted) {
  auto g = testing::five_edge_sample();
  EXPECT_EQ(encode(g, *vocab()), encode(g, *vocab()));
  EXPECT_THROW(encode(g, *build_vocab(schema(), 4)), BudgetError);
  EXPECT_NO_THROW(encode(g, *build_vocab(schema(), 5)));
}

TEST(Encode, SeparatorOnlyAllowedInLastSlot) {
  auto g = testing::one_edge_graph();
  g.add_node("s0", "Socket", {"1.2.3.4|5"});
  g.add_edge("p0", "s0", "SEND", {"1\x1f" "2", "PSH"});
  EXPECT_THROW(encode(g, *vocab()), EncodeError);
}

TEST(EdgeAttrs, JoinSplitRoundtrip) {
  EXPECT_EQ(join_edge_attrs({"512", "PSH"}), "512\x1fPSH");
  EXPECT_EQ(split_edge_attrs("512\x1fPSH", 2), (std::vector<std::string>{"512", "PSH"}));
  EXPECT_EQ(split_edge_attrs("a\x1f" "b\x1f" "c", 2), (std::vector<std::string>{"a", "b\x1f" "c"}));
  EXPECT_EQ(split_edge_attrs("solo", 2), (std::vector<std::string>{"solo", ""}));
  EXPECT_TRUE(split_edge_attrs("", 0).empty());
}

TEST(Encode, OrderingPolicyChangesOnlyEdgeOrder) {
  auto g = testing::five_edge_sample();
  // Edges described by endpoint content, independent of node numbering.
  auto described = [](const Graph& h) {
    std::vector<std::string> out;
    for (const auto& e : h.edges()) {
      out.push_back(h.node(e.source).attrs[0] + ">" + h.schema().edge_type(e.type).name + ">" +
                    h.node(e.target).attrs[0]);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto by_time = encode(g, *vocab(), OrderPolicy::kTimestamp).tokens;
  auto by_topo = encode(g, *vocab(), OrderPolicy::kTopological).tokens;
  EXPECT_EQ(by_time.size(), by_topo.size());
  EXPECT_EQ(described(parse_strict(by_time, vocab())), described(g));
  EXPECT_EQ(described(parse_strict(by_topo, vocab())), described(g));
}

TEST(JsonTokenCount, WordRunsAndPunctuation) {
  EXPECT_EQ(json_text_token_count(""), 0u);
  EXPECT_EQ(json_text_token_count("{\"a\": 12}"), 7u);
  EXPECT_EQ(json_text_token_count("  true  "), 1u);
  EXPECT_EQ(json_text_token_count("[-1.5e+3, x_y]"), 5u);
}

TEST(Compression, EmptyGraphRatioPositive) {
  Graph g(schema());
  auto r = compression_report(g, *vocab());
  EXPECT_EQ(r.schema_tokens, 2u);
  EXPECT_GT(r.ratio, 0.0);
}

TEST(Compression, FiveEdgeSampleBeatsNodeLink) {
  auto g = testing::five_edge_sample();
  auto r = compression_report(g, *vocab());
  EXPECT_EQ(r.schema_tokens, encode(g, *vocab()).size());
  EXPECT_LT(r.ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.ratio, static_cast<double>(r.schema_tokens) / static_cast<double>(r.baseline_tokens));
}

}  // namespace
}  // namespace graphseq
