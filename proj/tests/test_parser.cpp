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

#include "support.hpp"

namespace graphseq {
namespace {

using testing::schema;
using testing::vocab;

TEST(ParseStrict, EmptyGraph) {
  auto g = parse_strict(testing::ids(*vocab(), {Token::bog(), Token::eog()}), vocab());
  EXPECT_TRUE(g.empty());
}

TEST(ParseStrict, OneEdgeRoundtrip) {
  auto g = parse_strict(encode(testing::one_edge_graph(), *vocab()).tokens, vocab());
  Graph want(schema());
  want.add_node("n0", "Process", {"x"});
  want.add_node("n1", "File", {"/a"});
  want.add_edge("n0", "n1", "WRITE", {}, 0);
  EXPECT_EQ(g, want);
  EXPECT_TRUE(canonical_equal(g, testing::one_edge_graph()));
}

TEST(ParseStrict, ErrorPositionAndExpectedSet) {
  const auto& v = *vocab();
  try {
    parse_strict(testing::ids(v, {Token::bog(), Token::boe(), Token::node(0), Token::eog()}), vocab());
    FAIL() << "expected a rejection";
  } catch (const RejectionError& e) {
    EXPECT_EQ(e.position(), 3u);
    EXPECT_EQ(e.phase(), Phase::kAwaitDstNode);
    EXPECT_EQ(e.expected(), testing::ids(v, {Token::node(0), Token::node(1)}));
  }
}

TEST(ParseStrict, MissingEogIsReportedAtEnd) {
  try {
    parse_strict(testing::ids(*vocab(), {Token::bog()}), vocab());
    FAIL() << "expected a rejection";
  } catch (const RejectionError& e) {
    EXPECT_EQ(e.position(), 1u);
    EXPECT_NE(std::string(e.what()).find("<end of input>"), std::string::npos);
  }
}

TEST(ParseStrict, TrailingTokensAfterEogAreRejected) {
  auto ids = testing::ids(*vocab(), {Token::bog(), Token::eog(), Token::eog()});
  EXPECT_THROW(parse_strict(ids, vocab()), RejectionError);
}

TEST(ParseStrict, FuzzRoundtripIsCanonical) {
  for (const auto& g : fuzz_corpus(schema(), 300, 41, {60, 120, 16})) {
    auto seq = encode(g, *vocab());
    auto back = parse_strict(seq.tokens, vocab());
    EXPECT_TRUE(canonical_equal(back, g));
    EXPECT_EQ(back, canonicalize(g));
    EXPECT_EQ(encode(back, *vocab()), seq);
  }
}

TEST(ParseRecovering, StrictInputGivesStrictReport) {
  for (const auto& g : fuzz_corpus(schema(), 100, 43, {30, 60, 12})) {
    auto seq = encode(g, *vocab()).tokens;
    auto r = parse_recovering(seq, vocab());
    EXPECT_TRUE(r.report.strict());
    EXPECT_EQ(r.report.materialized_nodes, 0u);
    EXPECT_EQ(r.graph, parse_strict(seq, vocab()));
  }
}

TEST(ParseRecovering, BogInsideAttributeIsSkipped) {
  const auto& v = *vocab();
  auto g = testing::five_edge_sample();
  auto seq = encode(g, v).tokens;
  // Corrupt the third byte of the first node attribute that is long enough.
  std::size_t target = 0;
  for (std::size_t i = 0; i + 3 < seq.size(); ++i) {
    if (v.kind(seq[i]) == TokenKind::kBof && v.kind(seq[i + 1]) == TokenKind::kText &&
        v.kind(seq[i - 1]) == TokenKind::kNodeType) {
      target = i + 3;
      break;
    }
  }
  ASSERT_GT(target, 0u);
  ASSERT_EQ(v.kind(seq[target]), TokenKind::kText);
  seq[target] = v.id(Token::bog());

  auto r = parse_recovering(seq, vocab());
  EXPECT_GE(r.report.skipped_tokens(), 1u);
  EXPECT_EQ(r.report.skipped_positions, std::vector<std::size_t>{target});

  // Oracle: the canonical graph with that one byte removed.
  auto want_base = canonicalize(g);
  Graph want(schema());
  bool changed = false;
  for (const auto& n : want_base.nodes()) {
    auto attrs = n.attrs;
    if (!changed && n.id == "n0") {
      attrs[0].erase(2, 1);
      changed = true;
    }
    want.add_node(n.id, n.type, attrs);
  }
  for (const auto& e : want_base.edges()) want.add_edge(e.source, e.target, e.type, e.attrs, e.timestamp);
  EXPECT_EQ(r.graph, want);
}

TEST(ParseRecovering, TruncatedMidEdgeKeepsCompleteEdges) {
  const auto& v = *vocab();
  auto g = testing::five_edge_sample();
  auto seq = encode(g, v).tokens;
  // Cut after <boe> <node> <node> of the third edge in timestamp order.
  std::size_t boe_seen = 0, cut = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] == v.id(Token::boe()) && ++boe_seen == 3) {
      cut = i + 3;
      break;
    }
  }
  ASSERT_GT(cut, 0u);
  seq.resize(cut);

  Graph prefix(schema());
  prefix.add_node("p0", "Process", g.node(0).attrs);
  prefix.add_node("p1", "Process", g.node(1).attrs);
  prefix.add_node("f0", "File", g.node(2).attrs);
  prefix.add_edge("p0", "p1", "CREATE", {}, 1);
  prefix.add_edge("p1", "f0", "READ", {}, 2);

  auto r = parse_recovering(seq, vocab());
  EXPECT_EQ(r.report.dropped_fragments, 1u);
  EXPECT_EQ(r.graph, canonicalize(prefix));
  ASSERT_FALSE(r.report.anchor_resyncs.empty());
  EXPECT_EQ(r.report.anchor_resyncs.back(), (AnchorResync{cut, TokenKind::kEog}));
}

TEST(ParseRecovering, AnchorInsideSpanClosesIt) {
  const auto& v = *vocab();
  std::vector<TokenId> seq = testing::ids(v, {Token::bog(), Token::bon(), Token::node(0),
                                              Token::node_type(testing::ntype("Process")), Token::bof()});
  testing::append_text(v, seq, "abc");
  // <eof> <eon> lost; the next declaration starts directly.
  for (auto t : {Token::bon(), Token::node(1), Token::node_type(testing::ntype("File")), Token::bof()}) {
    seq.push_back(v.id(t));
  }
  testing::append_text(v, seq, "d");
  for (auto t : {Token::eof(), Token::eon(), Token::eog()}) seq.push_back(v.id(t));

  auto r = parse_recovering(seq, vocab());
  ASSERT_EQ(r.graph.node_count(), 2u);
  EXPECT_EQ(r.graph.node(0).attrs, std::vector<std::string>{"abc"});
  EXPECT_EQ(r.graph.node(1).attrs, std::vector<std::string>{"d"});
  EXPECT_EQ(r.report.anchor_resyncs.front(), (AnchorResync{8, TokenKind::kEof}));
  EXPECT_EQ(r.report.dropped_fragments, 1u);  // the unfinished first declaration
}

TEST(ParseRecovering, LostEdgeTypeIsSupplied) {
  const auto& v = *vocab();
  auto seq = testing::ids(v, {Token::bog(), Token::boe(), Token::node(0), Token::node(0), Token::bof(),
                              Token::eof(), Token::bon(), Token::node(0), Token::node_type(testing::ntype("Process")),
                              Token::bof(), Token::eof(), Token::eon(), Token::eog()});
  auto r = parse_recovering(seq, vocab());
  ASSERT_EQ(r.graph.edge_count(), 1u);
  EXPECT_EQ(r.graph.edge(0).type, EdgeTypeId(0));
  EXPECT_EQ(r.report.anchor_resyncs.front(), (AnchorResync{4, TokenKind::kBof}));
}

TEST(ParseRecovering, UndeclaredNodesAreMaterialized) {
  const auto& v = *vocab();
  auto seq = testing::ids(v, {Token::bog(), Token::boe(), Token::node(0), Token::node(1),
                              Token::edge_type(testing::etype("READ")), Token::bof(), Token::eof(), Token::eog()});
  auto r = parse_recovering(seq, vocab());
  EXPECT_EQ(r.report.materialized_nodes, 2u);
  ASSERT_EQ(r.graph.node_count(), 2u);
  EXPECT_EQ(r.graph.node(1).type, NodeTypeId(0));
  EXPECT_EQ(r.graph.node(1).attrs, std::vector<std::string>{""});
  EXPECT_EQ(r.graph.edge_count(), 1u);
}

TEST(ParseRecovering, TotalOnArbitraryStreams) {
  std::mt19937_64 rng(7);
  const auto& v = *vocab();
  auto structural = static_cast<std::uint64_t>(v.structural_size());
  for (int i = 0; i < 3000; ++i) {
    std::vector<TokenId> seq(rng() % 200);
    for (auto& id : seq) {
      // Mostly structural ids, some text, some outside the vocabulary.
      auto roll = rng() % 10;
      id = static_cast<TokenId>(roll < 6 ? (roll < 3 ? rng() % 7 : rng() % structural)
                                         : roll < 9 ? rng() % v.size()
                                                    : v.size() + rng() % 50);
    }
    ParseResult r{Graph(schema()), {}};
    ASSERT_NO_THROW(r = parse_recovering(seq, vocab()));
    for (const auto& e : r.graph.edges()) {
      ASSERT_LT(e.source, r.graph.node_count());
      ASSERT_LT(e.target, r.graph.node_count());
    }
    // The recovered graph is itself encodable and decodes to itself.
    auto again = encode(r.graph, v).tokens;
    EXPECT_TRUE(canonical_equal(parse_strict(again, vocab()), r.graph));
  }
}

TEST(DecodeOrDefault, RemovesIllegalEdge) {
  Graph g(schema());
  g.add_node("p", "Process", {"C:\\a.exe"});
  g.add_node("f", "File", {"C:\\b.txt"});
  g.add_edge("p", "f", "WRITE", {}, 1);
  g.add_edge("f", "p", "READ", {}, 2);
  auto tokens = encode(g, *vocab()).tokens;
  EXPECT_EQ(parse_strict(tokens, vocab()).edge_count(), 2u);
  auto d = decode_or_default(tokens, vocab());
  ASSERT_EQ(d.edge_count(), 1u);
  EXPECT_EQ(d.edge(0).type, testing::etype("WRITE"));
}

TEST(DecodeOrDefault, ReplacesMalformedPath) {
  Graph g(schema());
  g.add_node("p", "Process", {"C:\\a.exe"});
  g.add_node("f", "File", {"not a path"});
  g.add_edge("p", "f", "WRITE", {}, 1);
  auto d = decode_or_default(encode(g, *vocab()).tokens, vocab());
  EXPECT_EQ(d.node(1).attrs[0], schema()->rule("windows_path").default_value());
  EXPECT_EQ(d.node(0).attrs[0], "C:\\a.exe");
}

TEST(DecodeOrDefault, ValidInputUnchanged) {
  auto g = testing::five_edge_sample();
  auto tokens = encode(g, *vocab()).tokens;
  EXPECT_EQ(decode_or_default(tokens, vocab()), parse_strict(tokens, vocab()));
}

TEST(RecoveryReport, JsonShape) {
  auto r = parse_recovering(testing::ids(*vocab(), {Token::bog()}), vocab());
  auto j = to_json(r.report);
  EXPECT_EQ(j["strict"], false);
  EXPECT_EQ(j["anchor_resyncs"][0]["anchor"], "eog");
  EXPECT_EQ(j["anchor_resyncs"][0]["position"], 1);
}

}  // namespace
}  // namespace graphseq
