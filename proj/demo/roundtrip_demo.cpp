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


// Builds a small provenance graph, prints its token stream, decodes it back,
// then damages one token and shows what recovery and repair salvage.

#include <cstdio>
#include <iostream>

#include "graphseq/graphseq.hpp"

int main() {
  using namespace graphseq;
  const auto schema = provenance_schema();
  const auto vocab = build_vocab(schema, 32);

  Graph g(schema);
  g.add_node("explorer", "Process", {"C:\\Windows\\explorer.exe"});
  g.add_node("cmd", "Process", {"C:\\Windows\\System32\\cmd.exe"});
  g.add_node("payload", "File", {"C:\\Temp\\update.dll"});
  g.add_node("c2", "Socket", {"10.0.0.5|443"});
  g.add_edge("explorer", "cmd", "CREATE", {}, 1);
  g.add_edge("cmd", "c2", "RECEIVE", {"4096", "ACK"}, 2);
  g.add_edge("cmd", "payload", "WRITE", {}, 3);
  g.add_edge("explorer", "payload", "EXECUTE", {}, 4);

  const auto seq = encode(g, *vocab);
  std::cout << "tokens (" << seq.size() << "):\n" << vocab->dump_text(seq.tokens) << "\n\n";

  const auto back = parse_strict(seq.tokens, vocab);
  std::cout << "strict decode is canonically equal: " << (canonical_equal(g, back) ? "yes" : "no") << "\n";
  const auto c = compression_report(g, *vocab);
  std::printf("schema tokens %zu, node-link tokens %zu, ratio %.3f\n\n", c.schema_tokens, c.baseline_tokens, c.ratio);

  // Replace the destination of the second edge with a node that does not exist yet.
  auto damaged = seq.tokens;
  std::size_t boe_seen = 0, at = 0;
  for (std::size_t i = 0; i < damaged.size(); ++i) {
    if (damaged[i] == vocab->id(Token::boe()) && ++boe_seen == 2) {
      at = i + 2;
      break;
    }
  }
  damaged[at] = vocab->id(Token::node(9));
  try {
    parse_strict(damaged, vocab);
  } catch (const RejectionError& e) {
    std::cout << "strict decode rejects: " << e.what() << "\n";
  }
  const auto recovered = parse_recovering(damaged, vocab);
  std::cout << "recovery report: " << to_json(recovered.report).dump() << "\n";
  std::printf("recovered %zu of %zu edges\n", recovered.graph.edge_count(), g.edge_count());

  const auto repaired = decode_or_default(damaged, vocab);
  std::cout << "\nrepaired graph:\n" << save_node_link(repaired);
  return 0;
}
