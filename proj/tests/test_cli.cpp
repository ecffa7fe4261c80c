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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "support.hpp"

namespace graphseq {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::schema;
using testing::vocab;

const std::string kCli = GRAPHSEQ_CLI;
const std::string kFixtures = std::string(GRAPHSEQ_SOURCE_DIR) + "/tests/fixtures/graphs";

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path(GRAPHSEQ_TEST_TMP) / (std::string("cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& bytes) const {
    std::ofstream(path(name), std::ios::binary) << bytes;
  }

  /// Runs the CLI with `args` (already shell-quoted) and captures both streams.
  Outcome run(const std::string& args, const std::string& env = "", const std::string& stdin_file = "") {
    const auto out = path("stdout.txt"), err = path("stderr.txt");
    std::string cmd = env + " '" + kCli + "' " + args + " >'" + out + "' 2>'" + err + "'";
    if (!stdin_file.empty()) cmd += " <'" + stdin_file + "'";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = read_file(out);
    o.err = read_file(err);
    return o;
  }

  fs::path dir_;
};

std::vector<std::string> fixtures() {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(kFixtures)) files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

std::string ids_line(const std::vector<TokenId>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? " " : "") + std::to_string(ids[i]);
  return s + "\n";
}

TEST_F(CliTest, HelpPrintsUsageAndExitsZero) {
  const auto o = run("--help");
  EXPECT_EQ(o.code, 0);
  for (const char* sub : {"encode", "decode", "validate", "train", "sample", "eval", "stats", "serve-mask"}) {
    EXPECT_NE(o.out.find(sub), std::string::npos) << sub;
  }
  EXPECT_EQ(run("decode --help").code, 0);
}

TEST_F(CliTest, UsageAndIoErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("decode --strict --recover x").code, 2);
  EXPECT_EQ(run("encode '" + path("missing.json") + "'").code, 2);
  write("bad_schema.json", "{\"node_types\": 3}");
  const auto o = run("encode '" + kFixtures + "/empty.json' --json",
                     "GRAPHSEQ_SCHEMA='" + path("bad_schema.json") + "'");
  EXPECT_EQ(o.code, 2);
  EXPECT_EQ(nlohmann::json::parse(o.err)["error"], "config");
}

TEST_F(CliTest, EncodeMatchesLibrary) {
  for (const auto& f : fixtures()) {
    const auto g = load_node_link(read_file(f), schema());
    const auto ids = encode(g, *vocab()).tokens;
    auto o = run("encode '" + f + "'");
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.out, ids_line(ids)) << f;
    o = run("encode '" + f + "' --emit text");
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.out, vocab()->dump_text(ids) + "\n") << f;
  }
}

TEST_F(CliTest, EncodeThenStrictDecodeIsCanonicalSave) {
  for (const auto& f : fixtures()) {
    const auto expected = save_node_link(canonicalize(load_node_link(read_file(f), schema())));
    ASSERT_EQ(run("encode '" + f + "' -o '" + path("g.tok") + "'").code, 0);
    auto o = run("decode --strict '" + path("g.tok") + "' -o '" + path("g.json") + "'");
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(read_file(path("g.json")), expected) << f;

    // Text form decodes to the same bytes, and a second pass is a fixed point.
    ASSERT_EQ(run("encode '" + path("g.json") + "' --emit text -o '" + path("g.txt") + "'").code, 0);
    o = run("decode --format text '" + path("g.txt") + "'");
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.out, expected) << f;
  }
}

TEST_F(CliTest, StrictDecodeOfCorruptedInputReportsPosition) {
  const auto f = kFixtures + "/download_chain.json";
  auto ids = encode(load_node_link(read_file(f), schema()), *vocab()).tokens;
  // Tokens 1..3 are BOE, source, destination; a fresh destination must be node 1.
  ASSERT_EQ(ids[3], vocab()->id(Token::node(1)));
  ids[3] = vocab()->id(Token::node(5));
  write("bad.tok", ids_line(ids));

  auto o = run("decode --strict --json '" + path("bad.tok") + "'");
  EXPECT_EQ(o.code, 1);
  const auto err = nlohmann::json::parse(o.err);
  EXPECT_EQ(err["error"], "rejection");
  EXPECT_EQ(err["position"], 3);
  EXPECT_EQ(err["token"], ids[3]);

  o = run("decode '" + path("bad.tok") + "'");
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("\"position\": 3"), std::string::npos) << o.err;
  EXPECT_TRUE(o.out.empty());

  // Malformed id text is a data issue too.
  write("junk.tok", "0 x 1\n");
  EXPECT_EQ(run("decode '" + path("junk.tok") + "'").code, 1);
}

TEST_F(CliTest, RecoverAndRepairWriteGraphAndReport) {
  const auto f = kFixtures + "/download_chain.json";
  auto ids = encode(load_node_link(read_file(f), schema()), *vocab()).tokens;
  ids[3] = vocab()->id(Token::node(5));
  write("bad.tok", ids_line(ids));

  auto o = run("decode --recover --json '" + path("bad.tok") + "' -o '" + path("rec.json") + "'");
  EXPECT_EQ(o.code, 1);
  const auto expected = parse_recovering(ids, vocab());
  EXPECT_EQ(read_file(path("rec.json")), save_node_link(expected.graph));
  const auto err = nlohmann::json::parse(o.err);
  EXPECT_EQ(err["error"], "recovered");
  EXPECT_EQ(err["sequences"][0]["recovery"]["skipped_tokens"], expected.report.skipped_tokens());

  o = run("decode --repair '" + path("bad.tok") + "' -o '" + path("rep.json") + "'");
  EXPECT_EQ(o.code, 1);
  EXPECT_EQ(read_file(path("rep.json")), save_node_link(decode_or_default(ids, vocab())));

  // Clean input decodes with exit 0 in every mode.
  write("good.tok", ids_line(encode(load_node_link(read_file(f), schema()), *vocab()).tokens));
  EXPECT_EQ(run("decode --recover '" + path("good.tok") + "'").code, 0);
  EXPECT_EQ(run("decode --repair '" + path("good.tok") + "'").code, 0);
}

TEST_F(CliTest, SeveralSequencesNeedDirectory) {
  ASSERT_EQ(run("encode '" + kFixtures + "' -o '" + path("all.tok") + "'").code, 0);
  EXPECT_EQ(run("decode '" + path("all.tok") + "'").code, 2);
  ASSERT_EQ(run("decode '" + path("all.tok") + "' -o '" + path("out") + "'").code, 0);
  const auto files = fixtures();
  for (std::size_t i = 0; i < files.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "out/%05zu.json", i);
    EXPECT_EQ(read_file(path(name)), save_node_link(canonicalize(load_node_link(read_file(files[i]), schema()))));
  }
}

TEST_F(CliTest, ManifestRecordsRun) {
  ASSERT_EQ(run("encode '" + kFixtures + "/empty.json' -o '" + path("e.tok") + "'", "GRAPHSEQ_SEED=42").code, 0);
  const auto m = nlohmann::json::parse(read_file(path("e.tok.manifest.json")));
  EXPECT_EQ(m["subcommand"], "encode");
  EXPECT_EQ(m["seed"], 42);
  EXPECT_EQ(m["version"], std::string(kVersion));
  EXPECT_EQ(m["schema_fingerprint"], Vocabulary::fingerprint_hex(schema()->fingerprint()));
  EXPECT_EQ(m["outputs"][0], path("e.tok"));
  EXPECT_EQ(m["config"]["policy"], "auto");
}

TEST_F(CliTest, TrainSampleIsSeededAndValid) {
  const auto chain = kFixtures + "/download_chain.json";
  const auto uni = kFixtures + "/unstamped_unicode.json";
  auto o = run("train --order 3 --budget 16 --tagged chain='" + chain + "' --tagged uni='" + uni + "' -o '" +
               path("model.json") + "'");
  ASSERT_EQ(o.code, 0) << o.err;
  const auto model = NGramModel::from_json(nlohmann::json::parse(read_file(path("model.json"))));
  EXPECT_EQ(model.order(), 3u);
  EXPECT_EQ(model.tags(), (std::vector<std::string>{"chain", "uni"}));

  for (const char* name : {"a", "b"}) {
    o = run("sample --model '" + path("model.json") + "' --condition chain -n 5 --seed 11 -o '" + path(name) +
            "' --tokens '" + path(std::string(name) + ".tok") + "'");
    ASSERT_EQ(o.code, 0) << o.err;
  }
  const auto v16 = build_vocab(schema(), 16);
  std::istringstream lines(read_file(path("a.tok")));
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    std::vector<TokenId> ids;
    std::istringstream ls(line);
    for (TokenId t; ls >> t;) ids.push_back(t);
    const auto g = parse_strict(ids, v16);
    char name[32];
    std::snprintf(name, sizeof name, "a/%05zu.json", count);
    const auto written = read_file(path(name));
    EXPECT_EQ(written, read_file(path(std::string("b") + (name + 1))));
    EXPECT_TRUE(inspect_graph(load_node_link(written, schema())).clean());
    EXPECT_EQ(written, save_node_link(repair_graph(g)));
    ++count;
  }
  EXPECT_EQ(count, 5u);

  EXPECT_EQ(run("sample --model '" + path("model.json") + "' --condition nope").code, 2);
  EXPECT_EQ(run("sample --model '" + path("model.json") + "'").code, 2);  // no untagged counts
}

TEST_F(CliTest, ReportsMatchLibrary) {
  std::vector<Graph> corpus;
  for (const auto& f : fixtures()) corpus.push_back(load_node_link(read_file(f), schema()));

  auto o = run("validate '" + kFixtures + "' -o '" + path("v.json") + "'");
  ASSERT_EQ(o.code, 0) << o.err;
  const auto rates = corpus_rates(corpus, {});
  const auto v = nlohmann::json::parse(read_file(path("v.json")));
  EXPECT_EQ(v["rates"].dump(), nlohmann::json::parse(to_json(rates).dump()).dump());
  EXPECT_EQ(o.out, rates_table(rates));
  EXPECT_EQ(v["issues"].size(), 1u);  // the unicode fixture has two components

  o = run("eval rates '" + kFixtures + "' '" + kFixtures + "'");
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(nlohmann::json::parse(o.out)["pct_novel"], 0.0);

  o = run("eval structure '" + kFixtures + "' '" + kFixtures + "' -o '" + path("s.json") + "'");
  ASSERT_EQ(o.code, 0) << o.err;
  const auto report = structure_report(corpus, corpus);
  EXPECT_EQ(o.out, structure_table(report));
  EXPECT_EQ(read_file(path("s.json")), to_json(report).dump(2) + "\n");

  o = run("stats '" + kFixtures + "'");
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out, to_json(dataset_stats(corpus, *vocab())).dump(2) + "\n");
}

TEST_F(CliTest, RepairWritesRepairedGraph) {
  const auto f = kFixtures + "/unstamped_unicode.json";
  const auto o = run("repair '" + f + "' -o '" + path("r.json") + "'");
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(read_file(path("r.json")), save_node_link(repair_graph(load_node_link(read_file(f), schema()))));
}

TEST_F(CliTest, ServeMaskFollowsProtocol) {
  const std::vector<std::string> requests = {R"({"op":"mask"})", R"({"op":"advance","token":0})",
                                             R"({"op":"advance","token":1})", "garbage",
                                             R"({"op":"reset"})"};
  std::string input;
  for (const auto& r : requests) input += r + "\n";
  write("requests.txt", input);
  const auto o = run("serve-mask --budget 8", "", path("requests.txt"));
  ASSERT_EQ(o.code, 0) << o.err;
  MaskServer server{Grammar(build_vocab(schema(), 8))};
  std::string expected;
  for (const auto& r : requests) expected += server.handle(r) + "\n";
  EXPECT_EQ(o.out, expected);
}

TEST_F(CliTest, VocabManifest) {
  const auto o = run("vocab --budget 4");
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out, build_vocab(schema(), 4)->manifest().dump(2) + "\n");
}

}  // namespace
}  // namespace graphseq
