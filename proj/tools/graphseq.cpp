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

// Command-line front end. Exit codes: 0 success, 1 data issue (a report is
// written to stderr), 2 usage, configuration or I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "graphseq/graphseq.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

/// Carries an exit code and a structured description to main().
struct Failure : std::runtime_error {
  Failure(int code, std::string kind, const std::string& message, json detail = json::object())
      : std::runtime_error(message), code(code), kind(std::move(kind)), detail(std::move(detail)) {}
  int code;
  std::string kind;
  json detail;
};

Failure io_error(const std::string& message) { return Failure(kExitUsage, "io", message); }
Failure usage_error(const std::string& message) { return Failure(kExitUsage, "usage", message); }

struct Options {
  std::string schema_path;
  std::uint64_t seed = 0;
  bool json_errors = false;
  std::size_t budget = graphseq::kDefaultNodeBudget;
  std::string policy = "auto";
  std::string out;
  std::string manifest;
};

// ---------------------------------------------------------------------------
// I/O helpers

std::string read_all(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const std::string& path, std::string_view bytes) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw io_error("cannot write '" + path + "'");
  }
}

/// Writes to `path`, or to stdout when it is empty or "-".
void emit(const std::string& path, std::string_view bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    std::cout.flush();
  } else {
    write_all(path, bytes);
  }
}

bool is_side_file(const fs::path& p) {
  const auto name = p.filename().string();
  return name.ends_with(".manifest.json") || name.ends_with(".report.json");
}

/// A directory expands to its *.json files in name order.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (in == "-") {
      files.push_back(in);
      continue;
    }
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".json" && !is_side_file(e.path())) {
          found.push_back(e.path().string());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(in, ec)) {
      files.push_back(in);
    } else {
      throw io_error("no such file or directory '" + in + "'");
    }
  }
  return files;
}

graphseq::SchemaPtr load_schema_option(const Options& o) {
  if (o.schema_path.empty()) return graphseq::provenance_schema();
  const auto bytes = read_all(o.schema_path);
  try {
    return graphseq::load_schema(bytes);
  } catch (const graphseq::Error& e) {
    throw Failure(kExitUsage, "config", "schema '" + o.schema_path + "': " + e.what());
  }
}

graphseq::VocabPtr make_vocab(const graphseq::SchemaPtr& schema, std::size_t budget) {
  try {
    return graphseq::build_vocab(schema, budget);
  } catch (const graphseq::Error& e) {
    throw usage_error(e.what());
  }
}

graphseq::OrderPolicy policy_option(const Options& o) {
  try {
    return graphseq::order_policy_from_string(o.policy);
  } catch (const graphseq::Error& e) {
    throw usage_error(e.what());
  }
}

struct LoadedGraph {
  std::string path;
  graphseq::Graph graph;
};

std::vector<LoadedGraph> load_corpus(const std::vector<std::string>& inputs, const graphseq::SchemaPtr& schema) {
  std::vector<LoadedGraph> out;
  for (const auto& f : expand_inputs(inputs)) {
    const auto bytes = read_all(f);
    try {
      out.push_back({f, graphseq::load_node_link(bytes, schema)});
    } catch (const graphseq::Error& e) {
      throw Failure(kExitData, "input", f + ": " + e.what(), json{{"file", f}});
    }
  }
  return out;
}

std::vector<graphseq::Graph> graphs_of(std::vector<LoadedGraph> loaded) {
  std::vector<graphseq::Graph> gs;
  gs.reserve(loaded.size());
  for (auto& l : loaded) gs.push_back(std::move(l.graph));
  return gs;
}

/// One sequence per nonblank line, as ids or as surfaces.
std::vector<std::vector<graphseq::TokenId>> read_sequences(const std::string& path, const std::string& format,
                                                           const graphseq::Vocabulary& vocab) {
  std::vector<std::vector<graphseq::TokenId>> seqs;
  std::istringstream in(read_all(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      if (format == "text") {
        seqs.push_back(vocab.parse_text_dump(line));
        continue;
      }
      std::vector<graphseq::TokenId> ids;
      std::istringstream ls(line);
      std::string word;
      while (ls >> word) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
          v = std::stoull(word, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != word.size() || word[0] == '-' || v >= vocab.size()) {
          throw graphseq::ParseError("'" + word + "' is not a token id below " + std::to_string(vocab.size()));
        }
        ids.push_back(static_cast<graphseq::TokenId>(v));
      }
      seqs.push_back(std::move(ids));
    } catch (const graphseq::Error& e) {
      throw Failure(kExitData, "tokens", path + ":" + std::to_string(lineno) + ": " + e.what(),
                    json{{"file", path}, {"line", lineno}});
    }
  }
  return seqs;
}

std::string format_sequence(const std::vector<graphseq::TokenId>& ids, const std::string& format,
                            const graphseq::Vocabulary& vocab) {
  if (format == "text") return vocab.dump_text(ids);
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s.push_back(' ');
    s += std::to_string(ids[i]);
  }
  return s;
}

/// One graph goes to `out` (or stdout); several go to numbered files under `out`.
std::vector<std::string> write_graphs(const std::vector<graphseq::Graph>& graphs, const std::string& out) {
  std::vector<std::string> written;
  if (graphs.size() == 1 && !(out.size() && fs::is_directory(out))) {
    emit(out, graphseq::save_node_link(graphs[0]));
    if (!out.empty() && out != "-") written.push_back(out);
    return written;
  }
  if (out.empty() || out == "-") {
    throw usage_error(std::to_string(graphs.size()) + " graphs need an output directory (--out)");
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw io_error("cannot create directory '" + out + "'");
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.json", i);
    const auto path = (fs::path(out) / name).string();
    write_all(path, graphseq::save_node_link(graphs[i]));
    written.push_back(path);
  }
  return written;
}

/// JSON goes to --out with the table on stdout; without --out, JSON on stdout and table on stderr.
void emit_report(const Options& o, const json& report, const std::string& table) {
  const auto text = report.dump(2) + "\n";
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    std::cerr << table;
  } else {
    write_all(o.out, text);
    std::cout << table;
  }
}

// ---------------------------------------------------------------------------
// Run manifest

struct Run {
  explicit Run(std::string name) : subcommand(std::move(name)) {}
  std::string subcommand;
  json config = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  graphseq::SchemaPtr schema;
};

void write_manifest(const Options& o, const Run& run) {
  std::string path = o.manifest;
  if (path.empty()) {
    if (o.out.empty() || o.out == "-") return;
    std::string base = o.out;
    while (base.size() > 1 && (base.back() == '/' || base.back() == '\\')) base.pop_back();
    path = base + ".manifest.json";
  }
  json m;
  m["tool"] = "graphseq";
  m["version"] = graphseq::kVersion;
  m["subcommand"] = run.subcommand;
  m["seed"] = o.seed;
  m["schema"] = o.schema_path.empty() ? "builtin:provenance" : o.schema_path;
  m["schema_fingerprint"] =
      run.schema ? graphseq::Vocabulary::fingerprint_hex(run.schema->fingerprint()) : std::string();
  m["config"] = run.config;
  m["inputs"] = run.inputs;
  m["outputs"] = run.outputs;
  write_all(path, m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Subcommands

struct EncodeArgs {
  std::vector<std::string> inputs;
  std::string emit = "ids";
};

int run_encode(const Options& o, const EncodeArgs& a) {
  Run run("encode");
  run.schema = load_schema_option(o);
  const auto vocab = make_vocab(run.schema, o.budget);
  const auto policy = policy_option(o);
  std::string text;
  for (const auto& [path, g] : load_corpus(a.inputs, run.schema)) {
    try {
      text += format_sequence(graphseq::encode(g, *vocab, policy).tokens, a.emit, *vocab) + "\n";
    } catch (const graphseq::Error& e) {
      throw Failure(kExitData, "encode", path + ": " + e.what(), json{{"file", path}});
    }
    run.inputs.push_back(path);
  }
  emit(o.out, text);
  if (!o.out.empty() && o.out != "-") run.outputs.push_back(o.out);
  run.config = {{"emit", a.emit}, {"policy", o.policy}, {"budget", o.budget}};
  write_manifest(o, run);
  return 0;
}

struct DecodeArgs {
  std::string input = "-";
  std::string format = "ids";
  bool strict = false;
  bool recover = false;
  bool repair = false;
  std::size_t max_span = 4096;
};

int run_decode(const Options& o, const DecodeArgs& a) {
  Run run("decode");
  run.schema = load_schema_option(o);
  const auto vocab = make_vocab(run.schema, o.budget);
  const std::string mode = a.repair ? "repair" : a.recover ? "recover" : "strict";
  const auto seqs = read_sequences(a.input, a.format, *vocab);
  run.inputs.push_back(a.input);

  std::vector<graphseq::Graph> graphs;
  json reports = json::array();
  bool issues = false;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (mode == "strict") {
      try {
        graphs.push_back(graphseq::parse_strict(seqs[i], vocab, a.max_span));
      } catch (const graphseq::RejectionError& e) {
        json d{{"sequence", i},
               {"position", e.position()},
               {"token", e.token()},
               {"phase", graphseq::to_string(e.phase())},
               {"expected", e.expected()}};
        throw Failure(kExitData, "rejection", "sequence " + std::to_string(i) + ": " + e.what(), d);
      }
      continue;
    }
    auto result = graphseq::parse_recovering(seqs[i], vocab, a.max_span);
    json r{{"sequence", i}, {"recovery", graphseq::to_json(result.report)}};
    bool clean = result.report.strict();
    if (mode == "repair") {
      const auto found = graphseq::inspect_graph(result.graph);
      r["repair"] = {{"illegal_edges", found.illegal_edges.size()},
                     {"bad_attributes", found.bad_attributes.size()},
                     {"components", found.components}};
      clean = clean && found.clean();
      result.graph = graphseq::repair_graph(result.graph);
    }
    if (!clean) {
      issues = true;
      reports.push_back(std::move(r));
    }
    graphs.push_back(std::move(result.graph));
  }
  if (graphs.empty()) throw Failure(kExitData, "tokens", "no token sequences in '" + a.input + "'");
  run.outputs = write_graphs(graphs, o.out);
  run.config = {{"mode", mode}, {"format", a.format}, {"budget", o.budget}, {"max_span", a.max_span}};
  write_manifest(o, run);
  if (issues) {
    throw Failure(kExitData, "recovered", "input needed " + mode + " on " + std::to_string(reports.size()) +
                                              " of " + std::to_string(seqs.size()) + " sequences",
                  json{{"sequences", reports}});
  }
  return 0;
}

struct RatesArgs {
  std::vector<std::string> generated;
  std::vector<std::string> reference;
  std::string predicate = "repair";
};

graphseq::ValidityPredicate predicate_option(const std::string& name) {
  try {
    return graphseq::validity_predicate(name);
  } catch (const graphseq::Error& e) {
    throw usage_error(e.what());
  }
}

int run_validate(const Options& o, const RatesArgs& a) {
  Run run("validate");
  run.schema = load_schema_option(o);
  const auto is_valid = predicate_option(a.predicate);
  auto loaded = load_corpus(a.generated, run.schema);
  json issues = json::array();
  for (const auto& l : loaded) {
    run.inputs.push_back(l.path);
    const auto found = graphseq::inspect_graph(l.graph);
    if (found.clean()) continue;
    issues.push_back({{"file", l.path},
                      {"illegal_edges", found.illegal_edges.size()},
                      {"bad_attributes", found.bad_attributes.size()},
                      {"components", found.components}});
  }
  std::vector<graphseq::Graph> reference;
  if (!a.reference.empty()) reference = graphs_of(load_corpus(a.reference, run.schema));
  const auto rates = graphseq::corpus_rates(graphs_of(std::move(loaded)), reference, is_valid);
  json report{{"rates", graphseq::to_json(rates)}, {"issues", issues}};
  emit_report(o, report, graphseq::rates_table(rates));
  if (!o.out.empty() && o.out != "-") run.outputs.push_back(o.out);
  run.config = {{"predicate", a.predicate}, {"reference", a.reference}};
  write_manifest(o, run);
  return 0;
}

int run_eval_rates(const Options& o, const RatesArgs& a) {
  Run run("eval rates");
  run.schema = load_schema_option(o);
  const auto is_valid = predicate_option(a.predicate);
  const auto generated = graphs_of(load_corpus(a.generated, run.schema));
  const auto reference = graphs_of(load_corpus(a.reference, run.schema));
  const auto rates = graphseq::corpus_rates(generated, reference, is_valid);
  emit_report(o, graphseq::to_json(rates), graphseq::rates_table(rates));
  run.inputs = a.generated;
  run.inputs.insert(run.inputs.end(), a.reference.begin(), a.reference.end());
  if (!o.out.empty() && o.out != "-") run.outputs.push_back(o.out);
  run.config = {{"predicate", a.predicate}};
  write_manifest(o, run);
  return 0;
}

struct StructureArgs {
  std::string real;
  std::string synthetic;
  double sigma = 0.0;
  double katz_alpha = graphseq::KatzParams{}.alpha;
};

int run_eval_structure(const Options& o, const StructureArgs& a) {
  Run run("eval structure");
  run.schema = load_schema_option(o);
  const auto real = graphs_of(load_corpus({a.real}, run.schema));
  const auto synth = graphs_of(load_corpus({a.synthetic}, run.schema));
  graphseq::StatParams sp;
  sp.katz.alpha = a.katz_alpha;
  graphseq::MmdParams mp;
  if (a.sigma > 0.0) mp.sigma = a.sigma;
  graphseq::MetricReport report;
  try {
    report = graphseq::structure_report(real, synth, sp, mp);
  } catch (const graphseq::MetricError& e) {
    throw Failure(kExitData, "metric", e.what());
  }
  emit_report(o, graphseq::to_json(report), graphseq::structure_table(report));
  run.inputs = {a.real, a.synthetic};
  if (!o.out.empty() && o.out != "-") run.outputs.push_back(o.out);
  run.config = {{"sigma", a.sigma > 0.0 ? json(a.sigma) : json("median-heuristic")}, {"katz_alpha", a.katz_alpha}};
  write_manifest(o, run);
  return 0;
}

struct RepairArgs {
  std::vector<std::string> inputs;
};

int run_repair(const Options& o, const RepairArgs& a) {
  Run run("repair");
  run.schema = load_schema_option(o);
  auto loaded = load_corpus(a.inputs, run.schema);
  std::vector<graphseq::Graph> repaired;
  for (const auto& l : loaded) {
    run.inputs.push_back(l.path);
    repaired.push_back(graphseq::repair_graph(l.graph));
  }
  if (repaired.empty()) throw Failure(kExitData, "input", "no graphs to repair");
  run.outputs = write_graphs(repaired, o.out);
  write_manifest(o, run);
  return 0;
}

struct TrainArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> tagged;  // TAG=PATH
  std::size_t order = 4;
  double k = 0.01;
};

int run_train(const Options& o, const TrainArgs& a) {
  Run run("train");
  run.schema = load_schema_option(o);
  const auto vocab = make_vocab(run.schema, o.budget);
  const auto policy = policy_option(o);
  if (a.order < 1) throw usage_error("--order must be at least 1");
  if (a.k < 0.0) throw usage_error("--k must be non-negative");

  std::vector<std::pair<std::string, std::string>> sources;
  for (const auto& in : a.inputs) sources.emplace_back("", in);
  for (const auto& t : a.tagged) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) throw usage_error("--tagged expects TAG=PATH, got '" + t + "'");
    sources.emplace_back(t.substr(0, eq), t.substr(eq + 1));
  }
  if (sources.empty()) throw usage_error("train needs at least one corpus");

  std::vector<graphseq::TaggedSequence> corpus;
  json counts = json::object();
  for (const auto& [tag, path] : sources) {
    for (const auto& l : load_corpus({path}, run.schema)) {
      try {
        corpus.push_back({graphseq::encode(l.graph, *vocab, policy).tokens, tag});
      } catch (const graphseq::Error& e) {
        throw Failure(kExitData, "encode", l.path + ": " + e.what(), json{{"file", l.path}});
      }
      run.inputs.push_back(l.path);
      counts[tag] = counts.value(tag, 0) + 1;
    }
  }
  const auto model = graphseq::train_ngram(corpus, *vocab, a.order, a.k);
  if (o.out.empty() || o.out == "-") throw usage_error("train needs --out for the model file");
  write_all(o.out, model.to_json().dump() + "\n");
  run.outputs.push_back(o.out);
  run.config = {{"order", a.order}, {"k", a.k}, {"budget", o.budget}, {"policy", o.policy}, {"graphs", counts}};
  write_manifest(o, run);
  return 0;
}

struct SampleArgs {
  std::string model;
  std::size_t n = 1;
  std::string condition;
  std::size_t max_tokens = 100000;
  double temperature = 1.0;
  std::string tokens_out;
};

int run_sample(const Options& o, const SampleArgs& a) {
  Run run("sample");
  run.schema = load_schema_option(o);
  graphseq::NGramModel model(1, 0.0, 1, "");
  try {
    model = graphseq::NGramModel::from_json(nlohmann::json::parse(read_all(a.model)));
  } catch (const nlohmann::json::exception& e) {
    throw Failure(kExitData, "model", a.model + ": " + e.what());
  } catch (const graphseq::Error& e) {
    throw Failure(kExitData, "model", a.model + ": " + e.what());
  }
  run.inputs.push_back(a.model);

  // The model stores its vocabulary size; the node budget is what remains after the fixed layout.
  const auto& schema = *run.schema;
  const std::size_t fixed = graphseq::kFixedTokenCount + schema.node_types().size() + schema.edge_types().size() +
                            graphseq::byte_tokenizer()->size();
  if (model.vocab_size() <= fixed) throw Failure(kExitUsage, "config", "model does not fit the schema");
  const auto vocab = make_vocab(run.schema, model.vocab_size() - fixed);
  if (graphseq::Vocabulary::fingerprint_hex(vocab->fingerprint()) != model.vocab_fingerprint()) {
    throw Failure(kExitUsage, "config", "model was trained with a different schema or tokenizer");
  }

  graphseq::GenerationConfig cfg;
  cfg.max_tokens = a.max_tokens;
  cfg.temperature = a.temperature;
  cfg.seed = o.seed;
  if (!a.condition.empty()) cfg.condition_tag = a.condition;
  try {
    cfg.validate();
  } catch (const graphseq::Error& e) {
    throw usage_error(e.what());
  }
  if (!model.has_tag(cfg.condition_tag.value_or(""))) {
    throw usage_error(a.condition.empty() ? "model has no untagged counts; pass --condition"
                                          : "model has no counts for tag '" + a.condition + "'");
  }

  const auto grammar = graphseq::sampling_grammar(vocab);
  std::mt19937_64 rng(o.seed);
  std::vector<graphseq::Graph> graphs;
  std::string token_lines;
  std::size_t incomplete = 0;
  for (std::size_t i = 0; i < a.n; ++i) {
    const auto seq = graphseq::sample(model, grammar, cfg, rng);
    incomplete += !seq.complete;
    token_lines += format_sequence(seq.tokens, "ids", *vocab) + "\n";
    graphs.push_back(graphseq::decode_or_default(seq.tokens, vocab));
  }
  run.outputs = write_graphs(graphs, o.out);
  if (!a.tokens_out.empty()) {
    write_all(a.tokens_out, token_lines);
    run.outputs.push_back(a.tokens_out);
  }
  if (incomplete) std::cerr << "graphseq: " << incomplete << " samples hit --max-tokens and were truncated\n";
  run.config = {{"n", a.n},
                {"condition", a.condition},
                {"max_tokens", a.max_tokens},
                {"temperature", a.temperature},
                {"order", model.order()},
                {"vocab_fingerprint", model.vocab_fingerprint()}};
  write_manifest(o, run);
  return 0;
}

struct StatsArgs {
  std::vector<std::string> inputs;
};

std::string histogram_table(const std::string& title, const json& h) {
  std::string s = title + "\n";
  for (std::size_t i = 0; i < h["values"].size(); ++i) {
    const auto& v = h["values"][i];
    s += "  " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\t" + h["counts"][i].dump() + "\n";
  }
  return s;
}

int run_stats(const Options& o, const StatsArgs& a) {
  Run run("stats");
  run.schema = load_schema_option(o);
  const auto vocab = make_vocab(run.schema, o.budget);
  auto loaded = load_corpus(a.inputs, run.schema);
  for (const auto& l : loaded) run.inputs.push_back(l.path);
  graphseq::DatasetStats stats;
  try {
    stats = graphseq::dataset_stats(graphs_of(std::move(loaded)), *vocab);
  } catch (const graphseq::Error& e) {
    throw Failure(kExitData, "encode", e.what());
  }
  const auto j = graphseq::to_json(stats);
  const auto table = histogram_table("nodes per graph", j["node_counts"]) +
                     histogram_table("tokens per graph", j["token_counts"]) +
                     histogram_table("nodes per type", j["node_types"]);
  emit_report(o, j, table);
  if (!o.out.empty() && o.out != "-") run.outputs.push_back(o.out);
  run.config = {{"budget", o.budget}};
  write_manifest(o, run);
  return 0;
}

struct ServeArgs {
  bool connected = false;
};

int run_serve_mask(const Options& o, const ServeArgs& a) {
  const auto schema = load_schema_option(o);
  const auto vocab = make_vocab(schema, o.budget);
  auto opts = graphseq::GrammarOptions::for_schema(*schema);
  opts.require_connected = a.connected;
  graphseq::MaskServer server{graphseq::Grammar(vocab, opts)};
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::cout << server.handle(line) << "\n";
    std::cout.flush();
  }
  return 0;
}

int run_vocab(const Options& o) {
  Run run("vocab");
  run.schema = load_schema_option(o);
  const auto vocab = make_vocab(run.schema, o.budget);
  emit(o.out, vocab->manifest().dump(2) + "\n");
  if (!o.out.empty() && o.out != "-") run.outputs.push_back(o.out);
  run.config = {{"budget", o.budget}};
  write_manifest(o, run);
  return 0;
}

void report_failure(const Options& o, const Failure& f) {
  if (o.json_errors) {
    json j{{"error", f.kind}, {"message", f.what()}, {"exit_code", f.code}};
    for (const auto& [k, v] : f.detail.items()) j[k] = v;
    std::cerr << j.dump() << "\n";
    return;
  }
  std::cerr << "graphseq: " << f.kind << ": " << f.what() << "\n";
  if (!f.detail.empty()) std::cerr << f.detail.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphseq: schema-aware graph serialization, decoding, sampling and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(graphseq::kVersion));

  Options o;
  auto add_common = [&](CLI::App* sub, bool with_out = true) {
    sub->add_option("--schema", o.schema_path, "Schema JSON (default: built-in provenance schema)")
        ->envname("GRAPHSEQ_SCHEMA");
    sub->add_option("--seed", o.seed, "Random seed")->envname("GRAPHSEQ_SEED");
    sub->add_flag("--json", o.json_errors, "Report errors as JSON on stderr");
    sub->add_option("--budget", o.budget, "Node-token budget of the vocabulary")->check(CLI::PositiveNumber);
    if (with_out) {
      sub->add_option("-o,--out", o.out, "Output path (stdout when omitted)");
      sub->add_option("--manifest", o.manifest, "Run manifest path (default: <out>.manifest.json)");
    }
  };

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Node-link graphs to token sequences, one per line");
  encode->add_option("inputs", enc.inputs, "Graph files or directories")->required();
  encode->add_option("--emit", enc.emit, "Token format")->check(CLI::IsMember({"ids", "text"}));
  encode->add_option("--policy", o.policy, "Edge ordering: auto, timestamp, topological, as-given");
  add_common(encode);

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "Token sequences to node-link graphs");
  decode->add_option("input", dec.input, "Token file, one sequence per line ('-' for stdin)");
  decode->add_option("--format", dec.format, "Token format")->check(CLI::IsMember({"ids", "text"}));
  auto* f_strict = decode->add_flag("--strict", dec.strict, "Reject malformed input (default)");
  auto* f_recover = decode->add_flag("--recover", dec.recover, "Decode with resynchronization");
  auto* f_repair = decode->add_flag("--repair", dec.repair, "Recover, then repair schema violations");
  f_strict->excludes(f_recover)->excludes(f_repair);
  f_recover->excludes(f_repair);
  decode->add_option("--max-span", dec.max_span, "Longest attribute span in tokens")->check(CLI::PositiveNumber);
  add_common(decode);

  RatesArgs val;
  auto* validate = app.add_subcommand("validate", "Validity, novelty and attribute rates of a corpus");
  validate->add_option("inputs", val.generated, "Graph files or directories")->required();
  validate->add_option("--reference", val.reference, "Reference corpus for novelty");
  validate->add_option("--predicate", val.predicate, "Validity predicate: repair, connected, legal");
  add_common(validate);

  RepairArgs rep;
  auto* repair = app.add_subcommand("repair", "Remove illegal edges, reset bad attributes, keep one component");
  repair->add_option("inputs", rep.inputs, "Graph files or directories")->required();
  add_common(repair);

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Fit an n-gram model on encoded corpora");
  train->add_option("inputs", tr.inputs, "Untagged graph files or directories");
  train->add_option("--tagged", tr.tagged, "Tagged corpus as TAG=PATH (repeatable)");
  train->add_option("--order", tr.order, "Context length plus one");
  train->add_option("--k", tr.k, "Add-k smoothing constant");
  train->add_option("--policy", o.policy, "Edge ordering: auto, timestamp, topological, as-given");
  add_common(train);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw grammar-constrained graphs from a model");
  sample->add_option("--model", sa.model, "Model JSON from train")->required();
  sample->add_option("-n,--n", sa.n, "Number of graphs")->check(CLI::PositiveNumber);
  sample->add_option("--condition", sa.condition, "Condition tag");
  sample->add_option("--max-tokens", sa.max_tokens, "Token cap per sample");
  sample->add_option("--temperature", sa.temperature, "Sampling temperature (<= 1e-6 is greedy)");
  sample->add_option("--tokens", sa.tokens_out, "Also write the sampled token sequences here");
  add_common(sample);

  auto* eval = app.add_subcommand("eval", "Corpus comparison reports");
  eval->require_subcommand(1);
  StructureArgs st;
  auto* structure = eval->add_subcommand("structure", "MMD between structural statistics of two corpora");
  structure->add_option("real", st.real, "Reference corpus")->required();
  structure->add_option("synthetic", st.synthetic, "Generated corpus")->required();
  structure->add_option("--sigma", st.sigma, "Fixed kernel bandwidth (default: median heuristic)");
  structure->add_option("--katz-alpha", st.katz_alpha, "Katz attenuation");
  add_common(structure);
  RatesArgs er;
  std::string er_generated, er_reference;
  auto* rates = eval->add_subcommand("rates", "Rates of a generated corpus against a reference");
  rates->add_option("generated", er_generated, "Generated corpus")->required();
  rates->add_option("reference", er_reference, "Reference corpus")->required();
  rates->add_option("--predicate", er.predicate, "Validity predicate: repair, connected, legal");
  add_common(rates);

  StatsArgs sts;
  auto* stats = app.add_subcommand("stats", "Node-count, token-count and node-type histograms");
  stats->add_option("inputs", sts.inputs, "Graph files or directories")->required();
  add_common(stats);

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve-mask", "JSON-lines mask protocol on stdin/stdout");
  serve->add_flag("--connected", sv.connected, "Require connected output");
  add_common(serve, false);

  auto* vocab = app.add_subcommand("vocab", "Print the vocabulary manifest");
  add_common(vocab);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*encode) return run_encode(o, enc);
    if (*decode) return run_decode(o, dec);
    if (*validate) return run_validate(o, val);
    if (*repair) return run_repair(o, rep);
    if (*train) return run_train(o, tr);
    if (*sample) return run_sample(o, sa);
    if (*structure) return run_eval_structure(o, st);
    if (*rates) {
      er.generated = {er_generated};
      er.reference = {er_reference};
      return run_eval_rates(o, er);
    }
    if (*stats) return run_stats(o, sts);
    if (*serve) return run_serve_mask(o, sv);
    if (*vocab) return run_vocab(o);
  } catch (const Failure& f) {
    report_failure(o, f);
    return f.code;
  } catch (const graphseq::Error& e) {
    report_failure(o, Failure(kExitData, "data", e.what()));
    return kExitData;
  } catch (const std::exception& e) {
    report_failure(o, Failure(kExitUsage, "internal", e.what()));
    return kExitUsage;
  }
  return kExitUsage;
}
