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

// Structural statistics, MMD, random-walk documents and corpus histograms.
//
// Every structural statistic reads the undirected simple projection: edge
// direction dropped, parallel edges merged, self-loops removed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "graphseq/encoder.hpp"
#include "graphseq/graph.hpp"

namespace graphseq {

/// Sorted, duplicate-free neighbour lists of the undirected simple projection.
using Adjacency = std::vector<std::vector<std::size_t>>;

inline Adjacency simple_projection(const Graph& g) {
  Adjacency adj(g.node_count());
  for (const auto& e : g.edges()) {
    if (e.source == e.target) continue;
    adj[e.source].push_back(e.target);
    adj[e.target].push_back(e.source);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return adj;
}

enum class Statistic { kDegree, kClustering, kBetweenness, kCloseness, kKatz, kSpectral };

inline constexpr std::array<Statistic, 6> kAllStatistics = {
    Statistic::kDegree,    Statistic::kClustering, Statistic::kBetweenness,
    Statistic::kCloseness, Statistic::kKatz,       Statistic::kSpectral};

inline std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::kDegree: return "degree";
    case Statistic::kClustering: return "clustering";
    case Statistic::kBetweenness: return "betweenness";
    case Statistic::kCloseness: return "closeness";
    case Statistic::kKatz: return "katz";
    case Statistic::kSpectral: return "spectral";
  }
  return "?";
}

/// Column heading used in report tables.
inline std::string_view column_title(Statistic s) {
  switch (s) {
    case Statistic::kDegree: return "Degree";
    case Statistic::kClustering: return "Clustering";
    case Statistic::kBetweenness: return "Bet. Cen.";
    case Statistic::kCloseness: return "Cls. Cen.";
    case Statistic::kKatz: return "Katz Cen.";
    case Statistic::kSpectral: return "Spectral";
  }
  return "?";
}

inline Statistic statistic_from_string(std::string_view s) {
  for (auto st : kAllStatistics) {
    if (to_string(st) == s) return st;
  }
  throw MetricError("unknown statistic '" + std::string(s) + "'");
}

/// Degree histogram over [0, max degree], normalized to sum 1.
inline std::vector<double> degree_histogram(const Adjacency& adj) {
  if (adj.empty()) return {};
  std::size_t max_deg = 0;
  for (const auto& a : adj) max_deg = std::max(max_deg, a.size());
  std::vector<double> h(max_deg + 1, 0.0);
  for (const auto& a : adj) h[a.size()] += 1.0;
  for (auto& x : h) x /= static_cast<double>(adj.size());
  return h;
}

/// Local clustering: closed triangles over C(deg, 2); 0 when deg < 2.
inline std::vector<double> clustering_coefficients(const Adjacency& adj) {
  std::vector<double> c(adj.size(), 0.0);
  for (std::size_t v = 0; v < adj.size(); ++v) {
    const auto& nv = adj[v];
    const std::size_t d = nv.size();
    if (d < 2) continue;
    std::size_t links = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto& ni = adj[nv[i]];
      for (std::size_t j = i + 1; j < d; ++j) {
        if (std::binary_search(ni.begin(), ni.end(), nv[j])) ++links;
      }
    }
    c[v] = 2.0 * static_cast<double>(links) / static_cast<double>(d * (d - 1));
  }
  return c;
}

/// Brandes betweenness, each unordered pair counted once, scaled by
/// 2 / ((n-1)(n-2)). All zeros when n <= 2.
inline std::vector<double> betweenness_centrality(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<double> bc(n, 0.0);
  if (n <= 2) return bc;
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::vector<std::vector<std::size_t>> pred(n);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    for (auto& p : pred) p.clear();
    stack.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::deque<std::size_t> q{s};
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      stack.push_back(v);
      for (auto w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          pred[w].push_back(v);
        }
      }
    }
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      auto w = *it;
      for (auto v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  // Each unordered pair was visited from both ends.
  const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  for (auto& x : bc) x *= scale;
  return bc;
}

/// Closeness with the Wasserman-Faust correction for disconnected graphs:
/// (r / (n-1)) * (r / sum of distances), r = nodes reachable from v.
inline std::vector<double> closeness_centrality(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<double> c(n, 0.0);
  if (n <= 1) return c;
  std::vector<long> dist(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::deque<std::size_t> q{s};
    double total = 0.0;
    std::size_t reached = 0;
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      for (auto w : adj[v]) {
        if (dist[w] >= 0) continue;
        dist[w] = dist[v] + 1;
        total += static_cast<double>(dist[w]);
        ++reached;
        q.push_back(w);
      }
    }
    if (reached == 0) continue;
    const double r = static_cast<double>(reached);
    c[s] = (r / static_cast<double>(n - 1)) * (r / total);
  }
  return c;
}

struct KatzParams {
  double alpha = 0.01;
  double tolerance = 1e-14;         // max-norm change per iteration
  std::size_t max_iterations = 100000;
};

struct KatzResult {
  std::vector<double> values;  // L2-normalized
  double alpha = 0.0;          // attenuation actually used
  std::size_t halvings = 0;
  std::size_t iterations = 0;
};

inline double spectral_radius(const Adjacency& adj) {
  const auto n = static_cast<Eigen::Index>(adj.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t v = 0; v < adj.size(); ++v) {
    for (auto w : adj[v]) a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) = 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Katz centrality by power iteration of x <- alpha*A*x + 1. Alpha is halved
/// while alpha * spectral radius >= 1, and again if iteration stalls.
inline KatzResult katz_centrality(const Adjacency& adj, KatzParams params = {}) {
  KatzResult r;
  const std::size_t n = adj.size();
  r.alpha = params.alpha;
  if (n == 0) return r;
  const double rho = spectral_radius(adj);
  while (r.alpha * rho >= 1.0) {
    r.alpha /= 2.0;
    ++r.halvings;
  }
  std::vector<double> x(n), next(n);
  for (;;) {
    std::fill(x.begin(), x.end(), 1.0);
    bool converged = false;
    for (r.iterations = 1; r.iterations <= params.max_iterations; ++r.iterations) {
      double change = 0.0;
      for (std::size_t v = 0; v < n; ++v) {
        double s = 0.0;
        for (auto w : adj[v]) s += x[w];
        next[v] = r.alpha * s + 1.0;
        change = std::max(change, std::abs(next[v] - x[v]));
      }
      x.swap(next);
      if (change <= params.tolerance * std::max(1.0, *std::max_element(x.begin(), x.end()))) {
        converged = true;
        break;
      }
    }
    if (converged) break;
    r.alpha /= 2.0;
    ++r.halvings;
  }
  double norm = 0.0;
  for (auto v : x) norm += v * v;
  norm = std::sqrt(norm);
  r.values = x;
  for (auto& v : r.values) v /= norm;
  return r;
}

/// Eigenvalues of I - D^-1/2 A D^-1/2, ascending. Rows of isolated nodes are zero.
inline std::vector<double> normalized_laplacian_spectrum(const Adjacency& adj) {
  const auto n = static_cast<Eigen::Index>(adj.size());
  if (n == 0) return {};
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (adj[v].empty()) continue;
    const auto iv = static_cast<Eigen::Index>(v);
    l(iv, iv) = 1.0;
    for (auto w : adj[v]) {
      l(iv, static_cast<Eigen::Index>(w)) =
          -1.0 / std::sqrt(static_cast<double>(adj[v].size()) * static_cast<double>(adj[w].size()));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

/// Fixed-width histogram over [lo, hi]; values outside are clamped to the end bins.
inline std::vector<double> histogram(const std::vector<double>& values, std::size_t bins, double lo,
                                     double hi) {
  std::vector<double> h(bins, 0.0);
  if (bins == 0) return h;
  for (auto v : values) {
    double f = (v - lo) / (hi - lo) * static_cast<double>(bins);
    auto b = f <= 0.0 ? std::size_t{0} : static_cast<std::size_t>(f);
    h[std::min(b, bins - 1)] += 1.0;
  }
  return h;
}

struct StatParams {
  KatzParams katz;
  std::size_t spectral_bins = 200;
  std::size_t unit_bins = 100;  // clustering and centralities, over [0, 1]
};

/// Raw statistic: degree and spectral are histograms, the rest per-node values.
inline std::vector<double> stat_vector(const Graph& g, Statistic s, const StatParams& p = {}) {
  if (g.node_count() == 0) return {};
  auto adj = simple_projection(g);
  switch (s) {
    case Statistic::kDegree: return degree_histogram(adj);
    case Statistic::kClustering: return clustering_coefficients(adj);
    case Statistic::kBetweenness: return betweenness_centrality(adj);
    case Statistic::kCloseness: return closeness_centrality(adj);
    case Statistic::kKatz: return katz_centrality(adj, p.katz).values;
    case Statistic::kSpectral:
      return histogram(normalized_laplacian_spectrum(adj), p.spectral_bins, 0.0, 2.0);
  }
  return {};
}

/// The vector compared by MMD: per-node values histogrammed over [0, 1].
inline std::vector<double> mmd_sample(const Graph& g, Statistic s, const StatParams& p = {}) {
  auto v = stat_vector(g, s, p);
  if (s == Statistic::kDegree || s == Statistic::kSpectral || g.node_count() == 0) return v;
  return histogram(v, p.unit_bins, 0.0, 1.0);
}

struct MmdParams {
  std::optional<double> sigma;  // median heuristic when unset
};

struct MmdResult {
  double value = 0.0;
  double sigma = 1.0;
};

namespace detail {

inline std::vector<std::vector<double>> normalize_and_pad(const std::vector<std::vector<double>>& xs,
                                                          std::size_t width) {
  std::vector<std::vector<double>> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    std::vector<double> v(width, 0.0);
    double sum = 0.0;
    for (auto e : x) sum += e;
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = sum > 0.0 ? x[i] / sum : x[i];
    out.push_back(std::move(v));
  }
  return out;
}

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

}  // namespace detail

/// Biased MMD (V-statistic), square-rooted, with a Gaussian kernel on
/// sum-normalized, zero-padded vectors.
inline MmdResult mmd(const std::vector<std::vector<double>>& a,
                     const std::vector<std::vector<double>>& b, const MmdParams& params = {}) {
  if (a.empty() || b.empty()) throw MetricError("mmd requires two nonempty sample lists");
  std::size_t width = 0;
  for (const auto& x : a) width = std::max(width, x.size());
  for (const auto& x : b) width = std::max(width, x.size());
  auto xa = detail::normalize_and_pad(a, width);
  auto xb = detail::normalize_and_pad(b, width);

  MmdResult r;
  if (params.sigma) {
    if (!(*params.sigma > 0.0)) throw MetricError("mmd bandwidth must be positive");
    r.sigma = *params.sigma;
  } else {
    std::vector<double> dists;
    std::vector<const std::vector<double>*> pooled;
    for (const auto& x : xa) pooled.push_back(&x);
    for (const auto& x : xb) pooled.push_back(&x);
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      for (std::size_t j = i + 1; j < pooled.size(); ++j) {
        dists.push_back(std::sqrt(detail::squared_distance(*pooled[i], *pooled[j])));
      }
    }
    double median = 0.0;
    if (!dists.empty()) {
      std::sort(dists.begin(), dists.end());
      const std::size_t m = dists.size();
      median = m % 2 == 1 ? dists[m / 2] : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
    }
    r.sigma = median > 0.0 ? median : 1.0;
  }
  const double denom = 2.0 * r.sigma * r.sigma;
  auto mean_kernel = [&](const std::vector<std::vector<double>>& p,
                         const std::vector<std::vector<double>>& q) {
    double s = 0.0;
    for (const auto& x : p) {
      for (const auto& y : q) s += std::exp(-detail::squared_distance(x, y) / denom);
    }
    return s / (static_cast<double>(p.size()) * static_cast<double>(q.size()));
  };
  const double sq = mean_kernel(xa, xa) + mean_kernel(xb, xb) - 2.0 * mean_kernel(xa, xb);
  r.value = std::sqrt(std::max(0.0, sq));
  return r;
}

struct MetricReport {
  std::size_t real_size = 0;
  std::size_t synth_size = 0;
  std::array<MmdResult, 6> mmd{};  // kAllStatistics order
  StatParams stat_params;
  MmdParams mmd_params;
};

inline MetricReport structure_report(const std::vector<Graph>& real, const std::vector<Graph>& synth,
                                     const StatParams& sp = {}, const MmdParams& mp = {}) {
  if (real.empty() || synth.empty()) throw MetricError("structure report requires two nonempty corpora");
  MetricReport r;
  r.real_size = real.size();
  r.synth_size = synth.size();
  r.stat_params = sp;
  r.mmd_params = mp;
  for (std::size_t i = 0; i < kAllStatistics.size(); ++i) {
    std::vector<std::vector<double>> a, b;
    for (const auto& g : real) a.push_back(mmd_sample(g, kAllStatistics[i], sp));
    for (const auto& g : synth) b.push_back(mmd_sample(g, kAllStatistics[i], sp));
    r.mmd[i] = mmd(a, b, mp);
  }
  return r;
}

inline nlohmann::ordered_json to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["real_graphs"] = r.real_size;
  j["synthetic_graphs"] = r.synth_size;
  auto& m = j["mmd"] = nlohmann::ordered_json::object();
  auto& s = j["sigma"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kAllStatistics.size(); ++i) {
    m[std::string(to_string(kAllStatistics[i]))] = r.mmd[i].value;
    s[std::string(to_string(kAllStatistics[i]))] = r.mmd[i].sigma;
  }
  j["kernel"] = "gaussian";
  j["estimator"] = "biased-v-statistic-sqrt";
  j["bandwidth"] = r.mmd_params.sigma ? "fixed" : "median-heuristic";
  j["katz_alpha"] = r.stat_params.katz.alpha;
  j["spectral_bins"] = r.stat_params.spectral_bins;
  j["unit_bins"] = r.stat_params.unit_bins;
  return j;
}

inline std::string structure_table(const MetricReport& r) {
  std::string head, rule, body;
  for (std::size_t i = 0; i < kAllStatistics.size(); ++i) {
    std::string title(column_title(kAllStatistics[i]));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", r.mmd[i].value);
    std::string cell(buf);
    const std::size_t w = std::max(title.size(), cell.size());
    const char* sep = i ? " | " : "";
    head += sep + std::string(w - title.size(), ' ') + title;
    body += sep + std::string(w - cell.size(), ' ') + cell;
    rule += (i ? "-+-" : "") + std::string(w, '-');
  }
  return head + "\n" + rule + "\n" + body + "\n";
}

struct WalkParams {
  std::size_t walks = 100;
  std::size_t max_length = 10;  // nodes visited per walk
  std::uint64_t seed = 0;
};

/// Random-walk document. Each visit emits the node type name and attribute
/// values; each traversed edge emits its type name. A dead end jumps to a
/// uniform node with outgoing edges, or ends the walk when there is none.
inline std::vector<std::string> walk_document(const Graph& g, const WalkParams& p = {}) {
  if (g.node_count() == 0) throw MetricError("walk_document requires a nonempty graph");
  const auto& schema = g.schema();
  std::vector<std::vector<std::size_t>> out(g.node_count());
  for (std::size_t i = 0; i < g.edge_count(); ++i) out[g.edge(i).source].push_back(i);
  std::vector<std::size_t> movable;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    if (!out[v].empty()) movable.push_back(v);
  }
  std::mt19937_64 rng(p.seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  std::vector<std::string> doc;
  auto visit = [&](std::size_t v) {
    const auto& node = g.node(v);
    doc.push_back(schema.node_type(node.type).name);
    for (const auto& a : node.attrs) doc.push_back(a);
  };
  for (std::size_t w = 0; w < p.walks; ++w) {
    std::size_t v = pick(g.node_count());
    for (std::size_t step = 0; step < p.max_length; ++step) {
      visit(v);
      if (step + 1 == p.max_length) break;
      if (out[v].empty()) {
        if (movable.empty()) break;
        v = movable[pick(movable.size())];
        continue;
      }
      const auto& e = g.edge(out[v][pick(out[v].size())]);
      doc.push_back(schema.edge_type(e.type).name);
      v = e.target;
    }
  }
  return doc;
}

/// Cosine of term-frequency vectors; 0 when either document is empty.
inline double bow_cosine(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::unordered_map<std::string_view, std::pair<double, double>> tf;
  for (const auto& t : a) tf[t].first += 1.0;
  for (const auto& t : b) tf[t].second += 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [term, c] : tf) {
    dot += c.first * c.second;
    na += c.first * c.first;
    nb += c.second * c.second;
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct DatasetStats {
  std::map<std::size_t, std::size_t> node_counts;   // nodes per graph -> graphs
  std::map<std::size_t, std::size_t> token_counts;  // encoded length -> graphs
  std::map<std::string, std::size_t> node_types;    // type name -> nodes
};

inline DatasetStats dataset_stats(const std::vector<Graph>& corpus, const Vocabulary& vocab) {
  DatasetStats s;
  for (const auto& g : corpus) {
    ++s.node_counts[g.node_count()];
    ++s.token_counts[encode(g, vocab).size()];
    for (const auto& n : g.nodes()) ++s.node_types[g.schema().node_type(n.type).name];
  }
  return s;
}

inline nlohmann::ordered_json to_json(const DatasetStats& s) {
  auto hist = [](const auto& m) {
    nlohmann::ordered_json h;
    h["values"] = nlohmann::ordered_json::array();
    h["counts"] = nlohmann::ordered_json::array();
    for (const auto& [k, v] : m) {
      h["values"].push_back(k);
      h["counts"].push_back(v);
    }
    return h;
  };
  nlohmann::ordered_json j;
  j["node_counts"] = hist(s.node_counts);
  j["token_counts"] = hist(s.token_counts);
  j["node_types"] = hist(s.node_types);
  return j;
}

}  // namespace graphseq
