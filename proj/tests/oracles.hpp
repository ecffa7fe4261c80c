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

// Brute-force references for the structural statistics and MMD. Every route
// here works on a dense adjacency matrix and avoids the library's algorithms.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "graphseq/graphseq.hpp"

namespace graphseq::oracle {

/// Symmetric 0/1 matrix; direction, loops and parallel edges dropped.
using Matrix = std::vector<std::vector<int>>;

inline Matrix adjacency_matrix(const Graph& g) {
  Matrix a(g.node_count(), std::vector<int>(g.node_count(), 0));
  for (const auto& e : g.edges()) {
    if (e.source == e.target) continue;
    a[e.source][e.target] = a[e.target][e.source] = 1;
  }
  return a;
}

inline Matrix adjacency_matrix(const Adjacency& adj) {
  Matrix a(adj.size(), std::vector<int>(adj.size(), 0));
  for (std::size_t v = 0; v < adj.size(); ++v) {
    for (auto w : adj[v]) a[v][w] = 1;
  }
  return a;
}

inline std::size_t degree(const Matrix& a, std::size_t v) {
  std::size_t d = 0;
  for (auto x : a[v]) d += static_cast<std::size_t>(x);
  return d;
}

/// Fraction of nodes per degree over [0, max degree].
inline std::vector<double> degree_histogram(const Matrix& a) {
  const std::size_t n = a.size();
  if (n == 0) return {};
  std::vector<std::size_t> deg(n);
  for (std::size_t v = 0; v < n; ++v) deg[v] = degree(a, v);
  std::vector<double> h(*std::max_element(deg.begin(), deg.end()) + 1, 0.0);
  for (auto d : deg) h[d] += 1.0 / static_cast<double>(n);
  return h;
}

/// Triangles through v over neighbour pairs, by triple loop.
inline std::vector<double> clustering(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t pairs = 0, closed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!a[v][i] || !a[v][j]) continue;
        ++pairs;
        closed += static_cast<std::size_t>(a[i][j]);
      }
    }
    if (pairs) c[v] = static_cast<double>(closed) / static_cast<double>(pairs);
  }
  return c;
}

/// All-pairs hop distances by Floyd-Warshall; -1 when unreachable.
inline std::vector<std::vector<long>> distances(const Matrix& a) {
  const std::size_t n = a.size();
  const long inf = 1 << 20;
  std::vector<std::vector<long>> d(n, std::vector<long>(n, inf));
  for (std::size_t v = 0; v < n; ++v) {
    d[v][v] = 0;
    for (std::size_t w = 0; w < n; ++w) {
      if (a[v][w]) d[v][w] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  for (auto& row : d) {
    for (auto& x : row) {
      if (x >= inf) x = -1;
    }
  }
  return d;
}

/// Enumerates every shortest path explicitly and counts interior visits;
/// unordered pairs, scaled by 2 / ((n-1)(n-2)).
inline std::vector<double> betweenness(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<double> bc(n, 0.0);
  if (n <= 2) return bc;
  auto d = distances(a);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      if (d[s][t] < 0) continue;
      std::vector<std::vector<std::size_t>> paths;
      std::vector<std::size_t> cur{s};
      std::function<void(std::size_t)> dfs = [&](std::size_t v) {
        if (v == t) {
          paths.push_back(cur);
          return;
        }
        if (static_cast<long>(cur.size()) > d[s][t]) return;
        for (std::size_t w = 0; w < n; ++w) {
          if (!a[v][w] || std::find(cur.begin(), cur.end(), w) != cur.end()) continue;
          cur.push_back(w);
          dfs(w);
          cur.pop_back();
        }
      };
      dfs(s);
      std::vector<double> through(n, 0.0);
      std::size_t shortest = 0;
      for (const auto& p : paths) {
        if (static_cast<long>(p.size()) - 1 != d[s][t]) continue;
        ++shortest;
        for (std::size_t i = 1; i + 1 < p.size(); ++i) through[p[i]] += 1.0;
      }
      for (std::size_t v = 0; v < n; ++v) bc[v] += through[v] / static_cast<double>(shortest);
    }
  }
  for (auto& x : bc) x *= 2.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  return bc;
}

/// Closeness scaled by the reachable fraction: (r/(n-1)) * (r / sum of distances).
inline std::vector<double> closeness(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<double> c(n, 0.0);
  auto d = distances(a);
  for (std::size_t v = 0; v < n; ++v) {
    double total = 0.0, reached = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
      if (w == v || d[v][w] < 0) continue;
      total += static_cast<double>(d[v][w]);
      reached += 1.0;
    }
    if (reached > 0) c[v] = (reached / static_cast<double>(n - 1)) * (reached / total);
  }
  return c;
}

inline Eigen::MatrixXd dense(const Matrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

/// Katz by direct solve of (I - alpha A) x = 1, L2-normalized.
inline std::vector<double> katz(const Matrix& a, double alpha) {
  const auto n = static_cast<Eigen::Index>(a.size());
  if (n == 0) return {};
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - alpha * dense(a);
  Eigen::VectorXd x = m.fullPivLu().solve(Eigen::VectorXd::Ones(n));
  x /= x.norm();
  return {x.data(), x.data() + n};
}

/// Spectrum of the random-walk Laplacian I - D^-1 A (similar to the
/// symmetric normalized one), by a general nonsymmetric eigensolver.
/// Isolated nodes contribute zero rows.
inline std::vector<double> laplacian_spectrum(const Matrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  if (n == 0) return {};
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto d = static_cast<double>(degree(a, static_cast<std::size_t>(i)));
    if (d == 0) continue;
    l(i, i) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) l(i, j) = -1.0 / d;
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(l, false);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i).real());
  std::sort(out.begin(), out.end());
  return out;
}

/// MMD from the Gram matrix of the pooled, already-normalized sample.
inline double mmd(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                  double sigma) {
  const auto m = static_cast<Eigen::Index>(a.size()), n = static_cast<Eigen::Index>(b.size());
  const auto w = static_cast<Eigen::Index>(a[0].size());
  Eigen::MatrixXd x(m + n, w);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < w; ++j) x(i, j) = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < w; ++j) x(m + i, j) = b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  Eigen::MatrixXd k(m + n, m + n);
  for (Eigen::Index i = 0; i < m + n; ++i) {
    for (Eigen::Index j = 0; j < m + n; ++j) {
      k(i, j) = std::exp(-(x.row(i) - x.row(j)).squaredNorm() / (2 * sigma * sigma));
    }
  }
  Eigen::VectorXd weights(m + n);
  weights.head(m).setConstant(1.0 / static_cast<double>(m));
  weights.tail(n).setConstant(-1.0 / static_cast<double>(n));
  return std::sqrt(std::max(0.0, weights.dot(k * weights)));
}

}  // namespace graphseq::oracle
