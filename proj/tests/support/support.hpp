#pragma once

// Shared fixtures for the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "robustrank/edge_list_io.hpp"
#include "robustrank/graph_matrix.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(ROBUSTRANK_TEST_DATA) + "/" + name; }

// Seven-page web from the introduction: pages 6 and 7 only cite each other.
inline robustrank::SparseStochasticMatrix seven_node() {
  return robustrank::from_edge_list(robustrank::read_edge_list(data_path("7node.tsv")));
}

// Strictly positive column-stochastic matrix with uniform(0, 1) entries.
inline robustrank::SparseStochasticMatrix random_positive(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<robustrank::SparseStochasticMatrix::Entry> entries;
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (double& v : col) {
      v = u(rng) + 1e-3;
      s += v;
    }
    for (std::size_t i = 0; i < n; ++i) entries.push_back({i, j, col[i] / s});
  }
  return robustrank::SparseStochasticMatrix::from_entries(n, entries);
}

// Random directed graph; roughly a fraction `dangling` of nodes has no links.
inline robustrank::SparseStochasticMatrix random_graph(std::size_t n, double density, double dangling,
                                                       std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  robustrank::EdgeList list;
  list.node_count = n;
  for (std::size_t s = 0; s < n; ++s) {
    if (u(rng) < dangling) continue;
    for (std::size_t t = 0; t < n; ++t) {
      if (u(rng) < density) list.edges.push_back({s, t});
    }
  }
  return robustrank::from_edge_list(list);
}

inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(n);
  double s = 0.0;
  for (double& v : x) {
    v = e(rng);
    s += v;
  }
  for (double& v : x) v /= s;
  return x;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double l1_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m += std::abs(a[i] - b[i]);
  return m;
}

inline double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace testing
