#pragma once

// Synthetic n x n grid graphs with closed-form scores.
//
// Nodes are (i, j), 1 <= i, j <= n, stored at flat id (i - 1) n + (j - 1).
// (i, j) with i, j < n links to (i + 1, j) and (i, j + 1); the last row links
// right, the last column links down. The corner (n, n) is dangling in Model 1
// (uniform jump to all N = n^2 nodes) and links only to (1, 1) in Model 2.

#include <cstddef>
#include <span>
#include <vector>

#include "robustrank/graph_matrix.hpp"

namespace robustrank {

enum class GridVariant { model1, model2 };

const char* to_string(GridVariant variant) noexcept;

struct GridModelSpec {
  std::size_t side = 2;
  GridVariant variant = GridVariant::model1;

  // Throws InputError for side < 2 or side^2 beyond the index range.
  void validate() const;
  std::size_t node_count() const noexcept { return side * side; }
  // 1-based (i, j) -> flat id
  std::size_t id(std::size_t i, std::size_t j) const noexcept { return (i - 1) * side + (j - 1); }
  std::size_t row_of(std::size_t id) const noexcept { return id / side + 1; }
  std::size_t column_of(std::size_t id) const noexcept { return id % side + 1; }
};

// Model 1 marks (n, n) with a dangling directive instead of N explicit links.
EdgeList generate_edges(const GridModelSpec& spec);
SparseStochasticMatrix generate(const GridModelSpec& spec);

// Unnormalized solutions of the balance recurrences, flat-indexed.
// Model 1 with x_11 = 1 (x_nn = N).
std::vector<double> model1_raw_scores(std::size_t n);
// PageRank recurrences with y_11 = alpha (y_nn = N alpha).
std::vector<double> model1_pagerank_raw(std::size_t n, double alpha);
// Model 2 with x_11 = 1 (no teleport term; x_nn = x_11).
std::vector<double> model2_raw_scores(std::size_t n);

ScoreVector model1_exact_scores(std::size_t n);
ScoreVector model1_pagerank_scores(std::size_t n, double alpha);
ScoreVector model2_exact_scores(std::size_t n);

// x_ii for i = 1..n
std::vector<double> diagonal(std::span<const double> scores, std::size_t n);
// x_nj for j = 1..n
std::vector<double> last_row(std::span<const double> scores, std::size_t n);

}  // namespace robustrank
