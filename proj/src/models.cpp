#include "robustrank/models.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "robustrank/errors.hpp"

namespace robustrank {
namespace {

// v_11 = first, then v_ij = a (w_up v_{i-1,j} + w_left v_{i,j-1} + c), where a
// sender in the last row or column passes weight 1 and any other passes 1/2.
std::vector<double> run_recurrence(std::size_t n, double first, double a, double c) {
  GridModelSpec spec{n, GridVariant::model1};
  spec.validate();
  std::vector<double> v(spec.node_count(), 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (i == 1 && j == 1) {
        v[0] = first;
        continue;
      }
      double inflow = 0.0;
      if (i > 1) inflow += (j == n ? 1.0 : 0.5) * v[spec.id(i - 1, j)];
      if (j > 1) inflow += (i == n ? 1.0 : 0.5) * v[spec.id(i, j - 1)];
      v[spec.id(i, j)] = a * (inflow + c);
    }
  }
  return v;
}

ScoreVector normalized(std::vector<double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (!std::isfinite(total) || !(total > 0.0)) {
    throw std::range_error("grid recurrence left the floating-point range");
  }
  for (double& x : v) x /= total;
  return ScoreVector(std::move(v));
}

}  // namespace

const char* to_string(GridVariant variant) noexcept {
  return variant == GridVariant::model1 ? "model1" : "model2";
}

void GridModelSpec::validate() const {
  if (side < 2) throw InputError("grid side must be >= 2, got " + std::to_string(side));
  // Flat ids are stored as 32-bit column indices.
  if (side > 46340) throw InputError("grid side too large: " + std::to_string(side));
}

EdgeList generate_edges(const GridModelSpec& spec) {
  spec.validate();
  const std::size_t n = spec.side;
  EdgeList list;
  list.node_count = spec.node_count();
  list.edges.reserve(2 * list.node_count);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t from = spec.id(i, j);
      if (i < n) list.edges.push_back({from, spec.id(i + 1, j)});
      if (j < n) list.edges.push_back({from, spec.id(i, j + 1)});
    }
  }
  const std::size_t corner = spec.id(n, n);
  if (spec.variant == GridVariant::model1) {
    list.dangling.push_back(corner);
  } else {
    list.edges.push_back({corner, spec.id(1, 1)});
  }
  return list;
}

SparseStochasticMatrix generate(const GridModelSpec& spec) { return from_edge_list(generate_edges(spec)); }

std::vector<double> model1_raw_scores(std::size_t n) { return run_recurrence(n, 1.0, 1.0, 1.0); }

std::vector<double> model1_pagerank_raw(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  return run_recurrence(n, alpha, alpha, 1.0);
}

std::vector<double> model2_raw_scores(std::size_t n) { return run_recurrence(n, 1.0, 1.0, 0.0); }

ScoreVector model1_exact_scores(std::size_t n) { return normalized(model1_raw_scores(n)); }

ScoreVector model1_pagerank_scores(std::size_t n, double alpha) {
  return normalized(model1_pagerank_raw(n, alpha));
}

ScoreVector model2_exact_scores(std::size_t n) { return normalized(model2_raw_scores(n)); }

std::vector<double> diagonal(std::span<const double> scores, std::size_t n) {
  if (scores.size() != n * n) throw DimensionError("scores do not form an n x n grid");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = scores[i * n + i];
  return d;
}

std::vector<double> last_row(std::span<const double> scores, std::size_t n) {
  if (scores.size() != n * n) throw DimensionError("scores do not form an n x n grid");
  return std::vector<double>(scores.end() - static_cast<std::ptrdiff_t>(n), scores.end());
}

}  // namespace robustrank
