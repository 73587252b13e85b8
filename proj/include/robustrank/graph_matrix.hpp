#pragma once

// Column-stochastic link matrices built from directed graphs, score vectors on
// the probability simplex, and the basic products and residuals on them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace robustrank {

using NodeId = std::size_t;

struct Edge {
  NodeId source = 0;
  NodeId target = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct EdgeList {
  std::size_t node_count = 0;
  std::vector<Edge> edges;
  // Nodes declared dangling with a `dangling:<id>` directive. Any node without
  // outgoing links is dangling regardless; the directive only makes it explicit.
  std::vector<NodeId> dangling;
};

enum class DanglingPolicy {
  // A column without links becomes 1/n in every row, including its own.
  uniform_all,
};

enum class Norm { l1, l2 };

// Dense probability vector: nonnegative entries summing to one.
class ScoreVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  // Throws InputError unless every entry is finite and >= 0 and the entries sum
  // to 1 within kSumTolerance.
  explicit ScoreVector(std::vector<double> values);

  static ScoreVector uniform(std::size_t n);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

 private:
  std::vector<double> values_;
};

// Row-major square matrix, used for perturbations and perturbed matrices.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  double column_sum(std::size_t j) const;
  // l1 norm of column j
  double column_abs_sum(std::size_t j) const;
  double frobenius_norm() const;
  // sum of |entries|
  double entrywise_l1_norm() const;

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Sparse nonnegative n x n matrix with unit column sums (the nominal link
// matrix P). Entries are kept both column-compressed and row-compressed so that
// P x and P^T y are gather products. Dangling columns are stored as a flag and
// contribute 1/n to every row. Immutable after construction.
class SparseStochasticMatrix {
 public:
  static constexpr double kColumnSumTolerance = 1e-12;

  struct Entry {
    NodeId row = 0;
    NodeId col = 0;
    double value = 0.0;
  };

  // Builds from explicit entries; repeated (row, col) pairs are summed and
  // columns without entries are dangling. Columns whose sum deviates from 1 by
  // more than 1e-9 are rejected, smaller deviations are renormalized away.
  static SparseStochasticMatrix from_entries(std::size_t n, std::span<const Entry> entries);

  // Every column of `m` must already be stochastic (no all-zero columns).
  static SparseStochasticMatrix from_dense(const DenseMatrix& m);

  std::size_t size() const noexcept { return n_; }
  // Stored (explicit) entries; dangling columns are not counted.
  std::size_t stored_entries() const noexcept { return col_values_.size(); }

  std::span<const NodeId> dangling_columns() const noexcept { return dangling_; }
  bool is_dangling(NodeId col) const { return dangling_flag_[col] != 0; }
  // Number of stored links in column j (0 for dangling columns).
  std::size_t out_degree(NodeId col) const { return col_offsets_[col + 1] - col_offsets_[col]; }

  std::span<const std::uint32_t> column_rows(NodeId col) const;
  std::span<const double> column_values(NodeId col) const;

  double entry(NodeId row, NodeId col) const;
  DenseMatrix to_dense() const;

  // y = P x. Sizes must equal size().
  void multiply(std::span<const double> x, std::span<double> y) const;
  // y = P^T x.
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

 private:
  SparseStochasticMatrix() = default;

  std::size_t n_ = 0;
  std::vector<std::size_t> col_offsets_;
  std::vector<std::uint32_t> col_rows_;
  std::vector<double> col_values_;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::uint32_t> row_cols_;
  std::vector<double> row_values_;
  std::vector<NodeId> dangling_;
  std::vector<char> dangling_flag_;
};

// Column j receives 1/n_j at each distinct target of j (duplicate edges count
// once, self-loops are ordinary links); columns with no links follow `policy`.
SparseStochasticMatrix from_edge_list(const EdgeList& edges,
                                      DanglingPolicy policy = DanglingPolicy::uniform_all);

ScoreVector matvec(const SparseStochasticMatrix& p, const ScoreVector& x);

struct ValidationReport {
  bool passed = true;
  double max_column_deviation = 0.0;
  std::size_t worst_column = 0;
  // Columns whose sum is off by more than the tolerance.
  std::vector<std::size_t> failing_columns;
  // Columns with no nonzero entry.
  std::vector<std::size_t> empty_columns;
  std::vector<std::size_t> columns_with_negative_entries;
  double min_entry = 0.0;
};

ValidationReport validate(const SparseStochasticMatrix& p, double tol);
ValidationReport validate(const DenseMatrix& m, double tol);

// ||P x - x|| in the requested norm.
double residual(const SparseStochasticMatrix& p, std::span<const double> x, Norm norm);

}  // namespace robustrank
