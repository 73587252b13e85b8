#include "robustrank/graph_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "robustrank/errors.hpp"
#include "robustrank/kernels.hpp"

namespace robustrank {
namespace {

constexpr double kRenormalizeThreshold = 1e-15;
constexpr double kRejectThreshold = 1e-9;

void require_size(std::size_t got, std::size_t expected, const char* what) {
  if (got != expected) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ScoreVector

ScoreVector::ScoreVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InputError("score vector must not be empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw InputError("score vector entry " + std::to_string(i) + " is negative or not finite");
    }
  }
  const double total = simd::active().sum(values_.data(), values_.size());
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw InputError("score vector sums to " + std::to_string(total) + ", expected 1");
  }
}

ScoreVector ScoreVector::uniform(std::size_t n) {
  if (n == 0) throw InputError("uniform score vector needs n >= 1");
  return ScoreVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// DenseMatrix

double DenseMatrix::column_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, j);
  return s;
}

double DenseMatrix::column_abs_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += std::abs((*this)(i, j));
  return s;
}

double DenseMatrix::frobenius_norm() const {
  return std::sqrt(simd::active().norm2_sq(data_.data(), data_.size()));
}

double DenseMatrix::entrywise_l1_norm() const {
  double s = 0.0;
  for (double v : data_) s += std::abs(v);
  return s;
}

void DenseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  require_size(x.size(), n_, "dense multiply input");
  require_size(y.size(), n_, "dense multiply output");
  const auto& k = simd::active();
  for (std::size_t i = 0; i < n_; ++i) y[i] = k.dot(data_.data() + i * n_, x.data(), n_);
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  require_size(other.n_, n_, "dense matrix sum");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// SparseStochasticMatrix

SparseStochasticMatrix SparseStochasticMatrix::from_entries(std::size_t n,
                                                            std::span<const Entry> entries) {
  if (n == 0) throw InputError("matrix dimension must be at least 1");
  if (n > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw InputError("matrix dimension exceeds the 32-bit index range");
  }
  for (const Entry& e : entries) {
    if (e.row >= n || e.col >= n) {
      throw InputError("entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                       ") outside an n = " + std::to_string(n) + " matrix");
    }
    if (!std::isfinite(e.value) || e.value < 0.0) {
      throw InputError("matrix entries must be finite and nonnegative");
    }
  }

  std::vector<Entry> sorted(entries.begin(), entries.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });

  SparseStochasticMatrix m;
  m.n_ = n;
  m.col_offsets_.assign(n + 1, 0);
  m.dangling_flag_.assign(n, 0);

  for (std::size_t k = 0; k < sorted.size();) {
    const Entry& first = sorted[k];
    double value = 0.0;
    std::size_t next = k;
    while (next < sorted.size() && sorted[next].col == first.col && sorted[next].row == first.row) {
      value += sorted[next].value;
      ++next;
    }
    if (value > 0.0) {
      m.col_rows_.push_back(static_cast<std::uint32_t>(first.row));
      m.col_values_.push_back(value);
      ++m.col_offsets_[first.col + 1];
    }
    k = next;
  }
  std::partial_sum(m.col_offsets_.begin(), m.col_offsets_.end(), m.col_offsets_.begin());

  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t begin = m.col_offsets_[j];
    const std::size_t end = m.col_offsets_[j + 1];
    if (begin == end) {
      m.dangling_.push_back(j);
      m.dangling_flag_[j] = 1;
      continue;
    }
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) s += m.col_values_[k];
    if (std::abs(s - 1.0) > kRejectThreshold) {
      throw InputError("column " + std::to_string(j) + " sums to " + std::to_string(s) +
                       ", not a stochastic column");
    }
    if (std::abs(s - 1.0) > kRenormalizeThreshold) {
      for (std::size_t k = begin; k < end; ++k) m.col_values_[k] /= s;
    }
  }

  // Row-compressed copy for the P x gather.
  m.row_offsets_.assign(n + 1, 0);
  for (std::uint32_t r : m.col_rows_) ++m.row_offsets_[r + 1];
  std::partial_sum(m.row_offsets_.begin(), m.row_offsets_.end(), m.row_offsets_.begin());
  m.row_cols_.resize(m.col_rows_.size());
  m.row_values_.resize(m.col_values_.size());
  std::vector<std::size_t> fill(m.row_offsets_.begin(), m.row_offsets_.end() - 1);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = m.col_offsets_[j]; k < m.col_offsets_[j + 1]; ++k) {
      const std::size_t slot = fill[m.col_rows_[k]]++;
      m.row_cols_[slot] = static_cast<std::uint32_t>(j);
      m.row_values_[slot] = m.col_values_[k];
    }
  }
  return m;
}

SparseStochasticMatrix SparseStochasticMatrix::from_dense(const DenseMatrix& dense) {
  const std::size_t n = dense.size();
  std::vector<Entry> entries;
  for (std::size_t j = 0; j < n; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = dense(i, j);
      if (v != 0.0) {
        entries.push_back({i, j, v});
        any = true;
      }
    }
    if (!any) throw InputError("column " + std::to_string(j) + " of the dense matrix is zero");
  }
  return from_entries(n, entries);
}

std::span<const std::uint32_t> SparseStochasticMatrix::column_rows(NodeId col) const {
  return std::span<const std::uint32_t>(col_rows_).subspan(col_offsets_[col], out_degree(col));
}

std::span<const double> SparseStochasticMatrix::column_values(NodeId col) const {
  return std::span<const double>(col_values_).subspan(col_offsets_[col], out_degree(col));
}

double SparseStochasticMatrix::entry(NodeId row, NodeId col) const {
  if (row >= n_ || col >= n_) throw InputError("entry index out of range");
  if (is_dangling(col)) return 1.0 / static_cast<double>(n_);
  const auto rows = column_rows(col);
  const auto it = std::lower_bound(rows.begin(), rows.end(), static_cast<std::uint32_t>(row));
  if (it == rows.end() || *it != row) return 0.0;
  return column_values(col)[static_cast<std::size_t>(it - rows.begin())];
}

DenseMatrix SparseStochasticMatrix::to_dense() const {
  DenseMatrix d(n_);
  const double uniform = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    if (is_dangling(j)) {
      for (std::size_t i = 0; i < n_; ++i) d(i, j) = uniform;
      continue;
    }
    for (std::size_t k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k) d(col_rows_[k], j) = col_values_[k];
  }
  return d;
}

void SparseStochasticMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  require_size(x.size(), n_, "matvec input");
  require_size(y.size(), n_, "matvec output");
  const auto& k = simd::active();
  k.gather_matvec(n_, row_offsets_.data(), row_cols_.data(), row_values_.data(), x.data(), y.data());
  if (!dangling_.empty()) {
    double mass = 0.0;
    for (NodeId j : dangling_) mass += x[j];
    k.scale_shift(1.0, y.data(), mass / static_cast<double>(n_), y.data(), n_);
  }
}

void SparseStochasticMatrix::multiply_transpose(std::span<const double> x,
                                                std::span<double> y) const {
  require_size(x.size(), n_, "transpose matvec input");
  require_size(y.size(), n_, "transpose matvec output");
  const auto& k = simd::active();
  k.gather_matvec(n_, col_offsets_.data(), col_rows_.data(), col_values_.data(), x.data(), y.data());
  if (!dangling_.empty()) {
    const double mean = k.sum(x.data(), n_) / static_cast<double>(n_);
    for (NodeId j : dangling_) y[j] = mean;
  }
}

// ---------------------------------------------------------------------------
// Free functions

SparseStochasticMatrix from_edge_list(const EdgeList& list, DanglingPolicy policy) {
  if (list.node_count == 0) throw InputError("edge list has no nodes");
  const std::size_t n = list.node_count;
  for (const Edge& e : list.edges) {
    if (e.source >= n || e.target >= n) {
      throw InputError("edge " + std::to_string(e.source) + " -> " + std::to_string(e.target) +
                       " has an endpoint outside [0, " + std::to_string(n) + ")");
    }
  }
  for (NodeId d : list.dangling) {
    if (d >= n) throw InputError("dangling node " + std::to_string(d) + " out of range");
  }

  std::vector<Edge> links = list.edges;
  std::sort(links.begin(), links.end(), [](const Edge& a, const Edge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  links.erase(std::unique(links.begin(), links.end()), links.end());

  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : links) ++degree[e.source];
  for (NodeId d : list.dangling) {
    if (degree[d] != 0) {
      throw InputError("node " + std::to_string(d) + " is declared dangling but has links");
    }
  }

  std::vector<SparseStochasticMatrix::Entry> entries;
  entries.reserve(links.size());
  for (const Edge& e : links) {
    entries.push_back({e.target, e.source, 1.0 / static_cast<double>(degree[e.source])});
  }
  switch (policy) {
    case DanglingPolicy::uniform_all:
      break;  // empty columns become implicit uniform columns
  }
  return SparseStochasticMatrix::from_entries(n, entries);
}

ScoreVector matvec(const SparseStochasticMatrix& p, const ScoreVector& x) {
  std::vector<double> y(p.size());
  p.multiply(x.values(), y);
  return ScoreVector(std::move(y));
}

ValidationReport validate(const SparseStochasticMatrix& p, double tol) {
  ValidationReport report;
  report.min_entry = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p.size(); ++j) {
    double s = 0.0;
    if (p.is_dangling(j)) {
      s = static_cast<double>(p.size()) * (1.0 / static_cast<double>(p.size()));
      report.min_entry = std::min(report.min_entry, 1.0 / static_cast<double>(p.size()));
    } else {
      bool negative = false;
      for (double v : p.column_values(j)) {
        s += v;
        negative = negative || v < 0.0;
        report.min_entry = std::min(report.min_entry, v);
      }
      if (negative) report.columns_with_negative_entries.push_back(j);
    }
    const double dev = std::abs(s - 1.0);
    if (dev > report.max_column_deviation) {
      report.max_column_deviation = dev;
      report.worst_column = j;
    }
    if (dev > tol) report.failing_columns.push_back(j);
  }
  report.passed = report.failing_columns.empty() && report.columns_with_negative_entries.empty();
  return report;
}

ValidationReport validate(const DenseMatrix& m, double tol) {
  ValidationReport report;
  report.min_entry = m.size() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m.size(); ++j) {
    double s = 0.0;
    bool negative = false;
    bool nonzero = false;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double v = m(i, j);
      s += v;
      negative = negative || v < 0.0;
      nonzero = nonzero || v != 0.0;
      report.min_entry = std::min(report.min_entry, v);
    }
    if (negative) report.columns_with_negative_entries.push_back(j);
    if (!nonzero) report.empty_columns.push_back(j);
    const double dev = std::abs(s - 1.0);
    if (dev > report.max_column_deviation) {
      report.max_column_deviation = dev;
      report.worst_column = j;
    }
    if (dev > tol) report.failing_columns.push_back(j);
  }
  report.passed = report.failing_columns.empty() && report.columns_with_negative_entries.empty() &&
                  report.empty_columns.empty();
  return report;
}

double residual(const SparseStochasticMatrix& p, std::span<const double> x, Norm norm) {
  std::vector<double> px(p.size());
  p.multiply(x, px);
  const auto& k = simd::active();
  if (norm == Norm::l1) return k.l1_distance(px.data(), x.data(), x.size());
  return std::sqrt(k.l2_distance_sq(px.data(), x.data(), x.size()));
}

}  // namespace robustrank
