#include "robustrank/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "robustrank/errors.hpp"
#include "robustrank/kernels.hpp"

namespace robustrank {
namespace {

void check_weights(std::span<const double> x, std::span<const double> c) {
  if (x.size() != c.size()) {
    throw DimensionError("weights have length " + std::to_string(c.size()) + ", vector has " +
                         std::to_string(x.size()));
  }
  for (double w : c) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("penalty weights must be finite and > 0");
  }
}

std::vector<std::size_t> order_by(std::span<const double> key) {
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  return idx;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_simplex(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) {
    if (!(v >= 0.0)) throw InputError("point is not on the simplex (negative entry)");
    s += v;
  }
  if (std::abs(s - 1.0) > ScoreVector::kSumTolerance) {
    throw InputError("point is not on the simplex (sum " + std::to_string(s) + ")");
  }
}

}  // namespace

const char* to_string(NormPair pair) noexcept {
  switch (pair) {
    case NormPair::l1_g1:
      return "l1g1";
    case NormPair::l2_g2:
      return "l2g2";
    case NormPair::l2_l2:
      return "l2l2";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// UncertaintySpec

UncertaintySpec::UncertaintySpec(double epsilon, std::vector<double> budgets, NormPair pair)
    : epsilon_(epsilon), pair_(pair), budgets_(std::move(budgets)) {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) throw InputError("epsilon must be finite and > 0");
  if (budgets_.empty()) throw InputError("column budgets must not be empty");
  weights_.reserve(budgets_.size());
  for (double b : budgets_) {
    if (!(b > 0.0) || !std::isfinite(b)) throw InputError("column budgets must be finite and > 0");
    weights_.push_back(b / epsilon_);
  }
}

UncertaintySpec UncertaintySpec::with_budgets(double epsilon, std::vector<double> column_budgets,
                                              NormPair pair) {
  return UncertaintySpec(epsilon, std::move(column_budgets), pair);
}

UncertaintySpec UncertaintySpec::uniform(double epsilon, std::size_t n, NormPair pair) {
  return uniform(epsilon, n, pair, epsilon / static_cast<double>(n == 0 ? 1 : n));
}

UncertaintySpec UncertaintySpec::uniform(double epsilon, std::size_t n, NormPair pair,
                                         double column_budget) {
  if (n == 0) throw InputError("uncertainty spec needs n >= 1");
  return UncertaintySpec(epsilon, std::vector<double>(n, column_budget), pair);
}

UncertaintySpec UncertaintySpec::inverse_degree(double epsilon, const SparseStochasticMatrix& p,
                                                NormPair pair) {
  std::vector<double> budgets(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const std::size_t deg = p.is_dangling(j) ? p.size() : p.out_degree(j);
    budgets[j] = 1.0 / static_cast<double>(deg);
  }
  return UncertaintySpec(epsilon, std::move(budgets), pair);
}

// ---------------------------------------------------------------------------
// g1

double g1(std::span<const double> x, std::span<const double> c) {
  std::vector<double> z(x.size());
  return g1(x, c, z);
}

double g1(std::span<const double> x, std::span<const double> c, std::span<double> z) {
  check_weights(x, c);
  if (z.size() != x.size()) throw DimensionError("g1: dual buffer has the wrong length");
  const std::size_t n = x.size();
  std::vector<double> a(n);
  for (std::size_t j = 0; j < n; ++j) a[j] = std::abs(x[j]);
  const auto idx = order_by(a);

  // f(t) = t + sum_j c_j (a_j - t)_+, convex piecewise linear with kinks at a_j.
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) best += c[j] * a[j];
  double best_t = 0.0;
  double csum = 0.0;  // sum of c over entries ranked above the current one
  double asum = 0.0;  // sum of c * a over the same entries
  for (std::size_t k = 0; k < n; ++k) {
    const double t = a[idx[k]];
    const double f = t * (1.0 - csum) + asum;
    if (f < best) {
      best = f;
      best_t = t;
    }
    csum += c[idx[k]];
    asum += c[idx[k]] * a[idx[k]];
  }

  // Dual maximizer: full weight above the threshold, the leftover budget on
  // entries sitting exactly at it.
  std::fill(z.begin(), z.end(), 0.0);
  double budget = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = idx[k];
    if (a[j] > best_t) {
      z[j] = sign(x[j]) * c[j];
      budget -= c[j];
    }
  }
  if (best_t > 0.0) {
    budget = std::max(budget, 0.0);
    for (std::size_t k = 0; k < n && budget > 0.0; ++k) {
      const std::size_t j = idx[k];
      if (a[j] == best_t) {
        const double w = std::min(c[j], budget);
        z[j] = sign(x[j]) * w;
        budget -= w;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// g2

double g2(std::span<const double> x, std::span<const double> c) {
  std::vector<double> z(x.size());
  return g2(x, c, z);
}

double g2(std::span<const double> x, std::span<const double> c, std::span<double> z) {
  check_weights(x, c);
  if (z.size() != x.size()) throw DimensionError("g2: dual buffer has the wrong length");
  std::fill(z.begin(), z.end(), 0.0);

  std::vector<std::size_t> support;
  double box_sq = 0.0;
  double box_value = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) {
      support.push_back(j);
      box_sq += c[j] * c[j];
      box_value += c[j] * std::abs(x[j]);
    }
  }
  if (support.empty()) return 0.0;

  // The box corner lies inside the unit ball: the ball constraint is inactive.
  if (box_sq <= 1.0) {
    for (std::size_t j : support) z[j] = sign(x[j]) * c[j];
    return box_value;
  }

  // Breakpoints rho_j = |x_j| / c_j; entries with rho_j >= rho are clamped at c_j.
  const std::size_t m = support.size();
  std::vector<double> rho(m);
  for (std::size_t k = 0; k < m; ++k) rho[k] = std::abs(x[support[k]]) / c[support[k]];
  const auto order = order_by(rho);

  std::vector<double> free_sq(m + 1, 0.0);  // suffix sums of x_j^2 in breakpoint order
  for (std::size_t k = m; k-- > 0;) {
    const double v = x[support[order[k]]];
    free_sq[k] = free_sq[k + 1] + v * v;
  }

  double clamped_sq = 0.0;
  double clamped_value = 0.0;
  std::size_t best_k = 0;
  double best_rho = 0.0;
  double best_value = 0.0;
  double best_violation = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    if (clamped_sq < 1.0) {
      const double r = std::sqrt(free_sq[k] / (1.0 - clamped_sq));
      const double upper = k == 0 ? std::numeric_limits<double>::infinity() : rho[order[k - 1]];
      const double lower = rho[order[k]];
      const double violation = std::max({0.0, lower - r, r - upper});
      if (violation < best_violation) {
        best_violation = violation;
        best_k = k;
        best_rho = r;
        best_value = clamped_value + std::sqrt(free_sq[k] * (1.0 - clamped_sq));
        if (violation == 0.0) break;
      }
    }
    const std::size_t j = support[order[k]];
    clamped_sq += c[j] * c[j];
    clamped_value += c[j] * std::abs(x[j]);
  }

  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = support[order[k]];
    z[j] = k < best_k ? sign(x[j]) * c[j] : x[j] / best_rho;
  }
  return best_value;
}

// ---------------------------------------------------------------------------
// Objective

Objective::Objective(const SparseStochasticMatrix& p, UncertaintySpec spec)
    : p_(&p), spec_(std::move(spec)), px_(p.size()), r_(p.size()), z_(p.size()), back_(p.size()) {
  if (spec_.size() != p.size()) {
    throw DimensionError("uncertainty spec has " + std::to_string(spec_.size()) +
                         " column budgets for an n = " + std::to_string(p.size()) + " matrix");
  }
}

ObjectiveValue Objective::value(std::span<const double> x) { return evaluate(x, {}, false); }

ObjectiveValue Objective::value_and_subgradient(std::span<const double> x, std::span<double> grad) {
  if (grad.size() != p_->size()) throw DimensionError("subgradient buffer has the wrong length");
  return evaluate(x, grad, true);
}

ObjectiveValue Objective::evaluate(std::span<const double> x, std::span<double> grad, bool want_grad) {
  const std::size_t n = p_->size();
  if (x.size() != n) {
    throw DimensionError("point has length " + std::to_string(x.size()) + ", matrix is n = " +
                         std::to_string(n));
  }
  const auto& k = simd::active();
  p_->multiply(x, px_);
  for (std::size_t i = 0; i < n; ++i) r_[i] = px_[i] - x[i];

  ObjectiveValue out;
  const bool l1_residual = spec_.pair() == NormPair::l1_g1;
  if (l1_residual) {
    out.residual_term = k.l1_distance(px_.data(), x.data(), n);
  } else {
    out.residual_term = std::sqrt(k.norm2_sq(r_.data(), n));
  }

  double g = 0.0;
  switch (spec_.pair()) {
    case NormPair::l1_g1:
      g = want_grad ? g1(x, spec_.weights(), z_) : g1(x, spec_.weights());
      break;
    case NormPair::l2_g2:
      g = want_grad ? g2(x, spec_.weights(), z_) : g2(x, spec_.weights());
      break;
    case NormPair::l2_l2:
      g = std::sqrt(k.norm2_sq(x.data(), n));
      if (want_grad) {
        for (std::size_t i = 0; i < n; ++i) z_[i] = g > 0.0 ? x[i] / g : 0.0;
      }
      break;
  }
  out.penalty_term = spec_.epsilon() * g;
  out.total = out.residual_term + out.penalty_term;

  if (want_grad) {
    // Residual part: (P - I)^T s with s a subgradient of the outer norm at r.
    if (l1_residual) {
      for (std::size_t i = 0; i < n; ++i) r_[i] = sign(r_[i]);
    } else if (out.residual_term > 0.0) {
      for (std::size_t i = 0; i < n; ++i) r_[i] /= out.residual_term;
    } else {
      std::fill(r_.begin(), r_.end(), 0.0);
    }
    p_->multiply_transpose(r_, back_);
    for (std::size_t i = 0; i < n; ++i) grad[i] = back_[i] - r_[i] + spec_.epsilon() * z_[i];
  }
  return out;
}

ObjectiveValue phi(const SparseStochasticMatrix& p, std::span<const double> x,
                   const UncertaintySpec& spec) {
  check_simplex(x);
  Objective obj(p, spec);
  return obj.value(x);
}

std::vector<double> subgradient_phi(const SparseStochasticMatrix& p, std::span<const double> x,
                                    const UncertaintySpec& spec) {
  check_simplex(x);
  Objective obj(p, spec);
  std::vector<double> grad(p.size());
  obj.value_and_subgradient(x, grad);
  return grad;
}

}  // namespace robustrank
