#pragma once

// Robust objective phi(x) = ||P x - x||_(1) + eps * ||x||_(2) for the three
// supported norm pairs, the penalty norms g1 and g2, and subgradients.
//
// With weights c_j = eps_j / eps,
//   g1(x) = min_{x = u + v} ||u||_inf + sum_j c_j |v_j|
//   g2(x) = min_{x = u + v} ||u||_2   + sum_j c_j |v_j|
// evaluated through their dual forms
//   g1(x) = max { z.x : ||z||_1 <= 1, |z_j| <= c_j }
//   g2(x) = max { z.x : ||z||_2 <= 1, |z_j| <= c_j }.

#include <cstddef>
#include <span>
#include <vector>

#include "robustrank/graph_matrix.hpp"

namespace robustrank {

enum class NormPair {
  l1_g1,  // ||Px - x||_1 + eps * g1(x)
  l2_g2,  // ||Px - x||_2 + eps * g2(x)
  l2_l2,  // ||Px - x||_2 + eps * ||x||_2
};

const char* to_string(NormPair pair) noexcept;

// Total budget eps > 0 and per-column budgets eps_j > 0. Stores the weights
// c_j = eps_j / eps once; every formula consumes the ratio.
class UncertaintySpec {
 public:
  static UncertaintySpec with_budgets(double epsilon, std::vector<double> column_budgets,
                                      NormPair pair);
  // Every column gets the same budget; the default is eps / n.
  static UncertaintySpec uniform(double epsilon, std::size_t n, NormPair pair);
  static UncertaintySpec uniform(double epsilon, std::size_t n, NormPair pair, double column_budget);
  // eps_j = 1 / n_j, with n_j = n for dangling columns.
  static UncertaintySpec inverse_degree(double epsilon, const SparseStochasticMatrix& p,
                                        NormPair pair);

  double epsilon() const noexcept { return epsilon_; }
  NormPair pair() const noexcept { return pair_; }
  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> column_budgets() const noexcept { return budgets_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  UncertaintySpec(double epsilon, std::vector<double> budgets, NormPair pair);

  double epsilon_;
  NormPair pair_;
  std::vector<double> budgets_;
  std::vector<double> weights_;
};

struct ObjectiveValue {
  double residual_term = 0.0;
  double penalty_term = 0.0;  // eps * g(x)
  double total = 0.0;
};

// Threshold scan: min over t >= 0 of t + sum_j c_j (|x_j| - t)_+. O(n log n).
double g1(std::span<const double> x, std::span<const double> c);
// Sorted-breakpoint search for the radius rho with z_j = clamp(x_j / rho, +-c_j)
// on the unit sphere. O(n log n).
double g2(std::span<const double> x, std::span<const double> c);

// Same values; `z` receives a maximizing dual vector, which is a subgradient
// of the norm at x.
double g1(std::span<const double> x, std::span<const double> c, std::span<double> z);
double g2(std::span<const double> x, std::span<const double> c, std::span<double> z);

enum class PenaltyNorm { g1, g2 };

// Reference evaluation that shares no code with g1/g2: a greedy fractional
// knapsack for g1 and a golden-section search over the Lagrange multiplier of
// the ball constraint for g2. Intended for small n in tests.
double g_oracle(std::span<const double> x, std::span<const double> c, PenaltyNorm kind);

// Reusable evaluator of phi and its subgradient; holds scratch buffers, so one
// instance must not be shared between threads.
class Objective {
 public:
  Objective(const SparseStochasticMatrix& p, UncertaintySpec spec);

  const SparseStochasticMatrix& matrix() const noexcept { return *p_; }
  const UncertaintySpec& spec() const noexcept { return spec_; }

  ObjectiveValue value(std::span<const double> x);
  // Fills `grad` with one subgradient of phi at x and returns phi(x).
  ObjectiveValue value_and_subgradient(std::span<const double> x, std::span<double> grad);

 private:
  ObjectiveValue evaluate(std::span<const double> x, std::span<double> grad, bool want_grad);

  const SparseStochasticMatrix* p_;
  UncertaintySpec spec_;
  std::vector<double> px_;
  std::vector<double> r_;
  std::vector<double> z_;
  std::vector<double> back_;
};

// x must lie on the simplex (InputError otherwise).
ObjectiveValue phi(const SparseStochasticMatrix& p, std::span<const double> x,
                   const UncertaintySpec& spec);
std::vector<double> subgradient_phi(const SparseStochasticMatrix& p, std::span<const double> x,
                                    const UncertaintySpec& spec);

}  // namespace robustrank
