#pragma once

// Perturbations xi of the nominal matrix P:
//   Xi1: zero column sums, ||xi_j||_1 <= eps_j, sum_ij |xi_ij| <= eps
//   Xi2: zero column sums, ||xi_j||_1 <= eps_j, ||xi||_F <= eps
//   XiF: P + xi stochastic, ||xi||_F <= eps
// The worst case over these sets is not computable; phi(x) from norms.hpp is an
// upper bound, and sampling feasible xi gives empirical lower bounds.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "robustrank/graph_matrix.hpp"
#include "robustrank/norms.hpp"

namespace robustrank {

enum class PerturbationSet { xi1, xi2, xi_f };

const char* to_string(PerturbationSet set) noexcept;

// xi = scale * left * right^T with unit-norm left and right vectors.
struct Rank1Perturbation {
  double scale = 0.0;
  std::vector<double> left;
  std::vector<double> right;

  // y = xi x
  void apply(std::span<const double> x, std::span<double> y) const;
  // Square case only (left and right of equal length).
  DenseMatrix materialize() const;
};

// Maximizer of ||a + xi b||_2 over ||xi||_F <= eps: eps a b^T / (||a|| ||b||).
// For a = 0 the left direction is (1, -1, 0, ...) / sqrt(2) (or (1) when a has
// length one).
Rank1Perturbation lemma1_maximizer(std::span<const double> a, std::span<const double> b, double eps);

// Worst case for the Frobenius ball at x: a = P x - x, b = x. When P x = x the
// fallback direction (1, -1, 0, ...) / sqrt(2) keeps every column sum at zero
// (requires n >= 2).
Rank1Perturbation worst_case_rank1(const SparseStochasticMatrix& p, std::span<const double> x,
                                   double eps);

struct Lemma1Report {
  double bound = 0.0;        // ||a|| + eps ||b||
  double attained = 0.0;     // ||a + xi* b||
  double max_sampled = 0.0;  // over random xi with ||xi||_F <= eps
  std::size_t samples = 0;
  std::size_t violations = 0;  // samples exceeding the bound (beyond rounding)
  bool equality_holds = false;  // |attained - bound| <= 1e-10
};

Lemma1Report lemma1_check(std::span<const double> a, std::span<const double> b, double eps,
                          std::size_t n_samples, std::uint64_t seed = 0);

struct SamplerOptions {
  // Xi1/Xi2: additionally require P + xi >= 0. XiF: when false, the
  // nonnegativity requirement of the set is dropped.
  bool require_stochastic = true;
  // Shrink-toward-zero halvings allowed before the request is infeasible.
  std::size_t max_halvings = 60;
};

struct PerturbationSample {
  DenseMatrix xi;
  PerturbationSet set = PerturbationSet::xi_f;
  double frobenius_norm = 0.0;
  double entrywise_l1_norm = 0.0;
  double max_column_l1 = 0.0;
  // max_j |sum_i xi_ij|
  double max_column_sum = 0.0;
  std::size_t halvings = 0;
};

// One feasible perturbation; deterministic for a fixed seed. Negative mass in
// column j is only placed on rows where P_ij > 0, so the shrink loop can always
// restore nonnegativity of P + xi. Throws InfeasibleError when it cannot within
// options.max_halvings.
PerturbationSample sample_perturbation(const SparseStochasticMatrix& p, const UncertaintySpec& spec,
                                       PerturbationSet set, std::uint64_t seed,
                                       const SamplerOptions& options = {});

struct LowerBoundOptions {
  SamplerOptions sampler;
  // Add the rank-1 worst case to the pool (XiF without nonnegativity only).
  bool include_rank1 = false;
};

struct LowerBoundReport {
  double lower_bound = 0.0;  // max sampled ||(P + xi) x - x||
  double upper_bound = 0.0;  // phi(x) for the norm pair matching the set
  double nominal_residual = 0.0;
  std::size_t samples = 0;
  // Samples whose P + xi passed validate() at 1e-10.
  std::size_t stochastic_samples = 0;
  bool bound_holds = true;
};

// Norm pair that bounds the worst case over `set`: Xi1 -> l1g1, Xi2 -> l2g2, XiF -> l2l2.
NormPair bounding_pair(PerturbationSet set) noexcept;

// Samples are drawn with seeds derived from `seed`; the matching upper bound
// uses the budgets of `spec` with the pair given by bounding_pair(set).
LowerBoundReport empirical_phi_lower_bound(const SparseStochasticMatrix& p,
                                           std::span<const double> x, const UncertaintySpec& spec,
                                           PerturbationSet set, std::size_t n_samples,
                                           std::uint64_t seed, const LowerBoundOptions& options = {});

}  // namespace robustrank
