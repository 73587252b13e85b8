#pragma once

// Score computations on a column-stochastic matrix P:
//   - PageRank with constant damping,
//   - the Cesaro-averaged power method,
//   - the regularized power method ("PageRank with varying alpha") that stops
//     as soon as the robust objective phi increases,
//   - entropic mirror descent on phi over the simplex,
//   - a brute-force lattice search for tiny instances.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "robustrank/graph_matrix.hpp"
#include "robustrank/norms.hpp"

namespace robustrank {

enum class StopReason { phi_increase, max_iter, tolerance };

const char* to_string(StopReason reason) noexcept;

struct PhiRecord {
  std::size_t iteration = 0;
  double phi = 0.0;
};

struct SolveReport {
  ScoreVector final;
  // (iteration, phi) pairs for the phi-driven solvers.
  std::vector<PhiRecord> phi_history;
  // PageRank only: ||x_{k+1} - x_k||_1 for every update.
  std::vector<double> step_history;
  std::size_t iterations_used = 0;
  StopReason stop_reason = StopReason::max_iter;
  std::optional<ObjectiveValue> objective;
};

enum class StepPolicy {
  // gamma_k = gamma0 / sqrt(k) / ||g_k||_inf for the whole run.
  inverse_sqrt,
  // Epochs of the inverse_sqrt schedule, each restarted from the best point
  // found so far; the base step halves after an epoch that improves phi by
  // less than `min_progress` (relative).
  restarted,
};

struct SolverConfig {
  double alpha = 0.85;
  double tol = 1e-10;
  std::size_t max_iter = 100000;

  StepPolicy step_policy = StepPolicy::restarted;
  double gamma0 = 1.0;
  std::size_t epoch_length = 1000;
  double min_progress = 1e-3;
  // Restarted policy stops with StopReason::tolerance once the base step falls below this.
  double min_step = 1e-14;
  // Strictly positive point on the simplex; defaults to the uniform vector.
  std::optional<std::vector<double>> initial_point;

  // Throws InputError on out-of-range fields.
  void validate() const;
};

struct Algorithm1Options {
  std::size_t max_iter = 100000;
  // An increase counts only when phi_{k+1} > phi_k + stall_tol.
  double stall_tol = 1e-12;
};

// Iterates x <- alpha P x + (1 - alpha) e from e until ||x_{k+1} - x_k||_1 <= tol.
SolveReport pagerank(const SparseStochasticMatrix& p, double alpha, double tol, std::size_t max_iter);

// Running Cesaro average x_K = (e + P e + ... + P^{K-1} e) / K.
class AveragedPowerIteration {
 public:
  explicit AveragedPowerIteration(const SparseStochasticMatrix& p);

  // Adds the next power P^K e to the running sum.
  void advance();
  std::size_t terms() const noexcept { return terms_; }
  // x_K for the current K; valid until the next advance().
  std::span<const double> average();

 private:
  const SparseStochasticMatrix* p_;
  std::vector<double> power_;
  std::vector<double> next_;
  std::vector<double> sum_;
  std::vector<double> average_;
  std::size_t terms_ = 1;
};

ScoreVector averaged_power(const SparseStochasticMatrix& p, std::size_t terms);

// Regularized power method started at e:
//   x^(k+1) = (1 - 1/(k+2)) P x^(k) + e / (k+2),  k = 0, 1, ...
// Iterates are labelled by the number of updates applied (x^(0) = e). Stops at
// the first k with phi(x^(k+1)) > phi(x^(k)) and returns x^(k).
SolveReport algorithm1(const SparseStochasticMatrix& p, const UncertaintySpec& spec,
                       const Algorithm1Options& options = {});

// Entropic mirror descent: x <- normalize(x * exp(-gamma_k g_k)), returning the
// best iterate seen.
SolveReport mirror_descent_minimize(const SparseStochasticMatrix& p, const UncertaintySpec& spec,
                                    const SolverConfig& config = {});

// Exhaustive search over the lattice { a / divisions : a integer, sum a = divisions }.
// Only for n <= 4.
ScoreVector grid_oracle_minimize(const SparseStochasticMatrix& p, const UncertaintySpec& spec,
                                 std::size_t divisions);

// Cesaro average x_K with ||P x_K - x_K||_1 <= tol: stops at the first such K,
// and K = ceil(2 / tol) always suffices.
ScoreVector dominant_eigenvector(const SparseStochasticMatrix& p, double tol);

// sqrt(q n) / m: Frobenius-norm uncertainty when n_j is off by one for q n
// pages with average out-degree m.
double suggest_epsilon(double n, double q, double m);

}  // namespace robustrank
