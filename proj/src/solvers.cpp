#include "robustrank/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "robustrank/errors.hpp"
#include "robustrank/kernels.hpp"

namespace robustrank {
namespace {

constexpr std::size_t kMaxAveragedTerms = 1'000'000'000;

bool is_power_of_two(std::size_t k) { return k != 0 && (k & (k - 1)) == 0; }

// Renormalizes tiny rounding drift so the result passes the simplex check.
ScoreVector to_score_vector(std::vector<double> x) {
  const double s = simd::active().sum(x.data(), x.size());
  if (s > 0.0 && std::abs(s - 1.0) > 1e-15) {
    for (double& v : x) v /= s;
  }
  return ScoreVector(std::move(x));
}

}  // namespace

const char* to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::phi_increase:
      return "phi_increase";
    case StopReason::max_iter:
      return "max_iter";
    case StopReason::tolerance:
      return "tolerance";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!(tol > 0.0)) throw InputError("tol must be > 0");
  if (max_iter < 1) throw InputError("max_iter must be >= 1");
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw InputError("gamma0 must be finite and > 0");
  if (epoch_length < 1) throw InputError("epoch_length must be >= 1");
  if (!(min_progress >= 0.0 && min_progress < 1.0)) throw InputError("min_progress must lie in [0, 1)");
  if (!(min_step > 0.0)) throw InputError("min_step must be > 0");
}

// ---------------------------------------------------------------------------

SolveReport pagerank(const SparseStochasticMatrix& p, double alpha, double tol, std::size_t max_iter) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!(tol > 0.0)) throw InputError("tol must be > 0");
  if (max_iter < 1) throw InputError("max_iter must be >= 1");

  const std::size_t n = p.size();
  const auto& k = simd::active();
  const double teleport = (1.0 - alpha) / static_cast<double>(n);
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> px(n);
  std::vector<double> next(n);

  std::vector<double> steps;
  StopReason reason = StopReason::max_iter;
  std::size_t it = 0;
  while (it < max_iter) {
    p.multiply(x, px);
    k.scale_shift(alpha, px.data(), teleport, next.data(), n);
    const double step = k.l1_distance(next.data(), x.data(), n);
    steps.push_back(step);
    x.swap(next);
    ++it;
    if (step <= tol) {
      reason = StopReason::tolerance;
      break;
    }
  }
  SolveReport report{to_score_vector(std::move(x)), {}, {}, 0, StopReason::max_iter, std::nullopt};
  report.step_history = std::move(steps);
  report.iterations_used = it;
  report.stop_reason = reason;
  return report;
}

// ---------------------------------------------------------------------------

AveragedPowerIteration::AveragedPowerIteration(const SparseStochasticMatrix& p)
    : p_(&p),
      power_(p.size(), 1.0 / static_cast<double>(p.size())),
      next_(p.size()),
      sum_(power_),
      average_(p.size()) {}

void AveragedPowerIteration::advance() {
  p_->multiply(power_, next_);
  power_.swap(next_);
  simd::active().axpy(1.0, power_.data(), sum_.data(), sum_.size());
  ++terms_;
}

std::span<const double> AveragedPowerIteration::average() {
  simd::active().scale_shift(1.0 / static_cast<double>(terms_), sum_.data(), 0.0, average_.data(),
                             sum_.size());
  return average_;
}

ScoreVector averaged_power(const SparseStochasticMatrix& p, std::size_t terms) {
  if (terms < 1) throw InputError("averaged power method needs K >= 1");
  AveragedPowerIteration it(p);
  while (it.terms() < terms) it.advance();
  const auto avg = it.average();
  return to_score_vector(std::vector<double>(avg.begin(), avg.end()));
}

ScoreVector dominant_eigenvector(const SparseStochasticMatrix& p, double tol) {
  if (!(tol > 0.0)) throw InputError("tol must be > 0");
  const double cap = std::ceil(2.0 / tol);
  if (cap > static_cast<double>(kMaxAveragedTerms)) {
    throw InputError("tol too small: more than 1e9 averaged terms required");
  }
  const std::size_t n = p.size();
  const auto& k = simd::active();
  const std::vector<double> start(n, 1.0 / static_cast<double>(n));
  std::vector<double> power = start;
  std::vector<double> next(n);
  std::vector<double> sum(n, 0.0);
  // P x_K - x_K = (P^K e - e) / K, so the residual costs one distance per term.
  std::size_t terms = 0;
  while (true) {
    k.axpy(1.0, power.data(), sum.data(), n);
    ++terms;
    p.multiply(power, next);
    const double res = k.l1_distance(next.data(), start.data(), n) / static_cast<double>(terms);
    if (res <= tol || static_cast<double>(terms) >= cap) break;
    power.swap(next);
  }
  k.scale_shift(1.0 / static_cast<double>(terms), sum.data(), 0.0, sum.data(), n);
  return to_score_vector(std::move(sum));
}

// ---------------------------------------------------------------------------

SolveReport algorithm1(const SparseStochasticMatrix& p, const UncertaintySpec& spec,
                       const Algorithm1Options& options) {
  if (options.max_iter < 1) throw InputError("max_iter must be >= 1");
  if (!(options.stall_tol >= 0.0)) throw InputError("stall_tol must be >= 0");

  const std::size_t n = p.size();
  const auto& k = simd::active();
  Objective objective(p, spec);

  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> px(n);
  std::vector<double> next(n);

  ObjectiveValue current = objective.value(x);
  std::vector<PhiRecord> history{{0, current.total}};
  StopReason reason = StopReason::max_iter;
  std::size_t it = 0;
  while (it < options.max_iter) {
    const double w = 1.0 / static_cast<double>(it + 2);
    p.multiply(x, px);
    k.scale_shift(1.0 - w, px.data(), w / static_cast<double>(n), next.data(), n);
    const ObjectiveValue candidate = objective.value(next);
    history.push_back({it + 1, candidate.total});
    if (candidate.total > current.total + options.stall_tol) {
      reason = StopReason::phi_increase;
      break;
    }
    x.swap(next);
    current = candidate;
    ++it;
  }

  SolveReport report{to_score_vector(std::move(x)), {}, {}, 0, StopReason::max_iter, std::nullopt};
  report.phi_history = std::move(history);
  report.iterations_used = it;
  report.stop_reason = reason;
  report.objective = current;
  return report;
}

// ---------------------------------------------------------------------------

SolveReport mirror_descent_minimize(const SparseStochasticMatrix& p, const UncertaintySpec& spec,
                                    const SolverConfig& config) {
  config.validate();
  const std::size_t n = p.size();
  const auto& k = simd::active();
  Objective objective(p, spec);

  std::vector<double> x;
  if (config.initial_point) {
    x = *config.initial_point;
    if (x.size() != n) throw DimensionError("initial point has the wrong length");
    for (double v : x) {
      if (!(v > 0.0)) throw InputError("mirror descent needs a strictly positive initial point");
    }
    ScoreVector check(x);  // simplex membership
  } else {
    x.assign(n, 1.0 / static_cast<double>(n));
  }

  std::vector<double> grad(n);
  std::vector<double> best = x;
  double best_phi = objective.value(x).total;
  std::vector<PhiRecord> history{{0, best_phi}};

  const bool restarted = config.step_policy == StepPolicy::restarted;
  const std::size_t epoch = restarted ? config.epoch_length : config.max_iter;
  double base_step = config.gamma0;
  std::size_t total = 0;
  StopReason reason = StopReason::max_iter;

  bool done = false;
  while (!done && total < config.max_iter) {
    if (restarted) x = best;
    const double epoch_start = best_phi;
    for (std::size_t j = 1; j <= epoch && total < config.max_iter; ++j) {
      objective.value_and_subgradient(x, grad);
      const double scale = k.max_abs(grad.data(), n);
      if (scale == 0.0) {
        // 0 is a subgradient: x is optimal.
        reason = StopReason::tolerance;
        done = true;
        break;
      }
      const double g_min = *std::min_element(grad.begin(), grad.end());
      const double step = base_step / std::sqrt(static_cast<double>(j)) / scale;
      for (std::size_t i = 0; i < n; ++i) x[i] *= std::exp(-step * (grad[i] - g_min));
      const double s = k.sum(x.data(), n);
      k.scale_shift(1.0 / s, x.data(), 0.0, x.data(), n);
      ++total;

      const double f = objective.value(x).total;
      if (f < best_phi) {
        best_phi = f;
        best = x;
      }
      if (!restarted && is_power_of_two(total)) history.push_back({total, best_phi});
    }
    if (restarted) {
      history.push_back({total, best_phi});
      if (best_phi > epoch_start - config.min_progress * epoch_start) base_step *= 0.5;
      if (base_step < config.min_step) {
        reason = StopReason::tolerance;
        done = true;
      }
    }
  }
  if (history.back().iteration != total) history.push_back({total, best_phi});

  SolveReport report{to_score_vector(std::move(best)), {}, {}, 0, StopReason::max_iter, std::nullopt};
  report.phi_history = std::move(history);
  report.iterations_used = total;
  report.stop_reason = reason;
  report.objective = objective.value(report.final.values());
  return report;
}

// ---------------------------------------------------------------------------

ScoreVector grid_oracle_minimize(const SparseStochasticMatrix& p, const UncertaintySpec& spec,
                                 std::size_t divisions) {
  const std::size_t n = p.size();
  if (n > 4) throw InputError("grid oracle supports n <= 4, got n = " + std::to_string(n));
  if (divisions < 1) throw InputError("grid oracle needs at least one division");
  Objective objective(p, spec);

  const double h = 1.0 / static_cast<double>(divisions);
  std::vector<std::size_t> counts(n, 0);
  std::vector<double> x(n);
  std::vector<double> best;
  double best_phi = std::numeric_limits<double>::infinity();

  // Enumerate compositions of `divisions` into n parts; the last part is implied.
  auto visit = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos + 1 == n) {
      counts[pos] = remaining;
      for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(counts[i]) * h;
      const double f = objective.value(x).total;
      if (f < best_phi) {
        best_phi = f;
        best = x;
      }
      return;
    }
    for (std::size_t a = 0; a <= remaining; ++a) {
      counts[pos] = a;
      self(self, pos + 1, remaining - a);
    }
  };
  visit(visit, 0, divisions);
  return to_score_vector(std::move(best));
}

double suggest_epsilon(double n, double q, double m) {
  if (!(n >= 1.0)) throw InputError("n must be >= 1");
  if (!(q > 0.0 && q <= 1.0)) throw InputError("q must lie in (0, 1]");
  if (!(m > 0.0)) throw InputError("m must be > 0");
  return std::sqrt(q * n) / m;
}

}  // namespace robustrank
