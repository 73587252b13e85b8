// Reference evaluations of g1 and g2 used to certify the fast paths in norms.cpp.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "robustrank/errors.hpp"
#include "robustrank/norms.hpp"

namespace robustrank {
namespace {

// max { z.x : ||z||_1 <= 1, |z_j| <= c_j }: fill coordinates by decreasing
// |x_j|, each up to its cap, until the unit budget is spent.
double greedy_knapsack(std::span<const double> x, std::span<const double> c) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(x[a]) > std::abs(x[b]); });
  double budget = 1.0;
  double value = 0.0;
  for (std::size_t j : idx) {
    if (budget <= 0.0) break;
    const double take = std::min(c[j], budget);
    value += take * std::abs(x[j]);
    budget -= take;
  }
  return value;
}

// Lagrangian dual of max { z.x : ||z||_2 <= 1, |z_j| <= c_j } with multiplier
// lambda / 2 on ||z||^2 <= 1:
//   L(lambda) = lambda / 2 + sum_j max_{|z| <= c_j} (z |x_j| - lambda z^2 / 2).
double lagrangian(std::span<const double> x, std::span<const double> c, double lambda) {
  double v = lambda / 2.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double a = std::abs(x[j]);
    if (lambda <= 0.0) {
      v += c[j] * a;
    } else if (a / lambda <= c[j]) {
      v += a * a / (2.0 * lambda);
    } else {
      v += c[j] * a - lambda * c[j] * c[j] / 2.0;
    }
  }
  return v;
}

double golden_section_dual(std::span<const double> x, std::span<const double> c) {
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) return 0.0;

  // The optimal multiplier never exceeds ||x||_2.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = norm;
  double best = std::min(lagrangian(x, c, lo), lagrangian(x, c, hi));
  double m1 = hi - inv_phi * (hi - lo);
  double m2 = lo + inv_phi * (hi - lo);
  double f1 = lagrangian(x, c, m1);
  double f2 = lagrangian(x, c, m2);
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    best = std::min({best, f1, f2});
    if (f1 <= f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - inv_phi * (hi - lo);
      f1 = lagrangian(x, c, m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + inv_phi * (hi - lo);
      f2 = lagrangian(x, c, m2);
    }
  }
  return std::min({best, f1, f2});
}

}  // namespace

double g_oracle(std::span<const double> x, std::span<const double> c, PenaltyNorm kind) {
  if (x.size() != c.size()) throw DimensionError("g_oracle: weights and vector differ in length");
  for (double w : c) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("g_oracle: weights must be finite and > 0");
  }
  return kind == PenaltyNorm::g1 ? greedy_knapsack(x, c) : golden_section_dual(x, c);
}

}  // namespace robustrank
