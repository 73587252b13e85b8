#include "robustrank/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "robustrank/errors.hpp"
#include "robustrank/kernels.hpp"

namespace robustrank {
namespace {

constexpr double kEqualityTolerance = 1e-10;
constexpr double kBoundSlack = 1e-12;

double norm2(std::span<const double> v) { return std::sqrt(simd::active().norm2_sq(v.data(), v.size())); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::vector<double> fallback_direction(std::size_t n) {
  std::vector<double> c(n, 0.0);
  if (n == 1) {
    c[0] = 1.0;
  } else {
    c[0] = 1.0 / std::sqrt(2.0);
    c[1] = -1.0 / std::sqrt(2.0);
  }
  return c;
}

bool nonnegative_sum(const SparseStochasticMatrix& p, const DenseMatrix& xi) {
  const std::size_t n = p.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (p.entry(i, j) + xi(i, j) < 0.0) return false;
    }
  }
  return true;
}

// Rows carrying mass in column j of P.
std::vector<std::size_t> column_support(const SparseStochasticMatrix& p, std::size_t j) {
  std::vector<std::size_t> rows;
  if (p.is_dangling(j)) {
    rows.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) rows[i] = i;
  } else {
    for (auto r : p.column_rows(j)) rows.push_back(r);
  }
  return rows;
}

// Column-wise zero-sum perturbation with ||xi_j||_1 <= eps_j: mass h_j moves
// from rows in the support of column j to random rows.
DenseMatrix budgeted_columns(const SparseStochasticMatrix& p, std::span<const double> budgets,
                             std::mt19937_64& rng) {
  const std::size_t n = p.size();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DenseMatrix xi(n);
  std::vector<double> gain(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto support = column_support(p, j);
    const double h = unit(rng) * budgets[j] / 2.0;
    double gain_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gain[i] = unit(rng);
      gain_total += gain[i];
    }
    std::vector<double> loss(support.size());
    double loss_total = 0.0;
    for (double& w : loss) {
      w = unit(rng);
      loss_total += w;
    }
    if (gain_total <= 0.0 || loss_total <= 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) xi(i, j) += h * gain[i] / gain_total;
    for (std::size_t k = 0; k < support.size(); ++k) xi(support[k], j) -= h * loss[k] / loss_total;
  }
  return xi;
}

// Gaussian entries, made nonnegative off the support of each column and then
// centered on the support, rescaled to Frobenius norm eps.
DenseMatrix frobenius_direction(const SparseStochasticMatrix& p, double eps, std::mt19937_64& rng) {
  const std::size_t n = p.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix xi(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto support = column_support(p, j);
    std::vector<char> on_support(n, 0);
    for (std::size_t r : support) on_support[r] = 1;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = normal(rng);
      xi(i, j) = on_support[i] ? g : std::abs(g);
      total += xi(i, j);
    }
    const double shift = total / static_cast<double>(support.size());
    for (std::size_t r : support) xi(r, j) -= shift;
  }
  const double f = xi.frobenius_norm();
  if (f > 0.0) xi *= eps / f;
  return xi;
}

void describe(PerturbationSample& s) {
  const std::size_t n = s.xi.size();
  s.frobenius_norm = s.xi.frobenius_norm();
  s.entrywise_l1_norm = s.xi.entrywise_l1_norm();
  s.max_column_l1 = 0.0;
  s.max_column_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    s.max_column_l1 = std::max(s.max_column_l1, s.xi.column_abs_sum(j));
    s.max_column_sum = std::max(s.max_column_sum, std::abs(s.xi.column_sum(j)));
  }
}

double perturbed_residual(const SparseStochasticMatrix& p, const DenseMatrix& xi,
                          std::span<const double> x, Norm norm) {
  const std::size_t n = p.size();
  std::vector<double> px(n);
  std::vector<double> xix(n);
  p.multiply(x, px);
  xi.multiply(x, xix);
  for (std::size_t i = 0; i < n; ++i) px[i] += xix[i];
  const auto& k = simd::active();
  if (norm == Norm::l1) return k.l1_distance(px.data(), x.data(), n);
  return std::sqrt(k.l2_distance_sq(px.data(), x.data(), n));
}

}  // namespace

const char* to_string(PerturbationSet set) noexcept {
  switch (set) {
    case PerturbationSet::xi1:
      return "xi1";
    case PerturbationSet::xi2:
      return "xi2";
    case PerturbationSet::xi_f:
      return "xif";
  }
  return "unknown";
}

NormPair bounding_pair(PerturbationSet set) noexcept {
  switch (set) {
    case PerturbationSet::xi1:
      return NormPair::l1_g1;
    case PerturbationSet::xi2:
      return NormPair::l2_g2;
    case PerturbationSet::xi_f:
      return NormPair::l2_l2;
  }
  return NormPair::l2_l2;
}

// ---------------------------------------------------------------------------

void Rank1Perturbation::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != right.size() || y.size() != left.size()) {
    throw DimensionError("rank-1 perturbation applied to a vector of the wrong length");
  }
  const double coeff = scale * simd::active().dot(right.data(), x.data(), x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = coeff * left[i];
}

DenseMatrix Rank1Perturbation::materialize() const {
  if (left.size() != right.size()) throw DimensionError("only square rank-1 perturbations materialize");
  const std::size_t n = left.size();
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = scale * left[i] * right[j];
  }
  return m;
}

Rank1Perturbation lemma1_maximizer(std::span<const double> a, std::span<const double> b, double eps) {
  if (!(eps > 0.0)) throw InputError("eps must be > 0");
  if (a.empty() || b.empty()) throw InputError("a and b must be nonempty");
  Rank1Perturbation xi;
  xi.scale = eps;
  const double na = norm2(a);
  if (na > 0.0) {
    xi.left.assign(a.begin(), a.end());
    for (double& v : xi.left) v /= na;
  } else {
    xi.left = fallback_direction(a.size());
  }
  const double nb = norm2(b);
  xi.right.assign(b.begin(), b.end());
  if (nb > 0.0) {
    for (double& v : xi.right) v /= nb;
  }
  return xi;
}

Rank1Perturbation worst_case_rank1(const SparseStochasticMatrix& p, std::span<const double> x,
                                   double eps) {
  if (!(eps > 0.0)) throw InputError("eps must be > 0");
  if (x.size() != p.size()) throw DimensionError("point and matrix sizes differ");
  if (norm2(x) == 0.0) throw InputError("worst-case perturbation needs x != 0");
  std::vector<double> a(p.size());
  p.multiply(x, a);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= x[i];
  if (norm2(a) == 0.0 && p.size() < 2) {
    throw InputError("no zero-sum fallback direction exists for n = 1");
  }
  return lemma1_maximizer(a, x, eps);
}

Lemma1Report lemma1_check(std::span<const double> a, std::span<const double> b, double eps,
                          std::size_t n_samples, std::uint64_t seed) {
  const Rank1Perturbation star = lemma1_maximizer(a, b, eps);
  const std::size_t n = a.size();
  const std::size_t m = b.size();

  Lemma1Report report;
  report.bound = norm2(a) + eps * norm2(b);
  std::vector<double> y(n);
  star.apply(b, y);
  for (std::size_t i = 0; i < n; ++i) y[i] += a[i];
  report.attained = norm2(y);
  report.equality_holds = std::abs(report.attained - report.bound) <= kEqualityTolerance;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> xi(n * m);
  const double slack = kBoundSlack * std::max(1.0, report.bound);
  for (std::size_t s = 0; s < n_samples; ++s) {
    // Alternate between isotropic directions and jitter around the maximizer.
    const bool near_star = (s % 2) == 1;
    const double jitter = 0.2 * unit(rng);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double g = normal(rng);
        xi[i * m + j] = near_star ? star.scale * star.left[i] * star.right[j] + jitter * eps * g : g;
      }
    }
    const double f = std::sqrt(simd::active().norm2_sq(xi.data(), xi.size()));
    const double radius = near_star ? eps : eps * unit(rng);
    if (f > 0.0 && (f > radius || !near_star)) {
      for (double& v : xi) v *= radius / f;
    }
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = a[i] + simd::active().dot(xi.data() + i * m, b.data(), m);
    }
    const double value = norm2(y);
    report.max_sampled = std::max(report.max_sampled, value);
    if (value > report.bound + slack) ++report.violations;
    ++report.samples;
  }
  return report;
}

// ---------------------------------------------------------------------------

PerturbationSample sample_perturbation(const SparseStochasticMatrix& p, const UncertaintySpec& spec,
                                       PerturbationSet set, std::uint64_t seed,
                                       const SamplerOptions& options) {
  if (spec.size() != p.size()) throw DimensionError("uncertainty spec and matrix sizes differ");
  std::mt19937_64 rng(seed);
  const double eps = spec.epsilon();

  PerturbationSample sample;
  sample.set = set;
  bool need_nonnegative = options.require_stochastic;
  switch (set) {
    case PerturbationSet::xi1: {
      sample.xi = budgeted_columns(p, spec.column_budgets(), rng);
      const double total = sample.xi.entrywise_l1_norm();
      if (total > eps) sample.xi *= eps / total;
      break;
    }
    case PerturbationSet::xi2: {
      sample.xi = budgeted_columns(p, spec.column_budgets(), rng);
      const double f = sample.xi.frobenius_norm();
      if (f > eps) sample.xi *= eps / f;
      break;
    }
    case PerturbationSet::xi_f:
      sample.xi = frobenius_direction(p, eps, rng);
      break;
  }

  if (need_nonnegative) {
    while (!nonnegative_sum(p, sample.xi)) {
      if (sample.halvings == options.max_halvings) {
        throw InfeasibleError("no stochastic P + xi found for set " + std::string(to_string(set)) +
                              " after " + std::to_string(options.max_halvings) + " halvings");
      }
      sample.xi *= 0.5;
      ++sample.halvings;
    }
  }
  describe(sample);
  return sample;
}

LowerBoundReport empirical_phi_lower_bound(const SparseStochasticMatrix& p,
                                           std::span<const double> x, const UncertaintySpec& spec,
                                           PerturbationSet set, std::size_t n_samples,
                                           std::uint64_t seed, const LowerBoundOptions& options) {
  if (x.size() != p.size()) throw DimensionError("point and matrix sizes differ");
  const NormPair pair = bounding_pair(set);
  const Norm norm = pair == NormPair::l1_g1 ? Norm::l1 : Norm::l2;
  const UncertaintySpec bound_spec = UncertaintySpec::with_budgets(
      spec.epsilon(), std::vector<double>(spec.column_budgets().begin(), spec.column_budgets().end()),
      pair);

  LowerBoundReport report;
  report.upper_bound = phi(p, x, bound_spec).total;
  report.nominal_residual = residual(p, x, norm);
  report.lower_bound = report.nominal_residual;  // xi = 0 is feasible

  const DenseMatrix nominal = p.to_dense();
  auto account = [&](const DenseMatrix& xi) {
    report.lower_bound = std::max(report.lower_bound, perturbed_residual(p, xi, x, norm));
    DenseMatrix f = nominal;
    f += xi;
    if (validate(f, 1e-10).passed) ++report.stochastic_samples;
    ++report.samples;
  };

  for (std::size_t s = 0; s < n_samples; ++s) {
    const PerturbationSample sample =
        sample_perturbation(p, spec, set, splitmix64(seed + s), options.sampler);
    account(sample.xi);
  }
  if (options.include_rank1 && set == PerturbationSet::xi_f && !options.sampler.require_stochastic) {
    account(worst_case_rank1(p, x, spec.epsilon()).materialize());
  }

  report.bound_holds =
      report.lower_bound <= report.upper_bound * (1.0 + kBoundSlack) + kBoundSlack;
  return report;
}

}  // namespace robustrank
