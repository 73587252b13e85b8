#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "robustrank/errors.hpp"
#include "robustrank/norms.hpp"
#include "support.hpp"

using namespace robustrank;

namespace {

std::vector<double> random_signed(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng) {
  // Log-uniform over [0.02, 2] so that both the capped and uncapped regimes occur.
  std::uniform_real_distribution<double> u(std::log(0.02), std::log(2.0));
  std::vector<double> c(n);
  for (double& v : c) v = std::exp(u(rng));
  return c;
}

double linf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double weighted_l1(std::span<const double> x, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += c[i] * std::abs(x[i]);
  return s;
}

// Feasible decomposition for g2 at radius rho: u_j = sign(x_j) min(|x_j|, c_j rho),
// value ||u||_2 + sum c_j |x_j - u_j|. Every rho gives an upper bound.
double g2_primal(std::span<const double> x, std::span<const double> c, double rho) {
  double u2 = 0.0, rest = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double a = std::abs(x[j]);
    const double u = std::min(a, c[j] * rho);
    u2 += u * u;
    rest += c[j] * (a - u);
  }
  return std::sqrt(u2) + rest;
}

double g2_primal_min(std::span<const double> x, std::span<const double> c) {
  double hi = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) hi = std::max(hi, std::abs(x[j]) / c[j]);
  double best = std::min(g2_primal(x, c, 0.0), g2_primal(x, c, hi));
  // Grid then local golden refinement around the best grid cell.
  const int grid = 2000;
  int arg = 0;
  for (int k = 0; k <= grid; ++k) {
    const double v = g2_primal(x, c, hi * k / grid);
    if (v < best) {
      best = v;
      arg = k;
    }
  }
  double lo = hi * std::max(0, arg - 1) / grid, up = hi * std::min(grid, arg + 1) / grid;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = up - r * (up - lo), m2 = lo + r * (up - lo);
    const double f1 = g2_primal(x, c, m1), f2 = g2_primal(x, c, m2);
    best = std::min({best, f1, f2});
    if (f1 <= f2) {
      up = m2;
    } else {
      lo = m1;
    }
  }
  return best;
}

using NormFn = std::function<double(std::span<const double>, std::span<const double>)>;

double call_g1(std::span<const double> x, std::span<const double> c) { return g1(x, c); }
double call_g2(std::span<const double> x, std::span<const double> c) { return g2(x, c); }

}  // namespace

TEST_CASE("g1 worked values") {
  const std::vector<double> half{0.5, 0.5, 0.5};
  CHECK(g1(std::vector<double>{0, 0, 0}, half) == 0.0);
  CHECK(g1(std::vector<double>{3, 1, 0}, half) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g_oracle(std::vector<double>{3, 1, 0}, half, PenaltyNorm::g1) == doctest::Approx(2.0).epsilon(1e-15));
  // Signs do not matter.
  CHECK(g1(std::vector<double>{-3, 1, 0}, half) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g_oracle(std::vector<double>{1, 0, 0}, std::vector<double>{1, 1, 1}, PenaltyNorm::g1) == 1.0);
  CHECK(g_oracle(std::vector<double>{1, 0, 0}, std::vector<double>{1, 1, 1}, PenaltyNorm::g2) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("g2 worked values") {
  CHECK(g2(std::vector<double>{0, 0}, std::vector<double>{0.3, 0.3}) == 0.0);
  CHECK(g2(std::vector<double>{3, 4}, std::vector<double>{0.1, 0.1}) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(g2(std::vector<double>{3, 4}, std::vector<double>{1, 1}) == doctest::Approx(5.0).epsilon(1e-15));
  // Mixed regime: c = (0.6, 1): z_1 capped at 0.6, z_2 = 0.8, value 0.6*3 + 0.8*4.
  CHECK(g2(std::vector<double>{3, 4}, std::vector<double>{0.6, 1.0}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(g2(std::vector<double>{4, 3}, std::vector<double>{0.6, 1.0}) == doctest::Approx(0.6 * 4 + 0.8 * 3).epsilon(1e-15));
}

TEST_CASE("large weights reduce g1 to the max norm and g2 to the euclidean norm") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const auto x = random_signed(n, rng);
    std::vector<double> c(n);
    std::uniform_real_distribution<double> u(1.0, 5.0);
    for (double& v : c) v = u(rng);
    CHECK(g1(x, c) == doctest::Approx(linf(x)).epsilon(1e-14));
    CHECK(g2(x, c) == doctest::Approx(testing::norm2(x)).epsilon(1e-14));
  }
}

TEST_CASE("input validation") {
  const std::vector<double> x{1, 2};
  CHECK_THROWS_AS(g1(x, std::vector<double>{1, 0}), InputError);
  CHECK_THROWS_AS(g2(x, std::vector<double>{1, -1}), InputError);
  CHECK_THROWS_AS(g1(x, std::vector<double>{1}), DimensionError);
  CHECK_THROWS_AS(g_oracle(x, std::vector<double>{0, 1}, PenaltyNorm::g2), InputError);
  CHECK_THROWS_AS(UncertaintySpec::uniform(0.0, 3, NormPair::l2_l2), InputError);
  CHECK_THROWS_AS(UncertaintySpec::uniform(1.0, 0, NormPair::l2_l2), InputError);
  CHECK_THROWS_AS(UncertaintySpec::with_budgets(1.0, {0.5, 0.0}, NormPair::l1_g1), InputError);
  const auto p = testing::seven_node();
  CHECK_THROWS_AS(Objective(p, UncertaintySpec::uniform(1.0, 3, NormPair::l2_l2)), DimensionError);
  const std::vector<double> off{0.5, 0.5, 0.5, 0, 0, 0, 0};
  CHECK_THROWS_AS(phi(p, off, UncertaintySpec::uniform(1.0, 7, NormPair::l2_l2)), InputError);
}

TEST_CASE("uncertainty spec stores weights eps_j / eps") {
  const auto s = UncertaintySpec::uniform(2.0, 4, NormPair::l1_g1);
  CHECK(s.size() == 4);
  for (double b : s.column_budgets()) CHECK(b == 0.5);
  for (double c : s.weights()) CHECK(c == 0.25);
  const auto t = UncertaintySpec::uniform(2.0, 4, NormPair::l1_g1, 3.0);
  for (double c : t.weights()) CHECK(c == 1.5);

  EdgeList list;
  list.node_count = 3;
  list.edges = {{0, 1}, {0, 2}, {1, 0}};
  const auto inv = UncertaintySpec::inverse_degree(0.5, from_edge_list(list), NormPair::l2_g2);
  CHECK(inv.column_budgets()[0] == 0.5);
  CHECK(inv.column_budgets()[1] == 1.0);
  CHECK(inv.column_budgets()[2] == doctest::Approx(1.0 / 3.0));
  CHECK(inv.weights()[1] == 2.0);
  CHECK(std::string(to_string(NormPair::l2_g2)) == "l2g2");
}

TEST_CASE("oracle equivalence over random instances") {
  std::mt19937_64 rng(32);
  double worst1 = 0.0, worst2 = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = random_signed(8, rng);
    const auto c = random_weights(8, rng);
    worst1 = std::max(worst1, std::abs(g1(x, c) - g_oracle(x, c, PenaltyNorm::g1)));
    worst2 = std::max(worst2, std::abs(g2(x, c) - g_oracle(x, c, PenaltyNorm::g2)));
  }
  CHECK(worst1 <= 1e-9);
  CHECK(worst2 <= 1e-8);
}

TEST_CASE("g2 matches the primal decomposition") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const auto x = random_signed(n, rng);
    const auto c = random_weights(n, rng);
    const double value = g2(x, c);
    CHECK(std::abs(g2_primal_min(x, c) - value) <= 1e-10);
    // Weak duality at arbitrary radii.
    std::uniform_real_distribution<double> rho(0.0, 10.0);
    for (int k = 0; k < 20; ++k) CHECK(g2_primal(x, c, rho(rng)) >= value - 1e-12);
  }
}

TEST_CASE("dual vectors are feasible and attain the norm") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 15;
    auto x = random_signed(n, rng);
    if (trial % 7 == 0) x[0] = 0.0;
    const auto c = random_weights(n, rng);
    std::vector<double> z(n);

    const double v1 = g1(x, c, z);
    double zl1 = 0.0, dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(std::abs(z[j]) <= c[j] * (1.0 + 1e-12));
      zl1 += std::abs(z[j]);
      dot += z[j] * x[j];
    }
    CHECK(zl1 <= 1.0 + 1e-12);
    CHECK(dot == doctest::Approx(v1).epsilon(1e-12));

    const double v2 = g2(x, c, z);
    double z2 = 0.0;
    dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(std::abs(z[j]) <= c[j] * (1.0 + 1e-12));
      z2 += z[j] * z[j];
      dot += z[j] * x[j];
    }
    CHECK(z2 <= 1.0 + 1e-12);
    CHECK(dot == doctest::Approx(v2).epsilon(1e-12));
  }
}

TEST_CASE("property: norm axioms and sandwich bounds") {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  for (const auto& [name, g] : {std::pair<const char*, NormFn>{"g1", call_g1}, {"g2", call_g2}}) {
    CAPTURE(name);
    const bool is_g1 = std::string(name) == "g1";
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + trial % 11;
      const auto x = random_signed(n, rng);
      const auto y = random_signed(n, rng);
      const auto c = random_weights(n, rng);
      const double a = scale(rng);
      std::vector<double> ax(n), sum(n);
      for (std::size_t i = 0; i < n; ++i) {
        ax[i] = a * x[i];
        sum[i] = x[i] + y[i];
      }
      const double gx = g(x, c);
      CHECK(gx >= 0.0);
      CHECK(std::abs(g(ax, c) - std::abs(a) * gx) <= 1e-10 * (1.0 + std::abs(a) * gx));
      CHECK(g(sum, c) <= gx + g(y, c) + 1e-10);
      // u = x, v = 0 and u = 0, v = x are both feasible decompositions.
      const double dominant = is_g1 ? linf(x) : testing::norm2(x);
      CHECK(gx <= std::min(dominant, weighted_l1(x, c)) + 1e-12);
      double l1 = 0.0;
      for (double v : x) l1 += std::abs(v);
      CHECK(*std::min_element(c.begin(), c.end()) * l1 <= weighted_l1(x, c) + 1e-12);
    }
  }
}

TEST_CASE("property: equal budgets 1/s give the mean of the s largest entries") {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const std::size_t s = 1 + static_cast<std::size_t>(trial / 12) % n;
    const auto x = random_signed(n, rng);
    const std::vector<double> c(n, 1.0 / static_cast<double>(s));
    std::vector<double> mags(n);
    for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(x[i]);
    std::sort(mags.rbegin(), mags.rend());
    double top = 0.0;
    for (std::size_t i = 0; i < s; ++i) top += mags[i];
    CHECK(static_cast<double>(s) * g1(x, c) == doctest::Approx(top).epsilon(1e-13));
  }
}

TEST_CASE("phi on the seven-node example") {
  const auto p = testing::seven_node();
  const auto spec = UncertaintySpec::uniform(1.0, 7, NormPair::l2_l2);
  const std::vector<double> fixed{0, 0, 0, 0, 0, 0.5, 0.5};
  const auto at_fixed = phi(p, fixed, spec);
  CHECK(at_fixed.residual_term == 0.0);
  CHECK(at_fixed.total == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  const auto e = ScoreVector::uniform(7);
  const auto at_e = phi(p, e.values(), spec);
  CHECK(at_e.residual_term == doctest::Approx(std::sqrt(11.0 / 6.0) / 7.0).epsilon(1e-14));
  CHECK(at_e.penalty_term == doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-14));
  CHECK(at_e.total == doctest::Approx(0.57139).epsilon(1e-5));
  CHECK(std::abs(at_e.total - at_e.residual_term - at_e.penalty_term) <= 1e-12);
}

TEST_CASE("identity matrix: residual vanishes") {
  EdgeList list;
  list.node_count = 4;
  for (std::size_t i = 0; i < 4; ++i) list.edges.push_back({i, i});
  const auto p = from_edge_list(list);
  std::mt19937_64 rng(37);
  const auto x = testing::random_simplex(4, rng);
  for (NormPair pair : {NormPair::l1_g1, NormPair::l2_g2, NormPair::l2_l2}) {
    const auto spec = UncertaintySpec::uniform(0.7, 4, pair);
    const auto v = phi(p, x, spec);
    CHECK(v.residual_term == doctest::Approx(0.0));
    double expected = testing::norm2(x);
    if (pair == NormPair::l1_g1) expected = g1(x, spec.weights());
    if (pair == NormPair::l2_g2) expected = g2(x, spec.weights());
    CHECK(v.total == doctest::Approx(0.7 * expected).epsilon(1e-14));
  }

  // x = (1, 0): subgradient (0, 0) + eps (1, 0)
  EdgeList two;
  two.node_count = 2;
  two.edges = {{0, 0}, {1, 1}};
  const auto id2 = from_edge_list(two);
  const auto grad = subgradient_phi(id2, std::vector<double>{1.0, 0.0}, UncertaintySpec::uniform(0.7, 2, NormPair::l2_l2));
  CHECK(grad[0] == doctest::Approx(0.7));
  CHECK(grad[1] == 0.0);
}

TEST_CASE("property: subgradient inequality") {
  std::mt19937_64 rng(38);
  for (NormPair pair : {NormPair::l1_g1, NormPair::l2_g2, NormPair::l2_l2}) {
    CAPTURE(to_string(pair));
    for (int inst = 0; inst < 10; ++inst) {
      const auto p = inst % 2 ? testing::random_positive(5, rng) : testing::random_graph(5, 0.4, 0.2, rng);
      const auto spec = UncertaintySpec::uniform(0.5 + inst, 5, pair);
      const auto x = testing::random_simplex(5, rng);
      const double fx = phi(p, x, spec).total;
      const auto g = subgradient_phi(p, x, spec);
      for (int k = 0; k < 100; ++k) {
        const auto y = testing::random_simplex(5, rng);
        double lin = fx;
        for (std::size_t i = 0; i < 5; ++i) lin += g[i] * (y[i] - x[i]);
        CHECK(phi(p, y, spec).total >= lin - 1e-9);
      }
    }
  }
}

TEST_CASE("property: subgradient matches finite differences at smooth points") {
  std::mt19937_64 rng(39);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (NormPair pair : {NormPair::l1_g1, NormPair::l2_g2, NormPair::l2_l2}) {
    CAPTURE(to_string(pair));
    for (int inst = 0; inst < 20; ++inst) {
      const auto p = testing::random_positive(6, rng);
      const auto spec = UncertaintySpec::uniform(1.3, 6, pair);
      Objective obj(p, spec);
      // Interior point and a zero-sum direction keep x +- h d on the simplex.
      auto x = testing::random_simplex(6, rng);
      for (double& v : x) v = 0.5 * v + 0.5 / 6.0;
      std::vector<double> d(6);
      double mean = 0.0;
      for (double& v : d) mean += (v = normal(rng));
      for (double& v : d) v -= mean / 6.0;

      std::vector<double> g(6);
      obj.value_and_subgradient(x, g);
      const double h = 1e-7;
      std::vector<double> xp(6), xm(6);
      for (std::size_t i = 0; i < 6; ++i) {
        xp[i] = x[i] + h * d[i];
        xm[i] = x[i] - h * d[i];
      }
      const double fd = (obj.value(xp).total - obj.value(xm).total) / (2.0 * h);
      double gd = 0.0;
      for (std::size_t i = 0; i < 6; ++i) gd += g[i] * d[i];
      CHECK(std::abs(fd - gd) <= 1e-5);
    }
  }
}

TEST_CASE("zero residual gives a zero residual subgradient") {
  const auto p = testing::seven_node();
  const std::vector<double> fixed{0, 0, 0, 0, 0, 0.5, 0.5};
  const auto spec = UncertaintySpec::uniform(2.0, 7, NormPair::l2_l2);
  const auto g = subgradient_phi(p, fixed, spec);
  // Only eps x / ||x||_2 remains.
  for (std::size_t i = 0; i < 5; ++i) CHECK(g[i] == 0.0);
  CHECK(g[5] == doctest::Approx(2.0 / std::sqrt(2.0)));
}

TEST_CASE("g1 and g2 scale as n log n") {
  // Time per evaluation at n and 8n; linear-logarithmic growth stays far below
  // the quadratic ratio of 64.
  std::mt19937_64 rng(40);
  auto per_call = [&](std::size_t n, auto fn) {
    const auto x = random_signed(n, rng);
    const auto c = random_weights(n, rng);
    double best = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      volatile double sink = fn(x, c);
      (void)sink;
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
  };
  for (const auto& [name, g] : {std::pair<const char*, NormFn>{"g1", call_g1}, {"g2", call_g2}}) {
    CAPTURE(name);
    const double small = per_call(1 << 15, g);
    const double large = per_call(1 << 18, g);
    CHECK(large / small < 24.0);
  }
}
