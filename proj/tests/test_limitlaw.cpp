#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "freemax/cdf.hpp"
#include "freemax/kernels/vmath.hpp"
#include "freemax/limitlaw.hpp"
#include "freemax/stats.hpp"

using namespace freemax;

namespace {

std::vector<double> coordinate(const std::vector<RankedSample>& draws, int i) {
  std::vector<double> out(draws.size());
  for (std::size_t d = 0; d < draws.size(); ++d) out[d] = draws[d][i];
  return out;
}

std::vector<RankedSample> draw_many(const Cdf& f, int n, int count, std::uint64_t seed,
                                    int k_oracle = 0) {
  std::vector<RankedSample> out(count);
  for (int d = 0; d < count; ++d) {
    RngStream s = split(seed, d);
    out[d] = k_oracle > 0 ? brute_force_ranked(f, n, k_oracle, s)
                          : sample_limit_ranked(f, n, s);
  }
  return out;
}

}  // namespace

TEST_CASE("gamma_nn moments and the rejection path") {
  for (int n : {2, 5, 64, 200}) {
    RngStream rng(400 + n, 0);
    const int draws = 30000;
    std::vector<double> g(draws);
    for (auto& x : g) x = gamma_nn(n, rng);
    const auto s = summarize(g);
    CHECK(std::fabs(s.mean - 1.0) < 0.02);
    CHECK(std::fabs(s.variance - 1.0 / n) < 0.15 / n);
  }

  // Marsaglia-Tsang path against an independent sum-of-exponentials oracle
  const int n = 100, draws = 30000;
  RngStream r1(11, 0), r2(12, 0);
  std::vector<double> mt(draws), oracle(draws);
  for (auto& x : mt) x = gamma_nn(n, r1);
  for (auto& x : oracle) {
    double acc = 0;
    for (int i = 0; i < n; ++i) acc -= std::log(r2.uniform());
    x = acc / n;
  }
  CHECK(two_sample_ks(mt, oracle) < 0.02);

  RngStream bad(1, 0);
  CHECK_THROWS_AS(gamma_nn(0, bad), std::domain_error);
}

TEST_CASE("sample_limit_ranked: shape, N=1 law, gamma marginal") {
  RngStream rng(2025, 0);
  CHECK_THROWS_AS(sample_limit_ranked(Cdf::uniform(0, 1), 0, rng), std::domain_error);

  // decreasing order always
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = sample_limit_ranked(Cdf::gumbel(0, 1), 7, rng);
    for (int i = 0; i + 1 < 7; ++i) CHECK(t[i] >= t[i + 1]);
  }

  // N = 1 reduces to a plain F draw
  const Cdf f = Cdf::uniform(0, 1);
  std::vector<double> xs(20000);
  for (std::size_t d = 0; d < xs.size(); ++d) {
    RngStream s = split(5150, d);
    xs[d] = sample_limit_ranked(f, 1, s)[0];
  }
  CHECK(ks_vs_cdf(xs, f) < 0.015);

  // u_N = -log F(t_N) recovers the Gamma(N,N) marginal moments
  for (int n : {2, 5}) {
    const auto draws = draw_many(f, n, 30000, 99 + n);
    std::vector<double> un(draws.size());
    for (std::size_t d = 0; d < draws.size(); ++d) un[d] = -f.log_eval(draws[d][n - 1]);
    const auto s = summarize(un);
    CHECK(std::fabs(s.mean - 1.0) < 0.015);
    CHECK(std::fabs(s.variance - 1.0 / n) < 0.1 / n);
  }
}

TEST_CASE("brute_force_ranked small-k reductions") {
  // k=1, N=1: a single F draw
  const Cdf g = Cdf::gumbel(0, 1);
  std::vector<double> xs(20000);
  for (std::size_t d = 0; d < xs.size(); ++d) {
    RngStream s = split(777, d);
    xs[d] = brute_force_ranked(g, 1, 1, s)[0];
  }
  CHECK(ks_vs_cdf(xs, g) < 0.015);

  // k=1, general N: ranked order statistics of N i.i.d. F draws
  const int n = 4, draws = 20000;
  const auto bf = draw_many(g, n, draws, 888, 1);
  std::vector<RankedSample> os(draws);
  for (int d = 0; d < draws; ++d) {
    RngStream s = split(999, d);
    std::vector<double> v(n);
    for (auto& x : v) x = g.quantile(s.uniform());
    std::sort(v.begin(), v.end(), std::greater<>());
    os[d] = v;
  }
  for (int i = 0; i < n; ++i)
    CHECK(two_sample_ks(coordinate(bf, i), coordinate(os, i)) < 0.02);
}

TEST_CASE("exact sampler matches the push-forward oracle") {
  for (const Cdf& f : {Cdf::uniform(0, 1), Cdf::gumbel(0, 1)}) {
    for (int n : {1, 3}) {
      const int draws = 20000;
      const auto exact = draw_many(f, n, draws, 1000 + n);
      const auto oracle = draw_many(f, n, draws, 2000 + n, 500);
      for (int i = 0; i < n; ++i)
        CHECK(two_sample_ks(coordinate(exact, i), coordinate(oracle, i)) < 0.04);
    }
  }
}

TEST_CASE("oracle is Cauchy in k") {
  const Cdf f = Cdf::uniform(0, 1);
  const int n = 2, draws = 20000;
  const auto a = draw_many(f, n, draws, 3100, 500);
  const auto b = draw_many(f, n, draws, 3200, 2000);
  for (int i = 0; i < n; ++i)
    CHECK(two_sample_ks(coordinate(a, i), coordinate(b, i)) < 0.02);
}

TEST_CASE("log_limit_density examples and quadrature normalization") {
  const Cdf f = Cdf::uniform(0, 1);
  CHECK(log_limit_density(f, {0.8, 0.5}) ==
        doctest::Approx(std::log(2.5)).epsilon(1e-12));
  CHECK(log_limit_density(f, {0.5, 0.8}) == -std::numeric_limits<double>::infinity());
  CHECK(log_limit_density(f, {0.5, -0.1}) == -std::numeric_limits<double>::infinity());

  // integral of the N=2 density over {1 >= t1 >= t2 >= 0} w.r.t. Lebesgue;
  // midpoint cells plus centroid-weighted diagonal triangles
  const int m = 500;
  const double h = 1.0 / m;
  double integral = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < i; ++j) {
      const double t1 = (i + 0.5) * h, t2 = (j + 0.5) * h;
      integral += h * h * std::exp(log_limit_density(f, {t1, t2}));
    }
    const double t1 = (i + 2.0 / 3.0) * h, t2 = (i + 1.0 / 3.0) * h;
    integral += 0.5 * h * h * std::exp(log_limit_density(f, {t1, t2}));
  }
  CHECK(std::fabs(integral - 1.0) < 1e-3);
}

TEST_CASE("order_stats_log_density examples and simulation histogram") {
  const Cdf f = Cdf::uniform(0, 1);
  CHECK_THROWS_AS(order_stats_log_density(f, 1, 2, {0.5, 0.2}), std::domain_error);

  // n = N: pure ranking density log(N!)
  CHECK(order_stats_log_density(f, 3, 3, {0.9, 0.5, 0.1}) ==
        doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(order_stats_log_density(f, 3, 3, {0.1, 0.5, 0.9}) ==
        -std::numeric_limits<double>::infinity());

  // n=2, N=1: density of max of two uniforms is 2x
  for (double x : {0.1, 0.4, 0.9})
    CHECK(order_stats_log_density(f, 2, 1, {x}) ==
          doctest::Approx(std::log(2 * x)).epsilon(1e-12));

  // n=3, N=2: histogram of simulated sorted triples vs the density,
  // total-variation mismatch over a 20x20 grid
  const int draws = 200000, cells = 20;
  std::vector<double> hist(cells * cells, 0.0);
  for (int d = 0; d < draws; ++d) {
    RngStream s = split(31415, d);
    double a = s.uniform(), b = s.uniform(), c = s.uniform();
    double t1 = std::max({a, b, c});
    double t2 = std::max(std::min(a, b), std::min(std::max(a, b), c));
    const int i = std::min(cells - 1, int(t1 * cells));
    const int j = std::min(cells - 1, int(t2 * cells));
    hist[i * cells + j] += 1.0 / draws;
  }
  // expected mass per cell by quadrature of exp(order_stats_log_density)
  double tv = 0.0;
  const int sub = 8;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j <= i; ++j) {
      double mass = 0.0;
      for (int a = 0; a < sub; ++a)
        for (int b = 0; b < sub; ++b) {
          const double t1 = (i + (a + 0.5) / sub) / cells;
          const double t2 = (j + (b + 0.5) / sub) / cells;
          if (t1 >= t2)
            mass += std::exp(order_stats_log_density(f, 3, 2, {t1, t2})) /
                    double(sub * sub * cells * cells);
        }
      tv += 0.5 * std::fabs(hist[i * cells + j] - mass);
    }
  CHECK(tv < 0.05);
}

TEST_CASE("density consistency: importance weights against the finite-k law") {
  // E_q[p/q] = 1 when q is the k-step push-forward density and p the limit
  const Cdf f = Cdf::uniform(0, 1);
  const int n = 2, k = 2000, draws = 20000;
  double acc = 0.0;
  for (int d = 0; d < draws; ++d) {
    RngStream s = split(271828, d);
    const auto t = brute_force_ranked(f, n, k, s);
    const double log_p = log_limit_density(f, t);
    // density of max_N((mu^{1/k})^(x)kN)) w.r.t. mu^(x)N)
    double log_q = std::lgamma(double(k) * n + 1.0) - std::lgamma(double(k) * n - n + 1.0) -
                   n * std::log(double(k));
    for (int i = 0; i < n; ++i)
      log_q += (1.0 - 1.0 / k) * (f.log_eval(t[n - 1]) - f.log_eval(t[i]));
    acc += std::exp(log_p - log_q);
  }
  CHECK(std::fabs(acc / draws - 1.0) < 0.02);
}

TEST_CASE("coupling contraction for shifted laws") {
  const double delta = 0.25;
  const Cdf f = Cdf::gumbel(0, 1);
  const Cdf g = affine_transform(f, 1.0, delta);  // F(x - delta)
  for (int d = 0; d < 200; ++d) {
    RngStream s1 = split(616, d), s2 = split(616, d);
    const auto t = sample_limit_ranked(f, 5, s1);
    const auto u = sample_limit_ranked(g, 5, s2);
    for (int i = 0; i < 5; ++i)
      CHECK(std::fabs(u[i] - t[i]) <= delta * (1 + 1e-12) + 1e-15);
  }
}

TEST_CASE("vector-level semigroup: top-N of merged draws") {
  const Cdf f = Cdf::uniform(0, 1);
  const Cdf g = Cdf::gumbel(-1, 0.5);
  const Cdf rho = classical_max_conv(f, g);
  const int n = 2, draws = 10000;
  std::vector<RankedSample> merged(draws), direct(draws);
  for (int d = 0; d < draws; ++d) {
    RngStream s = split(515151, d);
    RngStream s_b = s.split(1);
    const auto a = sample_limit_ranked(f, n, s);
    auto b = sample_limit_ranked(g, n, s_b);
    b.insert(b.end(), a.begin(), a.end());
    merged[d] = top_n_merge(b, n);
    RngStream s2 = split(626262, d);
    direct[d] = sample_limit_ranked(rho, n, s2);
  }
  for (int i = 0; i < n; ++i)
    CHECK(two_sample_ks(coordinate(merged, i), coordinate(direct, i)) < 0.04);
}

TEST_CASE("sample_limit_matrix: spectrum is the ranked draw") {
  const Cdf f = Cdf::frechet(2, 0, 1);
  for (int d = 0; d < 20; ++d) {
    RngStream s1 = split(737, d), s2 = split(737, d);
    const auto t = sample_limit_ranked(f, 4, s1);
    const auto m = sample_limit_matrix(f, 4, s2);
    const auto spec = eig(m).eigenvalues;
    for (int i = 0; i < 4; ++i)
      CHECK(spec(i) == doctest::Approx(t[i]).epsilon(1e-9));
  }
  RngStream s(1, 2);
  const auto m1 = sample_limit_matrix(f, 1, s);
  CHECK(m1.dim() == 1);
}

TEST_CASE("atomic input: push-forward vs oracle, reported not asserted") {
  const Cdf bern = Cdf::atomic({{0.0, 0.5}, {1.0, 0.5}});
  const int n = 2, draws = 20000;
  const auto exact = draw_many(bern, n, draws, 414);
  const auto oracle = draw_many(bern, n, draws, 424, 2000);
  for (int i = 0; i < n; ++i) {
    const double ks = two_sample_ks(coordinate(exact, i), coordinate(oracle, i));
    MESSAGE("Bernoulli(1/2) coordinate ", i, ": exact-vs-oracle KS = ", ks);
    WARN(ks < 0.02);
  }
}
