#include "freemax/limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "freemax/kernels/kernels.hpp"
#include "freemax/kernels/vmath.hpp"

namespace freemax {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double gamma_nn(int n, RngStream& rng) {
  if (n < 1) throw std::domain_error("gamma_nn: n >= 1");
  if (n <= 64) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc -= vm::log(rng.uniform());
    return acc / double(n);
  }
  // Marsaglia-Tsang for shape n >= 1, rate 1, then scale by 1/n
  const double d = double(n) - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / double(n);
    if (vm::log(u) < 0.5 * x * x + d * (1.0 - v + vm::log(v))) return d * v / double(n);
  }
}

RankedSample sample_limit_ranked(const Cdf& f, int n, RngStream& rng) {
  if (n < 1) throw std::domain_error("sample_limit_ranked: n >= 1");
  const double g = gamma_nn(n, rng);
  std::vector<double> u(n);
  for (int i = 0; i + 1 < n; ++i) u[i] = g * rng.uniform();
  u[n - 1] = g;
  std::sort(u.begin(), u.end() - 1);
  RankedSample t(n);
  for (int i = 0; i < n; ++i) t[i] = f.quantile_log(-u[i]);
  return t;
}

RankedSample brute_force_ranked(const Cdf& f, int n, int k, RngStream& rng) {
  if (n < 1 || k < 1) throw std::domain_error("brute_force_ranked: n, k >= 1");
  const std::size_t m = std::size_t(k) * std::size_t(n);
  std::vector<double> values(m);
  rng.fill_uniform(values);

  const auto fam = f.analytic_params();
  const auto& ops = kern::ops();
  if (fam && fam->kind == CdfKind::uniform) {
    ops.neg_log_scaled(values.data(), double(k), values.data(), m);
    ops.q_uniform(values.data(), fam->p1, fam->p2 - fam->p1, values.data(), m);
  } else if (fam && fam->kind == CdfKind::gumbel) {
    ops.neg_log_scaled(values.data(), double(k), values.data(), m);
    ops.q_gumbel(values.data(), fam->p1, fam->p2, values.data(), m);
  } else if (fam && fam->kind == CdfKind::frechet) {
    ops.neg_log_scaled(values.data(), double(k), values.data(), m);
    ops.q_frechet(values.data(), fam->p1, fam->p2, fam->p3, values.data(), m);
  } else if (fam && fam->kind == CdfKind::weibull) {
    ops.neg_log_scaled(values.data(), double(k), values.data(), m);
    ops.q_weibull(values.data(), fam->p1, fam->p2, fam->p3, values.data(), m);
  } else {
    for (double& v : values) v = f.quantile_log(double(k) * vm::log(v));
  }
  return top_n_merge(values, n);
}

double log_limit_density(const Cdf& f, const RankedSample& t) {
  const std::size_t n = t.size();
  if (n == 0) throw std::domain_error("log_limit_density: empty sample");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(t[i] >= t[i + 1])) return kNegInf;
  const double lf_last = f.log_eval(t.back());
  if (lf_last == kNegInf) return kNegInf;
  double acc = double(n) * std::log(double(n));
  for (std::size_t i = 0; i + 1 < n; ++i) acc += lf_last - f.log_eval(t[i]);
  return acc;
}

double order_stats_log_density(const Cdf& f, long long n_total, long long n_kept,
                               const RankedSample& t) {
  if (n_kept < 1 || n_total < n_kept)
    throw std::domain_error("order_stats_log_density: need n_total >= n_kept >= 1");
  if (t.size() != std::size_t(n_kept))
    throw std::invalid_argument("order_stats_log_density: sample size != n_kept");
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (!(t[i] >= t[i + 1])) return kNegInf;
  double acc = std::lgamma(double(n_total) + 1.0) - std::lgamma(double(n_total - n_kept) + 1.0);
  if (n_total > n_kept) {
    const double lf = f.log_eval(t.back());
    if (lf == kNegInf) return kNegInf;
    acc += double(n_total - n_kept) * lf;
  }
  return acc;
}

HermitianMatrix sample_limit_matrix(const Cdf& f, int n, RngStream& rng) {
  return rotate_diag(sample_limit_ranked(f, n, rng), rng);
}

}  // namespace freemax
