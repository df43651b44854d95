#include "freemax/maxstable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "freemax/kernels/kernels.hpp"
#include "freemax/kernels/vmath.hpp"
#include "freemax/stats.hpp"

namespace freemax {

AffineNorm stability_norming(const Cdf& family, long long p) {
  if (p < 1) throw std::domain_error("stability_norming: p >= 1");
  const auto fp = family.analytic_params();
  if (!fp) throw std::domain_error("stability_norming: not a max-stable family");
  const double pd = double(p);
  switch (fp->kind) {
    case CdfKind::gumbel:  // loc m, scale s: a = 1, b = s log p
      return {1.0, fp->p2 * vm::log(pd)};
    case CdfKind::frechet: {  // alpha, m, s: a = p^(1/alpha), b = m(1 - a)
      const double a = vm::exp(vm::log(pd) / fp->p1);
      return {a, fp->p2 * (1.0 - a)};
    }
    case CdfKind::weibull: {  // alpha, m, s: a = p^(-1/alpha), b = m(1 - a)
      const double a = vm::exp(-vm::log(pd) / fp->p1);
      return {a, fp->p2 * (1.0 - a)};
    }
    default:
      throw std::domain_error("stability_norming: not a max-stable family");
  }
}

Cdf affine_map(const Cdf& f, const AffineNorm& norm) {
  return affine_transform(f, norm.scale, norm.loc);
}

DoaReport doa_check(const std::function<Cdf(long long)>& f_seq, const Cdf& f_limit,
                    const std::vector<long long>& ks, const std::vector<double>& grid) {
  if (grid.empty()) throw std::domain_error("doa_check: empty grid");
  DoaReport rep;
  rep.criterion = "e_free(k) <= 3*e_cls(k) + 10/k and e_cls(k_max) <= 0.05";
  const Cdf lam = lambda_vee(f_limit);
  const std::size_t m = grid.size();
  std::vector<double> limit_vals(m), lam_vals(m), fk_vals(m), tmp(m);
  f_limit.eval_grid(grid, limit_vals);
  lam.eval_grid(grid, lam_vals);
  const auto& ops = kern::ops();

  rep.dominated = true;
  for (long long k : ks) {
    const Cdf fk = f_seq(k);
    fk.eval_grid(grid, fk_vals);
    ops.pow_int(fk_vals.data(), k, tmp.data(), m);
    const double e_cls = ops.max_abs_diff(tmp.data(), limit_vals.data(), m);
    ops.free_power(fk_vals.data(), double(k), tmp.data(), m);
    const double e_free = ops.max_abs_diff(tmp.data(), lam_vals.data(), m);
    rep.rows.push_back({k, e_cls, e_free});
    if (!(e_free <= 3.0 * e_cls + 10.0 / double(k))) rep.dominated = false;
  }
  rep.hypothesis = !rep.rows.empty() && rep.rows.back().e_cls <= 0.05;
  rep.pass = rep.dominated && rep.hypothesis;
  return rep;
}

double KsReport::max_ks() const {
  double m = 0;
  for (double k : per_coordinate_ks) m = std::max(m, k);
  return m;
}

namespace {

// The norming satisfies F(a_p x + b_p)^p = F(x); at the variable level that
// means the max of p copies of (X - b_p)/a_p has law F, so matrices are
// transformed by the inverse affine map.
HermitianMatrix affine_matrix(const HermitianMatrix& h, const AffineNorm& norm) {
  return HermitianMatrix(
      (h.entries() - norm.loc * Eigen::MatrixXcd::Identity(h.dim(), h.dim())) /
      norm.scale);
}

std::vector<double> coordinate(const std::vector<RankedSample>& v, int i) {
  std::vector<double> out(v.size());
  for (std::size_t d = 0; d < v.size(); ++d) out[d] = v[d][i];
  return out;
}

KsReport compare_ranked(const std::vector<RankedSample>& a,
                        const std::vector<RankedSample>& b, int n, double threshold) {
  KsReport rep;
  rep.threshold = threshold;
  rep.pass = true;
  for (int i = 0; i < n; ++i) {
    rep.per_coordinate_ks.push_back(two_sample_ks(coordinate(a, i), coordinate(b, i)));
    if (rep.per_coordinate_ks.back() > threshold) rep.pass = false;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double ra = spearman(coordinate(a, i), coordinate(a, j));
      const double rb = spearman(coordinate(b, i), coordinate(b, j));
      rep.rank_corr_diff = std::max(rep.rank_corr_diff, std::fabs(ra - rb));
    }
  if (rep.rank_corr_diff > rep.corr_threshold) rep.pass = false;
  return rep;
}

}  // namespace

KsReport matrix_max_stability_test(const Cdf& family, int n, int p, int draws,
                                   const RngStream& rng, double threshold) {
  if (n < 1 || p < 1 || draws < 1)
    throw std::domain_error("matrix_max_stability_test: n, p, draws >= 1");
  const AffineNorm norm = stability_norming(family, p);
  std::vector<RankedSample> combined(draws), direct(draws);
  for (int d = 0; d < draws; ++d) {
    RngStream sd = rng.split(2 * d);
    HermitianMatrix acc = affine_matrix(sample_limit_matrix(family, n, sd), norm);
    for (int i = 1; i < p; ++i) {
      RngStream si = rng.split(2 * d).split(i);
      acc = spectral_max(acc, affine_matrix(sample_limit_matrix(family, n, si), norm));
    }
    const auto spec = eig(acc).eigenvalues;
    combined[d] = RankedSample(spec.data(), spec.data() + n);
    RngStream sdir = rng.split(2 * d + 1);
    direct[d] = sample_limit_ranked(family, n, sdir);
  }
  return compare_ranked(combined, direct, n, threshold);
}

KsReport matrix_max_id_test(const Cdf& mu, int n, int p, int draws,
                            const RngStream& rng, double threshold) {
  if (n < 1 || p < 1 || draws < 1)
    throw std::domain_error("matrix_max_id_test: n, p, draws >= 1");
  const Cdf root = kth_root(mu, p);
  std::vector<RankedSample> combined(draws), direct(draws);
  for (int d = 0; d < draws; ++d) {
    RngStream sd = rng.split(2 * d);
    HermitianMatrix acc = sample_limit_matrix(root, n, sd);
    for (int i = 1; i < p; ++i) {
      RngStream si = rng.split(2 * d).split(i);
      acc = spectral_max(acc, sample_limit_matrix(root, n, si));
    }
    const auto spec = eig(acc).eigenvalues;
    combined[d] = RankedSample(spec.data(), spec.data() + n);
    RngStream sdir = rng.split(2 * d + 1);
    direct[d] = sample_limit_ranked(mu, n, sdir);
  }
  return compare_ranked(combined, direct, n, threshold);
}

}  // namespace freemax
