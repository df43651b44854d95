#pragma once

#include <functional>
#include <string>
#include <vector>

#include "freemax/cdf.hpp"
#include "freemax/limitlaw.hpp"
#include "freemax/rng.hpp"

namespace freemax {

// x -> scale*x + loc, scale > 0
struct AffineNorm {
  double scale = 1.0;
  double loc = 0.0;
};

// The norming (a_p, b_p) with F(a_p x + b_p)^p = F(x), for the three
// max-stable families (Gumbel, Frechet, Weibull) with any parameters.
AffineNorm stability_norming(const Cdf& family, long long p);

// CDF of a*X + b, i.e. x -> F((x - b)/a).
Cdf affine_map(const Cdf& f, const AffineNorm& norm);

struct DoaReport {
  struct Row {
    long long k;
    double e_cls;  // sup over the grid of |F_k(x)^k - F_limit(x)|
    double e_free; // sup of |k-fold free power of F_k - lambda_vee(F_limit)|
  };
  std::vector<Row> rows;
  bool dominated = false;   // e_free(k) <= 3*e_cls(k) + 10/k for all k
  bool hypothesis = false;  // e_cls at the largest k is small (F_k^k -> F holds)
  bool pass = false;        // both
  std::string criterion;
};

// Domain-of-attraction transfer check: if F_k^k -> F then the k-fold free
// max-convolutions of F_k approach lambda_vee(F). Grid points must be
// continuity points of the limit.
DoaReport doa_check(const std::function<Cdf(long long)>& f_seq, const Cdf& f_limit,
                    const std::vector<long long>& ks, const std::vector<double>& grid);

struct KsReport {
  std::vector<double> per_coordinate_ks;
  // sup over coordinate pairs of |Spearman(combined) - Spearman(direct)|;
  // the ranked-marginal KS plus this matrix is how joint-law agreement is
  // probed (calibrated bound: 0.07 at 1e4 draws)
  double rank_corr_diff = 0.0;
  double corr_threshold = 0.07;
  double threshold = 0.0;
  bool pass = false;
  double max_ks() const;
};

// Max-stability at the matrix level: compare ranked spectra of
// (a_p H_1 + b_p I) v ... v (a_p H_p + b_p I), H_i i.i.d. limit-law draws,
// against direct ranked draws, coordinate-wise KS.
KsReport matrix_max_stability_test(const Cdf& family, int n, int p, int draws,
                                   const RngStream& rng, double threshold = 0.03);

// Max-infinite divisibility: the p-fold spectral max of limit-law draws from
// the p-th max-root of mu matches direct draws from mu's limit law.
KsReport matrix_max_id_test(const Cdf& mu, int n, int p, int draws,
                            const RngStream& rng, double threshold = 0.03);

}  // namespace freemax
