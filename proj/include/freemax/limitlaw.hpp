#pragma once

#include <vector>

#include "freemax/cdf.hpp"
#include "freemax/rng.hpp"
#include "freemax/spectral.hpp"

namespace freemax {

// One draw from the ranked-eigenvalue law: values[0] >= ... >= values[N-1].
using RankedSample = std::vector<double>;

// One Gamma(shape n, rate n) draw: sum of n unit exponentials scaled by 1/n
// for n <= 64, Marsaglia-Tsang rejection above.
double gamma_nn(int n, RngStream& rng);

// Exact draw from the ranked-eigenvalue limit law. In u = -log F(t)
// coordinates the law factorises as u_N ~ Gamma(N, N) with u_1 <= ... <=
// u_{N-1} conditionally uniform order statistics on (0, u_N); the draw is
// pushed back through the quantile function. For atomic F the same
// push-forward is applied but only the brute-force oracle validates it.
RankedSample sample_limit_ranked(const Cdf& f, int n, RngStream& rng);

// Push-forward oracle: the top n of k*n i.i.d. draws from the k-th max-root
// of F, by inverse transform. Converges in law to the limit as k grows.
RankedSample brute_force_ranked(const Cdf& f, int n, int k, RngStream& rng);

// log of the limit density w.r.t. F^(x)N) at t; -inf off the ordered cone or
// where any F(t_i) = 0. Defined for atomless F.
double log_limit_density(const Cdf& f, const RankedSample& t);

// log density of the top n_kept order statistics of n_total i.i.d. F draws,
// w.r.t. F^(x)n_kept): log[n!/(n-N)!] + (n-N) log F(t_N) on the ordered cone.
double order_stats_log_density(const Cdf& f, long long n_total, long long n_kept,
                               const RankedSample& t);

// Haar-rotated diagonal of an exact ranked draw: a limit-law distributed
// matrix, unitarily invariant by construction.
HermitianMatrix sample_limit_matrix(const Cdf& f, int n, RngStream& rng);

}  // namespace freemax
