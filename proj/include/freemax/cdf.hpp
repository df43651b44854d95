#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "freemax/rng.hpp"

namespace freemax {

namespace detail {
class CdfNode;
}

enum class CdfKind {
  uniform,
  gumbel,
  frechet,
  weibull,
  exponential,
  atomic,
  empirical_step,
  piecewise_linear,
  // lazy pointwise combinations; evaluation composes the closed-form maps
  product,
  free_conv,
  free_power,
  root,
  lambda_vee,
  affine,
};

// A cumulative distribution function. Values are immutable after
// construction and cheap to copy; all operations are pure, so concurrent
// reads from multiple threads are safe.
//
// Algebraic results (products, (F+G-1)^+, roots, ...) stay exact: they are
// represented as lazy pointwise maps over their operands rather than being
// resampled onto a grid, except where a discrete or piecewise-linear result
// can be materialised exactly.
class Cdf {
 public:
  // analytic families
  static Cdf uniform(double a, double b);
  static Cdf gumbel(double loc, double scale);
  static Cdf frechet(double alpha, double loc, double scale);
  static Cdf weibull(double alpha, double loc, double scale);
  static Cdf exponential(double rate);
  // finite discrete law from (point, mass) pairs; masses must sum to 1
  static Cdf atomic(std::vector<std::pair<double, double>> points);
  // continuous piecewise-linear CDF from breakpoints (x strictly increasing,
  // p non-decreasing, first p >= 0, last p = 1)
  static Cdf piecewise_linear(std::vector<double> xs, std::vector<double> ps);

  CdfKind kind() const;
  bool has_atoms() const;
  bool is_analytic() const;  // one of the closed-form families
  // interval containing {0 < F < 1}; endpoints may be infinite
  std::pair<double, double> support() const;

  double eval(double x) const;       // F(x)
  double eval_left(double x) const;  // F(x-)
  double log_eval(double x) const;   // log F(x), -inf where F = 0
  double quantile(double u) const;   // min{x : F(x) >= u}, u in (0,1)
  double quantile_log(double log_u) const;
  void eval_grid(std::span<const double> xs, std::span<double> out) const;

  // jump points / knots of discrete and piecewise representations (merged
  // over operands for lazy nodes); empty for purely analytic laws
  std::vector<double> key_points() const;
  // smallest jump/knot strictly above x; +inf when none
  double next_key_point(double x) const;

  // parameter access for the analytic families (p1..p3 meaning per family)
  struct FamilyParams {
    CdfKind kind;
    double p1 = 0, p2 = 0, p3 = 0;
  };
  std::optional<FamilyParams> analytic_params() const;
  // non-null only for empirical_step
  const std::vector<double>* empirical_samples() const;

  const detail::CdfNode& node() const { return *node_; }
  explicit Cdf(std::shared_ptr<const detail::CdfNode> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<const detail::CdfNode> node_;
};

// --- operations -----------------------------------------------------------

double cdf_eval(const Cdf& f, double x);
double quantile(const Cdf& f, double u);

// law of max(X, Y) for independent X, Y: pointwise F*G
Cdf classical_max_conv(const Cdf& f, const Cdf& g);
// law of X v Y (spectral order) for free X, Y: pointwise (F+G-1)^+
Cdf free_max_conv(const Cdf& f, const Cdf& g);
// k-fold free max-convolution of F with itself: (k*F - k + 1)^+
Cdf free_max_conv_power(const Cdf& f, long long k);
// the morphism F -> max(0, 1 + log F)
Cdf lambda_vee(const Cdf& f);
// law with CDF F^(1/k): the k-th max-root
Cdf kth_root(const Cdf& f, long long k);
// CDF of a*X + b, a > 0
Cdf affine_transform(const Cdf& f, double a, double b);

// n i.i.d. draws by inverse transform
std::vector<double> sample(const Cdf& f, std::size_t n, RngStream& rng);
Cdf empirical_cdf(std::vector<double> samples);

// sup |F - G| over merged jump points plus a quantile refinement grid
double ks_distance(const Cdf& f, const Cdf& g);
// sup over a quantile grid of |F^{<-1>} - G^{<-1>}|; +inf when the tails
// diverge (detected on the geometric tail grid)
double quantile_sup_distance(const Cdf& f, const Cdf& g);

// continuous piecewise-linear CDF agreeing with F on the grid eps*Z and
// satisfying F_eps(x - eps) <= F(x) <= F_eps(x + eps)
Cdf smooth_approx(const Cdf& f, double eps);
// lossy piecewise-linear materialisation on an adaptive quantile grid
Cdf to_piecewise_linear(const Cdf& f, std::size_t breakpoints = 4096);

}  // namespace freemax
