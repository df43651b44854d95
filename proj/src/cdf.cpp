#include "freemax/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "freemax/kernels/kernels.hpp"
#include "freemax/kernels/vmath.hpp"

namespace freemax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuantileRelTol = 1e-12;
}  // namespace

namespace detail {

class CdfNode {
 public:
  virtual ~CdfNode() = default;
  virtual CdfKind kind() const = 0;
  virtual double eval(double x) const = 0;
  virtual double eval_left(double x) const { return eval(x); }
  virtual double log_eval(double x) const { return vm::log(eval(x)); }
  // min{x : F(x) >= exp(lp)}, lp in [-inf, 0)
  virtual double quantile_log(double lp) const = 0;
  virtual double quantile(double u) const { return quantile_log(vm::log(u)); }
  virtual bool has_atoms() const = 0;
  virtual std::pair<double, double> support() const = 0;
  virtual void key_points(std::vector<double>&) const {}
  // smallest jump/knot strictly above x; +inf when none
  virtual double next_key_point(double) const {
    return std::numeric_limits<double>::infinity();
  }
  virtual void eval_grid(const double* xs, double* out, std::size_t n) const {
    for (std::size_t i = 0; i < n; ++i) out[i] = eval(xs[i]);
  }
};

}  // namespace detail

using detail::CdfNode;

namespace {

using NodePtr = std::shared_ptr<const CdfNode>;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// Bisection for min{x : pred(x)} given pred monotone, pred(hi) true and the
// answer inside [lo, hi]. Resolves to relative tolerance 1e-12, then snaps to
// a jump point of `node` inside the residual window so that minima attained
// at atoms are returned exactly.
template <class Pred>
double bisect_min(const CdfNode& node, double lo, double hi, Pred&& pred) {
  if (pred(lo)) return lo;  // lo is a proven lower bound, so it is the min
  if (!(lo < hi)) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
    const double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
    if (hi - lo <= kQuantileRelTol * scale) break;
  }
  for (int it = 0; it < 64; ++it) {
    const double c = node.next_key_point(lo);
    if (!(c <= hi)) break;
    if (pred(c)) return c;
    lo = c;
  }
  return hi;
}

// --- analytic families ------------------------------------------------------

class UniformNode final : public CdfNode {
 public:
  UniformNode(double a, double b) : a_(a), b_(b) {
    require(std::isfinite(a) && std::isfinite(b) && a < b, "uniform: need a < b");
  }
  CdfKind kind() const override { return CdfKind::uniform; }
  double eval(double x) const override {
    if (x <= a_) return 0.0;
    if (x >= b_) return 1.0;
    return (x - a_) / (b_ - a_);
  }
  double quantile(double u) const override { return a_ + (b_ - a_) * u; }
  double quantile_log(double lp) const override { return a_ + (b_ - a_) * vm::exp(lp); }
  bool has_atoms() const override { return false; }
  std::pair<double, double> support() const override { return {a_, b_}; }
  double a_, b_;
};

class GumbelNode final : public CdfNode {
 public:
  GumbelNode(double loc, double scale) : loc_(loc), scale_(scale) {
    require(std::isfinite(loc) && scale > 0, "gumbel: need scale > 0");
  }
  CdfKind kind() const override { return CdfKind::gumbel; }
  double log_eval(double x) const override { return -vm::exp(-(x - loc_) / scale_); }
  double eval(double x) const override { return vm::exp(log_eval(x)); }
  double quantile_log(double lp) const override { return loc_ - scale_ * vm::log(-lp); }
  bool has_atoms() const override { return false; }
  std::pair<double, double> support() const override { return {-kInf, kInf}; }
  double loc_, scale_;
};

class FrechetNode final : public CdfNode {
 public:
  FrechetNode(double alpha, double loc, double scale)
      : alpha_(alpha), loc_(loc), scale_(scale) {
    require(alpha > 0 && std::isfinite(loc) && scale > 0,
            "frechet: need alpha > 0, scale > 0");
  }
  CdfKind kind() const override { return CdfKind::frechet; }
  double log_eval(double x) const override {
    if (x <= loc_) return -kInf;
    return -vm::exp(-alpha_ * vm::log((x - loc_) / scale_));
  }
  double eval(double x) const override { return x <= loc_ ? 0.0 : vm::exp(log_eval(x)); }
  double quantile_log(double lp) const override {
    return loc_ + scale_ * vm::exp(vm::log(-lp) / -alpha_);
  }
  bool has_atoms() const override { return false; }
  std::pair<double, double> support() const override { return {loc_, kInf}; }
  double alpha_, loc_, scale_;
};

// Weibull-type max-stable family: support (-inf, loc].
class WeibullNode final : public CdfNode {
 public:
  WeibullNode(double alpha, double loc, double scale)
      : alpha_(alpha), loc_(loc), scale_(scale) {
    require(alpha > 0 && std::isfinite(loc) && scale > 0,
            "weibull: need alpha > 0, scale > 0");
  }
  CdfKind kind() const override { return CdfKind::weibull; }
  double log_eval(double x) const override {
    if (x >= loc_) return 0.0;
    return -vm::exp(alpha_ * vm::log((loc_ - x) / scale_));
  }
  double eval(double x) const override { return x >= loc_ ? 1.0 : vm::exp(log_eval(x)); }
  double quantile_log(double lp) const override {
    return loc_ - scale_ * vm::exp(vm::log(-lp) / alpha_);
  }
  bool has_atoms() const override { return false; }
  std::pair<double, double> support() const override { return {-kInf, loc_}; }
  double alpha_, loc_, scale_;
};

class ExponentialNode final : public CdfNode {
 public:
  explicit ExponentialNode(double rate) : rate_(rate) {
    require(rate > 0, "exponential: need rate > 0");
  }
  CdfKind kind() const override { return CdfKind::exponential; }
  double eval(double x) const override { return x <= 0 ? 0.0 : -std::expm1(-rate_ * x); }
  double log_eval(double x) const override {
    return x <= 0 ? -kInf : std::log1p(-vm::exp(-rate_ * x));
  }
  double quantile(double u) const override { return -std::log1p(-u) / rate_; }
  double quantile_log(double lp) const override { return quantile(vm::exp(lp)); }
  bool has_atoms() const override { return false; }
  std::pair<double, double> support() const override { return {0.0, kInf}; }
  double rate_;
};

// --- discrete / piecewise representations ----------------------------------

class AtomicNode final : public CdfNode {
 public:
  // from levels already known to be exact; xs strictly increasing,
  // levels non-decreasing with levels.back() == 1
  AtomicNode(std::vector<double> xs, std::vector<double> levels)
      : xs_(std::move(xs)), levels_(std::move(levels)) {}

  CdfKind kind() const override { return CdfKind::atomic; }
  double eval(double x) const override {
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    return it == xs_.begin() ? 0.0 : levels_[(it - xs_.begin()) - 1];
  }
  double eval_left(double x) const override {
    const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
    return it == xs_.begin() ? 0.0 : levels_[(it - xs_.begin()) - 1];
  }
  double quantile(double u) const override {
    const auto it = std::lower_bound(levels_.begin(), levels_.end(), u);
    return xs_[std::min<std::size_t>(it - levels_.begin(), xs_.size() - 1)];
  }
  double quantile_log(double lp) const override { return quantile(vm::exp(lp)); }
  bool has_atoms() const override { return true; }
  std::pair<double, double> support() const override { return {xs_.front(), xs_.back()}; }
  void key_points(std::vector<double>& out) const override {
    out.insert(out.end(), xs_.begin(), xs_.end());
  }
  double next_key_point(double x) const override {
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    return it == xs_.end() ? kInf : *it;
  }
  std::vector<double> xs_, levels_;
};

class EmpiricalNode final : public CdfNode {
 public:
  explicit EmpiricalNode(std::vector<double> sorted) : xs_(std::move(sorted)) {}
  CdfKind kind() const override { return CdfKind::empirical_step; }
  double eval(double x) const override {
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    return double(it - xs_.begin()) / double(xs_.size());
  }
  double eval_left(double x) const override {
    const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
    return double(it - xs_.begin()) / double(xs_.size());
  }
  double quantile(double u) const override {
    const double n = double(xs_.size());
    std::size_t k = static_cast<std::size_t>(std::ceil(n * u));
    k = std::min(std::max<std::size_t>(k, 1), xs_.size());
    while (k > 1 && double(k - 1) / n >= u) --k;
    while (k < xs_.size() && double(k) / n < u) ++k;
    return xs_[k - 1];
  }
  double quantile_log(double lp) const override { return quantile(vm::exp(lp)); }
  bool has_atoms() const override { return true; }
  std::pair<double, double> support() const override { return {xs_.front(), xs_.back()}; }
  void key_points(std::vector<double>& out) const override {
    out.insert(out.end(), xs_.begin(), xs_.end());
  }
  double next_key_point(double x) const override {
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    return it == xs_.end() ? kInf : *it;
  }
  std::vector<double> xs_;
};

class PiecewiseNode final : public CdfNode {
 public:
  PiecewiseNode(std::vector<double> xs, std::vector<double> ps)
      : xs_(std::move(xs)), ps_(std::move(ps)) {}
  CdfKind kind() const override { return CdfKind::piecewise_linear; }
  double eval(double x) const override {
    if (x < xs_.front()) return 0.0;
    if (x >= xs_.back()) return ps_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t j = it - xs_.begin();  // xs_[j-1] <= x < xs_[j]
    const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
    return ps_[j - 1] + t * (ps_[j] - ps_[j - 1]);
  }
  double eval_left(double x) const override {
    return x == xs_.front() ? 0.0 : eval(x);
  }
  double quantile(double u) const override {
    if (u <= ps_.front()) return xs_.front();
    const auto it = std::lower_bound(ps_.begin(), ps_.end(), u);
    const std::size_t j = it - ps_.begin();  // first ps_[j] >= u, j >= 1
    const double t = (u - ps_[j - 1]) / (ps_[j] - ps_[j - 1]);
    return xs_[j - 1] + t * (xs_[j] - xs_[j - 1]);
  }
  double quantile_log(double lp) const override { return quantile(vm::exp(lp)); }
  bool has_atoms() const override { return ps_.front() > 0; }
  std::pair<double, double> support() const override { return {xs_.front(), xs_.back()}; }
  void key_points(std::vector<double>& out) const override {
    out.insert(out.end(), xs_.begin(), xs_.end());
  }
  double next_key_point(double x) const override {
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    return it == xs_.end() ? kInf : *it;
  }
  std::vector<double> xs_, ps_;
};

// --- lazy pointwise combinations --------------------------------------------

class ProductNode final : public CdfNode {
 public:
  ProductNode(Cdf f, Cdf g) : f_(std::move(f)), g_(std::move(g)) {}
  CdfKind kind() const override { return CdfKind::product; }
  double eval(double x) const override { return f_.eval(x) * g_.eval(x); }
  double eval_left(double x) const override { return f_.eval_left(x) * g_.eval_left(x); }
  double log_eval(double x) const override { return f_.log_eval(x) + g_.log_eval(x); }
  double quantile_log(double lp) const override {
    const double lo = std::max(f_.quantile_log(lp), g_.quantile_log(lp));
    const double hi = std::max(f_.quantile_log(0.5 * lp), g_.quantile_log(0.5 * lp));
    return bisect_min(*this, lo, hi, [&](double x) { return log_eval(x) >= lp; });
  }
  bool has_atoms() const override { return f_.has_atoms() || g_.has_atoms(); }
  std::pair<double, double> support() const override {
    const auto a = f_.support(), b = g_.support();
    return {std::max(a.first, b.first), std::max(a.second, b.second)};
  }
  void key_points(std::vector<double>& out) const override {
    for (double x : f_.key_points()) out.push_back(x);
    for (double x : g_.key_points()) out.push_back(x);
  }
  void eval_grid(const double* xs, double* out, std::size_t n) const override {
    std::vector<double> tmp(n);
    f_.eval_grid({xs, n}, {tmp.data(), n});
    g_.eval_grid({xs, n}, {out, n});
    kern::ops().product(tmp.data(), out, out, n);
  }
  double next_key_point(double x) const override {
    return std::min(f_.next_key_point(x), g_.next_key_point(x));
  }
  Cdf f_, g_;
};

class FreeConvNode final : public CdfNode {
 public:
  FreeConvNode(Cdf f, Cdf g) : f_(std::move(f)), g_(std::move(g)) {}
  CdfKind kind() const override { return CdfKind::free_conv; }
  double eval(double x) const override {
    const double v = f_.eval(x) + g_.eval(x) - 1.0;
    return v > 0.0 ? v : 0.0;
  }
  double eval_left(double x) const override {
    const double v = f_.eval_left(x) + g_.eval_left(x) - 1.0;
    return v > 0.0 ? v : 0.0;
  }
  double quantile_log(double lp) const override {
    const double p = std::max(vm::exp(lp), std::numeric_limits<double>::min());
    const double lo = std::max(f_.quantile_log(lp), g_.quantile_log(lp));
    const double lmid = vm::log(0.5 * (1.0 + p));
    const double hi = std::max(f_.quantile_log(lmid), g_.quantile_log(lmid));
    return bisect_min(*this, lo, hi,
                      [&](double x) { return f_.eval(x) + g_.eval(x) - 1.0 >= p; });
  }
  bool has_atoms() const override { return f_.has_atoms() || g_.has_atoms(); }
  std::pair<double, double> support() const override {
    const auto a = f_.support(), b = g_.support();
    return {std::max(a.first, b.first), std::max(a.second, b.second)};
  }
  void key_points(std::vector<double>& out) const override {
    for (double x : f_.key_points()) out.push_back(x);
    for (double x : g_.key_points()) out.push_back(x);
  }
  void eval_grid(const double* xs, double* out, std::size_t n) const override {
    std::vector<double> tmp(n);
    f_.eval_grid({xs, n}, {tmp.data(), n});
    g_.eval_grid({xs, n}, {out, n});
    kern::ops().free_conv(tmp.data(), out, out, n);
  }
  double next_key_point(double x) const override {
    return std::min(f_.next_key_point(x), g_.next_key_point(x));
  }
  Cdf f_, g_;
};

class FreePowerNode final : public CdfNode {
 public:
  FreePowerNode(Cdf f, long long k) : f_(std::move(f)), k_(double(k)) {}
  CdfKind kind() const override { return CdfKind::free_power; }
  double eval(double x) const override {
    const double v = k_ * f_.eval(x) + (1.0 - k_);
    return v > 0.0 ? v : 0.0;
  }
  double eval_left(double x) const override {
    const double v = k_ * f_.eval_left(x) + (1.0 - k_);
    return v > 0.0 ? v : 0.0;
  }
  double quantile_log(double lp) const override {
    // target child probability 1 - (1-p)/k
    const double p = vm::exp(lp);
    return f_.quantile_log(std::log1p(-(1.0 - p) / k_));
  }
  bool has_atoms() const override { return f_.has_atoms(); }
  std::pair<double, double> support() const override { return f_.support(); }
  void key_points(std::vector<double>& out) const override {
    for (double x : f_.key_points()) out.push_back(x);
  }
  void eval_grid(const double* xs, double* out, std::size_t n) const override {
    f_.eval_grid({xs, n}, {out, n});
    kern::ops().free_power(out, k_, out, n);
  }
  double next_key_point(double x) const override { return f_.next_key_point(x); }
  Cdf f_;
  double k_;
};

class RootNode final : public CdfNode {
 public:
  RootNode(Cdf f, long long k) : f_(std::move(f)), k_(double(k)) {}
  CdfKind kind() const override { return CdfKind::root; }
  double log_eval(double x) const override { return f_.log_eval(x) / k_; }
  double eval(double x) const override { return vm::exp(log_eval(x)); }
  double eval_left(double x) const override {
    return vm::exp(vm::log(f_.eval_left(x)) / k_);
  }
  double quantile_log(double lp) const override { return f_.quantile_log(k_ * lp); }
  bool has_atoms() const override { return f_.has_atoms(); }
  std::pair<double, double> support() const override { return f_.support(); }
  void key_points(std::vector<double>& out) const override {
    for (double x : f_.key_points()) out.push_back(x);
  }
  void eval_grid(const double* xs, double* out, std::size_t n) const override {
    f_.eval_grid({xs, n}, {out, n});
    kern::ops().root(out, k_, out, n);
  }
  double next_key_point(double x) const override { return f_.next_key_point(x); }
  Cdf f_;
  double k_;
};

class LambdaVeeNode final : public CdfNode {
 public:
  explicit LambdaVeeNode(Cdf f) : f_(std::move(f)) {}
  CdfKind kind() const override { return CdfKind::lambda_vee; }
  static double map(double p, double logp) {
    if (p <= 0.0) return 0.0;  // straight to 0, no -inf intermediate
    const double v = 1.0 + logp;
    return v > 0.0 ? v : 0.0;
  }
  double eval(double x) const override { return map(f_.eval(x), f_.log_eval(x)); }
  double eval_left(double x) const override {
    const double p = f_.eval_left(x);
    return map(p, vm::log(p));
  }
  double quantile_log(double lp) const override {
    // G(x) >= u  <=>  log F(x) >= u - 1
    return f_.quantile_log(vm::exp(lp) - 1.0);
  }
  bool has_atoms() const override { return f_.has_atoms(); }
  std::pair<double, double> support() const override { return f_.support(); }
  void key_points(std::vector<double>& out) const override {
    for (double x : f_.key_points()) out.push_back(x);
  }
  void eval_grid(const double* xs, double* out, std::size_t n) const override {
    f_.eval_grid({xs, n}, {out, n});
    kern::ops().lambda_vee(out, out, n);
  }
  double next_key_point(double x) const override { return f_.next_key_point(x); }
  Cdf f_;
};

class AffineNode final : public CdfNode {
 public:
  AffineNode(Cdf f, double a, double b) : f_(std::move(f)), a_(a), b_(b) {}
  CdfKind kind() const override { return CdfKind::affine; }
  double eval(double x) const override { return f_.eval((x - b_) / a_); }
  double eval_left(double x) const override { return f_.eval_left((x - b_) / a_); }
  double log_eval(double x) const override { return f_.log_eval((x - b_) / a_); }
  double quantile(double u) const override { return a_ * f_.quantile(u) + b_; }
  double quantile_log(double lp) const override { return a_ * f_.quantile_log(lp) + b_; }
  bool has_atoms() const override { return f_.has_atoms(); }
  std::pair<double, double> support() const override {
    const auto s = f_.support();
    return {a_ * s.first + b_, a_ * s.second + b_};
  }
  void key_points(std::vector<double>& out) const override {
    for (double x : f_.key_points()) out.push_back(a_ * x + b_);
  }
  double next_key_point(double x) const override {
    const double c = f_.next_key_point((x - b_) / a_);
    return std::isfinite(c) ? a_ * c + b_ : kInf;
  }
  Cdf f_;
  double a_, b_;
};

NodePtr make_atomic_from_levels(std::vector<double> xs, std::vector<double> levels) {
  // drop zero-increment points; the final level must be exactly 1
  std::vector<double> oxs, olv;
  double prev = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (levels[i] > prev) {
      oxs.push_back(xs[i]);
      olv.push_back(levels[i]);
      prev = levels[i];
    }
  }
  require(!olv.empty() && olv.back() == 1.0, "atomic: levels must reach 1");
  return std::make_shared<AtomicNode>(std::move(oxs), std::move(olv));
}

std::vector<double> merged_key_points(const Cdf& f, const Cdf& g) {
  std::vector<double> xs = f.key_points();
  const std::vector<double> ys = g.key_points();
  xs.insert(xs.end(), ys.begin(), ys.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

bool is_step_kind(const Cdf& f) {
  return f.kind() == CdfKind::atomic || f.kind() == CdfKind::empirical_step;
}

bool is_continuous_pwl(const Cdf& f) {
  return f.kind() == CdfKind::piecewise_linear && f.eval(f.support().first) == 0.0;
}

}  // namespace

// --- Cdf wrapper -------------------------------------------------------------

Cdf Cdf::uniform(double a, double b) { return Cdf(std::make_shared<UniformNode>(a, b)); }
Cdf Cdf::gumbel(double loc, double scale) {
  return Cdf(std::make_shared<GumbelNode>(loc, scale));
}
Cdf Cdf::frechet(double alpha, double loc, double scale) {
  return Cdf(std::make_shared<FrechetNode>(alpha, loc, scale));
}
Cdf Cdf::weibull(double alpha, double loc, double scale) {
  return Cdf(std::make_shared<WeibullNode>(alpha, loc, scale));
}
Cdf Cdf::exponential(double rate) { return Cdf(std::make_shared<ExponentialNode>(rate)); }

Cdf Cdf::atomic(std::vector<std::pair<double, double>> points) {
  require(!points.empty(), "atomic: need at least one point");
  std::sort(points.begin(), points.end());
  std::vector<double> xs, levels;
  double acc = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(std::isfinite(points[i].first) && points[i].second > 0,
            "atomic: need finite points with positive masses");
    acc += points[i].second;
    if (!xs.empty() && points[i].first == xs.back())
      levels.back() = acc;  // merge duplicate atoms
    else {
      xs.push_back(points[i].first);
      levels.push_back(acc);
    }
  }
  require(std::fabs(acc - 1.0) <= 1e-9, "atomic: masses must sum to 1");
  levels.back() = 1.0;
  return Cdf(std::make_shared<AtomicNode>(std::move(xs), std::move(levels)));
}

Cdf Cdf::piecewise_linear(std::vector<double> xs, std::vector<double> ps) {
  require(xs.size() == ps.size() && xs.size() >= 2, "piecewise: need >= 2 breakpoints");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(std::isfinite(xs[i]), "piecewise: breakpoints must be finite");
    if (i) {
      require(xs[i] > xs[i - 1], "piecewise: x strictly increasing");
      require(ps[i] >= ps[i - 1], "piecewise: p non-decreasing");
    }
  }
  require(ps.front() >= 0.0, "piecewise: first p >= 0");
  require(std::fabs(ps.back() - 1.0) <= 1e-12, "piecewise: last p must be 1");
  ps.back() = 1.0;
  return Cdf(std::make_shared<PiecewiseNode>(std::move(xs), std::move(ps)));
}

CdfKind Cdf::kind() const { return node_->kind(); }
bool Cdf::has_atoms() const { return node_->has_atoms(); }
bool Cdf::is_analytic() const {
  switch (kind()) {
    case CdfKind::uniform:
    case CdfKind::gumbel:
    case CdfKind::frechet:
    case CdfKind::weibull:
    case CdfKind::exponential:
      return true;
    default:
      return false;
  }
}
std::pair<double, double> Cdf::support() const { return node_->support(); }
double Cdf::eval(double x) const { return node_->eval(x); }
double Cdf::eval_left(double x) const { return node_->eval_left(x); }
double Cdf::log_eval(double x) const { return node_->log_eval(x); }

double Cdf::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must be in (0,1)");
  return node_->quantile(u);
}

double Cdf::quantile_log(double lp) const {
  if (!(lp < 0.0)) throw std::domain_error("quantile_log: log u must be negative");
  return node_->quantile_log(lp);
}

void Cdf::eval_grid(std::span<const double> xs, std::span<double> out) const {
  node_->eval_grid(xs.data(), out.data(), xs.size());
}

double Cdf::next_key_point(double x) const { return node_->next_key_point(x); }

std::vector<double> Cdf::key_points() const {
  std::vector<double> out;
  node_->key_points(out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Cdf::FamilyParams> Cdf::analytic_params() const {
  switch (kind()) {
    case CdfKind::uniform: {
      const auto& n = static_cast<const UniformNode&>(*node_);
      return FamilyParams{kind(), n.a_, n.b_, 0};
    }
    case CdfKind::gumbel: {
      const auto& n = static_cast<const GumbelNode&>(*node_);
      return FamilyParams{kind(), n.loc_, n.scale_, 0};
    }
    case CdfKind::frechet: {
      const auto& n = static_cast<const FrechetNode&>(*node_);
      return FamilyParams{kind(), n.alpha_, n.loc_, n.scale_};
    }
    case CdfKind::weibull: {
      const auto& n = static_cast<const WeibullNode&>(*node_);
      return FamilyParams{kind(), n.alpha_, n.loc_, n.scale_};
    }
    case CdfKind::exponential: {
      const auto& n = static_cast<const ExponentialNode&>(*node_);
      return FamilyParams{kind(), n.rate_, 0, 0};
    }
    default:
      return std::nullopt;
  }
}

const std::vector<double>* Cdf::empirical_samples() const {
  if (kind() != CdfKind::empirical_step) return nullptr;
  return &static_cast<const EmpiricalNode&>(*node_).xs_;
}

// --- operations --------------------------------------------------------------

double cdf_eval(const Cdf& f, double x) {
  if (!std::isfinite(x)) throw std::domain_error("cdf_eval: x must be finite");
  return f.eval(x);
}

double quantile(const Cdf& f, double u) { return f.quantile(u); }

Cdf classical_max_conv(const Cdf& f, const Cdf& g) {
  if (is_step_kind(f) && is_step_kind(g)) {
    const auto xs = merged_key_points(f, g);
    std::vector<double> levels(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) levels[i] = f.eval(xs[i]) * g.eval(xs[i]);
    return Cdf(make_atomic_from_levels(xs, levels));
  }
  if (is_continuous_pwl(f) && is_continuous_pwl(g)) {
    // merged knots plus midpoints; the quadratic product pieces are sampled
    const auto knots = merged_key_points(f, g);
    std::vector<double> xs;
    xs.reserve(knots.size() * 2);
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (i) {
        const double mid = 0.5 * (knots[i - 1] + knots[i]);
        if (mid > xs.back() && mid < knots[i]) xs.push_back(mid);
      }
      xs.push_back(knots[i]);
    }
    std::vector<double> ps(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ps[i] = f.eval(xs[i]) * g.eval(xs[i]);
    return Cdf::piecewise_linear(std::move(xs), std::move(ps));
  }
  return Cdf(std::make_shared<ProductNode>(f, g));
}

Cdf free_max_conv(const Cdf& f, const Cdf& g) {
  if (f.kind() == CdfKind::empirical_step && g.kind() == CdfKind::empirical_step) {
    // Exact rank arithmetic: level at x is (i*m + j*n - n*m)^+ / (n*m) with
    // i, j the per-sample counts <= x. For equal sizes the result is itself
    // an empirical step law of n points.
    const auto& X = *f.empirical_samples();
    const auto& Y = *g.empirical_samples();
    const long long n = static_cast<long long>(X.size());
    const long long m = static_cast<long long>(Y.size());
    const auto xs = merged_key_points(f, g);
    std::vector<long long> num(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) {
      const long long i = std::upper_bound(X.begin(), X.end(), xs[t]) - X.begin();
      const long long j = std::upper_bound(Y.begin(), Y.end(), xs[t]) - Y.begin();
      num[t] = std::max(0ll, i * m + j * n - n * m);
    }
    if (n == m) {
      std::vector<double> out;
      out.reserve(n);
      long long prev = 0;
      for (std::size_t t = 0; t < xs.size(); ++t) {
        const long long cnt = num[t] / m;  // exact multiple of m by construction
        for (long long r = prev; r < cnt; ++r) out.push_back(xs[t]);
        prev = cnt;
      }
      return Cdf(std::make_shared<EmpiricalNode>(std::move(out)));
    }
    std::vector<double> levels(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t)
      levels[t] = double(num[t]) / double(n * m);
    return Cdf(make_atomic_from_levels(xs, levels));
  }
  if (is_step_kind(f) && is_step_kind(g)) {
    const auto xs = merged_key_points(f, g);
    std::vector<double> levels(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      levels[i] = std::max(0.0, f.eval(xs[i]) + g.eval(xs[i]) - 1.0);
    return Cdf(make_atomic_from_levels(xs, levels));
  }
  if (is_continuous_pwl(f) && is_continuous_pwl(g)) {
    // exact: F+G-1 is linear between merged knots; insert the zero crossing
    const auto knots = merged_key_points(f, g);
    std::vector<double> xs, ps;
    double prev_raw = -1.0, prev_x = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      const double raw = f.eval(knots[i]) + g.eval(knots[i]) - 1.0;
      if (i && prev_raw < 0.0 && raw > 0.0) {
        const double cross = prev_x + (-prev_raw) * (knots[i] - prev_x) / (raw - prev_raw);
        if (cross > xs.back() && cross < knots[i]) {
          xs.push_back(cross);
          ps.push_back(0.0);
        }
      }
      xs.push_back(knots[i]);
      ps.push_back(std::max(0.0, raw));
      prev_raw = raw;
      prev_x = knots[i];
    }
    return Cdf::piecewise_linear(std::move(xs), std::move(ps));
  }
  return Cdf(std::make_shared<FreeConvNode>(f, g));
}

Cdf free_max_conv_power(const Cdf& f, long long k) {
  if (k < 1) throw std::domain_error("free_max_conv_power: k must be >= 1");
  if (k == 1) return f;
  return Cdf(std::make_shared<FreePowerNode>(f, k));
}

Cdf lambda_vee(const Cdf& f) { return Cdf(std::make_shared<LambdaVeeNode>(f)); }

Cdf kth_root(const Cdf& f, long long k) {
  if (k < 1) throw std::domain_error("kth_root: k must be >= 1");
  if (k == 1) return f;
  return Cdf(std::make_shared<RootNode>(f, k));
}

Cdf affine_transform(const Cdf& f, double a, double b) {
  require(a > 0 && std::isfinite(a) && std::isfinite(b), "affine: need a > 0, b finite");
  if (const auto fp = f.analytic_params()) {
    switch (fp->kind) {
      case CdfKind::uniform:
        return Cdf::uniform(a * fp->p1 + b, a * fp->p2 + b);
      case CdfKind::gumbel:
        return Cdf::gumbel(a * fp->p1 + b, a * fp->p2);
      case CdfKind::frechet:
        return Cdf::frechet(fp->p1, a * fp->p2 + b, a * fp->p3);
      case CdfKind::weibull:
        return Cdf::weibull(fp->p1, a * fp->p2 + b, a * fp->p3);
      case CdfKind::exponential:
        if (b == 0.0) return Cdf::exponential(fp->p1 / a);
        break;
      default:
        break;
    }
  }
  if (f.kind() == CdfKind::empirical_step) {
    std::vector<double> xs = *f.empirical_samples();
    for (double& x : xs) x = a * x + b;
    return Cdf(std::make_shared<EmpiricalNode>(std::move(xs)));
  }
  if (f.kind() == CdfKind::atomic) {
    const auto& node = static_cast<const AtomicNode&>(f.node());
    std::vector<double> xs = node.xs_;
    for (double& x : xs) x = a * x + b;
    return Cdf(std::make_shared<AtomicNode>(std::move(xs), node.levels_));
  }
  if (f.kind() == CdfKind::piecewise_linear) {
    const auto& node = static_cast<const PiecewiseNode&>(f.node());
    std::vector<double> xs = node.xs_;
    for (double& x : xs) x = a * x + b;
    return Cdf(std::make_shared<PiecewiseNode>(std::move(xs), node.ps_));
  }
  return Cdf(std::make_shared<AffineNode>(f, a, b));
}

std::vector<double> sample(const Cdf& f, std::size_t n, RngStream& rng) {
  std::vector<double> out(n);
  if (n == 0) return out;
  rng.fill_uniform(out);
  for (double& v : out) v = f.node().quantile(v);
  return out;
}

Cdf empirical_cdf(std::vector<double> samples) {
  if (samples.empty()) throw std::domain_error("empirical_cdf: need samples");
  for (double s : samples) require(std::isfinite(s), "empirical_cdf: samples finite");
  std::sort(samples.begin(), samples.end());
  return Cdf(std::make_shared<EmpiricalNode>(std::move(samples)));
}

namespace {

void append_quantile_grid(const Cdf& f, std::vector<double>& pts) {
  for (int j = 1; j <= 9; ++j) {
    const double u = std::pow(10.0, -j);
    pts.push_back(f.quantile(u));
    pts.push_back(f.quantile(1.0 - u));
  }
  constexpr int m = 2048;
  for (int i = 1; i <= m; ++i) pts.push_back(f.quantile(double(i) / (m + 1)));
}

}  // namespace

double ks_distance(const Cdf& f, const Cdf& g) {
  std::vector<double> pts = merged_key_points(f, g);
  append_quantile_grid(f, pts);
  append_quantile_grid(g, pts);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double d = 0.0;
  for (double x : pts) {
    d = std::max(d, std::fabs(f.eval(x) - g.eval(x)));
    d = std::max(d, std::fabs(f.eval_left(x) - g.eval_left(x)));
  }
  return d;
}

double quantile_sup_distance(const Cdf& f, const Cdf& g) {
  double sup = 0.0;
  // geometric tail grids; track whether the sup sits at a still-growing tail
  double lo_tail[10], hi_tail[10];
  for (int j = 1; j <= 9; ++j) {
    const double u = std::pow(10.0, -j);
    lo_tail[j] = std::fabs(f.quantile(u) - g.quantile(u));
    hi_tail[j] = std::fabs(f.quantile(1.0 - u) - g.quantile(1.0 - u));
    sup = std::max({sup, lo_tail[j], hi_tail[j]});
  }
  constexpr int m = 10000;
  for (int i = 1; i <= m; ++i) {
    const double u = double(i) / (m + 1);
    sup = std::max(sup, std::fabs(f.quantile(u) - g.quantile(u)));
  }
  const double slack = 1e-9 * (1.0 + sup);
  const bool lo_grows =
      lo_tail[9] >= sup && lo_tail[9] > lo_tail[8] + slack && lo_tail[8] > lo_tail[7] + slack;
  const bool hi_grows =
      hi_tail[9] >= sup && hi_tail[9] > hi_tail[8] + slack && hi_tail[8] > hi_tail[7] + slack;
  if (lo_grows || hi_grows) return kInf;
  return sup;
}

Cdf smooth_approx(const Cdf& f, double eps) {
  if (!(eps > 0) || !std::isfinite(eps))
    throw std::domain_error("smooth_approx: eps must be positive");
  const double qlo = f.quantile(1e-9);
  const double qhi = f.quantile(1.0 - 1e-9);
  const double k0 = std::floor(qlo / eps) - 1.0;
  const double k1 = std::ceil(qhi / eps) + 1.0;
  const double count = k1 - k0 + 1.0;
  if (!(count >= 2) || count > 2e7)
    throw std::domain_error("smooth_approx: eps too small for the support span");
  std::vector<double> xs, ps;
  xs.reserve(std::size_t(count));
  ps.reserve(std::size_t(count));
  for (double k = k0; k <= k1; k += 1.0) {
    xs.push_back(k * eps);
    ps.push_back(f.eval(k * eps));
  }
  // close the tails; introduces <= 1e-9 sandwich slack at the span ends
  ps.front() = 0.0;
  ps.back() = 1.0;
  for (std::size_t i = 1; i < ps.size(); ++i) ps[i] = std::max(ps[i], ps[i - 1]);
  return Cdf::piecewise_linear(std::move(xs), std::move(ps));
}

Cdf to_piecewise_linear(const Cdf& f, std::size_t breakpoints) {
  require(breakpoints >= 2, "to_piecewise_linear: need >= 2 breakpoints");
  const double ulo = 1e-6, uhi = 1.0 - 1e-6;
  std::vector<double> xs, ps;
  for (std::size_t i = 0; i < breakpoints; ++i) {
    const double u = ulo + (uhi - ulo) * double(i) / double(breakpoints - 1);
    const double x = f.quantile(u);
    if (!xs.empty() && x <= xs.back()) {
      ps.back() = u;  // collapse flat quantile stretches, keep the top level
      continue;
    }
    xs.push_back(x);
    ps.push_back(u);
  }
  const double xend = std::max(f.quantile(1.0 - 1e-9), std::nextafter(xs.back(), kInf));
  xs.push_back(xend);
  ps.push_back(1.0);
  return Cdf::piecewise_linear(std::move(xs), std::move(ps));
}

}  // namespace freemax
