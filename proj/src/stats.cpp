#include "freemax/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace freemax {

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::domain_error("two_sample_ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(double(i) / na - double(j) / nb));
  }
  return d;
}

double ks_vs_cdf(std::vector<double> samples, const Cdf& f) {
  if (samples.empty()) throw std::domain_error("ks_vs_cdf: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double fx = f.eval(samples[i]);
    d = std::max(d, std::max(double(i + 1) / n - fx, fx - double(i) / n));
  }
  for (double t : f.key_points()) {
    const auto hi = std::upper_bound(samples.begin(), samples.end(), t) - samples.begin();
    const auto lo = std::lower_bound(samples.begin(), samples.end(), t) - samples.begin();
    d = std::max(d, std::fabs(double(hi) / n - f.eval(t)));
    d = std::max(d, std::fabs(double(lo) / n - f.eval_left(t)));
  }
  return d;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (double(i) + double(j)) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::domain_error("spearman: size mismatch");
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double mean = 0.5 * (double(a.size()) + 1.0);
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - mean) * (rb[i] - mean);
    da += (ra[i] - mean) * (ra[i] - mean);
    db += (rb[i] - mean) * (rb[i] - mean);
  }
  if (da == 0 || db == 0) return 0.0;
  return num / std::sqrt(da * db);
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::domain_error("median: empty");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= double(v.size());
  for (double x : v) s.variance += (x - s.mean) * (x - s.mean);
  s.variance /= double(v.size());
  return s;
}

}  // namespace freemax
