#pragma once

#include <vector>

#include "freemax/cdf.hpp"

namespace freemax {

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b| between empirical
// CDFs of the two samples (inputs need not be sorted).
double two_sample_ks(std::vector<double> a, std::vector<double> b);

// One-sample KS statistic between the empirical CDF of the sample and F,
// including F's own jump points in the scan.
double ks_vs_cdf(std::vector<double> samples, const Cdf& f);

double median(std::vector<double> v);

// average ranks (ties share the mean rank), 1-based
std::vector<double> ranks(const std::vector<double>& v);

// Spearman rank correlation between two coordinates of a sample
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct Summary {
  double mean = 0;
  double variance = 0;  // population variance
};
Summary summarize(const std::vector<double>& v);

}  // namespace freemax
