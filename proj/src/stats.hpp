#pragma once

#include <string>
#include <vector>

namespace citequal {

double mean(const std::vector<double>& x);
// Unbiased (n-1) sample variance; requires n >= 2.
double sample_variance(const std::vector<double>& x);

// Linear-interpolation quantile (R type 7): h = (n-1)p, interpolate between
// the floor(h)-th and next order statistics. p in [0,1], x non-empty.
double quantile_type7(std::vector<double> x, double p);

// Product-moment correlation; errors when either side has zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// 1 - RSS/TSS; may be negative. Errors when var(y_true) == 0.
double r_squared(const std::vector<double>& y_true, const std::vector<double>& y_pred);

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
double reg_incomplete_beta(double a, double b, double x);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Unequal-variance t statistic t = (mean(x)-mean(y))/sqrt(sx2/n + sy2/m)
// with Welch-Satterthwaite degrees of freedom; two-sided p via the
// regularized incomplete beta. Errors when both variances are zero.
WelchResult welch_t(const std::vector<double>& x, const std::vector<double>& y);

struct CohensD {
  double d = 0.0;
  std::string label;  // negligible | small | medium | large (bands 0.2/0.5/0.8)
};

// Standardized mean difference with pooled standard deviation
// s_p = sqrt(((n-1)sx2 + (m-1)sy2)/(n+m-2)). Errors when s_p == 0.
CohensD cohens_d(const std::vector<double>& x, const std::vector<double>& y);

struct BonferroniResult {
  double alpha_corrected = 0.0;         // alpha / m
  std::vector<bool> significant;        // p_i <= alpha_corrected
  std::vector<double> p_adjusted;       // min(1, m * p_i)
};

BonferroniResult bonferroni(const std::vector<double>& p_values, double alpha);

}  // namespace citequal
