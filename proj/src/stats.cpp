#include "stats.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace citequal {

namespace {

void check_pair(const std::vector<double>& x, const std::vector<double>& y,
                std::size_t min_each) {
  if (x.size() != y.size()) fail(ErrorKind::invalid_argument, "vector length mismatch");
  if (x.size() < min_each)
    fail(ErrorKind::invalid_argument,
         "need at least " + std::to_string(min_each) + " observations");
  for (double v : x)
    if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "non-finite value");
  for (double v : y)
    if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "non-finite value");
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  fail(ErrorKind::internal, "incomplete beta continued fraction did not converge");
}

}  // namespace

double mean(const std::vector<double>& x) {
  if (x.empty()) fail(ErrorKind::invalid_argument, "mean of empty vector");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) fail(ErrorKind::invalid_argument, "variance needs at least 2 observations");
  double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double quantile_type7(std::vector<double> x, double p) {
  if (x.empty()) fail(ErrorKind::invalid_argument, "quantile of empty vector");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::invalid_argument, "quantile p outside [0,1]");
  std::sort(x.begin(), x.end());
  double h = static_cast<double>(x.size() - 1) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= x.size()) return x.back();
  double frac = h - static_cast<double>(lo);
  return x[lo] + frac * (x[lo + 1] - x[lo]);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  check_pair(x, y, 2);
  double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    fail(ErrorKind::domain, "pearson undefined for zero-variance input");
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double r_squared(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
  check_pair(y_true, y_pred, 2);
  double m = mean(y_true);
  double rss = 0.0, tss = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    rss += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    tss += (y_true[i] - m) * (y_true[i] - m);
  }
  if (tss == 0.0) fail(ErrorKind::domain, "r_squared undefined for zero-variance target");
  return 1.0 - rss / tss;
}

double reg_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) fail(ErrorKind::invalid_argument, "beta parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::invalid_argument, "beta argument outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                     a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

WelchResult welch_t(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2 || y.size() < 2)
    fail(ErrorKind::invalid_argument, "welch_t needs at least 2 observations per sample");
  auto n = static_cast<double>(x.size());
  auto m = static_cast<double>(y.size());
  double vx = sample_variance(x), vy = sample_variance(y);
  if (vx == 0.0 && vy == 0.0)
    fail(ErrorKind::domain, "welch_t undefined when both samples have zero variance");
  double se2 = vx / n + vy / m;
  WelchResult r;
  r.t = (mean(x) - mean(y)) / std::sqrt(se2);
  double num = se2 * se2;
  double den = (vx / n) * (vx / n) / (n - 1.0) + (vy / m) * (vy / m) / (m - 1.0);
  r.df = num / den;
  // Two-sided p for Student's t: P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
  r.p = reg_incomplete_beta(r.df / 2.0, 0.5, r.df / (r.df + r.t * r.t));
  return r;
}

CohensD cohens_d(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() + y.size() < 3)
    fail(ErrorKind::invalid_argument, "cohens_d needs at least 3 observations in total");
  if (x.empty() || y.empty()) fail(ErrorKind::invalid_argument, "cohens_d needs two samples");
  auto n = static_cast<double>(x.size());
  auto m = static_cast<double>(y.size());
  double vx = x.size() >= 2 ? sample_variance(x) : 0.0;
  double vy = y.size() >= 2 ? sample_variance(y) : 0.0;
  double pooled = ((n - 1.0) * vx + (m - 1.0) * vy) / (n + m - 2.0);
  if (pooled <= 0.0) fail(ErrorKind::domain, "cohens_d undefined for zero pooled variance");
  CohensD r;
  r.d = (mean(x) - mean(y)) / std::sqrt(pooled);
  double a = std::fabs(r.d);
  r.label = a < 0.2 ? "negligible" : a < 0.5 ? "small" : a < 0.8 ? "medium" : "large";
  return r;
}

BonferroniResult bonferroni(const std::vector<double>& p_values, double alpha) {
  if (p_values.empty()) fail(ErrorKind::invalid_argument, "bonferroni needs at least one p-value");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::invalid_argument, "alpha outside (0,1)");
  auto m = static_cast<double>(p_values.size());
  BonferroniResult r;
  r.alpha_corrected = alpha / m;
  r.significant.reserve(p_values.size());
  r.p_adjusted.reserve(p_values.size());
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::invalid_argument, "p-value outside [0,1]");
    r.significant.push_back(p <= r.alpha_corrected);
    r.p_adjusted.push_back(std::min(1.0, m * p));
  }
  return r;
}

}  // namespace citequal
