#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "stats.hpp"

using namespace citequal;

namespace {

// Independent oracle: regularized incomplete beta by adaptive Simpson
// quadrature of the already-normalized density (evaluated in log space so
// the tolerance is absolute in the final answer). The substitution t = u^2
// removes the t^(a-1) endpoint singularity for a >= 1/2; the symmetry branch
// keeps the other endpoint away from the (1-t)^(b-1) singularity.
template <typename F>
double simpson(const F& f, double lo, double hi, double flo, double fmid, double fhi,
               double tol, int depth) {
  double mid = 0.5 * (lo + hi);
  double fl = f(0.5 * (lo + mid));
  double fr = f(0.5 * (mid + hi));
  double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
  double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, lo, mid, flo, fl, fmid, tol / 2, depth - 1) +
         simpson(f, mid, hi, fmid, fr, fhi, tol / 2, depth - 1);
}

double betainc_quadrature(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > a / (a + b)) return 1.0 - betainc_quadrature(b, a, 1.0 - x);
  double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto density = [&](double u) {
    // 2 u^(2a-1) (1-u^2)^(b-1) / B(a,b)
    if (u <= 0.0) return a == 0.5 ? 2.0 / std::exp(log_beta) : 0.0;
    return std::exp(std::log(2.0) + (2.0 * a - 1.0) * std::log(u) +
                    (b - 1.0) * std::log1p(-u * u) - log_beta);
  };
  double hi = std::sqrt(x);
  return simpson(density, 0.0, hi, density(0.0), density(hi / 2), density(hi), 1e-13, 48);
}

std::vector<double> spread_sample(double center, double half_spread, int n) {
  // n/2 copies of center - h and center + h: sample variance n h^2 / (n-1).
  std::vector<double> v;
  for (int i = 0; i < n / 2; ++i) v.push_back(center - half_spread);
  for (int i = 0; i < n / 2; ++i) v.push_back(center + half_spread);
  return v;
}

}  // namespace

TEST_CASE("mean and sample variance") {
  CHECK(mean({1.0, 2.0, 3.0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sample_variance({1.0, 2.0, 3.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(sample_variance({1.0}), Error);
}

TEST_CASE("type-7 quantile") {
  std::vector<double> v;
  for (int i = 1; i <= 20; ++i) v.push_back(i);
  CHECK(quantile_type7(v, 0.95) == doctest::Approx(19.05).epsilon(1e-12));
  CHECK(quantile_type7(v, 0.0) == 1.0);
  CHECK(quantile_type7(v, 1.0) == 20.0);
  CHECK(quantile_type7({3.0, 1.0, 2.0}, 0.5) == doctest::Approx(2.0));
  // order invariance
  std::vector<double> shuffled = {7, 3, 19, 1, 12, 20, 4, 9, 15, 2,
                                  6, 18, 10, 5, 13, 8, 16, 11, 17, 14};
  CHECK(quantile_type7(shuffled, 0.95) == doctest::Approx(19.05).epsilon(1e-12));
  CHECK_THROWS_AS(quantile_type7({}, 0.5), Error);
  CHECK_THROWS_AS(quantile_type7({1.0}, -0.1), Error);
}

TEST_CASE("pearson endpoints and fixture") {
  std::vector<double> x = {1.0, 2.0, 3.0};
  CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> nx = {-1.0, -2.0, -3.0};
  CHECK(pearson(x, nx) == doctest::Approx(-1.0).epsilon(1e-15));
  // frozen: scipy.stats.pearsonr([1,2,3],[2,4,7]) = 0.9933992677987828
  CHECK(pearson(x, {2.0, 4.0, 7.0}) ==
        doctest::Approx(0.9933992677987828).epsilon(1e-12));
}

TEST_CASE("pearson degenerate input errors") {
  CHECK_THROWS_AS(pearson({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), Error);
  CHECK_THROWS_AS(pearson({1.0, 2.0}, {5.0, 5.0}), Error);
  CHECK_THROWS_AS(pearson({1.0}, {1.0}), Error);
  CHECK_THROWS_AS(pearson({1.0, 2.0}, {1.0, 2.0, 3.0}), Error);
}

TEST_CASE("r squared") {
  std::vector<double> y = {0.0, 1.0, 2.0};
  CHECK(r_squared(y, y) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> at_mean = {1.0, 1.0, 1.0};
  CHECK(r_squared(y, at_mean) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r_squared(y, {0.0, 1.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r_squared({0.0, 4.0}, {4.0, 0.0}) < 0.0);
  CHECK_THROWS_AS(r_squared({2.0, 2.0}, {1.0, 3.0}), Error);
}

TEST_CASE("regularized incomplete beta against frozen references") {
  // frozen: scipy.special.betainc
  CHECK(reg_incomplete_beta(0.5, 0.5, 0.3) ==
        doctest::Approx(0.36901011956554536).epsilon(1e-13));
  CHECK(reg_incomplete_beta(2.0, 3.0, 0.7) == doctest::Approx(0.9163).epsilon(1e-13));
  CHECK(reg_incomplete_beta(9.0, 0.5, 0.95) ==
        doctest::Approx(0.34328958321110953).epsilon(1e-13));
  CHECK(reg_incomplete_beta(5.0, 5.0, 0.5) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(reg_incomplete_beta(1.0, 1.0, 0.25) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(reg_incomplete_beta(2.0, 2.0, 0.0) == 0.0);
  CHECK(reg_incomplete_beta(2.0, 2.0, 1.0) == 1.0);
}

TEST_CASE("regularized incomplete beta against quadrature oracle") {
  Rng rng(20240817);
  for (int i = 0; i < 200; ++i) {
    double a = 0.5 + 20.0 * rng.unit();
    double b = 0.5 + 20.0 * rng.unit();
    double x = rng.unit();
    double got = reg_incomplete_beta(a, b, x);
    double want = betainc_quadrature(a, b, x);
    CHECK(std::abs(got - want) < 1e-10);
  }
}

TEST_CASE("welch identical samples") {
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  WelchResult r = welch_t(x, x);
  CHECK(r.t == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.p == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("welch irregular fixture") {
  // frozen: scipy.stats.ttest_ind([2,4,6,8,10],[1,2,3,4,5], equal_var=False)
  WelchResult r = welch_t({2, 4, 6, 8, 10}, {1, 2, 3, 4, 5});
  CHECK(r.t == doctest::Approx(1.8973665961010275).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(5.882352941176471).epsilon(1e-12));
  CHECK(r.p == doctest::Approx(0.10753119493062718).epsilon(1e-11));
}

TEST_CASE("welch canonical unit-variance fixture") {
  // means 10 and 9, both sample variances 1, n = m = 100:
  // t = 1/sqrt(0.02) = sqrt(50), df = 198.
  // frozen: scipy gives p = 2.5806165219366507e-11.
  double c = std::sqrt(99.0) / 10.0;
  std::vector<double> x = spread_sample(10.0, c, 100);
  std::vector<double> y = spread_sample(9.0, c, 100);
  WelchResult r = welch_t(x, y);
  CHECK(r.t == doctest::Approx(7.0710678118654755).epsilon(1e-9));
  CHECK(r.df == doctest::Approx(198.0).epsilon(1e-9));
  CHECK(std::abs(r.p - 2.5806165219366507e-11) < 1e-13);
}

TEST_CASE("welch antisymmetry") {
  std::vector<double> x = {3.0, 5.0, 9.0, 2.0};
  std::vector<double> y = {1.0, 4.0, 2.0, 2.5, 0.5};
  WelchResult a = welch_t(x, y);
  WelchResult b = welch_t(y, x);
  CHECK(a.t == doctest::Approx(-b.t).epsilon(1e-14));
  CHECK(a.p == doctest::Approx(b.p).epsilon(1e-14));
  CHECK(a.df == doctest::Approx(b.df).epsilon(1e-14));
}

TEST_CASE("welch error contracts") {
  CHECK_THROWS_AS(welch_t({1.0}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(welch_t({2.0, 2.0}, {3.0, 3.0}), Error);  // both variances zero
  // one-sided zero variance is fine
  WelchResult r = welch_t({2.0, 2.0}, {1.0, 3.0});
  CHECK(std::isfinite(r.t));
}

TEST_CASE("cohens d canonical fixture") {
  // means 10 and 9, both sample variances 1, n = m = 50: s_p = 1, d = 1.
  double c = std::sqrt(49.0 / 50.0);
  std::vector<double> x = spread_sample(10.0, c, 50);
  std::vector<double> y = spread_sample(9.0, c, 50);
  CohensD d = cohens_d(x, y);
  CHECK(d.d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.label == "large");
}

TEST_CASE("cohens d equal means and scale invariance") {
  std::vector<double> x = {1.0, 2.0, 3.0};
  std::vector<double> y = {3.0, 2.0, 1.0};
  CohensD d0 = cohens_d(x, y);
  CHECK(d0.d == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(d0.label == "negligible");

  std::vector<double> a = {3.0, 7.0, 4.0, 9.0};
  std::vector<double> b = {1.0, 2.0, 5.0};
  double base = cohens_d(a, b).d;
  for (double& v : a) v *= 3.5;
  for (double& v : b) v *= 3.5;
  CHECK(cohens_d(a, b).d == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("cohens d effect bands") {
  auto d_of = [](double delta) {
    // unit pooled sd via the +/-c construction
    double c = std::sqrt(49.0 / 50.0);
    return cohens_d(spread_sample(delta, c, 50), spread_sample(0.0, c, 50));
  };
  CHECK(d_of(0.19).label == "negligible");
  CHECK(d_of(0.21).label == "small");
  CHECK(d_of(0.49).label == "small");
  CHECK(d_of(0.51).label == "medium");
  CHECK(d_of(0.79).label == "medium");
  CHECK(d_of(0.81).label == "large");
  CHECK(d_of(-0.9).label == "large");  // bands use |d|
}

TEST_CASE("cohens d error contracts") {
  CHECK_THROWS_AS(cohens_d({1.0}, {2.0}), Error);           // n + m < 3
  CHECK_THROWS_AS(cohens_d({2.0, 2.0}, {2.0, 2.0}), Error);  // s_p == 0
}

TEST_CASE("bonferroni") {
  BonferroniResult one = bonferroni({0.03}, 0.05);
  CHECK(one.alpha_corrected == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(one.significant[0]);

  std::vector<double> ps = {0.004, 0.005, 0.006, 0.2, 0.5, 0.9, 0.001, 0.05, 0.3, 0.7};
  BonferroniResult r = bonferroni(ps, 0.05);
  CHECK(r.alpha_corrected == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(r.significant[0]);
  CHECK(r.significant[1]);  // boundary: p == alpha/m counts
  CHECK_FALSE(r.significant[2]);
  CHECK(r.p_adjusted[0] == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(r.p_adjusted[5] == 1.0);  // clamped

  // the four-subset, four-window family: m = C(4,2) * 4 = 24
  std::vector<double> family(24, 0.5);
  CHECK(bonferroni(family, 0.05).alpha_corrected ==
        doctest::Approx(0.05 / 24.0).epsilon(1e-15));

  CHECK_THROWS_AS(bonferroni({}, 0.05), Error);
  CHECK_THROWS_AS(bonferroni({0.5}, 0.0), Error);
  CHECK_THROWS_AS(bonferroni({0.5}, 1.5), Error);
  CHECK_THROWS_AS(bonferroni({1.5}, 0.05), Error);
}

TEST_CASE("random-input recomputation oracle") {
  Rng rng(99173);
  for (int rep = 0; rep < 200; ++rep) {
    int n = 3 + static_cast<int>(rng.below(40));
    int m = 3 + static_cast<int>(rng.below(40));
    std::vector<double> x(n), y(m);
    for (double& v : x) v = 10.0 * rng.normal() + 2.0;
    for (double& v : y) v = 8.0 * rng.normal() - 1.0;

    // direct two-pass recomputation, written independently of the library
    auto avg = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double t : v) s += t;
      return s / static_cast<double>(v.size());
    };
    auto var = [&](const std::vector<double>& v) {
      double mu = avg(v), s = 0.0;
      for (double t : v) s += (t - mu) * (t - mu);
      return s / static_cast<double>(v.size() - 1);
    };

    double sx2 = var(x), sy2 = var(y);
    double se2 = sx2 / n + sy2 / m;
    double t_direct = (avg(x) - avg(y)) / std::sqrt(se2);
    double df_direct = se2 * se2 /
                       (sx2 * sx2 / (static_cast<double>(n) * n * (n - 1)) +
                        sy2 * sy2 / (static_cast<double>(m) * m * (m - 1)));
    WelchResult w = welch_t(x, y);
    CHECK(std::abs(w.t - t_direct) < 1e-10);
    CHECK(std::abs(w.df - df_direct) < 1e-10);
    double p_direct =
        betainc_quadrature(df_direct / 2.0, 0.5, df_direct / (df_direct + t_direct * t_direct));
    CHECK(std::abs(w.p - p_direct) < 1e-10);

    double sp = std::sqrt(((n - 1) * sx2 + (m - 1) * sy2) / (n + m - 2));
    CHECK(std::abs(cohens_d(x, y).d - (avg(x) - avg(y)) / sp) < 1e-10);

    // pearson over paired prefixes
    int k = std::min(n, m);
    std::vector<double> xa(x.begin(), x.begin() + k), ya(y.begin(), y.begin() + k);
    double mx = avg(xa), my = avg(ya);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < k; ++i) {
      sxy += (xa[i] - mx) * (ya[i] - my);
      sxx += (xa[i] - mx) * (xa[i] - mx);
      syy += (ya[i] - my) * (ya[i] - my);
    }
    CHECK(std::abs(pearson(xa, ya) - sxy / std::sqrt(sxx * syy)) < 1e-10);

    double rss = 0.0, tss = 0.0;
    for (int i = 0; i < k; ++i) {
      rss += (xa[i] - ya[i]) * (xa[i] - ya[i]);
      tss += (xa[i] - mx) * (xa[i] - mx);
    }
    CHECK(std::abs(r_squared(xa, ya) - (1.0 - rss / tss)) < 1e-10);
  }
}
