#include "bspline.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "stats.hpp"

namespace citequal {

namespace {
constexpr int kDegree = 3;  // cubic
}

BsplineBasis BsplineBasis::from_quantiles(const std::vector<double>& values, int dim) {
  if (dim < 4) fail(ErrorKind::invalid_argument, "basis_dim must be >= 4");
  std::vector<double> uniq(values);
  for (double v : uniq)
    if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "non-finite basis input");
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (static_cast<int>(uniq.size()) < dim)
    fail(ErrorKind::invalid_argument,
         "only " + std::to_string(uniq.size()) + " distinct values for basis_dim " +
             std::to_string(dim) + "; lower basis_dim");

  BsplineBasis b;
  b.dim_ = dim;
  b.lo_ = uniq.front();
  b.hi_ = uniq.back();
  int interior = dim - 4;
  b.knots_.assign(4, b.lo_);
  for (int j = 1; j <= interior; ++j) {
    double p = static_cast<double>(j) / static_cast<double>(interior + 1);
    b.knots_.push_back(quantile_type7(uniq, p));
  }
  b.knots_.insert(b.knots_.end(), 4, b.hi_);
  for (std::size_t i = 4; i + 4 <= b.knots_.size(); ++i)
    if (!(b.knots_[i] > b.knots_[i - 1]))
      fail(ErrorKind::internal, "interior knots not strictly increasing");
  return b;
}

BsplineBasis BsplineBasis::from_knots(std::vector<double> knots) {
  if (knots.size() < 8) fail(ErrorKind::invalid_argument, "knot vector too short");
  BsplineBasis b;
  b.dim_ = static_cast<int>(knots.size()) - 4;
  b.lo_ = knots.front();
  b.hi_ = knots.back();
  for (int i = 1; i < 4; ++i) {
    if (knots[static_cast<std::size_t>(i)] != b.lo_ ||
        knots[knots.size() - 1 - static_cast<std::size_t>(i)] != b.hi_)
      fail(ErrorKind::invalid_argument, "knot vector is not 4-fold clamped");
  }
  for (std::size_t i = 4; i + 4 <= knots.size(); ++i)
    if (!(knots[i] > knots[i - 1]))
      fail(ErrorKind::invalid_argument, "interior knots not strictly increasing");
  b.knots_ = std::move(knots);
  return b;
}

int BsplineBasis::span_of(double x) const {
  // Span i satisfies knots[i] <= x < knots[i+1]; the right boundary maps to
  // the last nonempty span.
  if (x >= knots_[static_cast<std::size_t>(dim_)]) return dim_ - 1;
  if (x <= knots_[kDegree]) return kDegree;
  auto it = std::upper_bound(knots_.begin() + kDegree,
                             knots_.begin() + static_cast<std::ptrdiff_t>(dim_), x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

// Derivatives of the 4 nonzero cubic basis functions at x (NURBS book A2.3).
void BsplineBasis::ders_at(double x, int max_order, double ders[3][4]) const {
  int span = span_of(x);
  const double* U = knots_.data();
  double ndu[4][4];
  double left[4], right[4];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = x - U[span + 1 - j];
    right[j] = U[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= kDegree; ++j) ders[0][j] = ndu[j][kDegree];

  double a[2][4];
  for (int r = 0; r <= kDegree; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= max_order; ++k) {
      double d = 0.0;
      int rk = r - k, pk = kDegree - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      int j1 = rk >= -1 ? 1 : -rk;
      int j2 = r - 1 <= pk ? k - 1 : kDegree - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  double factor = kDegree;
  for (int k = 1; k <= max_order; ++k) {
    for (int j = 0; j <= kDegree; ++j) ders[k][j] *= factor;
    factor *= kDegree - k;
  }
}

Eigen::RowVectorXd BsplineBasis::derivative_row(double x, int order) const {
  if (order < 0 || order > 2) fail(ErrorKind::invalid_argument, "derivative order must be <= 2");
  double xc = std::clamp(x, lo_, hi_);
  double ders[3][4];
  ders_at(xc, order, ders);
  int span = span_of(xc);
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim_);
  for (int j = 0; j <= kDegree; ++j) row(span - kDegree + j) = ders[order][j];
  return row;
}

Eigen::RowVectorXd BsplineBasis::row(double x) const {
  if (x < lo_) return derivative_row(lo_, 0) + (x - lo_) * derivative_row(lo_, 1);
  if (x > hi_) return derivative_row(hi_, 0) + (x - hi_) * derivative_row(hi_, 1);
  return derivative_row(x, 0);
}

Eigen::MatrixXd BsplineBasis::matrix(const std::vector<double>& xs) const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), dim_);
  for (std::size_t i = 0; i < xs.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = row(xs[i]);
  return m;
}

Eigen::MatrixXd BsplineBasis::penalty() const {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim_, dim_);
  // (f'')^2 is quadratic per span for a cubic spline; 2-point Gauss-Legendre
  // integrates cubics exactly.
  const double g = 1.0 / std::sqrt(3.0);
  for (int i = kDegree; i <= dim_ - 1; ++i) {
    double a = knots_[static_cast<std::size_t>(i)];
    double b = knots_[static_cast<std::size_t>(i) + 1];
    if (!(b > a)) continue;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (double xi : {mid - half * g, mid + half * g}) {
      Eigen::RowVectorXd d2 = derivative_row(xi, 2);
      p.noalias() += half * d2.transpose() * d2;
    }
  }
  return p;
}

std::vector<double> BsplineBasis::greville() const {
  std::vector<double> g(static_cast<std::size_t>(dim_));
  for (int a = 0; a < dim_; ++a)
    g[static_cast<std::size_t>(a)] = (knots_[static_cast<std::size_t>(a) + 1] +
                                      knots_[static_cast<std::size_t>(a) + 2] +
                                      knots_[static_cast<std::size_t>(a) + 3]) /
                                     3.0;
  return g;
}

}  // namespace citequal
