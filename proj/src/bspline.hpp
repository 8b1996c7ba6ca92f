#pragma once

#include <Eigen/Dense>
#include <vector>

namespace citequal {

// Clamped cubic B-spline basis on [lo, hi] with quantile-placed interior
// knots. `dim` basis functions; the full knot vector has dim + 4 entries with
// 4-fold boundary knots. Rows of the evaluation matrix sum to 1 inside the
// range (partition of unity). Outside [lo, hi] evaluation continues the
// boundary value linearly (first-order Taylor at the boundary), so the
// represented function never explodes cubically on unseen data.
class BsplineBasis {
 public:
  // `values` supplies the range and the interior knot quantiles; requires at
  // least `dim` distinct values and dim >= 4.
  static BsplineBasis from_quantiles(const std::vector<double>& values, int dim);

  // Rebuild from a stored knot vector (4-fold clamped ends, strictly
  // increasing interior); dim = knots.size() - 4.
  static BsplineBasis from_knots(std::vector<double> knots);

  int dim() const { return dim_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& knots() const { return knots_; }

  // Basis row with linear extrapolation outside [lo, hi].
  Eigen::RowVectorXd row(double x) const;
  // d-th derivative row (d <= 2) at a point inside [lo, hi] (clamped).
  Eigen::RowVectorXd derivative_row(double x, int order) const;

  Eigen::MatrixXd matrix(const std::vector<double>& xs) const;

  // P with c'Pc = integral over [lo,hi] of (f'')^2 for f = sum c_a B_a.
  // Exact: the integrand is piecewise quadratic, integrated per knot span
  // with 2-point Gauss-Legendre.
  Eigen::MatrixXd penalty() const;

  // Greville abscissae: coefficients c_a = greville[a] reproduce f(x) = x.
  std::vector<double> greville() const;

 private:
  int dim_ = 0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> knots_;  // size dim_ + 4

  int span_of(double x) const;
  // ders(d, j) = d-th derivative of basis function (span - 3 + j), d <= max_order.
  void ders_at(double x, int max_order, double ders[3][4]) const;
};

}  // namespace citequal
