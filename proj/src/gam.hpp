#pragma once

#include <Eigen/Dense>
#include <map>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "bspline.hpp"

namespace citequal {

struct FeatureTable {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // rows x names.size()

  Eigen::Index rows() const { return values.rows(); }
  // Errors if the column is absent.
  Eigen::Index column(const std::string& name) const;
  std::vector<double> column_vector(Eigen::Index j) const;
  FeatureTable select_rows(const std::vector<int>& idx) const;
  FeatureTable select_columns(const std::vector<std::string>& cols) const;
};

struct FitSpec {
  int basis_dim = 10;         // per main-effect smooth
  int tensor_basis_dim = 5;   // per interaction margin
  bool include_interactions = true;
  double lambda_smooth = 1.0;
  double lambda_tensor = 1.0;
  std::map<std::string, int> basis_dim_override;      // per-feature
  std::map<std::string, double> lambda_override;      // per-feature smooth lambda

  void validate() const;
  int basis_dim_for(const std::string& feature) const;
  double lambda_for(const std::string& feature) const;
};

struct SmoothTerm {
  std::string feature;
  BsplineBasis basis;
  Eigen::VectorXd coef;  // expanded basis coefficients; sums to zero over training data
  double lambda = 0.0;
};

// Fallback for features with fewer than 4 distinct values, where a cubic
// spline basis cannot exist: a centered unpenalized linear effect.
struct LinearTerm {
  std::string feature;
  double center = 0.0;
  double slope = 0.0;
};

struct TensorTerm {
  std::string feature_a;
  std::string feature_b;
  BsplineBasis basis_a;
  BsplineBasis basis_b;
  Eigen::MatrixXd coef;  // dim_a x dim_b; f(x,y) = row_a(x) * coef * row_b(y)'
  double lambda = 0.0;
};

struct FitDiagnostics {
  double rss = 0.0;
  double residual_variance = 0.0;
  double edf = 0.0;  // trace of the penalized hat matrix
  std::int64_t n_train = 0;
};

struct GamModel {
  double intercept = 0.0;
  std::vector<SmoothTerm> smooths;
  std::vector<LinearTerm> linears;
  std::vector<TensorTerm> tensors;
  std::vector<std::string> feature_names;         // fit-time column order
  std::vector<std::string> dropped_features;      // single-valued columns
  std::vector<std::string> skipped_interactions;  // pairs lacking two spline margins
  FitDiagnostics diagnostics;
  FeatureTable training_features;  // retained for partial dependence
};

// Penalized least squares with identity link: minimizes ||y - eta||^2 plus
// lambda-weighted second-derivative penalties. Each smooth is constrained to
// sum to zero over the training rows (absorbed into the design), so the
// intercept equals the target mean. Interactions are tensor products of
// reduced, margin-constrained bases with an isotropic Kronecker-sum penalty
// and one extra sum-to-zero constraint of their own.
GamModel fit_gam(const FeatureTable& features, const std::vector<double>& target,
                 const FitSpec& spec);

std::vector<double> predict(const GamModel& model, const FeatureTable& features);

struct PdpPoint {
  double x = 0.0;
  double pd = 0.0;
};

// PD(v) = mean over training rows of the prediction with feature := v and
// every other column left at the row's observed value.
std::vector<PdpPoint> partial_dependence(const GamModel& model, const FeatureTable& training,
                                         const std::string& feature,
                                         const std::vector<double>& grid);

// Log-spaced lambda grid 1e-3 .. 1e4, 15 points.
std::vector<double> default_lambda_grid();

struct TuneResult {
  double lambda = 1.0;
  double score = 0.0;                              // validation Pearson r
  std::vector<std::pair<double, double>> scores;   // (lambda, score), ascending lambda
};

// Fits on the train rows at every grid lambda (one shared value across all
// term groups), scores Pearson r of validation predictions, and picks the
// best score; ties within 1e-12 go to the larger (smoother) lambda.
TuneResult tune_lambda(const FeatureTable& features, const std::vector<double>& target,
                       FitSpec spec, const std::vector<int>& train_idx,
                       const std::vector<int>& val_idx, const std::vector<double>& grid);

nlohmann::ordered_json model_to_json(const GamModel& model);
GamModel model_from_json(const nlohmann::json& j);
void save_model(const GamModel& model, const std::string& path);
GamModel load_model(const std::string& path);

}  // namespace citequal
