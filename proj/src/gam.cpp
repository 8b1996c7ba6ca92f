#include "gam.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <unordered_map>

#include "error.hpp"
#include "stats.hpp"

namespace citequal {

namespace {

int distinct_count(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return static_cast<int>(v.size());
}

// Orthonormal basis of {x : u'x = 0} via the Householder reflection that
// maps u onto e1; the reflector's trailing columns span the null space.
Eigen::MatrixXd constraint_null(Eigen::VectorXd u) {
  Eigen::Index d = u.size();
  double norm = u.norm();
  if (norm < 1e-300) {
    u = Eigen::VectorXd::Zero(d);
    u(0) = 1.0;
    norm = 1.0;
  }
  Eigen::VectorXd v = u;
  v(0) += (u(0) >= 0.0 ? norm : -norm);
  double vtv = v.squaredNorm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d) - (2.0 / vtv) * v * v.transpose();
  return h.rightCols(d - 1);
}

struct SmoothPlan {
  std::string feature;
  Eigen::Index col = 0;
  BsplineBasis basis;
  Eigen::MatrixXd z;        // dim x (dim-1) constraint null space
  Eigen::MatrixXd design;   // n x (dim-1)
  Eigen::MatrixXd penalty;  // (dim-1)^2, unscaled
  double lambda = 0.0;
};

struct LinearPlan {
  std::string feature;
  Eigen::Index col = 0;
  double center = 0.0;
};

struct TensorPlan {
  std::string feature_a, feature_b;
  BsplineBasis basis_a, basis_b;
  Eigen::MatrixXd za, zb;    // margin constraints
  Eigen::MatrixXd zt;        // extra sum-to-zero on the tensor columns
  Eigen::MatrixXd design;    // n x (ra*rb - 1)
  Eigen::MatrixXd penalty;   // constrained Kronecker-sum penalty, unscaled
};

template <typename Getter>
double predict_value(const GamModel& m, Getter&& get) {
  double v = m.intercept;
  for (const SmoothTerm& s : m.smooths) v += s.basis.row(get(s.feature)).dot(s.coef);
  for (const LinearTerm& l : m.linears) v += l.slope * (get(l.feature) - l.center);
  for (const TensorTerm& t : m.tensors) {
    Eigen::RowVectorXd left = t.basis_a.row(get(t.feature_a)) * t.coef;
    v += left.dot(t.basis_b.row(get(t.feature_b)));
  }
  return v;
}

std::unordered_map<std::string, Eigen::Index> term_columns(const GamModel& m,
                                                           const FeatureTable& t) {
  std::unordered_map<std::string, Eigen::Index> map;
  auto need = [&](const std::string& f) {
    if (map.contains(f)) return;
    map.emplace(f, t.column(f));
  };
  for (const SmoothTerm& s : m.smooths) need(s.feature);
  for (const LinearTerm& l : m.linears) need(l.feature);
  for (const TensorTerm& tt : m.tensors) {
    need(tt.feature_a);
    need(tt.feature_b);
  }
  return map;
}

}  // namespace

Eigen::Index FeatureTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return static_cast<Eigen::Index>(j);
  fail(ErrorKind::invalid_argument, "missing feature column '" + name + "'");
}

std::vector<double> FeatureTable::column_vector(Eigen::Index j) const {
  std::vector<double> v(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index i = 0; i < values.rows(); ++i) v[static_cast<std::size_t>(i)] = values(i, j);
  return v;
}

FeatureTable FeatureTable::select_rows(const std::vector<int>& idx) const {
  FeatureTable t;
  t.names = names;
  t.values.resize(static_cast<Eigen::Index>(idx.size()), values.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= values.rows())
      fail(ErrorKind::invalid_argument, "row index out of range");
    t.values.row(static_cast<Eigen::Index>(i)) = values.row(idx[i]);
  }
  return t;
}

FeatureTable FeatureTable::select_columns(const std::vector<std::string>& cols) const {
  FeatureTable t;
  t.names = cols;
  t.values.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    t.values.col(static_cast<Eigen::Index>(j)) = values.col(column(cols[j]));
  return t;
}

void FitSpec::validate() const {
  if (basis_dim < 4) fail(ErrorKind::invalid_argument, "basis_dim must be >= 4");
  if (tensor_basis_dim < 4) fail(ErrorKind::invalid_argument, "tensor_basis_dim must be >= 4");
  auto check_lambda = [](double l) {
    if (!(l >= 0.0) || !std::isfinite(l))
      fail(ErrorKind::invalid_argument, "lambda must be finite and >= 0");
  };
  check_lambda(lambda_smooth);
  check_lambda(lambda_tensor);
  for (const auto& [f, d] : basis_dim_override)
    if (d < 4) fail(ErrorKind::invalid_argument, "basis_dim override for '" + f + "' must be >= 4");
  for (const auto& [f, l] : lambda_override) check_lambda(l);
}

int FitSpec::basis_dim_for(const std::string& feature) const {
  auto it = basis_dim_override.find(feature);
  return it == basis_dim_override.end() ? basis_dim : it->second;
}

double FitSpec::lambda_for(const std::string& feature) const {
  auto it = lambda_override.find(feature);
  return it == lambda_override.end() ? lambda_smooth : it->second;
}

GamModel fit_gam(const FeatureTable& features, const std::vector<double>& target,
                 const FitSpec& spec) {
  spec.validate();
  Eigen::Index n = features.rows();
  if (n < 2) fail(ErrorKind::invalid_argument, "need at least 2 training rows");
  if (static_cast<std::size_t>(n) != target.size())
    fail(ErrorKind::invalid_argument, "feature/target length mismatch");
  if (features.names.empty()) fail(ErrorKind::invalid_argument, "no feature columns");
  {
    std::set<std::string> seen(features.names.begin(), features.names.end());
    if (seen.size() != features.names.size())
      fail(ErrorKind::invalid_argument, "duplicate feature column names");
  }
  if (!features.values.allFinite())
    fail(ErrorKind::invalid_argument, "non-finite feature value");
  for (double y : target)
    if (!std::isfinite(y)) fail(ErrorKind::invalid_argument, "non-finite target value");

  GamModel model;
  model.feature_names = features.names;

  std::vector<SmoothPlan> smooths;
  std::vector<LinearPlan> linears;
  for (std::size_t j = 0; j < features.names.size(); ++j) {
    auto col = static_cast<Eigen::Index>(j);
    std::vector<double> vals = features.column_vector(col);
    int distinct = distinct_count(vals);
    if (distinct == 1) {
      model.dropped_features.push_back(features.names[j]);
      continue;
    }
    if (distinct < 4) {
      LinearPlan lp;
      lp.feature = features.names[j];
      lp.col = col;
      lp.center = mean(vals);
      linears.push_back(std::move(lp));
      continue;
    }
    SmoothPlan sp;
    sp.feature = features.names[j];
    sp.col = col;
    sp.lambda = spec.lambda_for(sp.feature);
    int dim = std::min(spec.basis_dim_for(sp.feature), distinct);
    sp.basis = BsplineBasis::from_quantiles(vals, dim);
    Eigen::MatrixXd b = sp.basis.matrix(vals);
    sp.z = constraint_null(b.colwise().sum().transpose());
    sp.design = b * sp.z;
    sp.penalty = sp.z.transpose() * sp.basis.penalty() * sp.z;
    smooths.push_back(std::move(sp));
  }

  std::vector<TensorPlan> tensors;
  if (spec.include_interactions) {
    std::set<std::string> smooth_names;
    for (const SmoothPlan& s : smooths) smooth_names.insert(s.feature);
    for (std::size_t a = 0; a < features.names.size(); ++a) {
      for (std::size_t b = a + 1; b < features.names.size(); ++b) {
        const std::string& fa = features.names[a];
        const std::string& fb = features.names[b];
        if (std::find(model.dropped_features.begin(), model.dropped_features.end(), fa) !=
                model.dropped_features.end() ||
            std::find(model.dropped_features.begin(), model.dropped_features.end(), fb) !=
                model.dropped_features.end())
          continue;  // a constant margin carries no interaction at all
        if (!smooth_names.contains(fa) || !smooth_names.contains(fb)) {
          model.skipped_interactions.push_back(fa + "*" + fb);
          continue;
        }
        TensorPlan tp;
        tp.feature_a = fa;
        tp.feature_b = fb;
        std::vector<double> va = features.column_vector(static_cast<Eigen::Index>(a));
        std::vector<double> vb = features.column_vector(static_cast<Eigen::Index>(b));
        tp.basis_a = BsplineBasis::from_quantiles(
            va, std::min(spec.tensor_basis_dim, distinct_count(va)));
        tp.basis_b = BsplineBasis::from_quantiles(
            vb, std::min(spec.tensor_basis_dim, distinct_count(vb)));
        Eigen::MatrixXd ba = tp.basis_a.matrix(va);
        Eigen::MatrixXd bb = tp.basis_b.matrix(vb);
        tp.za = constraint_null(ba.colwise().sum().transpose());
        tp.zb = constraint_null(bb.colwise().sum().transpose());
        Eigen::MatrixXd ma = ba * tp.za;
        Eigen::MatrixXd mb = bb * tp.zb;
        Eigen::Index ra = ma.cols(), rb = mb.cols();
        Eigen::MatrixXd t(n, ra * rb);
        for (Eigen::Index p = 0; p < ra; ++p)
          for (Eigen::Index q = 0; q < rb; ++q)
            t.col(p * rb + q) = ma.col(p).cwiseProduct(mb.col(q));
        Eigen::MatrixXd sa = tp.za.transpose() * tp.basis_a.penalty() * tp.za;
        Eigen::MatrixXd sb = tp.zb.transpose() * tp.basis_b.penalty() * tp.zb;
        Eigen::MatrixXd skron = Eigen::MatrixXd::Zero(ra * rb, ra * rb);
        for (Eigen::Index p = 0; p < ra; ++p)
          for (Eigen::Index p2 = 0; p2 < ra; ++p2)
            for (Eigen::Index q = 0; q < rb; ++q) skron(p * rb + q, p2 * rb + q) += sa(p, p2);
        for (Eigen::Index p = 0; p < ra; ++p)
          for (Eigen::Index q = 0; q < rb; ++q)
            for (Eigen::Index q2 = 0; q2 < rb; ++q2) skron(p * rb + q, p * rb + q2) += sb(q, q2);
        tp.zt = constraint_null(t.colwise().sum().transpose());
        tp.design = t * tp.zt;
        tp.penalty = tp.zt.transpose() * skron * tp.zt;
        tensors.push_back(std::move(tp));
      }
    }
  }

  Eigen::Index total = 1 + static_cast<Eigen::Index>(linears.size());
  for (const SmoothPlan& sp : smooths) total += sp.design.cols();
  for (const TensorPlan& tp : tensors) total += tp.design.cols();

  Eigen::MatrixXd x(n, total);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(total, total);
  x.col(0).setOnes();
  Eigen::Index off = 1;
  std::vector<Eigen::Index> linear_off, smooth_off, tensor_off;
  for (const LinearPlan& lp : linears) {
    linear_off.push_back(off);
    x.col(off) = features.values.col(lp.col).array() - lp.center;
    ++off;
  }
  for (const SmoothPlan& sp : smooths) {
    smooth_off.push_back(off);
    x.middleCols(off, sp.design.cols()) = sp.design;
    s.block(off, off, sp.design.cols(), sp.design.cols()) = sp.lambda * sp.penalty;
    off += sp.design.cols();
  }
  for (const TensorPlan& tp : tensors) {
    tensor_off.push_back(off);
    x.middleCols(off, tp.design.cols()) = tp.design;
    s.block(off, off, tp.design.cols(), tp.design.cols()) = spec.lambda_tensor * tp.penalty;
    off += tp.design.cols();
  }

  Eigen::MatrixXd xtx = x.transpose() * x;
  Eigen::MatrixXd a = xtx + s;
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(target.data(),
                                                        static_cast<Eigen::Index>(target.size()));
  Eigen::VectorXd rhs = x.transpose() * y;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    fail(ErrorKind::domain, "penalized system could not be factorized");
  Eigen::VectorXd beta = ldlt.solve(rhs);
  double resid = (a * beta - rhs).norm();
  if (!(resid <= 1e-6 * std::max(1.0, rhs.norm())))
    fail(ErrorKind::domain, "singular penalized system");

  model.intercept = beta(0);
  for (std::size_t i = 0; i < linears.size(); ++i) {
    LinearTerm lt;
    lt.feature = linears[i].feature;
    lt.center = linears[i].center;
    lt.slope = beta(linear_off[i]);
    model.linears.push_back(std::move(lt));
  }
  for (std::size_t i = 0; i < smooths.size(); ++i) {
    const SmoothPlan& sp = smooths[i];
    SmoothTerm st;
    st.feature = sp.feature;
    st.basis = sp.basis;
    st.lambda = sp.lambda;
    st.coef = sp.z * beta.segment(smooth_off[i], sp.design.cols());
    model.smooths.push_back(std::move(st));
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const TensorPlan& tp = tensors[i];
    Eigen::VectorXd w = tp.zt * beta.segment(tensor_off[i], tp.design.cols());
    Eigen::Index ra = tp.za.cols(), rb = tp.zb.cols();
    Eigen::MatrixXd g(ra, rb);
    for (Eigen::Index p = 0; p < ra; ++p)
      for (Eigen::Index q = 0; q < rb; ++q) g(p, q) = w(p * rb + q);
    TensorTerm tt;
    tt.feature_a = tp.feature_a;
    tt.feature_b = tp.feature_b;
    tt.basis_a = tp.basis_a;
    tt.basis_b = tp.basis_b;
    tt.lambda = spec.lambda_tensor;
    tt.coef = tp.za * g * tp.zb.transpose();
    model.tensors.push_back(std::move(tt));
  }

  model.training_features = features;
  // Fitted values go through the public predict path so that "predict on
  // training rows" is exactly reproducible.
  std::vector<double> fitted = predict(model, features);
  double rss = 0.0;
  for (std::size_t i = 0; i < fitted.size(); ++i)
    rss += (target[i] - fitted[i]) * (target[i] - fitted[i]);
  model.diagnostics.rss = rss;
  model.diagnostics.edf = ldlt.solve(xtx).trace();
  model.diagnostics.n_train = static_cast<std::int64_t>(n);
  double denom = std::max(1.0, static_cast<double>(n) - model.diagnostics.edf);
  model.diagnostics.residual_variance = rss / denom;
  return model;
}

std::vector<double> predict(const GamModel& model, const FeatureTable& features) {
  if (!features.values.allFinite())
    fail(ErrorKind::invalid_argument, "non-finite feature value");
  auto cols = term_columns(model, features);
  std::vector<double> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = predict_value(
        model, [&](const std::string& f) { return features.values(i, cols.at(f)); });
  }
  return out;
}

std::vector<PdpPoint> partial_dependence(const GamModel& model, const FeatureTable& training,
                                         const std::string& feature,
                                         const std::vector<double>& grid) {
  if (grid.empty()) fail(ErrorKind::invalid_argument, "empty partial-dependence grid");
  if (std::find(model.feature_names.begin(), model.feature_names.end(), feature) ==
      model.feature_names.end())
    fail(ErrorKind::invalid_argument, "model has no feature '" + feature + "'");
  if (training.rows() == 0) fail(ErrorKind::invalid_argument, "empty training table");
  Eigen::Index fcol = training.column(feature);
  std::vector<PdpPoint> curve;
  curve.reserve(grid.size());
  FeatureTable work = training;
  for (double v : grid) {
    work.values.col(fcol).setConstant(v);
    std::vector<double> pred = predict(model, work);
    curve.push_back({v, mean(pred)});
  }
  return curve;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  g.reserve(15);
  for (int k = 0; k < 15; ++k) g.push_back(std::pow(10.0, -3.0 + 0.5 * k));
  return g;
}

TuneResult tune_lambda(const FeatureTable& features, const std::vector<double>& target,
                       FitSpec spec, const std::vector<int>& train_idx,
                       const std::vector<int>& val_idx, const std::vector<double>& grid) {
  spec.validate();
  if (grid.empty()) fail(ErrorKind::invalid_argument, "empty lambda grid");
  if (train_idx.empty() || val_idx.empty())
    fail(ErrorKind::invalid_argument, "train and validation sets must be non-empty");
  {
    std::vector<char> seen(static_cast<std::size_t>(features.rows()), 0);
    for (int i : train_idx) {
      if (i < 0 || i >= features.rows()) fail(ErrorKind::invalid_argument, "index out of range");
      seen[static_cast<std::size_t>(i)] = 1;
    }
    for (int i : val_idx) {
      if (i < 0 || i >= features.rows()) fail(ErrorKind::invalid_argument, "index out of range");
      if (seen[static_cast<std::size_t>(i)])
        fail(ErrorKind::invalid_argument, "train and validation sets overlap");
    }
  }
  FeatureTable train_table = features.select_rows(train_idx);
  FeatureTable val_table = features.select_rows(val_idx);
  std::vector<double> y_train, y_val;
  y_train.reserve(train_idx.size());
  y_val.reserve(val_idx.size());
  for (int i : train_idx) y_train.push_back(target[static_cast<std::size_t>(i)]);
  for (int i : val_idx) y_val.push_back(target[static_cast<std::size_t>(i)]);
  if (y_val.size() < 2 || sample_variance(y_val) == 0.0)
    fail(ErrorKind::domain, "validation target has zero variance");

  std::vector<double> lambdas = grid;
  std::sort(lambdas.begin(), lambdas.end());
  spec.lambda_override.clear();

  TuneResult result;
  bool have = false;
  for (double l : lambdas) {
    FitSpec s = spec;
    s.lambda_smooth = l;
    s.lambda_tensor = l;
    GamModel m = fit_gam(train_table, y_train, s);
    std::vector<double> pred = predict(m, val_table);
    double score;
    try {
      score = pearson(pred, y_val);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::domain) throw;
      score = -std::numeric_limits<double>::infinity();  // constant predictions
    }
    result.scores.emplace_back(l, score);
    // Ascending order plus >= makes ties prefer the larger (smoother) lambda.
    if (!have || score >= result.score - 1e-12) {
      have = true;
      result.lambda = l;
      result.score = score;
    }
  }
  return result;
}

namespace {

nlohmann::ordered_json vec_json(const Eigen::VectorXd& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

nlohmann::ordered_json mat_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

Eigen::MatrixXd mat_from_json(const nlohmann::json& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      fail(ErrorKind::parse, "ragged matrix in model document");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
  }
  return m;
}

}  // namespace

nlohmann::ordered_json model_to_json(const GamModel& model) {
  nlohmann::ordered_json j;
  j["model"] = "gam";
  j["link"] = "identity";
  j["intercept"] = model.intercept;
  j["feature_names"] = model.feature_names;
  j["dropped_features"] = model.dropped_features;
  j["skipped_interactions"] = model.skipped_interactions;
  j["smooths"] = nlohmann::ordered_json::array();
  for (const SmoothTerm& s : model.smooths) {
    nlohmann::ordered_json t;
    t["feature"] = s.feature;
    t["lambda"] = s.lambda;
    t["knots"] = s.basis.knots();
    t["coefficients"] = vec_json(s.coef);
    j["smooths"].push_back(std::move(t));
  }
  j["linear_terms"] = nlohmann::ordered_json::array();
  for (const LinearTerm& l : model.linears) {
    nlohmann::ordered_json t;
    t["feature"] = l.feature;
    t["center"] = l.center;
    t["slope"] = l.slope;
    j["linear_terms"].push_back(std::move(t));
  }
  j["interactions"] = nlohmann::ordered_json::array();
  for (const TensorTerm& tt : model.tensors) {
    nlohmann::ordered_json t;
    t["feature_a"] = tt.feature_a;
    t["feature_b"] = tt.feature_b;
    t["lambda"] = tt.lambda;
    t["knots_a"] = tt.basis_a.knots();
    t["knots_b"] = tt.basis_b.knots();
    t["coefficients"] = mat_json(tt.coef);
    j["interactions"].push_back(std::move(t));
  }
  j["diagnostics"] = {{"rss", model.diagnostics.rss},
                      {"residual_variance", model.diagnostics.residual_variance},
                      {"edf", model.diagnostics.edf},
                      {"n_train", model.diagnostics.n_train}};
  j["training_data"] = {{"columns", model.training_features.names},
                        {"rows", mat_json(model.training_features.values)}};
  return j;
}

GamModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("model").get<std::string>() != "gam" ||
        j.at("link").get<std::string>() != "identity")
      fail(ErrorKind::parse, "not an identity-link gam model document");
    GamModel m;
    m.intercept = j.at("intercept").get<double>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.dropped_features = j.value("dropped_features", std::vector<std::string>{});
    m.skipped_interactions = j.value("skipped_interactions", std::vector<std::string>{});
    for (const auto& t : j.at("smooths")) {
      SmoothTerm s;
      s.feature = t.at("feature").get<std::string>();
      s.lambda = t.at("lambda").get<double>();
      s.basis = BsplineBasis::from_knots(t.at("knots").get<std::vector<double>>());
      s.coef = vec_from_json(t.at("coefficients"));
      if (s.coef.size() != s.basis.dim())
        fail(ErrorKind::parse, "coefficient count does not match basis");
      m.smooths.push_back(std::move(s));
    }
    for (const auto& t : j.value("linear_terms", nlohmann::json::array())) {
      LinearTerm l;
      l.feature = t.at("feature").get<std::string>();
      l.center = t.at("center").get<double>();
      l.slope = t.at("slope").get<double>();
      m.linears.push_back(std::move(l));
    }
    for (const auto& t : j.value("interactions", nlohmann::json::array())) {
      TensorTerm tt;
      tt.feature_a = t.at("feature_a").get<std::string>();
      tt.feature_b = t.at("feature_b").get<std::string>();
      tt.lambda = t.at("lambda").get<double>();
      tt.basis_a = BsplineBasis::from_knots(t.at("knots_a").get<std::vector<double>>());
      tt.basis_b = BsplineBasis::from_knots(t.at("knots_b").get<std::vector<double>>());
      tt.coef = mat_from_json(t.at("coefficients"));
      if (tt.coef.rows() != tt.basis_a.dim() || tt.coef.cols() != tt.basis_b.dim())
        fail(ErrorKind::parse, "coefficient matrix does not match bases");
      m.tensors.push_back(std::move(tt));
    }
    const auto& d = j.at("diagnostics");
    m.diagnostics.rss = d.at("rss").get<double>();
    m.diagnostics.residual_variance = d.at("residual_variance").get<double>();
    m.diagnostics.edf = d.at("edf").get<double>();
    m.diagnostics.n_train = d.at("n_train").get<std::int64_t>();
    const auto& td = j.at("training_data");
    m.training_features.names = td.at("columns").get<std::vector<std::string>>();
    m.training_features.values = mat_from_json(td.at("rows"));
    if (m.training_features.values.rows() > 0 &&
        m.training_features.values.cols() !=
            static_cast<Eigen::Index>(m.training_features.names.size()))
      fail(ErrorKind::parse, "training data width does not match columns");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("malformed model document: ") + e.what());
  }
}

void save_model(const GamModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << model_to_json(model).dump(2) << '\n';
  if (!out) fail(ErrorKind::io, "write to '" + path + "' failed");
}

GamModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, "invalid json in '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace citequal
