#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "error.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "text.hpp"

namespace citequal {

namespace {
constexpr std::uint64_t kSplitStream = 0x73706c69;  // split shuffles
}

FeatureSubset FeatureSubset::parse(const std::string& text) {
  FeatureSubset s;
  s.d = s.t = s.s = false;
  for (char c : text) {
    switch (c) {
      case 'D':
      case 'd':
        s.d = true;
        break;
      case 'T':
      case 't':
        s.t = true;
        break;
      case 'S':
        s.s = true;
        break;
      case 's':
        s.s = true;
        break;
      case '+':
      case ' ':
        break;
      default:
        fail(ErrorKind::invalid_argument,
             std::string("unknown feature letter '") + c + "' in subset '" + text + "'");
    }
  }
  s.validate();
  return s;
}

void FeatureSubset::validate() const {
  if (!d && !t && !s) fail(ErrorKind::invalid_argument, "feature subset must be non-empty");
}

std::string FeatureSubset::name() const {
  std::string out;
  auto add = [&out](const char* x) {
    if (!out.empty()) out += '+';
    out += x;
  };
  if (d) add("D");
  if (t) add("T");
  if (s) add("S");
  return out;
}

std::vector<std::string> FeatureSubset::columns() const {
  std::vector<std::string> c;
  if (d) c.push_back("diversity");
  if (t) c.push_back("timeliness");
  if (s) c.push_back("saliency");
  return c;
}

void WindowConfig::validate() const {
  if (window_years < 1) fail(ErrorKind::invalid_argument, "window_years must be >= 1");
  feature_config.validate();
  if (fixed_horizon_year && *fixed_horizon_year <= window_years)
    fail(ErrorKind::invalid_argument, "fixed horizon year must exceed the window");
}

void SplitSpec::validate() const {
  if (!(train_frac > 0.0 && val_frac > 0.0 && test_frac > 0.0))
    fail(ErrorKind::invalid_argument, "split fractions must be positive");
  if (std::fabs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    fail(ErrorKind::invalid_argument, "split fractions must sum to 1");
  if (n_strata < 1) fail(ErrorKind::invalid_argument, "n_strata must be >= 1");
}

Dataset make_dataset(const CitationGraph& graph, const Corpus& corpus,
                     const WindowConfig& config, int jobs) {
  config.validate();
  if (corpus.papers.empty()) fail(ErrorKind::invalid_argument, "empty corpus");
  int max_year = corpus.max_year();

  Dataset d;
  d.window_years = config.window_years;
  std::vector<int> as_of_years;
  std::vector<int> target_years;
  for (std::size_t i = 0; i < corpus.papers.size(); ++i) {
    const PaperRecord& p = corpus.papers[i];
    int target_year = config.fixed_horizon_year ? p.year + *config.fixed_horizon_year
                                                : p.year + config.window_years + 1;
    if (target_year > max_year) {
      ++d.excluded_young;
      continue;
    }
    d.paper_ids.push_back(p.id);
    d.corpus_index.push_back(static_cast<int>(i));
    as_of_years.push_back(p.year + config.window_years);
    target_years.push_back(target_year);
  }
  if (d.paper_ids.empty())
    fail(ErrorKind::domain, "no papers are old enough for window " +
                                std::to_string(config.window_years));

  // Feature cutoffs differ per paper, so extraction is grouped by as_of_year.
  d.features.names = {"diversity", "timeliness", "saliency"};
  d.features.values.resize(static_cast<Eigen::Index>(d.paper_ids.size()), 3);
  d.feature_flags.assign(d.paper_ids.size(), 0);
  d.target.resize(d.paper_ids.size());

  std::vector<std::size_t> order(d.paper_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return as_of_years[a] < as_of_years[b]; });
  std::size_t pos = 0;
  while (pos < order.size()) {
    std::size_t end = pos;
    int year = as_of_years[order[pos]];
    std::vector<std::string> ids;
    while (end < order.size() && as_of_years[order[end]] == year) {
      ids.push_back(d.paper_ids[order[end]]);
      ++end;
    }
    std::vector<FeatureVector> feats =
        extract_features(graph, ids, year, config.feature_config, jobs);
    for (std::size_t k = 0; k < feats.size(); ++k) {
      std::size_t row = order[pos + k];
      d.features.values(static_cast<Eigen::Index>(row), 0) = feats[k].diversity;
      d.features.values(static_cast<Eigen::Index>(row), 1) = feats[k].timeliness;
      d.features.values(static_cast<Eigen::Index>(row), 2) = feats[k].saliency;
      d.feature_flags[row] = feats[k].flags;
    }
    pos = end;
  }
  for (std::size_t i = 0; i < d.paper_ids.size(); ++i)
    d.target[i] = static_cast<double>(
        graph.citations_in_window(d.paper_ids[i], target_years[i], target_years[i]));
  return d;
}

SplitIndices stratified_split(const std::vector<double>& values, const SplitSpec& spec) {
  spec.validate();
  auto n = static_cast<std::int64_t>(values.size());
  if (n == 0) fail(ErrorKind::invalid_argument, "cannot split an empty dataset");
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "non-finite stratification value");

  SplitIndices out;
  out.label.assign(values.size(), 0);

  // Exact global class sizes by largest remainder (ties favor train, val, test).
  double fracs[3] = {spec.train_frac, spec.val_frac, spec.test_frac};
  std::int64_t want[3];
  double rem[3];
  std::int64_t assigned = 0;
  for (int c = 0; c < 3; ++c) {
    double q = static_cast<double>(n) * fracs[c];
    want[c] = static_cast<std::int64_t>(std::floor(q));
    rem[c] = q - static_cast<double>(want[c]);
    assigned += want[c];
  }
  while (assigned < n) {
    int best = 0;
    for (int c = 1; c < 3; ++c)
      if (rem[c] > rem[best] + 1e-12) best = c;
    ++want[best];
    rem[best] = -1.0;
    ++assigned;
  }

  // Rank-based equal-population strata; value ties resolved by index.
  std::vector<int> order(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[static_cast<std::size_t>(a)] != values[static_cast<std::size_t>(b)])
      return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
    return a < b;
  });
  auto k = static_cast<std::int64_t>(spec.n_strata);
  if (k > n) k = n;
  std::vector<std::vector<int>> strata(static_cast<std::size_t>(k));
  for (std::int64_t r = 0; r < n; ++r)
    strata[static_cast<std::size_t>(r * k / n)].push_back(order[static_cast<std::size_t>(r)]);

  // A stratum below 3 rows cannot spread over three classes; fold it left.
  for (std::size_t s2 = 0; s2 < strata.size();) {
    if (strata.size() == 1 || static_cast<std::int64_t>(strata[s2].size()) >= 3) {
      ++s2;
      continue;
    }
    std::size_t into = s2 == 0 ? 1 : s2 - 1;
    out.warnings.push_back("stratum with " + std::to_string(strata[s2].size()) +
                           " rows merged into neighbor");
    std::vector<int>& dst = strata[into];
    dst.insert(dst.end(), strata[s2].begin(), strata[s2].end());
    std::sort(dst.begin(), dst.end(), [&](int a, int b) {
      if (values[static_cast<std::size_t>(a)] != values[static_cast<std::size_t>(b)])
        return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
      return a < b;
    });
    strata.erase(strata.begin() + static_cast<std::ptrdiff_t>(s2));
    if (s2 > 0) s2 = 0;  // re-scan; merging may have left small strata behind
  }

  Rng rng = Rng::substream(spec.seed, kSplitStream);
  std::int64_t left_rows = n;
  std::int64_t left[3] = {want[0], want[1], want[2]};
  for (std::vector<int>& members : strata) {
    rng.shuffle(members);
    auto size = static_cast<std::int64_t>(members.size());
    std::int64_t alloc[3];
    double frac_rem[3];
    std::int64_t total = 0;
    for (int c = 0; c < 3; ++c) {
      double q = static_cast<double>(left[c]) * static_cast<double>(size) /
                 static_cast<double>(left_rows);
      alloc[c] = static_cast<std::int64_t>(std::floor(q));
      frac_rem[c] = q - static_cast<double>(alloc[c]);
      total += alloc[c];
    }
    while (total < size) {
      int best = -1;
      for (int c = 0; c < 3; ++c) {
        if (alloc[c] >= left[c]) continue;
        if (best == -1 || frac_rem[c] > frac_rem[best] + 1e-12) best = c;
      }
      if (best == -1) fail(ErrorKind::internal, "split allocation ran out of capacity");
      ++alloc[best];
      frac_rem[best] = -1.0;
      ++total;
    }
    std::int64_t at = 0;
    for (int c = 0; c < 3; ++c) {
      for (std::int64_t i = 0; i < alloc[c]; ++i, ++at)
        out.label[static_cast<std::size_t>(members[static_cast<std::size_t>(at)])] =
            static_cast<std::uint8_t>(c);
      left[c] -= alloc[c];
    }
    left_rows -= size;
  }

  for (std::size_t i = 0; i < out.label.size(); ++i) {
    if (out.label[i] == 0)
      out.train.push_back(static_cast<int>(i));
    else if (out.label[i] == 1)
      out.val.push_back(static_cast<int>(i));
    else
      out.test.push_back(static_cast<int>(i));
  }
  return out;
}

double high_impact_accuracy(const std::vector<double>& y_true_gain,
                            const std::vector<double>& y_pred_score, double impact_pctile,
                            double score_pctile) {
  if (y_true_gain.size() != y_pred_score.size())
    fail(ErrorKind::invalid_argument, "gain/score length mismatch");
  if (y_true_gain.empty())
    fail(ErrorKind::domain, "no high-impact papers in evaluation set");
  if (!(impact_pctile >= 0.0 && impact_pctile <= 100.0) ||
      !(score_pctile >= 0.0 && score_pctile <= 100.0))
    fail(ErrorKind::invalid_argument, "percentile outside [0,100]");
  double gain_cut = quantile_type7(y_true_gain, impact_pctile / 100.0);
  double score_cut = quantile_type7(y_pred_score, score_pctile / 100.0);
  std::int64_t high = 0, hit = 0;
  for (std::size_t i = 0; i < y_true_gain.size(); ++i) {
    if (y_true_gain[i] < gain_cut) continue;
    ++high;
    if (y_pred_score[i] >= score_cut) ++hit;
  }
  if (high == 0) fail(ErrorKind::domain, "no high-impact papers in evaluation set");
  return static_cast<double>(hit) / static_cast<double>(high);
}

std::vector<double> citation_counts_all_time(const CitationGraph& graph, const Corpus& corpus) {
  std::vector<double> counts(corpus.papers.size());
  for (std::size_t i = 0; i < corpus.papers.size(); ++i)
    counts[i] = static_cast<double>(
        graph.in_edges(graph.node(corpus.papers[i].id)).size());
  return counts;
}

EvalReport evaluate_window(const Dataset& dataset, const std::vector<std::uint8_t>& corpus_label,
                           const std::vector<std::string>& split_warnings,
                           const GamSearchSpec& gam, const FeatureSubset& subset) {
  subset.validate();
  EvalReport rep;
  rep.window_years = dataset.window_years;
  rep.excluded_young = dataset.excluded_young;
  rep.flags = split_warnings;

  std::vector<int> train, val, test;
  for (std::size_t row = 0; row < dataset.corpus_index.size(); ++row) {
    auto ci = static_cast<std::size_t>(dataset.corpus_index[row]);
    if (ci >= corpus_label.size())
      fail(ErrorKind::invalid_argument, "split labels do not cover the corpus");
    switch (corpus_label[ci]) {
      case 0: train.push_back(static_cast<int>(row)); break;
      case 1: val.push_back(static_cast<int>(row)); break;
      default: test.push_back(static_cast<int>(row)); break;
    }
  }
  rep.n_train = static_cast<int>(train.size());
  rep.n_val = static_cast<int>(val.size());
  rep.n_test = static_cast<int>(test.size());
  if (train.size() < 2 || val.size() < 2)
    fail(ErrorKind::domain, "window " + std::to_string(dataset.window_years) +
                                ": not enough rows after splitting");

  FeatureTable table = dataset.features.select_columns(subset.columns());
  std::vector<double> grid = gam.lambda_grid.empty() ? default_lambda_grid() : gam.lambda_grid;
  TuneResult tuned = tune_lambda(table, dataset.target, gam.fit, train, val, grid);
  rep.lambda = tuned.lambda;

  FitSpec fs = gam.fit;
  fs.lambda_smooth = tuned.lambda;
  fs.lambda_tensor = tuned.lambda;
  fs.lambda_override.clear();
  std::vector<double> y_train;
  y_train.reserve(train.size());
  for (int i : train) y_train.push_back(dataset.target[static_cast<std::size_t>(i)]);
  GamModel model = fit_gam(table.select_rows(train), y_train, fs);
  for (const std::string& f : model.dropped_features)
    rep.flags.push_back("dropped_feature:" + f);
  for (const std::string& p : model.skipped_interactions)
    rep.flags.push_back("skipped_interaction:" + p);

  std::vector<double> pred = predict(model, table.select_rows(val));
  std::vector<double> truth;
  truth.reserve(val.size());
  for (int i : val) {
    truth.push_back(dataset.target[static_cast<std::size_t>(i)]);
    rep.val_paper_ids.push_back(dataset.paper_ids[static_cast<std::size_t>(i)]);
  }
  rep.val_true = truth;
  rep.val_pred = pred;
  rep.pearson_r = pearson(pred, truth);
  rep.r_squared = r_squared(truth, pred);
  rep.high_impact_accuracy = high_impact_accuracy(truth, pred);
  return rep;
}

std::vector<EvalReport> run_pipeline(const CitationGraph& graph, const Corpus& corpus,
                                     const std::vector<int>& windows,
                                     const FeatureConfig& feature_config,
                                     const SplitSpec& split_spec, const GamSearchSpec& gam,
                                     const FeatureSubset& subset, int jobs,
                                     std::vector<std::pair<int, GamModel>>* models_out,
                                     std::optional<int> fixed_horizon_year) {
  if (windows.empty()) fail(ErrorKind::invalid_argument, "no diffusion windows given");
  subset.validate();
  std::vector<int> ws = windows;
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());

  SplitIndices split = stratified_split(citation_counts_all_time(graph, corpus), split_spec);

  std::vector<EvalReport> reports;
  for (int w : ws) {
    try {
      WindowConfig wc;
      wc.window_years = w;
      wc.feature_config = feature_config;
      wc.fixed_horizon_year = fixed_horizon_year;
      Dataset dataset = make_dataset(graph, corpus, wc, jobs);
      EvalReport rep = evaluate_window(dataset, split.label, split.warnings, gam, subset);
      if (models_out) {
        // Refit identically to capture the model for export.
        std::vector<int> train;
        for (std::size_t row = 0; row < dataset.corpus_index.size(); ++row)
          if (split.label[static_cast<std::size_t>(dataset.corpus_index[row])] == 0)
            train.push_back(static_cast<int>(row));
        FeatureTable table = dataset.features.select_columns(subset.columns());
        FitSpec fs = gam.fit;
        fs.lambda_smooth = rep.lambda;
        fs.lambda_tensor = rep.lambda;
        fs.lambda_override.clear();
        std::vector<double> y;
        y.reserve(train.size());
        for (int i : train) y.push_back(dataset.target[static_cast<std::size_t>(i)]);
        models_out->emplace_back(w, fit_gam(table.select_rows(train), y, fs));
      }
      reports.push_back(std::move(rep));
    } catch (const Error& e) {
      fail(e.kind(), "window " + std::to_string(w) + ": " + e.what());
    }
  }
  return reports;
}

void write_predictions_csv(const std::vector<EvalReport>& reports, std::ostream& out) {
  out << "paper_id,window,y_true,y_pred\n";
  for (const EvalReport& r : reports) {
    for (std::size_t i = 0; i < r.val_paper_ids.size(); ++i) {
      out << csv_field(r.val_paper_ids[i]) << ',' << r.window_years << ','
          << fmt_double(r.val_true[i]) << ',' << fmt_double(r.val_pred[i]) << '\n';
    }
  }
}

nlohmann::ordered_json reports_to_json(const std::vector<EvalReport>& reports,
                                       const SplitSpec& split, const FeatureSubset& subset) {
  nlohmann::ordered_json j;
  j["subset"] = subset.name();
  j["split"] = {{"train_frac", split.train_frac},
                {"val_frac", split.val_frac},
                {"test_frac", split.test_frac},
                {"n_strata", split.n_strata},
                {"seed", split.seed}};
  j["windows"] = nlohmann::ordered_json::array();
  for (const EvalReport& r : reports) {
    nlohmann::ordered_json w;
    w["window_years"] = r.window_years;
    w["pearson_r"] = r.pearson_r;
    w["r_squared"] = r.r_squared;
    w["high_impact_accuracy"] = r.high_impact_accuracy;
    w["n_train"] = r.n_train;
    w["n_val"] = r.n_val;
    w["n_test"] = r.n_test;
    w["excluded_young"] = r.excluded_young;
    w["lambda"] = r.lambda;
    w["flags"] = r.flags;
    j["windows"].push_back(std::move(w));
  }
  return j;
}

}  // namespace citequal
