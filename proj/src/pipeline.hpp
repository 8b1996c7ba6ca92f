#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "features.hpp"
#include "gam.hpp"
#include "graph.hpp"

namespace citequal {

// Which of the three diffusion features enter the model.
struct FeatureSubset {
  bool d = true;  // diversity
  bool t = true;  // timeliness
  bool s = true;  // saliency

  // Accepts forms like "D+T+S", "T+S", "ts" (case-insensitive, '+' optional).
  static FeatureSubset parse(const std::string& text);
  void validate() const;  // at least one member
  std::string name() const;                 // canonical "D+T+S" style, D<T<S order
  std::vector<std::string> columns() const; // matching feature table columns
};

struct WindowConfig {
  int window_years = 5;
  FeatureConfig feature_config;
  // Target: citation gain in publication_year + window_years + 1, or in
  // publication_year + fixed_horizon_year when set (the long-horizon task;
  // must exceed window_years).
  std::optional<int> fixed_horizon_year;

  void validate() const;
};

struct SplitSpec {
  double train_frac = 0.8;
  double val_frac = 0.1;
  double test_frac = 0.1;
  int n_strata = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Dataset {
  int window_years = 0;
  std::vector<std::string> paper_ids;  // eligible papers, corpus order
  std::vector<int> corpus_index;       // position of each row in corpus.papers
  FeatureTable features;               // columns diversity, timeliness, saliency
  std::vector<double> target;
  std::vector<std::uint32_t> feature_flags;
  int excluded_young = 0;  // papers too young for the window
};

// Features at as_of_year = publication + window and next-year (or fixed
// long-horizon) citation gain targets for every paper old enough. Errors if
// nothing is eligible.
Dataset make_dataset(const CitationGraph& graph, const Corpus& corpus,
                     const WindowConfig& config, int jobs = 1);

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
  std::vector<std::uint8_t> label;  // per input index: 0 train, 1 val, 2 test
  std::vector<std::string> warnings;
};

// Deterministic stratified three-way split of indices 0..values.size()-1.
// Strata are rank-based equal-population bins of `values`; strata smaller
// than 3 merge into a neighbor with a warning. Global class sizes follow the
// fractions exactly (largest remainder); per-stratum sizes are within one of
// proportional. Same spec -> same split.
SplitIndices stratified_split(const std::vector<double>& values, const SplitSpec& spec);

// Accuracy on high-impact papers: G = {gain >= P_impact of gains}, score
// threshold s* = P_score over all scores; accuracy = fraction of G at or
// above s*. Percentiles are linear-interpolation quantiles.
double high_impact_accuracy(const std::vector<double>& y_true_gain,
                            const std::vector<double>& y_pred_score,
                            double impact_pctile = 95.0, double score_pctile = 90.0);

struct GamSearchSpec {
  FitSpec fit;                      // lambda fields overridden during tuning
  std::vector<double> lambda_grid;  // empty -> default_lambda_grid()
};

struct EvalReport {
  int window_years = 0;
  double pearson_r = 0.0;
  double r_squared = 0.0;
  double high_impact_accuracy = 0.0;
  int n_train = 0;
  int n_val = 0;
  int n_test = 0;
  int excluded_young = 0;
  double lambda = 0.0;  // tuned value shared by all term groups
  std::vector<std::string> flags;
  std::vector<std::string> val_paper_ids;  // persisted validation predictions
  std::vector<double> val_true;
  std::vector<double> val_pred;
};

// Split -> tune lambda on validation -> fit on train -> metrics on the
// validation split. `corpus_label` holds the per-corpus-paper split class so
// one seed yields one membership shared by every window.
EvalReport evaluate_window(const Dataset& dataset, const std::vector<std::uint8_t>& corpus_label,
                           const std::vector<std::string>& split_warnings,
                           const GamSearchSpec& gam, const FeatureSubset& subset);

// Full-history in-citation counts, the window-independent stratification
// dimension of the split.
std::vector<double> citation_counts_all_time(const CitationGraph& graph, const Corpus& corpus);

// One model per window over a split membership computed once from
// split_spec.seed and shared by all windows. Reports come back ordered by
// window length. `model_out`, if given, receives the fitted model of each
// window keyed by window length (for export).
std::vector<EvalReport> run_pipeline(const CitationGraph& graph, const Corpus& corpus,
                                     const std::vector<int>& windows,
                                     const FeatureConfig& feature_config,
                                     const SplitSpec& split_spec, const GamSearchSpec& gam,
                                     const FeatureSubset& subset, int jobs = 1,
                                     std::vector<std::pair<int, GamModel>>* models_out = nullptr,
                                     std::optional<int> fixed_horizon_year = std::nullopt);

void write_predictions_csv(const std::vector<EvalReport>& reports, std::ostream& out);
nlohmann::ordered_json reports_to_json(const std::vector<EvalReport>& reports,
                                       const SplitSpec& split, const FeatureSubset& subset);

}  // namespace citequal
