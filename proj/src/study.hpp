#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pipeline.hpp"

namespace citequal {

struct StudyConfig {
  std::vector<FeatureSubset> subsets;  // default: D+S, D+T, T+S, D+T+S
  std::vector<int> windows;            // default: 5, 10, 15, 20
  int n_runs = 100;
  std::uint64_t base_seed = 0;
  FeatureConfig feature_config;
  SplitSpec split;  // seed field replaced per run by base_seed + r
  GamSearchSpec gam;
  int jobs = 1;

  static StudyConfig defaults();
  void validate() const;
};

// One (subset, window, metric) cell with its per-run samples.
struct StudyResult {
  std::string subset;
  int window_years = 0;
  std::string metric;  // pearson | high_impact_accuracy
  std::vector<double> samples;
  double mean = 0.0;
  double sd = 0.0;
};

// Repeated-seed pipeline runs: run r uses split seed base_seed + r, a fresh
// stratified split, and the full per-window evaluation for every subset.
// Datasets are seed-independent and computed once per window. Results come
// back ordered by (subset input order, window, metric) with samples in run
// order; any failing run aborts with its seed in the error.
std::vector<StudyResult> run_study(const CitationGraph& graph, const Corpus& corpus,
                                   const StudyConfig& config);

struct PairwiseComparison {
  std::string subset_a;
  std::string subset_b;
  int window_years = 0;
  std::string metric;
  double t_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  double p_bonferroni = 1.0;
  double cohens_d = 0.0;
  std::string effect_label;
  bool significant = false;
  bool degenerate = false;  // both samples constant; values set by convention
};

struct StudySummary {
  std::vector<StudyResult> cells;  // input results with mean/sd refreshed
  std::vector<PairwiseComparison> comparisons;
  double alpha = 0.05;
  int m_per_metric = 0;  // subset pairs x windows, the Bonferroni family size
};

// All subset pairs within each (window, metric): Welch t, Cohen's d, and
// Bonferroni-corrected significance with m = pairs x windows per metric.
// Cells where both samples are constant get t=0/p=1/d=0 when the means agree
// and p=0/significant when they differ, flagged degenerate, instead of the
// zero-variance error the raw tests would raise.
StudySummary summarize(const std::vector<StudyResult>& results, double alpha);

void write_cells_csv(const StudySummary& summary, std::ostream& out);
void write_samples_csv(const std::vector<StudyResult>& results, std::uint64_t base_seed,
                       std::ostream& out);
void write_pairwise_csv(const StudySummary& summary, std::ostream& out);

}  // namespace citequal
