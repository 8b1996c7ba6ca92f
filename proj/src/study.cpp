#include "study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <thread>

#include "error.hpp"
#include "stats.hpp"
#include "text.hpp"

namespace citequal {

namespace {
const char* kMetrics[2] = {"pearson", "high_impact_accuracy"};
}

StudyConfig StudyConfig::defaults() {
  StudyConfig c;
  c.subsets = {FeatureSubset{true, false, true}, FeatureSubset{true, true, false},
               FeatureSubset{false, true, true}, FeatureSubset{true, true, true}};
  c.windows = {5, 10, 15, 20};
  return c;
}

void StudyConfig::validate() const {
  if (subsets.empty()) fail(ErrorKind::invalid_argument, "no feature subsets");
  for (const FeatureSubset& s : subsets) s.validate();
  {
    std::set<std::string> names;
    for (const FeatureSubset& s : subsets)
      if (!names.insert(s.name()).second)
        fail(ErrorKind::invalid_argument, "duplicate feature subset " + s.name());
  }
  if (windows.empty()) fail(ErrorKind::invalid_argument, "no windows");
  {
    std::set<int> seen;
    for (int w : windows) {
      if (w < 1) fail(ErrorKind::invalid_argument, "window_years must be >= 1");
      if (!seen.insert(w).second)
        fail(ErrorKind::invalid_argument, "duplicate window " + std::to_string(w));
    }
  }
  if (n_runs < 2) fail(ErrorKind::invalid_argument, "n_runs must be >= 2");
  if (jobs < 1) fail(ErrorKind::invalid_argument, "jobs must be >= 1");
  split.validate();
  feature_config.validate();
  gam.fit.validate();
}

std::vector<StudyResult> run_study(const CitationGraph& graph, const Corpus& corpus,
                                   const StudyConfig& config) {
  config.validate();
  std::vector<int> windows = config.windows;
  std::sort(windows.begin(), windows.end());
  windows.erase(std::unique(windows.begin(), windows.end()), windows.end());

  // Datasets depend only on (corpus, window, feature_config): one per window.
  std::vector<Dataset> datasets;
  datasets.reserve(windows.size());
  for (int w : windows) {
    WindowConfig wc;
    wc.window_years = w;
    wc.feature_config = config.feature_config;
    datasets.push_back(make_dataset(graph, corpus, wc, config.jobs));
  }
  std::vector<double> strat_values = citation_counts_all_time(graph, corpus);

  // value slot: [run][subset][window][metric]
  std::size_t n_sub = config.subsets.size();
  std::size_t n_win = windows.size();
  auto n_runs = static_cast<std::size_t>(config.n_runs);
  std::vector<double> slots(n_runs * n_sub * n_win * 2, 0.0);
  std::vector<std::string> run_errors(n_runs);
  auto slot = [&](std::size_t r, std::size_t s, std::size_t w, std::size_t m) -> double& {
    return slots[((r * n_sub + s) * n_win + w) * 2 + m];
  };

  auto run_one = [&](std::size_t r) {
    try {
      SplitSpec split = config.split;
      split.seed = config.base_seed + r;
      SplitIndices indices = stratified_split(strat_values, split);
      for (std::size_t w = 0; w < n_win; ++w) {
        for (std::size_t s = 0; s < n_sub; ++s) {
          EvalReport rep = evaluate_window(datasets[w], indices.label, indices.warnings,
                                           config.gam, config.subsets[s]);
          slot(r, s, w, 0) = rep.pearson_r;
          slot(r, s, w, 1) = rep.high_impact_accuracy;
        }
      }
    } catch (const Error& e) {
      run_errors[r] = e.what();
    } catch (const std::exception& e) {
      run_errors[r] = e.what();
    }
  };

  int workers = config.jobs;
  if (static_cast<std::size_t>(workers) > n_runs) workers = static_cast<int>(n_runs);
  if (workers <= 1) {
    for (std::size_t r = 0; r < n_runs; ++r) run_one(r);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t r = static_cast<std::size_t>(t); r < n_runs;
             r += static_cast<std::size_t>(workers))
          run_one(r);
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t r = 0; r < n_runs; ++r) {
    if (!run_errors[r].empty())
      fail(ErrorKind::domain, "study run with seed " +
                                  std::to_string(config.base_seed + r) +
                                  " failed: " + run_errors[r]);
  }

  std::vector<StudyResult> results;
  results.reserve(n_sub * n_win * 2);
  for (std::size_t s = 0; s < n_sub; ++s) {
    for (std::size_t w = 0; w < n_win; ++w) {
      for (std::size_t m = 0; m < 2; ++m) {
        StudyResult cell;
        cell.subset = config.subsets[s].name();
        cell.window_years = windows[w];
        cell.metric = kMetrics[m];
        cell.samples.reserve(n_runs);
        for (std::size_t r = 0; r < n_runs; ++r) cell.samples.push_back(slot(r, s, w, m));
        cell.mean = mean(cell.samples);
        cell.sd = std::sqrt(sample_variance(cell.samples));
        results.push_back(std::move(cell));
      }
    }
  }
  return results;
}

StudySummary summarize(const std::vector<StudyResult>& results, double alpha) {
  if (results.empty()) fail(ErrorKind::invalid_argument, "empty study results");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::invalid_argument, "alpha outside (0,1)");

  StudySummary summary;
  summary.alpha = alpha;
  summary.cells = results;
  for (StudyResult& c : summary.cells) {
    if (c.samples.size() < 2)
      fail(ErrorKind::invalid_argument, "study cell with fewer than 2 samples");
    c.mean = mean(c.samples);
    c.sd = std::sqrt(sample_variance(c.samples));
  }

  std::vector<std::string> subsets;
  std::vector<int> windows;
  for (const StudyResult& c : results) {
    if (std::find(subsets.begin(), subsets.end(), c.subset) == subsets.end())
      subsets.push_back(c.subset);
    if (std::find(windows.begin(), windows.end(), c.window_years) == windows.end())
      windows.push_back(c.window_years);
  }
  std::sort(windows.begin(), windows.end());
  if (subsets.size() < 2)
    fail(ErrorKind::invalid_argument, "pairwise comparison needs at least 2 subsets");

  auto find_cell = [&](const std::string& subset, int window,
                       const char* metric) -> const StudyResult* {
    for (const StudyResult& c : summary.cells)
      if (c.subset == subset && c.window_years == window && c.metric == metric) return &c;
    return nullptr;
  };

  auto pairs = static_cast<int>(subsets.size() * (subsets.size() - 1) / 2);
  summary.m_per_metric = pairs * static_cast<int>(windows.size());
  double alpha_corr = alpha / summary.m_per_metric;
  double m_family = summary.m_per_metric;

  for (const char* metric : kMetrics) {
    for (int window : windows) {
      for (std::size_t a = 0; a < subsets.size(); ++a) {
        for (std::size_t b = a + 1; b < subsets.size(); ++b) {
          const StudyResult* ca = find_cell(subsets[a], window, metric);
          const StudyResult* cb = find_cell(subsets[b], window, metric);
          if (ca == nullptr || cb == nullptr)
            fail(ErrorKind::invalid_argument,
                 "subset " + subsets[a] + " or " + subsets[b] + " missing cell for window " +
                     std::to_string(window) + ", metric " + metric);
          PairwiseComparison pc;
          pc.subset_a = subsets[a];
          pc.subset_b = subsets[b];
          pc.window_years = window;
          pc.metric = metric;
          bool var_a = sample_variance(ca->samples) > 0.0;
          bool var_b = sample_variance(cb->samples) > 0.0;
          if (!var_a && !var_b) {
            // Saturated cells (every run identical) happen on easy synthetic
            // corpora; convention instead of the zero-variance error.
            pc.degenerate = true;
            double diff = ca->mean - cb->mean;
            auto n = static_cast<double>(ca->samples.size());
            auto m = static_cast<double>(cb->samples.size());
            pc.df = n + m - 2.0;
            if (diff == 0.0) {
              pc.t_stat = 0.0;
              pc.p_value = 1.0;
              pc.cohens_d = 0.0;
              pc.effect_label = "negligible";
            } else {
              double inf = std::numeric_limits<double>::infinity();
              pc.t_stat = diff > 0.0 ? inf : -inf;
              pc.p_value = 0.0;
              pc.cohens_d = pc.t_stat;
              pc.effect_label = "large";
            }
          } else {
            WelchResult wr = welch_t(ca->samples, cb->samples);
            CohensD cd = cohens_d(ca->samples, cb->samples);
            pc.t_stat = wr.t;
            pc.df = wr.df;
            pc.p_value = wr.p;
            pc.cohens_d = cd.d;
            pc.effect_label = cd.label;
          }
          pc.p_bonferroni = std::min(1.0, m_family * pc.p_value);
          pc.significant = pc.p_value <= alpha_corr;
          summary.comparisons.push_back(std::move(pc));
        }
      }
    }
  }
  return summary;
}

void write_cells_csv(const StudySummary& summary, std::ostream& out) {
  out << "subset,window,metric,mean,sd,n_runs\n";
  for (const StudyResult& c : summary.cells) {
    out << csv_field(c.subset) << ',' << c.window_years << ',' << c.metric << ','
        << fmt_double(c.mean) << ',' << fmt_double(c.sd) << ',' << c.samples.size() << '\n';
  }
}

void write_samples_csv(const std::vector<StudyResult>& results, std::uint64_t base_seed,
                       std::ostream& out) {
  out << "subset,window,metric,run,seed,value\n";
  for (const StudyResult& c : results) {
    for (std::size_t r = 0; r < c.samples.size(); ++r) {
      out << csv_field(c.subset) << ',' << c.window_years << ',' << c.metric << ',' << r << ','
          << base_seed + r << ',' << fmt_double(c.samples[r]) << '\n';
    }
  }
}

void write_pairwise_csv(const StudySummary& summary, std::ostream& out) {
  out << "subset_a,subset_b,window,metric,t_stat,df,p_value,p_bonferroni,cohens_d,"
         "effect,significant,degenerate\n";
  for (const PairwiseComparison& pc : summary.comparisons) {
    out << csv_field(pc.subset_a) << ',' << csv_field(pc.subset_b) << ',' << pc.window_years
        << ',' << pc.metric << ',' << fmt_double(pc.t_stat) << ',' << fmt_double(pc.df) << ','
        << fmt_double(pc.p_value) << ',' << fmt_double(pc.p_bonferroni) << ','
        << fmt_double(pc.cohens_d) << ',' << pc.effect_label << ','
        << (pc.significant ? "true" : "false") << ',' << (pc.degenerate ? "true" : "false")
        << '\n';
  }
}

}  // namespace citequal
