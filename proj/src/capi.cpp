#include "citequal/citequal.h"

#include <cstring>
#include <exception>
#include <json.hpp>
#include <new>
#include <sstream>
#include <string>

#include "community.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "features.hpp"
#include "gam.hpp"
#include "graph.hpp"
#include "pipeline.hpp"
#include "stats.hpp"
#include "study.hpp"
#include "text.hpp"

using nlohmann::json;

struct cq_corpus {
  citequal::Corpus corpus;
  citequal::ParseStats stats;
};

struct cq_graph {
  citequal::CitationGraph graph;
};

namespace {

thread_local std::string g_last_error;

cq_status status_of(citequal::ErrorKind kind) {
  switch (kind) {
    case citequal::ErrorKind::invalid_argument: return CQ_ERR_INVALID_ARGUMENT;
    case citequal::ErrorKind::parse: return CQ_ERR_PARSE;
    case citequal::ErrorKind::domain: return CQ_ERR_DOMAIN;
    case citequal::ErrorKind::io: return CQ_ERR_IO;
    case citequal::ErrorKind::internal: return CQ_ERR_INTERNAL;
  }
  return CQ_ERR_INTERNAL;
}

template <typename Fn>
cq_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CQ_OK;
  } catch (const citequal::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const json::exception& e) {
    g_last_error = std::string("invalid json: ") + e.what();
    return CQ_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CQ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CQ_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* message) {
  if (!ok) citequal::fail(citequal::ErrorKind::invalid_argument, message);
}

json parse_config(const char* text, const char* what) {
  require(text != nullptr, "null config");
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    citequal::fail(citequal::ErrorKind::parse,
                   std::string("invalid ") + what + " json: " + e.what());
  }
}

citequal::FeatureConfig feature_config_of(const json& j) {
  citequal::FeatureConfig fc;
  if (!j.contains("feature_config")) return fc;
  const json& f = j.at("feature_config");
  fc.max_depth = f.value("max_depth", fc.max_depth);
  fc.punish = f.value("punish", fc.punish);
  fc.saliency_window = f.value("saliency_window", fc.saliency_window);
  fc.if_span = f.value("if_span", fc.if_span);
  fc.validate();
  return fc;
}

citequal::SplitSpec split_spec_of(const json& j, std::uint64_t seed) {
  citequal::SplitSpec s;
  s.seed = seed;
  if (!j.contains("split")) return s;
  const json& sp = j.at("split");
  s.train_frac = sp.value("train_frac", s.train_frac);
  s.val_frac = sp.value("val_frac", s.val_frac);
  s.test_frac = sp.value("test_frac", s.test_frac);
  s.n_strata = sp.value("n_strata", s.n_strata);
  s.validate();
  return s;
}

citequal::GamSearchSpec gam_spec_of(const json& j) {
  citequal::GamSearchSpec g;
  if (!j.contains("gam")) return g;
  const json& gj = j.at("gam");
  g.fit.basis_dim = gj.value("basis_dim", g.fit.basis_dim);
  g.fit.tensor_basis_dim = gj.value("tensor_basis_dim", g.fit.tensor_basis_dim);
  g.fit.include_interactions = gj.value("include_interactions", g.fit.include_interactions);
  if (gj.contains("lambda_grid"))
    g.lambda_grid = gj.at("lambda_grid").get<std::vector<double>>();
  g.fit.validate();
  return g;
}

std::uint64_t seed_of(const json& j) {
  require(j.contains("seed"), "missing required key 'seed'");
  return j.at("seed").get<std::uint64_t>();
}

int jobs_of(const json& j) {
  int jobs = j.value("jobs", 1);
  require(jobs >= 1, "jobs must be >= 1");
  return jobs;
}

}  // namespace

extern "C" {

const char* cq_version(void) { return "1.0.0"; }

const char* cq_last_error(void) { return g_last_error.c_str(); }

void cq_string_free(char* s) { delete[] s; }

cq_status cq_corpus_load_file(const char* path, const char* format, cq_corpus** out) {
  return guarded([&] {
    require(path != nullptr && format != nullptr && out != nullptr, "null argument");
    auto handle = std::make_unique<cq_corpus>();
    handle->corpus = citequal::load_corpus_file(path, format, &handle->stats);
    *out = handle.release();
  });
}

cq_status cq_corpus_synthesize(const char* params_json, cq_corpus** out,
                               char** latents_csv_out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    json j = parse_config(params_json, "synthesis parameters");
    citequal::SyntheticParams p;
    require(j.contains("n_papers"), "missing required key 'n_papers'");
    p.n_papers = j.at("n_papers").get<int>();
    p.seed = seed_of(j);
    p.year_min = j.value("year_min", 1980);
    p.year_max = j.value("year_max", 2020);
    p.n_venues = j.value("n_venues", p.n_venues);
    p.attachment_exponent = j.value("attachment_exponent", p.attachment_exponent);
    p.planted_quality_fraction = j.value("planted_quality_fraction", p.planted_quality_fraction);
    p.quality_sigma = j.value("quality_sigma", p.quality_sigma);
    p.planted_boost = j.value("planted_boost", p.planted_boost);
    p.mean_references = j.value("mean_references", p.mean_references);
    citequal::SyntheticCorpus sc = citequal::generate_synthetic(p);
    if (latents_csv_out != nullptr) {
      std::ostringstream csv;
      csv << "paper_id,quality\n";
      for (std::size_t i = 0; i < sc.corpus.papers.size(); ++i)
        csv << citequal::csv_field(sc.corpus.papers[i].id) << ','
            << citequal::fmt_double(sc.quality[i]) << '\n';
      *latents_csv_out = dup_string(csv.str());
    }
    auto handle = std::make_unique<cq_corpus>();
    handle->corpus = std::move(sc.corpus);
    *out = handle.release();
  });
}

cq_status cq_corpus_sample(const cq_corpus* corpus, const char* params_json, cq_corpus** out) {
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    json j = parse_config(params_json, "sample parameters");
    citequal::SampleParams p;
    require(j.contains("n_target"), "missing required key 'n_target'");
    p.n_target = j.at("n_target").get<std::size_t>();
    p.seed = seed_of(j);
    p.n_bins = j.value("n_bins", p.n_bins);
    p.reference_year = j.value("reference_year", corpus->corpus.papers.empty()
                                                     ? 0
                                                     : corpus->corpus.max_year());
    citequal::SampleResult r = citequal::stratified_sample(corpus->corpus, p);
    auto handle = std::make_unique<cq_corpus>();
    handle->corpus = std::move(r.corpus);
    for (std::string& w : r.warnings) handle->stats.warnings.push_back(std::move(w));
    *out = handle.release();
  });
}

cq_status cq_corpus_write_canonical(const cq_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus != nullptr && path != nullptr, "null argument");
    citequal::write_canonical_file(corpus->corpus, path);
  });
}

cq_status cq_corpus_info_json(const cq_corpus* corpus, char** json_out) {
  return guarded([&] {
    require(corpus != nullptr && json_out != nullptr, "null argument");
    nlohmann::ordered_json j;
    j["papers"] = corpus->corpus.size();
    if (!corpus->corpus.papers.empty()) {
      j["min_year"] = corpus->corpus.min_year();
      j["max_year"] = corpus->corpus.max_year();
    } else {
      j["min_year"] = nullptr;
      j["max_year"] = nullptr;
    }
    j["dangling_references"] = corpus->corpus.dangling_reference_count();
    j["skipped_records"] = corpus->stats.records_skipped;
    j["warnings"] = corpus->stats.warnings;
    *json_out = dup_string(j.dump());
  });
}

void cq_corpus_free(cq_corpus* corpus) { delete corpus; }

cq_status cq_graph_build(const cq_corpus* corpus, cq_graph** out) {
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    auto handle = std::make_unique<cq_graph>();
    handle->graph = citequal::CitationGraph::build(corpus->corpus);
    *out = handle.release();
  });
}

cq_status cq_graph_info_json(const cq_graph* graph, char** json_out) {
  return guarded([&] {
    require(graph != nullptr && json_out != nullptr, "null argument");
    nlohmann::ordered_json j;
    j["nodes"] = graph->graph.node_count();
    j["edges"] = graph->graph.edge_count();
    j["dangling_references"] = graph->graph.dangling_count();
    *json_out = dup_string(j.dump());
  });
}

cq_status cq_graph_adjacency_csv(const cq_graph* graph, char** csv_out) {
  return guarded([&] {
    require(graph != nullptr && csv_out != nullptr, "null argument");
    std::ostringstream out;
    graph->graph.write_adjacency_csv(out);
    *csv_out = dup_string(out.str());
  });
}

void cq_graph_free(cq_graph* graph) { delete graph; }

cq_status cq_features_csv(const cq_graph* graph, const char* request_json, char** csv_out) {
  return guarded([&] {
    require(graph != nullptr && csv_out != nullptr, "null argument");
    json j = parse_config(request_json, "feature request");
    require(j.contains("as_of_year"), "missing required key 'as_of_year'");
    int as_of = j.at("as_of_year").get<int>();
    citequal::FeatureConfig fc;
    if (j.contains("config")) {
      const json& f = j.at("config");
      fc.max_depth = f.value("max_depth", fc.max_depth);
      fc.punish = f.value("punish", fc.punish);
      fc.saliency_window = f.value("saliency_window", fc.saliency_window);
      fc.if_span = f.value("if_span", fc.if_span);
    }
    fc.validate();
    std::vector<std::string> ids;
    if (j.contains("paper_ids")) {
      ids = j.at("paper_ids").get<std::vector<std::string>>();
    } else {
      const citequal::CitationGraph& g = graph->graph;
      for (std::size_t n = 0; n < g.node_count(); ++n)
        if (g.year_of(static_cast<int>(n)) <= as_of) ids.push_back(g.id_of(static_cast<int>(n)));
    }
    std::vector<citequal::FeatureVector> rows =
        citequal::extract_features(graph->graph, ids, as_of, fc, jobs_of(j));
    std::ostringstream out;
    citequal::write_features_csv(rows, out);
    *csv_out = dup_string(out.str());
  });
}

cq_status cq_train(const cq_corpus* corpus, const char* config_json, char** model_json_out,
                   char** report_json_out) {
  return guarded([&] {
    require(corpus != nullptr && model_json_out != nullptr, "null argument");
    json j = parse_config(config_json, "training config");
    require(j.contains("window"), "missing required key 'window'");
    int window = j.at("window").get<int>();
    citequal::SplitSpec split = split_spec_of(j, seed_of(j));
    citequal::GamSearchSpec gam = gam_spec_of(j);
    citequal::FeatureConfig fc = feature_config_of(j);
    citequal::FeatureSubset subset = citequal::FeatureSubset::parse(j.value("subset", "D+T+S"));
    citequal::CitationGraph graph = citequal::CitationGraph::build(corpus->corpus);
    std::vector<std::pair<int, citequal::GamModel>> models;
    std::vector<citequal::EvalReport> reports =
        citequal::run_pipeline(graph, corpus->corpus, {window}, fc, split, gam, subset,
                               jobs_of(j), &models);
    *model_json_out = dup_string(citequal::model_to_json(models.at(0).second).dump(2) + "\n");
    if (report_json_out != nullptr)
      *report_json_out = dup_string(citequal::reports_to_json(reports, split, subset).dump(2) +
                                    "\n");
  });
}

cq_status cq_evaluate(const cq_corpus* corpus, const char* config_json, char** report_json_out,
                      char** predictions_csv_out) {
  return guarded([&] {
    require(corpus != nullptr && report_json_out != nullptr, "null argument");
    json j = parse_config(config_json, "evaluation config");
    require(j.contains("windows"), "missing required key 'windows'");
    std::vector<int> windows = j.at("windows").get<std::vector<int>>();
    citequal::SplitSpec split = split_spec_of(j, seed_of(j));
    citequal::GamSearchSpec gam = gam_spec_of(j);
    citequal::FeatureConfig fc = feature_config_of(j);
    citequal::FeatureSubset subset = citequal::FeatureSubset::parse(j.value("subset", "D+T+S"));
    std::optional<int> horizon;
    if (j.contains("fixed_horizon_year")) horizon = j.at("fixed_horizon_year").get<int>();
    citequal::CitationGraph graph = citequal::CitationGraph::build(corpus->corpus);
    std::vector<citequal::EvalReport> reports = citequal::run_pipeline(
        graph, corpus->corpus, windows, fc, split, gam, subset, jobs_of(j), nullptr, horizon);
    *report_json_out = dup_string(citequal::reports_to_json(reports, split, subset).dump(2) +
                                  "\n");
    if (predictions_csv_out != nullptr) {
      std::ostringstream csv;
      citequal::write_predictions_csv(reports, csv);
      *predictions_csv_out = dup_string(csv.str());
    }
  });
}

cq_status cq_study(const cq_corpus* corpus, const char* config_json, char** cells_csv_out,
                   char** samples_csv_out, char** pairwise_csv_out) {
  return guarded([&] {
    require(corpus != nullptr && cells_csv_out != nullptr, "null argument");
    json j = parse_config(config_json, "study config");
    citequal::StudyConfig config = citequal::StudyConfig::defaults();
    config.base_seed = seed_of(j);
    if (j.contains("subsets")) {
      config.subsets.clear();
      for (const auto& s : j.at("subsets"))
        config.subsets.push_back(citequal::FeatureSubset::parse(s.get<std::string>()));
    }
    if (j.contains("windows")) config.windows = j.at("windows").get<std::vector<int>>();
    config.n_runs = j.value("n_runs", config.n_runs);
    config.split = split_spec_of(j, 0);
    config.gam = gam_spec_of(j);
    config.feature_config = feature_config_of(j);
    config.jobs = jobs_of(j);
    double alpha = j.value("alpha", 0.05);
    citequal::CitationGraph graph = citequal::CitationGraph::build(corpus->corpus);
    std::vector<citequal::StudyResult> results =
        citequal::run_study(graph, corpus->corpus, config);
    citequal::StudySummary summary = citequal::summarize(results, alpha);
    std::ostringstream cells, samples, pairwise;
    citequal::write_cells_csv(summary, cells);
    citequal::write_samples_csv(results, config.base_seed, samples);
    citequal::write_pairwise_csv(summary, pairwise);
    *cells_csv_out = dup_string(cells.str());
    if (samples_csv_out != nullptr) *samples_csv_out = dup_string(samples.str());
    if (pairwise_csv_out != nullptr) *pairwise_csv_out = dup_string(pairwise.str());
  });
}

cq_status cq_pdp(const char* model_json, const char* request_json, char** csv_out) {
  return guarded([&] {
    require(model_json != nullptr && csv_out != nullptr, "null argument");
    json mj = parse_config(model_json, "model");
    citequal::GamModel model = citequal::model_from_json(mj);
    json j = parse_config(request_json, "pdp request");
    require(j.contains("feature"), "missing required key 'feature'");
    std::string feature = j.at("feature").get<std::string>();
    std::vector<double> grid;
    if (j.contains("grid")) {
      grid = j.at("grid").get<std::vector<double>>();
    } else {
      int points = j.value("grid_points", 50);
      require(points >= 1, "grid_points must be >= 1");
      Eigen::Index col = model.training_features.column(feature);
      double lo = model.training_features.values.col(col).minCoeff();
      double hi = model.training_features.values.col(col).maxCoeff();
      if (points == 1) {
        grid.push_back((lo + hi) / 2.0);
      } else {
        for (int i = 0; i < points; ++i)
          grid.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                  static_cast<double>(points - 1));
      }
    }
    std::vector<citequal::PdpPoint> curve =
        citequal::partial_dependence(model, model.training_features, feature, grid);
    std::ostringstream csv;
    csv << "feature,grid_value,pd_value\n";
    for (const citequal::PdpPoint& p : curve)
      csv << citequal::csv_field(feature) << ',' << citequal::fmt_double(p.x) << ','
          << citequal::fmt_double(p.pd) << '\n';
    *csv_out = dup_string(csv.str());
  });
}

}  // extern "C"
