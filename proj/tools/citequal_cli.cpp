// Command-line front end for the citation-quality toolkit. Every command is a
// thin wrapper over one C API call: the CLI only merges config, moves bytes
// between files and the library, and prints a one-line JSON status.
//
// Exit codes: 0 ok, 1 domain/io/internal error, 2 usage (bad flags, bad
// config, missing paths, malformed input).

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "citequal/citequal.h"

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct OwnedStr {
  char* p = nullptr;
  OwnedStr() = default;
  OwnedStr(const OwnedStr&) = delete;
  OwnedStr& operator=(const OwnedStr&) = delete;
  ~OwnedStr() { cq_string_free(p); }
};

struct CorpusHandle {
  cq_corpus* p = nullptr;
  ~CorpusHandle() { cq_corpus_free(p); }
};

struct GraphHandle {
  cq_graph* p = nullptr;
  ~GraphHandle() { cq_graph_free(p); }
};

const char* kind_name(cq_status s) {
  switch (s) {
    case CQ_OK: return "ok";
    case CQ_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CQ_ERR_PARSE: return "parse";
    case CQ_ERR_DOMAIN: return "domain";
    case CQ_ERR_IO: return "io";
    case CQ_ERR_INTERNAL: return "internal";
  }
  return "internal";
}

int exit_code_of(cq_status s) {
  return (s == CQ_ERR_PARSE || s == CQ_ERR_INVALID_ARGUMENT) ? 2 : 1;
}

[[noreturn]] void fail_json(const std::string& command, const char* kind,
                            const std::string& message, int code) {
  ordered_json line;
  line["command"] = command;
  line["status"] = "error";
  line["kind"] = kind;
  line["message"] = message;
  std::cout << line.dump() << "\n";
  std::cerr << "error: " << message << "\n";
  std::exit(code);
}

[[noreturn]] void usage_fail(const std::string& command, const std::string& message) {
  fail_json(command, "invalid_argument", message, 2);
}

void check(cq_status s, const std::string& command) {
  if (s != CQ_OK) fail_json(command, kind_name(s), cq_last_error(), exit_code_of(s));
}

void write_text_file(const std::string& path, const char* content, const std::string& command) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_json(command, "io", "cannot open output file: " + path, 1);
  out << content;
  out.flush();
  if (!out) fail_json(command, "io", "write failed: " + path, 1);
}

std::string read_text_file(const std::string& path, const std::string& command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) usage_fail(command, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t csv_row_count(const char* csv) {
  std::size_t lines = 0;
  for (const char* c = csv; *c; ++c)
    if (*c == '\n') ++lines;
  return lines > 0 ? lines - 1 : 0;  // minus header
}

json load_config_file(const std::string& path, const std::string& command) {
  if (path.empty()) return json::object();
  std::string text = read_text_file(path, command);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    usage_fail(command, "config file is not a json object: " + path);
  return j;
}

// Flags override config-file values; config fills anything not given on the
// command line; built-in defaults fill the rest.
template <typename T>
void merge_key(json& j, const char* key, const CLI::Option* opt, const T& value) {
  if (opt != nullptr && opt->count() > 0) {
    j[key] = value;
    return;
  }
  if (!j.contains(key)) j[key] = value;
}

// Like merge_key but never writes a default: required keys must come from an
// explicit flag or the config file so their absence is detectable.
template <typename T>
void merge_given(json& j, const char* key, const CLI::Option* opt, const T& value) {
  if (opt != nullptr && opt->count() > 0) j[key] = value;
}

template <typename T>
void merge_nested(json& j, const char* group, const char* key, const CLI::Option* opt,
                  const T& value) {
  if (!j.contains(group)) j[group] = json::object();
  json& g = j[group];
  if (opt != nullptr && opt->count() > 0) {
    g[key] = value;
    return;
  }
  if (!g.contains(key)) g[key] = value;
}

void require_key(const json& j, const char* key, const std::string& command) {
  if (!j.contains(key))
    usage_fail(command, std::string("missing required option '--") +
                            (std::string(key) == "n_runs" ? "runs" : key) + "' (or config key '" +
                            key + "')");
}

// Shared per-command state: corpus input, config file, tuning knobs.
struct CommandOpts {
  std::string command;
  std::string config_path;
  std::string corpus_path;
  std::string format = "jsonl";
  std::uint64_t seed = 0;
  int jobs = 1;
  double train_frac = 0.8, val_frac = 0.1, test_frac = 0.1;
  int n_strata = 4;
  int max_depth = 2;
  double punish = 1.0;
  int saliency_window = 2;
  int if_span = 2;
  int basis_dim = 10;
  int tensor_basis_dim = 5;
  bool no_interactions = false;
  std::vector<double> lambda_grid;

  CLI::Option* in_opt = nullptr;
  CLI::Option* format_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* train_frac_opt = nullptr;
  CLI::Option* val_frac_opt = nullptr;
  CLI::Option* test_frac_opt = nullptr;
  CLI::Option* strata_opt = nullptr;
  CLI::Option* max_depth_opt = nullptr;
  CLI::Option* punish_opt = nullptr;
  CLI::Option* saliency_opt = nullptr;
  CLI::Option* if_span_opt = nullptr;
  CLI::Option* basis_opt = nullptr;
  CLI::Option* tensor_basis_opt = nullptr;
  CLI::Option* no_inter_opt = nullptr;
  CLI::Option* grid_opt = nullptr;
};

void add_config_flag(CLI::App* cmd, CommandOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "JSON config file; explicit flags override its values");
}

void add_input_flags(CLI::App* cmd, CommandOpts& o) {
  o.in_opt = cmd->add_option("--in", o.corpus_path, "input corpus file");
  o.format_opt = cmd->add_option("--format", o.format, "corpus format")
                     ->check(CLI::IsMember({"arnetminer", "jsonl", "canonical"}));
}

void add_seed_flag(CLI::App* cmd, CommandOpts& o) {
  o.seed_opt = cmd->add_option("--seed", o.seed, "random seed (required)");
}

void add_jobs_flag(CLI::App* cmd, CommandOpts& o) {
  o.jobs_opt = cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

void add_feature_flags(CLI::App* cmd, CommandOpts& o) {
  o.max_depth_opt = cmd->add_option("--max-depth", o.max_depth, "citation hop depth");
  o.punish_opt = cmd->add_option("--punish", o.punish, "timeliness age penalty");
  o.saliency_opt = cmd->add_option("--saliency-window", o.saliency_window,
                                   "recent-citation window in years");
  o.if_span_opt = cmd->add_option("--if-span", o.if_span, "impact-factor span in years");
}

void add_model_flags(CLI::App* cmd, CommandOpts& o) {
  o.train_frac_opt = cmd->add_option("--train-frac", o.train_frac, "training fraction");
  o.val_frac_opt = cmd->add_option("--val-frac", o.val_frac, "validation fraction");
  o.test_frac_opt = cmd->add_option("--test-frac", o.test_frac, "test fraction");
  o.strata_opt = cmd->add_option("--strata", o.n_strata, "stratification bins");
  o.basis_opt = cmd->add_option("--basis-dim", o.basis_dim, "spline basis size per feature");
  o.tensor_basis_opt =
      cmd->add_option("--tensor-basis-dim", o.tensor_basis_dim, "marginal basis size per tensor");
  o.no_inter_opt = cmd->add_flag("--no-interactions", o.no_interactions,
                                 "drop pairwise interaction surfaces");
  o.grid_opt = cmd->add_option("--lambda-grid", o.lambda_grid, "candidate lambdas")
                   ->delimiter(',');
}

// Builds the merged config document passed to the library.
json merged_config(const CommandOpts& o) {
  json j = load_config_file(o.config_path, o.command);
  if (o.seed_opt != nullptr) merge_given(j, "seed", o.seed_opt, o.seed);
  if (o.jobs_opt != nullptr) merge_key(j, "jobs", o.jobs_opt, o.jobs);
  if (o.train_frac_opt != nullptr) {
    merge_nested(j, "split", "train_frac", o.train_frac_opt, o.train_frac);
    merge_nested(j, "split", "val_frac", o.val_frac_opt, o.val_frac);
    merge_nested(j, "split", "test_frac", o.test_frac_opt, o.test_frac);
    merge_nested(j, "split", "n_strata", o.strata_opt, o.n_strata);
  }
  if (o.max_depth_opt != nullptr) {
    merge_nested(j, "feature_config", "max_depth", o.max_depth_opt, o.max_depth);
    merge_nested(j, "feature_config", "punish", o.punish_opt, o.punish);
    merge_nested(j, "feature_config", "saliency_window", o.saliency_opt, o.saliency_window);
    merge_nested(j, "feature_config", "if_span", o.if_span_opt, o.if_span);
  }
  if (o.basis_opt != nullptr) {
    merge_nested(j, "gam", "basis_dim", o.basis_opt, o.basis_dim);
    merge_nested(j, "gam", "tensor_basis_dim", o.tensor_basis_opt, o.tensor_basis_dim);
    merge_nested(j, "gam", "include_interactions", o.no_inter_opt, !o.no_interactions);
    if (o.grid_opt->count() > 0) j["gam"]["lambda_grid"] = o.lambda_grid;
  }
  return j;
}

// Resolves the input corpus from flag or config and checks it exists.
void resolve_input(CommandOpts& o, const json& j) {
  if (o.in_opt->count() == 0 && j.contains("corpus")) o.corpus_path = j.at("corpus");
  if (o.format_opt->count() == 0 && j.contains("format")) o.format = j.at("format");
  if (o.corpus_path.empty()) usage_fail(o.command, "missing input corpus (--in or config key 'corpus')");
  if (!std::filesystem::exists(o.corpus_path))
    usage_fail(o.command, "input corpus not found: " + o.corpus_path);
  if (o.format != "arnetminer" && o.format != "jsonl" && o.format != "canonical")
    usage_fail(o.command, "unknown corpus format: " + o.format);
}

CorpusHandle load_corpus(const CommandOpts& o) {
  CorpusHandle c;
  check(cq_corpus_load_file(o.corpus_path.c_str(), o.format.c_str(), &c.p), o.command);
  return c;
}

json corpus_info(const CorpusHandle& c, const std::string& command) {
  OwnedStr info;
  check(cq_corpus_info_json(c.p, &info.p), command);
  return json::parse(info.p);
}

void print_status(ordered_json& line) { std::cout << line.dump() << "\n"; }

// ---------------------------------------------------------------------------

int run_ingest(CommandOpts& o, const std::string& input, const std::string& out) {
  json j = load_config_file(o.config_path, o.command);
  if (!input.empty()) o.corpus_path = input;
  resolve_input(o, j);
  CorpusHandle c = load_corpus(o);
  check(cq_corpus_write_canonical(c.p, out.c_str()), o.command);
  json info = corpus_info(c, o.command);
  ordered_json line;
  line["command"] = "ingest";
  line["status"] = "ok";
  line["papers"] = info.at("papers");
  line["min_year"] = info.at("min_year");
  line["max_year"] = info.at("max_year");
  line["dangling_references"] = info.at("dangling_references");
  line["skipped_records"] = info.at("skipped_records");
  line["warnings"] = info.at("warnings");
  line["out"] = out;
  print_status(line);
  return 0;
}

struct SynthOpts {
  int n = 0;
  int year_min = 1980;
  int year_max = 2020;
  int venues = 10;
  double attachment = 1.0;
  double planted_fraction = 0.1;
  double quality_sigma = 0.8;
  double planted_boost = 8.0;
  double mean_refs = 10.0;
  std::string out;
  std::string latents;
};

int run_synth(CommandOpts& o, const SynthOpts& s) {
  json j = merged_config(o);
  require_key(j, "seed", o.command);
  json params;
  params["n_papers"] = s.n;
  params["seed"] = j.at("seed");
  params["year_min"] = s.year_min;
  params["year_max"] = s.year_max;
  params["n_venues"] = s.venues;
  params["attachment_exponent"] = s.attachment;
  params["planted_quality_fraction"] = s.planted_fraction;
  params["quality_sigma"] = s.quality_sigma;
  params["planted_boost"] = s.planted_boost;
  params["mean_references"] = s.mean_refs;
  CorpusHandle c;
  OwnedStr latents;
  check(cq_corpus_synthesize(params.dump().c_str(), &c.p,
                             s.latents.empty() ? nullptr : &latents.p),
        o.command);
  check(cq_corpus_write_canonical(c.p, s.out.c_str()), o.command);
  if (!s.latents.empty()) write_text_file(s.latents, latents.p, o.command);
  json info = corpus_info(c, o.command);
  ordered_json line;
  line["command"] = "synth";
  line["status"] = "ok";
  line["papers"] = info.at("papers");
  line["seed"] = j.at("seed");
  line["out"] = s.out;
  if (!s.latents.empty()) line["latents"] = s.latents;
  print_status(line);
  return 0;
}

int run_features(CommandOpts& o, int as_of, const CLI::Option* as_of_opt,
                 const std::vector<std::string>& ids, const std::string& out) {
  json j = merged_config(o);
  resolve_input(o, j);
  if (as_of_opt->count() == 0 && j.contains("as_of_year")) as_of = j.at("as_of_year");
  if (as_of_opt->count() == 0 && !j.contains("as_of_year"))
    usage_fail(o.command, "missing required option '--as-of'");
  CorpusHandle c = load_corpus(o);
  GraphHandle g;
  check(cq_graph_build(c.p, &g.p), o.command);
  json request;
  request["as_of_year"] = as_of;
  if (!ids.empty()) request["paper_ids"] = ids;
  request["config"] = j.value("feature_config", json::object());
  request["jobs"] = j.value("jobs", 1);
  OwnedStr csv;
  check(cq_features_csv(g.p, request.dump().c_str(), &csv.p), o.command);
  write_text_file(out, csv.p, o.command);
  ordered_json line;
  line["command"] = "features";
  line["status"] = "ok";
  line["as_of_year"] = as_of;
  line["rows"] = csv_row_count(csv.p);
  line["out"] = out;
  print_status(line);
  return 0;
}

int run_train(CommandOpts& o, int window, const CLI::Option* window_opt,
              const std::string& subset, const CLI::Option* subset_opt,
              const std::string& out_model, const std::string& out_report) {
  json j = merged_config(o);
  resolve_input(o, j);
  merge_given(j, "window", window_opt, window);
  merge_key(j, "subset", subset_opt, subset);
  require_key(j, "window", o.command);
  require_key(j, "seed", o.command);
  CorpusHandle c = load_corpus(o);
  OwnedStr model, report;
  check(cq_train(c.p, j.dump().c_str(), &model.p, &report.p), o.command);
  write_text_file(out_model, model.p, o.command);
  write_text_file(out_report, report.p, o.command);
  json rep = json::parse(report.p);
  const json& w = rep.at("windows").at(0);
  ordered_json line;
  line["command"] = "train";
  line["status"] = "ok";
  line["window"] = w.at("window_years");
  line["subset"] = rep.at("subset");
  line["lambda"] = w.at("lambda");
  line["pearson_r"] = w.at("pearson_r");
  line["r_squared"] = w.at("r_squared");
  line["model"] = out_model;
  line["report"] = out_report;
  print_status(line);
  return 0;
}

int run_evaluate(CommandOpts& o, const std::vector<int>& windows, const CLI::Option* windows_opt,
                 const std::string& subset, const CLI::Option* subset_opt, int fixed_horizon,
                 const CLI::Option* horizon_opt, const std::string& out_report,
                 const std::string& out_predictions) {
  json j = merged_config(o);
  resolve_input(o, j);
  merge_given(j, "windows", windows_opt, windows);
  merge_key(j, "subset", subset_opt, subset);
  if (horizon_opt->count() > 0) j["fixed_horizon_year"] = fixed_horizon;
  require_key(j, "windows", o.command);
  require_key(j, "seed", o.command);
  CorpusHandle c = load_corpus(o);
  OwnedStr report, predictions;
  check(cq_evaluate(c.p, j.dump().c_str(), &report.p, &predictions.p), o.command);
  write_text_file(out_report, report.p, o.command);
  write_text_file(out_predictions, predictions.p, o.command);
  json rep = json::parse(report.p);
  ordered_json line;
  line["command"] = "evaluate";
  line["status"] = "ok";
  line["subset"] = rep.at("subset");
  line["windows"] = json::array();
  for (const json& w : rep.at("windows")) {
    ordered_json entry;
    entry["window"] = w.at("window_years");
    entry["pearson_r"] = w.at("pearson_r");
    entry["r_squared"] = w.at("r_squared");
    entry["high_impact_accuracy"] = w.at("high_impact_accuracy");
    line["windows"].push_back(entry);
  }
  line["report"] = out_report;
  line["predictions"] = out_predictions;
  print_status(line);
  return 0;
}

int run_ablate(CommandOpts& o, const std::vector<std::string>& subsets,
               const CLI::Option* subsets_opt, const std::vector<int>& windows,
               const CLI::Option* windows_opt, int runs, const CLI::Option* runs_opt,
               double alpha, const CLI::Option* alpha_opt, std::string out_dir,
               const CLI::Option* out_dir_opt) {
  json j = merged_config(o);
  resolve_input(o, j);
  merge_given(j, "subsets", subsets_opt, subsets);
  merge_given(j, "windows", windows_opt, windows);
  merge_given(j, "n_runs", runs_opt, runs);
  merge_key(j, "alpha", alpha_opt, alpha);
  require_key(j, "seed", o.command);
  if (out_dir_opt->count() == 0 && j.contains("out_dir")) out_dir = j.at("out_dir");
  CorpusHandle c = load_corpus(o);
  OwnedStr cells, samples, pairwise;
  check(cq_study(c.p, j.dump().c_str(), &cells.p, &samples.p, &pairwise.p), o.command);
  std::filesystem::path dir(out_dir);
  std::string cells_path = (dir / "cells.csv").string();
  std::string samples_path = (dir / "samples.csv").string();
  std::string pairwise_path = (dir / "pairwise.csv").string();
  write_text_file(cells_path, cells.p, o.command);
  write_text_file(samples_path, samples.p, o.command);
  write_text_file(pairwise_path, pairwise.p, o.command);
  ordered_json line;
  line["command"] = "ablate";
  line["status"] = "ok";
  line["runs"] = j.at("n_runs");
  line["seed"] = j.at("seed");
  line["cells"] = cells_path;
  line["samples"] = samples_path;
  line["pairwise"] = pairwise_path;
  print_status(line);
  return 0;
}

int run_pdp(CommandOpts& o, const std::string& model_path, const std::string& feature,
            int grid, const std::string& out) {
  std::string model_text = read_text_file(model_path, o.command);
  json request;
  request["feature"] = feature;
  request["grid_points"] = grid;
  OwnedStr csv;
  check(cq_pdp(model_text.c_str(), request.dump().c_str(), &csv.p), o.command);
  write_text_file(out, csv.p, o.command);
  ordered_json line;
  line["command"] = "pdp";
  line["status"] = "ok";
  line["feature"] = feature;
  line["rows"] = csv_row_count(csv.p);
  line["out"] = out;
  print_status(line);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"citation-quality scoring toolkit"};
  app.set_version_flag("--version", cq_version());
  app.require_subcommand(1);

  // ingest
  CommandOpts ing_o;
  ing_o.command = "ingest";
  std::string ing_input, ing_out = "corpus.jsonl";
  CLI::App* ing = app.add_subcommand("ingest", "convert a raw corpus to canonical jsonl");
  ing->add_option("input", ing_input, "raw corpus file")->check(CLI::ExistingFile);
  add_config_flag(ing, ing_o);
  ing_o.in_opt = ing->add_option("--in", ing_o.corpus_path, "input corpus file (alias)");
  ing_o.format_opt = ing->add_option("--format", ing_o.format, "corpus format")
                         ->check(CLI::IsMember({"arnetminer", "jsonl", "canonical"}));
  ing->add_option("--out", ing_out, "canonical output path");

  // synth
  CommandOpts syn_o;
  syn_o.command = "synth";
  SynthOpts syn;
  syn.out = "synthetic.jsonl";
  CLI::App* sy = app.add_subcommand("synth", "generate a synthetic citation corpus");
  add_config_flag(sy, syn_o);
  add_seed_flag(sy, syn_o);
  sy->add_option("--n", syn.n, "number of papers")->required()->check(CLI::PositiveNumber);
  sy->add_option("--year-min", syn.year_min, "first publication year");
  sy->add_option("--year-max", syn.year_max, "last publication year");
  sy->add_option("--venues", syn.venues, "venue count");
  sy->add_option("--attachment", syn.attachment, "preferential attachment exponent");
  sy->add_option("--planted-fraction", syn.planted_fraction, "fraction of boosted papers");
  sy->add_option("--quality-sigma", syn.quality_sigma, "latent quality spread");
  sy->add_option("--planted-boost", syn.planted_boost, "attractiveness boost for planted papers");
  sy->add_option("--mean-refs", syn.mean_refs, "mean references per paper");
  sy->add_option("--out", syn.out, "canonical output path");
  sy->add_option("--latents", syn.latents, "optional latent-quality csv path");

  // features
  CommandOpts fea_o;
  fea_o.command = "features";
  int fea_as_of = 0;
  std::vector<std::string> fea_ids;
  std::string fea_out = "features.csv";
  CLI::App* fe = app.add_subcommand("features", "extract diffusion features as of a year");
  add_config_flag(fe, fea_o);
  add_input_flags(fe, fea_o);
  add_jobs_flag(fe, fea_o);
  add_feature_flags(fe, fea_o);
  CLI::Option* fea_as_of_opt = fe->add_option("--as-of", fea_as_of, "evaluation cutoff year");
  fe->add_option("--ids", fea_ids, "paper ids (default: all published by the cutoff)")
      ->delimiter(',');
  fe->add_option("--out", fea_out, "feature csv path");

  // train
  CommandOpts tr_o;
  tr_o.command = "train";
  int tr_window = 0;
  std::string tr_subset = "D+T+S";
  std::string tr_model = "model.json", tr_report = "train_report.json";
  CLI::App* tr = app.add_subcommand("train", "fit and tune a model for one window");
  add_config_flag(tr, tr_o);
  add_input_flags(tr, tr_o);
  add_seed_flag(tr, tr_o);
  add_jobs_flag(tr, tr_o);
  add_feature_flags(tr, tr_o);
  add_model_flags(tr, tr_o);
  CLI::Option* tr_window_opt = tr->add_option("--window", tr_window, "diffusion window in years");
  CLI::Option* tr_subset_opt = tr->add_option("--subset", tr_subset, "feature subset, e.g. DTS");
  tr->add_option("--out-model", tr_model, "model json path");
  tr->add_option("--out-report", tr_report, "report json path");

  // evaluate
  CommandOpts ev_o;
  ev_o.command = "evaluate";
  std::vector<int> ev_windows;
  std::string ev_subset = "D+T+S";
  int ev_horizon = 0;
  std::string ev_report = "evaluation.json", ev_predictions = "predictions.csv";
  CLI::App* ev = app.add_subcommand("evaluate", "train and score models over several windows");
  add_config_flag(ev, ev_o);
  add_input_flags(ev, ev_o);
  add_seed_flag(ev, ev_o);
  add_jobs_flag(ev, ev_o);
  add_feature_flags(ev, ev_o);
  add_model_flags(ev, ev_o);
  CLI::Option* ev_windows_opt =
      ev->add_option("--windows", ev_windows, "diffusion windows in years")->delimiter(',');
  CLI::Option* ev_subset_opt = ev->add_option("--subset", ev_subset, "feature subset");
  CLI::Option* ev_horizon_opt = ev->add_option(
      "--fixed-horizon", ev_horizon, "fixed diffusion year for targets (must exceed window)");
  ev->add_option("--out-report", ev_report, "report json path");
  ev->add_option("--out-predictions", ev_predictions, "validation predictions csv path");

  // ablate
  CommandOpts ab_o;
  ab_o.command = "ablate";
  std::vector<std::string> ab_subsets;
  std::vector<int> ab_windows;
  int ab_runs = 0;
  double ab_alpha = 0.05;
  std::string ab_out_dir = ".";
  CLI::App* ab = app.add_subcommand("ablate", "repeated-split subset comparison study");
  add_config_flag(ab, ab_o);
  add_input_flags(ab, ab_o);
  add_seed_flag(ab, ab_o);
  add_jobs_flag(ab, ab_o);
  add_feature_flags(ab, ab_o);
  add_model_flags(ab, ab_o);
  CLI::Option* ab_subsets_opt =
      ab->add_option("--subsets", ab_subsets, "feature subsets, e.g. TS,DTS")->delimiter(',');
  CLI::Option* ab_windows_opt =
      ab->add_option("--windows", ab_windows, "diffusion windows")->delimiter(',');
  CLI::Option* ab_runs_opt = ab->add_option("--runs", ab_runs, "independent split runs");
  CLI::Option* ab_alpha_opt = ab->add_option("--alpha", ab_alpha, "significance level");
  CLI::Option* ab_out_dir_opt = ab->add_option("--out-dir", ab_out_dir, "output directory");

  // pdp
  CommandOpts pd_o;
  pd_o.command = "pdp";
  std::string pd_model, pd_feature, pd_out = "pdp.csv";
  int pd_grid = 50;
  CLI::App* pd = app.add_subcommand("pdp", "export a partial-dependence curve");
  add_config_flag(pd, pd_o);
  pd->add_option("--model", pd_model, "model json path")->required()->check(CLI::ExistingFile);
  pd->add_option("--feature", pd_feature, "feature name")->required();
  pd->add_option("--grid", pd_grid, "grid points across the training range")
      ->check(CLI::PositiveNumber);
  pd->add_option("--out", pd_out, "curve csv path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ing->parsed()) return run_ingest(ing_o, ing_input, ing_out);
    if (sy->parsed()) return run_synth(syn_o, syn);
    if (fe->parsed()) return run_features(fea_o, fea_as_of, fea_as_of_opt, fea_ids, fea_out);
    if (tr->parsed())
      return run_train(tr_o, tr_window, tr_window_opt, tr_subset, tr_subset_opt, tr_model,
                       tr_report);
    if (ev->parsed())
      return run_evaluate(ev_o, ev_windows, ev_windows_opt, ev_subset, ev_subset_opt, ev_horizon,
                          ev_horizon_opt, ev_report, ev_predictions);
    if (ab->parsed())
      return run_ablate(ab_o, ab_subsets, ab_subsets_opt, ab_windows, ab_windows_opt, ab_runs,
                        ab_runs_opt, ab_alpha, ab_alpha_opt, ab_out_dir, ab_out_dir_opt);
    if (pd->parsed()) return run_pdp(pd_o, pd_model, pd_feature, pd_grid, pd_out);
  } catch (const json::exception& e) {
    fail_json(app.get_subcommands().front()->get_name(), "invalid_argument",
              std::string("bad config value: ") + e.what(), 2);
  }
  return 0;
}
