/* citequal: citation-diffusion paper quality scoring.
 *
 * C interface over the core library: corpus handling, citation graphs,
 * diffusion features, additive-model training/evaluation, feature-relevance
 * studies, and partial dependence export.
 *
 * Conventions:
 *  - Every function returns cq_status; CQ_OK is 0.
 *  - On failure, cq_last_error() returns a message for the calling thread,
 *    valid until the thread's next citequal call.
 *  - Strings returned through char** out-parameters are heap-allocated and
 *    must be released with cq_string_free().
 *  - Handles are opaque; free them with their cq_*_free function. NULL is
 *    accepted and ignored by the free functions.
 *  - Structured parameters travel as JSON text; tabular results come back as
 *    CSV or JSON text. All functions are thread-safe on distinct handles;
 *    handles themselves are immutable after creation.
 */

#ifndef CITEQUAL_H
#define CITEQUAL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cq_status {
  CQ_OK = 0,
  CQ_ERR_INVALID_ARGUMENT = 1,
  CQ_ERR_PARSE = 2,
  CQ_ERR_DOMAIN = 3,
  CQ_ERR_IO = 4,
  CQ_ERR_INTERNAL = 5
} cq_status;

typedef struct cq_corpus cq_corpus;
typedef struct cq_graph cq_graph;

/* Library version, e.g. "1.0.0". Static storage; do not free. */
const char* cq_version(void);

/* Message of the calling thread's most recent failure, or "" if none. */
const char* cq_last_error(void);

void cq_string_free(char* s);

/* ---- Corpus ---------------------------------------------------------- */

/* format: "arnetminer" (block text export) or "jsonl" (canonical lines). */
cq_status cq_corpus_load_file(const char* path, const char* format, cq_corpus** out);

/* params_json keys: n_papers (required), seed (required), year_min, year_max,
 * n_venues, attachment_exponent, planted_quality_fraction, quality_sigma,
 * planted_boost, mean_references. If latents_csv_out is non-NULL it receives
 * the per-paper latent quality table (paper_id,quality). */
cq_status cq_corpus_synthesize(const char* params_json, cq_corpus** out,
                               char** latents_csv_out);

/* params_json keys: n_target (required), seed (required), n_bins,
 * reference_year (default: corpus max year). Returns a corpus with the
 * sampled subset in original order. */
cq_status cq_corpus_sample(const cq_corpus* corpus, const char* params_json,
                           cq_corpus** out);

cq_status cq_corpus_write_canonical(const cq_corpus* corpus, const char* path);

/* {"papers": n, "min_year": y, "max_year": y, "dangling_references": n,
 *  "skipped_records": n, "warnings": [...]} */
cq_status cq_corpus_info_json(const cq_corpus* corpus, char** json_out);

void cq_corpus_free(cq_corpus* corpus);

/* ---- Citation graph -------------------------------------------------- */

cq_status cq_graph_build(const cq_corpus* corpus, cq_graph** out);

/* {"nodes": n, "edges": n, "dangling_references": n} */
cq_status cq_graph_info_json(const cq_graph* graph, char** json_out);

/* CSV citing_id,cited_id,citing_year sorted by (citing_id, cited_id). */
cq_status cq_graph_adjacency_csv(const cq_graph* graph, char** csv_out);

void cq_graph_free(cq_graph* graph);

/* ---- Features -------------------------------------------------------- */

/* request_json keys: as_of_year (required); paper_ids (array; default all
 * papers published by as_of_year); config {max_depth, punish,
 * saliency_window, if_span}; jobs. Result CSV columns: paper_id, as_of_year,
 * diversity, timeliness, saliency, flags. */
cq_status cq_features_csv(const cq_graph* graph, const char* request_json, char** csv_out);

/* ---- Training and evaluation ----------------------------------------- */

/* config_json keys: window (required), seed (required), subset ("D+T+S"),
 * feature_config {...}, split {train_frac, val_frac, test_frac, n_strata},
 * gam {basis_dim, tensor_basis_dim, include_interactions, lambda_grid},
 * jobs. Tunes lambda on the validation split, fits on train, and returns the
 * serialized model document (with embedded training data) plus a metrics
 * report for the window. */
cq_status cq_train(const cq_corpus* corpus, const char* config_json, char** model_json_out,
                   char** report_json_out);

/* config_json: as cq_train but with windows (array, required) instead of
 * window, and optional fixed_horizon_year. report_json_out receives the
 * per-window metrics document; predictions_csv_out the validation
 * predictions (paper_id, window, y_true, y_pred). */
cq_status cq_evaluate(const cq_corpus* corpus, const char* config_json,
                      char** report_json_out, char** predictions_csv_out);

/* config_json keys: subsets (array of "T+S"-style names; default the four
 * standard combinations), windows, n_runs, seed (required), feature_config,
 * split, gam, alpha (default 0.05), jobs. Outputs: per-cell stats CSV,
 * per-run samples CSV, pairwise comparison CSV. */
cq_status cq_study(const cq_corpus* corpus, const char* config_json, char** cells_csv_out,
                   char** samples_csv_out, char** pairwise_csv_out);

/* request_json keys: feature (required), grid_points (default 50) or grid
 * (explicit array). The grid spans the feature's training range. Result CSV:
 * feature, grid_value, pd_value. */
cq_status cq_pdp(const char* model_json, const char* request_json, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* CITEQUAL_H */
