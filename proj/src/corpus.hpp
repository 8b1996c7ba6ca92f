#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace citequal {

// One publication. References are normalized on construction: duplicates and
// self-citations are removed. References to ids outside the corpus (dangling)
// are retained here and only skipped at graph construction.
struct PaperRecord {
  std::string id;
  int year = 0;
  std::string venue;
  std::vector<std::string> references;
  std::optional<std::string> domain_tag;
};

struct Corpus {
  std::vector<PaperRecord> papers;
  std::string source_label;

  std::size_t size() const { return papers.size(); }
  std::size_t dangling_reference_count() const;
  int min_year() const;  // errors on an empty corpus
  int max_year() const;
};

// Normalizes a record in place: trims the id, deduplicates references and
// drops self-references. Errors if id is empty or year is not positive.
void normalize_record(PaperRecord& record);

struct ParseStats {
  std::size_t records_skipped = 0;
  std::vector<std::string> warnings;  // one message per skipped record
};

// ArnetMiner line-prefix format. Records are separated by blank lines; known
// prefixes: #index id, #t year, #c venue, #% cited id (one per line),
// #* title / #@ authors / #! abstract (ignored). Unknown prefixes are
// ignored. Records with a missing id or malformed year are skipped and
// counted; a duplicate id is an error.
Corpus parse_arnetminer(std::istream& in, ParseStats* stats = nullptr);

// Canonical JSONL: one object per line with keys id (string), year (int),
// venue (string), references (array of strings), domain_tag (optional
// string). venue and references default when absent; id/year are required.
Corpus load_canonical(std::istream& in);

// Deterministic serialization: one LF-terminated line per paper, keys in
// fixed order (id, year, venue, references, domain_tag). load_canonical is
// its exact inverse.
void write_canonical(const Corpus& corpus, std::ostream& out);
std::string write_canonical_string(const Corpus& corpus);

Corpus load_corpus_file(const std::string& path, const std::string& format,
                        ParseStats* stats = nullptr);
void write_canonical_file(const Corpus& corpus, const std::string& path);

struct SyntheticParams {
  int n_papers = 0;
  int year_min = 0;
  int year_max = 0;
  int n_venues = 10;
  double attachment_exponent = 1.0;
  double planted_quality_fraction = 0.1;
  std::uint64_t seed = 0;
  // Generator shape knobs.
  double quality_sigma = 0.8;   // spread of the log-normal base latent
  double planted_boost = 8.0;   // latent multiplier for planted papers
  double mean_references = 10.0;
};

struct SyntheticCorpus {
  Corpus corpus;
  // Hidden per-paper quality latent, parallel to corpus.papers. Kept as a
  // sidecar so tests can use it as an oracle; it never leaks into features.
  std::vector<double> quality;
};

// Preferential-attachment citation corpus with a planted log-normal quality
// latent multiplying attachment weight. Edges always point to strictly
// earlier years, so the citation graph is acyclic by construction.
// Deterministic: identical params yield byte-identical corpora.
SyntheticCorpus generate_synthetic(const SyntheticParams& params);

struct SampleParams {
  std::size_t n_target = 0;
  int n_bins = 1;
  int reference_year = 0;
  std::uint64_t seed = 0;
};

struct SampleResult {
  Corpus corpus;
  std::vector<std::string> warnings;
};

// Stratified random sample: papers are ranked by cumulative citation count as
// of reference_year and cut into n_bins equal-population bins; about
// n_target/n_bins papers are drawn uniformly per bin. Bins that cannot fill
// their quota spill over to bins with spare capacity (warned).
SampleResult stratified_sample(const Corpus& corpus, const SampleParams& params);

}  // namespace citequal
