#include "corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace citequal {

namespace {

bool parse_positive_int(std::string_view s, int& out) {
  s = trim(s);
  if (s.empty()) return false;
  int value = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return false;
  if (value <= 0) return false;
  out = value;
  return true;
}

void check_unique_id(std::unordered_set<std::string>& seen, const std::string& id,
                     const std::string& context) {
  if (!seen.insert(id).second) {
    fail(ErrorKind::parse, context + ": duplicate paper id '" + id + "'");
  }
}

}  // namespace

void normalize_record(PaperRecord& record) {
  record.id = std::string(trim(record.id));
  if (record.id.empty()) fail(ErrorKind::parse, "paper record with empty id");
  if (record.year <= 0) {
    fail(ErrorKind::parse, "paper '" + record.id + "' has non-positive year");
  }
  std::vector<std::string> refs;
  refs.reserve(record.references.size());
  std::unordered_set<std::string> seen;
  for (auto& r : record.references) {
    std::string ref = std::string(trim(r));
    if (ref.empty() || ref == record.id) continue;
    if (seen.insert(ref).second) refs.push_back(std::move(ref));
  }
  record.references = std::move(refs);
}

std::size_t Corpus::dangling_reference_count() const {
  std::unordered_set<std::string_view> ids;
  ids.reserve(papers.size() * 2);
  for (const auto& p : papers) ids.insert(p.id);
  std::size_t dangling = 0;
  for (const auto& p : papers) {
    for (const auto& r : p.references) {
      if (!ids.contains(r)) ++dangling;
    }
  }
  return dangling;
}

int Corpus::min_year() const {
  if (papers.empty()) fail(ErrorKind::domain, "empty corpus has no year range");
  int y = papers.front().year;
  for (const auto& p : papers) y = std::min(y, p.year);
  return y;
}

int Corpus::max_year() const {
  if (papers.empty()) fail(ErrorKind::domain, "empty corpus has no year range");
  int y = papers.front().year;
  for (const auto& p : papers) y = std::max(y, p.year);
  return y;
}

Corpus parse_arnetminer(std::istream& in, ParseStats* stats) {
  Corpus corpus;
  corpus.source_label = "arnetminer";
  ParseStats local;
  ParseStats& st = stats ? *stats : local;
  std::unordered_set<std::string> seen_ids;

  std::string line;
  std::size_t line_no = 0;

  PaperRecord current;
  std::string year_field;
  bool in_record = false;
  bool saw_id = false;
  bool saw_year = false;

  auto flush = [&]() {
    if (!in_record) return;
    in_record = false;
    PaperRecord rec = std::move(current);
    current = PaperRecord{};
    std::string yf = std::move(year_field);
    year_field.clear();
    bool had_id = saw_id;
    bool had_year = saw_year;
    saw_id = false;
    saw_year = false;

    if (!had_id || trim(rec.id).empty()) {
      ++st.records_skipped;
      st.warnings.push_back("record ending near line " + std::to_string(line_no) +
                            ": missing #index, skipped");
      return;
    }
    if (!had_year || !parse_positive_int(yf, rec.year)) {
      ++st.records_skipped;
      st.warnings.push_back("record '" + std::string(trim(rec.id)) +
                            "': malformed year '" + yf + "', skipped");
      return;
    }
    normalize_record(rec);
    check_unique_id(seen_ids, rec.id, "arnetminer input");
    corpus.papers.push_back(std::move(rec));
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = line;
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    if (trim(sv).empty()) {
      flush();
      continue;
    }
    in_record = true;
    if (sv.starts_with("#index")) {
      current.id = std::string(trim(sv.substr(6)));
      saw_id = true;
    } else if (sv.starts_with("#%")) {
      auto ref = trim(sv.substr(2));
      if (!ref.empty()) current.references.emplace_back(ref);
    } else if (sv.starts_with("#t")) {
      year_field = std::string(trim(sv.substr(2)));
      saw_year = true;
    } else if (sv.starts_with("#c")) {
      current.venue = std::string(trim(sv.substr(2)));
    }
    // #*, #@, #! and anything else: ignored.
  }
  flush();
  return corpus;
}

Corpus load_canonical(std::istream& in) {
  using json = nlohmann::json;
  Corpus corpus;
  corpus.source_label = "canonical";
  std::unordered_set<std::string> seen_ids;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorKind::parse,
           "line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) {
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected a JSON object");
    }
    PaperRecord rec;
    if (!obj.contains("id") || !obj["id"].is_string() ||
        obj["id"].get<std::string>().empty()) {
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": missing or invalid 'id'");
    }
    rec.id = obj["id"].get<std::string>();
    if (!obj.contains("year") || !obj["year"].is_number_integer()) {
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": missing or invalid 'year'");
    }
    rec.year = obj["year"].get<int>();
    if (rec.year <= 0) {
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": year must be positive");
    }
    if (obj.contains("venue")) {
      if (!obj["venue"].is_string()) {
        fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": 'venue' must be a string");
      }
      rec.venue = obj["venue"].get<std::string>();
    }
    if (obj.contains("references")) {
      if (!obj["references"].is_array()) {
        fail(ErrorKind::parse,
             "line " + std::to_string(line_no) + ": 'references' must be an array");
      }
      for (const auto& r : obj["references"]) {
        if (!r.is_string()) {
          fail(ErrorKind::parse,
               "line " + std::to_string(line_no) + ": reference ids must be strings");
        }
        rec.references.push_back(r.get<std::string>());
      }
    }
    if (obj.contains("domain_tag") && !obj["domain_tag"].is_null()) {
      if (!obj["domain_tag"].is_string()) {
        fail(ErrorKind::parse,
             "line " + std::to_string(line_no) + ": 'domain_tag' must be a string");
      }
      rec.domain_tag = obj["domain_tag"].get<std::string>();
    }
    normalize_record(rec);
    check_unique_id(seen_ids, rec.id, "canonical input line " + std::to_string(line_no));
    corpus.papers.push_back(std::move(rec));
  }
  return corpus;
}

void write_canonical(const Corpus& corpus, std::ostream& out) {
  using ordered_json = nlohmann::ordered_json;
  for (const auto& p : corpus.papers) {
    ordered_json obj;
    obj["id"] = p.id;
    obj["year"] = p.year;
    obj["venue"] = p.venue;
    obj["references"] = p.references;
    if (p.domain_tag) obj["domain_tag"] = *p.domain_tag;
    out << obj.dump() << '\n';
  }
}

std::string write_canonical_string(const Corpus& corpus) {
  std::ostringstream os;
  write_canonical(corpus, os);
  return os.str();
}

Corpus load_corpus_file(const std::string& path, const std::string& format,
                        ParseStats* stats) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "' for reading");
  if (format == "arnetminer") return parse_arnetminer(in, stats);
  if (format == "jsonl" || format == "canonical") return load_canonical(in);
  fail(ErrorKind::invalid_argument,
       "unknown corpus format '" + format + "' (expected arnetminer or jsonl)");
}

void write_canonical_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  write_canonical(corpus, out);
  if (!out) fail(ErrorKind::io, "write to '" + path + "' failed");
}

SyntheticCorpus generate_synthetic(const SyntheticParams& params) {
  if (params.n_papers < 1) fail(ErrorKind::invalid_argument, "n_papers must be >= 1");
  if (params.year_min <= 0 || params.year_max < params.year_min) {
    fail(ErrorKind::invalid_argument, "invalid year range");
  }
  if (params.n_venues < 1) fail(ErrorKind::invalid_argument, "n_venues must be >= 1");
  if (params.planted_quality_fraction < 0.0 || params.planted_quality_fraction > 1.0) {
    fail(ErrorKind::invalid_argument, "planted_quality_fraction must be in [0,1]");
  }
  if (params.attachment_exponent < 0.0) {
    fail(ErrorKind::invalid_argument, "attachment_exponent must be >= 0");
  }
  if (params.mean_references < 0.0) {
    fail(ErrorKind::invalid_argument, "mean_references must be >= 0");
  }

  const int n = params.n_papers;
  const std::int64_t n_years =
      static_cast<std::int64_t>(params.year_max) - params.year_min + 1;

  SyntheticCorpus result;
  result.corpus.source_label = "synthetic";
  result.corpus.papers.resize(n);
  result.quality.resize(n);

  Rng rng = Rng::substream(params.seed, 0x5e71);

  // Papers are laid out in non-decreasing year order so every paper may only
  // cite a strict prefix of earlier-year papers.
  std::vector<int> years(n);
  for (int i = 0; i < n; ++i) {
    years[i] = params.year_min +
               static_cast<int>((static_cast<std::int64_t>(i) * n_years) / n);
  }

  for (int i = 0; i < n; ++i) {
    auto& paper = result.corpus.papers[i];
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%06d", i + 1);
    paper.id = buf;
    paper.year = years[i];
    std::snprintf(buf, sizeof(buf), "V%03d",
                  static_cast<int>(rng.below(static_cast<std::uint64_t>(params.n_venues))));
    paper.venue = buf;
    double q = std::exp(params.quality_sigma * rng.normal());
    if (rng.unit() < params.planted_quality_fraction) q *= params.planted_boost;
    result.quality[i] = q;
  }

  std::vector<std::int64_t> indegree(n, 0);
  std::vector<double> cumulative;  // reused per paper
  std::vector<int> picked;

  // first_of_year[i] = index of the first paper whose year equals years[i];
  // eligible citation targets for paper i are exactly [0, first_of_year[i]).
  std::vector<int> prefix(n, 0);
  for (int i = 1; i < n; ++i) {
    prefix[i] = (years[i] == years[i - 1]) ? prefix[i - 1] : i;
  }

  for (int i = 0; i < n; ++i) {
    int eligible = prefix[i];
    if (eligible == 0) continue;
    int want = rng.poisson(params.mean_references);
    want = std::min(want, eligible);
    if (want == 0) continue;

    cumulative.assign(eligible, 0.0);
    double total = 0.0;
    for (int j = 0; j < eligible; ++j) {
      double w = result.quality[j] *
                 std::pow(static_cast<double>(indegree[j] + 1), params.attachment_exponent);
      total += w;
      cumulative[j] = total;
    }

    picked.clear();
    std::unordered_set<int> chosen;
    for (int k = 0; k < want; ++k) {
      int target = -1;
      for (int attempt = 0; attempt < 64; ++attempt) {
        double r = rng.unit() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        int idx = static_cast<int>(it - cumulative.begin());
        if (idx >= eligible) idx = eligible - 1;
        if (!chosen.contains(idx)) {
          target = idx;
          break;
        }
      }
      if (target < 0) {
        // Dense collision regime: take the lowest unchosen index.
        for (int j = 0; j < eligible; ++j) {
          if (!chosen.contains(j)) {
            target = j;
            break;
          }
        }
      }
      if (target < 0) break;
      chosen.insert(target);
      picked.push_back(target);
      ++indegree[target];
    }

    auto& refs = result.corpus.papers[i].references;
    refs.reserve(picked.size());
    for (int t : picked) refs.push_back(result.corpus.papers[t].id);
  }

  return result;
}

SampleResult stratified_sample(const Corpus& corpus, const SampleParams& params) {
  if (params.n_bins < 1) fail(ErrorKind::invalid_argument, "n_bins must be >= 1");
  if (corpus.papers.empty()) fail(ErrorKind::domain, "cannot sample from an empty corpus");
  if (params.n_target > corpus.papers.size()) {
    fail(ErrorKind::domain, "n_target (" + std::to_string(params.n_target) +
                                ") exceeds corpus size (" +
                                std::to_string(corpus.papers.size()) + ")");
  }
  if (params.reference_year < corpus.min_year() ||
      params.reference_year > corpus.max_year()) {
    fail(ErrorKind::invalid_argument, "reference_year outside corpus year range");
  }

  SampleResult result;
  result.corpus.source_label = corpus.source_label;

  const std::size_t n = corpus.papers.size();

  // Cumulative citation count as of reference_year: a citation event is dated
  // by the citing paper's publication year.
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) index[corpus.papers[i].id] = i;
  std::vector<std::int64_t> counts(n, 0);
  for (const auto& p : corpus.papers) {
    if (p.year > params.reference_year) continue;
    for (const auto& r : p.references) {
      auto it = index.find(r);
      if (it != index.end()) ++counts[it->second];
    }
  }

  // Equal-population bins: rank papers by (count, id) and chop ranks into
  // n_bins contiguous runs. Rank-based cuts keep bins balanced even on
  // heavy-tailed or fully tied count distributions.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] < counts[b];
    return corpus.papers[a].id < corpus.papers[b].id;
  });

  const std::size_t k = static_cast<std::size_t>(params.n_bins);
  std::vector<std::vector<std::size_t>> bins(k);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t b = (r * k) / n;
    bins[b].push_back(order[r]);
  }

  // Even quotas, remainder to the earliest bins.
  std::vector<std::size_t> quota(k, params.n_target / k);
  for (std::size_t b = 0; b < params.n_target % k; ++b) ++quota[b];

  // Spill quota that a bin cannot fill over to bins with spare capacity.
  bool spilled = false;
  for (;;) {
    std::size_t overflow = 0;
    for (std::size_t b = 0; b < k; ++b) {
      if (quota[b] > bins[b].size()) {
        overflow += quota[b] - bins[b].size();
        quota[b] = bins[b].size();
        spilled = true;
      }
    }
    if (overflow == 0) break;
    bool progress = false;
    for (std::size_t b = 0; b < k && overflow > 0; ++b) {
      if (quota[b] < bins[b].size()) {
        ++quota[b];
        --overflow;
        progress = true;
      }
    }
    if (!progress && overflow > 0) {
      fail(ErrorKind::internal, "stratified_sample: unplaceable quota overflow");
    }
  }
  if (spilled) {
    result.warnings.push_back(
        "one or more strata could not fill their quota; spilled to neighboring bins");
  }

  Rng rng = Rng::substream(params.seed, 0x5a3b);
  std::vector<char> selected(n, 0);
  for (std::size_t b = 0; b < k; ++b) {
    auto& members = bins[b];
    // Partial Fisher-Yates: the first quota[b] slots are a uniform draw.
    for (std::size_t i = 0; i < quota[b]; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(members.size() - i));
      std::swap(members[i], members[j]);
      selected[members[i]] = 1;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (selected[i]) result.corpus.papers.push_back(corpus.papers[i]);
  }
  return result;
}

}  // namespace citequal
