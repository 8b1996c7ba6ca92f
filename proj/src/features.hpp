#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "graph.hpp"

namespace citequal {

struct FeatureConfig {
  int max_depth = 2;        // citer-of-citer hops for the diversity subgraph
  double punish = 1.0;      // age penalty per year in timeliness
  int saliency_window = 2;  // years of recent citations in saliency
  int if_span = 2;          // venue history span for the impact factor

  void validate() const;
};

// Feature flags: degenerate inputs handled by convention rather than error.
inline constexpr std::uint32_t kFlagDegenerateGap = 1u << 0;  // as_of == publication year
inline constexpr std::uint32_t kFlagUnknownVenue = 1u << 1;   // impact factor denominator empty

struct FeatureVector {
  std::string paper_id;
  int as_of_year = 0;
  double diversity = 0.0;
  double timeliness = 0.0;
  double saliency = 0.0;
  std::uint32_t flags = 0;
};

// Community count of the citer neighborhood: fast-greedy communities of the
// max_depth-hop in-citation subgraph as of the cutoff year. Always >= 1.
double diversity(const CitationGraph& graph, const std::string& paper_id, int as_of_year,
                 const FeatureConfig& config);

// Mean citation-gain gradient minus an age penalty: with gap = as_of_year -
// publishing_year and yearly gains g_0..g_gap (g_{-1} := 0),
//   T = (1/gap) * sum_{i=0..gap} (g_i - g_{i-1}) - gap * punish.
// gap == 0 returns 0 (flag set if `flags` given) instead of dividing by zero.
double timeliness(const CitationGraph& graph, const std::string& paper_id, int as_of_year,
                  const FeatureConfig& config, std::uint32_t* flags = nullptr);

struct VenueImpact {
  double value = 0.0;
  bool unknown = false;  // no venue papers in the span; value is 0 by convention
};

// Citations received in year `year` by the venue's papers published in
// [year - if_span, year - 1], divided by the number of such papers.
VenueImpact venue_impact_factor(const CitationGraph& graph, const std::string& venue,
                                int year, int if_span);

// Citations gained in the last saliency_window years minus the venue impact
// factor at the cutoff year.
double saliency(const CitationGraph& graph, const std::string& paper_id, int as_of_year,
                const FeatureConfig& config, std::uint32_t* flags = nullptr);

FeatureVector extract_one(const CitationGraph& graph, const std::string& paper_id,
                          int as_of_year, const FeatureConfig& config);

// Batch extraction; output order matches input order and is bit-identical
// for any jobs count. Unknown ids error naming the id.
std::vector<FeatureVector> extract_features(const CitationGraph& graph,
                                            const std::vector<std::string>& paper_ids,
                                            int as_of_year, const FeatureConfig& config,
                                            int jobs = 1);

// CSV columns: paper_id, as_of_year, diversity, timeliness, saliency, flags.
void write_features_csv(const std::vector<FeatureVector>& rows, std::ostream& out);

std::string flag_names(std::uint32_t flags);

}  // namespace citequal
