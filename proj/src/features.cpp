#include "features.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include "community.hpp"
#include "error.hpp"
#include "text.hpp"

namespace citequal {

void FeatureConfig::validate() const {
  if (max_depth < 0) fail(ErrorKind::invalid_argument, "max_depth must be >= 0");
  if (punish < 0.0) fail(ErrorKind::invalid_argument, "punish must be >= 0");
  if (saliency_window < 1) fail(ErrorKind::invalid_argument, "saliency_window must be >= 1");
  if (if_span < 1) fail(ErrorKind::invalid_argument, "if_span must be >= 1");
}

double diversity(const CitationGraph& graph, const std::string& paper_id, int as_of_year,
                 const FeatureConfig& config) {
  config.validate();
  int n = graph.node(paper_id);
  if (as_of_year < graph.year_of(n))
    fail(ErrorKind::invalid_argument, "as_of_year precedes publication of '" + paper_id + "'");
  CitationGraph sub = graph.khop_in_subgraph(paper_id, config.max_depth, as_of_year);
  return static_cast<double>(fast_greedy_communities(sub).community_count);
}

double timeliness(const CitationGraph& graph, const std::string& paper_id, int as_of_year,
                  const FeatureConfig& config, std::uint32_t* flags) {
  config.validate();
  GainTrajectory traj = gain_trajectory(graph, paper_id, as_of_year);
  int gap = as_of_year - traj.publishing_year;
  if (gap == 0) {
    if (flags) *flags |= kFlagDegenerateGap;
    return 0.0;
  }
  double grad_sum = 0.0;
  double prev = 0.0;
  for (std::int64_t g : traj.gains) {
    grad_sum += static_cast<double>(g) - prev;
    prev = static_cast<double>(g);
  }
  return grad_sum / static_cast<double>(gap) - static_cast<double>(gap) * config.punish;
}

VenueImpact venue_impact_factor(const CitationGraph& graph, const std::string& venue,
                                int year, int if_span) {
  if (if_span < 1) fail(ErrorKind::invalid_argument, "if_span must be >= 1");
  VenueImpact out;
  const std::vector<int>* nodes = graph.venue_nodes(venue);
  if (nodes == nullptr) {
    out.unknown = true;
    return out;
  }
  std::int64_t citations = 0;
  std::int64_t papers = 0;
  for (int n : *nodes) {
    int py = graph.year_of(n);
    if (py < year - if_span || py > year - 1) continue;
    ++papers;
    citations += graph.citations_in_window(graph.id_of(n), year, year);
  }
  if (papers == 0) {
    out.unknown = true;
    return out;
  }
  out.value = static_cast<double>(citations) / static_cast<double>(papers);
  return out;
}

double saliency(const CitationGraph& graph, const std::string& paper_id, int as_of_year,
                const FeatureConfig& config, std::uint32_t* flags) {
  config.validate();
  int n = graph.node(paper_id);
  std::int64_t recent = graph.citations_in_window(
      paper_id, as_of_year - config.saliency_window + 1, as_of_year);
  VenueImpact vif = venue_impact_factor(graph, graph.venue_of(n), as_of_year, config.if_span);
  if (vif.unknown && flags) *flags |= kFlagUnknownVenue;
  return static_cast<double>(recent) - vif.value;
}

FeatureVector extract_one(const CitationGraph& graph, const std::string& paper_id,
                          int as_of_year, const FeatureConfig& config) {
  FeatureVector v;
  v.paper_id = paper_id;
  v.as_of_year = as_of_year;
  v.diversity = diversity(graph, paper_id, as_of_year, config);
  v.timeliness = timeliness(graph, paper_id, as_of_year, config, &v.flags);
  v.saliency = saliency(graph, paper_id, as_of_year, config, &v.flags);
  return v;
}

std::vector<FeatureVector> extract_features(const CitationGraph& graph,
                                            const std::vector<std::string>& paper_ids,
                                            int as_of_year, const FeatureConfig& config,
                                            int jobs) {
  config.validate();
  if (jobs < 1) fail(ErrorKind::invalid_argument, "jobs must be >= 1");
  for (const std::string& id : paper_ids)
    if (!graph.has_node(id)) fail(ErrorKind::invalid_argument, "unknown paper id '" + id + "'");

  std::vector<FeatureVector> out(paper_ids.size());
  int workers = jobs;
  if (static_cast<std::size_t>(workers) > paper_ids.size())
    workers = static_cast<int>(paper_ids.size());
  if (workers <= 1 || paper_ids.size() < 2) {
    for (std::size_t i = 0; i < paper_ids.size(); ++i)
      out[i] = extract_one(graph, paper_ids[i], as_of_year, config);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < paper_ids.size();
           i += static_cast<std::size_t>(workers))
        out[i] = extract_one(graph, paper_ids[i], as_of_year, config);
    });
  }
  for (std::thread& t : pool) t.join();
  return out;
}

std::string flag_names(std::uint32_t flags) {
  std::string s;
  auto add = [&s](const char* name) {
    if (!s.empty()) s += ';';
    s += name;
  };
  if (flags & kFlagDegenerateGap) add("degenerate_gap");
  if (flags & kFlagUnknownVenue) add("unknown_venue");
  return s;
}

void write_features_csv(const std::vector<FeatureVector>& rows, std::ostream& out) {
  out << "paper_id,as_of_year,diversity,timeliness,saliency,flags\n";
  for (const FeatureVector& v : rows) {
    out << csv_field(v.paper_id) << ',' << v.as_of_year << ',' << fmt_double(v.diversity)
        << ',' << fmt_double(v.timeliness) << ',' << fmt_double(v.saliency) << ','
        << flag_names(v.flags) << '\n';
  }
}

}  // namespace citequal
