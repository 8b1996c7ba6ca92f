#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"

namespace citequal {

// Immutable directed citation graph. Edges run citing -> cited and carry the
// citing paper's publication year as the citation event time (the only
// timestamp citation corpora provide). Dangling references are dropped at
// construction and counted. All queries are read-only and safe to run
// concurrently.
class CitationGraph {
 public:
  struct InEdge {
    int citing;       // node index of the citing paper
    int citing_year;  // == year of the citing paper
  };

  static CitationGraph build(const Corpus& corpus);

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::size_t dangling_count() const { return dangling_count_; }

  bool has_node(const std::string& id) const { return index_.contains(id); }
  // Errors on an unknown id.
  int node(const std::string& id) const;

  const std::string& id_of(int node) const { return ids_[node]; }
  int year_of(int node) const { return years_[node]; }
  const std::string& venue_of(int node) const { return venues_[node]; }

  // In-edges of a node, sorted by (citing_year, citing id).
  const std::vector<InEdge>& in_edges(int node) const { return in_edges_[node]; }

  // Number of in-edges with citing_year <= year.
  std::int64_t in_degree_as_of(int node, int year) const;

  // Node indices of papers published in `venue`, or nullptr if the venue
  // never occurs. Empty venue strings are not indexed.
  const std::vector<int>* venue_nodes(const std::string& venue) const;

  // Induced subgraph on the set reachable from paper_id by following
  // in-edges (citers, citers-of-citers, ...) for at most max_depth hops,
  // using only edges with citing_year <= as_of_year. All qualifying edges
  // among retained nodes are kept, not just the traversal tree.
  CitationGraph khop_in_subgraph(const std::string& paper_id, int max_depth,
                                 int as_of_year) const;

  std::int64_t citations_in_window(const std::string& paper_id, int from_year,
                                   int to_year) const;

  // Rows sorted by (citing_id, cited_id) so the dump does not depend on
  // corpus input order.
  void write_adjacency_csv(std::ostream& out) const;

 private:
  std::vector<std::string> ids_;
  std::vector<int> years_;
  std::vector<std::string> venues_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<InEdge>> in_edges_;
  std::unordered_map<std::string, std::vector<int>> venue_index_;
  std::size_t edge_count_ = 0;
  std::size_t dangling_count_ = 0;

  void finalize_edges();
};

struct GainTrajectory {
  std::string paper_id;
  int publishing_year = 0;
  // gains[i] = citations gained in calendar year publishing_year + i.
  std::vector<std::int64_t> gains;
};

// Yearly citation gains from publication through as_of_year inclusive.
// Citations dated before the publication year (year noise in real corpora)
// are folded into the first bin so that the running sum always equals the
// time-filtered in-degree. Errors if as_of_year precedes publication.
GainTrajectory gain_trajectory(const CitationGraph& graph,
                               const std::string& paper_id, int as_of_year);

}  // namespace citequal
