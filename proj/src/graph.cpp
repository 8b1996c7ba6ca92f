#include "graph.hpp"

#include <algorithm>
#include <ostream>
#include <queue>

#include "error.hpp"
#include "text.hpp"

namespace citequal {

CitationGraph CitationGraph::build(const Corpus& corpus) {
  CitationGraph g;
  g.ids_.reserve(corpus.papers.size());
  for (const PaperRecord& p : corpus.papers) {
    int idx = static_cast<int>(g.ids_.size());
    auto [it, inserted] = g.index_.emplace(p.id, idx);
    if (!inserted) fail(ErrorKind::invalid_argument, "duplicate paper id '" + p.id + "'");
    g.ids_.push_back(p.id);
    g.years_.push_back(p.year);
    g.venues_.push_back(p.venue);
  }
  g.in_edges_.resize(g.ids_.size());
  for (std::size_t i = 0; i < corpus.papers.size(); ++i) {
    const PaperRecord& p = corpus.papers[i];
    for (const std::string& ref : p.references) {
      auto it = g.index_.find(ref);
      if (it == g.index_.end()) {
        ++g.dangling_count_;
        continue;
      }
      g.in_edges_[it->second].push_back({static_cast<int>(i), p.year});
      ++g.edge_count_;
    }
  }
  for (std::size_t i = 0; i < g.ids_.size(); ++i) {
    if (!g.venues_[i].empty()) g.venue_index_[g.venues_[i]].push_back(static_cast<int>(i));
  }
  g.finalize_edges();
  return g;
}

void CitationGraph::finalize_edges() {
  for (auto& edges : in_edges_) {
    std::sort(edges.begin(), edges.end(), [this](const InEdge& a, const InEdge& b) {
      if (a.citing_year != b.citing_year) return a.citing_year < b.citing_year;
      return ids_[a.citing] < ids_[b.citing];
    });
  }
}

int CitationGraph::node(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorKind::invalid_argument, "unknown paper id '" + id + "'");
  return it->second;
}

std::int64_t CitationGraph::in_degree_as_of(int node, int year) const {
  const auto& edges = in_edges_[node];
  // Edges are sorted by citing_year first, so the qualifying ones form a prefix.
  auto it = std::upper_bound(edges.begin(), edges.end(), year,
                             [](int y, const InEdge& e) { return y < e.citing_year; });
  return static_cast<std::int64_t>(it - edges.begin());
}

const std::vector<int>* CitationGraph::venue_nodes(const std::string& venue) const {
  auto it = venue_index_.find(venue);
  return it == venue_index_.end() ? nullptr : &it->second;
}

CitationGraph CitationGraph::khop_in_subgraph(const std::string& paper_id, int max_depth,
                                              int as_of_year) const {
  if (max_depth < 0) fail(ErrorKind::invalid_argument, "max_depth must be >= 0");
  int root = node(paper_id);

  std::vector<int> depth(ids_.size(), -1);
  std::vector<int> keep;
  std::queue<int> frontier;
  depth[root] = 0;
  keep.push_back(root);
  frontier.push(root);
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    if (depth[u] == max_depth) continue;
    for (const InEdge& e : in_edges_[u]) {
      if (e.citing_year > as_of_year) continue;
      if (depth[e.citing] != -1) continue;
      depth[e.citing] = depth[u] + 1;
      keep.push_back(e.citing);
      frontier.push(e.citing);
    }
  }

  // Preserve original corpus order so node numbering stays stable.
  std::sort(keep.begin(), keep.end());

  CitationGraph sub;
  std::vector<int> remap(ids_.size(), -1);
  for (int old_idx : keep) {
    int new_idx = static_cast<int>(sub.ids_.size());
    remap[old_idx] = new_idx;
    sub.ids_.push_back(ids_[old_idx]);
    sub.years_.push_back(years_[old_idx]);
    sub.venues_.push_back(venues_[old_idx]);
    sub.index_.emplace(ids_[old_idx], new_idx);
  }
  sub.in_edges_.resize(sub.ids_.size());
  for (int old_idx : keep) {
    for (const InEdge& e : in_edges_[old_idx]) {
      if (e.citing_year > as_of_year) continue;
      if (remap[e.citing] == -1) continue;
      sub.in_edges_[remap[old_idx]].push_back({remap[e.citing], e.citing_year});
      ++sub.edge_count_;
    }
  }
  for (std::size_t i = 0; i < sub.ids_.size(); ++i) {
    if (!sub.venues_[i].empty())
      sub.venue_index_[sub.venues_[i]].push_back(static_cast<int>(i));
  }
  sub.finalize_edges();
  return sub;
}

std::int64_t CitationGraph::citations_in_window(const std::string& paper_id, int from_year,
                                                int to_year) const {
  if (from_year > to_year) fail(ErrorKind::invalid_argument, "citation window is empty");
  int n = node(paper_id);
  std::int64_t count = 0;
  for (const InEdge& e : in_edges_[n]) {
    if (e.citing_year > to_year) break;
    if (e.citing_year >= from_year) ++count;
  }
  return count;
}

void CitationGraph::write_adjacency_csv(std::ostream& out) const {
  out << "citing_id,cited_id,citing_year\n";
  std::vector<std::pair<int, int>> rows;  // (citing, cited)
  rows.reserve(edge_count_);
  for (std::size_t cited = 0; cited < in_edges_.size(); ++cited) {
    for (const InEdge& e : in_edges_[cited]) rows.emplace_back(e.citing, static_cast<int>(cited));
  }
  std::sort(rows.begin(), rows.end(), [this](const auto& a, const auto& b) {
    if (ids_[a.first] != ids_[b.first]) return ids_[a.first] < ids_[b.first];
    return ids_[a.second] < ids_[b.second];
  });
  for (const auto& [citing, cited] : rows) {
    out << csv_field(ids_[citing]) << ',' << csv_field(ids_[cited]) << ','
        << years_[citing] << '\n';
  }
}

GainTrajectory gain_trajectory(const CitationGraph& graph, const std::string& paper_id,
                               int as_of_year) {
  int n = graph.node(paper_id);
  int pub = graph.year_of(n);
  if (as_of_year < pub)
    fail(ErrorKind::invalid_argument,
         "as_of_year " + std::to_string(as_of_year) + " precedes publication year of '" +
             paper_id + "'");
  GainTrajectory t;
  t.paper_id = paper_id;
  t.publishing_year = pub;
  t.gains.assign(static_cast<std::size_t>(as_of_year - pub) + 1, 0);
  for (const auto& e : graph.in_edges(n)) {
    if (e.citing_year > as_of_year) break;
    int offset = std::max(0, e.citing_year - pub);
    ++t.gains[static_cast<std::size_t>(offset)];
  }
  return t;
}

}  // namespace citequal
