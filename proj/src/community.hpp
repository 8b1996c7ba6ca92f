#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "graph.hpp"

namespace citequal {

struct Partition {
  // membership[node] = community index. Indices are contiguous from 0 and
  // communities are ordered by their smallest member id (lexicographic), so
  // the labeling does not depend on merge order.
  std::vector<int> membership;
  int community_count = 0;
  double modularity = 0.0;
  bool degenerate = false;  // graph had no undirected edges; Q is 0 by convention
};

struct MergeStep {
  std::string absorbed;  // canonical id (smallest member id) of each side
  std::string into;
  double delta_q;
  double modularity_after;
};

// Newman modularity Q = sum_c [L_c/m - (D_c/2m)^2] of a node partition over
// the undirected simple view of `graph` (direction dropped, parallel edges
// collapsed, self-loops removed). Errors on a zero-edge view or an
// incomplete assignment.
double modularity(const CitationGraph& graph, const std::vector<int>& membership);

// Greedy agglomerative maximization: start from singletons, repeatedly merge
// the connected pair with the largest modularity gain, stop when no merge
// gains. Since every accepted merge strictly increases Q, the final state is
// the maximum along the merge sequence. Deterministic: gain ties are broken
// toward the pair with the lexicographically smallest canonical ids.
// Zero-edge graphs yield all-singleton partitions flagged degenerate; an
// empty graph is an error.
Partition fast_greedy_communities(const CitationGraph& graph);

// Same algorithm, recording every accepted merge in order.
Partition fast_greedy_communities_trace(const CitationGraph& graph,
                                        std::vector<MergeStep>* trace);

// Exhaustive maximum over all set partitions; errors above 10 nodes. Ties
// resolve to the first maximum in restricted-growth-string order.
Partition brute_force_max_modularity(const CitationGraph& graph);

// CSV dump: node_id, community_index.
void write_partition_csv(const CitationGraph& graph, const Partition& partition,
                         std::ostream& out);

}  // namespace citequal
