#include "community.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>

#include "error.hpp"
#include "text.hpp"

namespace citequal {

namespace {

constexpr double kGainEps = 1e-12;

struct UndirectedView {
  int n = 0;
  std::int64_t m = 0;                  // simple undirected edge count
  std::vector<std::vector<int>> adj;   // sorted neighbor lists, no self-loops
  std::vector<std::int64_t> degree;
};

UndirectedView undirected_view(const CitationGraph& graph) {
  UndirectedView v;
  v.n = static_cast<int>(graph.node_count());
  std::vector<std::set<int>> nbr(static_cast<std::size_t>(v.n));
  for (int cited = 0; cited < v.n; ++cited) {
    for (const CitationGraph::InEdge& e : graph.in_edges(cited)) {
      if (e.citing == cited) continue;
      nbr[static_cast<std::size_t>(cited)].insert(e.citing);
      nbr[static_cast<std::size_t>(e.citing)].insert(cited);
    }
  }
  v.adj.resize(static_cast<std::size_t>(v.n));
  v.degree.assign(static_cast<std::size_t>(v.n), 0);
  for (int u = 0; u < v.n; ++u) {
    v.adj[static_cast<std::size_t>(u)].assign(nbr[static_cast<std::size_t>(u)].begin(),
                                              nbr[static_cast<std::size_t>(u)].end());
    v.degree[static_cast<std::size_t>(u)] =
        static_cast<std::int64_t>(v.adj[static_cast<std::size_t>(u)].size());
    v.m += v.degree[static_cast<std::size_t>(u)];
  }
  v.m /= 2;
  return v;
}

double modularity_of(const UndirectedView& v, const std::vector<int>& membership,
                     int community_count) {
  std::vector<double> intra(static_cast<std::size_t>(community_count), 0.0);
  std::vector<double> deg(static_cast<std::size_t>(community_count), 0.0);
  for (int u = 0; u < v.n; ++u) {
    int cu = membership[static_cast<std::size_t>(u)];
    deg[static_cast<std::size_t>(cu)] += static_cast<double>(v.degree[static_cast<std::size_t>(u)]);
    for (int w : v.adj[static_cast<std::size_t>(u)]) {
      if (w > u) continue;  // each undirected edge once
      if (membership[static_cast<std::size_t>(w)] == cu) intra[static_cast<std::size_t>(cu)] += 1.0;
    }
  }
  double m = static_cast<double>(v.m);
  double q = 0.0;
  for (int c = 0; c < community_count; ++c) {
    double frac = deg[static_cast<std::size_t>(c)] / (2.0 * m);
    q += intra[static_cast<std::size_t>(c)] / m - frac * frac;
  }
  return q;
}

void check_assignment(const UndirectedView& v, const std::vector<int>& membership,
                      int* community_count) {
  if (static_cast<int>(membership.size()) != v.n)
    fail(ErrorKind::invalid_argument, "partition does not assign every node");
  int max_c = -1;
  for (int c : membership) {
    if (c < 0) fail(ErrorKind::invalid_argument, "negative community index");
    max_c = std::max(max_c, c);
  }
  *community_count = max_c + 1;
}

// Renumber communities contiguously, ordered by smallest member id.
Partition canonicalize(const CitationGraph& graph, const std::vector<int>& raw,
                       double q, bool degenerate) {
  int raw_count = 0;
  for (int c : raw) raw_count = std::max(raw_count, c + 1);
  std::vector<std::string> canonical(static_cast<std::size_t>(raw_count));
  for (std::size_t u = 0; u < raw.size(); ++u) {
    auto& can = canonical[static_cast<std::size_t>(raw[u])];
    const std::string& id = graph.id_of(static_cast<int>(u));
    if (can.empty() || id < can) can = id;
  }
  std::vector<int> order;
  for (int c = 0; c < raw_count; ++c)
    if (!canonical[static_cast<std::size_t>(c)].empty()) order.push_back(c);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return canonical[static_cast<std::size_t>(a)] < canonical[static_cast<std::size_t>(b)];
  });
  std::vector<int> remap(static_cast<std::size_t>(raw_count), -1);
  for (std::size_t i = 0; i < order.size(); ++i)
    remap[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

  Partition p;
  p.membership.resize(raw.size());
  for (std::size_t u = 0; u < raw.size(); ++u)
    p.membership[u] = remap[static_cast<std::size_t>(raw[u])];
  p.community_count = static_cast<int>(order.size());
  p.modularity = q;
  p.degenerate = degenerate;
  return p;
}

Partition all_singletons(const CitationGraph& graph) {
  std::vector<int> raw(graph.node_count());
  for (std::size_t u = 0; u < raw.size(); ++u) raw[u] = static_cast<int>(u);
  return canonicalize(graph, raw, 0.0, true);
}

Partition greedy_impl(const CitationGraph& graph, std::vector<MergeStep>* trace) {
  if (graph.node_count() == 0) fail(ErrorKind::invalid_argument, "empty graph");
  UndirectedView v = undirected_view(graph);
  if (v.m == 0) return all_singletons(graph);

  struct Comm {
    bool alive = true;
    std::string canonical;
    std::int64_t degree = 0;
    std::map<int, double> edges;  // neighbor community -> shared edge count
  };
  std::vector<Comm> comms(static_cast<std::size_t>(v.n));
  std::vector<int> raw(static_cast<std::size_t>(v.n));
  for (int u = 0; u < v.n; ++u) {
    raw[static_cast<std::size_t>(u)] = u;
    Comm& c = comms[static_cast<std::size_t>(u)];
    c.canonical = graph.id_of(u);
    c.degree = v.degree[static_cast<std::size_t>(u)];
    for (int w : v.adj[static_cast<std::size_t>(u)]) c.edges[w] = 1.0;
  }

  double m = static_cast<double>(v.m);
  double q = modularity_of(v, raw, v.n);

  while (true) {
    int best_a = -1, best_b = -1;
    double best_dq = 0.0;
    for (int i = 0; i < v.n; ++i) {
      const Comm& ci = comms[static_cast<std::size_t>(i)];
      if (!ci.alive) continue;
      for (const auto& [j, e_ij] : ci.edges) {
        if (j <= i) continue;
        const Comm& cj = comms[static_cast<std::size_t>(j)];
        double dq = e_ij / m - static_cast<double>(ci.degree) * static_cast<double>(cj.degree) /
                                   (2.0 * m * m);
        bool take = false;
        if (best_a == -1 || dq > best_dq + kGainEps) {
          take = true;
        } else if (dq > best_dq - kGainEps) {
          auto key = [&](int x, int y) {
            const std::string& cx = comms[static_cast<std::size_t>(x)].canonical;
            const std::string& cy = comms[static_cast<std::size_t>(y)].canonical;
            return cx <= cy ? std::pair(cx, cy) : std::pair(cy, cx);
          };
          take = key(i, j) < key(best_a, best_b);
        }
        if (take) {
          best_a = i;
          best_b = j;
          best_dq = dq;
        }
      }
    }
    if (best_a == -1 || best_dq <= kGainEps) break;

    // Survivor is the side with the smaller canonical id.
    int into = best_a, from = best_b;
    if (comms[static_cast<std::size_t>(from)].canonical <
        comms[static_cast<std::size_t>(into)].canonical)
      std::swap(into, from);
    Comm& ci = comms[static_cast<std::size_t>(into)];
    Comm& cf = comms[static_cast<std::size_t>(from)];
    q += best_dq;
    if (trace) trace->push_back({cf.canonical, ci.canonical, best_dq, q});

    ci.degree += cf.degree;
    ci.edges.erase(from);
    cf.edges.erase(into);
    for (const auto& [k, w] : cf.edges) {
      Comm& ck = comms[static_cast<std::size_t>(k)];
      ci.edges[k] += w;
      ck.edges.erase(from);
      ck.edges[into] = ci.edges[k];
    }
    cf.alive = false;
    cf.edges.clear();
    for (int& r : raw)
      if (r == from) r = into;
  }

  Partition p = canonicalize(graph, raw, q, false);
  // Store the from-scratch value so the invariant holds exactly.
  p.modularity = modularity_of(v, p.membership, p.community_count);
  return p;
}

}  // namespace

double modularity(const CitationGraph& graph, const std::vector<int>& membership) {
  UndirectedView v = undirected_view(graph);
  if (v.m == 0) fail(ErrorKind::domain, "modularity undefined on a zero-edge graph");
  int community_count = 0;
  check_assignment(v, membership, &community_count);
  return modularity_of(v, membership, community_count);
}

Partition fast_greedy_communities(const CitationGraph& graph) {
  return greedy_impl(graph, nullptr);
}

Partition fast_greedy_communities_trace(const CitationGraph& graph,
                                        std::vector<MergeStep>* trace) {
  return greedy_impl(graph, trace);
}

Partition brute_force_max_modularity(const CitationGraph& graph) {
  if (graph.node_count() == 0) fail(ErrorKind::invalid_argument, "empty graph");
  if (graph.node_count() > 10)
    fail(ErrorKind::invalid_argument, "brute force limited to 10 nodes");
  UndirectedView v = undirected_view(graph);
  if (v.m == 0) return all_singletons(graph);

  // Enumerate set partitions as restricted growth strings: rgs[0] = 0 and
  // rgs[i] <= max(rgs[0..i-1]) + 1.
  std::size_t n = graph.node_count();
  std::vector<int> rgs(n, 0);
  auto next_rgs = [&]() {
    for (std::size_t i = n; i-- > 1;) {
      int cap = 0;
      for (std::size_t j = 0; j < i; ++j) cap = std::max(cap, rgs[j]);
      if (rgs[i] <= cap) {
        ++rgs[i];
        std::fill(rgs.begin() + static_cast<std::ptrdiff_t>(i) + 1, rgs.end(), 0);
        return true;
      }
    }
    return false;
  };
  std::vector<int> best;
  double best_q = 0.0;
  bool have = false;
  do {
    int count = 0;
    for (int c : rgs) count = std::max(count, c + 1);
    double q = modularity_of(v, rgs, count);
    if (!have || q > best_q + kGainEps) {
      have = true;
      best_q = q;
      best = rgs;
    }
  } while (next_rgs());
  Partition p = canonicalize(graph, best, best_q, false);
  p.modularity = modularity_of(v, p.membership, p.community_count);
  return p;
}

void write_partition_csv(const CitationGraph& graph, const Partition& partition,
                         std::ostream& out) {
  if (partition.membership.size() != graph.node_count())
    fail(ErrorKind::invalid_argument, "partition does not match graph");
  out << "node_id,community_index\n";
  std::vector<int> order(graph.node_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return graph.id_of(a) < graph.id_of(b); });
  for (int u : order)
    out << csv_field(graph.id_of(u)) << ',' << partition.membership[static_cast<std::size_t>(u)]
        << '\n';
}

}  // namespace citequal
