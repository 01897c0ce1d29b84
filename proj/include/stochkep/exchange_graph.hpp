#pragma once

// Compatibility digraph for a kidney-exchange pool. Vertices are incompatible
// patient-donor pairs plus non-directed donors (NDDs); a directed edge (u, v)
// means u's donor can give to v's patient and carries a benefit weight and an
// independent failure probability. Pools are cleared by packing vertex-disjoint
// short cycles over pairs and NDD-initiated chains.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stochkep {

enum class VertexKind { Pair, Ndd };

struct Vertex {
  int id = 0;
  VertexKind kind = VertexKind::Pair;
};

struct Edge {
  int id = 0;
  int src = 0;
  int dst = 0;
  double weight = 1.0;
  double fail_prob = 0.0;
};

// Packing caps: cycles use at most `cycle_cap` edges, chains at most
// `chain_cap` edges (the NDD's own donation is edge 1 of its chain).
struct Caps {
  int cycle_cap = 3;
  int chain_cap = 4;
};

// A directed cycle over pair vertices, stored as the edge sequence starting at
// the smallest vertex id on the cycle. `weight` caches the plain edge-weight
// sum.
struct Cycle {
  std::vector<int> edges;
  double weight = 0.0;
};

// An NDD-initiated path: edge 1 leaves the NDD, every later edge continues
// from the previous recipient.
struct Chain {
  std::vector<int> edges;
};

struct Matching {
  std::vector<Cycle> cycles;
  std::vector<Chain> chains;
};

struct Violation {
  std::string message;
  int vertex_id = -1;
  int edge_id = -1;
};

class ExchangeGraph {
 public:
  ExchangeGraph() = default;

  // Vertices and edges must come with dense ids equal to their positions and
  // in-range endpoints; anything structurally unusable throws. Semantic
  // problems (self-loops, duplicate arcs, edges into NDDs, bad ranges) are
  // left to validate_graph so callers can report them all at once.
  ExchangeGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
      : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (vertices_[i].id != static_cast<int>(i)) {
        throw std::invalid_argument("vertex ids must be dense 0..n-1 in order");
      }
    }
    const int n = static_cast<int>(vertices_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (e.id != static_cast<int>(i)) {
        throw std::invalid_argument("edge ids must be dense 0..m-1 in order");
      }
      if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
        throw std::invalid_argument("edge endpoint out of range: edge " +
                                    std::to_string(e.id));
      }
    }
    out_.assign(vertices_.size(), {});
    in_.assign(vertices_.size(), {});
    for (const Edge& e : edges_) {
      out_[e.src].push_back(e.id);
      in_[e.dst].push_back(e.id);
    }
    for (const Vertex& v : vertices_) {
      if (v.kind == VertexKind::Pair) {
        ++num_pairs_;
      } else {
        ++num_ndds_;
      }
    }
  }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_pairs() const { return num_pairs_; }
  int num_ndds() const { return num_ndds_; }

  const Vertex& vertex(int id) const { return vertices_.at(id); }
  const Edge& edge(int id) const { return edges_.at(id); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool is_pair(int v) const { return vertex(v).kind == VertexKind::Pair; }
  bool is_ndd(int v) const { return vertex(v).kind == VertexKind::Ndd; }

  // Edge ids leaving / entering a vertex, ascending by edge id.
  const std::vector<int>& out_edges(int v) const { return out_.at(v); }
  const std::vector<int>& in_edges(int v) const { return in_.at(v); }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  int num_pairs_ = 0;
  int num_ndds_ = 0;
};

// Reports every semantic violation in the pool; an empty result means the
// graph is usable by every solver and sampler in this library.
inline std::vector<Violation> validate_graph(const ExchangeGraph& g) {
  std::vector<Violation> out;
  std::vector<std::vector<int>> seen_pairs(g.num_vertices());
  for (const Edge& e : g.edges()) {
    if (e.src == e.dst) {
      out.push_back({"self-loop", -1, e.id});
    }
    if (g.is_ndd(e.dst)) {
      out.push_back({"edge points into a non-directed donor", -1, e.id});
    }
    if (!(std::isfinite(e.weight)) || e.weight < 0.0) {
      out.push_back({"edge weight must be finite and nonnegative", -1, e.id});
    }
    if (!(e.fail_prob >= 0.0 && e.fail_prob <= 1.0)) {
      out.push_back({"failure probability outside [0, 1]", -1, e.id});
    }
    auto& row = seen_pairs[e.src];
    if (std::find(row.begin(), row.end(), e.dst) != row.end()) {
      out.push_back({"duplicate arc between the same ordered vertex pair", -1, e.id});
    } else {
      row.push_back(e.dst);
    }
  }
  return out;
}

// All simple directed cycles over pair vertices with at most `cycle_cap`
// edges. Each cycle is emitted exactly once, rotated so it starts at its
// smallest vertex id: the search roots a DFS at every pair vertex in turn and
// only walks through vertices with larger ids.
inline std::vector<Cycle> enumerate_cycles(const ExchangeGraph& g, int cycle_cap) {
  std::vector<Cycle> cycles;
  if (cycle_cap < 2) return cycles;
  std::vector<char> on_path(g.num_vertices(), 0);
  std::vector<int> path;  // edge ids

  for (int root = 0; root < g.num_vertices(); ++root) {
    if (!g.is_pair(root)) continue;
    on_path[root] = 1;

    // Plain recursive walk; depth is bounded by the cap.
    auto dfs = [&](auto&& self, int v) -> void {
      for (int eid : g.out_edges(v)) {
        const Edge& e = g.edge(eid);
        if (!g.is_pair(e.dst)) continue;
        if (e.dst == root) {
          if (path.size() + 1 >= 2) {
            Cycle c;
            c.edges = path;
            c.edges.push_back(eid);
            for (int ce : c.edges) c.weight += g.edge(ce).weight;
            cycles.push_back(std::move(c));
          }
          continue;
        }
        if (e.dst < root || on_path[e.dst]) continue;
        if (static_cast<int>(path.size()) + 2 > cycle_cap) continue;
        on_path[e.dst] = 1;
        path.push_back(eid);
        self(self, e.dst);
        path.pop_back();
        on_path[e.dst] = 0;
      }
    };
    dfs(dfs, root);
    on_path[root] = 0;
  }
  return cycles;
}

// Chain positions an edge may occupy: position 1 is reserved for edges leaving
// an NDD, edges between pairs can sit at positions 2..chain_cap.
inline std::vector<int> chain_positions(const ExchangeGraph& g, const Edge& e,
                                        int chain_cap) {
  std::vector<int> ks;
  if (g.is_ndd(e.src)) {
    if (chain_cap >= 1) ks.push_back(1);
  } else {
    for (int k = 2; k <= chain_cap; ++k) ks.push_back(k);
  }
  return ks;
}

namespace detail {

// Marks the vertices a cycle touches; returns false on any structural defect
// (bad edge ids, broken connectivity, repeated or non-pair vertices, cap).
inline bool check_cycle(const ExchangeGraph& g, const Cycle& c, int cycle_cap,
                        std::vector<char>& used) {
  const int k = static_cast<int>(c.edges.size());
  if (k < 2 || k > cycle_cap) return false;
  for (int eid : c.edges) {
    if (eid < 0 || eid >= g.num_edges()) return false;
  }
  for (int i = 0; i < k; ++i) {
    const Edge& cur = g.edge(c.edges[i]);
    const Edge& nxt = g.edge(c.edges[(i + 1) % k]);
    if (cur.dst != nxt.src) return false;
    if (!g.is_pair(cur.src)) return false;
    if (used[cur.src]) return false;
    used[cur.src] = 1;
  }
  return true;
}

inline bool check_chain(const ExchangeGraph& g, const Chain& c, int chain_cap,
                        std::vector<char>& used) {
  const int k = static_cast<int>(c.edges.size());
  if (k < 1 || k > chain_cap) return false;
  for (int eid : c.edges) {
    if (eid < 0 || eid >= g.num_edges()) return false;
  }
  const Edge& first = g.edge(c.edges[0]);
  if (!g.is_ndd(first.src) || used[first.src]) return false;
  used[first.src] = 1;
  int at = first.src;
  for (int eid : c.edges) {
    const Edge& e = g.edge(eid);
    if (e.src != at) return false;
    if (!g.is_pair(e.dst) || used[e.dst]) return false;
    used[e.dst] = 1;
    at = e.dst;
  }
  return true;
}

}  // namespace detail

// True iff the matching packs structurally valid, cap-respecting cycles and
// chains that are pairwise vertex-disjoint in `g`.
inline bool is_feasible_matching(const ExchangeGraph& g, const Matching& m,
                                 const Caps& caps) {
  std::vector<char> used(g.num_vertices(), 0);
  for (const Cycle& c : m.cycles) {
    if (!detail::check_cycle(g, c, caps.cycle_cap, used)) return false;
  }
  for (const Chain& c : m.chains) {
    if (!detail::check_chain(g, c, caps.chain_cap, used)) return false;
  }
  return true;
}

}  // namespace stochkep
