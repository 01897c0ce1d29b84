#pragma once

// Expected transplant value under independent edge failures, plus an exact
// enumeration solver used as a ground-truth oracle on small pools.
//
// A cycle only counts if every edge on it survives, so its expected value is
// the weight sum discounted by the product of survival probabilities. A chain
// executes sequentially and keeps its surviving prefix; its expected value can
// be written either by conditioning on the first failure position (direct
// form) or by summing each edge's weight times the probability that the chain
// reaches it (prefix form). Both forms are implemented because their algebraic
// equality is a useful self-check.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stochkep/exchange_graph.hpp"

namespace stochkep {

inline double cycle_discounted_weight(const ExchangeGraph& g, const Cycle& c) {
  double weight = 0.0;
  double survive = 1.0;
  for (int eid : c.edges) {
    weight += g.edge(eid).weight;
    survive *= 1.0 - g.edge(eid).fail_prob;
  }
  return weight * survive;
}

// Conditioning on the first edge that fails: if edge i (1-based) is the first
// failure, the chain banks the weight of edges 1..i-1; if nothing fails it
// banks everything.
inline double chain_discounted_weight_direct(const ExchangeGraph& g,
                                             const Chain& c) {
  const int k = static_cast<int>(c.edges.size());
  double total = 0.0;
  double prefix_weight = 0.0;
  double prefix_survive = 1.0;
  for (int i = 0; i < k; ++i) {
    const Edge& e = g.edge(c.edges[i]);
    total += e.fail_prob * prefix_weight * prefix_survive;
    prefix_weight += e.weight;
    prefix_survive *= 1.0 - e.fail_prob;
  }
  total += prefix_weight * prefix_survive;
  return total;
}

// Linearity of expectation over "the chain reaches edge i": edge i pays off
// iff edges 1..i all survive.
inline double chain_discounted_weight_prefix(const ExchangeGraph& g,
                                             const Chain& c) {
  double total = 0.0;
  double survive = 1.0;
  for (int eid : c.edges) {
    const Edge& e = g.edge(eid);
    survive *= 1.0 - e.fail_prob;
    total += e.weight * survive;
  }
  return total;
}

inline double matching_expected_weight(const ExchangeGraph& g, const Matching& m) {
  double total = 0.0;
  for (const Cycle& c : m.cycles) total += cycle_discounted_weight(g, c);
  for (const Chain& c : m.chains) total += chain_discounted_weight_prefix(g, c);
  return total;
}

// Plain weight ignoring failures (every planned transplant happens).
inline double matching_total_weight(const ExchangeGraph& g, const Matching& m) {
  double total = 0.0;
  for (const Cycle& c : m.cycles) {
    for (int eid : c.edges) total += g.edge(eid).weight;
  }
  for (const Chain& c : m.chains) {
    for (int eid : c.edges) total += g.edge(eid).weight;
  }
  return total;
}

// All NDD-initiated chains with 1..chain_cap edges; every prefix is its own
// chain. Deterministic order: by NDD id, then DFS in edge-id order.
inline std::vector<Chain> enumerate_chains(const ExchangeGraph& g, int chain_cap) {
  std::vector<Chain> chains;
  if (chain_cap < 1) return chains;
  std::vector<char> on_path(g.num_vertices(), 0);
  std::vector<int> path;

  auto dfs = [&](auto&& self, int v) -> void {
    if (static_cast<int>(path.size()) >= chain_cap) return;
    for (int eid : g.out_edges(v)) {
      const Edge& e = g.edge(eid);
      if (!g.is_pair(e.dst) || on_path[e.dst]) continue;
      path.push_back(eid);
      chains.push_back({path});
      on_path[e.dst] = 1;
      self(self, e.dst);
      on_path[e.dst] = 0;
      path.pop_back();
    }
  };

  for (int v = 0; v < g.num_vertices(); ++v) {
    if (!g.is_ndd(v)) continue;
    on_path[v] = 1;
    dfs(dfs, v);
    on_path[v] = 0;
  }
  return chains;
}

enum class Objective { Deterministic, Expected };

struct OracleLimits {
  std::uint64_t max_matchings = 10'000'000;
};

class EnumerationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  Matching matching;
  double value = 0.0;
  std::uint64_t matchings_enumerated = 0;
};

namespace detail {

// Visits every feasible matching once by deciding skip/take for each candidate
// structure, tracking used vertices. `visit(value, chosen)` runs at each leaf;
// `chosen` indexes into the candidate list.
template <typename Visit>
void for_each_feasible_matching(const ExchangeGraph& g,
                                const std::vector<std::vector<int>>& item_vertices,
                                const std::vector<double>& item_value,
                                Visit&& visit) {
  std::vector<char> used(g.num_vertices(), 0);
  std::vector<int> chosen;
  const int n = static_cast<int>(item_vertices.size());

  auto rec = [&](auto&& self, int i, double value) -> void {
    if (i == n) {
      visit(value, chosen);
      return;
    }
    self(self, i + 1, value);  // skip
    for (int v : item_vertices[i]) {
      if (used[v]) return;
    }
    for (int v : item_vertices[i]) used[v] = 1;
    chosen.push_back(i);
    self(self, i + 1, value + item_value[i]);
    chosen.pop_back();
    for (int v : item_vertices[i]) used[v] = 0;
  };
  rec(rec, 0, 0.0);
}

inline std::vector<int> cycle_vertices(const ExchangeGraph& g, const Cycle& c) {
  std::vector<int> vs;
  for (int eid : c.edges) vs.push_back(g.edge(eid).src);
  return vs;
}

inline std::vector<int> chain_vertices(const ExchangeGraph& g, const Chain& c) {
  std::vector<int> vs;
  vs.push_back(g.edge(c.edges.front()).src);
  for (int eid : c.edges) vs.push_back(g.edge(eid).dst);
  return vs;
}

}  // namespace detail

// Exhaustive optimum over all feasible matchings. Exponential: intended for
// pools small enough that the count stays under `limits.max_matchings`
// (otherwise EnumerationLimitError). Ties on the objective are broken toward
// the lexicographically smallest sorted edge-id multiset so the result is
// independent of enumeration order.
inline OracleResult solve_by_enumeration_detailed(const ExchangeGraph& g,
                                                  const Caps& caps,
                                                  Objective objective,
                                                  const OracleLimits& limits = {}) {
  const std::vector<Cycle> cycles = enumerate_cycles(g, caps.cycle_cap);
  const std::vector<Chain> chains = enumerate_chains(g, caps.chain_cap);

  std::vector<std::vector<int>> item_vertices;
  std::vector<double> item_value;
  const int num_cycles = static_cast<int>(cycles.size());
  for (const Cycle& c : cycles) {
    item_vertices.push_back(detail::cycle_vertices(g, c));
    item_value.push_back(objective == Objective::Expected
                             ? cycle_discounted_weight(g, c)
                             : c.weight);
  }
  for (const Chain& c : chains) {
    item_vertices.push_back(detail::chain_vertices(g, c));
    double w = 0.0;
    for (int eid : c.edges) w += g.edge(eid).weight;
    item_value.push_back(objective == Objective::Expected
                             ? chain_discounted_weight_prefix(g, c)
                             : w);
  }

  auto sorted_edge_ids = [&](const std::vector<int>& chosen) {
    std::vector<int> ids;
    for (int i : chosen) {
      const std::vector<int>& es =
          i < num_cycles ? cycles[i].edges : chains[i - num_cycles].edges;
      ids.insert(ids.end(), es.begin(), es.end());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  };

  OracleResult best;
  bool have_best = false;
  std::vector<int> best_chosen;
  std::vector<int> best_ids;
  std::uint64_t count = 0;

  detail::for_each_feasible_matching(
      g, item_vertices, item_value,
      [&](double value, const std::vector<int>& chosen) {
        if (++count > limits.max_matchings) {
          throw EnumerationLimitError(
              "feasible matching count exceeds the enumeration budget (" +
              std::to_string(limits.max_matchings) + ")");
        }
        bool better = !have_best || value > best.value;
        if (!better && value == best.value) {
          better = sorted_edge_ids(chosen) < best_ids;
        }
        if (better) {
          have_best = true;
          best.value = value;
          best_chosen = chosen;
          best_ids = sorted_edge_ids(chosen);
        }
      });

  best.matchings_enumerated = count;
  for (int i : best_chosen) {
    if (i < num_cycles) {
      best.matching.cycles.push_back(cycles[i]);
    } else {
      best.matching.chains.push_back(chains[i - num_cycles]);
    }
  }
  return best;
}

inline Matching solve_by_enumeration(const ExchangeGraph& g, const Caps& caps,
                                     Objective objective,
                                     const OracleLimits& limits = {}) {
  return solve_by_enumeration_detailed(g, caps, objective, limits).matching;
}

}  // namespace stochkep
