#pragma once

// Branch-and-price for the expected-value clearing model when the cycle set
// is too large to enumerate into one MILP.
//
// The LP relaxation only ever sees an active cycle pool; each pool cycle's
// reduced price is its discounted weight minus the duals of the per-vertex
// capacity rows it covers. Pricing searches the graph for positive-price
// cycles with a depth-first walk (rooted at each minimum vertex, same
// canonical form as full enumeration) and an optimistic bound to prune
// hopeless partial paths. Once no positive-price cycle exists, the LP value
// bounds the node from above; integral nodes become incumbents, fractional
// nodes branch on the binary variable closest to one half, exploring the
// "use it" child first. Nodes whose bound cannot beat the incumbent are cut.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stochkep/exchange_graph.hpp"
#include "stochkep/expected_value.hpp"
#include "stochkep/formulations.hpp"
#include "stochkep/highs_solver.hpp"
#include "stochkep/milp.hpp"

namespace stochkep {

// Branching decisions accumulated along a tree path. Cycles are keyed by
// their canonical edge sequence so the key survives pool growth.
struct FixedAssignments {
  std::map<std::pair<int, int>, int> y;   // (edge id, position) -> 0/1
  std::map<std::vector<int>, int> z;      // canonical cycle edges -> 0/1
};

struct Relaxation {
  MilpModel model;
  PicefHandles handles;
  Solution solution;
};

// Continuous relaxation of the expected-value model over the given cycle pool
// with branching fixings applied as variable bounds.
inline Relaxation solve_lp_relaxation(const ExchangeGraph& g, const Caps& caps,
                                      const std::vector<Cycle>& pool,
                                      const FixedAssignments& fixed,
                                      const SolverConfig& config = {}) {
  BuiltModel built =
      detail::build_expected_value_model(g, caps, pool, /*relax=*/true);
  for (const auto& [key, val] : fixed.y) {
    auto it = built.handles.y.find(key);
    if (it == built.handles.y.end()) {
      throw std::logic_error("fixing refers to a chain variable outside the model");
    }
    built.model.set_bounds(it->second, val, val);
  }
  if (!fixed.z.empty()) {
    std::map<std::vector<int>, int> index_of;
    for (std::size_t ci = 0; ci < built.handles.cycles.size(); ++ci) {
      index_of.emplace(built.handles.cycles[ci].edges, static_cast<int>(ci));
    }
    for (const auto& [key, val] : fixed.z) {
      auto it = index_of.find(key);
      if (it == index_of.end()) {
        throw std::logic_error("fixing refers to a cycle outside the pool");
      }
      built.model.set_bounds(built.handles.z[it->second], val, val);
    }
  }
  Relaxation rel;
  rel.solution = solve(built.model, config);
  rel.model = std::move(built.model);
  rel.handles = std::move(built.handles);
  return rel;
}

// Capacity-row duals mapped back onto vertices (zero when a vertex has no
// capacity row, which also means no cycle can cover it).
inline std::vector<double> capacity_duals(const ExchangeGraph& g,
                                          const PicefHandles& h,
                                          const Solution& sol) {
  if (!sol.duals) {
    throw std::logic_error("capacity duals need an LP solution with duals");
  }
  std::vector<double> lambda(g.num_vertices(), 0.0);
  for (int i = 0; i < g.num_vertices(); ++i) {
    if (h.capacity_row[i] >= 0) {
      lambda[i] = (*sol.duals)[h.capacity_row[i]];
    }
  }
  return lambda;
}

// Reduced price of adding this cycle's column: discounted weight minus the
// duals of the capacity rows it would enter.
inline double cycle_price(const ExchangeGraph& g, const Cycle& c,
                          const std::vector<double>& vertex_duals) {
  double weight = 0.0;
  double survive = 1.0;
  double dual_sum = 0.0;
  for (int eid : c.edges) {
    const Edge& e = g.edge(eid);
    weight += e.weight;
    survive *= 1.0 - e.fail_prob;
    dual_sum += vertex_duals[e.src];
  }
  return weight * survive - dual_sum;
}

struct PricedCycle {
  Cycle cycle;
  double price = 0.0;
};

// Positive-price cycles not yet in the pool, best first, at most `limit`.
// The walk roots at each pair vertex (minimum id on the cycle), only visits
// larger ids, and prunes a partial path when even the most optimistic
// completion cannot price above epsilon.
inline std::vector<PricedCycle> find_positive_price_cycles(
    const ExchangeGraph& g, const std::vector<double>& vertex_duals,
    int cycle_cap, double epsilon, int limit,
    const std::set<std::vector<int>>& exclude = {}) {
  std::vector<PricedCycle> found;
  if (cycle_cap < 2 || limit <= 0) return found;

  double w_max = 0.0;
  double lambda_min = 0.0;
  for (const Edge& e : g.edges()) {
    if (g.is_pair(e.src) && g.is_pair(e.dst) && e.weight > w_max) w_max = e.weight;
  }
  for (int i = 0; i < g.num_vertices(); ++i) {
    if (g.is_pair(i) && vertex_duals[i] < lambda_min) lambda_min = vertex_duals[i];
  }

  std::vector<char> on_path(g.num_vertices(), 0);
  std::vector<int> path;

  for (int root = 0; root < g.num_vertices(); ++root) {
    if (!g.is_pair(root)) continue;
    on_path[root] = 1;

    // State along the path: weight sum, survival product, dual sum.
    auto dfs = [&](auto&& self, int v, double weight, double survive,
                   double duals) -> void {
      const int used = static_cast<int>(path.size()) + 1;  // vertices so far
      // Most optimistic completion: heaviest possible remaining edges, no
      // further survival loss, most favorable remaining duals.
      const int remaining = cycle_cap - used;
      const double best_possible = (weight + (remaining + 1) * w_max) * survive -
                                   duals - remaining * lambda_min;
      if (best_possible <= epsilon) return;

      for (int eid : g.out_edges(v)) {
        const Edge& e = g.edge(eid);
        if (!g.is_pair(e.dst)) continue;
        if (e.dst == root) {
          if (path.size() + 1 < 2) continue;
          const double price =
              (weight + e.weight) * (survive * (1.0 - e.fail_prob)) - duals;
          if (price > epsilon) {
            Cycle c;
            c.edges = path;
            c.edges.push_back(eid);
            c.weight = weight + e.weight;
            if (exclude.find(c.edges) == exclude.end()) {
              found.push_back({std::move(c), price});
            }
          }
          continue;
        }
        if (e.dst < root || on_path[e.dst]) continue;
        if (used + 1 > cycle_cap) continue;
        on_path[e.dst] = 1;
        path.push_back(eid);
        self(self, e.dst, weight + e.weight, survive * (1.0 - e.fail_prob),
             duals + vertex_duals[e.dst]);
        path.pop_back();
        on_path[e.dst] = 0;
      }
    };
    dfs(dfs, root, 0.0, 1.0, vertex_duals[root]);
    on_path[root] = 0;
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const PricedCycle& a, const PricedCycle& b) {
                     return a.price > b.price;
                   });
  if (static_cast<int>(found.size()) > limit) found.resize(limit);
  return found;
}

struct BranchPriceConfig {
  SolverConfig lp;                      // settings for each relaxation solve
  double epsilon = 1e-6;                // pricing tolerance
  int columns_per_round = 50;           // cycles admitted per pricing round
  std::uint64_t max_nodes = 1'000'000;  // search-tree safety valve
  double time_limit_seconds = kNoTimeLimit;
};

struct BranchPriceResult {
  Matching matching;
  double objective = 0.0;  // expected weight of `matching`
  bool proven_optimal = false;
  std::uint64_t nodes_explored = 0;
  std::uint64_t columns_generated = 0;  // cycles ever admitted to the pool
  double solve_seconds = 0.0;
};

inline BranchPriceResult branch_and_price(const ExchangeGraph& g, const Caps& caps,
                                          const BranchPriceConfig& cfg = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  // Start the pool with every 2-cycle; longer cycles arrive through pricing.
  std::vector<Cycle> pool =
      detail::usable_cycles(g, enumerate_cycles(g, std::min(caps.cycle_cap, 2)),
                            true);
  std::set<std::vector<int>> pool_keys;
  for (const Cycle& c : pool) pool_keys.insert(c.edges);

  BranchPriceResult result;
  result.matching = {};
  result.objective = 0.0;  // the empty matching is always feasible
  bool exhausted = true;

  std::vector<FixedAssignments> stack;
  stack.push_back({});

  while (!stack.empty()) {
    if (result.nodes_explored >= cfg.max_nodes ||
        elapsed() > cfg.time_limit_seconds) {
      exhausted = false;
      break;
    }
    FixedAssignments fixed = std::move(stack.back());
    stack.pop_back();
    ++result.nodes_explored;

    // Generate columns until this node's relaxation prices out.
    Relaxation rel;
    bool node_ok = true;
    for (int round = 0;; ++round) {
      if (round > 100000) {
        throw std::logic_error("column generation failed to converge");
      }
      rel = solve_lp_relaxation(g, caps, pool, fixed, cfg.lp);
      if (rel.solution.status == SolveStatus::Infeasible) {
        node_ok = false;  // contradictory fixings
        break;
      }
      if (rel.solution.status != SolveStatus::Optimal || !rel.solution.duals) {
        // No usable bound; give up on proving optimality rather than risk
        // cutting the true optimum.
        node_ok = false;
        exhausted = false;
        break;
      }
      const std::vector<double> lambda = capacity_duals(g, rel.handles, rel.solution);
      std::vector<PricedCycle> priced = find_positive_price_cycles(
          g, lambda, caps.cycle_cap, cfg.epsilon, cfg.columns_per_round, pool_keys);
      if (priced.empty()) break;
      for (PricedCycle& pc : priced) {
        pool_keys.insert(pc.cycle.edges);
        pool.push_back(std::move(pc.cycle));
        ++result.columns_generated;
      }
    }
    if (!node_ok) continue;

    const double bound = rel.solution.objective;
    if (bound <= result.objective + 1e-9) continue;

    // Branching variable: fractional binary closest to one half.
    const double int_tol = cfg.lp.integrality_tolerance;
    bool have_frac = false;
    double best_dist = 2.0;
    std::pair<int, int> frac_y{-1, -1};
    std::vector<int> frac_z;
    for (const auto& [key, v] : rel.handles.y) {
      const double x = rel.solution.values[v.index];
      if (std::min(x, 1.0 - x) <= int_tol) continue;
      const double dist = std::fabs(x - 0.5);
      if (!have_frac || dist < best_dist) {
        have_frac = true;
        best_dist = dist;
        frac_y = key;
        frac_z.clear();
      }
    }
    for (std::size_t ci = 0; ci < rel.handles.cycles.size(); ++ci) {
      const double x = rel.solution.values[rel.handles.z[ci].index];
      if (std::min(x, 1.0 - x) <= int_tol) continue;
      const double dist = std::fabs(x - 0.5);
      if (!have_frac || dist < best_dist) {
        have_frac = true;
        best_dist = dist;
        frac_y = {-1, -1};
        frac_z = rel.handles.cycles[ci].edges;
      }
    }

    if (!have_frac) {
      Matching m = extract_matching_from_values(g, caps, rel.handles,
                                                rel.solution.values, 1e-5);
      const double value = matching_expected_weight(g, m);
      if (value > result.objective) {
        result.objective = value;
        result.matching = std::move(m);
      }
      continue;
    }

    FixedAssignments zero = fixed;
    FixedAssignments one = std::move(fixed);
    if (frac_y.first >= 0) {
      zero.y[frac_y] = 0;
      one.y[frac_y] = 1;
    } else {
      zero.z[frac_z] = 0;
      one.z[frac_z] = 1;
    }
    stack.push_back(std::move(zero));
    stack.push_back(std::move(one));  // popped first: try using the structure
  }

  result.proven_optimal = exhausted;
  result.solve_seconds = elapsed();
  return result;
}

}  // namespace stochkep
