#pragma once

// Shared test fixtures.

#include <cstdint>
#include <functional>
#include <vector>

#include "stochkep/exchange_graph.hpp"
#include "stochkep/expected_value.hpp"
#include "stochkep/instance_gen.hpp"

namespace fixtures {

// The small worked pool used throughout the tests: three pairs, one
// non-directed donor, two 2-cycles of very different risk, and a safe chain
// start.
//
//   vertices: 0, 1, 2 pairs; 3 NDD
//   edge 0: 0 -> 1  w 10  p 0.6        edge 1: 1 -> 0  w 10  p 0.6
//   edge 2: 0 -> 2  w 3   p 0.1        edge 3: 2 -> 0  w 4   p 0.1
//   edge 4: 3 -> 0  w 1   p 0
//
// The heavy 2-cycle {0,1} is worth 20 planned but only 20 * 0.16 = 3.2 in
// expectation; the light cycle {0,2} is worth 7 planned but 7 * 0.81 = 5.67
// expected, so deterministic and expected-value clearing disagree about it.
inline stochkep::ExchangeGraph small_pool() {
  using namespace stochkep;
  std::vector<Vertex> vertices = {
      {0, VertexKind::Pair},
      {1, VertexKind::Pair},
      {2, VertexKind::Pair},
      {3, VertexKind::Ndd},
  };
  std::vector<Edge> edges = {
      {0, 0, 1, 10.0, 0.6},
      {1, 1, 0, 10.0, 0.6},
      {2, 0, 2, 3.0, 0.1},
      {3, 2, 0, 4.0, 0.1},
      {4, 3, 0, 1.0, 0.0},
  };
  return ExchangeGraph(std::move(vertices), std::move(edges));
}

// Small random pools for property tests: mixed weights, failure probabilities
// spanning the full [0, 1] range (so certain failures and certain successes
// both occur), a couple of NDDs.
inline stochkep::ExchangeGraph random_pool(std::uint64_t seed, int pairs = 7,
                                           int ndds = 2, double density = 0.35) {
  stochkep::GenConfig cfg;
  cfg.num_pairs = pairs;
  cfg.num_ndds = ndds;
  cfg.mode = stochkep::GenMode::Density;
  cfg.density = density;
  cfg.weight_kind = stochkep::WeightKind::Uniform;
  cfg.weight_lo = 1.0;
  cfg.weight_hi = 10.0;
  cfg.prob_lo = 0.0;
  cfg.prob_hi = 1.0;
  cfg.seed = seed;
  return stochkep::generate_instance(cfg);
}

// Visits every feasible matching of a small pool exactly once (exponential;
// test-sized pools only). Used to brute-force ground truths independent of
// the library's own enumeration-based solver.
inline void for_each_matching(const stochkep::ExchangeGraph& g,
                              const stochkep::Caps& caps,
                              const std::function<void(const stochkep::Matching&)>& fn) {
  using namespace stochkep;
  const std::vector<Cycle> cycles = enumerate_cycles(g, caps.cycle_cap);
  const std::vector<Chain> chains = enumerate_chains(g, caps.chain_cap);

  struct Item {
    bool is_cycle;
    int index;
    std::vector<int> vertices;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    Item it{true, static_cast<int>(i), {}};
    for (int eid : cycles[i].edges) it.vertices.push_back(g.edge(eid).src);
    items.push_back(std::move(it));
  }
  for (std::size_t i = 0; i < chains.size(); ++i) {
    Item it{false, static_cast<int>(i), {}};
    it.vertices.push_back(g.edge(chains[i].edges.front()).src);
    for (int eid : chains[i].edges) it.vertices.push_back(g.edge(eid).dst);
    items.push_back(std::move(it));
  }

  std::vector<char> used(g.num_vertices(), 0);
  Matching current;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == items.size()) {
      fn(current);
      return;
    }
    self(self, i + 1);
    for (int v : items[i].vertices) {
      if (used[v]) return;
    }
    for (int v : items[i].vertices) used[v] = 1;
    if (items[i].is_cycle) {
      current.cycles.push_back(cycles[items[i].index]);
    } else {
      current.chains.push_back(chains[items[i].index]);
    }
    self(self, i + 1);
    if (items[i].is_cycle) {
      current.cycles.pop_back();
    } else {
      current.chains.pop_back();
    }
    for (int v : items[i].vertices) used[v] = 0;
  };
  rec(rec, 0);
}

}  // namespace fixtures
