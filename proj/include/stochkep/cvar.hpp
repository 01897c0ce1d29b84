#pragma once

// Risk-averse clearing via sample-average approximation.
//
// A matching's realized weight on one failure scenario is random; the
// mean-risk objective trades the average against the conditional
// value-at-risk of the shortfall (the mean of the worst alpha-tail). Losses
// enter as negated realized weight, so the model is a minimization whose
// optimal value is negative when transplants happen; reporting code flips the
// sign back into "weight" space.
//
// The sample model shares one packing skeleton (binary y/z) across N drawn
// scenarios and adds per-scenario survival tracking gated by each edge's
// realized outcome, a per-scenario loss variable per edge, and the standard
// CVaR linearization (threshold d plus nonnegative tail excesses).

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stochkep/exchange_graph.hpp"
#include "stochkep/formulations.hpp"
#include "stochkep/milp.hpp"
#include "stochkep/rng.hpp"

namespace stochkep {

// One joint outcome of all edge failures: exists[e] == 1 iff edge e survives.
struct Realization {
  std::vector<std::uint8_t> exists;
};

struct CvarParams {
  double gamma = 10.0;  // risk-aversion weight on the CVaR term
  double alpha = 0.5;   // tail mass whose mean is penalized
  int num_samples = 10;
};

// Independent draws, one uniform per edge per scenario in fixed order, so a
// seed pins the entire scenario set. Edges survive when the draw clears the
// failure probability (p = 0 and p = 1 are exact).
inline std::vector<Realization> sample_realizations(const ExchangeGraph& g,
                                                    int num_samples,
                                                    std::uint64_t seed) {
  if (num_samples < 0) throw std::invalid_argument("negative sample count");
  std::mt19937_64 rng(seed);
  std::vector<Realization> out(static_cast<std::size_t>(num_samples));
  for (Realization& r : out) {
    r.exists.resize(g.num_edges());
    for (const Edge& e : g.edges()) {
      r.exists[e.id] = uniform01(rng) >= e.fail_prob ? 1 : 0;
    }
  }
  return out;
}

// Weight actually transplanted if `m` is executed under one scenario: cycles
// are all-or-nothing, chains keep their surviving prefix.
inline double realized_weight(const ExchangeGraph& g, const Matching& m,
                              const Realization& r) {
  double total = 0.0;
  for (const Cycle& c : m.cycles) {
    double w = 0.0;
    bool alive = true;
    for (int eid : c.edges) {
      if (!r.exists[eid]) {
        alive = false;
        break;
      }
      w += g.edge(eid).weight;
    }
    if (alive) total += w;
  }
  for (const Chain& c : m.chains) {
    for (int eid : c.edges) {
      if (!r.exists[eid]) break;
      total += g.edge(eid).weight;
    }
  }
  return total;
}

// Mean of the worst ceil(alpha*N) values (the lower tail). The tail members
// are chosen by value with index as tie-break, then summed in input order, so
// alpha = 1 reproduces the plain mean bit-for-bit.
inline double cvar_of_samples(const std::vector<double>& values, double alpha) {
  if (values.empty()) throw std::invalid_argument("cvar of an empty sample set");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1]");
  }
  const int n = static_cast<int>(values.size());
  int m = static_cast<int>(std::ceil(alpha * n - 1e-9));
  if (m < 1) m = 1;
  if (m > n) m = n;

  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  std::vector<char> in_tail(values.size(), 0);
  for (int i = 0; i < m; ++i) in_tail[order[i]] = 1;

  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (in_tail[i]) sum += values[i];
  }
  return sum / m;
}

struct SaaHandles {
  PicefHandles picef;  // shared packing variables and modeled cycles
  // Per-scenario survival tracking, loss variables, and tail machinery.
  std::vector<std::map<std::pair<int, int>, VarRef>> O;
  std::vector<std::map<std::pair<int, int>, VarRef>> o;
  std::vector<std::map<int, VarRef>> loss;  // [scenario][edge id]
  std::vector<VarRef> tail_excess;
  VarRef threshold;
  std::vector<std::vector<double>> cycle_alive;  // [scenario][cycle] in {0,1}
};

struct BuiltSaaModel {
  MilpModel model;
  SaaHandles handles;
};

inline BuiltSaaModel build_cvar_saa(const ExchangeGraph& g, const Caps& caps,
                                    const std::vector<Cycle>& cycles,
                                    const std::vector<Realization>& scenarios,
                                    const CvarParams& params) {
  if (scenarios.empty()) {
    throw std::invalid_argument("sample-average model needs at least one scenario");
  }
  for (const Realization& r : scenarios) {
    if (static_cast<int>(r.exists.size()) != g.num_edges()) {
      throw std::invalid_argument("scenario edge count does not match the graph");
    }
  }
  if (!(params.alpha > 0.0 && params.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1]");
  }
  if (!(params.gamma >= 0.0)) {
    throw std::invalid_argument("gamma must be nonnegative");
  }
  const int N = static_cast<int>(scenarios.size());

  BuiltSaaModel built;
  MilpModel& m = built.model;
  SaaHandles& h = built.handles;
  h.picef.cycles = cycles;
  detail::fill_cycle_success(h.picef, g);
  detail::emit_packing(m, h.picef, g, caps, /*relax=*/false,
                       /*exclude_certain_failures=*/false);

  // Which cycles survive each scenario, and which edges can carry value at
  // all (cycle membership or a chain position).
  std::vector<std::vector<int>> cycles_with_edge(g.num_edges());
  for (std::size_t ci = 0; ci < h.picef.cycles.size(); ++ci) {
    for (int eid : h.picef.cycles[ci].edges) {
      cycles_with_edge[eid].push_back(static_cast<int>(ci));
    }
  }
  h.cycle_alive.assign(N, std::vector<double>(h.picef.cycles.size(), 1.0));
  for (int n = 0; n < N; ++n) {
    for (std::size_t ci = 0; ci < h.picef.cycles.size(); ++ci) {
      for (int eid : h.picef.cycles[ci].edges) {
        if (!scenarios[n].exists[eid]) {
          h.cycle_alive[n][ci] = 0.0;
          break;
        }
      }
    }
  }

  h.O.resize(N);
  h.o.resize(N);
  h.loss.resize(N);
  h.tail_excess.reserve(N);
  h.threshold = m.add_free("d");

  for (int n = 0; n < N; ++n) {
    const std::string sn = "_n" + std::to_string(n);
    for (const auto& [key, yvar] : h.picef.y) {
      h.O[n].emplace(key, m.add_continuous(
                              0.0, 1.0,
                              detail::yk_name("O", key.first, key.second) + sn));
      const double gate = scenarios[n].exists[key.first] ? 1.0 : 0.0;
      h.o[n].emplace(key, m.add_continuous(
                              0.0, gate,
                              detail::yk_name("o", key.first, key.second) + sn));
    }

    // Loss variables only for edges that can be transplanted at all.
    for (const Edge& e : g.edges()) {
      bool carries = !cycles_with_edge[e.id].empty();
      for (int k : chain_positions(g, e, caps.chain_cap)) {
        if (carries) break;
        carries = h.picef.y.count({e.id, k}) > 0;
      }
      if (!carries) continue;
      h.loss[n].emplace(e.id,
                        m.add_continuous(-1.0, 0.0,
                                         "W_e" + std::to_string(e.id) + sn));
    }

    // Loss definition: loss = -(chain use + surviving-cycle use) per edge.
    for (const auto& [eid, wvar] : h.loss[n]) {
      LinConstraint row;
      row.name = "loss_e" + std::to_string(eid) + sn;
      row.sense = RowSense::Equal;
      row.rhs = 0.0;
      row.terms.push_back({wvar.index, 1.0});
      for (int k : chain_positions(g, g.edge(eid), caps.chain_cap)) {
        auto it = h.O[n].find({eid, k});
        if (it != h.O[n].end()) row.terms.push_back({it->second.index, 1.0});
      }
      for (int ci : cycles_with_edge[eid]) {
        if (h.cycle_alive[n][ci] != 0.0) {
          row.terms.push_back({h.picef.z[ci].index, h.cycle_alive[n][ci]});
        }
      }
      m.add_constraint(std::move(row));
    }

    // Survival flow without probability scaling: a scenario either keeps an
    // edge or kills it via the gate bound on o.
    for (int i = 0; i < g.num_vertices(); ++i) {
      if (!g.is_pair(i)) continue;
      for (int k = 1; k + 1 <= caps.chain_cap; ++k) {
        std::vector<LinTerm> ins;
        for (int eid : g.in_edges(i)) {
          auto it = h.O[n].find({eid, k});
          if (it != h.O[n].end()) ins.push_back({it->second.index, 1.0});
        }
        std::vector<VarRef> outs;
        for (int eid : g.out_edges(i)) {
          auto it = h.O[n].find({eid, k + 1});
          if (it != h.O[n].end()) outs.push_back(it->second);
        }
        if (outs.empty()) continue;
        if (ins.empty()) {
          for (VarRef v : outs) m.set_bounds(v, 0.0, 0.0);
          continue;
        }
        LinConstraint row;
        row.name = "sflow_v" + std::to_string(i) + "_k" + std::to_string(k) + sn;
        row.sense = RowSense::GreaterEqual;
        row.rhs = 0.0;
        row.terms = ins;
        for (VarRef v : outs) row.terms.push_back({v.index, -1.0});
        m.add_constraint(std::move(row));
      }
    }

    for (const auto& [key, Ovar] : h.O[n]) {
      LinConstraint cap_y;
      cap_y.name = "slim_y_e" + std::to_string(key.first) + "_k" +
                   std::to_string(key.second) + sn;
      cap_y.sense = RowSense::LessEqual;
      cap_y.rhs = 0.0;
      cap_y.terms = {{Ovar.index, 1.0}, {h.picef.y.at(key).index, -1.0}};
      m.add_constraint(std::move(cap_y));
    }
    for (const auto& [key, Ovar] : h.O[n]) {
      LinConstraint cap_o;
      cap_o.name = "slim_o_e" + std::to_string(key.first) + "_k" +
                   std::to_string(key.second) + sn;
      cap_o.sense = RowSense::LessEqual;
      cap_o.rhs = 0.0;
      cap_o.terms = {{Ovar.index, 1.0}, {h.o[n].at(key).index, -1.0}};
      m.add_constraint(std::move(cap_o));
    }

    // Tail excess: amount by which this scenario's loss exceeds the
    // value-at-risk threshold.
    VarRef pi = m.add_continuous(0.0, kInf, "Pi" + sn);
    h.tail_excess.push_back(pi);
    LinConstraint tail;
    tail.name = "tail" + sn;
    tail.sense = RowSense::GreaterEqual;
    tail.rhs = 0.0;
    tail.terms.push_back({pi.index, 1.0});
    for (const auto& [eid, wvar] : h.loss[n]) {
      tail.terms.push_back({wvar.index, -g.edge(eid).weight});
    }
    tail.terms.push_back({h.threshold.index, 1.0});
    m.add_constraint(std::move(tail));
  }

  // Mean loss plus gamma-weighted CVaR of the loss.
  for (int n = 0; n < N; ++n) {
    for (const auto& [eid, wvar] : h.loss[n]) {
      m.add_objective_term(wvar, g.edge(eid).weight / N);
    }
    m.add_objective_term(h.tail_excess[n], params.gamma / (params.alpha * N));
  }
  m.add_objective_term(h.threshold, params.gamma);
  m.set_objective_sense(ObjectiveSense::Minimize);
  return built;
}

}  // namespace stochkep
