#pragma once

// MILP formulations over the position-indexed cycle/chain encoding.
//
// Shared packing skeleton (variables y[e,k] = edge e used at chain position k,
// z[c] = cycle c used):
//   (a) per pair vertex: incoming chain positions + covering cycles <= 1
//   (b) per pair vertex and position k: inflow at k >= outflow at k+1
//   (c) per NDD: at most one position-1 edge leaves it
//
// On top of that skeleton:
//   * build_kep       — deterministic objective (edge weights as planned)
//   * build_kep_np    — maximizes expected transplant weight under independent
//                       edge failures: auxiliary O[e,k] tracks the probability
//                       that a chain survives through e at position k (scaled
//                       flow rows), o[e,k] caps it by the edge's own survival;
//                       cycles are all-or-nothing so their z keeps a constant
//                       discounted weight.
//   * build_kep_ip    — expected-value objective with one uniform failure
//                       probability substituted on every edge.
//
// Structurally forced-zero variables (no possible inflow) are pinned to zero
// via bounds instead of emitting vacuous rows; per-vertex capacity rows are
// emitted whenever the vertex has any incident variable, and their row indices
// are recorded so LP duals can be priced against them.

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stochkep/exchange_graph.hpp"
#include "stochkep/expected_value.hpp"
#include "stochkep/milp.hpp"

namespace stochkep {

struct PicefHandles {
  std::map<std::pair<int, int>, VarRef> y;  // (edge id, position)
  std::vector<VarRef> z;                    // aligned with `cycles`
  std::map<std::pair<int, int>, VarRef> O;  // survival-through-position vars
  std::map<std::pair<int, int>, VarRef> o;  // per-edge survival caps
  std::vector<Cycle> cycles;                // cycles actually modeled
  std::vector<double> cycle_success;        // product of (1 - p) per cycle
  std::vector<int> capacity_row;            // vertex id -> row index, -1 if none
};

struct BuiltModel {
  MilpModel model;
  PicefHandles handles;
};

namespace detail {

inline std::string yk_name(const char* prefix, int eid, int k) {
  return std::string(prefix) + "_e" + std::to_string(eid) + "_k" + std::to_string(k);
}

// Cycles that avoid excluded edges, e.g. certain-failure edges contribute
// nothing to an expected-value objective and would break its scaled rows.
inline std::vector<Cycle> usable_cycles(const ExchangeGraph& g,
                                        const std::vector<Cycle>& cycles,
                                        bool exclude_certain_failures) {
  if (!exclude_certain_failures) return cycles;
  std::vector<Cycle> kept;
  for (const Cycle& c : cycles) {
    bool ok = true;
    for (int eid : c.edges) {
      if (g.edge(eid).fail_prob >= 1.0) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(c);
  }
  return kept;
}

// Emits y/z variables and the packing rows (a)-(c). `relax` builds the
// continuous [0,1] version (LP relaxations for column generation).
inline void emit_packing(MilpModel& m, PicefHandles& h, const ExchangeGraph& g,
                         const Caps& caps, bool relax,
                         bool exclude_certain_failures) {
  auto included = [&](const Edge& e) {
    return !(exclude_certain_failures && e.fail_prob >= 1.0);
  };

  for (const Edge& e : g.edges()) {
    if (!included(e)) continue;
    for (int k : chain_positions(g, e, caps.chain_cap)) {
      VarRef v = relax ? m.add_continuous(0.0, 1.0, yk_name("y", e.id, k))
                       : m.add_binary(yk_name("y", e.id, k));
      h.y.emplace(std::make_pair(e.id, k), v);
    }
  }
  for (std::size_t ci = 0; ci < h.cycles.size(); ++ci) {
    const std::string name = "z_c" + std::to_string(ci);
    h.z.push_back(relax ? m.add_continuous(0.0, 1.0, name) : m.add_binary(name));
  }

  // Cycle index per vertex, in cycle order.
  std::vector<std::vector<int>> cycles_at(g.num_vertices());
  for (std::size_t ci = 0; ci < h.cycles.size(); ++ci) {
    for (int eid : h.cycles[ci].edges) {
      cycles_at[g.edge(eid).src].push_back(static_cast<int>(ci));
    }
  }

  h.capacity_row.assign(g.num_vertices(), -1);
  for (int i = 0; i < g.num_vertices(); ++i) {
    if (!g.is_pair(i)) continue;
    LinConstraint row;
    row.name = "cap_v" + std::to_string(i);
    row.sense = RowSense::LessEqual;
    row.rhs = 1.0;
    for (int eid : g.in_edges(i)) {
      for (int k : chain_positions(g, g.edge(eid), caps.chain_cap)) {
        auto it = h.y.find({eid, k});
        if (it != h.y.end()) row.terms.push_back({it->second.index, 1.0});
      }
    }
    for (int ci : cycles_at[i]) {
      row.terms.push_back({h.z[ci].index, 1.0});
    }
    if (!row.terms.empty()) {
      h.capacity_row[i] = m.add_constraint(std::move(row));
    }
  }

  for (int i = 0; i < g.num_vertices(); ++i) {
    if (!g.is_pair(i)) continue;
    for (int k = 1; k + 1 <= caps.chain_cap; ++k) {
      std::vector<LinTerm> ins;
      for (int eid : g.in_edges(i)) {
        auto it = h.y.find({eid, k});
        if (it != h.y.end()) ins.push_back({it->second.index, 1.0});
      }
      std::vector<std::pair<int, VarRef>> outs;  // (edge id, var)
      for (int eid : g.out_edges(i)) {
        auto it = h.y.find({eid, k + 1});
        if (it != h.y.end()) outs.push_back({eid, it->second});
      }
      if (outs.empty()) continue;
      if (ins.empty()) {
        // No way to arrive at position k: the outgoing position-(k+1) slots
        // are structurally dead.
        for (auto& [eid, v] : outs) m.set_bounds(v, 0.0, 0.0);
        continue;
      }
      LinConstraint row;
      row.name = "flow_v" + std::to_string(i) + "_k" + std::to_string(k);
      row.sense = RowSense::GreaterEqual;
      row.rhs = 0.0;
      row.terms = ins;
      for (auto& [eid, v] : outs) row.terms.push_back({v.index, -1.0});
      m.add_constraint(std::move(row));
    }
  }

  for (int i = 0; i < g.num_vertices(); ++i) {
    if (!g.is_ndd(i)) continue;
    LinConstraint row;
    row.name = "ndd_v" + std::to_string(i);
    row.sense = RowSense::LessEqual;
    row.rhs = 1.0;
    for (int eid : g.out_edges(i)) {
      auto it = h.y.find({eid, 1});
      if (it != h.y.end()) row.terms.push_back({it->second.index, 1.0});
    }
    if (!row.terms.empty()) m.add_constraint(std::move(row));
  }
}

// Expected-value auxiliary block: O[e,k] <= chance the chain actually reaches
// and survives edge e at position k. The flow rows divide by the upstream
// edge's survival so O compounds the failure discounts along the chain.
inline void emit_survival_tracking(MilpModel& m, PicefHandles& h,
                                   const ExchangeGraph& g, const Caps& caps) {
  for (const auto& [key, yvar] : h.y) {
    const Edge& e = g.edge(key.first);
    h.O.emplace(key, m.add_continuous(0.0, 1.0, yk_name("O", key.first, key.second)));
    h.o.emplace(key, m.add_continuous(0.0, 1.0 - e.fail_prob,
                                      yk_name("o", key.first, key.second)));
  }

  for (int i = 0; i < g.num_vertices(); ++i) {
    if (!g.is_pair(i)) continue;
    for (int k = 1; k + 1 <= caps.chain_cap; ++k) {
      std::vector<LinTerm> ins;
      for (int eid : g.in_edges(i)) {
        auto it = h.O.find({eid, k});
        if (it != h.O.end()) ins.push_back({it->second.index, 1.0});
      }
      std::vector<std::pair<int, VarRef>> outs;
      for (int eid : g.out_edges(i)) {
        auto it = h.O.find({eid, k + 1});
        if (it != h.O.end()) outs.push_back({eid, it->second});
      }
      if (outs.empty()) continue;
      if (ins.empty()) {
        for (auto& [eid, v] : outs) m.set_bounds(v, 0.0, 0.0);
        continue;
      }
      LinConstraint row;
      row.name = "dflow_v" + std::to_string(i) + "_k" + std::to_string(k);
      row.sense = RowSense::GreaterEqual;
      row.rhs = 0.0;
      row.terms = ins;
      for (auto& [eid, v] : outs) {
        row.terms.push_back({v.index, -1.0 / (1.0 - g.edge(eid).fail_prob)});
      }
      m.add_constraint(std::move(row));
    }
  }

  for (const auto& [key, Ovar] : h.O) {
    LinConstraint cap_y;
    cap_y.name = "lim_y_e" + std::to_string(key.first) + "_k" + std::to_string(key.second);
    cap_y.sense = RowSense::LessEqual;
    cap_y.rhs = 0.0;
    cap_y.terms = {{Ovar.index, 1.0}, {h.y.at(key).index, -1.0}};
    m.add_constraint(std::move(cap_y));
  }
  for (const auto& [key, Ovar] : h.O) {
    LinConstraint cap_o;
    cap_o.name = "lim_o_e" + std::to_string(key.first) + "_k" + std::to_string(key.second);
    cap_o.sense = RowSense::LessEqual;
    cap_o.rhs = 0.0;
    cap_o.terms = {{Ovar.index, 1.0}, {h.o.at(key).index, -1.0}};
    m.add_constraint(std::move(cap_o));
  }
}

inline void fill_cycle_success(PicefHandles& h, const ExchangeGraph& g) {
  h.cycle_success.clear();
  for (const Cycle& c : h.cycles) {
    double s = 1.0;
    for (int eid : c.edges) s *= 1.0 - g.edge(eid).fail_prob;
    h.cycle_success.push_back(s);
  }
}

}  // namespace detail

// Deterministic clearing: maximize planned transplant weight.
inline BuiltModel build_kep(const ExchangeGraph& g, const Caps& caps,
                            const std::vector<Cycle>& cycles) {
  BuiltModel built;
  built.handles.cycles = cycles;
  detail::fill_cycle_success(built.handles, g);
  detail::emit_packing(built.model, built.handles, g, caps, /*relax=*/false,
                       /*exclude_certain_failures=*/false);
  for (const auto& [key, v] : built.handles.y) {
    built.model.add_objective_term(v, g.edge(key.first).weight);
  }
  for (std::size_t ci = 0; ci < built.handles.cycles.size(); ++ci) {
    built.model.add_objective_term(built.handles.z[ci], built.handles.cycles[ci].weight);
  }
  built.model.set_objective_sense(ObjectiveSense::Maximize);
  return built;
}

namespace detail {

inline BuiltModel build_expected_value_model(const ExchangeGraph& g, const Caps& caps,
                                             const std::vector<Cycle>& cycles,
                                             bool relax) {
  BuiltModel built;
  built.handles.cycles = usable_cycles(g, cycles, true);
  fill_cycle_success(built.handles, g);
  emit_packing(built.model, built.handles, g, caps, relax,
               /*exclude_certain_failures=*/true);
  emit_survival_tracking(built.model, built.handles, g, caps);
  for (const auto& [key, v] : built.handles.O) {
    built.model.add_objective_term(v, g.edge(key.first).weight);
  }
  for (std::size_t ci = 0; ci < built.handles.cycles.size(); ++ci) {
    built.model.add_objective_term(
        built.handles.z[ci],
        built.handles.cycles[ci].weight * built.handles.cycle_success[ci]);
  }
  built.model.set_objective_sense(ObjectiveSense::Maximize);
  return built;
}

}  // namespace detail

// Stochastic clearing: maximize expected transplant weight under independent
// edge failures, linearized with the survival-tracking block.
inline BuiltModel build_kep_np(const ExchangeGraph& g, const Caps& caps,
                               const std::vector<Cycle>& cycles) {
  return detail::build_expected_value_model(g, caps, cycles, /*relax=*/false);
}

// Expected-value clearing that pretends every edge fails with the same
// probability (a common benchmark policy when per-edge estimates are not
// trusted).
inline BuiltModel build_kep_ip(const ExchangeGraph& g, const Caps& caps,
                               const std::vector<Cycle>& cycles, double p_uniform) {
  if (!(p_uniform >= 0.0 && p_uniform < 1.0)) {
    throw std::invalid_argument("uniform failure probability must lie in [0, 1)");
  }
  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) e.fail_prob = p_uniform;
  const ExchangeGraph sub(g.vertices(), std::move(edges));
  return build_kep_np(sub, caps, cycles);
}

namespace detail {

inline bool near_integral(double v, double tol) {
  const double r = std::nearbyint(v);
  return std::fabs(v - r) <= tol && r >= -0.5 && r <= 1.5;
}

}  // namespace detail

// Reconstructs the packed cycles and chains from solved y/z values, walking
// each chain from its NDD through successive positions. Throws if the values
// are fractional, a chain is broken or over-assigned, or the result is not a
// feasible matching — any of those means the model or solver misbehaved.
inline Matching extract_matching_from_values(const ExchangeGraph& g, const Caps& caps,
                                             const PicefHandles& h,
                                             const std::vector<double>& values,
                                             double tol = 1e-6) {
  auto value_of = [&](VarRef v) { return values.at(static_cast<std::size_t>(v.index)); };
  auto is_one = [&](VarRef v) {
    const double x = value_of(v);
    if (!detail::near_integral(x, tol)) {
      throw SolverError("matching extraction hit a fractional value: " +
                        std::to_string(x));
    }
    return x > 0.5;
  };

  Matching m;
  for (std::size_t ci = 0; ci < h.cycles.size(); ++ci) {
    if (is_one(h.z[ci])) m.cycles.push_back(h.cycles[ci]);
  }

  int y_used = 0;
  int y_set = 0;
  for (const auto& [key, v] : h.y) {
    if (is_one(v)) ++y_set;
  }
  for (int ndd = 0; ndd < g.num_vertices(); ++ndd) {
    if (!g.is_ndd(ndd)) continue;
    VarRef first;
    int first_edge = -1;
    for (int eid : g.out_edges(ndd)) {
      auto it = h.y.find({eid, 1});
      if (it != h.y.end() && is_one(it->second)) {
        if (first) throw SolverError("two chains leave one non-directed donor");
        first = it->second;
        first_edge = eid;
      }
    }
    if (!first) continue;
    Chain chain;
    chain.edges.push_back(first_edge);
    ++y_used;
    int at = g.edge(first_edge).dst;
    for (int k = 2; k <= caps.chain_cap; ++k) {
      int next_edge = -1;
      for (int eid : g.out_edges(at)) {
        auto it = h.y.find({eid, k});
        if (it != h.y.end() && is_one(it->second)) {
          if (next_edge >= 0) {
            throw SolverError("chain forks at vertex " + std::to_string(at));
          }
          next_edge = eid;
        }
      }
      if (next_edge < 0) break;
      chain.edges.push_back(next_edge);
      ++y_used;
      at = g.edge(next_edge).dst;
    }
    m.chains.push_back(std::move(chain));
  }
  if (y_used != y_set) {
    throw SolverError("chain-position assignment left " +
                      std::to_string(y_set - y_used) + " edges stranded");
  }
  if (!is_feasible_matching(g, m, caps)) {
    throw SolverError("extracted matching violates feasibility");
  }
  return m;
}

inline Matching extract_matching(const ExchangeGraph& g, const Caps& caps,
                                 const PicefHandles& h, const Solution& sol,
                                 double tol = 1e-6) {
  if (sol.status == SolveStatus::Infeasible || sol.values.empty()) {
    throw SolverError("no solution to extract a matching from");
  }
  return extract_matching_from_values(g, caps, h, sol.values, tol);
}

}  // namespace stochkep
