#pragma once

// Simulation-based evaluation of clearing policies.
//
// For each generated pool, every policy proposes one matching; a shared set of
// failure realizations is then replayed against all proposals so policies are
// compared on identical scenarios. Two headline metrics:
//   * percent-of-omniscient: realized weight relative to the best matching a
//     clairvoyant planner could have packed on the surviving subgraph
//     (100 when both are zero);
//   * tail-mean lift: percent change of the mean realized weight over the
//     worst alpha-fraction of scenarios, relative to a baseline policy.
// Seeds split per pool and stream, so adding realizations, methods, or pools
// never perturbs existing cells.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochkep/branch_price.hpp"
#include "stochkep/cvar.hpp"
#include "stochkep/exchange_graph.hpp"
#include "stochkep/expected_value.hpp"
#include "stochkep/formulations.hpp"
#include "stochkep/highs_solver.hpp"
#include "stochkep/instance_gen.hpp"

namespace stochkep {

// Realized weight as a percentage of what a clairvoyant planner achieves on
// the same scenario; both zero counts as meeting the optimum.
inline double pct_opt(double realized, double omniscient) {
  if (omniscient == 0.0) {
    return realized == 0.0 ? 100.0 : std::numeric_limits<double>::infinity();
  }
  return 100.0 * realized / omniscient;
}

// Percent lift of a method's tail mean over a baseline's tail mean.
inline double delta_alpha_pct(double method_tail, double baseline_tail) {
  if (baseline_tail == 0.0) {
    throw std::invalid_argument("tail-mean lift is undefined on a zero baseline");
  }
  return 100.0 * (method_tail - baseline_tail) / baseline_tail;
}

// Best weight a clairvoyant planner can pack once the failed edges are known:
// deterministic clearing on the surviving subgraph, mapped back to original
// edge weights. Vertices keep their ids; surviving edges are renumbered.
inline double omniscient_weight(const ExchangeGraph& g, const Caps& caps,
                                const Realization& r,
                                const SolverConfig& config = {}) {
  std::vector<Edge> kept;
  for (const Edge& e : g.edges()) {
    if (!r.exists[e.id]) continue;
    Edge copy = e;
    copy.id = static_cast<int>(kept.size());
    copy.fail_prob = 0.0;
    kept.push_back(copy);
  }
  ExchangeGraph sub(g.vertices(), std::move(kept));
  BuiltModel built = build_kep(sub, caps, enumerate_cycles(sub, caps.cycle_cap));
  const Solution sol = solve(built.model, config);
  if (sol.status != SolveStatus::Optimal) {
    throw SolverError("clairvoyant subproblem did not solve to optimality");
  }
  return sol.objective;
}

struct MethodSpec {
  enum class Kind { Deterministic, UniformProb, Expected, Cvar, BranchPrice };
  Kind kind = Kind::Expected;
  double p_uniform = 0.5;  // UniformProb only
  CvarParams cvar;         // Cvar only

  std::string label() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::Deterministic: os << "kep"; break;
      case Kind::UniformProb: os << "kep-ip" << p_uniform; break;
      case Kind::Expected: os << "kep-np"; break;
      case Kind::BranchPrice: os << "bnp"; break;
      case Kind::Cvar:
        os << "cvar-g" << cvar.gamma << "-a" << cvar.alpha << "-n"
           << cvar.num_samples;
        break;
    }
    return os.str();
  }
};

struct ExperimentConfig {
  int num_graphs = 32;
  int graph_size = 64;
  int num_realizations = 200;
  Caps caps{3, 4};
  std::vector<MethodSpec> methods;
  GenMode mode = GenMode::Density;
  double density = 0.15;
  WeightKind weight_kind = WeightKind::Unit;
  double prob_lo = 0.1;
  double prob_hi = 0.9;
  double tail_alpha = 0.5;  // alpha used for the reported tail means
  std::uint64_t seed = 0;
  SolverConfig solver;
};

struct MethodRun {
  std::string method;
  bool ok = false;
  std::string error;
  // False when the solver stopped at a limit and the run kept the incumbent
  // decision. A budgeted incumbent is still a valid clearing decision; only a
  // solve that produced no usable matching at all marks the run failed.
  bool proven = true;
  double objective = 0.0;  // solver objective, in the method's own convention
  double solve_seconds = 0.0;
  Matching matching;
  std::vector<double> realized;  // per realization; empty when !ok
};

struct GraphCells {
  int graph_index = 0;
  int num_vertices = 0;
  int num_edges = 0;
  std::vector<double> omniscient;  // per realization
  std::vector<MethodRun> runs;     // aligned with config.methods
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<GraphCells> graphs;
};

namespace detail {

inline MethodRun run_method(const ExchangeGraph& g, const Caps& caps,
                            const std::vector<Cycle>& cycles, const MethodSpec& spec,
                            std::uint64_t scenario_seed, const SolverConfig& solver) {
  MethodRun run;
  run.method = spec.label();
  try {
    if (spec.kind == MethodSpec::Kind::BranchPrice) {
      BranchPriceConfig cfg;
      cfg.lp = solver;
      cfg.time_limit_seconds = solver.time_limit_seconds;
      const BranchPriceResult res = branch_and_price(g, caps, cfg);
      if (!res.proven_optimal) {
        throw SolverError("column-generation search hit its limits");
      }
      run.matching = res.matching;
      run.objective = res.objective;
      run.solve_seconds = res.solve_seconds;
      run.ok = true;
      return run;
    }
    if (spec.kind == MethodSpec::Kind::Cvar) {
      const std::vector<Realization> train =
          sample_realizations(g, spec.cvar.num_samples, scenario_seed);
      BuiltSaaModel built = build_cvar_saa(g, caps, cycles, train, spec.cvar);
      const Solution sol = solve(built.model, solver);
      if (sol.status == SolveStatus::Infeasible || sol.values.empty()) {
        throw SolverError("risk-averse model produced no usable decision");
      }
      run.proven = sol.status == SolveStatus::Optimal;
      run.matching = extract_matching(g, caps, built.handles.picef, sol);
      run.objective = sol.objective;
      run.solve_seconds = sol.solve_seconds;
      run.ok = true;
      return run;
    }
    BuiltModel built =
        spec.kind == MethodSpec::Kind::Deterministic
            ? build_kep(g, caps, cycles)
            : spec.kind == MethodSpec::Kind::Expected
                  ? build_kep_np(g, caps, cycles)
                  : build_kep_ip(g, caps, cycles, spec.p_uniform);
    const Solution sol = solve(built.model, solver);
    if (sol.status == SolveStatus::Infeasible || sol.values.empty()) {
      throw SolverError("clearing model produced no usable decision");
    }
    run.proven = sol.status == SolveStatus::Optimal;
    run.matching = extract_matching(g, caps, built.handles, sol);
    run.objective = sol.objective;
    run.solve_seconds = sol.solve_seconds;
    run.ok = true;
  } catch (const std::exception& ex) {
    run.ok = false;
    run.error = ex.what();
  }
  return run;
}

inline std::uint64_t label_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

// Streams hanging off the experiment seed. Pool g draws its structure from
// (seed, g, 0), its evaluation scenarios from (seed, g, 1), and each
// risk-averse method's training scenarios from (seed, g, 2 + hash(label)).
inline ExperimentResult run_experiment(
    const ExperimentConfig& cfg,
    const std::function<void(const std::string&)>& progress = {}) {
  if (cfg.methods.empty()) {
    throw std::invalid_argument("experiment needs at least one method");
  }
  ExperimentResult result;
  result.config = cfg;

  for (int gi = 0; gi < cfg.num_graphs; ++gi) {
    GenConfig gen = sized_config(cfg.graph_size);
    gen.mode = cfg.mode;
    gen.density = cfg.density;
    gen.weight_kind = cfg.weight_kind;
    gen.prob_lo = cfg.prob_lo;
    gen.prob_hi = cfg.prob_hi;
    gen.seed = mix_seed(cfg.seed, gi, 0);
    const ExchangeGraph g = generate_instance(gen);
    const std::vector<Cycle> cycles = enumerate_cycles(g, cfg.caps.cycle_cap);

    GraphCells cells;
    cells.graph_index = gi;
    cells.num_vertices = g.num_vertices();
    cells.num_edges = g.num_edges();

    const std::vector<Realization> eval =
        sample_realizations(g, cfg.num_realizations, mix_seed(cfg.seed, gi, 1));
    for (const Realization& r : eval) {
      cells.omniscient.push_back(omniscient_weight(g, cfg.caps, r, cfg.solver));
    }

    for (const MethodSpec& spec : cfg.methods) {
      const std::uint64_t train_seed =
          mix_seed(cfg.seed, gi, 2 + detail::label_hash(spec.label()));
      MethodRun run = detail::run_method(g, cfg.caps, cycles, spec, train_seed,
                                         cfg.solver);
      if (run.ok) {
        run.realized.reserve(eval.size());
        for (const Realization& r : eval) {
          run.realized.push_back(realized_weight(g, run.matching, r));
        }
      }
      cells.runs.push_back(std::move(run));
      if (progress) {
        std::ostringstream os;
        os << "pool " << gi + 1 << "/" << cfg.num_graphs << " "
           << cells.runs.back().method
           << (cells.runs.back().ok ? " done" : " FAILED: " + cells.runs.back().error);
        progress(os.str());
      }
    }
    result.graphs.push_back(std::move(cells));
  }
  return result;
}

// ---- summaries ---------------------------------------------------------------

// Linear-interpolation quantile on a sorted copy (the convention most
// plotting libraries use for box whiskers and medians).
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile of nothing");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= xs.size()) return xs.back();
  const double frac = h - static_cast<double>(lo);
  return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

struct BoxStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  int count = 0;
};

// Five-number summary with 1.5*IQR whiskers clipped to the data range.
inline BoxStats box_stats(const std::vector<double>& xs) {
  BoxStats b;
  b.count = static_cast<int>(xs.size());
  b.median = quantile(xs, 0.5);
  b.q1 = quantile(xs, 0.25);
  b.q3 = quantile(xs, 0.75);
  const double iqr = b.q3 - b.q1;
  double lo = b.q1 - 1.5 * iqr;
  double hi = b.q3 + 1.5 * iqr;
  double data_lo = xs.front(), data_hi = xs.front();
  for (double x : xs) {
    data_lo = std::min(data_lo, x);
    data_hi = std::max(data_hi, x);
  }
  b.whisker_lo = std::max(lo, data_lo);
  b.whisker_hi = std::min(hi, data_hi);
  return b;
}

// Pooled per-realization percent-of-omniscient cells for one method.
inline std::vector<double> pct_opt_cells(const ExperimentResult& res,
                                         const std::string& method) {
  std::vector<double> cells;
  for (const GraphCells& gc : res.graphs) {
    for (const MethodRun& run : gc.runs) {
      if (run.method != method || !run.ok) continue;
      for (std::size_t r = 0; r < run.realized.size(); ++r) {
        cells.push_back(pct_opt(run.realized[r], gc.omniscient[r]));
      }
    }
  }
  return cells;
}

// Per-pool tail means (mean of the worst alpha-fraction of realized weights).
inline std::vector<double> tail_mean_cells(const ExperimentResult& res,
                                           const std::string& method,
                                           double alpha) {
  std::vector<double> cells;
  for (const GraphCells& gc : res.graphs) {
    for (const MethodRun& run : gc.runs) {
      if (run.method != method || !run.ok) continue;
      cells.push_back(cvar_of_samples(run.realized, alpha));
    }
  }
  return cells;
}

// Per-pool tail-mean lift of `method` over `baseline` (pools where either
// failed or the baseline tail is zero are skipped).
inline std::vector<double> tail_lift_cells(const ExperimentResult& res,
                                           const std::string& method,
                                           const std::string& baseline,
                                           double alpha) {
  std::vector<double> cells;
  for (const GraphCells& gc : res.graphs) {
    const MethodRun* m = nullptr;
    const MethodRun* b = nullptr;
    for (const MethodRun& run : gc.runs) {
      if (run.method == method) m = &run;
      if (run.method == baseline) b = &run;
    }
    if (!m || !b || !m->ok || !b->ok) continue;
    const double tb = cvar_of_samples(b->realized, alpha);
    if (tb == 0.0) continue;
    cells.push_back(delta_alpha_pct(cvar_of_samples(m->realized, alpha), tb));
  }
  return cells;
}

inline std::vector<double> solve_time_cells(const ExperimentResult& res,
                                            const std::string& method) {
  std::vector<double> cells;
  for (const GraphCells& gc : res.graphs) {
    for (const MethodRun& run : gc.runs) {
      if (run.method == method && run.ok) cells.push_back(run.solve_seconds);
    }
  }
  return cells;
}

// ---- file outputs --------------------------------------------------------------

// One row per (pool, method, realization).
inline void write_cells_csv(const ExperimentResult& res, std::ostream& os) {
  os << "graph,method,realization,realized_weight,omniscient_weight,pct_opt\n";
  for (const GraphCells& gc : res.graphs) {
    for (const MethodRun& run : gc.runs) {
      if (!run.ok) continue;
      for (std::size_t r = 0; r < run.realized.size(); ++r) {
        os << gc.graph_index << ',' << run.method << ',' << r << ','
           << run.realized[r] << ',' << gc.omniscient[r] << ','
           << pct_opt(run.realized[r], gc.omniscient[r]) << '\n';
      }
    }
  }
}

// One row per (pool, method): solver outcome and per-pool summaries.
inline void write_summary_csv(const ExperimentResult& res, std::ostream& os) {
  os << "graph,method,ok,objective,solve_seconds,tail_mean,error\n";
  for (const GraphCells& gc : res.graphs) {
    for (const MethodRun& run : gc.runs) {
      os << gc.graph_index << ',' << run.method << ',' << (run.ok ? 1 : 0) << ',';
      if (run.ok) {
        os << run.objective << ',' << run.solve_seconds << ','
           << cvar_of_samples(run.realized, res.config.tail_alpha) << ',';
      } else {
        os << ",,,";
      }
      std::string err = run.error;
      for (char& c : err) {
        if (c == ',' || c == '\n') c = ';';
      }
      os << err << '\n';
    }
  }
}

// Box-plot geometry for the headline metrics, one entry per method.
inline nlohmann::json boxplot_json(const ExperimentResult& res,
                                   const std::string& baseline) {
  nlohmann::json j;
  j["metrics"] = nlohmann::json::object();
  auto emit = [&](const std::string& metric, const std::string& method,
                  const std::vector<double>& cells) {
    if (cells.empty()) return;
    const BoxStats b = box_stats(cells);
    j["metrics"][metric][method] = {{"median", b.median},   {"q1", b.q1},
                                    {"q3", b.q3},           {"whisker_lo", b.whisker_lo},
                                    {"whisker_hi", b.whisker_hi}, {"count", b.count}};
  };
  for (const MethodSpec& spec : res.config.methods) {
    const std::string name = spec.label();
    emit("pct_opt", name, pct_opt_cells(res, name));
    emit("tail_mean", name, tail_mean_cells(res, name, res.config.tail_alpha));
    emit("solve_seconds", name, solve_time_cells(res, name));
    if (name != baseline) {
      emit("tail_lift_vs_" + baseline, name,
           tail_lift_cells(res, name, baseline, res.config.tail_alpha));
    }
  }
  return j;
}

}  // namespace stochkep
