// Command-line front end: generate pools, clear them with any of the solvers,
// and run simulation benchmarks that compare methods on shared scenarios.
//
// Exit codes: 0 success, 2 usage or input errors, 3 solver failure,
// 4 a limit was hit and the best incumbent found so far was written.

#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stochkep/stochkep.hpp"

namespace {

using namespace stochkep;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitLimit = 4;

// Method tokens: kep | kep-ip[:p] | kep-np | bnp | cvar[:gamma:alpha:samples]
MethodSpec parse_method_token(const std::string& token) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : token) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);

  MethodSpec spec;
  const std::string& name = parts[0];
  if (name == "kep" && parts.size() == 1) {
    spec.kind = MethodSpec::Kind::Deterministic;
  } else if (name == "kep-np" && parts.size() == 1) {
    spec.kind = MethodSpec::Kind::Expected;
  } else if (name == "bnp" && parts.size() == 1) {
    spec.kind = MethodSpec::Kind::BranchPrice;
  } else if (name == "kep-ip" && parts.size() <= 2) {
    spec.kind = MethodSpec::Kind::UniformProb;
    if (parts.size() == 2) spec.p_uniform = std::stod(parts[1]);
  } else if (name == "cvar" && (parts.size() == 1 || parts.size() == 4)) {
    spec.kind = MethodSpec::Kind::Cvar;
    if (parts.size() == 4) {
      spec.cvar.gamma = std::stod(parts[1]);
      spec.cvar.alpha = std::stod(parts[2]);
      spec.cvar.num_samples = std::stoi(parts[3]);
    }
  } else {
    throw std::invalid_argument(
        "unknown method '" + token +
        "' (expected kep, kep-ip[:p], kep-np, bnp, or cvar[:gamma:alpha:samples])");
  }
  return spec;
}

std::vector<MethodSpec> parse_method_list(const std::string& csv) {
  std::vector<MethodSpec> specs;
  std::string cur;
  std::istringstream in(csv);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) specs.push_back(parse_method_token(cur));
  }
  if (specs.empty()) throw std::invalid_argument("empty method list");
  return specs;
}

struct GenerateArgs {
  int size = 0;  // 0: use pairs/ndds directly
  GenConfig gen;
  std::string mode = "density";
  std::string weights = "unit";
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  GenConfig cfg = a.gen;
  if (a.size > 0) {
    const GenConfig sized = sized_config(a.size);
    cfg.num_pairs = sized.num_pairs;
    cfg.num_ndds = sized.num_ndds;
  }
  cfg.mode = a.mode == "blood" ? GenMode::BloodType : GenMode::Density;
  cfg.weight_kind = a.weights == "uniform" ? WeightKind::Uniform : WeightKind::Unit;

  const ExchangeGraph g = generate_instance(cfg);
  save_instance(g, a.out);
  std::printf("vertices: %d\n", g.num_vertices());
  std::printf("edges: %d\n", g.num_edges());
  std::printf("hash: %s\n", instance_hash(g).c_str());
  std::printf("wrote %s\n", a.out.c_str());
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string method = "kep-np";
  double p_uniform = 0.5;
  CvarParams cvar;
  std::uint64_t train_seed = 0;
  Caps caps{3, 4};
  double time_limit = kNoTimeLimit;
  double gap = 1e-9;
  std::string out;
};

void print_solution_summary(const ExchangeGraph& g, const std::string& method,
                            const char* status, double objective,
                            const Matching& m, double seconds) {
  std::printf("method: %s\n", method.c_str());
  std::printf("status: %s\n", status);
  std::printf("objective: %.17g\n", objective);
  std::printf("expected_weight: %.17g\n", matching_expected_weight(g, m));
  std::printf("cycles: %zu\n", m.cycles.size());
  std::printf("chains: %zu\n", m.chains.size());
  std::printf("solve_seconds: %.3f\n", seconds);
}

int write_and_report(const ExchangeGraph& g, const SolveArgs& a,
                     const char* status, double objective, const Matching& m,
                     double seconds, int exit_code) {
  print_solution_summary(g, a.method, status, objective, m, seconds);
  if (!a.out.empty()) {
    MatchingFile mf;
    mf.instance_hash = instance_hash(g);
    mf.method = a.method;
    mf.caps = a.caps;
    mf.objective_value = objective;
    mf.matching = m;
    mf.solve_seconds = seconds;
    save_matching(mf, a.out);
    std::printf("wrote %s\n", a.out.c_str());
  }
  return exit_code;
}

int run_solve(const SolveArgs& a) {
  const ExchangeGraph g = load_instance(a.instance);

  MethodSpec spec = parse_method_token(a.method);
  spec.p_uniform = a.p_uniform;
  spec.cvar = a.cvar;

  SolverConfig solver;
  solver.time_limit_seconds = a.time_limit;
  solver.mip_rel_gap = a.gap;

  if (spec.kind == MethodSpec::Kind::BranchPrice) {
    BranchPriceConfig cfg;
    cfg.lp = solver;
    cfg.time_limit_seconds = a.time_limit;
    const BranchPriceResult res = branch_and_price(g, a.caps, cfg);
    if (res.proven_optimal) {
      return write_and_report(g, a, "optimal", res.objective, res.matching,
                              res.solve_seconds, kExitOk);
    }
    return write_and_report(g, a, "limit", res.objective, res.matching,
                            res.solve_seconds, kExitLimit);
  }

  const std::vector<Cycle> cycles = enumerate_cycles(g, a.caps.cycle_cap);
  MilpModel model;
  PicefHandles handles;
  if (spec.kind == MethodSpec::Kind::Cvar) {
    const std::vector<Realization> train =
        sample_realizations(g, spec.cvar.num_samples, a.train_seed);
    BuiltSaaModel built = build_cvar_saa(g, a.caps, cycles, train, spec.cvar);
    model = std::move(built.model);
    handles = std::move(built.handles.picef);
  } else {
    BuiltModel built = spec.kind == MethodSpec::Kind::Deterministic
                           ? build_kep(g, a.caps, cycles)
                           : spec.kind == MethodSpec::Kind::Expected
                                 ? build_kep_np(g, a.caps, cycles)
                                 : build_kep_ip(g, a.caps, cycles, spec.p_uniform);
    model = std::move(built.model);
    handles = std::move(built.handles);
  }

  const Solution sol = solve(model, solver);
  if (sol.status == SolveStatus::Infeasible) {
    std::fprintf(stderr, "error: the model is infeasible\n");
    return kExitSolver;
  }
  if (sol.status == SolveStatus::LimitReached && sol.values.empty()) {
    std::fprintf(stderr, "error: hit the limit before finding any solution\n");
    return kExitSolver;
  }
  const Matching m = extract_matching(g, a.caps, handles, sol);
  if (sol.status == SolveStatus::LimitReached) {
    return write_and_report(g, a, "limit", sol.objective, m, sol.solve_seconds,
                            kExitLimit);
  }
  return write_and_report(g, a, "optimal", sol.objective, m, sol.solve_seconds,
                          kExitOk);
}

struct BenchArgs {
  ExperimentConfig cfg;
  std::string mode = "density";
  std::string methods = "kep,kep-np";
  std::string cells_out;
  std::string summary_out;
  std::string boxplot_out;
  std::string baseline = "kep";
  bool quiet = false;
};

int run_bench(const BenchArgs& a) {
  ExperimentConfig cfg = a.cfg;
  cfg.mode = a.mode == "blood" ? GenMode::BloodType : GenMode::Density;
  cfg.methods = parse_method_list(a.methods);

  std::function<void(const std::string&)> progress;
  if (!a.quiet) {
    progress = [](const std::string& line) {
      std::fprintf(stderr, "%s\n", line.c_str());
    };
  }
  const ExperimentResult res = run_experiment(cfg, progress);

  auto save = [](const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    fn(out);
    std::printf("wrote %s\n", path.c_str());
  };
  save(a.cells_out, [&](std::ostream& os) { write_cells_csv(res, os); });
  save(a.summary_out, [&](std::ostream& os) { write_summary_csv(res, os); });
  save(a.boxplot_out, [&](std::ostream& os) {
    os << boxplot_json(res, a.baseline).dump(2) << '\n';
  });

  std::printf("%-24s %8s %12s %12s %12s\n", "method", "solved", "med_pct_opt",
              "med_tail", "med_seconds");
  for (const MethodSpec& spec : cfg.methods) {
    const std::string name = spec.label();
    int solved = 0;
    for (const GraphCells& gc : res.graphs) {
      for (const MethodRun& run : gc.runs) {
        if (run.method == name && run.ok) ++solved;
      }
    }
    const std::vector<double> pct = pct_opt_cells(res, name);
    const std::vector<double> tail = tail_mean_cells(res, name, cfg.tail_alpha);
    const std::vector<double> secs = solve_time_cells(res, name);
    std::printf("%-24s %5d/%-2d %12.2f %12.3f %12.3f\n", name.c_str(), solved,
                cfg.num_graphs, pct.empty() ? 0.0 : quantile(pct, 0.5),
                tail.empty() ? 0.0 : quantile(tail, 0.5),
                secs.empty() ? 0.0 : quantile(secs, 0.5));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stochkep: kidney-exchange clearing under edge failures.\n"
      "Set STOCHKEP_THREADS to override solver thread counts."};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* cg = app.add_subcommand("generate", "Generate a random pool instance");
  cg->add_option("--pairs", gen.gen.num_pairs, "Number of patient-donor pairs");
  cg->add_option("--ndds", gen.gen.num_ndds, "Number of non-directed donors");
  cg->add_option("--size", gen.size,
                 "Total pool size (overrides --pairs/--ndds with the standard split)");
  cg->add_option("--mode", gen.mode, "Arc model: density or blood")
      ->check(CLI::IsMember({"density", "blood"}));
  cg->add_option("--density", gen.gen.density, "Arc probability per slot (density mode)");
  cg->add_option("--weights", gen.weights, "Edge weights: unit or uniform")
      ->check(CLI::IsMember({"unit", "uniform"}));
  cg->add_option("--weight-lo", gen.gen.weight_lo, "Uniform weight lower bound");
  cg->add_option("--weight-hi", gen.gen.weight_hi, "Uniform weight upper bound");
  cg->add_option("--prob-lo", gen.gen.prob_lo, "Failure probability lower bound");
  cg->add_option("--prob-hi", gen.gen.prob_hi, "Failure probability upper bound");
  cg->add_option("--seed", gen.gen.seed, "Generation seed");
  cg->add_option("--out", gen.out, "Instance file to write")->required();

  SolveArgs sol;
  CLI::App* cs = app.add_subcommand("solve", "Clear one pool instance");
  cs->add_option("--instance", sol.instance, "Instance file")->required();
  cs->add_option("--method", sol.method,
                 "kep | kep-ip | kep-np | bnp | cvar (token parameters allowed,"
                 " e.g. cvar:10:0.1:20)");
  cs->add_option("--p-uniform", sol.p_uniform, "Uniform failure probability (kep-ip)");
  cs->add_option("--gamma", sol.cvar.gamma, "Risk weight (cvar)");
  cs->add_option("--alpha", sol.cvar.alpha, "Tail fraction (cvar)");
  cs->add_option("--samples", sol.cvar.num_samples, "Training scenarios (cvar)");
  cs->add_option("--train-seed", sol.train_seed, "Training scenario seed (cvar)");
  cs->add_option("--cycle-cap", sol.caps.cycle_cap, "Maximum cycle length");
  cs->add_option("--chain-cap", sol.caps.chain_cap, "Maximum chain length");
  cs->add_option("--time-limit", sol.time_limit, "Solver time limit in seconds");
  cs->add_option("--gap", sol.gap, "Relative MIP gap");
  cs->add_option("--out", sol.out, "Matching file to write");

  BenchArgs bench;
  CLI::App* cb = app.add_subcommand("bench", "Compare methods on simulated pools");
  cb->add_option("--graphs", bench.cfg.num_graphs, "Number of pools");
  cb->add_option("--size", bench.cfg.graph_size, "Vertices per pool");
  cb->add_option("--realizations", bench.cfg.num_realizations,
                 "Evaluation scenarios per pool");
  cb->add_option("--methods", bench.methods,
                 "Comma-separated method tokens (e.g. kep,kep-np,cvar:10:0.1:10)");
  cb->add_option("--mode", bench.mode, "Arc model: density or blood")
      ->check(CLI::IsMember({"density", "blood"}));
  cb->add_option("--density", bench.cfg.density, "Arc probability per slot");
  cb->add_option("--prob-lo", bench.cfg.prob_lo, "Failure probability lower bound");
  cb->add_option("--prob-hi", bench.cfg.prob_hi, "Failure probability upper bound");
  cb->add_option("--cycle-cap", bench.cfg.caps.cycle_cap, "Maximum cycle length");
  cb->add_option("--chain-cap", bench.cfg.caps.chain_cap, "Maximum chain length");
  cb->add_option("--tail-alpha", bench.cfg.tail_alpha, "Tail fraction for summaries");
  cb->add_option("--seed", bench.cfg.seed, "Experiment seed");
  cb->add_option("--time-limit", bench.cfg.solver.time_limit_seconds,
                 "Per-solve time limit in seconds");
  cb->add_option("--gap", bench.cfg.solver.mip_rel_gap, "Relative MIP gap");
  cb->add_option("--cells-out", bench.cells_out, "Per-realization CSV path");
  cb->add_option("--summary-out", bench.summary_out, "Per-pool summary CSV path");
  cb->add_option("--boxplot-out", bench.boxplot_out, "Box-plot JSON path");
  cb->add_option("--baseline", bench.baseline, "Baseline method label for lifts");
  cb->add_flag("--quiet", bench.quiet, "Suppress progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cg->parsed()) return run_generate(gen);
    if (cs->parsed()) return run_solve(sol);
    return run_bench(bench);
  } catch (const SolverError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    // File and input problems (missing instance, unwritable output path).
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
}
