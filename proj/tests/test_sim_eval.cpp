// Simulation-based evaluation: metric conventions, summary statistics, the
// experiment driver's seeding contract, and the file outputs.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "stochkep/sim_eval.hpp"

using namespace stochkep;
using Catch::Matchers::WithinAbs;

namespace {

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) {
    if (c == '\n') ++n;
  }
  return n;
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.num_graphs = 2;
  cfg.graph_size = 10;
  cfg.num_realizations = 8;
  cfg.caps = {3, 2};
  cfg.density = 0.3;
  cfg.seed = 42;
  MethodSpec det;
  det.kind = MethodSpec::Kind::Deterministic;
  MethodSpec exp;
  exp.kind = MethodSpec::Kind::Expected;
  cfg.methods = {det, exp};
  return cfg;
}

}  // namespace

TEST_CASE("percent-of-omniscient conventions") {
  CHECK_THAT(pct_opt(5.0, 10.0), WithinAbs(50.0, 1e-12));
  CHECK_THAT(pct_opt(10.0, 10.0), WithinAbs(100.0, 1e-12));
  CHECK(pct_opt(0.0, 0.0) == 100.0);  // nothing to match, nothing missed
  CHECK(std::isinf(pct_opt(3.0, 0.0)));
}

TEST_CASE("tail-mean lift conventions") {
  CHECK_THAT(delta_alpha_pct(11.0, 10.0), WithinAbs(10.0, 1e-12));
  CHECK_THAT(delta_alpha_pct(9.0, 10.0), WithinAbs(-10.0, 1e-12));
  CHECK_THROWS_AS(delta_alpha_pct(5.0, 0.0), std::invalid_argument);
}

TEST_CASE("clairvoyant replanning on the surviving subgraph") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 2};

  Realization all;
  all.exists.assign(5, true);
  CHECK_THAT(omniscient_weight(g, caps, all), WithinAbs(20.0, 1e-9));

  // Killing the heavy cycle's forward edge leaves cycle {2,3} as the best.
  Realization no0 = all;
  no0.exists[0] = false;
  CHECK_THAT(omniscient_weight(g, caps, no0), WithinAbs(7.0, 1e-9));

  Realization none;
  none.exists.assign(5, false);
  CHECK_THAT(omniscient_weight(g, caps, none), WithinAbs(0.0, 1e-12));
}

TEST_CASE("method labels are frozen") {
  MethodSpec s;
  s.kind = MethodSpec::Kind::Deterministic;
  CHECK(s.label() == "kep");
  s.kind = MethodSpec::Kind::Expected;
  CHECK(s.label() == "kep-np");
  s.kind = MethodSpec::Kind::BranchPrice;
  CHECK(s.label() == "bnp");
  s.kind = MethodSpec::Kind::UniformProb;
  s.p_uniform = 0.5;
  CHECK(s.label() == "kep-ip0.5");
  s.kind = MethodSpec::Kind::Cvar;
  s.cvar.gamma = 10.0;
  s.cvar.alpha = 0.1;
  s.cvar.num_samples = 20;
  CHECK(s.label() == "cvar-g10-a0.1-n20");
}

TEST_CASE("interpolated quantiles and box statistics") {
  const std::vector<double> xs = {4.0, 1.0, 3.0, 2.0};  // order must not matter
  CHECK_THAT(quantile(xs, 0.0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(quantile(xs, 1.0), WithinAbs(4.0, 1e-12));
  CHECK_THAT(quantile(xs, 0.5), WithinAbs(2.5, 1e-12));
  CHECK_THAT(quantile(xs, 0.25), WithinAbs(1.75, 1e-12));
  CHECK_THAT(quantile(xs, 0.75), WithinAbs(3.25, 1e-12));
  CHECK_THAT(quantile({7.0}, 0.3), WithinAbs(7.0, 1e-12));
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);

  const BoxStats b = box_stats({1.0, 2.0, 3.0, 4.0, 100.0});
  CHECK(b.count == 5);
  CHECK_THAT(b.median, WithinAbs(3.0, 1e-12));
  CHECK_THAT(b.q1, WithinAbs(2.0, 1e-12));
  CHECK_THAT(b.q3, WithinAbs(4.0, 1e-12));
  // 1.5*IQR whiskers clip to the observed range: [max(-1,1), min(7,100)].
  CHECK_THAT(b.whisker_lo, WithinAbs(1.0, 1e-12));
  CHECK_THAT(b.whisker_hi, WithinAbs(7.0, 1e-12));
}

TEST_CASE("the experiment driver is deterministic and honors its streams") {
  const ExperimentConfig cfg = tiny_config();
  const ExperimentResult a = run_experiment(cfg);
  const ExperimentResult b = run_experiment(cfg);

  REQUIRE(a.graphs.size() == 2);
  for (std::size_t gi = 0; gi < a.graphs.size(); ++gi) {
    const GraphCells& ga = a.graphs[gi];
    const GraphCells& gb = b.graphs[gi];
    REQUIRE(ga.runs.size() == 2);
    REQUIRE(ga.omniscient.size() == 8);
    CHECK(ga.omniscient == gb.omniscient);
    for (std::size_t mi = 0; mi < ga.runs.size(); ++mi) {
      REQUIRE(ga.runs[mi].ok);
      CHECK(ga.runs[mi].objective == gb.runs[mi].objective);
      CHECK(ga.runs[mi].realized == gb.runs[mi].realized);
      CHECK(ga.runs[mi].realized.size() == 8);
    }
  }

  // The pool and its evaluation scenarios come from documented seed streams;
  // replaying a method's matching against the re-derived scenarios must
  // reproduce the recorded cells exactly.
  for (int gi = 0; gi < 2; ++gi) {
    GenConfig gen = sized_config(cfg.graph_size);
    gen.density = cfg.density;
    gen.seed = mix_seed(cfg.seed, gi, 0);
    const ExchangeGraph g = generate_instance(gen);
    CHECK(g.num_vertices() == a.graphs[gi].num_vertices);
    CHECK(g.num_edges() == a.graphs[gi].num_edges);

    const std::vector<Realization> eval =
        sample_realizations(g, cfg.num_realizations, mix_seed(cfg.seed, gi, 1));
    for (const MethodRun& run : a.graphs[gi].runs) {
      for (std::size_t r = 0; r < eval.size(); ++r) {
        CHECK(run.realized[r] == realized_weight(g, run.matching, eval[r]));
      }
    }
    for (std::size_t r = 0; r < eval.size(); ++r) {
      CHECK_THAT(omniscient_weight(g, cfg.caps, eval[r]),
                 WithinAbs(a.graphs[gi].omniscient[r], 1e-9));
    }
  }
}

TEST_CASE("adding a method never perturbs existing cells") {
  const ExperimentConfig base = tiny_config();
  ExperimentConfig more = base;
  MethodSpec cvar;
  cvar.kind = MethodSpec::Kind::Cvar;
  cvar.cvar.gamma = 2.0;
  cvar.cvar.alpha = 0.5;
  cvar.cvar.num_samples = 5;
  more.methods.push_back(cvar);

  const ExperimentResult a = run_experiment(base);
  const ExperimentResult b = run_experiment(more);
  REQUIRE(b.graphs.size() == a.graphs.size());
  for (std::size_t gi = 0; gi < a.graphs.size(); ++gi) {
    CHECK(a.graphs[gi].omniscient == b.graphs[gi].omniscient);
    REQUIRE(b.graphs[gi].runs.size() == 3);
    for (std::size_t mi = 0; mi < 2; ++mi) {
      CHECK(a.graphs[gi].runs[mi].method == b.graphs[gi].runs[mi].method);
      CHECK(a.graphs[gi].runs[mi].objective == b.graphs[gi].runs[mi].objective);
      CHECK(a.graphs[gi].runs[mi].realized == b.graphs[gi].runs[mi].realized);
    }
    CHECK(b.graphs[gi].runs[2].ok);
  }
}

TEST_CASE("experiments require at least one method") {
  ExperimentConfig cfg = tiny_config();
  cfg.methods.clear();
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("summary cells pool the right slices") {
  const ExperimentResult res = run_experiment(tiny_config());

  const std::vector<double> cells = pct_opt_cells(res, "kep");
  CHECK(cells.size() == 16);  // 2 pools x 8 realizations
  for (double c : cells) CHECK(c >= 0.0);

  CHECK(tail_mean_cells(res, "kep-np", 0.5).size() == 2);
  CHECK(solve_time_cells(res, "kep").size() == 2);
  CHECK(pct_opt_cells(res, "no-such-method").empty());

  const std::vector<double> lifts = tail_lift_cells(res, "kep-np", "kep", 0.5);
  CHECK(lifts.size() <= 2);  // zero-baseline pools are skipped
  for (double l : lifts) CHECK(std::isfinite(l));
}

TEST_CASE("per-cell CSV has one row per pool, method, and realization") {
  const ExperimentResult res = run_experiment(tiny_config());
  std::ostringstream os;
  write_cells_csv(res, os);
  const std::string text = os.str();
  CHECK(text.rfind("graph,method,realization,realized_weight,omniscient_weight,pct_opt\n",
                   0) == 0);
  CHECK(count_lines(text) == 1 + 2 * 2 * 8);

  // Every data row carries exactly six fields.
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    int commas = 0;
    for (char c : line) {
      if (c == ',') ++commas;
    }
    CHECK(commas == 5);
  }
}

TEST_CASE("summary CSV reports outcomes and scrubs error text") {
  const ExperimentResult res = run_experiment(tiny_config());
  std::ostringstream os;
  write_summary_csv(res, os);
  const std::string text = os.str();
  CHECK(text.rfind("graph,method,ok,objective,solve_seconds,tail_mean,error\n", 0) == 0);
  CHECK(count_lines(text) == 1 + 2 * 2);
  CHECK(text.find(",kep,1,") != std::string::npos);
  CHECK(text.find(",kep-np,1,") != std::string::npos);

  // A failed run keeps the CSV rectangular: empty numeric fields, scrubbed text.
  ExperimentResult fake;
  fake.config = tiny_config();
  GraphCells gc;
  gc.graph_index = 0;
  MethodRun bad;
  bad.method = "kep";
  bad.ok = false;
  bad.error = "boom, line\nbreak";
  gc.runs.push_back(bad);
  fake.graphs.push_back(gc);
  std::ostringstream os2;
  write_summary_csv(fake, os2);
  CHECK(os2.str().find("0,kep,0,,,,boom; line;break\n") != std::string::npos);
}

TEST_CASE("box-plot JSON carries five-number summaries per method") {
  const ExperimentResult res = run_experiment(tiny_config());
  const nlohmann::json j = boxplot_json(res, "kep");
  REQUIRE(j.contains("metrics"));
  const auto& metrics = j.at("metrics");
  for (const std::string metric : {"pct_opt", "tail_mean", "solve_seconds"}) {
    REQUIRE(metrics.contains(metric));
    for (const std::string m : {"kep", "kep-np"}) {
      REQUIRE(metrics.at(metric).contains(m));
      const auto& e = metrics.at(metric).at(m);
      CHECK(e.contains("median"));
      CHECK(e.contains("q1"));
      CHECK(e.contains("q3"));
      CHECK(e.contains("whisker_lo"));
      CHECK(e.contains("whisker_hi"));
      CHECK(e.at("count").get<int>() > 0);
    }
  }
  // The baseline never reports a lift against itself.
  if (metrics.contains("tail_lift_vs_kep")) {
    CHECK_FALSE(metrics.at("tail_lift_vs_kep").contains("kep"));
  }
}
