#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fixtures.hpp"
#include "stochkep/cvar.hpp"
#include "stochkep/highs_solver.hpp"

using namespace stochkep;

namespace {

// Exact mean-risk score of fixed per-scenario losses: mean plus
// gamma * min_d [ d + mean(max(loss - d, 0)) / alpha ]. The inner minimum of
// a convex piecewise-linear function is attained at one of the loss values.
double mean_risk_score(const std::vector<double>& losses, double gamma, double alpha) {
  const double n = static_cast<double>(losses.size());
  const double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / n;
  double best = std::numeric_limits<double>::infinity();
  for (double d : losses) {
    double excess = 0.0;
    for (double l : losses) excess += std::max(l - d, 0.0);
    best = std::min(best, d + excess / (alpha * n));
  }
  return mean + gamma * best;
}

}  // namespace

TEST_CASE("scenario sampling is seeded and respects degenerate probabilities") {
  const ExchangeGraph g = fixtures::small_pool();
  const std::vector<Realization> a = sample_realizations(g, 50, 7);
  const std::vector<Realization> b = sample_realizations(g, 50, 7);
  const std::vector<Realization> c = sample_realizations(g, 50, 8);
  REQUIRE(a.size() == 50);
  bool identical = true;
  bool differs_somewhere = false;
  for (int i = 0; i < 50; ++i) {
    identical = identical && a[i].exists == b[i].exists;
    differs_somewhere = differs_somewhere || a[i].exists != c[i].exists;
    // Edge 4 never fails (p = 0).
    CHECK(a[i].exists[4] == 1);
  }
  CHECK(identical);
  CHECK(differs_somewhere);

  // A certain-failure edge never survives.
  std::vector<Vertex> vs = {{0, VertexKind::Pair}, {1, VertexKind::Pair}};
  std::vector<Edge> es = {{0, 0, 1, 1.0, 1.0}};
  const ExchangeGraph dead(std::move(vs), std::move(es));
  for (const Realization& r : sample_realizations(dead, 100, 3)) {
    REQUIRE(r.exists[0] == 0);
  }
}

TEST_CASE("realized weight: cycles all-or-nothing, chains keep the prefix") {
  const ExchangeGraph g = fixtures::small_pool();
  Matching m;
  m.cycles.push_back(enumerate_cycles(g, 3)[0]);  // edges {0,1}, weight 20
  m.chains.push_back({{4, 2}});                   // 3 -> 0 -> 2? no: 4 then 2

  Realization all{std::vector<std::uint8_t>(5, 1)};
  // Infeasible vertex overlap is irrelevant here; the function just scores.
  CHECK(realized_weight(g, m, all) == 24.0);

  Realization kill_cycle = all;
  kill_cycle.exists[1] = 0;
  CHECK(realized_weight(g, m, kill_cycle) == 4.0);  // cycle dies, chain intact

  Realization kill_tail = all;
  kill_tail.exists[2] = 0;
  CHECK(realized_weight(g, m, kill_tail) == 21.0);  // chain keeps edge 4 only

  Realization kill_head = all;
  kill_head.exists[4] = 0;
  CHECK(realized_weight(g, m, kill_head) == 20.0);  // whole chain gone
}

TEST_CASE("sampled mean realized weight matches the closed-form expectation") {
  const ExchangeGraph g = fixtures::small_pool();
  Matching m;
  m.cycles.push_back(enumerate_cycles(g, 3)[1]);  // expected 5.67
  m.chains.push_back({{4}});                      // expected 1 (infeasible mix, fine)
  const double expect = matching_expected_weight(g, m);

  const int n = 200000;
  const std::vector<Realization> rs = sample_realizations(g, n, 123);
  double sum = 0.0, sumsq = 0.0;
  for (const Realization& r : rs) {
    const double w = realized_weight(g, m, r);
    sum += w;
    sumsq += w * w;
  }
  const double mean = sum / n;
  const double var = (sumsq - sum * sum / n) / (n - 1);
  const double sigma = std::sqrt(var / n);
  CHECK(std::fabs(mean - expect) <= 3.0 * sigma + 1e-12);
}

TEST_CASE("tail mean of samples") {
  const std::vector<double> v = {3.0, 1.0, 4.0, 2.0};
  CHECK(cvar_of_samples(v, 0.5) == (1.0 + 2.0) / 2.0);
  CHECK(cvar_of_samples(v, 0.25) == 1.0);
  CHECK(cvar_of_samples(v, 0.001) == 1.0);  // tail never empties

  // alpha = 1 reproduces the plain mean bit-for-bit.
  std::vector<double> awkward = {0.1, 0.7, 0.3, 1e-9, 123.456, 0.2};
  const double mean =
      std::accumulate(awkward.begin(), awkward.end(), 0.0) / awkward.size();
  CHECK(cvar_of_samples(awkward, 1.0) == mean);

  // ceil(alpha * n) does not overshoot on inexact products: 0.1 * 200 = 20.
  std::vector<double> many(200);
  std::iota(many.begin(), many.end(), 0.0);
  CHECK(cvar_of_samples(many, 0.1) == 9.5);

  CHECK_THROWS_AS(cvar_of_samples({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(cvar_of_samples(v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cvar_of_samples(v, 1.5), std::invalid_argument);
}

TEST_CASE("sample-average model validates its inputs") {
  const ExchangeGraph g = fixtures::small_pool();
  const std::vector<Cycle> cycles = enumerate_cycles(g, 3);
  CvarParams params;
  CHECK_THROWS_AS(build_cvar_saa(g, Caps{3, 4}, cycles, {}, params),
                  std::invalid_argument);
  std::vector<Realization> bad = {{std::vector<std::uint8_t>(2, 1)}};
  CHECK_THROWS_AS(build_cvar_saa(g, Caps{3, 4}, cycles, bad, params),
                  std::invalid_argument);
  std::vector<Realization> ok = {{std::vector<std::uint8_t>(5, 1)}};
  CvarParams bad_alpha;
  bad_alpha.alpha = 0.0;
  CHECK_THROWS_AS(build_cvar_saa(g, Caps{3, 4}, cycles, ok, bad_alpha),
                  std::invalid_argument);
}

TEST_CASE("risk-neutral single-scenario model reduces to deterministic clearing") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 4};
  std::vector<Realization> all = {{std::vector<std::uint8_t>(5, 1)}};
  CvarParams params;
  params.gamma = 0.0;
  BuiltSaaModel built = build_cvar_saa(g, caps, enumerate_cycles(g, 3), all, params);
  const Solution sol = solve(built.model);
  REQUIRE(sol.status == SolveStatus::Optimal);
  // Loss convention: minimized objective is the negated planned weight.
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(-20.0, 1e-9));
  const Matching m = extract_matching(g, caps, built.handles.picef, sol);
  REQUIRE(m.cycles.size() == 1);
  CHECK(m.cycles[0].edges == std::vector<int>{0, 1});
}

TEST_CASE("risk-neutral sample model maximizes the scenario-average weight") {
  for (std::uint64_t seed = 11; seed <= 16; ++seed) {
    const ExchangeGraph g = fixtures::random_pool(seed, 6, 2, 0.4);
    const Caps caps{3, 3};
    const std::vector<Realization> rs = sample_realizations(g, 6, seed * 31);
    CvarParams params;
    params.gamma = 0.0;

    BuiltSaaModel built = build_cvar_saa(g, caps, enumerate_cycles(g, 3), rs, params);
    const Solution sol = solve(built.model);
    REQUIRE(sol.status == SolveStatus::Optimal);

    double best = 0.0;
    fixtures::for_each_matching(g, caps, [&](const Matching& m) {
      double avg = 0.0;
      for (const Realization& r : rs) avg += realized_weight(g, m, r);
      best = std::max(best, avg / rs.size());
    });
    CHECK_THAT(-sol.objective,
               Catch::Matchers::WithinAbs(best, 1e-6));
  }
}

TEST_CASE("mean-risk model matches brute force over matchings") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 2};
  const int N = 20;
  const std::vector<Realization> rs = sample_realizations(g, N, 99);
  CvarParams params;
  params.gamma = 10.0;
  params.alpha = 0.1;
  params.num_samples = N;

  BuiltSaaModel built = build_cvar_saa(g, caps, enumerate_cycles(g, 3), rs, params);
  const Solution sol = solve(built.model);
  REQUIRE(sol.status == SolveStatus::Optimal);

  double best = std::numeric_limits<double>::infinity();
  fixtures::for_each_matching(g, caps, [&](const Matching& m) {
    std::vector<double> losses;
    for (const Realization& r : rs) losses.push_back(-realized_weight(g, m, r));
    best = std::min(best, mean_risk_score(losses, params.gamma, params.alpha));
  });
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(best, 1e-6));
}

TEST_CASE("risk aversion flips a conflict toward the certain structure") {
  // A heavy risky 2-cycle and a certain light chain that fight over vertex 0.
  // Risk-neutral clearing takes the cycle (expected 9.8 vs 2); a thin-tail,
  // high-gamma objective takes the guaranteed chain instead, because the
  // cycle's worst case is zero.
  std::vector<Vertex> vs = {{0, VertexKind::Pair},
                            {1, VertexKind::Pair},
                            {2, VertexKind::Ndd}};
  std::vector<Edge> es = {{0, 0, 1, 10.0, 0.3},
                          {1, 1, 0, 10.0, 0.3},
                          {2, 2, 0, 2.0, 0.0}};
  const ExchangeGraph g(std::move(vs), std::move(es));
  const Caps caps{2, 1};
  const std::vector<Cycle> cycles = enumerate_cycles(g, 2);
  REQUIRE(cycles.size() == 1);

  const std::vector<Realization> rs = sample_realizations(g, 40, 5);
  int cycle_alive = 0;
  for (const Realization& r : rs) {
    if (r.exists[0] && r.exists[1]) ++cycle_alive;
  }
  REQUIRE(cycle_alive < 40);     // the sampled tail actually contains a failure
  REQUIRE(cycle_alive * 20 > 2 * 40);  // sample mean still favors the cycle

  CvarParams neutral;
  neutral.gamma = 0.0;
  BuiltSaaModel nb = build_cvar_saa(g, caps, cycles, rs, neutral);
  const Solution ns = solve(nb.model);
  REQUIRE(ns.status == SolveStatus::Optimal);
  const Matching nm = extract_matching(g, caps, nb.handles.picef, ns);
  CHECK(nm.cycles.size() == 1);
  CHECK(nm.chains.empty());

  CvarParams averse;
  averse.gamma = 100.0;
  averse.alpha = 1.0 / 40.0;
  BuiltSaaModel ab = build_cvar_saa(g, caps, cycles, rs, averse);
  const Solution as = solve(ab.model);
  REQUIRE(as.status == SolveStatus::Optimal);
  const Matching am = extract_matching(g, caps, ab.handles.picef, as);
  CHECK(am.cycles.empty());
  REQUIRE(am.chains.size() == 1);
  CHECK(am.chains[0].edges == std::vector<int>{2});
}
