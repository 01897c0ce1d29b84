// Branch-and-price: LP relaxation duals, cycle pricing, the pricing search,
// and end-to-end agreement with the monolithic expected-value model.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "fixtures.hpp"
#include "stochkep/branch_price.hpp"
#include "stochkep/expected_value.hpp"
#include "stochkep/formulations.hpp"
#include "stochkep/highs_solver.hpp"

using namespace stochkep;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Triangle of pairs whose only cycle has three edges, so the initial
// two-cycle pool is empty and everything must arrive through pricing.
ExchangeGraph triangle_pool() {
  std::vector<Vertex> vs = {{0, VertexKind::Pair},
                            {1, VertexKind::Pair},
                            {2, VertexKind::Pair}};
  std::vector<Edge> es = {{0, 0, 1, 5.0, 0.2},
                          {1, 1, 2, 5.0, 0.2},
                          {2, 2, 0, 5.0, 0.2}};
  return ExchangeGraph(std::move(vs), std::move(es));
}

}  // namespace

TEST_CASE("LP relaxation exposes capacity duals and bounds the integer optimum") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 2};
  const std::vector<Cycle> pool = enumerate_cycles(g, caps.cycle_cap);

  const Relaxation rel = solve_lp_relaxation(g, caps, pool, {});
  REQUIRE(rel.solution.status == SolveStatus::Optimal);
  REQUIRE(rel.solution.duals.has_value());

  // Relaxing integrality can only increase the achievable value.
  const BuiltModel integer = build_kep_np(g, caps, enumerate_cycles(g, caps.cycle_cap));
  const Solution isol = solve(integer.model);
  REQUIRE(isol.status == SolveStatus::Optimal);
  CHECK(rel.solution.objective >= isol.objective - 1e-9);

  const std::vector<double> lambda =
      capacity_duals(g, rel.handles, rel.solution);
  REQUIRE(lambda.size() == static_cast<std::size_t>(g.num_vertices()));
  // Maximization duals on binding <= rows are nonnegative; vertices without a
  // capacity row (the altruist) sit at zero.
  for (int i = 0; i < g.num_vertices(); ++i) {
    CHECK(lambda[i] >= -1e-9);
    if (rel.handles.capacity_row[i] < 0) CHECK(lambda[i] == 0.0);
  }
  CHECK(rel.handles.capacity_row[3] < 0);  // the altruist has no capacity row
}

TEST_CASE("cycle price is the discounted weight minus covered duals") {
  const ExchangeGraph g = fixtures::small_pool();
  const std::vector<Cycle> cycles = enumerate_cycles(g, 3);
  REQUIRE(cycles.size() == 2);

  const std::vector<double> zero(g.num_vertices(), 0.0);
  CHECK_THAT(cycle_price(g, cycles[0], zero),
             WithinAbs(20.0 * (0.4 * 0.4), 1e-15));
  CHECK_THAT(cycle_price(g, cycles[1], zero),
             WithinAbs(7.0 * (0.9 * 0.9), 1e-15));

  // Cycle {2,3} covers vertices 0 and 2, so only their duals are charged.
  std::vector<double> duals = {1.0, 100.0, 2.5, 0.0};
  CHECK_THAT(cycle_price(g, cycles[1], duals),
             WithinAbs(7.0 * (0.9 * 0.9) - 1.0 - 2.5, 1e-12));
}

TEST_CASE("pricing returns positive cycles best first and honors limit/exclude") {
  const ExchangeGraph g = fixtures::small_pool();
  const std::vector<double> zero(g.num_vertices(), 0.0);

  std::vector<PricedCycle> all = find_positive_price_cycles(g, zero, 3, 1e-6, 10);
  REQUIRE(all.size() == 2);
  CHECK(all[0].cycle.edges == std::vector<int>{2, 3});
  CHECK(all[1].cycle.edges == std::vector<int>{0, 1});
  CHECK(all[0].price > all[1].price);
  CHECK_THAT(all[0].price, WithinAbs(7.0 * (0.9 * 0.9), 1e-15));

  std::vector<PricedCycle> top = find_positive_price_cycles(g, zero, 3, 1e-6, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0].cycle.edges == std::vector<int>{2, 3});

  std::set<std::vector<int>> pool_keys = {{2, 3}};
  std::vector<PricedCycle> rest =
      find_positive_price_cycles(g, zero, 3, 1e-6, 10, pool_keys);
  REQUIRE(rest.size() == 1);
  CHECK(rest[0].cycle.edges == std::vector<int>{0, 1});

  // Duals high enough to absorb every discounted weight price nothing out.
  const std::vector<double> heavy(g.num_vertices(), 10.0);
  CHECK(find_positive_price_cycles(g, heavy, 3, 1e-6, 10).empty());
}

TEST_CASE("pricing respects the cycle cap") {
  const ExchangeGraph g = triangle_pool();
  const std::vector<double> zero(g.num_vertices(), 0.0);

  CHECK(find_positive_price_cycles(g, zero, 2, 1e-6, 10).empty());

  std::vector<PricedCycle> found = find_positive_price_cycles(g, zero, 3, 1e-6, 10);
  REQUIRE(found.size() == 1);
  CHECK(found[0].cycle.edges == std::vector<int>{0, 1, 2});
  CHECK_THAT(found[0].price, WithinAbs(15.0 * (0.8 * 0.8 * 0.8), 1e-12));
}

TEST_CASE("fixings must refer to variables the relaxation actually has") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 2};
  const std::vector<Cycle> pool = enumerate_cycles(g, caps.cycle_cap);

  FixedAssignments bad_y;
  bad_y.y[{99, 1}] = 1;
  CHECK_THROWS_AS(solve_lp_relaxation(g, caps, pool, bad_y), std::logic_error);

  FixedAssignments bad_z;
  bad_z.z[{42}] = 0;
  CHECK_THROWS_AS(solve_lp_relaxation(g, caps, pool, bad_z), std::logic_error);
}

TEST_CASE("fixings steer the relaxation") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 2};
  const std::vector<Cycle> pool = enumerate_cycles(g, caps.cycle_cap);

  const Relaxation free_rel = solve_lp_relaxation(g, caps, pool, {});
  REQUIRE(free_rel.solution.status == SolveStatus::Optimal);

  // Shutting down the altruist's first hop removes every chain, and the
  // cycle-only LP is integral here: take the better cycle.
  FixedAssignments no_chain;
  no_chain.y[{4, 1}] = 0;
  const Relaxation cyc = solve_lp_relaxation(g, caps, pool, no_chain);
  REQUIRE(cyc.solution.status == SolveStatus::Optimal);
  CHECK_THAT(cyc.solution.objective, WithinAbs(7.0 * (0.9 * 0.9), 1e-9));

  // Forbidding the better cycle can only lower the bound.
  FixedAssignments no_best;
  no_best.z[{2, 3}] = 0;
  const Relaxation worse = solve_lp_relaxation(g, caps, pool, no_best);
  REQUIRE(worse.solution.status == SolveStatus::Optimal);
  CHECK(worse.solution.objective <= free_rel.solution.objective + 1e-9);
  // The altruist chain through edges 4 then 0 is still worth 5.0.
  CHECK(worse.solution.objective >= 5.0 - 1e-9);
}

TEST_CASE("branch and price solves the worked example") {
  const ExchangeGraph g = fixtures::small_pool();
  BranchPriceResult res = branch_and_price(g, Caps{3, 4});
  CHECK(res.proven_optimal);
  CHECK_THAT(res.objective, WithinAbs(7.0 * (0.9 * 0.9), 1e-9));
  REQUIRE(res.matching.cycles.size() == 1);
  CHECK(res.matching.cycles[0].edges == std::vector<int>{2, 3});
  CHECK(res.matching.chains.empty());
  CHECK_THAT(matching_expected_weight(g, res.matching),
             WithinAbs(res.objective, 1e-12));
  CHECK(res.nodes_explored >= 1);
}

TEST_CASE("branch and price prices in cycles the initial pool lacks") {
  const ExchangeGraph g = triangle_pool();
  BranchPriceResult res = branch_and_price(g, Caps{3, 0});
  CHECK(res.proven_optimal);
  CHECK_THAT(res.objective, WithinAbs(15.0 * (0.8 * 0.8 * 0.8), 1e-9));
  REQUIRE(res.matching.cycles.size() == 1);
  CHECK(res.matching.cycles[0].edges == std::vector<int>{0, 1, 2});
  CHECK(res.columns_generated >= 1);
}

TEST_CASE("a node budget of zero returns the safe empty incumbent") {
  const ExchangeGraph g = fixtures::small_pool();
  BranchPriceConfig cfg;
  cfg.max_nodes = 0;
  BranchPriceResult res = branch_and_price(g, Caps{3, 4}, cfg);
  CHECK_FALSE(res.proven_optimal);
  CHECK(res.objective == 0.0);
  CHECK(res.matching.cycles.empty());
  CHECK(res.matching.chains.empty());
}

TEST_CASE("branch and price matches the monolithic model on random pools") {
  for (const unsigned seed : {1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u}) {
    DYNAMIC_SECTION("seed " << seed) {
      const ExchangeGraph g = fixtures::random_pool(seed, 8, 2, 0.35);
      const Caps caps{3, 3};

      const BuiltModel direct = build_kep_np(g, caps, enumerate_cycles(g, caps.cycle_cap));
      const Solution dsol = solve(direct.model);
      REQUIRE(dsol.status == SolveStatus::Optimal);

      BranchPriceResult res = branch_and_price(g, caps);
      REQUIRE(res.proven_optimal);
      CHECK_THAT(res.objective,
                 WithinRel(dsol.objective, 1e-6) || WithinAbs(dsol.objective, 1e-9));

      CHECK(is_feasible_matching(g, res.matching, caps));
      CHECK_THAT(matching_expected_weight(g, res.matching),
                 WithinAbs(res.objective, 1e-9));
    }
  }
}

TEST_CASE("branch and price handles four-cycles against enumeration") {
  for (const unsigned seed : {11u, 12u, 13u}) {
    DYNAMIC_SECTION("seed " << seed) {
      const ExchangeGraph g = fixtures::random_pool(seed, 7, 1, 0.4);
      const Caps caps{4, 2};

      const OracleResult oracle =
          solve_by_enumeration_detailed(g, caps, Objective::Expected);
      BranchPriceResult res = branch_and_price(g, caps);
      REQUIRE(res.proven_optimal);
      CHECK_THAT(res.objective,
                 WithinRel(oracle.value, 1e-6) || WithinAbs(oracle.value, 1e-9));
    }
  }
}
