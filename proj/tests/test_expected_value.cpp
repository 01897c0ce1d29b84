#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "stochkep/expected_value.hpp"

using namespace stochkep;

TEST_CASE("cycle discounting multiplies survival over all edges") {
  const ExchangeGraph g = fixtures::small_pool();
  const std::vector<Cycle> cycles = enumerate_cycles(g, 3);
  CHECK_THAT(cycle_discounted_weight(g, cycles[0]),
             Catch::Matchers::WithinAbs(20.0 * 0.4 * 0.4, 1e-12));
  CHECK_THAT(cycle_discounted_weight(g, cycles[1]),
             Catch::Matchers::WithinAbs(5.67, 1e-12));
}

TEST_CASE("chain discounting: frozen values on the small pool") {
  const ExchangeGraph g = fixtures::small_pool();
  const Chain safe{{4}};
  const Chain heavy{{4, 0}};
  const Chain light{{4, 2}};
  // Certain first step pays exactly its weight.
  CHECK(chain_discounted_weight_prefix(g, safe) == 1.0);
  CHECK(chain_discounted_weight_direct(g, safe) == 1.0);
  CHECK_THAT(chain_discounted_weight_prefix(g, heavy),
             Catch::Matchers::WithinAbs(5.0, 1e-12));
  CHECK_THAT(chain_discounted_weight_direct(g, heavy),
             Catch::Matchers::WithinAbs(5.0, 1e-12));
  CHECK_THAT(chain_discounted_weight_prefix(g, light),
             Catch::Matchers::WithinAbs(3.7, 1e-12));
}

TEST_CASE("both chain formulas agree on random chains") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const ExchangeGraph g = fixtures::random_pool(seed, 9, 3, 0.4);
    for (const Chain& c : enumerate_chains(g, 6)) {
      const double direct = chain_discounted_weight_direct(g, c);
      const double prefix = chain_discounted_weight_prefix(g, c);
      const double scale = std::max(1.0, std::fabs(direct));
      REQUIRE(std::fabs(direct - prefix) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("chain enumeration emits every prefix once") {
  const ExchangeGraph g = fixtures::small_pool();
  const std::vector<Chain> chains = enumerate_chains(g, 4);
  REQUIRE(chains.size() == 3);
  CHECK(chains[0].edges == std::vector<int>{4});
  CHECK(chains[1].edges == std::vector<int>{4, 0});
  CHECK(chains[2].edges == std::vector<int>{4, 2});
  CHECK(enumerate_chains(g, 1).size() == 1);
  CHECK(enumerate_chains(g, 0).empty());
}

TEST_CASE("matching value helpers") {
  const ExchangeGraph g = fixtures::small_pool();
  const std::vector<Cycle> cycles = enumerate_cycles(g, 3);
  Matching m;
  m.cycles.push_back(cycles[1]);
  m.chains.push_back({{4}});
  // Infeasible as a matching (shared vertex) but the value helpers are
  // structure-blind sums; feasibility is checked elsewhere.
  CHECK_THAT(matching_total_weight(g, m), Catch::Matchers::WithinAbs(8.0, 1e-12));
  CHECK_THAT(matching_expected_weight(g, m),
             Catch::Matchers::WithinAbs(6.67, 1e-12));
  CHECK(matching_expected_weight(g, Matching{}) == 0.0);
}

TEST_CASE("enumeration oracle picks the right structure per objective") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 4};

  const OracleResult det =
      solve_by_enumeration_detailed(g, caps, Objective::Deterministic);
  REQUIRE(det.matching.cycles.size() == 1);
  CHECK(det.matching.cycles[0].edges == std::vector<int>{0, 1});
  CHECK_THAT(det.value, Catch::Matchers::WithinAbs(20.0, 1e-12));

  const OracleResult exp =
      solve_by_enumeration_detailed(g, caps, Objective::Expected);
  REQUIRE(exp.matching.cycles.size() == 1);
  CHECK(exp.matching.cycles[0].edges == std::vector<int>{2, 3});
  CHECK(exp.matching.chains.empty());
  CHECK_THAT(exp.value, Catch::Matchers::WithinAbs(5.67, 1e-12));

  // Every feasible matching of this pool: empty, two cycles, three chains,
  // and no combinations (everything shares vertex 0).
  CHECK(exp.matchings_enumerated == 6);
}

TEST_CASE("oracle breaks ties toward the smallest sorted edge-id multiset") {
  // Two equal-weight 2-cycles sharing vertex 0; only one fits.
  std::vector<Vertex> vs = {{0, VertexKind::Pair},
                            {1, VertexKind::Pair},
                            {2, VertexKind::Pair}};
  std::vector<Edge> es = {{0, 0, 1, 1.0, 0.0},
                          {1, 1, 0, 1.0, 0.0},
                          {2, 0, 2, 1.0, 0.0},
                          {3, 2, 0, 1.0, 0.0}};
  const ExchangeGraph g(std::move(vs), std::move(es));
  const OracleResult r =
      solve_by_enumeration_detailed(g, Caps{2, 4}, Objective::Deterministic);
  REQUIRE(r.matching.cycles.size() == 1);
  CHECK(r.matching.cycles[0].edges == std::vector<int>{0, 1});
}

TEST_CASE("oracle enforces its enumeration budget") {
  const ExchangeGraph g = fixtures::small_pool();
  OracleLimits limits;
  limits.max_matchings = 3;
  CHECK_THROWS_AS(
      solve_by_enumeration(g, Caps{3, 4}, Objective::Expected, limits),
      EnumerationLimitError);
}

TEST_CASE("oracle tolerates pools with certain failures") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const ExchangeGraph g = fixtures::random_pool(seed);
    const OracleResult r =
        solve_by_enumeration_detailed(g, Caps{3, 4}, Objective::Expected);
    CHECK(r.value >= 0.0);
    CHECK(is_feasible_matching(g, r.matching, Caps{3, 4}));
    CHECK_THAT(matching_expected_weight(g, r.matching),
               Catch::Matchers::WithinAbs(r.value, 1e-9));
  }
}
