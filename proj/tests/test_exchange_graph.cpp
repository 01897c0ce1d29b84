#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "stochkep/exchange_graph.hpp"

using namespace stochkep;

TEST_CASE("graph construction and adjacency") {
  const ExchangeGraph g = fixtures::small_pool();
  REQUIRE(g.num_vertices() == 4);
  REQUIRE(g.num_edges() == 5);
  REQUIRE(g.num_pairs() == 3);
  REQUIRE(g.num_ndds() == 1);
  CHECK(g.is_ndd(3));
  CHECK(g.is_pair(0));
  CHECK(g.out_edges(0) == std::vector<int>{0, 2});
  CHECK(g.in_edges(0) == std::vector<int>{1, 3, 4});
  CHECK(g.out_edges(3) == std::vector<int>{4});
  CHECK(g.in_edges(3).empty());
}

TEST_CASE("construction rejects structural garbage") {
  std::vector<Vertex> vs = {{0, VertexKind::Pair}, {1, VertexKind::Pair}};
  SECTION("non-dense vertex ids") {
    std::vector<Vertex> bad = {{0, VertexKind::Pair}, {2, VertexKind::Pair}};
    CHECK_THROWS_AS(ExchangeGraph(bad, {}), std::invalid_argument);
  }
  SECTION("non-dense edge ids") {
    std::vector<Edge> bad = {{1, 0, 1, 1.0, 0.0}};
    CHECK_THROWS_AS(ExchangeGraph(vs, bad), std::invalid_argument);
  }
  SECTION("endpoint out of range") {
    std::vector<Edge> bad = {{0, 0, 5, 1.0, 0.0}};
    CHECK_THROWS_AS(ExchangeGraph(vs, bad), std::invalid_argument);
  }
}

TEST_CASE("validation flags semantic violations") {
  const ExchangeGraph clean = fixtures::small_pool();
  CHECK(validate_graph(clean).empty());

  std::vector<Vertex> vs = {{0, VertexKind::Pair},
                            {1, VertexKind::Pair},
                            {2, VertexKind::Ndd}};
  std::vector<Edge> es = {
      {0, 0, 0, 1.0, 0.0},    // self-loop
      {1, 0, 2, 1.0, 0.0},    // edge into an NDD
      {2, 0, 1, -1.0, 0.0},   // negative weight
      {3, 1, 0, 1.0, 1.5},    // probability out of range
      {4, 1, 0, 2.0, 0.5},    // duplicate arc
  };
  const ExchangeGraph g(std::move(vs), std::move(es));
  const std::vector<Violation> v = validate_graph(g);
  REQUIRE(v.size() == 5);
  std::set<int> flagged;
  for (const Violation& x : v) flagged.insert(x.edge_id);
  CHECK(flagged == std::set<int>{0, 1, 2, 3, 4});
}

TEST_CASE("cycle enumeration finds each cycle once, rooted at its minimum") {
  const ExchangeGraph g = fixtures::small_pool();
  const std::vector<Cycle> cycles = enumerate_cycles(g, 3);
  REQUIRE(cycles.size() == 2);
  CHECK(cycles[0].edges == std::vector<int>{0, 1});
  CHECK(cycles[0].weight == 20.0);
  CHECK(cycles[1].edges == std::vector<int>{2, 3});
  CHECK(cycles[1].weight == 7.0);

  // Cap 2 still finds both (both are 2-cycles); cap 1 finds none.
  CHECK(enumerate_cycles(g, 2).size() == 2);
  CHECK(enumerate_cycles(g, 1).empty());
}

TEST_CASE("cycle enumeration respects the cap and skips NDDs") {
  // 0 -> 1 -> 2 -> 0 triangle plus an NDD that points into it.
  std::vector<Vertex> vs = {{0, VertexKind::Pair},
                            {1, VertexKind::Pair},
                            {2, VertexKind::Pair},
                            {3, VertexKind::Ndd}};
  std::vector<Edge> es = {{0, 0, 1, 1.0, 0.0},
                          {1, 1, 2, 1.0, 0.0},
                          {2, 2, 0, 1.0, 0.0},
                          {3, 3, 0, 1.0, 0.0}};
  const ExchangeGraph g(std::move(vs), std::move(es));
  CHECK(enumerate_cycles(g, 2).empty());
  const std::vector<Cycle> tri = enumerate_cycles(g, 3);
  REQUIRE(tri.size() == 1);
  CHECK(tri[0].edges == std::vector<int>{0, 1, 2});
}

TEST_CASE("cycle enumeration properties on random pools") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const ExchangeGraph g = fixtures::random_pool(seed);
    for (int cap : {2, 3, 4}) {
      const std::vector<Cycle> cycles = enumerate_cycles(g, cap);
      std::set<std::vector<int>> seen;
      for (const Cycle& c : cycles) {
        REQUIRE(c.edges.size() >= 2);
        REQUIRE(static_cast<int>(c.edges.size()) <= cap);
        // Connectivity, pair-only vertices, distinctness.
        std::set<int> verts;
        for (std::size_t i = 0; i < c.edges.size(); ++i) {
          const Edge& cur = g.edge(c.edges[i]);
          const Edge& nxt = g.edge(c.edges[(i + 1) % c.edges.size()]);
          REQUIRE(cur.dst == nxt.src);
          REQUIRE(g.is_pair(cur.src));
          verts.insert(cur.src);
        }
        REQUIRE(verts.size() == c.edges.size());
        // Canonical start: smallest vertex first.
        REQUIRE(g.edge(c.edges.front()).src == *verts.begin());
        // No duplicates under rotation (canonical form makes equality enough).
        REQUIRE(seen.insert(c.edges).second);
      }
      // Monotone in the cap.
      if (cap > 2) {
        CHECK(cycles.size() >= enumerate_cycles(g, cap - 1).size());
      }
    }
  }
}

TEST_CASE("chain positions depend on the source kind") {
  const ExchangeGraph g = fixtures::small_pool();
  CHECK(chain_positions(g, g.edge(4), 4) == std::vector<int>{1});
  CHECK(chain_positions(g, g.edge(0), 4) == std::vector<int>{2, 3, 4});
  CHECK(chain_positions(g, g.edge(0), 1).empty());
  CHECK(chain_positions(g, g.edge(4), 0).empty());
}

TEST_CASE("matching feasibility checks") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 4};
  const std::vector<Cycle> cycles = enumerate_cycles(g, 3);

  SECTION("vertex-disjoint structures pass") {
    Matching m;
    m.cycles.push_back(cycles[1]);  // uses 0 and 2
    CHECK(is_feasible_matching(g, m, caps));
  }
  SECTION("overlapping structures fail") {
    Matching m;
    m.cycles = {cycles[0], cycles[1]};  // both use vertex 0
    CHECK_FALSE(is_feasible_matching(g, m, caps));
  }
  SECTION("chain must start at an NDD") {
    Matching m;
    m.chains.push_back({{0}});  // edge 0 leaves a pair
    CHECK_FALSE(is_feasible_matching(g, m, caps));
  }
  SECTION("chain continuity") {
    Matching m;
    m.chains.push_back({{4, 0}});  // 3 -> 0 -> 1
    CHECK(is_feasible_matching(g, m, caps));
    Matching broken;
    broken.chains.push_back({{4, 1}});  // edge 1 starts at 1, not 0
    CHECK_FALSE(is_feasible_matching(g, broken, caps));
  }
  SECTION("cycle and chain sharing a vertex fail") {
    Matching m;
    m.cycles.push_back(cycles[0]);
    m.chains.push_back({{4}});  // ends at vertex 0, already in the cycle
    CHECK_FALSE(is_feasible_matching(g, m, caps));
  }
  SECTION("caps are enforced") {
    Matching m;
    m.chains.push_back({{4, 0}});
    CHECK_FALSE(is_feasible_matching(g, m, Caps{3, 1}));
    Matching c;
    c.cycles.push_back(cycles[0]);
    CHECK_FALSE(is_feasible_matching(g, c, Caps{1, 4}));
  }
  SECTION("bad edge ids fail") {
    Matching m;
    m.cycles.push_back({{0, 99}, 0.0});
    CHECK_FALSE(is_feasible_matching(g, m, caps));
  }
  SECTION("empty matching is feasible") {
    CHECK(is_feasible_matching(g, Matching{}, caps));
  }
}
