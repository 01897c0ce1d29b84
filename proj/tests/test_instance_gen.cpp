// Pool generation: determinism, structural invariants, both generation modes,
// the documented draw order, and config validation.

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <vector>

#include "stochkep/exchange_graph.hpp"
#include "stochkep/instance_gen.hpp"
#include "stochkep/rng.hpp"

using namespace stochkep;

namespace {

bool same_graph(const ExchangeGraph& a, const ExchangeGraph& b) {
  if (a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges()) {
    return false;
  }
  for (int i = 0; i < a.num_vertices(); ++i) {
    if (a.vertex(i).kind != b.vertex(i).kind) return false;
  }
  for (int e = 0; e < a.num_edges(); ++e) {
    const Edge& x = a.edge(e);
    const Edge& y = b.edge(e);
    if (x.src != y.src || x.dst != y.dst || x.weight != y.weight ||
        x.fail_prob != y.fail_prob) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("generation is a pure function of the config") {
  GenConfig cfg;
  cfg.num_pairs = 20;
  cfg.num_ndds = 3;
  cfg.density = 0.3;
  cfg.weight_kind = WeightKind::Uniform;
  cfg.weight_lo = 1.0;
  cfg.weight_hi = 10.0;
  cfg.seed = 42;

  const ExchangeGraph a = generate_instance(cfg);
  const ExchangeGraph b = generate_instance(cfg);
  CHECK(same_graph(a, b));

  cfg.seed = 43;
  const ExchangeGraph c = generate_instance(cfg);
  CHECK_FALSE(same_graph(a, c));
}

TEST_CASE("generated pools are structurally valid") {
  for (const auto mode : {GenMode::Density, GenMode::BloodType}) {
    GenConfig cfg;
    cfg.num_pairs = 25;
    cfg.num_ndds = 4;
    cfg.mode = mode;
    cfg.density = 0.25;
    cfg.seed = 7;
    const ExchangeGraph g = generate_instance(cfg);

    CHECK(g.num_vertices() == 29);
    for (int i = 0; i < 25; ++i) CHECK(g.vertex(i).kind == VertexKind::Pair);
    for (int i = 25; i < 29; ++i) CHECK(g.vertex(i).kind == VertexKind::Ndd);

    const std::vector<Violation> errs = validate_graph(g);
    CHECK(errs.empty());
    for (const Edge& e : g.edges()) {
      CHECK(e.src != e.dst);
      CHECK(g.is_pair(e.dst));
      CHECK(e.weight == 1.0);  // unit weights by default
      CHECK(e.fail_prob >= 0.1);
      CHECK(e.fail_prob <= 0.9);
    }
  }
}

TEST_CASE("density extremes give empty and complete slot sets") {
  GenConfig cfg;
  cfg.num_pairs = 6;
  cfg.num_ndds = 2;
  cfg.seed = 3;

  cfg.density = 0.0;
  CHECK(generate_instance(cfg).num_edges() == 0);

  cfg.density = 1.0;
  // Every (src, dst) slot into a pair except the diagonal: 8*6 - 6.
  const ExchangeGraph full = generate_instance(cfg);
  CHECK(full.num_edges() == 42);
  std::set<std::pair<int, int>> arcs;
  for (const Edge& e : full.edges()) arcs.insert({e.src, e.dst});
  CHECK(arcs.size() == 42);  // no duplicates
}

TEST_CASE("density mode hits the requested arc rate") {
  GenConfig cfg;
  cfg.num_pairs = 40;
  cfg.num_ndds = 0;
  cfg.density = 0.3;
  cfg.seed = 11;
  const ExchangeGraph g = generate_instance(cfg);
  // 1560 slots at rate 0.3: mean 468, sd ~18; allow five sigma.
  CHECK(g.num_edges() > 468 - 91);
  CHECK(g.num_edges() < 468 + 91);
}

TEST_CASE("weights and probabilities respect their configured ranges") {
  GenConfig cfg;
  cfg.num_pairs = 30;
  cfg.num_ndds = 0;
  cfg.density = 0.4;
  cfg.weight_kind = WeightKind::Uniform;
  cfg.weight_lo = 2.0;
  cfg.weight_hi = 5.0;
  cfg.prob_lo = 0.25;
  cfg.prob_hi = 0.25;
  cfg.seed = 5;
  const ExchangeGraph g = generate_instance(cfg);
  REQUIRE(g.num_edges() > 0);

  bool saw_distinct_weights = false;
  for (const Edge& e : g.edges()) {
    CHECK(e.weight >= 2.0);
    CHECK(e.weight <= 5.0);
    CHECK(e.fail_prob == 0.25);  // degenerate range pins the draw exactly
    if (e.weight != g.edge(0).weight) saw_distinct_weights = true;
  }
  CHECK(saw_distinct_weights);
}

TEST_CASE("blood-type mode reproduces the documented draw order") {
  GenConfig cfg;
  cfg.num_pairs = 15;
  cfg.num_ndds = 3;
  cfg.mode = GenMode::BloodType;
  cfg.weight_kind = WeightKind::Uniform;
  cfg.weight_lo = 1.0;
  cfg.weight_hi = 4.0;
  cfg.prob_lo = 0.2;
  cfg.prob_hi = 0.6;
  cfg.seed = 99;
  const ExchangeGraph g = generate_instance(cfg);

  // Re-derive every draw in the contract order: per pair (patient type, donor
  // type, sensitization, own crossmatch) until the pair is incompatible; then
  // NDD donor types; then arcs in (src, dst) order with weight and failure
  // probability drawn at acceptance.
  std::mt19937_64 rng(cfg.seed);
  const int P = cfg.num_pairs;
  const int V = cfg.num_pairs + cfg.num_ndds;
  std::vector<detail::BloodType> donor(V);
  std::vector<detail::BloodType> patient(P);
  std::vector<double> sens(P);
  for (int i = 0; i < P; ++i) {
    for (;;) {
      const auto pt = detail::draw_blood_type(rng);
      const auto dt = detail::draw_blood_type(rng);
      const double pra = detail::draw_sensitization(rng);
      const bool own_ok = uniform01(rng) >= pra;
      if (detail::blood_compatible(dt, pt) && own_ok) continue;
      patient[i] = pt;
      donor[i] = dt;
      sens[i] = pra;
      break;
    }
  }
  for (int i = P; i < V; ++i) donor[i] = detail::draw_blood_type(rng);

  std::vector<Edge> expect;
  for (int src = 0; src < V; ++src) {
    for (int dst = 0; dst < P; ++dst) {
      if (src == dst) continue;
      const bool arc = detail::blood_compatible(donor[src], patient[dst]) &&
                       uniform01(rng) >= sens[dst];
      if (!arc) continue;
      Edge e;
      e.id = static_cast<int>(expect.size());
      e.src = src;
      e.dst = dst;
      e.weight = uniform_in(rng, cfg.weight_lo, cfg.weight_hi);
      e.fail_prob = uniform_in(rng, cfg.prob_lo, cfg.prob_hi);
      expect.push_back(e);
    }
  }

  REQUIRE(g.num_edges() == static_cast<int>(expect.size()));
  REQUIRE(g.num_edges() > 0);
  for (int i = 0; i < g.num_edges(); ++i) {
    const Edge& a = g.edge(i);
    const Edge& b = expect[i];
    CHECK(a.src == b.src);
    CHECK(a.dst == b.dst);
    CHECK(a.weight == b.weight);
    CHECK(a.fail_prob == b.fail_prob);
  }
}

TEST_CASE("config validation rejects bad inputs") {
  GenConfig ok;
  CHECK_NOTHROW(validate_gen_config(ok));

  GenConfig c = ok;
  c.num_pairs = 0;
  CHECK_THROWS_AS(validate_gen_config(c), std::invalid_argument);

  c = ok;
  c.num_ndds = -1;
  CHECK_THROWS_AS(validate_gen_config(c), std::invalid_argument);

  c = ok;
  c.density = 1.5;
  CHECK_THROWS_AS(validate_gen_config(c), std::invalid_argument);
  c.density = -0.1;
  CHECK_THROWS_AS(validate_gen_config(c), std::invalid_argument);

  c = ok;
  c.prob_lo = 0.8;
  c.prob_hi = 0.2;
  CHECK_THROWS_AS(validate_gen_config(c), std::invalid_argument);
  c.prob_lo = 0.5;
  c.prob_hi = 1.5;
  CHECK_THROWS_AS(validate_gen_config(c), std::invalid_argument);
  c.prob_lo = -0.1;
  c.prob_hi = 0.5;
  CHECK_THROWS_AS(validate_gen_config(c), std::invalid_argument);

  c = ok;
  c.weight_kind = WeightKind::Uniform;
  c.weight_lo = 5.0;
  c.weight_hi = 2.0;
  CHECK_THROWS_AS(validate_gen_config(c), std::invalid_argument);
  c.weight_lo = -1.0;
  c.weight_hi = 2.0;
  CHECK_THROWS_AS(validate_gen_config(c), std::invalid_argument);
}

TEST_CASE("sized configs use the conventional pair/altruist splits") {
  GenConfig c64 = sized_config(64);
  CHECK(c64.num_pairs == 59);
  CHECK(c64.num_ndds == 5);

  GenConfig c128 = sized_config(128);
  CHECK(c128.num_pairs == 118);
  CHECK(c128.num_ndds == 10);

  GenConfig c26 = sized_config(26);
  CHECK(c26.num_pairs + c26.num_ndds == 26);
  CHECK(c26.num_ndds == 3);

  GenConfig c2 = sized_config(2);
  CHECK(c2.num_pairs == 1);
  CHECK(c2.num_ndds == 1);

  CHECK_THROWS_AS(sized_config(1), std::invalid_argument);
}
