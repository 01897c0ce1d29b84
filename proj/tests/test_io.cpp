// Instance/matching JSON files and the canonical instance hash.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixtures.hpp"
#include "stochkep/instance_gen.hpp"
#include "stochkep/io.hpp"

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

// Scoped temp file that cleans up after itself.
struct TempPath {
  std::string path;
  explicit TempPath(const std::string& name)
      : path("/tmp/stochkep_test_" + name) {}
  ~TempPath() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("instance JSON round-trips bit for bit") {
  const ExchangeGraph g = fixtures::random_pool(21, 12, 2, 0.3);
  const nlohmann::json j = instance_to_json(g);
  const ExchangeGraph back = instance_from_json(j);
  CHECK(same_graph(g, back));
}

TEST_CASE("instance files round-trip through disk") {
  const ExchangeGraph g = fixtures::small_pool();
  TempPath tmp("instance_roundtrip.json");
  save_instance(g, tmp.path);
  const ExchangeGraph back = load_instance(tmp.path);
  CHECK(same_graph(g, back));
}

TEST_CASE("unsupported or malformed instance documents are rejected") {
  nlohmann::json good = instance_to_json(fixtures::small_pool());

  nlohmann::json wrong_version = good;
  wrong_version["version"] = 2;
  CHECK_THROWS_AS(instance_from_json(wrong_version), std::invalid_argument);

  nlohmann::json no_version = good;
  no_version.erase("version");
  CHECK_THROWS_AS(instance_from_json(no_version), std::invalid_argument);

  CHECK_THROWS_AS(instance_from_json(nlohmann::json::array()),
                  std::invalid_argument);

  nlohmann::json bad_kind = good;
  bad_kind["vertices"][0]["kind"] = "donor";
  CHECK_THROWS_AS(instance_from_json(bad_kind), std::invalid_argument);
}

TEST_CASE("invalid instances fail with every violation reported") {
  nlohmann::json j = instance_to_json(fixtures::small_pool());
  j["edges"][0]["dst"] = 0;           // self-loop on vertex 0
  j["edges"][1]["fail_prob"] = 1.5;   // probability outside [0, 1]
  try {
    instance_from_json(j);
    FAIL("expected a validation failure");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("edge 0") != std::string::npos);
    CHECK(msg.find("edge 1") != std::string::npos);
  }
}

TEST_CASE("missing files raise runtime errors") {
  CHECK_THROWS_AS(load_instance("/tmp/stochkep_no_such_file.json"),
                  std::runtime_error);
  CHECK_THROWS_AS(load_matching("/tmp/stochkep_no_such_file.json"),
                  std::runtime_error);
}

TEST_CASE("the instance hash is stable, canonical, and content-sensitive") {
  const ExchangeGraph g = fixtures::small_pool();
  const std::string h = instance_hash(g);
  CHECK(h == "2369da3e256df94e");  // frozen: any change is a format break
  CHECK(h == instance_hash(fixtures::small_pool()));
  CHECK(h.size() == 16);
  for (char c : h) CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));

  // Any content change must move the hash.
  nlohmann::json j = instance_to_json(g);
  j["edges"][2]["weight"] = 3.5;
  CHECK(instance_hash(instance_from_json(j)) != h);
}

TEST_CASE("matching files round-trip through disk") {
  MatchingFile mf;
  mf.instance_hash = "2369da3e256df94e";
  mf.method = "kep-np";
  mf.caps = {3, 4};
  mf.objective_value = 5.67;
  Cycle c;
  c.edges = {2, 3};
  mf.matching.cycles.push_back(c);
  Chain ch;
  ch.edges = {4};
  mf.matching.chains.push_back(ch);
  mf.solve_seconds = 0.25;

  TempPath tmp("matching_roundtrip.json");
  save_matching(mf, tmp.path);
  const MatchingFile back = load_matching(tmp.path);
  CHECK(back.instance_hash == mf.instance_hash);
  CHECK(back.method == mf.method);
  CHECK(back.caps.cycle_cap == 3);
  CHECK(back.caps.chain_cap == 4);
  CHECK(back.objective_value == mf.objective_value);
  CHECK(back.solve_seconds == mf.solve_seconds);
  REQUIRE(back.matching.cycles.size() == 1);
  CHECK(back.matching.cycles[0].edges == std::vector<int>{2, 3});
  REQUIRE(back.matching.chains.size() == 1);
  CHECK(back.matching.chains[0].edges == std::vector<int>{4});
}

TEST_CASE("a matching file is checked against its instance") {
  const ExchangeGraph g = fixtures::small_pool();

  MatchingFile good;
  good.instance_hash = instance_hash(g);
  good.method = "kep-np";
  good.caps = {3, 2};
  Cycle c;
  c.edges = {2, 3};
  good.matching.cycles.push_back(c);
  CHECK_NOTHROW(check_matching_against(g, good));

  MatchingFile wrong_pool = good;
  wrong_pool.instance_hash = "0000000000000000";
  CHECK_THROWS_AS(check_matching_against(g, wrong_pool), std::invalid_argument);

  // Cycle {2,3} and chain {4} both claim vertex 0.
  MatchingFile overlap = good;
  Chain ch;
  ch.edges = {4};
  overlap.matching.chains.push_back(ch);
  CHECK_THROWS_AS(check_matching_against(g, overlap), std::invalid_argument);
}
