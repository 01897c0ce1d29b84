#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "stochkep/expected_value.hpp"
#include "stochkep/formulations.hpp"
#include "stochkep/highs_solver.hpp"

using namespace stochkep;

namespace {

// Canonical text form of a row: sorted "name*coef" terms plus sense and rhs,
// so row sets can be compared independent of emission order.
std::string row_signature(const MilpModel& m, const LinConstraint& r) {
  std::vector<std::string> parts;
  for (const LinTerm& t : r.terms) {
    std::ostringstream os;
    os.precision(15);
    os << m.vars()[t.var].name << '*' << t.coef;
    parts.push_back(os.str());
  }
  std::sort(parts.begin(), parts.end());
  std::ostringstream os;
  for (const std::string& p : parts) os << p << ' ';
  os << (r.sense == RowSense::LessEqual ? "<=" :
         r.sense == RowSense::GreaterEqual ? ">=" : "=");
  os.precision(15);
  os << ' ' << r.rhs;
  return os.str();
}

std::multiset<std::string> row_signatures(const MilpModel& m) {
  std::multiset<std::string> sigs;
  for (const LinConstraint& r : m.rows()) sigs.insert(row_signature(m, r));
  return sigs;
}

std::string sig(const std::vector<std::pair<std::string, double>>& terms,
                const char* sense, double rhs) {
  std::vector<std::string> parts;
  for (const auto& [name, coef] : terms) {
    std::ostringstream os;
    os.precision(15);
    os << name << '*' << coef;
    parts.push_back(os.str());
  }
  std::sort(parts.begin(), parts.end());
  std::ostringstream os;
  for (const std::string& p : parts) os << p << ' ';
  os << sense;
  os.precision(15);
  os << ' ' << rhs;
  return os.str();
}

}  // namespace

TEST_CASE("deterministic clearing picks the heavy cycle") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 4};
  BuiltModel built = build_kep(g, caps, enumerate_cycles(g, caps.cycle_cap));
  const Solution sol = solve(built.model);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(20.0, 1e-9));
  const Matching m = extract_matching(g, caps, built.handles, sol);
  REQUIRE(m.cycles.size() == 1);
  CHECK(m.cycles[0].edges == std::vector<int>{0, 1});
  CHECK(m.chains.empty());
}

TEST_CASE("expected-value clearing prefers the reliable cycle") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 4};
  BuiltModel built = build_kep_np(g, caps, enumerate_cycles(g, caps.cycle_cap));
  const Solution sol = solve(built.model);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(5.67, 1e-9));
  const Matching m = extract_matching(g, caps, built.handles, sol);
  REQUIRE(m.cycles.size() == 1);
  CHECK(m.cycles[0].edges == std::vector<int>{2, 3});
}

TEST_CASE("expected-value model has exactly the documented rows at cap 2") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 2};
  BuiltModel built = build_kep_np(g, caps, enumerate_cycles(g, caps.cycle_cap));
  const MilpModel& m = built.model;

  const ModelStats s = model_stats(m);
  CHECK(s.num_binary == 7);       // 5 chain-position vars + 2 cycle vars
  CHECK(s.num_continuous == 10);  // 5 survival vars + 5 survival caps
  CHECK(s.num_rows == 16);

  const std::multiset<std::string> got = row_signatures(m);
  std::multiset<std::string> want;
  // Per-vertex capacity.
  want.insert(sig({{"y_e1_k2", 1}, {"y_e3_k2", 1}, {"y_e4_k1", 1}, {"z_c0", 1}, {"z_c1", 1}},
                  "<=", 1));
  want.insert(sig({{"y_e0_k2", 1}, {"z_c0", 1}}, "<=", 1));
  want.insert(sig({{"y_e2_k2", 1}, {"z_c1", 1}}, "<=", 1));
  // Chain-position flow through vertex 0 and the NDD budget.
  want.insert(sig({{"y_e4_k1", 1}, {"y_e0_k2", -1}, {"y_e2_k2", -1}}, ">=", 0));
  want.insert(sig({{"y_e4_k1", 1}}, "<=", 1));
  // Survival flow with the upstream failure discounts.
  want.insert(sig({{"O_e4_k1", 1},
                   {"O_e0_k2", -1.0 / (1.0 - 0.6)},
                   {"O_e2_k2", -1.0 / (1.0 - 0.1)}},
                  ">=", 0));
  // Survival bounded by use and by the edge's own survival cap.
  for (const char* pair : {"e0_k2", "e1_k2", "e2_k2", "e3_k2", "e4_k1"}) {
    want.insert(sig({{std::string("O_") + pair, 1}, {std::string("y_") + pair, -1}},
                    "<=", 0));
    want.insert(sig({{std::string("O_") + pair, 1}, {std::string("o_") + pair, -1}},
                    "<=", 0));
  }
  CHECK(got == want);

  // Structurally dead position-2 slots are pinned instead of adding rows.
  auto upper_of = [&](const std::string& name) {
    for (const VarInfo& v : m.vars()) {
      if (v.name == name) return v.upper;
    }
    FAIL("missing variable " + name);
    return -1.0;
  };
  CHECK(upper_of("y_e1_k2") == 0.0);
  CHECK(upper_of("y_e3_k2") == 0.0);
  CHECK(upper_of("O_e1_k2") == 0.0);
  CHECK(upper_of("O_e3_k2") == 0.0);
  // Survival caps carry each edge's own survival probability.
  CHECK(upper_of("o_e0_k2") == 1.0 - 0.6);
  CHECK(upper_of("o_e2_k2") == 1.0 - 0.1);
  CHECK(upper_of("o_e4_k1") == 1.0);
}

TEST_CASE("uniform-probability clearing at zero matches deterministic") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 4};
  const std::vector<Cycle> cycles = enumerate_cycles(g, caps.cycle_cap);
  BuiltModel ip = build_kep_ip(g, caps, cycles, 0.0);
  const Solution sol = solve(ip.model);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(20.0, 1e-9));
  const Matching m = extract_matching(g, caps, ip.handles, sol);
  REQUIRE(m.cycles.size() == 1);
  CHECK(m.cycles[0].edges == std::vector<int>{0, 1});

  CHECK_THROWS_AS(build_kep_ip(g, caps, cycles, 1.0), std::invalid_argument);
}

TEST_CASE("chains are reconstructed in position order") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{2, 4};
  // No cycles offered: the best expected chain is 3 -> 0 -> 1.
  BuiltModel built = build_kep_np(g, caps, {});
  const Solution sol = solve(built.model);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(5.0, 1e-9));
  const Matching m = extract_matching(g, caps, built.handles, sol);
  REQUIRE(m.chains.size() == 1);
  CHECK(m.chains[0].edges == std::vector<int>{4, 0});
  CHECK(m.cycles.empty());
}

TEST_CASE("certain-failure edges are pruned from the expected-value model") {
  std::vector<Vertex> vs = {{0, VertexKind::Pair},
                            {1, VertexKind::Pair},
                            {2, VertexKind::Pair},
                            {3, VertexKind::Ndd}};
  std::vector<Edge> es = {{0, 0, 1, 5.0, 1.0},  // never survives
                          {1, 1, 0, 5.0, 0.2},
                          {2, 1, 2, 2.0, 0.2},
                          {3, 2, 1, 2.0, 0.2},
                          {4, 3, 0, 1.0, 0.5}};
  const ExchangeGraph g(std::move(vs), std::move(es));
  const Caps caps{3, 4};
  const std::vector<Cycle> cycles = enumerate_cycles(g, caps.cycle_cap);
  REQUIRE(cycles.size() == 2);  // {0,1} and {2,3}

  BuiltModel built = build_kep_np(g, caps, cycles);
  // The 0<->1 cycle contains the dead edge and is dropped; edge 0 has no vars.
  CHECK(built.handles.cycles.size() == 1);
  CHECK(built.handles.cycles[0].edges == std::vector<int>{2, 3});
  for (const auto& [key, v] : built.handles.y) CHECK(key.first != 0);

  const Solution sol = solve(built.model);
  REQUIRE(sol.status == SolveStatus::Optimal);
  const Matching m = extract_matching(g, caps, built.handles, sol);
  CHECK(is_feasible_matching(g, m, caps));
  // Deterministic build keeps everything.
  BuiltModel det = build_kep(g, caps, cycles);
  CHECK(det.handles.cycles.size() == 2);
}

TEST_CASE("solver agrees with the enumeration oracle on small pools") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ExchangeGraph g = fixtures::random_pool(seed, 6, 2, 0.45);
    for (int L : {2, 4}) {
      const Caps caps{3, L};
      const std::vector<Cycle> cycles = enumerate_cycles(g, caps.cycle_cap);

      const OracleResult det =
          solve_by_enumeration_detailed(g, caps, Objective::Deterministic);
      BuiltModel kep = build_kep(g, caps, cycles);
      const Solution skep = solve(kep.model);
      REQUIRE(skep.status == SolveStatus::Optimal);
      REQUIRE_THAT(skep.objective,
                   Catch::Matchers::WithinRel(det.value, 1e-6) ||
                       Catch::Matchers::WithinAbs(det.value, 1e-9));

      const OracleResult exp =
          solve_by_enumeration_detailed(g, caps, Objective::Expected);
      BuiltModel np = build_kep_np(g, caps, cycles);
      const Solution snp = solve(np.model);
      REQUIRE(snp.status == SolveStatus::Optimal);
      REQUIRE_THAT(snp.objective,
                   Catch::Matchers::WithinRel(exp.value, 1e-6) ||
                       Catch::Matchers::WithinAbs(exp.value, 1e-9));

      // The linearized objective must equal the expected weight of the
      // matching it selects.
      const Matching m = extract_matching(g, caps, np.handles, snp);
      REQUIRE_THAT(matching_expected_weight(g, m),
                   Catch::Matchers::WithinRel(snp.objective, 1e-6) ||
                       Catch::Matchers::WithinAbs(snp.objective, 1e-9));
      ++checked;
    }
  }
  CHECK(checked == 40);
}

TEST_CASE("extraction rejects fractional and inconsistent values") {
  const ExchangeGraph g = fixtures::small_pool();
  const Caps caps{3, 4};
  BuiltModel built = build_kep(g, caps, enumerate_cycles(g, caps.cycle_cap));
  std::vector<double> values(built.model.num_vars(), 0.0);

  SECTION("fractional entry") {
    values[built.handles.z[0].index] = 0.5;
    CHECK_THROWS_AS(extract_matching_from_values(g, caps, built.handles, values),
                    SolverError);
  }
  SECTION("stranded chain position") {
    // Position-2 use without the NDD edge at position 1.
    values[built.handles.y.at({0, 2}).index] = 1.0;
    CHECK_THROWS_AS(extract_matching_from_values(g, caps, built.handles, values),
                    SolverError);
  }
  SECTION("no solution at all") {
    Solution sol;
    sol.status = SolveStatus::Infeasible;
    CHECK_THROWS_AS(extract_matching(g, caps, built.handles, sol), SolverError);
  }
}

TEST_CASE("variable count stays within the compact envelope") {
  for (std::uint64_t seed = 40; seed < 44; ++seed) {
    const ExchangeGraph g = fixtures::random_pool(seed, 12, 3, 0.3);
    const Caps caps{3, 4};
    const std::vector<Cycle> cycles = enumerate_cycles(g, caps.cycle_cap);
    BuiltModel np = build_kep_np(g, caps, cycles);
    long long position_slots = 0;
    for (const Edge& e : g.edges()) {
      position_slots += static_cast<long long>(chain_positions(g, e, caps.chain_cap).size());
    }
    const ModelStats s = model_stats(np.model);
    CHECK(s.num_vars <= 3 * position_slots + static_cast<long long>(cycles.size()));
  }
}
