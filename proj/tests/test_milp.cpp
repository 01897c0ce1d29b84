#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "stochkep/highs_solver.hpp"
#include "stochkep/lp_format.hpp"
#include "stochkep/milp.hpp"

using namespace stochkep;

namespace {

MilpModel tiny_lp() {
  MilpModel m;
  const VarRef x = m.add_continuous(0.0, 1.0, "x");
  const VarRef y = m.add_continuous(0.0, 1.0, "y");
  m.add_constraint({"budget", {{x.index, 1.0}, {y.index, 1.0}}, RowSense::LessEqual, 1.5});
  m.add_objective_term(x, 1.0);
  m.add_objective_term(y, 1.0);
  m.set_objective_sense(ObjectiveSense::Maximize);
  return m;
}

}  // namespace

TEST_CASE("model validates variables, bounds, and rows") {
  MilpModel m;
  const VarRef x = m.add_binary("x");
  CHECK(m.var(x).lower == 0.0);
  CHECK(m.var(x).upper == 1.0);
  CHECK_THROWS_AS(m.set_bounds(x, 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(m.add_continuous(1.0, 0.0, "bad"), std::invalid_argument);
  CHECK_THROWS_AS(m.add_constraint({"r", {{5, 1.0}}, RowSense::LessEqual, 0.0}),
                  std::out_of_range);
  CHECK_THROWS_AS(
      m.add_constraint({"r", {{0, kInf}}, RowSense::LessEqual, 0.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(m.add_objective_term(VarRef{7}, 1.0), std::out_of_range);

  m.set_bounds(x, 1.0, 1.0);  // fixing a binary is fine
  CHECK(m.var(x).lower == 1.0);
}

TEST_CASE("model stats count kinds and nonzeros") {
  MilpModel m;
  const VarRef a = m.add_binary("a");
  const VarRef b = m.add_continuous(0.0, 3.0, "b");
  m.add_free("d");
  m.add_constraint({"r0", {{a.index, 1.0}, {b.index, -2.0}}, RowSense::Equal, 0.0});
  m.add_constraint({"r1", {{b.index, 1.0}}, RowSense::GreaterEqual, 1.0});
  const ModelStats s = model_stats(m);
  CHECK(s.num_vars == 3);
  CHECK(s.num_binary == 1);
  CHECK(s.num_continuous == 2);
  CHECK(s.num_rows == 2);
  CHECK(s.num_nonzeros == 3);
}

TEST_CASE("solver handles a small LP with duals") {
  const MilpModel m = tiny_lp();
  const Solution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(1.5, 1e-9));
  REQUIRE(sol.duals.has_value());
  REQUIRE(sol.duals->size() == 1);
  // Binding <= row in a maximization: nonnegative dual worth the objective rate.
  CHECK_THAT((*sol.duals)[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK(sol.solve_seconds >= 0.0);
}

TEST_CASE("solver handles a small MIP and snaps binaries") {
  MilpModel m;
  const VarRef x = m.add_binary("x");
  const VarRef y = m.add_binary("y");
  m.add_constraint({"budget", {{x.index, 1.0}, {y.index, 1.0}}, RowSense::LessEqual, 1.5});
  m.add_objective_term(x, 2.0);
  m.add_objective_term(y, 1.0);
  const Solution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK(sol.values[x.index] == 1.0);  // snapped to exact integers
  CHECK(sol.values[y.index] == 0.0);
  CHECK_FALSE(sol.duals.has_value());
}

TEST_CASE("solver reports infeasibility") {
  MilpModel m;
  const VarRef x = m.add_continuous(0.0, 1.0, "x");
  m.add_constraint({"impossible", {{x.index, 1.0}}, RowSense::GreaterEqual, 2.0});
  m.add_objective_term(x, 1.0);
  const Solution sol = solve(m);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("objective constants and minimization pass through") {
  MilpModel m;
  const VarRef x = m.add_continuous(0.0, 2.0, "x");
  m.add_constraint({"floor", {{x.index, 1.0}}, RowSense::GreaterEqual, 0.5});
  m.add_objective_term(x, 1.0);
  m.add_objective_constant(5.0);
  m.set_objective_sense(ObjectiveSense::Minimize);
  const Solution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(5.5, 1e-9));
}

TEST_CASE("LP text round-trips stats, bounds urgency, and optimum") {
  MilpModel m;
  const VarRef x = m.add_binary("x1");
  const VarRef y = m.add_binary("y1");
  const VarRef u = m.add_continuous(0.25, 0.75, "u");
  const VarRef d = m.add_free("d");
  const VarRef w = m.add_continuous(-2.0, kInf, "w");
  m.set_bounds(y, 1.0, 1.0);  // fixed binary must survive the round trip
  m.add_constraint({"mix", {{x.index, 0.1}, {u.index, -1.5}, {d.index, 1.0}},
                    RowSense::LessEqual, 2.5});
  m.add_constraint({"eq", {{y.index, 3.0}, {w.index, 1.0}}, RowSense::Equal, 3.0});
  m.add_constraint({"lo", {{d.index, 1.0}}, RowSense::GreaterEqual, -1.0});
  m.add_objective_term(x, 1.0);
  m.add_objective_term(u, 2.0);
  m.add_objective_term(d, -0.125);
  m.add_objective_constant(0.5);
  m.set_objective_sense(ObjectiveSense::Maximize);

  const std::string text = write_lp_string(m);
  const MilpModel back = parse_lp_string(text);

  const ModelStats a = model_stats(m);
  const ModelStats b = model_stats(back);
  CHECK(a.num_vars == b.num_vars);
  CHECK(a.num_binary == b.num_binary);
  CHECK(a.num_continuous == b.num_continuous);
  CHECK(a.num_rows == b.num_rows);
  CHECK(a.num_nonzeros == b.num_nonzeros);

  // Exact numeric fidelity of awkward coefficients.
  bool found = false;
  for (const LinConstraint& r : back.rows()) {
    if (r.name != "mix") continue;
    found = true;
    for (const LinTerm& t : r.terms) {
      if (back.vars()[t.var].name == "x1") CHECK(t.coef == 0.1);
      if (back.vars()[t.var].name == "u") CHECK(t.coef == -1.5);
    }
  }
  CHECK(found);

  const Solution s1 = solve(m);
  const Solution s2 = solve(back);
  REQUIRE(s1.status == SolveStatus::Optimal);
  REQUIRE(s2.status == SolveStatus::Optimal);
  CHECK_THAT(s1.objective, Catch::Matchers::WithinAbs(s2.objective, 1e-9));
}

TEST_CASE("LP writer refuses empty rows") {
  MilpModel m;
  m.add_continuous(0.0, 1.0, "x");
  m.add_constraint({"empty", {}, RowSense::LessEqual, 1.0});
  std::ostringstream os;
  CHECK_THROWS_AS(write_lp(m, os), std::invalid_argument);
}

TEST_CASE("LP parser handles hand-written text") {
  const std::string text =
      "\\ hand-written example\n"
      "Minimize\n"
      " cost: 2 a + 3 b - c\n"
      "Subject To\n"
      " r1: a + b >= 1\n"
      " r2: a - 2 c <= 4\n"
      "Bounds\n"
      " -1 <= c <= 5\n"
      " b >= 0\n"
      "Binary\n"
      " a\n"
      "End\n";
  const MilpModel m = parse_lp_string(text);
  const ModelStats s = model_stats(m);
  CHECK(s.num_vars == 3);
  CHECK(s.num_binary == 1);
  CHECK(s.num_rows == 2);
  const Solution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  // a = 1 (cost 2 beats forcing b = 1 at cost 3), b = 0, c at its cap.
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(-3.0, 1e-9));
}
