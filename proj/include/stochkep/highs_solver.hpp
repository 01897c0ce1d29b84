#pragma once

// Thin adapter turning a MilpModel into a HiGHS solve. All formulation logic
// lives in the builders; this file only translates data structures, maps
// termination statuses, snaps binaries to exact 0/1, and surfaces row duals
// for pure LPs (column generation prices against them).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include <Highs.h>

#include "stochkep/milp.hpp"

namespace stochkep {

namespace detail {

// Environment override for solver threads (the CLI documents it); unset or
// unparsable means "use the config value".
inline int env_thread_override() {
  const char* s = std::getenv("STOCHKEP_THREADS");
  if (s == nullptr) return 0;
  const int v = std::atoi(s);
  return v > 0 ? v : 0;
}

}  // namespace detail

inline Solution solve(const MilpModel& m, const SolverConfig& config = {}) {
  if (m.num_vars() == 0) {
    // Degenerate but legitimate (e.g. a clearing model over a pool with no
    // structures yet). The backend reports such models as "empty" rather than
    // solved, so answer directly: the objective is just its constant term.
    Solution sol;
    sol.status = SolveStatus::Optimal;
    sol.objective = m.objective_constant();
    sol.duals = std::vector<double>(static_cast<std::size_t>(m.num_rows()), 0.0);
    return sol;
  }
  HighsModel hm;
  HighsLp& lp = hm.lp_;
  lp.num_col_ = m.num_vars();
  lp.num_row_ = m.num_rows();
  lp.sense_ = m.objective_sense() == ObjectiveSense::Maximize
                  ? ObjSense::kMaximize
                  : ObjSense::kMinimize;
  lp.offset_ = m.objective_constant();
  lp.col_cost_ = m.objective();

  lp.col_lower_.reserve(m.num_vars());
  lp.col_upper_.reserve(m.num_vars());
  bool any_integer = false;
  lp.integrality_.reserve(m.num_vars());
  for (const VarInfo& v : m.vars()) {
    lp.col_lower_.push_back(v.lower);
    lp.col_upper_.push_back(v.upper);
    if (v.kind == VarKind::Binary) {
      lp.integrality_.push_back(HighsVarType::kInteger);
      any_integer = true;
    } else {
      lp.integrality_.push_back(HighsVarType::kContinuous);
    }
  }
  if (!any_integer) lp.integrality_.clear();

  lp.row_lower_.reserve(m.num_rows());
  lp.row_upper_.reserve(m.num_rows());
  for (const LinConstraint& r : m.rows()) {
    switch (r.sense) {
      case RowSense::LessEqual:
        lp.row_lower_.push_back(-kHighsInf);
        lp.row_upper_.push_back(r.rhs);
        break;
      case RowSense::GreaterEqual:
        lp.row_lower_.push_back(r.rhs);
        lp.row_upper_.push_back(kHighsInf);
        break;
      case RowSense::Equal:
        lp.row_lower_.push_back(r.rhs);
        lp.row_upper_.push_back(r.rhs);
        break;
    }
  }

  lp.a_matrix_.format_ = MatrixFormat::kRowwise;
  lp.a_matrix_.start_.clear();
  lp.a_matrix_.start_.push_back(0);
  for (const LinConstraint& r : m.rows()) {
    for (const LinTerm& t : r.terms) {
      lp.a_matrix_.index_.push_back(t.var);
      lp.a_matrix_.value_.push_back(t.coef);
    }
    lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
  }

  Highs highs;
  highs.setOptionValue("output_flag", config.verbose);
  const int env_threads = detail::env_thread_override();
  highs.setOptionValue("threads", env_threads > 0 ? env_threads : config.threads);
  highs.setOptionValue("random_seed", 0);
  highs.setOptionValue("mip_rel_gap", config.mip_rel_gap);
  highs.setOptionValue("mip_heuristic_effort", config.mip_heuristic_effort);
  highs.setOptionValue("mip_feasibility_tolerance",
                       std::max(config.integrality_tolerance, 1e-9));
  if (config.time_limit_seconds < kNoTimeLimit) {
    highs.setOptionValue("time_limit", config.time_limit_seconds);
  }
  if (highs.passModel(hm) != HighsStatus::kOk) {
    throw SolverError("backend rejected the model");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const HighsStatus run_status = highs.run();
  const auto t1 = std::chrono::steady_clock::now();
  if (run_status == HighsStatus::kError) {
    throw SolverError("backend reported an internal error");
  }

  Solution out;
  out.solve_seconds = std::chrono::duration<double>(t1 - t0).count();

  const HighsModelStatus status = highs.getModelStatus();
  bool have_primal = false;
  switch (status) {
    case HighsModelStatus::kOptimal:
      out.status = SolveStatus::Optimal;
      have_primal = true;
      break;
    case HighsModelStatus::kInfeasible:
      out.status = SolveStatus::Infeasible;
      return out;
    case HighsModelStatus::kTimeLimit:
    case HighsModelStatus::kIterationLimit:
    case HighsModelStatus::kSolutionLimit:
    case HighsModelStatus::kMemoryLimit:
    case HighsModelStatus::kInterrupt:
      out.status = SolveStatus::LimitReached;
      have_primal = highs.getSolution().value_valid;
      break;
    default:
      throw SolverError("unexpected backend status: " +
                        highs.modelStatusToString(status));
  }

  if (have_primal) {
    const HighsSolution& sol = highs.getSolution();
    out.values.assign(sol.col_value.begin(), sol.col_value.end());
    out.objective = highs.getInfo().objective_function_value;

    // Snap binaries to exact 0/1; anything further off than the integrality
    // tolerance means the backend handed us junk.
    for (int i = 0; i < m.num_vars(); ++i) {
      if (m.vars()[i].kind != VarKind::Binary) continue;
      const double v = out.values[i];
      const double r = std::nearbyint(v);
      if (std::fabs(v - r) > config.integrality_tolerance || r < -0.5 || r > 1.5) {
        throw SolverError("binary variable " + m.vars()[i].name +
                          " is fractional in the returned solution: " +
                          std::to_string(v));
      }
      out.values[i] = r;
    }

    if (!any_integer && sol.dual_valid) {
      out.duals.emplace(sol.row_dual.begin(), sol.row_dual.end());
    }
  }
  return out;
}

}  // namespace stochkep
