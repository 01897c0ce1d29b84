#pragma once

// Solver-independent MILP model: variables, linear rows, objective, and the
// solved-solution record handed back by a backend. Builders in this library
// construct these models; a thin adapter (highs_solver.hpp) turns them into
// backend calls. Keeping the model plain data makes formulations testable
// without invoking a solver and lets tests dump/parse the standard LP text
// format.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stochkep {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNoTimeLimit = 1e30;

enum class VarKind { Binary, Continuous };

struct VarRef {
  int index = -1;
  explicit operator bool() const { return index >= 0; }
};

struct VarInfo {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = kInf;
};

enum class RowSense { LessEqual, GreaterEqual, Equal };

struct LinTerm {
  int var = -1;
  double coef = 0.0;
};

struct LinConstraint {
  std::string name;
  std::vector<LinTerm> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

enum class ObjectiveSense { Minimize, Maximize };

class MilpModel {
 public:
  VarRef add_binary(std::string name) {
    vars_.push_back({std::move(name), VarKind::Binary, 0.0, 1.0});
    return {static_cast<int>(vars_.size()) - 1};
  }

  VarRef add_continuous(double lower, double upper, std::string name) {
    if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
      throw std::invalid_argument("bad bounds for variable " + name);
    }
    vars_.push_back({std::move(name), VarKind::Continuous, lower, upper});
    return {static_cast<int>(vars_.size()) - 1};
  }

  VarRef add_free(std::string name) {
    return add_continuous(-kInf, kInf, std::move(name));
  }

  void set_bounds(VarRef v, double lower, double upper) {
    VarInfo& info = vars_.at(v.index);
    if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
      throw std::invalid_argument("bad bounds for variable " + info.name);
    }
    if (info.kind == VarKind::Binary && (lower < 0.0 || upper > 1.0)) {
      throw std::invalid_argument("binary bounds must stay within [0, 1]: " +
                                  info.name);
    }
    info.lower = lower;
    info.upper = upper;
  }

  void set_kind(VarRef v, VarKind kind) {
    VarInfo& info = vars_.at(v.index);
    info.kind = kind;
    if (kind == VarKind::Binary) {
      if (info.lower < 0.0) info.lower = 0.0;
      if (info.upper > 1.0) info.upper = 1.0;
    }
  }

  int add_constraint(LinConstraint c) {
    for (const LinTerm& t : c.terms) {
      if (t.var < 0 || t.var >= static_cast<int>(vars_.size())) {
        throw std::out_of_range("constraint " + c.name +
                                " references an undeclared variable");
      }
      if (!std::isfinite(t.coef)) {
        throw std::invalid_argument("constraint " + c.name +
                                    " has a non-finite coefficient");
      }
    }
    if (!std::isfinite(c.rhs)) {
      throw std::invalid_argument("constraint " + c.name +
                                  " has a non-finite right-hand side");
    }
    rows_.push_back(std::move(c));
    return static_cast<int>(rows_.size()) - 1;
  }

  // Accumulates the coefficient (builders may touch a variable twice).
  void add_objective_term(VarRef v, double coef) {
    if (v.index < 0 || v.index >= static_cast<int>(vars_.size())) {
      throw std::out_of_range("objective references an undeclared variable");
    }
    if (!std::isfinite(coef)) {
      throw std::invalid_argument("objective coefficient must be finite");
    }
    if (static_cast<int>(objective_.size()) < num_vars()) {
      objective_.resize(num_vars(), 0.0);
    }
    objective_[v.index] += coef;
  }

  void set_objective_sense(ObjectiveSense s) { sense_ = s; }
  void add_objective_constant(double c) { objective_constant_ += c; }

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<VarInfo>& vars() const { return vars_; }
  const VarInfo& var(VarRef v) const { return vars_.at(v.index); }
  const std::vector<LinConstraint>& rows() const { return rows_; }
  ObjectiveSense objective_sense() const { return sense_; }
  double objective_constant() const { return objective_constant_; }

  // Dense objective vector (zero for variables never touched).
  std::vector<double> objective() const {
    std::vector<double> c = objective_;
    c.resize(vars_.size(), 0.0);
    return c;
  }

 private:
  std::vector<VarInfo> vars_;
  std::vector<LinConstraint> rows_;
  std::vector<double> objective_;
  double objective_constant_ = 0.0;
  ObjectiveSense sense_ = ObjectiveSense::Maximize;
};

struct ModelStats {
  int num_vars = 0;
  int num_binary = 0;
  int num_continuous = 0;
  int num_rows = 0;
  long long num_nonzeros = 0;
};

inline ModelStats model_stats(const MilpModel& m) {
  ModelStats s;
  s.num_vars = m.num_vars();
  s.num_rows = m.num_rows();
  for (const VarInfo& v : m.vars()) {
    if (v.kind == VarKind::Binary) {
      ++s.num_binary;
    } else {
      ++s.num_continuous;
    }
  }
  for (const LinConstraint& r : m.rows()) {
    s.num_nonzeros += static_cast<long long>(r.terms.size());
  }
  return s;
}

enum class SolveStatus { Optimal, Infeasible, LimitReached };

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> values;
  // Row duals, present only for pure LPs (no binary variables).
  std::optional<std::vector<double>> duals;
  double solve_seconds = 0.0;
};

struct SolverConfig {
  double time_limit_seconds = kNoTimeLimit;
  double mip_rel_gap = 1e-9;
  double integrality_tolerance = 1e-6;
  // Share of search effort spent on primal heuristics (sub-MIP dives and the
  // like), mirroring the backend's default. On models whose root relaxation is
  // already near-integral the dives dominate solve time; benchmarks may turn
  // them down.
  double mip_heuristic_effort = 0.05;
  int threads = 1;
  bool verbose = false;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stochkep
