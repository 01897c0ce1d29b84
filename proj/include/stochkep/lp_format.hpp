#pragma once

// Text dump and parse of models in the standard LP file format (the CPLEX
// dialect subset this library emits: objective, rows, bounds, binaries).
// Numbers are written with 17 significant digits so write -> parse restores
// bit-identical coefficients; variable order is the order of first appearance,
// and every variable gets an explicit Bounds or Binary entry so parsing
// reconstructs the exact same variable set.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stochkep/milp.hpp"

namespace stochkep {

namespace detail {

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_terms(std::ostream& os, const MilpModel& m,
                        const std::vector<LinTerm>& terms, bool& first) {
  for (const LinTerm& t : terms) {
    const double c = t.coef;
    if (first) {
      os << (c < 0 ? "- " : "") << fmt_num(c < 0 ? -c : c) << ' '
         << m.vars()[t.var].name;
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ") << fmt_num(c < 0 ? -c : c) << ' '
         << m.vars()[t.var].name;
    }
  }
}

}  // namespace detail

inline void write_lp(const MilpModel& m, std::ostream& os) {
  os << (m.objective_sense() == ObjectiveSense::Maximize ? "Maximize\n"
                                                         : "Minimize\n");
  os << " obj:";
  {
    std::vector<LinTerm> obj_terms;
    const std::vector<double> c = m.objective();
    for (int i = 0; i < m.num_vars(); ++i) {
      if (c[i] != 0.0) obj_terms.push_back({i, c[i]});
    }
    bool first = true;
    if (!obj_terms.empty()) {
      os << ' ';
      detail::write_terms(os, m, obj_terms, first);
    }
    if (m.objective_constant() != 0.0) {
      const double k = m.objective_constant();
      if (first) {
        os << ' ' << (k < 0 ? "- " : "") << detail::fmt_num(k < 0 ? -k : k);
      } else {
        os << (k < 0 ? " - " : " + ") << detail::fmt_num(k < 0 ? -k : k);
      }
    }
    os << '\n';
  }

  os << "Subject To\n";
  for (const LinConstraint& r : m.rows()) {
    if (r.terms.empty()) {
      throw std::invalid_argument("row " + r.name +
                                  " has no terms; cannot be written");
    }
    os << ' ' << r.name << ": ";
    bool first = true;
    detail::write_terms(os, m, r.terms, first);
    switch (r.sense) {
      case RowSense::LessEqual: os << " <= "; break;
      case RowSense::GreaterEqual: os << " >= "; break;
      case RowSense::Equal: os << " = "; break;
    }
    os << detail::fmt_num(r.rhs) << '\n';
  }

  os << "Bounds\n";
  for (const VarInfo& v : m.vars()) {
    if (v.kind == VarKind::Binary) {
      // Only non-default binary bounds (branching fixings) need a line.
      if (v.lower != 0.0 || v.upper != 1.0) {
        os << ' ' << detail::fmt_num(v.lower) << " <= " << v.name
           << " <= " << detail::fmt_num(v.upper) << '\n';
      }
      continue;
    }
    const bool lo_inf = v.lower == -kInf;
    const bool hi_inf = v.upper == kInf;
    if (lo_inf && hi_inf) {
      os << ' ' << v.name << " free\n";
    } else if (hi_inf) {
      os << ' ' << v.name << " >= " << detail::fmt_num(v.lower) << '\n';
    } else if (lo_inf) {
      os << ' ' << v.name << " <= " << detail::fmt_num(v.upper) << '\n';
    } else {
      os << ' ' << detail::fmt_num(v.lower) << " <= " << v.name
         << " <= " << detail::fmt_num(v.upper) << '\n';
    }
  }

  bool any_binary = false;
  for (const VarInfo& v : m.vars()) {
    if (v.kind == VarKind::Binary) {
      any_binary = true;
      break;
    }
  }
  if (any_binary) {
    os << "Binary\n";
    for (const VarInfo& v : m.vars()) {
      if (v.kind == VarKind::Binary) os << ' ' << v.name << '\n';
    }
  }
  os << "End\n";
}

inline std::string write_lp_string(const MilpModel& m) {
  std::ostringstream os;
  write_lp(m, os);
  return os.str();
}

namespace detail {

struct LpToken {
  enum Kind { Name, Number, Op, EndOfFile } kind = EndOfFile;
  std::string text;
  double value = 0.0;
};

class LpLexer {
 public:
  explicit LpLexer(std::istream& is) {
    std::string line;
    std::string all;
    while (std::getline(is, line)) {
      // Strip LP comments (backslash to end of line).
      const std::size_t slash = line.find('\\');
      if (slash != std::string::npos) line.erase(slash);
      all += line;
      all += '\n';
    }
    src_ = std::move(all);
  }

  LpToken next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    if (pos_ >= src_.size()) return {LpToken::EndOfFile, "", 0.0};
    const char c = src_[pos_];
    if (c == '<' || c == '>' || c == '=') {
      std::string op(1, c);
      ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '=') {
        op += '=';
        ++pos_;
      }
      if (op == "<") op = "<=";
      if (op == ">") op = ">=";
      return {LpToken::Op, op, 0.0};
    }
    if (c == '+' || c == '-' || c == ':') {
      ++pos_;
      return {LpToken::Op, std::string(1, c), 0.0};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = src_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(start, &end);
      pos_ += static_cast<std::size_t>(end - start);
      return {LpToken::Number, std::string(start, static_cast<std::size_t>(end - start)), v};
    }
    // Names: letters, digits, underscores, dots.
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      const char ch = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.') {
        ++pos_;
      } else {
        break;
      }
    }
    if (start == pos_) {
      throw std::invalid_argument(std::string("unexpected character in LP text: ") + c);
    }
    return {LpToken::Name, src_.substr(start, pos_ - start), 0.0};
  }

  LpToken peek() {
    const std::size_t save = pos_;
    LpToken t = next();
    pos_ = save;
    return t;
  }

 private:
  std::string src_;
  std::size_t pos_ = 0;
};

inline std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

inline bool is_infinity_name(const std::string& s) {
  const std::string u = upper(s);
  return u == "INF" || u == "INFINITY";
}

}  // namespace detail

// Parses the subset of the LP format produced by write_lp (plus common
// spelling variants of the section keywords). Variable indices follow first
// appearance; the reconstructed model has the same statistics, bounds and,
// once solved, the same optimum as the original.
inline MilpModel parse_lp(std::istream& is) {
  using detail::LpToken;
  detail::LpLexer lex(is);
  MilpModel m;
  std::map<std::string, int> index_of;

  auto var_of = [&](const std::string& name) -> VarRef {
    auto it = index_of.find(name);
    if (it != index_of.end()) return {it->second};
    VarRef v = m.add_continuous(0.0, kInf, name);
    index_of.emplace(name, v.index);
    return v;
  };

  enum Section { None, Objective, Rows, Bounds, Binaries };
  Section section = None;

  auto section_keyword = [&](const LpToken& t, detail::LpLexer& lx) -> bool {
    if (t.kind != LpToken::Name) return false;
    const std::string u = detail::upper(t.text);
    if (u == "MAXIMIZE" || u == "MAXIMISE" || u == "MAX") {
      m.set_objective_sense(ObjectiveSense::Maximize);
      section = Objective;
      return true;
    }
    if (u == "MINIMIZE" || u == "MINIMISE" || u == "MIN") {
      m.set_objective_sense(ObjectiveSense::Minimize);
      section = Objective;
      return true;
    }
    if (u == "SUBJECT") {  // "Subject To"
      const LpToken follow = lx.next();
      if (follow.kind != LpToken::Name || detail::upper(follow.text) != "TO") {
        throw std::invalid_argument("expected 'To' after 'Subject'");
      }
      section = Rows;
      return true;
    }
    if (u == "ST" || u == "S.T." || u == "SUCH") {
      if (u == "SUCH") lx.next();  // "Such That"
      section = Rows;
      return true;
    }
    if (u == "BOUNDS" || u == "BOUND") {
      section = Bounds;
      return true;
    }
    if (u == "BINARY" || u == "BINARIES" || u == "BIN") {
      section = Binaries;
      return true;
    }
    if (u == "GENERAL" || u == "GENERALS" || u == "GEN" || u == "INTEGER" ||
        u == "INTEGERS" || u == "SEMI-CONTINUOUS" || u == "SOS") {
      throw std::invalid_argument("unsupported LP section: " + t.text);
    }
    if (u == "END") {
      section = None;
      return true;
    }
    return false;
  };

  // Reads a linear expression until a relational operator or section keyword.
  // Returns terms + constant; leaves the stopping token for the caller via
  // out parameters.
  struct ExprEnd {
    bool has_relation = false;
    std::string relation;
  };

  auto parse_expr = [&](std::vector<LinTerm>& terms, double& constant) -> ExprEnd {
    double sign = 1.0;
    bool have_coef = false;
    double coef = 1.0;
    for (;;) {
      LpToken t = lex.peek();
      if (t.kind == LpToken::EndOfFile) return {false, ""};
      if (t.kind == LpToken::Op) {
        if (t.text == "+" || t.text == "-") {
          if (have_coef) {
            // Dangling bare number before a sign: constant term.
            constant += sign * coef;
            have_coef = false;
          }
          lex.next();
          sign = (t.text == "-") ? -sign : sign;
          continue;
        }
        if (t.text == "<=" || t.text == ">=" || t.text == "=") {
          if (have_coef) {
            constant += sign * coef;
            have_coef = false;
          }
          lex.next();
          return {true, t.text};
        }
        throw std::invalid_argument("unexpected operator in expression: " + t.text);
      }
      if (t.kind == LpToken::Number) {
        if (have_coef) {
          constant += sign * coef;
          sign = 1.0;
        }
        lex.next();
        coef = t.value;
        have_coef = true;
        continue;
      }
      // Name: either a variable of the current term or a section keyword that
      // terminates the expression.
      {
        const std::string u = detail::upper(t.text);
        if (u == "MAXIMIZE" || u == "MAXIMISE" || u == "MAX" || u == "MINIMIZE" ||
            u == "MINIMISE" || u == "MIN" || u == "SUBJECT" || u == "ST" ||
            u == "BOUNDS" || u == "BOUND" || u == "BINARY" || u == "BINARIES" ||
            u == "BIN" || u == "GENERAL" || u == "GENERALS" || u == "END" ||
            u == "SUCH") {
          if (have_coef) {
            constant += sign * coef;
            have_coef = false;
          }
          return {false, ""};
        }
      }
      lex.next();
      const VarRef v = var_of(t.text);
      terms.push_back({v.index, sign * (have_coef ? coef : 1.0)});
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
  };

  for (;;) {
    LpToken t = lex.peek();
    if (t.kind == LpToken::EndOfFile) break;
    if (t.kind == LpToken::Name) {
      LpToken consumed = lex.next();
      if (section_keyword(consumed, lex)) continue;
      // Not a keyword: it belongs to the current section's payload.
      if (section == Objective || section == Rows) {
        // Optional label "name:".
        std::string label = consumed.text;
        LpToken after = lex.peek();
        bool labeled = after.kind == LpToken::Op && after.text == ":";
        std::vector<LinTerm> terms;
        double constant = 0.0;
        if (labeled) {
          lex.next();  // ':'
        } else {
          // The name we consumed is the first variable of the expression.
          const VarRef v = var_of(consumed.text);
          terms.push_back({v.index, 1.0});
          label.clear();
        }
        ExprEnd end = parse_expr(terms, constant);
        if (section == Objective) {
          if (end.has_relation) {
            throw std::invalid_argument("objective must not contain a relation");
          }
          for (const LinTerm& term : terms) {
            m.add_objective_term({term.var}, term.coef);
          }
          m.add_objective_constant(constant);
        } else {
          if (!end.has_relation) {
            throw std::invalid_argument("row " + label + " has no relation");
          }
          LpToken rhs_tok = lex.next();
          double rhs_sign = 1.0;
          while (rhs_tok.kind == LpToken::Op &&
                 (rhs_tok.text == "+" || rhs_tok.text == "-")) {
            if (rhs_tok.text == "-") rhs_sign = -rhs_sign;
            rhs_tok = lex.next();
          }
          if (rhs_tok.kind != LpToken::Number) {
            throw std::invalid_argument("row " + label + " has a non-numeric rhs");
          }
          LinConstraint row;
          row.name = label.empty() ? ("r" + std::to_string(m.num_rows())) : label;
          row.terms = std::move(terms);
          row.rhs = rhs_sign * rhs_tok.value - constant;
          row.sense = end.relation == "<="   ? RowSense::LessEqual
                      : end.relation == ">=" ? RowSense::GreaterEqual
                                             : RowSense::Equal;
          m.add_constraint(std::move(row));
        }
        continue;
      }
      if (section == Bounds) {
        // Forms: "name free" | "name <= num" | "name >= num" |
        //        "num <= name <= num" (first token here is the name).
        const std::string name = consumed.text;
        const VarRef v = var_of(name);
        LpToken follow = lex.peek();
        if (follow.kind == LpToken::Name && detail::upper(follow.text) == "FREE") {
          lex.next();
          m.set_bounds(v, -kInf, kInf);
          continue;
        }
        if (follow.kind == LpToken::Op &&
            (follow.text == "<=" || follow.text == ">=" || follow.text == "=")) {
          lex.next();
          double sign = 1.0;
          LpToken num = lex.next();
          while (num.kind == LpToken::Op && (num.text == "+" || num.text == "-")) {
            if (num.text == "-") sign = -sign;
            num = lex.next();
          }
          double value;
          if (num.kind == LpToken::Number) {
            value = sign * num.value;
          } else if (num.kind == LpToken::Name && detail::is_infinity_name(num.text)) {
            value = sign * kInf;
          } else {
            throw std::invalid_argument("bad bound value for " + name);
          }
          const VarInfo& info = m.var(v);
          if (follow.text == "<=") {
            m.set_bounds(v, info.lower, value);
          } else if (follow.text == ">=") {
            m.set_bounds(v, value, info.upper);
          } else {
            m.set_bounds(v, value, value);
          }
          continue;
        }
        throw std::invalid_argument("malformed bound line for " + name);
      }
      if (section == Binaries) {
        // Flip to binary; set_kind clamps default bounds into [0, 1] while
        // keeping any tighter bounds already read.
        m.set_kind(var_of(consumed.text), VarKind::Binary);
        continue;
      }
      throw std::invalid_argument("unexpected token outside any section: " +
                                  consumed.text);
    }
    if (t.kind == LpToken::Number || t.kind == LpToken::Op) {
      if (section == Bounds) {
        // "num <= name <= num" (or with a leading sign).
        double sign = 1.0;
        LpToken num = lex.next();
        while (num.kind == LpToken::Op && (num.text == "+" || num.text == "-")) {
          if (num.text == "-") sign = -sign;
          num = lex.next();
        }
        double lo;
        if (num.kind == LpToken::Number) {
          lo = sign * num.value;
        } else if (num.kind == LpToken::Name && detail::is_infinity_name(num.text)) {
          lo = sign * kInf;
        } else {
          throw std::invalid_argument("malformed bounds line");
        }
        LpToken rel = lex.next();
        if (rel.kind != LpToken::Op || rel.text != "<=") {
          throw std::invalid_argument("expected <= in bounds line");
        }
        LpToken namet = lex.next();
        if (namet.kind != LpToken::Name) {
          throw std::invalid_argument("expected variable name in bounds line");
        }
        const VarRef v = var_of(namet.text);
        LpToken rel2 = lex.peek();
        double hi = m.var(v).upper;
        if (rel2.kind == LpToken::Op && rel2.text == "<=") {
          lex.next();
          double s2 = 1.0;
          LpToken num2 = lex.next();
          while (num2.kind == LpToken::Op && (num2.text == "+" || num2.text == "-")) {
            if (num2.text == "-") s2 = -s2;
            num2 = lex.next();
          }
          if (num2.kind == LpToken::Number) {
            hi = s2 * num2.value;
          } else if (num2.kind == LpToken::Name &&
                     detail::is_infinity_name(num2.text)) {
            hi = s2 * kInf;
          } else {
            throw std::invalid_argument("malformed upper bound");
          }
        }
        m.set_bounds(v, lo, hi);
        continue;
      }
      throw std::invalid_argument("unexpected token: " + t.text);
    }
  }
  return m;
}

inline MilpModel parse_lp_string(const std::string& text) {
  std::istringstream is(text);
  return parse_lp(is);
}

}  // namespace stochkep
