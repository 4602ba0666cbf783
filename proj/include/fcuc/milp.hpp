#pragma once

// Generic mixed-integer linear program container: variables with bounds and
// integrality flags, sparse linear constraints, and a minimization objective.
// Solvers live in simplex.hpp (LP) and milp_solver.hpp (branch and bound).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcuc::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEq, Equal, GreaterEq };

enum class Status { Optimal, Infeasible, Unbounded, LimitReached, NumericalFailure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal-within-gap";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::LimitReached: return "limit-reached";
    case Status::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

struct Variable {
  double lo = 0.0;
  double hi = kInf;
  bool integral = false;
  std::string name;
};

struct Term {
  int var = -1;
  double coef = 0.0;
};

struct Constraint {
  std::vector<Term> terms;  // sorted by var id, unique ids
  Sense sense = Sense::LessEq;
  double rhs = 0.0;
};

struct SolverOptions {
  double mip_gap = 0.001;        // relative optimality gap
  double feas_tol = 1e-7;        // row/bound feasibility tolerance
  double int_tol = 1e-6;         // integrality tolerance
  long node_limit = 500000;
  double time_limit_s = kInf;
  long lp_iter_limit = 2000000;  // per LP solve
};

struct Solution {
  Status status = Status::NumericalFailure;
  double objective = 0.0;
  std::vector<double> values;  // per variable id
  double best_bound = -kInf;
  long node_count = 0;
  double wall_time_s = 0.0;
};

class Model {
 public:
  int add_variable(double lo, double hi, bool integral, std::string name = "") {
    if (!(lo <= hi)) throw std::invalid_argument("add_variable: inverted bounds for '" + name + "'");
    vars_.push_back({lo, hi, integral, std::move(name)});
    return static_cast<int>(vars_.size()) - 1;
  }

  // Duplicate variable ids in `terms` are coefficient-summed.
  int add_constraint(const std::vector<Term>& terms, Sense sense, double rhs) {
    Constraint c;
    c.sense = sense;
    c.rhs = rhs;
    std::map<int, double> merged;
    for (const Term& t : terms) {
      if (t.var < 0 || t.var >= num_variables())
        throw std::invalid_argument("add_constraint: unknown variable id " + std::to_string(t.var));
      merged[t.var] += t.coef;
    }
    c.terms.reserve(merged.size());
    for (auto& [v, coef] : merged) c.terms.push_back({v, coef});
    cons_.push_back(std::move(c));
    return static_cast<int>(cons_.size()) - 1;
  }

  void set_objective_coef(int var, double coef) {
    if (var < 0 || var >= num_variables())
      throw std::invalid_argument("set_objective_coef: unknown variable id");
    obj_.resize(vars_.size(), 0.0);
    obj_[var] = coef;
  }

  void add_objective_coef(int var, double coef) {
    if (var < 0 || var >= num_variables())
      throw std::invalid_argument("add_objective_coef: unknown variable id");
    obj_.resize(vars_.size(), 0.0);
    obj_[var] += coef;
  }

  void set_bounds(int var, double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("set_bounds: inverted bounds");
    vars_[var].lo = lo;
    vars_[var].hi = hi;
  }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(cons_.size()); }
  const Variable& variable(int i) const { return vars_[i]; }
  const Constraint& constraint(int i) const { return cons_[i]; }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  double objective_coef(int var) const {
    return var < static_cast<int>(obj_.size()) ? obj_[var] : 0.0;
  }

  double eval_objective(const std::vector<double>& x) const {
    double v = 0.0;
    for (size_t j = 0; j < obj_.size(); ++j) v += obj_[j] * x[j];
    return v;
  }

  double eval_row(int i, const std::vector<double>& x) const {
    double v = 0.0;
    for (const Term& t : cons_[i].terms) v += t.coef * x[t.var];
    return v;
  }

  // Worst row violation plus worst bound violation, for verification.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int i = 0; i < num_constraints(); ++i) {
      const double lhs = eval_row(i, x);
      const Constraint& c = cons_[i];
      double v = 0.0;
      if (c.sense == Sense::LessEq) v = lhs - c.rhs;
      else if (c.sense == Sense::GreaterEq) v = c.rhs - lhs;
      else v = std::abs(lhs - c.rhs);
      worst = std::max(worst, v);
    }
    for (int j = 0; j < num_variables(); ++j) {
      worst = std::max(worst, vars_[j].lo - x[j]);
      worst = std::max(worst, x[j] - vars_[j].hi);
    }
    return worst;
  }

  // Worst violation scaled by row activity, for solution acceptance checks.
  double max_relative_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int i = 0; i < num_constraints(); ++i) {
      const Constraint& c = cons_[i];
      double lhs = 0.0, scale = 1.0 + std::abs(c.rhs);
      for (const Term& t : c.terms) {
        lhs += t.coef * x[t.var];
        scale += std::abs(t.coef * x[t.var]);
      }
      double v = 0.0;
      if (c.sense == Sense::LessEq) v = lhs - c.rhs;
      else if (c.sense == Sense::GreaterEq) v = c.rhs - lhs;
      else v = std::abs(lhs - c.rhs);
      worst = std::max(worst, v / scale);
    }
    for (int j = 0; j < num_variables(); ++j) {
      const double scale = 1.0 + std::abs(x[j]);
      worst = std::max(worst, (vars_[j].lo - x[j]) / scale);
      worst = std::max(worst, (x[j] - vars_[j].hi) / scale);
    }
    return worst;
  }

  // Export in the standard LP text format for cross-checking with external solvers.
  void write_lp(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_lp: cannot open " + path);
    auto vname = [&](int j) {
      return vars_[j].name.empty() ? "x" + std::to_string(j) : vars_[j].name;
    };
    out << "Minimize\n obj:";
    bool first = true;
    for (size_t j = 0; j < obj_.size(); ++j) {
      if (obj_[j] == 0.0) continue;
      out << (first ? " " : (obj_[j] >= 0 ? " + " : " ")) << obj_[j] << " " << vname(j);
      first = false;
    }
    if (first) out << " 0 " << (vars_.empty() ? "x0" : vname(0));
    out << "\nSubject To\n";
    for (int i = 0; i < num_constraints(); ++i) {
      const Constraint& c = cons_[i];
      out << " c" << i << ":";
      if (c.terms.empty()) out << " 0 " << vname(0);
      for (const Term& t : c.terms) {
        out << (t.coef >= 0 ? " + " : " ") << t.coef << " " << vname(t.var);
      }
      out << (c.sense == Sense::LessEq ? " <= " : c.sense == Sense::Equal ? " = " : " >= ");
      out << c.rhs << "\n";
    }
    out << "Bounds\n";
    for (int j = 0; j < num_variables(); ++j) {
      const Variable& v = vars_[j];
      if (v.lo == -kInf && v.hi == kInf) out << " " << vname(j) << " free\n";
      else if (v.hi == kInf) out << " " << vname(j) << " >= " << v.lo << "\n";
      else out << " " << v.lo << " <= " << vname(j) << " <= " << v.hi << "\n";
    }
    bool any_bin = false;
    for (int j = 0; j < num_variables(); ++j) {
      if (vars_[j].integral && vars_[j].lo >= 0 && vars_[j].hi <= 1) {
        if (!any_bin) out << "Binary\n";
        any_bin = true;
        out << " " << vname(j) << "\n";
      }
    }
    bool any_gen = false;
    for (int j = 0; j < num_variables(); ++j) {
      if (vars_[j].integral && !(vars_[j].lo >= 0 && vars_[j].hi <= 1)) {
        if (!any_gen) out << "General\n";
        any_gen = true;
        out << " " << vname(j) << "\n";
      }
    }
    out << "End\n";
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::vector<double> obj_;
};

}  // namespace fcuc::milp
