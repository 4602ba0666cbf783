#pragma once

// Unit-commitment MILP builder: production cost objective, nodal balance,
// DC flows, capacity/reserve/ramping limits, startup logic and minimum
// up/down times; optional largest-unit indicator encoding and the
// equivalent-model RoCoF (surviving kinetic energy) constraint.
// Extraction re-checks every constraint with an independent verifier that
// works from the raw instance data, not from the model.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcuc/grid.hpp"
#include "fcuc/milp.hpp"
#include "fcuc/milp_solver.hpp"

namespace fcuc {

struct UcInstance {
  GridModel grid;
  Scenario scenario;
  bool reserve_policy = true;
  std::vector<int> initial_u;       // u_{g,0}
  std::vector<double> initial_p;    // P_{g,0} MW
};

inline UcInstance make_instance(const GridModel& g, const Scenario& s,
                                bool reserve_policy = true) {
  if (s.num_buses != g.num_buses())
    throw std::invalid_argument("make_instance: scenario bus set differs from grid");
  UcInstance inst;
  inst.grid = g;
  inst.scenario = s;
  inst.reserve_policy = reserve_policy;
  for (const Generator& gen : g.generators) {
    inst.initial_u.push_back(gen.initial_status);
    inst.initial_p.push_back(gen.initial_output);
  }
  return inst;
}

enum class FcucEncoding { None, Erc, DnnExact, DnnActive };

struct FcucOptions {
  std::vector<int> constrained_periods{9, 10, 11, 12};  // 1-based hours
  double rocof_lim_hz_s = 0.5;
  double f_lim_hz = 59.5;
  double f_nom_hz = 60.0;
  double big_m_a = 0.0;  // 0: use 1.05 * max generator capacity
  double gamma_select = 0.25;
  FcucEncoding encoding = FcucEncoding::None;

  void check() const {
    if (rocof_lim_hz_s <= 0) throw std::invalid_argument("FcucOptions: RoCoF limit must be positive");
    if (f_lim_hz >= f_nom_hz) throw std::invalid_argument("FcucOptions: f_lim must be below f_nom");
  }
};

inline double default_big_m(const GridModel& g) {
  double pmax = 0.0;
  for (const Generator& gen : g.generators) pmax = std::max(pmax, gen.p_max);
  return 1.05 * pmax;
}

// Variable handles for one built UC model. Index layout is g*nt + t
// (0-based periods).
struct UcVars {
  int ng = 0, nt = 0, nl = 0, nb = 0;
  std::vector<int> u, v, p, r;
  std::vector<int> flow;   // k*nt + t
  std::vector<int> theta;  // n*nt + t
  std::vector<int> mu, rho;              // g*nt + t, only filled on encoded periods
  std::vector<int> encoded_periods;      // 0-based t carrying mu/rho
  int gt(int g, int t) const { return g * nt + t; }
  int kt(int k, int t) const { return k * nt + t; }
  int bt(int b, int t) const { return b * nt + t; }
};

struct UcModel {
  milp::Model model;
  UcVars vars;
};

inline UcModel build_tscuc(const UcInstance& inst) {
  const GridModel& g = inst.grid;
  const Scenario& sc = inst.scenario;
  if (sc.num_buses != g.num_buses())
    throw std::invalid_argument("build_tscuc: scenario bus set differs from grid");
  UcModel ucm;
  milp::Model& m = ucm.model;
  UcVars& vars = ucm.vars;
  vars.ng = g.num_generators();
  vars.nt = sc.num_periods;
  vars.nl = g.num_lines();
  vars.nb = g.num_buses();
  const int ng = vars.ng, nt = vars.nt;

  vars.u.resize(size_t(ng) * nt);
  vars.v.resize(size_t(ng) * nt);
  vars.p.resize(size_t(ng) * nt);
  vars.r.resize(size_t(ng) * nt);
  for (int gi = 0; gi < ng; ++gi) {
    const Generator& gen = g.generators[gi];
    for (int t = 0; t < nt; ++t) {
      const std::string suf = "_" + std::to_string(gen.id) + "_" + std::to_string(t + 1);
      vars.u[vars.gt(gi, t)] = m.add_variable(0, 1, true, "u" + suf);
      vars.v[vars.gt(gi, t)] = m.add_variable(0, 1, true, "v" + suf);
      vars.p[vars.gt(gi, t)] = m.add_variable(0, gen.p_max, false, "p" + suf);
      const double rcap = inst.reserve_policy ? gen.ramp_re : 0.0;
      vars.r[vars.gt(gi, t)] = m.add_variable(0, rcap, false, "r" + suf);
    }
  }
  vars.flow.resize(size_t(vars.nl) * nt);
  for (int k = 0; k < vars.nl; ++k) {
    const Line& ln = g.lines[k];
    for (int t = 0; t < nt; ++t)
      vars.flow[vars.kt(k, t)] = m.add_variable(
          -ln.p_max, ln.p_max, false,
          "f_" + std::to_string(ln.id) + "_" + std::to_string(t + 1));
  }
  vars.theta.resize(size_t(vars.nb) * nt);
  for (int b = 0; b < vars.nb; ++b) {
    for (int t = 0; t < nt; ++t) {
      // slack bus: lowest-index bus, angle fixed at zero
      const double lo = (b == 0) ? 0.0 : -milp::kInf;
      const double hi = (b == 0) ? 0.0 : milp::kInf;
      vars.theta[vars.bt(b, t)] = m.add_variable(
          lo, hi, false,
          "th_" + std::to_string(g.buses[b].id) + "_" + std::to_string(t + 1));
    }
  }

  for (int gi = 0; gi < ng; ++gi) {
    const Generator& gen = g.generators[gi];
    for (int t = 0; t < nt; ++t) {
      m.add_objective_coef(vars.p[vars.gt(gi, t)], gen.cost);
      m.add_objective_coef(vars.u[vars.gt(gi, t)], gen.no_load_cost);
      m.add_objective_coef(vars.v[vars.gt(gi, t)], gen.startup_cost);
      if (inst.reserve_policy)
        m.add_objective_coef(vars.r[vars.gt(gi, t)], gen.reserve_cost);
    }
  }

  // nodal power balance
  for (int b = 0; b < vars.nb; ++b) {
    for (int t = 0; t < nt; ++t) {
      std::vector<milp::Term> terms;
      for (int gi = 0; gi < ng; ++gi)
        if (g.bus_index(g.generators[gi].bus) == b)
          terms.push_back({vars.p[vars.gt(gi, t)], 1.0});
      for (int k = 0; k < vars.nl; ++k) {
        if (g.bus_index(g.lines[k].to) == b) terms.push_back({vars.flow[vars.kt(k, t)], 1.0});
        if (g.bus_index(g.lines[k].from) == b) terms.push_back({vars.flow[vars.kt(k, t)], -1.0});
      }
      m.add_constraint(terms, milp::Sense::Equal, sc.demand(b, t) - sc.res(b, t));
    }
  }
  // reserve adequacy: total reserve covers the loss of any single unit,
  // written literally with the covered unit's own reserve on both sides
  if (inst.reserve_policy) {
    for (int t = 0; t < nt; ++t) {
      for (int gi = 0; gi < ng; ++gi) {
        std::vector<milp::Term> terms;
        for (int gj = 0; gj < ng; ++gj) terms.push_back({vars.r[vars.gt(gj, t)], 1.0});
        terms.push_back({vars.p[vars.gt(gi, t)], -1.0});
        terms.push_back({vars.r[vars.gt(gi, t)], -1.0});
        m.add_constraint(terms, milp::Sense::GreaterEq, 0.0);
      }
    }
  }
  // DC flow definition, flows in MW with susceptance in pu on S_base
  for (int k = 0; k < vars.nl; ++k) {
    const Line& ln = g.lines[k];
    const int bf = g.bus_index(ln.from), bt_ = g.bus_index(ln.to);
    const double coef = g.s_base_mva * ln.susceptance * g.voltage_pu * g.voltage_pu;
    for (int t = 0; t < nt; ++t)
      m.add_constraint({{vars.flow[vars.kt(k, t)], 1.0},
                        {vars.theta[vars.bt(bf, t)], -coef},
                        {vars.theta[vars.bt(bt_, t)], coef}},
                       milp::Sense::Equal, 0.0);
  }

  for (int gi = 0; gi < ng; ++gi) {
    const Generator& gen = g.generators[gi];
    for (int t = 0; t < nt; ++t) {
      const int pu = vars.p[vars.gt(gi, t)], uu = vars.u[vars.gt(gi, t)];
      const int rr = vars.r[vars.gt(gi, t)], vv = vars.v[vars.gt(gi, t)];
      // minimum output and headroom with reserve
      m.add_constraint({{uu, gen.p_min}, {pu, -1.0}}, milp::Sense::LessEq, 0.0);
      m.add_constraint({{pu, 1.0}, {rr, 1.0}, {uu, -gen.p_max}}, milp::Sense::LessEq, 0.0);
      if (inst.reserve_policy)
        m.add_constraint({{rr, 1.0}, {uu, -gen.ramp_re}}, milp::Sense::LessEq, 0.0);
      // hourly ramping, initial output for t = 0
      if (t == 0) {
        m.add_constraint({{pu, 1.0}}, milp::Sense::LessEq,
                         gen.ramp_hr + inst.initial_p[gi]);
        m.add_constraint({{pu, -1.0}}, milp::Sense::LessEq,
                         gen.ramp_hr - inst.initial_p[gi]);
      } else {
        const int pprev = vars.p[vars.gt(gi, t - 1)];
        m.add_constraint({{pu, 1.0}, {pprev, -1.0}}, milp::Sense::LessEq, gen.ramp_hr);
        m.add_constraint({{pprev, 1.0}, {pu, -1.0}}, milp::Sense::LessEq, gen.ramp_hr);
      }
      // startup logic
      if (t == 0) {
        m.add_constraint({{uu, 1.0}, {vv, -1.0}}, milp::Sense::LessEq,
                         double(inst.initial_u[gi]));
      } else {
        m.add_constraint({{uu, 1.0}, {vars.u[vars.gt(gi, t - 1)], -1.0}, {vv, -1.0}},
                         milp::Sense::LessEq, 0.0);
      }
      if (t + 1 < nt)
        m.add_constraint({{vars.v[vars.gt(gi, t + 1)], 1.0}, {uu, 1.0}},
                         milp::Sense::LessEq, 1.0);
      m.add_constraint({{vv, 1.0}, {uu, -1.0}}, milp::Sense::LessEq, 0.0);
      // minimum up time: startups within the trailing window imply on
      {
        std::vector<milp::Term> terms;
        for (int s = std::max(0, t - gen.min_up + 1); s <= t; ++s)
          terms.push_back({vars.v[vars.gt(gi, s)], 1.0});
        terms.push_back({uu, -1.0});
        m.add_constraint(terms, milp::Sense::LessEq, 0.0);
      }
      // minimum down time: no restart within DT of being on at t-DT
      {
        std::vector<milp::Term> terms;
        for (int s = std::max(0, t - gen.min_down + 1); s <= t; ++s)
          terms.push_back({vars.v[vars.gt(gi, s)], 1.0});
        const int tref = t - gen.min_down;
        double rhs = 1.0;
        if (tref >= 0) terms.push_back({vars.u[vars.gt(gi, tref)], 1.0});
        else if (tref == -1) rhs = 1.0 - inst.initial_u[gi];
        m.add_constraint(terms, milp::Sense::LessEq, rhs);
      }
    }
  }
  return ucm;
}

// Supplementary mu/rho variables that pick out the largest generator output
// on the encoded periods (1-based).
inline void add_largest_unit_encoding(UcModel& ucm, const UcInstance& inst,
                                      const FcucOptions& opts) {
  opts.check();
  const GridModel& g = inst.grid;
  const int ng = ucm.vars.ng, nt = ucm.vars.nt;
  const double A = opts.big_m_a > 0 ? opts.big_m_a : default_big_m(g);
  for (const Generator& gen : g.generators)
    if (A <= gen.p_max)
      throw std::invalid_argument("add_largest_unit_encoding: A must exceed every capacity");
  milp::Model& m = ucm.model;
  ucm.vars.mu.assign(size_t(ng) * nt, -1);
  ucm.vars.rho.assign(size_t(ng) * nt, -1);
  ucm.vars.encoded_periods.clear();
  for (int t1 : opts.constrained_periods) {
    const int t = t1 - 1;
    if (t < 0 || t >= nt)
      throw std::invalid_argument("add_largest_unit_encoding: period out of horizon");
    ucm.vars.encoded_periods.push_back(t);
    for (int gi = 0; gi < ng; ++gi) {
      const std::string suf =
          "_" + std::to_string(g.generators[gi].id) + "_" + std::to_string(t1);
      ucm.vars.mu[ucm.vars.gt(gi, t)] = m.add_variable(0, 1, true, "mu" + suf);
      ucm.vars.rho[ucm.vars.gt(gi, t)] =
          m.add_variable(0, g.generators[gi].p_max, false, "rho" + suf);
    }
    std::vector<milp::Term> sum_mu, sum_rho;
    for (int gi = 0; gi < ng; ++gi) {
      sum_mu.push_back({ucm.vars.mu[ucm.vars.gt(gi, t)], 1.0});
      sum_rho.push_back({ucm.vars.rho[ucm.vars.gt(gi, t)], 1.0});
    }
    m.add_constraint(sum_mu, milp::Sense::Equal, 1.0);
    for (int gi = 0; gi < ng; ++gi) {
      const int mu = ucm.vars.mu[ucm.vars.gt(gi, t)];
      const int rho = ucm.vars.rho[ucm.vars.gt(gi, t)];
      const int p = ucm.vars.p[ucm.vars.gt(gi, t)];
      const int u = ucm.vars.u[ucm.vars.gt(gi, t)];
      // the selected value dominates every output
      std::vector<milp::Term> dom = sum_rho;
      dom.push_back({p, -1.0});
      m.add_constraint(dom, milp::Sense::GreaterEq, 0.0);
      // rho tracks the selected unit's output and vanishes elsewhere
      m.add_constraint({{rho, 1.0}, {p, -1.0}, {mu, -A}}, milp::Sense::GreaterEq, -A);
      m.add_constraint({{rho, 1.0}, {p, -1.0}, {mu, A}}, milp::Sense::LessEq, A);
      m.add_constraint({{rho, 1.0}, {mu, -A}}, milp::Sense::LessEq, 0.0);
      // only a committed unit can host the maximum
      m.add_constraint({{mu, 1.0}, {u, -1.0}}, milp::Sense::LessEq, 0.0);
    }
  }
}

// Equivalent-model RoCoF constraint: post-contingency kinetic energy
// (tripped unit excluded) must cover the lost power at the RoCoF limit.
inline std::vector<int> add_erc_constraint(UcModel& ucm, const UcInstance& inst,
                                           const FcucOptions& opts) {
  opts.check();
  if (ucm.vars.encoded_periods.empty())
    throw std::logic_error("add_erc_constraint: largest-unit encoding missing");
  const GridModel& g = inst.grid;
  const int ng = ucm.vars.ng;
  std::vector<int> rows;
  for (int t : ucm.vars.encoded_periods) {
    std::vector<milp::Term> terms;
    for (int gi = 0; gi < ng; ++gi) {
      const double e = 2.0 * g.generators[gi].inertia_h * g.generators[gi].rating_mva;
      terms.push_back({ucm.vars.u[ucm.vars.gt(gi, t)], e});
      terms.push_back({ucm.vars.mu[ucm.vars.gt(gi, t)], -e});
      terms.push_back({ucm.vars.rho[ucm.vars.gt(gi, t)],
                       -opts.f_nom_hz / opts.rocof_lim_hz_s});
    }
    rows.push_back(ucm.model.add_constraint(terms, milp::Sense::GreaterEq, 0.0));
  }
  return rows;
}

struct UcSolution {
  milp::Status status = milp::Status::NumericalFailure;
  int ng = 0, nt = 0;
  std::vector<int> u, v;          // g*nt + t
  std::vector<double> p, r;       // MW
  std::vector<double> flow;       // k*nt + t
  std::vector<double> theta;      // n*nt + t
  std::vector<double> mu, rho;    // only on encoded periods, else 0
  double objective = 0.0;
  double best_bound = 0.0;
  long nodes = 0;
  double wall_time_s = 0.0;

  int gt(int g, int t) const { return g * nt + t; }
  std::vector<int> commitment_at(int t) const {
    std::vector<int> out(ng);
    for (int g = 0; g < ng; ++g) out[g] = u[gt(g, t)];
    return out;
  }
  std::vector<double> dispatch_at(int t) const {
    std::vector<double> out(ng);
    for (int g = 0; g < ng; ++g) out[g] = p[gt(g, t)];
    return out;
  }
};

// Independent re-check of the extracted schedule against the raw instance.
// Deliberately does not touch the MILP model.
inline std::vector<std::string> verify_uc_solution(const UcInstance& inst,
                                                   const UcSolution& sol,
                                                   bool check_reserve = true) {
  std::vector<std::string> bad;
  const GridModel& g = inst.grid;
  const Scenario& sc = inst.scenario;
  const int ng = sol.ng, nt = sol.nt;
  const double ptol = 1e-3;  // MW tolerance on rows involving rounded binaries
  auto tag = [](const std::string& what, int gid, int t) {
    return what + " violated for generator " + std::to_string(gid) + " at hour " +
           std::to_string(t + 1);
  };
  // power balance to LP precision (skipped for schedules loaded from file,
  // which carry no flow/angle columns)
  for (int b = 0; sol.flow.size() == size_t(g.num_lines()) * nt && b < g.num_buses(); ++b) {
    for (int t = 0; t < nt; ++t) {
      double acc = -sc.demand(b, t) + sc.res(b, t);
      for (int gi = 0; gi < ng; ++gi)
        if (g.bus_index(g.generators[gi].bus) == b) acc += sol.p[sol.gt(gi, t)];
      for (int k = 0; k < g.num_lines(); ++k) {
        if (g.bus_index(g.lines[k].to) == b) acc += sol.flow[size_t(k) * nt + t];
        if (g.bus_index(g.lines[k].from) == b) acc -= sol.flow[size_t(k) * nt + t];
      }
      if (std::abs(acc) > 1e-6)
        bad.push_back("power balance residual " + std::to_string(acc) + " at bus " +
                      std::to_string(g.buses[b].id) + " hour " + std::to_string(t + 1));
    }
  }
  // flows: definition and limits
  for (int k = 0; sol.flow.size() == size_t(g.num_lines()) * nt && k < g.num_lines(); ++k) {
    const Line& ln = g.lines[k];
    const double coef = g.s_base_mva * ln.susceptance * g.voltage_pu * g.voltage_pu;
    for (int t = 0; t < nt; ++t) {
      const double f = sol.flow[size_t(k) * nt + t];
      const double dth = sol.theta[size_t(g.bus_index(ln.from)) * nt + t] -
                         sol.theta[size_t(g.bus_index(ln.to)) * nt + t];
      if (std::abs(f - coef * dth) > 1e-4)
        bad.push_back("flow equation violated on line " + std::to_string(ln.id));
      if (std::abs(f) > ln.p_max + 1e-5)
        bad.push_back("thermal limit violated on line " + std::to_string(ln.id));
    }
  }
  for (int gi = 0; gi < ng; ++gi) {
    const Generator& gen = g.generators[gi];
    for (int t = 0; t < nt; ++t) {
      const int u = sol.u[sol.gt(gi, t)];
      const int v = sol.v[sol.gt(gi, t)];
      const double p = sol.p[sol.gt(gi, t)];
      const double r = sol.r[sol.gt(gi, t)];
      if (u != 0 && u != 1) bad.push_back(tag("binary status", gen.id, t));
      if (p < gen.p_min * u - ptol || p + r > gen.p_max * u + ptol)
        bad.push_back(tag("capacity bounds", gen.id, t));
      if (r < -ptol || r > gen.ramp_re * u + ptol)
        bad.push_back(tag("reserve bounds", gen.id, t));
      const double pprev = (t == 0) ? inst.initial_p[gi] : sol.p[sol.gt(gi, t - 1)];
      if (std::abs(p - pprev) > gen.ramp_hr + ptol)
        bad.push_back(tag("ramp limit", gen.id, t));
      const int uprev = (t == 0) ? inst.initial_u[gi] : sol.u[sol.gt(gi, t - 1)];
      if (v < u - uprev) bad.push_back(tag("startup definition", gen.id, t));
      if (v > u) bad.push_back(tag("startup/status link", gen.id, t));
      if (t + 1 < nt && sol.v[sol.gt(gi, t + 1)] > 1 - u)
        bad.push_back(tag("startup after on period", gen.id, t));
      // minimum up: a startup at t keeps the unit on through t+UT-1
      if (v == 1) {
        for (int s = t; s < std::min(nt, t + gen.min_up); ++s)
          if (sol.u[sol.gt(gi, s)] != 1) {
            bad.push_back(tag("minimum up time", gen.id, t));
            break;
          }
      }
      // minimum down: a shutdown at t keeps the unit off through t+DT-1
      if (uprev == 1 && u == 0) {
        for (int s = t; s < std::min(nt, t + gen.min_down); ++s)
          if (sol.u[sol.gt(gi, s)] != 0) {
            bad.push_back(tag("minimum down time", gen.id, t));
            break;
          }
      }
    }
  }
  if (check_reserve && inst.reserve_policy) {
    for (int t = 0; t < nt; ++t) {
      double rsum = 0.0;
      for (int gi = 0; gi < ng; ++gi) rsum += sol.r[sol.gt(gi, t)];
      for (int gi = 0; gi < ng; ++gi) {
        if (rsum + ptol < sol.p[sol.gt(gi, t)] + sol.r[sol.gt(gi, t)]) {
          bad.push_back(tag("reserve adequacy", g.generators[gi].id, t));
        }
      }
    }
  }
  // largest-unit encoding consistency on encoded periods
  if (!sol.mu.empty()) {
    for (int t = 0; t < nt; ++t) {
      double msum = 0.0;
      bool encoded = false;
      for (int gi = 0; gi < ng; ++gi)
        if (sol.mu[sol.gt(gi, t)] >= 0.5) { encoded = true; }
      for (int gi = 0; gi < ng; ++gi) msum += sol.mu[sol.gt(gi, t)];
      if (!encoded && msum < 0.5) continue;
      if (std::abs(msum - 1.0) > 1e-6)
        bad.push_back("largest-unit indicator sum differs from one at hour " +
                      std::to_string(t + 1));
      double rho_sum = 0.0, pmax_committed = 0.0;
      for (int gi = 0; gi < ng; ++gi) {
        rho_sum += sol.rho[sol.gt(gi, t)];
        pmax_committed = std::max(pmax_committed, sol.p[sol.gt(gi, t)]);
      }
      if (std::abs(rho_sum - pmax_committed) > ptol)
        bad.push_back("largest-unit value differs from the dispatch maximum at hour " +
                      std::to_string(t + 1));
    }
  }
  return bad;
}

inline UcSolution solve_and_extract(const UcModel& ucm, const UcInstance& inst,
                                    const milp::SolverOptions& opts) {
  milp::Solution raw = milp::solve_milp(ucm.model, opts);
  UcSolution sol;
  sol.status = raw.status;
  sol.ng = ucm.vars.ng;
  sol.nt = ucm.vars.nt;
  sol.objective = raw.objective;
  sol.best_bound = raw.best_bound;
  sol.nodes = raw.node_count;
  sol.wall_time_s = raw.wall_time_s;
  if (raw.status != milp::Status::Optimal && raw.status != milp::Status::LimitReached)
    return sol;
  if (raw.values.empty()) return sol;
  const UcVars& vars = ucm.vars;
  const int ng = vars.ng, nt = vars.nt;
  sol.u.resize(size_t(ng) * nt);
  sol.v.resize(size_t(ng) * nt);
  sol.p.resize(size_t(ng) * nt);
  sol.r.resize(size_t(ng) * nt);
  for (int gi = 0; gi < ng; ++gi)
    for (int t = 0; t < nt; ++t) {
      sol.u[sol.gt(gi, t)] = int(std::lround(raw.values[vars.u[vars.gt(gi, t)]]));
      sol.v[sol.gt(gi, t)] = int(std::lround(raw.values[vars.v[vars.gt(gi, t)]]));
      sol.p[sol.gt(gi, t)] = raw.values[vars.p[vars.gt(gi, t)]];
      sol.r[sol.gt(gi, t)] = raw.values[vars.r[vars.gt(gi, t)]];
    }
  sol.flow.resize(vars.flow.size());
  for (size_t i = 0; i < vars.flow.size(); ++i) sol.flow[i] = raw.values[vars.flow[i]];
  sol.theta.resize(vars.theta.size());
  for (size_t i = 0; i < vars.theta.size(); ++i) sol.theta[i] = raw.values[vars.theta[i]];
  if (!vars.mu.empty()) {
    sol.mu.assign(size_t(ng) * nt, 0.0);
    sol.rho.assign(size_t(ng) * nt, 0.0);
    for (int gi = 0; gi < ng; ++gi)
      for (int t = 0; t < nt; ++t) {
        const int mv = vars.mu[vars.gt(gi, t)];
        if (mv >= 0) {
          sol.mu[sol.gt(gi, t)] = std::round(raw.values[mv]);
          sol.rho[sol.gt(gi, t)] = raw.values[vars.rho[vars.gt(gi, t)]];
        }
      }
  }
  std::vector<std::string> bad = verify_uc_solution(inst, sol);
  if (!bad.empty())
    throw std::runtime_error("solve_and_extract: schedule failed verification: " + bad[0]);
  return sol;
}

inline void save_schedule(const UcInstance& inst, const UcSolution& sol,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_schedule: cannot open " + path);
  out << "gen,period,u,v,p_mw,r_mw\n";
  char buf[128];
  for (int gi = 0; gi < sol.ng; ++gi)
    for (int t = 0; t < sol.nt; ++t) {
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.8g,%.8g\n",
                    inst.grid.generators[gi].id, t + 1, sol.u[sol.gt(gi, t)],
                    sol.v[sol.gt(gi, t)], sol.p[sol.gt(gi, t)], sol.r[sol.gt(gi, t)]);
      out << buf;
    }
}

inline UcSolution load_schedule(const UcInstance& inst, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_schedule: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "gen,period,u,v,p_mw,r_mw")
    throw std::runtime_error("load_schedule: bad header '" + header + "'");
  UcSolution sol;
  sol.ng = inst.grid.num_generators();
  sol.nt = inst.scenario.num_periods;
  sol.status = milp::Status::Optimal;
  sol.u.assign(size_t(sol.ng) * sol.nt, 0);
  sol.v.assign(size_t(sol.ng) * sol.nt, 0);
  sol.p.assign(size_t(sol.ng) * sol.nt, 0.0);
  sol.r.assign(size_t(sol.ng) * sol.nt, 0.0);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    int gid, period, u, v;
    double p, r;
    char c;
    if (!(ss >> gid >> c >> period >> c >> u >> c >> v >> c >> p >> c >> r))
      throw std::runtime_error("load_schedule: bad row '" + line + "'");
    int gi = -1;
    for (int i = 0; i < sol.ng; ++i)
      if (inst.grid.generators[i].id == gid) gi = i;
    if (gi < 0 || period < 1 || period > sol.nt)
      throw std::runtime_error("load_schedule: schedule does not match the grid");
    sol.u[sol.gt(gi, period - 1)] = u;
    sol.v[sol.gt(gi, period - 1)] = v;
    sol.p[sol.gt(gi, period - 1)] = p;
    sol.r[sol.gt(gi, period - 1)] = r;
  }
  return sol;
}

}  // namespace fcuc
