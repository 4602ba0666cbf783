#pragma once

// Bounded-variable revised simplex over [A | I] with an explicitly maintained
// dense basis inverse. Primal path: composite phase 1 (infeasibility sum)
// followed by phase 2. Dual path: re-optimization after bound changes, which
// is what branch-and-bound uses between nodes. Pricing is Dantzig with
// lowest-index tie breaks; Bland's rule engages after a run of degenerate
// steps and disengages on progress.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fcuc/milp.hpp"

namespace fcuc::milp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit, Numerical };

class SimplexSolver {
 public:
  struct Config {
    double feas_tol = 1e-7;
    double opt_tol = 1e-7;
    double pivot_tol = 1e-8;
    long iter_limit = 2000000;
    long bland_threshold = 2000;
    int recompute_every = 100;
  };

  explicit SimplexSolver(const Model& model) { build(model); }
  SimplexSolver(const Model& model, const Config& cfg) : cfg_(cfg) { build(model); }

  int num_rows() const { return m_; }
  int num_structural() const { return n_; }
  long iterations() const { return total_iters_; }

  double value(int var) const {
    switch (stat_[var]) {
      case kBasic: return xb_[pos_[var]];
      case kAtLower: return lo_[var];
      case kAtUpper: return up_[var];
      default: return 0.0;
    }
  }

  double objective() const {
    double v = 0.0;
    for (int j = 0; j < n_; ++j)
      if (cost_[j] != 0.0) v += cost_[j] * value(j);
    return v;
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_);
    for (int j = 0; j < n_; ++j) x[j] = value(j);
    return x;
  }

  void set_var_bounds(int var, double lo, double hi) {
    lo_[var] = lo;
    up_[var] = hi;
    if (stat_[var] != kBasic) refresh_nonbasic_status(var);
  }

  double var_lo(int var) const { return lo_[var]; }
  double var_hi(int var) const { return up_[var]; }

  // Cold start from the all-slack basis. When every structural cost sign is
  // compatible with its start bound (always true for nonnegative-cost
  // models) the slack basis is dual feasible and the dual path is taken;
  // otherwise composite phase 1 plus primal phase 2.
  LpStatus solve_from_scratch() {
    reset_to_slack_basis();
    bool dual_ok = true;
    for (int j = 0; j < n_ && dual_ok; ++j) {
      switch (stat_[j]) {
        case kAtLower: dual_ok = cost_[j] >= -cfg_.opt_tol; break;
        case kAtUpper: dual_ok = cost_[j] <= cfg_.opt_tol; break;
        case kFreeNb: dual_ok = std::abs(cost_[j]) <= cfg_.opt_tol; break;
        default: break;
      }
    }
    if (dual_ok) {
      LpStatus st = dual_loop();
      if (st == LpStatus::Optimal) return finish_optimal();
      if (st == LpStatus::Infeasible) return st;
      reset_to_slack_basis();  // fall back to the primal path
    }
    return primal_solve();
  }

  // Keeps the current basis. Nonbasic statuses are re-sided from current
  // reduced costs so the start is dual feasible after arbitrary bound changes.
  LpStatus resolve_dual() {
    if (!basis_valid_) return solve_from_scratch();
    align_nonbasic_statuses();
    align_dual_sides();
    recompute_xb();
    LpStatus st = dual_loop();
    if (st == LpStatus::Optimal) st = finish_optimal();
    return st;
  }

  // Iteration-capped dual re-optimization used for branching probes. The
  // objective afterwards is an estimate, not a certified bound.
  LpStatus resolve_dual_capped(long cap) {
    if (!basis_valid_) return solve_from_scratch();
    align_nonbasic_statuses();
    align_dual_sides();
    recompute_xb();
    return dual_loop(cap);
  }

  // Primal path on the current basis (phase 1 if needed, then phase 2).
  LpStatus primal_solve() {
    align_nonbasic_statuses();
    recompute_xb();
    if (!primal_feasible()) {
      LpStatus st = phase1_loop();
      if (st != LpStatus::Optimal) return st;
    }
    LpStatus st = phase2_loop();
    if (st == LpStatus::Optimal) st = finish_optimal();
    return st;
  }

 private:
  static constexpr int8_t kBasic = 0;
  static constexpr int8_t kAtLower = 1;
  static constexpr int8_t kAtUpper = 2;
  static constexpr int8_t kFreeNb = 3;

  Config cfg_{};
  int m_ = 0;   // rows
  int n_ = 0;   // structural columns; slack j = n_ + row
  int nn_ = 0;  // n_ + m_

  // structural columns, CSC
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<double> cost_;     // structural only, slacks cost 0
  std::vector<double> lo_, up_;  // size nn_
  std::vector<double> rhs_;      // size m_

  std::vector<int> basic_;    // row -> var
  std::vector<int> pos_;      // var -> row or -1
  std::vector<int8_t> stat_;  // var status
  std::vector<double> binv_;  // m_*m_ row-major
  std::vector<double> xb_;    // basic values
  bool basis_valid_ = false;

  std::vector<double> work_w_, work_y_, work_r_, work_d_, work_cb_, work_w2_;
  std::vector<int> prow_support_;
  long total_iters_ = 0;
  long degen_run_ = 0;
  bool bland_ = false;

  void build(const Model& model) {
    m_ = model.num_constraints();
    n_ = model.num_variables();
    nn_ = n_ + m_;
    std::vector<int> counts(n_, 0);
    for (int i = 0; i < m_; ++i)
      for (const Term& t : model.constraint(i).terms) ++counts[t.var];
    col_start_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + counts[j];
    col_row_.resize(col_start_[n_]);
    col_val_.resize(col_start_[n_]);
    std::vector<int> fill = col_start_;
    for (int i = 0; i < m_; ++i) {
      for (const Term& t : model.constraint(i).terms) {
        col_row_[fill[t.var]] = i;
        col_val_[fill[t.var]] = t.coef;
        ++fill[t.var];
      }
    }
    cost_.resize(n_);
    for (int j = 0; j < n_; ++j) cost_[j] = model.objective_coef(j);
    lo_.resize(nn_);
    up_.resize(nn_);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = model.variable(j).lo;
      up_[j] = model.variable(j).hi;
    }
    rhs_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const Constraint& c = model.constraint(i);
      rhs_[i] = c.rhs;
      const int s = n_ + i;
      switch (c.sense) {
        case Sense::LessEq: lo_[s] = 0.0; up_[s] = kInf; break;
        case Sense::GreaterEq: lo_[s] = -kInf; up_[s] = 0.0; break;
        case Sense::Equal: lo_[s] = 0.0; up_[s] = 0.0; break;
      }
    }
    stat_.assign(nn_, kAtLower);
    pos_.assign(nn_, -1);
    basic_.assign(m_, -1);
    xb_.assign(m_, 0.0);
    work_w_.resize(m_);
    work_y_.resize(m_);
    work_r_.resize(m_);
    work_d_.resize(nn_);
    work_cb_.resize(m_);
    work_w2_.resize(m_);
    basis_valid_ = false;
  }

  double bound_tol(int var) const {
    double s = 0.0;
    if (std::isfinite(lo_[var])) s = std::max(s, std::abs(lo_[var]));
    if (std::isfinite(up_[var])) s = std::max(s, std::abs(up_[var]));
    return cfg_.feas_tol * (1.0 + s);
  }

  void refresh_nonbasic_status(int var) {
    const double lo = lo_[var], up = up_[var];
    if (lo == up) { stat_[var] = kAtLower; return; }
    switch (stat_[var]) {
      case kAtLower:
        if (!std::isfinite(lo)) stat_[var] = std::isfinite(up) ? kAtUpper : kFreeNb;
        break;
      case kAtUpper:
        if (!std::isfinite(up)) stat_[var] = std::isfinite(lo) ? kAtLower : kFreeNb;
        break;
      case kFreeNb:
        if (std::isfinite(lo)) stat_[var] = kAtLower;
        else if (std::isfinite(up)) stat_[var] = kAtUpper;
        break;
      default: break;
    }
  }

  void align_nonbasic_statuses() {
    for (int j = 0; j < nn_; ++j)
      if (stat_[j] != kBasic) refresh_nonbasic_status(j);
  }

  // Flip each nonbasic to the side its reduced cost makes dual feasible.
  void align_dual_sides() {
    compute_reduced_costs();
    for (int j = 0; j < nn_; ++j) {
      if (stat_[j] == kBasic || stat_[j] == kFreeNb) continue;
      if (lo_[j] == up_[j]) continue;
      if (work_d_[j] > cfg_.opt_tol) {
        if (std::isfinite(lo_[j])) stat_[j] = kAtLower;
      } else if (work_d_[j] < -cfg_.opt_tol) {
        if (std::isfinite(up_[j])) stat_[j] = kAtUpper;
      }
    }
  }

  void reset_to_slack_basis() {
    std::fill(pos_.begin(), pos_.end(), -1);
    for (int j = 0; j < n_; ++j) {
      if (lo_[j] == up_[j]) stat_[j] = kAtLower;
      else if (std::isfinite(lo_[j]) && (cost_[j] >= 0.0 || !std::isfinite(up_[j])))
        stat_[j] = kAtLower;
      else if (std::isfinite(up_[j])) stat_[j] = kAtUpper;
      else if (std::isfinite(lo_[j])) stat_[j] = kAtLower;
      else stat_[j] = kFreeNb;
    }
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const int s = n_ + i;
      basic_[i] = s;
      stat_[s] = kBasic;
      pos_[s] = i;
      binv_[static_cast<size_t>(i) * m_ + i] = 1.0;
    }
    basis_valid_ = true;
    bland_ = false;
    degen_run_ = 0;
    recompute_xb();
  }

  double nb_value(int var) const {
    switch (stat_[var]) {
      case kAtLower: return lo_[var];
      case kAtUpper: return up_[var];
      default: return 0.0;
    }
  }

  // xb = binv * (rhs - sum over nonbasic j of A_j x_j)
  void recompute_xb() {
    work_r_ = rhs_;
    for (int j = 0; j < n_; ++j) {
      if (stat_[j] == kBasic) continue;
      const double v = nb_value(j);
      if (v == 0.0) continue;
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
        work_r_[col_row_[k]] -= col_val_[k] * v;
    }
    for (int i = 0; i < m_; ++i) {
      const int s = n_ + i;
      if (stat_[s] != kBasic) {
        const double v = nb_value(s);
        if (v != 0.0) work_r_[i] -= v;
      }
    }
    for (int i = 0; i < m_; ++i) {
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      double acc = 0.0;
      for (int k = 0; k < m_; ++k) acc += row[k] * work_r_[k];
      xb_[i] = acc;
    }
  }

  // w = binv * A_q
  void ftran(int q, std::vector<double>& w) const {
    if (q >= n_) {
      const int r = q - n_;
      for (int i = 0; i < m_; ++i) w[i] = binv_[static_cast<size_t>(i) * m_ + r];
      return;
    }
    const int k0 = col_start_[q], k1 = col_start_[q + 1];
    for (int i = 0; i < m_; ++i) {
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      double acc = 0.0;
      for (int k = k0; k < k1; ++k) acc += row[col_row_[k]] * col_val_[k];
      w[i] = acc;
    }
  }

  // y = (row weights)' * binv
  void btran_rows(const std::vector<double>& row_weight, std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
      const double wgt = row_weight[i];
      if (wgt == 0.0) continue;
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) y[k] += wgt * row[k];
    }
  }

  double dot_col(int j, const std::vector<double>& y) const {
    if (j >= n_) return y[j - n_];
    double acc = 0.0;
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
      acc += y[col_row_[k]] * col_val_[k];
    return acc;
  }

  void compute_reduced_costs() {
    for (int i = 0; i < m_; ++i) {
      const int v = basic_[i];
      work_cb_[i] = (v < n_) ? cost_[v] : 0.0;
    }
    btran_rows(work_cb_, work_y_);
    for (int j = 0; j < nn_; ++j) {
      if (stat_[j] == kBasic) { work_d_[j] = 0.0; continue; }
      const double cj = (j < n_) ? cost_[j] : 0.0;
      work_d_[j] = cj - dot_col(j, work_y_);
    }
  }

  // Gauss-Jordan update of binv for entering column w, pivot row r. The
  // pivot row keeps an explicit support list: early in a solve binv is close
  // to the identity and the row is mostly zeros, so the rank-1 update only
  // touches the live columns.
  void update_binv(int r, const std::vector<double>& w) {
    double* prow = &binv_[static_cast<size_t>(r) * m_];
    const double inv_alpha = 1.0 / w[r];
    prow_support_.clear();
    for (int k = 0; k < m_; ++k) {
      prow[k] *= inv_alpha;
      if (prow[k] != 0.0) prow_support_.push_back(k);
    }
    const bool sparse_row = prow_support_.size() * 3 < static_cast<size_t>(m_);
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = w[i];
      if (std::abs(f) <= 1e-14) continue;
      double* row = &binv_[static_cast<size_t>(i) * m_];
      if (sparse_row) {
        for (int k : prow_support_) row[k] -= f * prow[k];
      } else {
        for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
      }
    }
  }

  bool primal_feasible() const {
    for (int i = 0; i < m_; ++i) {
      const int v = basic_[i];
      const double t = bound_tol(v);
      if (xb_[i] < lo_[v] - t || xb_[i] > up_[v] + t) return false;
    }
    return true;
  }

  void note_step(double t) {
    ++total_iters_;
    if (t <= cfg_.feas_tol) {
      if (++degen_run_ > cfg_.bland_threshold) bland_ = true;
    } else {
      degen_run_ = 0;
      bland_ = false;
    }
  }

  struct Entering {
    int var = -1;
    int dir = 0;  // +1 increase, -1 decrease
  };

  Entering pick_entering(const std::vector<double>& d) const {
    Entering best;
    double best_viol = 0.0;
    for (int j = 0; j < nn_; ++j) {
      const int8_t st = stat_[j];
      if (st == kBasic || lo_[j] == up_[j]) continue;
      const double tol = cfg_.opt_tol * (1.0 + std::abs(j < n_ ? cost_[j] : 0.0));
      double viol = 0.0;
      int dir = 0;
      if (st == kAtLower) {
        if (d[j] < -tol) { viol = -d[j]; dir = +1; }
      } else if (st == kAtUpper) {
        if (d[j] > tol) { viol = d[j]; dir = -1; }
      } else {
        if (d[j] < -tol) { viol = -d[j]; dir = +1; }
        else if (d[j] > tol) { viol = d[j]; dir = -1; }
      }
      if (dir == 0) continue;
      if (bland_) return {j, dir};
      if (viol > best_viol * (1.0 + 1e-12)) {
        best_viol = viol;
        best = {j, dir};
      }
    }
    return best;
  }

  struct Ratio {
    double t = kInf;
    int row = -1;  // -1: entering flips to its opposite bound
    int hit = 0;   // +1 leaving hits upper, -1 lower
  };

  Ratio primal_ratio(int q, int dir, const std::vector<double>& w, bool phase1,
                     const std::vector<int8_t>& viol_sign) const {
    Ratio r;
    const double span = up_[q] - lo_[q];
    r.t = std::isfinite(span) ? span : kInf;
    double best_pivot = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double delta = dir * w[i];  // xb_[i] moves at rate -delta
      if (std::abs(delta) <= cfg_.pivot_tol) continue;
      const int v = basic_[i];
      const double tol = bound_tol(v);
      double ti;
      int hit;
      const int8_t g = phase1 ? viol_sign[i] : int8_t(0);
      if (g == 0) {
        if (delta > 0) {
          if (!std::isfinite(lo_[v])) continue;
          ti = (xb_[i] - lo_[v] + tol) / delta;
          hit = -1;
        } else {
          if (!std::isfinite(up_[v])) continue;
          ti = (up_[v] - xb_[i] + tol) / (-delta);
          hit = +1;
        }
      } else if (g > 0) {  // above its upper bound, breakpoint when it returns
        if (delta <= 0) continue;
        ti = (xb_[i] - up_[v]) / delta;
        hit = +1;
      } else {  // below its lower bound
        if (delta >= 0) continue;
        ti = (lo_[v] - xb_[i]) / (-delta);
        hit = -1;
      }
      if (ti < 0) ti = 0;
      const double apiv = std::abs(w[i]);
      if (ti < r.t - 1e-10 || (r.row >= 0 && ti < r.t + 1e-10 && apiv > best_pivot)) {
        r.t = ti;
        r.row = i;
        r.hit = hit;
        best_pivot = apiv;
      }
    }
    return r;
  }

  void apply_pivot(int q, int dir, double t, int leave_row, int hit,
                   const std::vector<double>& w) {
    for (int i = 0; i < m_; ++i) xb_[i] -= dir * w[i] * t;
    if (leave_row < 0) {
      stat_[q] = (stat_[q] == kAtLower) ? kAtUpper : kAtLower;
      return;
    }
    const int leaving = basic_[leave_row];
    const double enter_val = nb_value(q) + dir * t;
    stat_[leaving] = (hit > 0) ? kAtUpper : kAtLower;
    if (lo_[leaving] == up_[leaving]) stat_[leaving] = kAtLower;
    pos_[leaving] = -1;
    update_binv(leave_row, w);
    basic_[leave_row] = q;
    stat_[q] = kBasic;
    pos_[q] = leave_row;
    xb_[leave_row] = enter_val;
  }

  LpStatus phase1_loop() {
    std::vector<int8_t> gsign(m_, 0);
    std::vector<double> gw(m_, 0.0);
    long it = 0;
    int since_recompute = 0;
    while (true) {
      if (++it > cfg_.iter_limit) return LpStatus::IterLimit;
      if (++since_recompute >= cfg_.recompute_every) {
        recompute_xb();
        since_recompute = 0;
      }
      bool any = false;
      std::fill(gw.begin(), gw.end(), 0.0);
      for (int i = 0; i < m_; ++i) {
        const int v = basic_[i];
        const double tol = bound_tol(v);
        if (xb_[i] > up_[v] + tol) { gsign[i] = +1; gw[i] = 1.0; any = true; }
        else if (xb_[i] < lo_[v] - tol) { gsign[i] = -1; gw[i] = -1.0; any = true; }
        else gsign[i] = 0;
      }
      if (!any) return LpStatus::Optimal;
      btran_rows(gw, work_y_);
      for (int j = 0; j < nn_; ++j)
        work_d_[j] = (stat_[j] == kBasic) ? 0.0 : -dot_col(j, work_y_);
      Entering e = pick_entering(work_d_);
      if (e.var < 0) return LpStatus::Infeasible;  // phase-1 optimum > 0
      ftran(e.var, work_w_);
      Ratio r = primal_ratio(e.var, e.dir, work_w_, true, gsign);
      if (!std::isfinite(r.t)) return LpStatus::Numerical;
      apply_pivot(e.var, e.dir, r.t, r.row, r.hit, work_w_);
      note_step(r.t);
    }
  }

  LpStatus phase2_loop() {
    const std::vector<int8_t> no_viol(m_, 0);
    long it = 0;
    int since_recompute = 0;
    while (true) {
      if (++it > cfg_.iter_limit) return LpStatus::IterLimit;
      if (++since_recompute >= cfg_.recompute_every) {
        recompute_xb();
        since_recompute = 0;
      }
      compute_reduced_costs();
      Entering e = pick_entering(work_d_);
      if (e.var < 0) return LpStatus::Optimal;
      ftran(e.var, work_w_);
      Ratio r = primal_ratio(e.var, e.dir, work_w_, false, no_viol);
      if (!std::isfinite(r.t)) return LpStatus::Unbounded;
      apply_pivot(e.var, e.dir, r.t, r.row, r.hit, work_w_);
      note_step(r.t);
    }
  }

  LpStatus dual_loop(long cap = -1) {
    std::vector<double> erow(m_, 0.0);
    std::vector<double> alpha(nn_, 0.0);
    bool d_valid = false;
    long it = 0;
    int since_recompute = 0;
    while (true) {
      if (++it > cfg_.iter_limit || (cap >= 0 && it > cap)) return LpStatus::IterLimit;
      if (++since_recompute >= cfg_.recompute_every) {
        recompute_xb();
        d_valid = false;
        since_recompute = 0;
      }
      // leaving: worst bound violation among basics
      int lrow = -1, lvar = -1;
      double worst = 0.0;
      bool need_increase = false;
      for (int i = 0; i < m_; ++i) {
        const int v = basic_[i];
        const double tol = bound_tol(v);
        double viol = 0.0;
        bool inc = false;
        if (xb_[i] < lo_[v] - tol) { viol = lo_[v] - xb_[i]; inc = true; }
        else if (xb_[i] > up_[v] + tol) { viol = xb_[i] - up_[v]; inc = false; }
        if (viol > worst * (1.0 + 1e-12)) {
          worst = viol;
          lrow = i;
          lvar = v;
          need_increase = inc;
        }
      }
      if (lrow < 0) return LpStatus::Optimal;
      if (!d_valid) {
        compute_reduced_costs();
        d_valid = true;
      }
      const double* br = &binv_[static_cast<size_t>(lrow) * m_];
      std::copy(br, br + m_, erow.begin());
      for (int j = 0; j < nn_; ++j)
        alpha[j] = (stat_[j] == kBasic) ? 0.0 : dot_col(j, erow);
      // bound-flipping ratio test: walk breakpoints in ratio order, flipping
      // boxed nonbasics across their span while the dual slope stays
      // positive; the first unflippable breakpoint enters the basis.
      struct Cand {
        int j;
        int dir;
        double ratio;
        double abs_a;
      };
      std::vector<Cand> cands;
      for (int j = 0; j < nn_; ++j) {
        const int8_t st = stat_[j];
        if (st == kBasic || lo_[j] == up_[j]) continue;
        const double a = alpha[j];
        if (std::abs(a) <= cfg_.pivot_tol) continue;
        int dir = 0;
        if (st == kAtLower || st == kFreeNb) {
          if ((need_increase && a < 0) || (!need_increase && a > 0)) dir = +1;
        }
        if (dir == 0 && (st == kAtUpper || st == kFreeNb)) {
          if ((need_increase && a > 0) || (!need_increase && a < 0)) dir = -1;
        }
        if (dir == 0) continue;
        cands.push_back({j, dir, std::abs(work_d_[j]) / std::abs(a), std::abs(a)});
      }
      if (cands.empty()) return LpStatus::Infeasible;  // dual unbounded
      std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.ratio != b.ratio) return a.ratio < b.ratio;
        if (a.abs_a != b.abs_a) return a.abs_a > b.abs_a;
        return a.j < b.j;
      });
      int q = -1, qdir = 0;
      double slope = worst;
      std::vector<std::pair<int, int>> flips;
      for (const Cand& c : cands) {
        const double span = up_[c.j] - lo_[c.j];
        const double gain = c.abs_a * span;
        if (std::isfinite(span) && slope - gain > cfg_.feas_tol) {
          flips.push_back({c.j, c.dir});
          slope -= gain;
          continue;
        }
        q = c.j;
        qdir = c.dir;
        break;
      }
      if (q < 0) return LpStatus::Infeasible;  // every breakpoint flipped away
      for (const auto& [fj, fdir] : flips) {
        ftran(fj, work_w2_);
        const double delta = fdir * (up_[fj] - lo_[fj]);
        for (int i = 0; i < m_; ++i) xb_[i] -= work_w2_[i] * delta;
        stat_[fj] = fdir > 0 ? kAtUpper : kAtLower;
      }
      ftran(q, work_w_);
      const double wr = work_w_[lrow];
      if (std::abs(wr) <= cfg_.pivot_tol) return LpStatus::Numerical;
      const double target = need_increase ? lo_[lvar] : up_[lvar];
      double t = (xb_[lrow] - target) / (qdir * wr);
      if (t < 0) t = 0;
      const double theta = work_d_[q] / alpha[q];  // signed dual step
      apply_pivot(q, qdir, t, lrow, need_increase ? -1 : +1, work_w_);
      // maintain reduced costs across the pivot
      for (int j = 0; j < nn_; ++j) {
        if (stat_[j] == kBasic) work_d_[j] = 0.0;
        else if (alpha[j] != 0.0) work_d_[j] -= theta * alpha[j];
      }
      work_d_[lvar] = -theta;  // the leaving column pivots to a unit vector
      note_step(t);
    }
  }

  // One step of iterative refinement on the basic values: push the exact
  // row residual (computed from the sparse data) back through the inverse.
  void refine_xb() {
    work_r_ = rhs_;
    for (int j = 0; j < n_; ++j) {
      const double v = value(j);
      if (v == 0.0) continue;
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
        work_r_[col_row_[k]] -= col_val_[k] * v;
    }
    for (int i = 0; i < m_; ++i) work_r_[i] -= value(n_ + i);
    for (int i = 0; i < m_; ++i) {
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      double acc = 0.0;
      for (int k = 0; k < m_; ++k) acc += row[k] * work_r_[k];
      xb_[i] += acc;
    }
  }

  // Optimality is only claimed once both sides verify on recomputed values:
  // basics inside their bounds and no attractive entering candidate. Any
  // residual violation goes back through the corresponding simplex loop.
  LpStatus finish_optimal() {
    for (int round = 0; round < 5; ++round) {
      recompute_xb();
      refine_xb();
      if (!primal_feasible()) {
        LpStatus st = dual_loop();
        if (st != LpStatus::Optimal) return st;
        continue;
      }
      compute_reduced_costs();
      if (pick_entering(work_d_).var >= 0) {
        LpStatus st = phase2_loop();
        if (st != LpStatus::Optimal) return st;
        continue;
      }
      return LpStatus::Optimal;
    }
    return LpStatus::Numerical;
  }
};

}  // namespace fcuc::milp
