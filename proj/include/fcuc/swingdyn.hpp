#pragma once

// Network-reduced swing-equation dynamics. This is the labeling oracle:
// Laplacian construction, Kron reduction of passive buses, fixed-step RK4
// integration of the post-contingency response, frequency metrics over a
// sliding window, and the damped modal expansion for analytic RoCoF.
//
// Conventions: angles in electrical radians, speeds in per unit on the
// synchronous speed, powers in per unit on the system base. The per-bus
// inertia coefficient m_i = 2 H S_B / S_base carries seconds. Reported
// frequency quantities are magnitudes in Hz and Hz/s.

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcuc/grid.hpp"

namespace fcuc {

struct DynamicsParams {
  double gamma_damp = 0.5;     // d_i / m_i, 1/s
  double step_s = 0.001;
  double horizon_s = 10.0;
  double rocof_window_s = 0.1;
  double measure_time_s = 0.0;
};

struct KronResult {
  Eigen::MatrixXd laplacian;      // Schur complement on the kept buses
  Eigen::MatrixXd injection_map;  // kept x eliminated; P_red = P_kept + map * P_elim
};

struct ReducedNetwork {
  std::vector<int> gen_bus_index;  // indices into GridModel::buses
  Eigen::MatrixXd laplacian;       // pu
  Eigen::VectorXd inertia_s;       // m_i on S_base
  Eigen::VectorXd eigenvalues;     // of the reduced Laplacian
  Eigen::MatrixXd eigenvectors;    // orthonormal columns
  double mean_inertia_s = 0.0;
};

struct FrequencyTrace {
  std::vector<double> time_s;
  std::vector<int> bus_ids;                   // grid bus ids, row order
  std::vector<std::vector<double>> delta_f_hz;  // [bus][time]
  std::vector<std::vector<double>> rocof_hz_s;  // clamped sliding window, same length
  int tripped_gen = -1;
  double delta_p_mw = 0.0;
};

struct InertiaAggregate {
  double kinetic_mw_s = 0.0;        // E_sys = sum 2 H S_B over committed units
  std::vector<double> per_bus_m_s;  // 2 H S_B / S_base summed per bus
};

inline Eigen::MatrixXd build_laplacian(const GridModel& g) {
  if (!grid_connected(g)) throw std::runtime_error("build_laplacian: network is not connected");
  const int n = g.num_buses();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  const double v2 = g.voltage_pu * g.voltage_pu;
  for (const Line& l : g.lines) {
    const int a = g.bus_index(l.from), b = g.bus_index(l.to);
    const double w = l.susceptance * v2;
    L(a, b) -= w;
    L(b, a) -= w;
    L(a, a) += w;
    L(b, b) += w;
  }
  return L;
}

// Schur complement onto `keep`; the eliminated block must be invertible,
// which holds for any connected grid with at least one kept bus.
inline KronResult kron_reduce(const Eigen::MatrixXd& L, const std::vector<int>& keep) {
  const int n = static_cast<int>(L.rows());
  std::vector<char> is_kept(n, 0);
  for (int k : keep) is_kept[k] = 1;
  std::vector<int> elim;
  for (int i = 0; i < n; ++i)
    if (!is_kept[i]) elim.push_back(i);
  const int nk = static_cast<int>(keep.size());
  const int ne = static_cast<int>(elim.size());
  KronResult out;
  if (ne == 0) {
    out.laplacian.resize(nk, nk);
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nk; ++j) out.laplacian(i, j) = L(keep[i], keep[j]);
    out.injection_map.resize(nk, 0);
    return out;
  }
  Eigen::MatrixXd Lgg(nk, nk), Lgl(nk, ne), Lll(ne, ne);
  for (int i = 0; i < nk; ++i) {
    for (int j = 0; j < nk; ++j) Lgg(i, j) = L(keep[i], keep[j]);
    for (int j = 0; j < ne; ++j) Lgl(i, j) = L(keep[i], elim[j]);
  }
  for (int i = 0; i < ne; ++i)
    for (int j = 0; j < ne; ++j) Lll(i, j) = L(elim[i], elim[j]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Lll);
  if (!lu.isInvertible())
    throw std::runtime_error("kron_reduce: singular load-bus block");
  const Eigen::MatrixXd llinv_llg = lu.solve(Lgl.transpose());
  out.laplacian = Lgg - Lgl * llinv_llg;
  out.laplacian = 0.5 * (out.laplacian + out.laplacian.transpose());  // enforce symmetry
  out.injection_map = -Lgl * lu.inverse();
  return out;
}

inline InertiaAggregate aggregate_inertia(const GridModel& g,
                                          const std::vector<int>& commitment) {
  if (commitment.size() != g.generators.size())
    throw std::invalid_argument("aggregate_inertia: commitment length mismatch");
  InertiaAggregate out;
  out.per_bus_m_s.assign(g.num_buses(), 0.0);
  for (size_t i = 0; i < g.generators.size(); ++i) {
    if (!commitment[i]) continue;
    const Generator& gen = g.generators[i];
    const double e = 2.0 * gen.inertia_h * gen.rating_mva;
    out.kinetic_mw_s += e;
    out.per_bus_m_s[g.bus_index(gen.bus)] += e / g.s_base_mva;
  }
  return out;
}

// Initial frequency-decline rate of the uniform (single-bus) model,
// returned as a magnitude.
inline double uniform_rocof(double delta_p_mw, double kinetic_mw_s, double f_nom_hz) {
  if (kinetic_mw_s <= 0) throw std::invalid_argument("uniform_rocof: zero kinetic energy");
  return std::abs(delta_p_mw) * f_nom_hz / kinetic_mw_s;
}

// Reduced network for a given commitment: buses carrying committed inertia
// stay, everything else is Kron-eliminated.
inline ReducedNetwork build_reduced_network(const GridModel& g,
                                            const std::vector<int>& commitment) {
  const InertiaAggregate agg = aggregate_inertia(g, commitment);
  ReducedNetwork rn;
  for (int b = 0; b < g.num_buses(); ++b)
    if (agg.per_bus_m_s[b] > 0.0) rn.gen_bus_index.push_back(b);
  if (rn.gen_bus_index.empty())
    throw std::runtime_error("build_reduced_network: no committed inertia in the system");
  const Eigen::MatrixXd L = build_laplacian(g);
  rn.laplacian = kron_reduce(L, rn.gen_bus_index).laplacian;
  const int k = static_cast<int>(rn.gen_bus_index.size());
  rn.inertia_s.resize(k);
  for (int i = 0; i < k; ++i) rn.inertia_s(i) = agg.per_bus_m_s[rn.gen_bus_index[i]];
  rn.mean_inertia_s = rn.inertia_s.mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rn.laplacian);
  rn.eigenvalues = es.eigenvalues();
  rn.eigenvectors = es.eigenvectors();
  return rn;
}

// RK4 integration of M dw/dt = P - L theta - gamma M w, dtheta/dt = w_s w,
// from flat start. P is the injection deviation in pu on S_base.
inline FrequencyTrace simulate_swing(const Eigen::MatrixXd& L, const Eigen::VectorXd& m,
                                     const Eigen::VectorXd& p_pu, double gamma,
                                     double f_nom_hz, const DynamicsParams& p) {
  const int k = static_cast<int>(m.size());
  if (p.step_s <= 0 || p.horizon_s < p.rocof_window_s)
    throw std::invalid_argument("simulate_swing: bad integration parameters");
  for (int i = 0; i < k; ++i)
    if (m(i) <= 0) throw std::runtime_error("simulate_swing: zero-inertia bus in dynamic core");
  const double ws = 2.0 * M_PI * f_nom_hz;
  const int steps = static_cast<int>(std::llround(p.horizon_s / p.step_s));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
  FrequencyTrace tr;
  tr.time_s.resize(steps + 1);
  tr.delta_f_hz.assign(k, std::vector<double>(steps + 1, 0.0));

  auto deriv = [&](const Eigen::VectorXd& th, const Eigen::VectorXd& om,
                   Eigen::VectorXd& dth, Eigen::VectorXd& dom) {
    dth = ws * om;
    dom = (p_pu - L * th).cwiseQuotient(m) - gamma * om;
  };

  Eigen::VectorXd k1t(k), k1w(k), k2t(k), k2w(k), k3t(k), k3w(k), k4t(k), k4w(k);
  const double h = p.step_s;
  for (int s = 0; s <= steps; ++s) {
    tr.time_s[s] = s * h;
    for (int i = 0; i < k; ++i) tr.delta_f_hz[i][s] = f_nom_hz * w(i);
    if (s == steps) break;
    deriv(theta, w, k1t, k1w);
    deriv(theta + 0.5 * h * k1t, w + 0.5 * h * k1w, k2t, k2w);
    deriv(theta + 0.5 * h * k2t, w + 0.5 * h * k2w, k3t, k3w);
    deriv(theta + h * k3t, w + h * k3w, k4t, k4w);
    theta += (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
    w += (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
  }

  // clamped sliding-window RoCoF series, same length as the time grid
  const int wsteps = std::max(1, static_cast<int>(std::llround(p.rocof_window_s / h)));
  tr.rocof_hz_s.assign(k, std::vector<double>(steps + 1, 0.0));
  for (int i = 0; i < k; ++i) {
    for (int s = 0; s <= steps; ++s) {
      const int hi = std::min(s + wsteps, steps);
      const int lo = hi - wsteps;
      tr.rocof_hz_s[i][s] =
          (tr.delta_f_hz[i][hi] - tr.delta_f_hz[i][lo]) / (wsteps * h);
    }
  }
  return tr;
}

// Trip one committed generator at t=0: its injection becomes a step
// disturbance and its inertia leaves the system. Buses whose inertia drops
// to zero are eliminated together with the passive buses; the disturbance
// maps onto the remaining dynamic core through the Kron injection map.
inline FrequencyTrace simulate_outage(const GridModel& g,
                                      const std::vector<double>& dispatch_mw,
                                      const std::vector<int>& commitment, int outage_gen,
                                      const DynamicsParams& p) {
  if (dispatch_mw.size() != g.generators.size() ||
      commitment.size() != g.generators.size())
    throw std::invalid_argument("simulate_outage: dispatch/commitment length mismatch");
  int gidx = -1;
  for (size_t i = 0; i < g.generators.size(); ++i)
    if (g.generators[i].id == outage_gen) gidx = static_cast<int>(i);
  double dp_mw = 0.0;
  std::vector<int> post = commitment;
  if (gidx >= 0) {
    if (!commitment[gidx])
      throw std::invalid_argument("simulate_outage: outaged generator is not committed");
    dp_mw = dispatch_mw[gidx];
    post[gidx] = 0;
  }
  const InertiaAggregate agg = aggregate_inertia(g, post);
  std::vector<int> keep;
  for (int b = 0; b < g.num_buses(); ++b)
    if (agg.per_bus_m_s[b] > 0.0) keep.push_back(b);
  if (keep.empty())
    throw std::runtime_error("simulate_outage: no inertia remains after the trip");
  const Eigen::MatrixXd L = build_laplacian(g);
  const KronResult kr = kron_reduce(L, keep);
  const int k = static_cast<int>(keep.size());
  Eigen::VectorXd m(k);
  for (int i = 0; i < k; ++i) m(i) = agg.per_bus_m_s[keep[i]];

  // injection deviation: -dP at the tripped unit's bus, in pu
  Eigen::VectorXd p_pu = Eigen::VectorXd::Zero(k);
  if (gidx >= 0 && dp_mw != 0.0) {
    const int tb = g.bus_index(g.generators[gidx].bus);
    const double dp_pu = dp_mw / g.s_base_mva;
    bool kept = false;
    for (int i = 0; i < k; ++i)
      if (keep[i] == tb) {
        p_pu(i) -= dp_pu;
        kept = true;
      }
    if (!kept) {
      // bus was eliminated: route the step through the injection map
      std::vector<int> elim;
      for (int b = 0; b < g.num_buses(); ++b)
        if (std::find(keep.begin(), keep.end(), b) == keep.end()) elim.push_back(b);
      for (size_t e = 0; e < elim.size(); ++e)
        if (elim[e] == tb)
          for (int i = 0; i < k; ++i) p_pu(i) -= kr.injection_map(i, e) * dp_pu;
    }
  }

  FrequencyTrace tr = simulate_swing(kr.laplacian, m, p_pu, p.gamma_damp, g.f_nom_hz, p);
  tr.bus_ids.resize(k);
  for (int i = 0; i < k; ++i) tr.bus_ids[i] = g.buses[keep[i]].id;
  tr.tripped_gen = outage_gen;
  tr.delta_p_mw = dp_mw;
  return tr;
}

struct FrequencyMetrics {
  double delta_f_max_hz = 0.0;
  double rocof_max_hz_s = 0.0;
  int argmax_dev_bus = -1;
  int argmax_rocof_bus = -1;
};

inline FrequencyMetrics measure_metrics(const FrequencyTrace& tr, double window_s) {
  if (tr.delta_f_hz.empty() || tr.time_s.size() < 2)
    throw std::invalid_argument("measure_metrics: empty trace");
  const double h = tr.time_s[1] - tr.time_s[0];
  const int len = static_cast<int>(tr.time_s.size());
  const int wsteps = static_cast<int>(std::llround(window_s / h));
  if (wsteps < 1 || wsteps >= len)
    throw std::invalid_argument("measure_metrics: window does not fit the trace");
  FrequencyMetrics out;
  for (size_t i = 0; i < tr.delta_f_hz.size(); ++i) {
    const std::vector<double>& f = tr.delta_f_hz[i];
    for (int s = 0; s < len; ++s) {
      const double dev = std::abs(f[s]);
      if (dev > out.delta_f_max_hz) {
        out.delta_f_max_hz = dev;
        out.argmax_dev_bus = tr.bus_ids.empty() ? int(i) : tr.bus_ids[i];
      }
      if (s + wsteps < len) {
        const double r = std::abs(f[s + wsteps] - f[s]) / (wsteps * h);
        if (r > out.rocof_max_hz_s) {
          out.rocof_max_hz_s = r;
          out.argmax_rocof_bus = tr.bus_ids.empty() ? int(i) : tr.bus_ids[i];
        }
      }
    }
  }
  return out;
}

// Damped modal expansion of the reduced dynamics under the uniform-inertia
// approximation: per-bus window-averaged RoCoF magnitudes for a step loss of
// dp_pu at reduced bus `disturbance_bus`.
inline std::vector<double> analytic_rocof(const ReducedNetwork& rn, int disturbance_bus,
                                          double dp_pu, double f_nom_hz,
                                          const DynamicsParams& p) {
  const int k = static_cast<int>(rn.gen_bus_index.size());
  if (disturbance_bus < 0 || disturbance_bus >= k)
    throw std::invalid_argument("analytic_rocof: bad disturbance bus");
  const double m = rn.mean_inertia_s;
  const double ws = 2.0 * M_PI * f_nom_hz;
  const double g = p.gamma_damp;
  const double t0 = p.measure_time_s;
  const double t1 = t0 + p.rocof_window_s;
  const double lam_tol = 1e-9;

  // modal speed response: cdot_a(t) for a unit step forcing F_a
  auto cdot = [&](double lam, double F, double t) {
    if (lam <= lam_tol) {
      if (g <= 0) return F * t;
      return (F / g) * (1.0 - std::exp(-g * t));
    }
    const double w0sq = ws * lam / m;
    const double disc = w0sq - 0.25 * g * g;
    if (disc <= 0)
      throw std::runtime_error("analytic_rocof: overdamped mode, expansion not valid");
    const double wd = std::sqrt(disc);
    return (F / wd) * std::exp(-0.5 * g * t) * std::sin(wd * t);
  };

  std::vector<double> out(k, 0.0);
  if (dp_pu == 0.0) return out;
  for (int i = 0; i < k; ++i) {
    double df_t0 = 0.0, df_t1 = 0.0;
    for (int a = 0; a < k; ++a) {
      const double beta_i = rn.eigenvectors(i, a);
      const double beta_b = rn.eigenvectors(disturbance_bus, a);
      const double F = -(ws / m) * dp_pu * beta_b;
      df_t0 += beta_i * cdot(rn.eigenvalues(a), F, t0);
      df_t1 += beta_i * cdot(rn.eigenvalues(a), F, t1);
    }
    // theta-dot in rad/s -> Hz
    df_t0 /= 2.0 * M_PI;
    df_t1 /= 2.0 * M_PI;
    out[i] = std::abs(df_t1 - df_t0) / p.rocof_window_s;
  }
  return out;
}

inline void save_trace(const FrequencyTrace& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_trace: cannot open " + path);
  out << "t_s,bus,delta_f_hz,rocof_hz_s\n";
  char buf[160];
  for (size_t i = 0; i < tr.delta_f_hz.size(); ++i) {
    const int bus = tr.bus_ids.empty() ? int(i) : tr.bus_ids[i];
    for (size_t s = 0; s < tr.time_s.size(); ++s) {
      std::snprintf(buf, sizeof buf, "%.4f,%d,%.8g,%.8g\n", tr.time_s[s], bus,
                    tr.delta_f_hz[i][s], tr.rocof_hz_s[i][s]);
      out << buf;
    }
  }
}

}  // namespace fcuc
