#pragma once

// Encodes a trained predictor into the unit-commitment MILP. Per constrained
// period the feature vector [u, rho, P] is wired straight onto existing UC
// variables (input scaling folded into the first affine layer), hidden
// neurons are dispatched by their preactivation bounds into fixed-zero /
// identity / exact big-M / triangle-relaxed modes, and the two head
// expressions are capped by the frequency limits. Pruned weights are skipped
// outright, so constraint nonzeros scale with the surviving weights.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcuc/milp.hpp"
#include "fcuc/predictor.hpp"
#include "fcuc/uc.hpp"

namespace fcuc {

enum class NeuronMode : std::uint8_t { Exact, Relaxed, FixedZero, Identity };

struct EmbeddingReport {
  int periods = 0;
  long exact_neurons = 0;
  long relaxed_neurons = 0;
  long fixed_zero_neurons = 0;
  long identity_neurons = 0;
  long binaries_added = 0;
  long nn_nonzeros = 0;
  long nn_constraints = 0;

  nlohmann::json to_json() const {
    return {{"periods", periods},
            {"exact_neurons", exact_neurons},
            {"relaxed_neurons", relaxed_neurons},
            {"fixed_zero_neurons", fixed_zero_neurons},
            {"identity_neurons", identity_neurons},
            {"binaries_added", binaries_added},
            {"nn_nonzeros", nn_nonzeros},
            {"nn_constraints", nn_constraints}};
  }
};

struct PeriodEmbedding {
  int period = -1;                        // 0-based
  std::vector<int> feature_vars;
  std::vector<std::vector<int>> zhat;     // -1 where the neuron has no zhat var
  std::vector<std::vector<int>> z;
  std::vector<std::vector<int>> relu_bin; // -1 unless exact
  int dev_row = -1, rcf_row = -1;
};

// Bound-driven mode dispatch; active neurons get the binary-free triangle.
inline std::vector<std::vector<NeuronMode>> assign_neuron_modes(
    const MlpPredictor& pred, bool relax_active) {
  if (pred.lb.size() != static_cast<size_t>(pred.num_hidden_layers()))
    throw std::logic_error("assign_neuron_modes: neuron bounds missing");
  std::vector<std::vector<NeuronMode>> modes;
  for (int q = 0; q < pred.num_hidden_layers(); ++q) {
    std::vector<NeuronMode> layer;
    for (int j = 0; j < pred.lb[q].size(); ++j) {
      const double lb = pred.lb[q](j), ub = pred.ub[q](j);
      if (ub <= 0.0) layer.push_back(NeuronMode::FixedZero);
      else if (lb >= 0.0) layer.push_back(NeuronMode::Identity);
      else if (relax_active && q < static_cast<int>(pred.active.size()) &&
               j < static_cast<int>(pred.active[q].size()) && pred.active[q][j])
        layer.push_back(NeuronMode::Relaxed);
      else
        layer.push_back(NeuronMode::Exact);
    }
    modes.push_back(std::move(layer));
  }
  return modes;
}

namespace detail {

inline long count_terms(const milp::Model& m, int row) {
  long nz = 0;
  for (const milp::Term& t : m.constraint(row).terms)
    if (t.coef != 0.0) ++nz;
  return nz;
}

}  // namespace detail

// Exact big-M ReLU: z <= zhat + A(1-a), z >= zhat, z <= A a, z >= 0 with a
// binary and A = max(UB, -LB).
inline std::vector<int> embed_exact_neuron(milp::Model& m, int zhat, int z, int a,
                                           double lb, double ub) {
  if (!(lb < 0.0 && ub > 0.0))
    throw std::logic_error("embed_exact_neuron: expected straddling bounds");
  const double A = std::max(ub, -lb);
  std::vector<int> rows;
  rows.push_back(m.add_constraint({{z, 1.0}, {zhat, -1.0}, {a, A}}, milp::Sense::LessEq, A));
  rows.push_back(m.add_constraint({{z, 1.0}, {zhat, -1.0}}, milp::Sense::GreaterEq, 0.0));
  rows.push_back(m.add_constraint({{z, 1.0}, {a, -A}}, milp::Sense::LessEq, 0.0));
  return rows;  // z >= 0 is the variable bound
}

// Binary-free triangle: z >= zhat, z >= 0, z below the chord.
inline std::vector<int> embed_relaxed_neuron(milp::Model& m, int zhat, int z, double lb,
                                             double ub) {
  if (!(lb < 0.0 && ub > 0.0))
    throw std::logic_error("embed_relaxed_neuron: expected LB < 0 < UB");
  std::vector<int> rows;
  rows.push_back(m.add_constraint({{z, 1.0}, {zhat, -1.0}}, milp::Sense::GreaterEq, 0.0));
  // (ub-lb) z - ub zhat <= -ub lb
  rows.push_back(m.add_constraint({{z, ub - lb}, {zhat, -ub}}, milp::Sense::LessEq,
                                  -ub * lb));
  return rows;
}

// Wires zhat equalities layer by layer over the given feature variables and
// applies the per-mode ReLU encodings. Input scaling is folded into the
// first affine layer, so features enter in raw units.
inline PeriodEmbedding embed_network(milp::Model& m, const MlpPredictor& pred,
                                     const std::vector<std::vector<NeuronMode>>& modes,
                                     const std::vector<int>& feature_vars, int period,
                                     EmbeddingReport& report) {
  if (static_cast<int>(feature_vars.size()) != pred.input_dim())
    throw std::invalid_argument("embed_network: feature dimension mismatch");
  if (modes.size() != static_cast<size_t>(pred.num_hidden_layers()))
    throw std::logic_error("embed_network: neuron mode assignment missing");
  PeriodEmbedding emb;
  emb.period = period;
  emb.feature_vars = feature_vars;
  const std::string ps = "_t" + std::to_string(period + 1);
  const int L = pred.num_hidden_layers();
  emb.zhat.resize(L);
  emb.z.resize(L);
  emb.relu_bin.resize(L);

  // previous-layer activation variables; -1 marks a fixed-zero neuron
  std::vector<int> prev = feature_vars;
  bool first_layer = true;
  for (int q = 0; q < L; ++q) {
    const Eigen::MatrixXd& W = pred.weights[q];
    const int out = static_cast<int>(W.cols());
    emb.zhat[q].assign(out, -1);
    emb.z[q].assign(out, -1);
    emb.relu_bin[q].assign(out, -1);
    for (int j = 0; j < out; ++j) {
      const double lb = pred.lb[q](j), ub = pred.ub[q](j);
      const NeuronMode mode = modes[q][j];
      const std::string ns = "_" + std::to_string(q + 1) + "_" + std::to_string(j) + ps;
      if (mode == NeuronMode::FixedZero) {
        ++report.fixed_zero_neurons;  // activation is identically zero: no variables
        continue;
      }
      const int zhat = m.add_variable(lb, ub, false, "zh" + ns);
      emb.zhat[q][j] = zhat;
      // affine definition: zhat - sum_i w_i prev_i = bias (scaling folded on
      // the first layer); pruned weights contribute nothing
      std::vector<milp::Term> terms{{zhat, 1.0}};
      double rhs;
      if (first_layer) {
        double b = pred.biases[q](j);
        for (int i = 0; i < W.rows(); ++i) {
          const double w = W(i, j) * pred.feat_scale(i);
          if (w == 0.0) continue;
          terms.push_back({prev[i], -w});
          b -= pred.feat_min(i) * w;
        }
        rhs = b;
      } else {
        rhs = pred.biases[q](j);
        for (int i = 0; i < W.rows(); ++i) {
          const double w = W(i, j);
          if (w == 0.0 || prev[i] < 0) continue;
          terms.push_back({prev[i], -w});
        }
      }
      const int def_row = m.add_constraint(terms, milp::Sense::Equal, rhs);
      // nonzero metric counts materialized network weights, not the
      // structural zhat/z bookkeeping coefficients
      report.nn_nonzeros += static_cast<long>(m.constraint(def_row).terms.size()) - 1;
      ++report.nn_constraints;

      if (mode == NeuronMode::Identity) {
        emb.z[q][j] = zhat;  // z coincides with zhat on LB >= 0
        ++report.identity_neurons;
        continue;
      }
      const int z = m.add_variable(0.0, std::max(0.0, ub), false, "z" + ns);
      emb.z[q][j] = z;
      if (mode == NeuronMode::Exact) {
        const int a = m.add_variable(0, 1, true, "relu" + ns);
        emb.relu_bin[q][j] = a;
        ++report.binaries_added;
        ++report.exact_neurons;
        report.nn_constraints += static_cast<long>(embed_exact_neuron(m, zhat, z, a, lb, ub).size());
      } else {
        ++report.relaxed_neurons;
        report.nn_constraints += static_cast<long>(embed_relaxed_neuron(m, zhat, z, lb, ub).size());
      }
    }
    prev.assign(emb.z[q].begin(), emb.z[q].end());
    first_layer = false;
  }
  return emb;
}

// Head expressions as sparse terms over the last activation layer.
inline std::vector<milp::Term> head_terms(const MlpPredictor& pred,
                                          const PeriodEmbedding& emb, bool rocof_head) {
  const Eigen::VectorXd& w = rocof_head ? pred.head_rcf_w : pred.head_dev_w;
  const std::vector<int>& zlast = emb.z.back();
  std::vector<milp::Term> terms;
  for (int j = 0; j < w.size(); ++j)
    if (w(j) != 0.0 && zlast[j] >= 0) terms.push_back({zlast[j], w(j)});
  return terms;
}

// f_dev <= f_nom - f_lim and f_rcf <= RoCoF_lim (magnitude convention).
inline void add_frequency_limits(milp::Model& m, const MlpPredictor& pred,
                                 PeriodEmbedding& emb, const FcucOptions& opts,
                                 EmbeddingReport& report) {
  opts.check();
  std::vector<milp::Term> dev = head_terms(pred, emb, false);
  emb.dev_row = m.add_constraint(dev, milp::Sense::LessEq,
                                 (opts.f_nom_hz - opts.f_lim_hz) - pred.head_dev_b);
  std::vector<milp::Term> rcf = head_terms(pred, emb, true);
  emb.rcf_row = m.add_constraint(rcf, milp::Sense::LessEq,
                                 opts.rocof_lim_hz_s - pred.head_rcf_b);
  report.nn_nonzeros += detail::count_terms(m, emb.dev_row);
  report.nn_nonzeros += detail::count_terms(m, emb.rcf_row);
  report.nn_constraints += 2;
}

// Feature variable ids [u, rho, P] for one encoded period of a UC model.
inline std::vector<int> encode_features(const UcModel& ucm, int period) {
  const UcVars& vars = ucm.vars;
  if (vars.mu.empty() ||
      std::find(vars.encoded_periods.begin(), vars.encoded_periods.end(), period) ==
          vars.encoded_periods.end())
    throw std::logic_error("encode_features: largest-unit encoding missing for period");
  std::vector<int> x;
  x.reserve(3 * vars.ng);
  for (int g = 0; g < vars.ng; ++g) x.push_back(vars.u[vars.gt(g, period)]);
  for (int g = 0; g < vars.ng; ++g) x.push_back(vars.rho[vars.gt(g, period)]);
  for (int g = 0; g < vars.ng; ++g) x.push_back(vars.p[vars.gt(g, period)]);
  return x;
}

// The feature box every MILP-feasible state lives in; preactivation bounds
// for embedding must be computed over (a superset of) this box.
inline std::pair<std::vector<double>, std::vector<double>> embedding_box(
    const GridModel& g) {
  const int ng = g.num_generators();
  std::vector<double> lo(3 * ng, 0.0), hi(3 * ng, 0.0);
  for (int i = 0; i < ng; ++i) {
    hi[i] = 1.0;
    hi[ng + i] = g.generators[i].p_max;
    hi[2 * ng + i] = g.generators[i].p_max;
  }
  return {lo, hi};
}

// Full DNN-FCUC wiring: per encoded period, features -> network -> limits.
inline EmbeddingReport add_dnn_constraints(UcModel& ucm, const MlpPredictor& pred,
                                           const FcucOptions& opts,
                                           std::vector<PeriodEmbedding>* out = nullptr) {
  if (3 * ucm.vars.ng != pred.input_dim())
    throw std::invalid_argument("add_dnn_constraints: predictor input does not match fleet");
  const bool relax = opts.encoding == FcucEncoding::DnnActive;
  std::vector<std::vector<NeuronMode>> modes = assign_neuron_modes(pred, relax);
  EmbeddingReport report;
  report.periods = static_cast<int>(ucm.vars.encoded_periods.size());
  for (int t : ucm.vars.encoded_periods) {
    std::vector<int> x = encode_features(ucm, t);
    PeriodEmbedding emb = embed_network(ucm.model, pred, modes, x, t, report);
    add_frequency_limits(ucm.model, pred, emb, opts, report);
    if (out) out->push_back(std::move(emb));
  }
  return report;
}

inline void save_embedding_report(const EmbeddingReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_embedding_report: cannot open " + path);
  out << r.to_json().dump(2) << "\n";
}

}  // namespace fcuc
