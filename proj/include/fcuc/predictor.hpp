#pragma once

// Frequency-metrics predictor: a small ReLU MLP with two linear output
// heads (frequency deviation, RoCoF magnitude), trained with mini-batch
// gradient descent plus momentum. Sparsity comes from per-layer magnitude
// masks tightened on a cubic schedule during training; masked weights are
// excluded from both the forward pass and the updates. The module also
// carries the machinery the MILP embedding needs: per-neuron preactivation
// bounds from interval propagation, positivity indices over a dataset, and
// the active-neuron selection. A separate binary discriminator drives
// entropy-based active sampling.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcuc/rng.hpp"

namespace fcuc {

struct LabeledSample {
  std::vector<double> x;
  double delta_f_max_hz = 0.0;
  double rocof_max_hz_s = 0.0;
  int f_sec = 0;
};

using Dataset = std::vector<LabeledSample>;

// Feature vector of a system state: [u_1..NG, disturbance one-hot with the
// largest committed output, P_1..NG]. Ties go to the lowest generator index.
inline std::vector<double> make_features(const std::vector<int>& u,
                                         const std::vector<double>& p) {
  const size_t ng = u.size();
  if (p.size() != ng) throw std::invalid_argument("make_features: length mismatch");
  std::vector<double> x(3 * ng, 0.0);
  int worst = -1;
  double worst_p = 0.0;
  for (size_t g = 0; g < ng; ++g) {
    x[g] = u[g];
    x[2 * ng + g] = p[g];
    if (u[g] && p[g] > worst_p + 1e-12) {
      worst_p = p[g];
      worst = static_cast<int>(g);
    }
  }
  if (worst >= 0) x[ng + worst] = worst_p;
  return x;
}

struct PruneSchedule {
  double s0 = 0.0;
  double s_final = 0.8;
  int start_epoch = 60;   // e_0
  int frequency = 4;      // pruning applied every `frequency` epochs
  int steps = 10;         // number of pruning steps
  int total_epochs = 220;
  int batch = 32;
  double learning_rate = 1e-3;
  double momentum = 0.9;

  void check() const {
    if (!(0.0 <= s0 && s0 <= s_final && s_final < 1.0))
      throw std::invalid_argument("PruneSchedule: need 0 <= s0 <= s_final < 1");
    if (start_epoch + steps * frequency > total_epochs)
      throw std::invalid_argument("PruneSchedule: schedule window exceeds total epochs");
  }
};

// Cubic sparsity ramp between the window boundaries.
inline double sparsity_at_epoch(const PruneSchedule& sched, int e) {
  const int e0 = sched.start_epoch;
  const int e1 = sched.start_epoch + sched.steps * sched.frequency;
  if (e < e0 || e > e1)
    throw std::invalid_argument("sparsity_at_epoch: epoch outside the pruning window");
  const double frac = double(e - e0) / double(e1 - e0);
  const double keep = 1.0 - frac;
  return sched.s_final + (sched.s0 - sched.s_final) * keep * keep * keep;
}

enum class PositivityRule {
  PositiveFraction,  // share of samples with positive preactivation
  PrintedMeanAbsDev  // mean minus mean absolute deviation, kept for comparison
};

struct MlpPredictor {
  std::vector<int> layer_sizes;            // input, hidden...; heads are scalar
  std::vector<Eigen::MatrixXd> weights;    // weights[q]: layer_sizes[q] x layer_sizes[q+1]
  std::vector<Eigen::RowVectorXd> biases;
  std::vector<Eigen::MatrixXd> masks;      // 1 keeps, 0 prunes
  Eigen::VectorXd head_dev_w, head_rcf_w;
  double head_dev_b = 0.0, head_rcf_b = 0.0;
  Eigen::RowVectorXd feat_min, feat_scale;  // scaled = (x - min) .* scale

  // embedding support, filled after training
  std::vector<Eigen::RowVectorXd> lb, ub;          // preactivation bounds
  std::vector<Eigen::RowVectorXd> positivity;      // epsilon per neuron
  std::vector<std::vector<std::uint8_t>> active;   // selected for relaxation
  std::string fingerprint;

  int num_hidden_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return layer_sizes.front(); }

  Eigen::RowVectorXd scale_input(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != input_dim())
      throw std::invalid_argument("forward: feature dimension mismatch");
    Eigen::RowVectorXd v(input_dim());
    for (int i = 0; i < input_dim(); ++i)
      v(i) = (x[i] - feat_min(i)) * feat_scale(i);
    return v;
  }
};

struct ForwardTrace {
  std::vector<Eigen::RowVectorXd> zhat;  // preactivations per hidden layer
  std::vector<Eigen::RowVectorXd> z;     // activations
  double dev = 0.0, rcf = 0.0;
};

inline ForwardTrace forward_trace(const MlpPredictor& m, const std::vector<double>& x) {
  ForwardTrace tr;
  Eigen::RowVectorXd z = m.scale_input(x);
  for (int q = 0; q < m.num_hidden_layers(); ++q) {
    Eigen::RowVectorXd zh = z * m.weights[q] + m.biases[q];
    tr.zhat.push_back(zh);
    z = zh.cwiseMax(0.0);
    tr.z.push_back(z);
  }
  tr.dev = z * m.head_dev_w + m.head_dev_b;
  tr.rcf = z * m.head_rcf_w + m.head_rcf_b;
  return tr;
}

inline std::pair<double, double> forward(const MlpPredictor& m,
                                         const std::vector<double>& x) {
  ForwardTrace tr = forward_trace(m, x);
  return {tr.dev, tr.rcf};
}

inline MlpPredictor make_predictor(const std::vector<int>& layer_sizes,
                                   std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("make_predictor: need input and at least one hidden layer");
  MlpPredictor m;
  m.layer_sizes = layer_sizes;
  Rng rng(seed);
  for (size_t q = 0; q + 1 < layer_sizes.size(); ++q) {
    const int in = layer_sizes[q], out = layer_sizes[q + 1];
    Eigen::MatrixXd w(in, out);
    const double sd = 1.0 / std::sqrt(double(in));
    for (int i = 0; i < in; ++i)
      for (int j = 0; j < out; ++j) w(i, j) = sd * rng.gaussian();
    m.weights.push_back(w);
    m.biases.push_back(Eigen::RowVectorXd::Zero(out));
    m.masks.push_back(Eigen::MatrixXd::Ones(in, out));
  }
  const int last = layer_sizes.back();
  const double sd = 1.0 / std::sqrt(double(last));
  m.head_dev_w.resize(last);
  m.head_rcf_w.resize(last);
  for (int i = 0; i < last; ++i) {
    m.head_dev_w(i) = sd * rng.gaussian();
    m.head_rcf_w(i) = sd * rng.gaussian();
  }
  m.feat_min = Eigen::RowVectorXd::Zero(layer_sizes.front());
  m.feat_scale = Eigen::RowVectorXd::Ones(layer_sizes.front());
  return m;
}

inline void fit_input_scaling(MlpPredictor& m, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("fit_input_scaling: empty dataset");
  const int n = m.input_dim();
  Eigen::RowVectorXd lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    lo(i) = data[0].x[i];
    hi(i) = data[0].x[i];
  }
  for (const LabeledSample& s : data)
    for (int i = 0; i < n; ++i) {
      lo(i) = std::min(lo(i), s.x[i]);
      hi(i) = std::max(hi(i), s.x[i]);
    }
  m.feat_min = lo;
  for (int i = 0; i < n; ++i)
    m.feat_scale(i) = (hi(i) - lo(i)) > 1e-12 ? 1.0 / (hi(i) - lo(i)) : 0.0;
}

struct MlpGradients {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::RowVectorXd> b;
  Eigen::VectorXd dev_w, rcf_w;
  double dev_b = 0.0, rcf_b = 0.0;
  double loss = 0.0;
};

namespace detail {

struct BatchBuffers {
  Eigen::MatrixXd X;  // B x n0 scaled inputs
  Eigen::VectorXd tdev, trcf;
};

inline void fill_batch(const MlpPredictor& m, const Dataset& data,
                       const std::vector<int>& order, size_t begin, size_t end,
                       BatchBuffers& buf) {
  const int B = static_cast<int>(end - begin);
  const int n = m.input_dim();
  buf.X.resize(B, n);
  buf.tdev.resize(B);
  buf.trcf.resize(B);
  for (int b = 0; b < B; ++b) {
    const LabeledSample& s = data[order[begin + b]];
    for (int i = 0; i < n; ++i)
      buf.X(b, i) = (s.x[i] - m.feat_min(i)) * m.feat_scale(i);
    buf.tdev(b) = s.delta_f_max_hz;
    buf.trcf(b) = s.rocof_max_hz_s;
  }
}

// Mean loss over the batch and its gradients, with pruned entries masked out.
inline void batch_gradients(const MlpPredictor& m, const BatchBuffers& buf,
                            MlpGradients& g) {
  const int L = m.num_hidden_layers();
  const int B = static_cast<int>(buf.X.rows());
  std::vector<Eigen::MatrixXd> Z(L + 1), Zhat(L);
  Z[0] = buf.X;
  for (int q = 0; q < L; ++q) {
    Zhat[q] = (Z[q] * m.weights[q]).rowwise() + m.biases[q];
    Z[q + 1] = Zhat[q].cwiseMax(0.0);
  }
  Eigen::VectorXd ydev = Z[L] * m.head_dev_w;
  ydev.array() += m.head_dev_b;
  Eigen::VectorXd yrcf = Z[L] * m.head_rcf_w;
  yrcf.array() += m.head_rcf_b;
  const Eigen::VectorXd edev = ydev - buf.tdev;
  const Eigen::VectorXd ercf = yrcf - buf.trcf;
  g.loss = (edev.squaredNorm() + ercf.squaredNorm()) / double(B);
  const double inv = 2.0 / double(B);
  const Eigen::VectorXd gdev = inv * edev;
  const Eigen::VectorXd grcf = inv * ercf;
  g.dev_w = Z[L].transpose() * gdev;
  g.rcf_w = Z[L].transpose() * grcf;
  g.dev_b = gdev.sum();
  g.rcf_b = grcf.sum();
  g.w.resize(L);
  g.b.resize(L);
  Eigen::MatrixXd G = gdev * m.head_dev_w.transpose() + grcf * m.head_rcf_w.transpose();
  for (int q = L - 1; q >= 0; --q) {
    const Eigen::MatrixXd Gzhat = (Zhat[q].array() > 0.0).cast<double>() * G.array();
    g.w[q] = (Z[q].transpose() * Gzhat).cwiseProduct(m.masks[q]);
    g.b[q] = Gzhat.colwise().sum();
    if (q > 0) G = Gzhat * m.weights[q].transpose();
  }
}

// One epoch of momentum SGD on the summed two-head squared error.
inline double sgd_epoch(MlpPredictor& m, const Dataset& data, int batch, double lr,
                        double momentum, Rng& rng,
                        std::vector<Eigen::MatrixXd>& vel_w,
                        std::vector<Eigen::RowVectorXd>& vel_b,
                        Eigen::VectorXd& vel_dev_w, Eigen::VectorXd& vel_rcf_w,
                        double& vel_dev_b, double& vel_rcf_b) {
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const int L = m.num_hidden_layers();
  BatchBuffers buf;
  MlpGradients g;
  double total_loss = 0.0;
  for (size_t begin = 0; begin < order.size(); begin += batch) {
    const size_t end = std::min(order.size(), begin + batch);
    fill_batch(m, data, order, begin, end, buf);
    batch_gradients(m, buf, g);
    total_loss += g.loss * double(end - begin);
    vel_dev_w = momentum * vel_dev_w - lr * g.dev_w;
    vel_rcf_w = momentum * vel_rcf_w - lr * g.rcf_w;
    vel_dev_b = momentum * vel_dev_b - lr * g.dev_b;
    vel_rcf_b = momentum * vel_rcf_b - lr * g.rcf_b;
    m.head_dev_w += vel_dev_w;
    m.head_rcf_w += vel_rcf_w;
    m.head_dev_b += vel_dev_b;
    m.head_rcf_b += vel_rcf_b;
    for (int q = L - 1; q >= 0; --q) {
      vel_w[q] = (momentum * vel_w[q] - lr * g.w[q]).cwiseProduct(m.masks[q]);
      vel_b[q] = momentum * vel_b[q] - lr * g.b[q];
      m.weights[q] = (m.weights[q] + vel_w[q]).cwiseProduct(m.masks[q]);
      m.biases[q] += vel_b[q];
    }
  }
  return total_loss / double(data.size());
}

// Tighten the layer mask to the requested sparsity by zeroing the smallest
// magnitudes; ties resolve by index order for determinism.
inline void apply_magnitude_mask(Eigen::MatrixXd& w, Eigen::MatrixXd& mask,
                                 double sparsity) {
  const int total = static_cast<int>(w.size());
  const int n_zero = static_cast<int>(std::llround(sparsity * total));
  std::vector<int> idx(total);
  std::iota(idx.begin(), idx.end(), 0);
  const double* wd = w.data();
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(wd[a]) < std::abs(wd[b]);
  });
  mask.setOnes();
  double* md = mask.data();
  double* wm = w.data();
  for (int k = 0; k < n_zero; ++k) {
    md[idx[k]] = 0.0;
    wm[idx[k]] = 0.0;
  }
}

}  // namespace detail

// Full-dataset loss and gradients of the two-head squared error, exposed so
// the analytic gradients can be checked against finite differences.
inline MlpGradients compute_loss_gradients(const MlpPredictor& m, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("compute_loss_gradients: empty dataset");
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  detail::BatchBuffers buf;
  detail::fill_batch(m, data, order, 0, data.size(), buf);
  MlpGradients g;
  detail::batch_gradients(m, buf, g);
  return g;
}

inline std::vector<double> train_dense(MlpPredictor& m, const Dataset& data, int epochs,
                                       int batch, double lr, double momentum,
                                       std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("train_dense: empty dataset");
  Rng rng(seed);
  const int L = m.num_hidden_layers();
  std::vector<Eigen::MatrixXd> vel_w;
  std::vector<Eigen::RowVectorXd> vel_b;
  for (int q = 0; q < L; ++q) {
    vel_w.push_back(Eigen::MatrixXd::Zero(m.weights[q].rows(), m.weights[q].cols()));
    vel_b.push_back(Eigen::RowVectorXd::Zero(m.biases[q].size()));
  }
  Eigen::VectorXd vdw = Eigen::VectorXd::Zero(m.head_dev_w.size());
  Eigen::VectorXd vrw = Eigen::VectorXd::Zero(m.head_rcf_w.size());
  double vdb = 0.0, vrb = 0.0;
  std::vector<double> losses;
  for (int e = 0; e < epochs; ++e)
    losses.push_back(detail::sgd_epoch(m, data, batch, lr, momentum, rng, vel_w, vel_b,
                                       vdw, vrw, vdb, vrb));
  return losses;
}

// Sparse phase: continue training from the (pre-trained) weights while the
// per-layer magnitude masks ramp to the final sparsity. Output heads are
// never pruned.
inline std::vector<double> train_sparse(MlpPredictor& m, const Dataset& data,
                                        const PruneSchedule& sched, std::uint64_t seed) {
  sched.check();
  if (data.empty()) throw std::invalid_argument("train_sparse: empty dataset");
  Rng rng(seed);
  const int L = m.num_hidden_layers();
  std::vector<Eigen::MatrixXd> vel_w;
  std::vector<Eigen::RowVectorXd> vel_b;
  for (int q = 0; q < L; ++q) {
    vel_w.push_back(Eigen::MatrixXd::Zero(m.weights[q].rows(), m.weights[q].cols()));
    vel_b.push_back(Eigen::RowVectorXd::Zero(m.biases[q].size()));
  }
  Eigen::VectorXd vdw = Eigen::VectorXd::Zero(m.head_dev_w.size());
  Eigen::VectorXd vrw = Eigen::VectorXd::Zero(m.head_rcf_w.size());
  double vdb = 0.0, vrb = 0.0;
  std::vector<double> losses;
  for (int e = 1; e <= sched.total_epochs; ++e) {
    const int e0 = sched.start_epoch;
    const int e1 = sched.start_epoch + sched.steps * sched.frequency;
    if (e >= e0 && e <= e1 && (e - e0) % sched.frequency == 0) {
      const double s = sparsity_at_epoch(sched, e);
      for (int q = 0; q < L; ++q)
        detail::apply_magnitude_mask(m.weights[q], m.masks[q], s);
    }
    losses.push_back(detail::sgd_epoch(m, data, sched.batch, sched.learning_rate,
                                       sched.momentum, rng, vel_w, vel_b, vdw, vrw, vdb,
                                       vrb));
  }
  std::ostringstream fp;
  fp << "layers=";
  for (int s : m.layer_sizes) fp << s << ",";
  fp << " s_final=" << sched.s_final << " epochs=" << sched.total_epochs
     << " batch=" << sched.batch << " lr=" << sched.learning_rate << " seed=" << seed;
  m.fingerprint = fp.str();
  return losses;
}

inline double layer_sparsity(const MlpPredictor& m, int q) {
  const Eigen::MatrixXd& w = m.masks[q];
  const double zeros = double(w.size()) - w.sum();
  return zeros / double(w.size());
}

// ---------------------------------------------------------------------------
// security discriminator and entropy-driven sample selection

struct Discriminator {
  MlpPredictor net;  // single logit output via head_dev; head_rcf unused
};

inline double predict_secure(const Discriminator& d, const std::vector<double>& x) {
  const double logit = forward(d.net, x).first;
  return 1.0 / (1.0 + std::exp(-logit));
}

inline Discriminator train_discriminator(const Dataset& data, std::uint64_t seed,
                                         int hidden = 16, int epochs = 300,
                                         double lr = 0.02) {
  if (data.empty()) throw std::invalid_argument("train_discriminator: empty dataset");
  int pos = 0;
  for (const LabeledSample& s : data) pos += s.f_sec ? 1 : 0;
  if (pos == 0 || pos == static_cast<int>(data.size()))
    throw std::invalid_argument("train_discriminator: single-class dataset");
  Discriminator d;
  const int n = static_cast<int>(data[0].x.size());
  d.net = make_predictor({n, hidden}, seed);
  fit_input_scaling(d.net, data);
  Rng rng(seed + 1);
  const int L = 1;
  std::vector<Eigen::MatrixXd> vel_w{Eigen::MatrixXd::Zero(n, hidden)};
  std::vector<Eigen::RowVectorXd> vel_b{Eigen::RowVectorXd::Zero(hidden)};
  Eigen::VectorXd vdw = Eigen::VectorXd::Zero(hidden);
  double vdb = 0.0;
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const int batch = 32;
  detail::BatchBuffers buf;
  for (int e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (size_t begin = 0; begin < order.size(); begin += batch) {
      const size_t end = std::min(order.size(), begin + batch);
      const int B = static_cast<int>(end - begin);
      buf.X.resize(B, n);
      Eigen::VectorXd target(B);
      for (int b = 0; b < B; ++b) {
        const LabeledSample& s = data[order[begin + b]];
        for (int i = 0; i < n; ++i)
          buf.X(b, i) = (s.x[i] - d.net.feat_min(i)) * d.net.feat_scale(i);
        target(b) = s.f_sec;
      }
      Eigen::MatrixXd Zhat = (buf.X * d.net.weights[0]).rowwise() + d.net.biases[0];
      Eigen::MatrixXd Z = Zhat.cwiseMax(0.0);
      Eigen::VectorXd logit = Z * d.net.head_dev_w;
      logit.array() += d.net.head_dev_b;
      const Eigen::VectorXd prob = 1.0 / (1.0 + (-logit.array()).exp());
      // BCE gradient wrt logit is (p - t)
      const Eigen::VectorXd glogit = (prob - target) / double(B);
      const Eigen::VectorXd gw = Z.transpose() * glogit;
      const double gb = glogit.sum();
      Eigen::MatrixXd Gz = glogit * d.net.head_dev_w.transpose();
      Eigen::MatrixXd Gzhat = (Zhat.array() > 0.0).cast<double>() * Gz.array();
      const Eigen::MatrixXd gW = buf.X.transpose() * Gzhat;
      const Eigen::RowVectorXd gB = Gzhat.colwise().sum();
      vdw = 0.9 * vdw - lr * gw;
      vdb = 0.9 * vdb - lr * gb;
      d.net.head_dev_w += vdw;
      d.net.head_dev_b += vdb;
      vel_w[0] = 0.9 * vel_w[0] - lr * gW;
      vel_b[0] = 0.9 * vel_b[0] - lr * gB;
      d.net.weights[0] += vel_w[0];
      d.net.biases[0] += vel_b[0];
    }
  }
  (void)L;
  return d;
}

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

struct SampleSelection {
  std::vector<int> secure;    // highest-entropy picks
  std::vector<int> insecure;  // lowest-entropy picks
};

// Entropy ranking over discriminator posteriors: k_sec indices with the
// largest entropy (closest to 0.5), then k_insec with the smallest from the
// remainder. Ties resolve to the lowest index; selections are disjoint.
inline SampleSelection select_samples_from_posteriors(const std::vector<double>& post,
                                                      int k_sec, int k_insec) {
  const int n = static_cast<int>(post.size());
  if (n == 0) throw std::invalid_argument("select_samples: empty pool");
  if (k_sec + k_insec > n)
    throw std::invalid_argument("select_samples: selection exceeds the pool");
  std::vector<double> H(n);
  for (int i = 0; i < n; ++i) H[i] = binary_entropy(post[i]);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (H[a] != H[b]) return H[a] > H[b];
    return a < b;
  });
  SampleSelection out;
  std::vector<char> taken(n, 0);
  for (int k = 0; k < k_sec; ++k) {
    out.secure.push_back(idx[k]);
    taken[idx[k]] = 1;
  }
  std::vector<int> asc(n);
  std::iota(asc.begin(), asc.end(), 0);
  std::stable_sort(asc.begin(), asc.end(), [&](int a, int b) {
    if (H[a] != H[b]) return H[a] < H[b];
    return a < b;
  });
  for (int i : asc) {
    if (static_cast<int>(out.insecure.size()) >= k_insec) break;
    if (!taken[i]) out.insecure.push_back(i);
  }
  return out;
}

inline SampleSelection select_samples(const Discriminator& d,
                                      const std::vector<std::vector<double>>& pool,
                                      int k_sec, int k_insec) {
  std::vector<double> post(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) post[i] = predict_secure(d, pool[i]);
  return select_samples_from_posteriors(post, k_sec, k_insec);
}

// ---------------------------------------------------------------------------
// interval bounds, positivity, active-neuron selection

// Interval propagation of the raw-feature box through scaling and the
// layers; sound for every input inside the box.
inline void compute_neuron_bounds(MlpPredictor& m, const std::vector<double>& box_lo,
                                  const std::vector<double>& box_hi) {
  const int n = m.input_dim();
  if (static_cast<int>(box_lo.size()) != n || static_cast<int>(box_hi.size()) != n)
    throw std::invalid_argument("compute_neuron_bounds: box dimension mismatch");
  Eigen::RowVectorXd lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    if (!(box_lo[i] <= box_hi[i]) || !std::isfinite(box_lo[i]) || !std::isfinite(box_hi[i]))
      throw std::invalid_argument("compute_neuron_bounds: bad box");
    const double a = (box_lo[i] - m.feat_min(i)) * m.feat_scale(i);
    const double b = (box_hi[i] - m.feat_min(i)) * m.feat_scale(i);
    lo(i) = std::min(a, b);
    hi(i) = std::max(a, b);
  }
  m.lb.clear();
  m.ub.clear();
  for (int q = 0; q < m.num_hidden_layers(); ++q) {
    const Eigen::MatrixXd& w = m.weights[q];
    const int out = static_cast<int>(w.cols());
    Eigen::RowVectorXd zlo(out), zhi(out);
    for (int j = 0; j < out; ++j) {
      double a = m.biases[q](j), b = m.biases[q](j);
      for (int i = 0; i < w.rows(); ++i) {
        const double wij = w(i, j);
        if (wij >= 0) {
          a += wij * lo(i);
          b += wij * hi(i);
        } else {
          a += wij * hi(i);
          b += wij * lo(i);
        }
      }
      zlo(j) = a;
      zhi(j) = b;
    }
    m.lb.push_back(zlo);
    m.ub.push_back(zhi);
    lo = zlo.cwiseMax(0.0);
    hi = zhi.cwiseMax(0.0);
  }
}

// epsilon per neuron: fraction of samples with positive preactivation, or
// the printed mean-minus-mean-absolute-deviation variant for comparison.
inline std::vector<Eigen::RowVectorXd> positivity_index(
    const MlpPredictor& m, const Dataset& data,
    PositivityRule rule = PositivityRule::PositiveFraction) {
  if (data.empty()) throw std::invalid_argument("positivity_index: empty dataset");
  const int L = m.num_hidden_layers();
  std::vector<Eigen::RowVectorXd> eps;
  std::vector<std::vector<double>> zhat_all(L);
  for (int q = 0; q < L; ++q)
    eps.push_back(Eigen::RowVectorXd::Zero(m.layer_sizes[q + 1]));
  if (rule == PositivityRule::PositiveFraction) {
    for (const LabeledSample& s : data) {
      ForwardTrace tr = forward_trace(m, s.x);
      for (int q = 0; q < L; ++q)
        for (int j = 0; j < tr.zhat[q].size(); ++j)
          if (tr.zhat[q](j) > 0.0) eps[q](j) += 1.0;
    }
    for (int q = 0; q < L; ++q) eps[q] /= double(data.size());
    return eps;
  }
  // printed variant: (1/Ns) * (sum z - sum |z - mean|)
  std::vector<Eigen::MatrixXd> all(L);
  for (int q = 0; q < L; ++q)
    all[q].resize(static_cast<int>(data.size()), m.layer_sizes[q + 1]);
  for (size_t s = 0; s < data.size(); ++s) {
    ForwardTrace tr = forward_trace(m, data[s].x);
    for (int q = 0; q < L; ++q) all[q].row(static_cast<int>(s)) = tr.zhat[q];
  }
  for (int q = 0; q < L; ++q) {
    const Eigen::RowVectorXd mean = all[q].colwise().mean();
    for (int j = 0; j < all[q].cols(); ++j) {
      const double mad = (all[q].col(j).array() - mean(j)).abs().sum();
      eps[q](j) = (all[q].col(j).sum() - mad) / double(data.size());
    }
  }
  return eps;
}

// H = neurons with positivity index at or above the threshold.
inline std::vector<std::vector<std::uint8_t>> select_active_neurons(
    const std::vector<Eigen::RowVectorXd>& eps, double gamma_select) {
  std::vector<std::vector<std::uint8_t>> active;
  for (const Eigen::RowVectorXd& layer : eps) {
    std::vector<std::uint8_t> a(layer.size());
    for (int j = 0; j < layer.size(); ++j) a[j] = layer(j) >= gamma_select ? 1 : 0;
    active.push_back(std::move(a));
  }
  return active;
}

struct ValidationAccuracy {
  double rocof_pct = 0.0;
  double deviation_pct = 0.0;
};

inline ValidationAccuracy validation_accuracy(const MlpPredictor& m, const Dataset& data,
                                              double tolerance) {
  if (data.empty() || tolerance <= 0)
    throw std::invalid_argument("validation_accuracy: bad inputs");
  int ok_r = 0, ok_d = 0;
  for (const LabeledSample& s : data) {
    auto [dev, rcf] = forward(m, s.x);
    const double tol_d =
        s.delta_f_max_hz != 0.0 ? tolerance * std::abs(s.delta_f_max_hz) : tolerance;
    const double tol_r =
        s.rocof_max_hz_s != 0.0 ? tolerance * std::abs(s.rocof_max_hz_s) : tolerance;
    if (std::abs(dev - s.delta_f_max_hz) <= tol_d) ++ok_d;
    if (std::abs(rcf - s.rocof_max_hz_s) <= tol_r) ++ok_r;
  }
  return {100.0 * ok_r / data.size(), 100.0 * ok_d / data.size()};
}

// ---------------------------------------------------------------------------
// serialization

inline void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
  for (const LabeledSample& s : data) {
    nlohmann::json j;
    j["x"] = s.x;
    j["delta_f_max_hz"] = s.delta_f_max_hz;
    j["rocof_max_hz_s"] = s.rocof_max_hz_s;
    j["f_sec"] = s.f_sec;
    out << j.dump() << "\n";
  }
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
  Dataset data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    LabeledSample s;
    s.x = j["x"].get<std::vector<double>>();
    s.delta_f_max_hz = j["delta_f_max_hz"].get<double>();
    s.rocof_max_hz_s = j["rocof_max_hz_s"].get<double>();
    s.f_sec = j["f_sec"].get<int>();
    data.push_back(std::move(s));
  }
  return data;
}

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  return m;
}

inline nlohmann::json rowvec_to_json(const Eigen::RowVectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Eigen::RowVectorXd rowvec_from_json(const nlohmann::json& j) {
  Eigen::RowVectorXd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

}  // namespace detail

inline void save_predictor(const MlpPredictor& m, const std::string& path) {
  nlohmann::json j;
  j["layer_sizes"] = m.layer_sizes;
  j["weights"] = nlohmann::json::array();
  j["biases"] = nlohmann::json::array();
  j["masks"] = nlohmann::json::array();
  for (int q = 0; q < m.num_hidden_layers(); ++q) {
    j["weights"].push_back(detail::matrix_to_json(m.weights[q]));
    j["biases"].push_back(detail::rowvec_to_json(m.biases[q]));
    j["masks"].push_back(detail::matrix_to_json(m.masks[q]));
  }
  j["head_dev_w"] = detail::rowvec_to_json(m.head_dev_w.transpose());
  j["head_rcf_w"] = detail::rowvec_to_json(m.head_rcf_w.transpose());
  j["head_dev_b"] = m.head_dev_b;
  j["head_rcf_b"] = m.head_rcf_b;
  j["feat_min"] = detail::rowvec_to_json(m.feat_min);
  j["feat_scale"] = detail::rowvec_to_json(m.feat_scale);
  j["lb"] = nlohmann::json::array();
  j["ub"] = nlohmann::json::array();
  for (size_t q = 0; q < m.lb.size(); ++q) {
    j["lb"].push_back(detail::rowvec_to_json(m.lb[q]));
    j["ub"].push_back(detail::rowvec_to_json(m.ub[q]));
  }
  j["positivity"] = nlohmann::json::array();
  for (const auto& e : m.positivity) j["positivity"].push_back(detail::rowvec_to_json(e));
  j["active"] = m.active;
  j["fingerprint"] = m.fingerprint;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_predictor: cannot open " + path);
  out << j.dump(2) << "\n";
}

inline MlpPredictor load_predictor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_predictor: cannot open " + path);
  nlohmann::json j;
  in >> j;
  MlpPredictor m;
  m.layer_sizes = j["layer_sizes"].get<std::vector<int>>();
  for (const auto& w : j["weights"]) m.weights.push_back(detail::matrix_from_json(w));
  for (const auto& b : j["biases"]) m.biases.push_back(detail::rowvec_from_json(b));
  for (const auto& mk : j["masks"]) m.masks.push_back(detail::matrix_from_json(mk));
  m.head_dev_w = detail::rowvec_from_json(j["head_dev_w"]).transpose();
  m.head_rcf_w = detail::rowvec_from_json(j["head_rcf_w"]).transpose();
  m.head_dev_b = j["head_dev_b"].get<double>();
  m.head_rcf_b = j["head_rcf_b"].get<double>();
  m.feat_min = detail::rowvec_from_json(j["feat_min"]);
  m.feat_scale = detail::rowvec_from_json(j["feat_scale"]);
  for (const auto& v : j["lb"]) m.lb.push_back(detail::rowvec_from_json(v));
  for (const auto& v : j["ub"]) m.ub.push_back(detail::rowvec_from_json(v));
  for (const auto& v : j["positivity"]) m.positivity.push_back(detail::rowvec_from_json(v));
  m.active = j["active"].get<std::vector<std::vector<std::uint8_t>>>();
  m.fingerprint = j.value("fingerprint", "");
  return m;
}

}  // namespace fcuc
