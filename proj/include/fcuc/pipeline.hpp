#pragma once

// End-to-end study orchestration: model-based data generation with outage
// labeling, discriminator-guided active sampling plus sparse training, the
// four scheduling modes, post-solve time-domain validation, and the
// benchmark table assembly. All stages are deterministic under the
// configured seeds; wall-clock timings are the only run-to-run variance.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcuc/grid.hpp"
#include "fcuc/milp_solver.hpp"
#include "fcuc/nnembed.hpp"
#include "fcuc/predictor.hpp"
#include "fcuc/swingdyn.hpp"
#include "fcuc/uc.hpp"

namespace fcuc {

struct RunConfig {
  std::string grid_path;
  std::string scenario_path;
  std::string out_dir = "out";

  // data generation
  int scenario_solves = 12;        // half T-SCUC, half ERC-SCUC
  int labeled_pool = 600;          // rows in dataset.jsonl
  int unlabeled_pool = 2400;       // rows in pool.jsonl
  double perturb_fraction = 0.3;   // commitment-flip share for diversity
  double mean_shift_lo = -0.20;
  double mean_shift_hi = 0.20;
  double sigma = 0.05;
  double datagen_gap = 0.01;

  // active sampling and training
  int k_sec = 250;
  int k_insec = 250;
  std::vector<int> hidden_layers{32, 32};
  int dense_epochs = 300;
  PruneSchedule prune;
  double holdout_fraction = 0.2;

  // scheduling
  FcucOptions fcuc;
  milp::SolverOptions solver;
  DynamicsParams dynamics;
  double validate_margin = 0.10;
  std::vector<int> sweep_hours{4, 8};

  std::uint64_t seed = 1;
};

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_config: parse error: " + std::string(e.what()));
  }
  RunConfig c;
  c.grid_path = j.value("grid_path", c.grid_path);
  c.scenario_path = j.value("scenario_path", c.scenario_path);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.scenario_solves = j.value("scenario_solves", c.scenario_solves);
  c.labeled_pool = j.value("labeled_pool", c.labeled_pool);
  c.unlabeled_pool = j.value("unlabeled_pool", c.unlabeled_pool);
  c.perturb_fraction = j.value("perturb_fraction", c.perturb_fraction);
  c.mean_shift_lo = j.value("mean_shift_lo", c.mean_shift_lo);
  c.mean_shift_hi = j.value("mean_shift_hi", c.mean_shift_hi);
  c.sigma = j.value("sigma", c.sigma);
  c.datagen_gap = j.value("datagen_gap", c.datagen_gap);
  c.k_sec = j.value("k_sec", c.k_sec);
  c.k_insec = j.value("k_insec", c.k_insec);
  c.hidden_layers = j.value("hidden_layers", c.hidden_layers);
  c.dense_epochs = j.value("dense_epochs", c.dense_epochs);
  if (j.contains("prune")) {
    const auto& p = j["prune"];
    c.prune.s0 = p.value("s0", c.prune.s0);
    c.prune.s_final = p.value("s_final", c.prune.s_final);
    c.prune.start_epoch = p.value("start_epoch", c.prune.start_epoch);
    c.prune.frequency = p.value("frequency", c.prune.frequency);
    c.prune.steps = p.value("steps", c.prune.steps);
    c.prune.total_epochs = p.value("total_epochs", c.prune.total_epochs);
    c.prune.batch = p.value("batch", c.prune.batch);
    c.prune.learning_rate = p.value("learning_rate", c.prune.learning_rate);
    c.prune.momentum = p.value("momentum", c.prune.momentum);
  }
  c.holdout_fraction = j.value("holdout_fraction", c.holdout_fraction);
  if (j.contains("fcuc")) {
    const auto& f = j["fcuc"];
    c.fcuc.constrained_periods =
        f.value("constrained_periods", c.fcuc.constrained_periods);
    c.fcuc.rocof_lim_hz_s = f.value("rocof_lim_hz_s", c.fcuc.rocof_lim_hz_s);
    c.fcuc.f_lim_hz = f.value("f_lim_hz", c.fcuc.f_lim_hz);
    c.fcuc.f_nom_hz = f.value("f_nom_hz", c.fcuc.f_nom_hz);
    c.fcuc.big_m_a = f.value("big_m_a", c.fcuc.big_m_a);
    c.fcuc.gamma_select = f.value("gamma_select", c.fcuc.gamma_select);
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    c.solver.mip_gap = s.value("mip_gap", c.solver.mip_gap);
    c.solver.node_limit = s.value("node_limit", c.solver.node_limit);
    c.solver.time_limit_s = s.value("time_limit_s", c.solver.time_limit_s);
  }
  if (j.contains("dynamics")) {
    const auto& d = j["dynamics"];
    c.dynamics.gamma_damp = d.value("gamma_damp", c.dynamics.gamma_damp);
    c.dynamics.step_s = d.value("step_s", c.dynamics.step_s);
    c.dynamics.horizon_s = d.value("horizon_s", c.dynamics.horizon_s);
    c.dynamics.rocof_window_s = d.value("rocof_window_s", c.dynamics.rocof_window_s);
  }
  c.validate_margin = j.value("validate_margin", c.validate_margin);
  c.sweep_hours = j.value("sweep_hours", c.sweep_hours);
  c.seed = j.value("seed", c.seed);
  return c;
}

namespace detail {

struct SystemState {
  std::vector<int> u;
  std::vector<double> p;
};

// Labels one state through the swing oracle: trip the largest committed
// injection, simulate, and measure the window metrics.
inline bool label_state(const GridModel& g, const SystemState& st,
                        const DynamicsParams& dyn, const FcucOptions& fopts,
                        LabeledSample& out) {
  int worst = -1;
  double worst_p = 0.0;
  for (size_t i = 0; i < st.u.size(); ++i)
    if (st.u[i] && st.p[i] > worst_p + 1e-12) {
      worst_p = st.p[i];
      worst = static_cast<int>(i);
    }
  if (worst < 0) return false;
  // the trip must leave inertia somewhere
  int committed = 0;
  for (int u : st.u) committed += u;
  if (committed <= 1) return false;
  FrequencyTrace tr;
  try {
    tr = simulate_outage(g, st.p, st.u, g.generators[worst].id, dyn);
  } catch (const std::exception&) {
    return false;
  }
  FrequencyMetrics mm = measure_metrics(tr, dyn.rocof_window_s);
  out.x = make_features(st.u, st.p);
  out.delta_f_max_hz = mm.delta_f_max_hz;
  out.rocof_max_hz_s = mm.rocof_max_hz_s;
  const double dev_lim = fopts.f_nom_hz - fopts.f_lim_hz;
  out.f_sec = (mm.delta_f_max_hz <= dev_lim && mm.rocof_max_hz_s <= fopts.rocof_lim_hz_s)
                  ? 1
                  : 0;
  return true;
}

// Random commitment flip keeping total committed capacity above demand.
inline SystemState perturb_state(const GridModel& g, const SystemState& st,
                                 double total_demand, Rng& rng) {
  SystemState out = st;
  const int ng = static_cast<int>(st.u.size());
  for (int attempt = 0; attempt < 8; ++attempt) {
    const int gi = rng.uniform_int(0, ng - 1);
    const Generator& gen = g.generators[gi];
    if (out.u[gi]) {
      double cap = 0.0;
      for (int k = 0; k < ng; ++k)
        if (out.u[k] && k != gi) cap += g.generators[k].p_max;
      if (cap < total_demand) continue;  // keep the fleet able to serve load
      out.u[gi] = 0;
      out.p[gi] = 0.0;
    } else {
      out.u[gi] = 1;
      out.p[gi] = gen.p_min + (gen.p_max - gen.p_min) * rng.uniform();
    }
    break;
  }
  return out;
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace detail

struct DatagenResult {
  int labeled = 0;
  int unlabeled = 0;
  int scenario_solves_ok = 0;
  int scenario_solves_skipped = 0;
};

// Solves T-SCUC / ERC-SCUC over sampled scenarios, harvests per-hour states
// (plus perturbed variants), labels them through the dynamics oracle and
// writes dataset.jsonl (labeled) and pool.jsonl (unlabeled features).
inline DatagenResult cmd_datagen(const RunConfig& cfg) {
  GridModel g = load_grid(cfg.grid_path);
  {
    auto report = validate_grid(g);
    if (!report.empty())
      throw std::runtime_error("cmd_datagen: invalid grid: " + report[0]);
  }
  Scenario base = load_scenario(g, cfg.scenario_path);
  std::filesystem::create_directories(cfg.out_dir);
  auto scens = sample_scenarios(g, base, cfg.scenario_solves, cfg.mean_shift_lo,
                                cfg.mean_shift_hi, cfg.sigma, cfg.seed);
  milp::SolverOptions sopts = cfg.solver;
  sopts.mip_gap = cfg.datagen_gap;

  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<detail::SystemState> states;
  DatagenResult res;
  for (size_t si = 0; si < scens.size(); ++si) {
    UcInstance inst = make_instance(g, scens[si], true);
    UcModel ucm = build_tscuc(inst);
    const bool erc_mode = (si % 2 == 1);  // alternate T-SCUC / ERC-SCUC
    if (erc_mode) {
      add_largest_unit_encoding(ucm, inst, cfg.fcuc);
      add_erc_constraint(ucm, inst, cfg.fcuc);
    }
    UcSolution sol;
    try {
      sol = solve_and_extract(ucm, inst, sopts);
    } catch (const std::exception& e) {
      std::cerr << "warning: scenario " << si << " skipped: " << e.what() << "\n";
      ++res.scenario_solves_skipped;
      continue;
    }
    if (sol.status != milp::Status::Optimal) {
      std::cerr << "warning: scenario " << si
                << " skipped: " << milp::to_string(sol.status) << "\n";
      ++res.scenario_solves_skipped;
      continue;
    }
    ++res.scenario_solves_ok;
    for (int t = 0; t < sol.nt; ++t) {
      detail::SystemState st{sol.commitment_at(t), sol.dispatch_at(t)};
      states.push_back(st);
      if (rng.uniform() < cfg.perturb_fraction)
        states.push_back(detail::perturb_state(g, st, scens[si].total_demand(t), rng));
    }
  }
  if (states.empty()) throw std::runtime_error("cmd_datagen: no usable states");

  // cycle through harvested states with fresh perturbations until the pools
  // reach their configured sizes
  Dataset labeled;
  std::vector<std::vector<double>> unlabeled;
  size_t cursor = 0;
  auto next_state = [&]() {
    detail::SystemState st = states[cursor % states.size()];
    if (cursor >= states.size()) {
      // deterministic fresh variant on later passes
      double dem = 0.0;
      for (size_t i = 0; i < st.p.size(); ++i) dem += st.p[i];
      st = detail::perturb_state(g, st, dem, rng);
    }
    ++cursor;
    return st;
  };
  int guard = 0;
  while (static_cast<int>(labeled.size()) < cfg.labeled_pool &&
         guard++ < cfg.labeled_pool * 20) {
    LabeledSample s;
    if (detail::label_state(g, next_state(), cfg.dynamics, cfg.fcuc, s))
      labeled.push_back(std::move(s));
  }
  guard = 0;
  while (static_cast<int>(unlabeled.size()) < cfg.unlabeled_pool &&
         guard++ < cfg.unlabeled_pool * 20) {
    detail::SystemState st = next_state();
    int committed = 0;
    for (int u : st.u) committed += u;
    if (committed <= 1) continue;
    unlabeled.push_back(make_features(st.u, st.p));
  }
  save_dataset(labeled, cfg.out_dir + "/dataset.jsonl");
  {
    std::ofstream out(cfg.out_dir + "/pool.jsonl");
    for (const auto& x : unlabeled) {
      nlohmann::json j;
      j["x"] = x;
      out << j.dump() << "\n";
    }
  }
  res.labeled = static_cast<int>(labeled.size());
  res.unlabeled = static_cast<int>(unlabeled.size());
  detail::write_json({{"labeled", res.labeled},
                      {"unlabeled", res.unlabeled},
                      {"scenario_solves_ok", res.scenario_solves_ok},
                      {"scenario_solves_skipped", res.scenario_solves_skipped}},
                     cfg.out_dir + "/datagen_report.json");
  return res;
}

struct TrainResult {
  int active_added = 0;
  ValidationAccuracy holdout_10pct;
  std::string model_path;
};

// Discriminator on the labeled pool, entropy-driven selection from the
// unlabeled pool (labeled on demand through the oracle), dense then sparse
// training, bounds/positivity/active-set computation, and the tolerance
// sweep table.
inline TrainResult cmd_train(const RunConfig& cfg) {
  GridModel g = load_grid(cfg.grid_path);
  Dataset labeled = load_dataset(cfg.out_dir + "/dataset.jsonl");
  std::vector<std::vector<double>> pool;
  {
    std::ifstream in(cfg.out_dir + "/pool.jsonl");
    if (!in) throw std::runtime_error("cmd_train: pool.jsonl missing");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      pool.push_back(nlohmann::json::parse(line)["x"].get<std::vector<double>>());
    }
  }
  Discriminator disc = train_discriminator(labeled, cfg.seed + 11);
  const int want = std::min<int>(cfg.k_sec + cfg.k_insec, static_cast<int>(pool.size()));
  const int ks = std::min(cfg.k_sec, want);
  const int ki = want - ks;
  SampleSelection sel = select_samples(disc, pool, ks, ki);
  TrainResult out;
  const int ng = g.num_generators();
  auto label_feature_vector = [&](const std::vector<double>& x, LabeledSample& s) {
    detail::SystemState st;
    st.u.assign(ng, 0);
    st.p.assign(ng, 0.0);
    for (int i = 0; i < ng; ++i) {
      st.u[i] = x[i] > 0.5 ? 1 : 0;
      st.p[i] = x[2 * ng + i];
    }
    return detail::label_state(g, st, cfg.dynamics, cfg.fcuc, s);
  };
  Dataset training = labeled;
  for (int idx : sel.secure) {
    LabeledSample s;
    if (label_feature_vector(pool[idx], s)) {
      training.push_back(std::move(s));
      ++out.active_added;
    }
  }
  for (int idx : sel.insecure) {
    LabeledSample s;
    if (label_feature_vector(pool[idx], s)) {
      training.push_back(std::move(s));
      ++out.active_added;
    }
  }

  // deterministic holdout split
  Rng rng(cfg.seed + 23);
  std::vector<int> order(training.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const size_t n_hold = size_t(cfg.holdout_fraction * training.size());
  Dataset train_set, holdout;
  for (size_t i = 0; i < order.size(); ++i)
    (i < n_hold ? holdout : train_set).push_back(training[order[i]]);

  std::vector<int> sizes{3 * ng};
  for (int h : cfg.hidden_layers) sizes.push_back(h);
  MlpPredictor pred = make_predictor(sizes, cfg.seed + 31);
  fit_input_scaling(pred, train_set);
  train_dense(pred, train_set, cfg.dense_epochs, cfg.prune.batch,
              cfg.prune.learning_rate, cfg.prune.momentum, cfg.seed + 37);
  train_sparse(pred, train_set, cfg.prune, cfg.seed + 41);

  auto [box_lo, box_hi] = embedding_box(g);
  compute_neuron_bounds(pred, box_lo, box_hi);
  pred.positivity = positivity_index(pred, train_set);
  pred.active = select_active_neurons(pred.positivity, cfg.fcuc.gamma_select);
  out.model_path = cfg.out_dir + "/model.json";
  save_predictor(pred, out.model_path);

  // tolerance sweep in the style of the validation-accuracy tables
  {
    std::ofstream sweep(cfg.out_dir + "/accuracy_sweep.csv");
    sweep << "tolerance_pct,rocof_accuracy_pct,deviation_accuracy_pct\n";
    char buf[96];
    for (int tol = 10; tol >= 5; --tol) {
      ValidationAccuracy acc = validation_accuracy(pred, holdout, tol / 100.0);
      std::snprintf(buf, sizeof buf, "%d,%.2f,%.2f\n", tol, acc.rocof_pct,
                    acc.deviation_pct);
      sweep << buf;
    }
  }
  out.holdout_10pct = validation_accuracy(pred, holdout, 0.10);
  detail::write_json(
      {{"training_samples", train_set.size()},
       {"holdout_samples", holdout.size()},
       {"active_added", out.active_added},
       {"holdout_rocof_accuracy_10pct", out.holdout_10pct.rocof_pct},
       {"holdout_deviation_accuracy_10pct", out.holdout_10pct.deviation_pct},
       {"model", out.model_path}},
      cfg.out_dir + "/train_report.json");
  return out;
}

struct SolveResult {
  std::string mode;
  UcSolution solution;
  EmbeddingReport embedding;
  double build_s = 0.0;
  std::string schedule_path;
};

inline const char* mode_name(FcucEncoding e) {
  switch (e) {
    case FcucEncoding::None: return "tscuc";
    case FcucEncoding::Erc: return "erc";
    case FcucEncoding::DnnExact: return "dnn-exact";
    case FcucEncoding::DnnActive: return "dnn-active";
  }
  return "?";
}

inline FcucEncoding mode_from_name(const std::string& name) {
  if (name == "tscuc") return FcucEncoding::None;
  if (name == "erc") return FcucEncoding::Erc;
  if (name == "dnn-exact") return FcucEncoding::DnnExact;
  if (name == "dnn-active") return FcucEncoding::DnnActive;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

// Builds and solves one scheduling mode, writes the schedule and run report.
inline SolveResult cmd_solve(const RunConfig& cfg, FcucEncoding mode) {
  GridModel g = load_grid(cfg.grid_path);
  Scenario base = load_scenario(g, cfg.scenario_path);
  std::filesystem::create_directories(cfg.out_dir);
  UcInstance inst = make_instance(g, base, true);
  FcucOptions fopts = cfg.fcuc;
  fopts.encoding = mode;
  const double t0 = milp::detail::now_seconds();
  UcModel ucm = build_tscuc(inst);
  SolveResult out;
  out.mode = mode_name(mode);
  if (mode != FcucEncoding::None) add_largest_unit_encoding(ucm, inst, fopts);
  if (mode == FcucEncoding::Erc) add_erc_constraint(ucm, inst, fopts);
  if (mode == FcucEncoding::DnnExact || mode == FcucEncoding::DnnActive) {
    MlpPredictor pred = load_predictor(cfg.out_dir + "/model.json");
    out.embedding = add_dnn_constraints(ucm, pred, fopts);
    save_embedding_report(out.embedding,
                          cfg.out_dir + "/encoding_report_" + out.mode + ".json");
  }
  out.build_s = milp::detail::now_seconds() - t0;
  out.solution = solve_and_extract(ucm, inst, cfg.solver);
  if (out.solution.status != milp::Status::Optimal) {
    // binding-family diagnosis: does the plain model solve?
    std::string diagnosis = "base model";
    if (mode != FcucEncoding::None) {
      UcModel plain = build_tscuc(inst);
      milp::Solution chk = milp::solve_milp(plain.model, cfg.solver);
      diagnosis = (chk.status == milp::Status::Optimal)
                      ? "frequency-related constraints"
                      : "base unit-commitment constraints";
    }
    detail::write_json({{"mode", out.mode},
                        {"status", milp::to_string(out.solution.status)},
                        {"binding_family", diagnosis}},
                       cfg.out_dir + "/run_report_" + out.mode + ".json");
    return out;
  }
  out.schedule_path = cfg.out_dir + "/schedule_" + out.mode + ".csv";
  save_schedule(inst, out.solution, out.schedule_path);
  detail::write_json(
      {{"mode", out.mode},
       {"status", milp::to_string(out.solution.status)},
       {"objective", out.solution.objective},
       {"best_bound", out.solution.best_bound},
       {"nodes", out.solution.nodes},
       {"build_s", out.build_s},
       {"solve_s", out.solution.wall_time_s},
       {"binaries_added", out.embedding.binaries_added},
       {"nn_nonzeros", out.embedding.nn_nonzeros}},
      cfg.out_dir + "/run_report_" + out.mode + ".json");
  return out;
}

struct HourValidation {
  int hour = 0;          // 1-based
  int tripped_gen = -1;
  double delta_p_mw = 0.0;
  double rocof_hz_s = 0.0;
  double delta_f_hz = 0.0;
  bool pass = false;
};

struct ValidationResult {
  std::vector<HourValidation> hours;
  bool all_pass = true;
  double worst_rocof = 0.0;
  double worst_dev = 0.0;
};

// Re-simulates the worst G-1 outage on the scheduled dispatch for each
// constrained hour and checks the metrics against the limits plus margin.
inline ValidationResult validate_schedule(const GridModel& g, const UcSolution& sol,
                                          const RunConfig& cfg,
                                          const std::string& trace_prefix) {
  ValidationResult out;
  const double rocof_cap = cfg.fcuc.rocof_lim_hz_s * (1.0 + cfg.validate_margin);
  const double dev_cap =
      (cfg.fcuc.f_nom_hz - cfg.fcuc.f_lim_hz) * (1.0 + cfg.validate_margin);
  for (int t1 : cfg.fcuc.constrained_periods) {
    const int t = t1 - 1;
    if (t < 0 || t >= sol.nt) continue;
    HourValidation hv;
    hv.hour = t1;
    std::vector<int> u = sol.commitment_at(t);
    std::vector<double> p = sol.dispatch_at(t);
    int worst = -1;
    double worst_p = 0.0;
    for (size_t i = 0; i < p.size(); ++i)
      if (u[i] && p[i] > worst_p + 1e-12) {
        worst_p = p[i];
        worst = static_cast<int>(i);
      }
    if (worst < 0) {
      out.all_pass = false;
      out.hours.push_back(hv);
      continue;
    }
    hv.tripped_gen = g.generators[worst].id;
    hv.delta_p_mw = worst_p;
    FrequencyTrace tr = simulate_outage(g, p, u, hv.tripped_gen, cfg.dynamics);
    FrequencyMetrics mm = measure_metrics(tr, cfg.dynamics.rocof_window_s);
    hv.rocof_hz_s = mm.rocof_max_hz_s;
    hv.delta_f_hz = mm.delta_f_max_hz;
    hv.pass = mm.rocof_max_hz_s <= rocof_cap && mm.delta_f_max_hz <= dev_cap;
    if (!trace_prefix.empty())
      save_trace(tr, trace_prefix + std::to_string(t1) + ".csv");
    out.worst_rocof = std::max(out.worst_rocof, hv.rocof_hz_s);
    out.worst_dev = std::max(out.worst_dev, hv.delta_f_hz);
    out.all_pass = out.all_pass && hv.pass;
    out.hours.push_back(hv);
  }
  return out;
}

inline ValidationResult cmd_validate(const RunConfig& cfg,
                                     const std::string& schedule_path) {
  GridModel g = load_grid(cfg.grid_path);
  Scenario base = load_scenario(g, cfg.scenario_path);
  UcInstance inst = make_instance(g, base, true);
  UcSolution sol = load_schedule(inst, schedule_path);
  std::filesystem::create_directories(cfg.out_dir);
  ValidationResult res = validate_schedule(g, sol, cfg, cfg.out_dir + "/trace_");
  nlohmann::json hours = nlohmann::json::array();
  for (const HourValidation& h : res.hours)
    hours.push_back({{"hour", h.hour},
                     {"tripped_gen", h.tripped_gen},
                     {"delta_p_mw", h.delta_p_mw},
                     {"rocof_hz_s", h.rocof_hz_s},
                     {"delta_f_hz", h.delta_f_hz},
                     {"pass", h.pass}});
  detail::write_json({{"schedule", schedule_path},
                      {"all_pass", res.all_pass},
                      {"worst_rocof_hz_s", res.worst_rocof},
                      {"worst_delta_f_hz", res.worst_dev},
                      {"hours", hours}},
                     cfg.out_dir + "/validation_report.json");
  return res;
}

struct BenchmarkRow {
  std::string model;
  double cost = 0.0;
  double wall_s = 0.0;
  double rocof_hz_s = 0.0;
  double delta_f_hz = 0.0;
  bool all_pass = false;
  std::string status = "ok";
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  // constrained-hour sweep: wall times per (hours, mode)
  std::vector<std::tuple<int, std::string, double, std::string>> sweep;
};

// Runs all four modes on the same instance, validates each by re-simulation,
// and sweeps the number of constrained hours for the two DNN modes.
inline BenchmarkReport cmd_benchmark(const RunConfig& cfg) {
  BenchmarkReport rep;
  GridModel g = load_grid(cfg.grid_path);
  const FcucEncoding modes[4] = {FcucEncoding::None, FcucEncoding::Erc,
                                 FcucEncoding::DnnExact, FcucEncoding::DnnActive};
  const char* row_names[4] = {"T-SCUC", "ERC-SCUC", "DNN-FCUC", "ALSNN-FCUC"};
  for (int k = 0; k < 4; ++k) {
    BenchmarkRow row;
    row.model = row_names[k];
    try {
      SolveResult sr = cmd_solve(cfg, modes[k]);
      if (sr.solution.status == milp::Status::Optimal) {
        row.cost = sr.solution.objective;
        row.wall_s = sr.solution.wall_time_s;
        ValidationResult vr = validate_schedule(
            g, sr.solution, cfg, cfg.out_dir + "/trace_" + sr.mode + "_h");
        row.rocof_hz_s = vr.worst_rocof;
        row.delta_f_hz = vr.worst_dev;
        row.all_pass = vr.all_pass;
      } else {
        row.status = milp::to_string(sr.solution.status);
      }
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    rep.rows.push_back(row);
  }
  {
    std::ofstream out(cfg.out_dir + "/benchmark.csv");
    out << "model,total_cost,wall_time_s,rocof_max_hz_s,delta_f_max_hz,all_pass,status\n";
    char buf[256];
    for (const BenchmarkRow& r : rep.rows) {
      std::snprintf(buf, sizeof buf, "%s,%.2f,%.3f,%.4f,%.4f,%d,%s\n", r.model.c_str(),
                    r.cost, r.wall_s, r.rocof_hz_s, r.delta_f_hz, int(r.all_pass),
                    r.status.c_str());
      out << buf;
    }
  }
  // constrained-hour sweep for the DNN modes
  for (int hours : cfg.sweep_hours) {
    RunConfig swept = cfg;
    swept.fcuc.constrained_periods.clear();
    const int first = std::max(1, 13 - hours / 2);
    for (int t = first; t < first + hours; ++t)
      if (t <= 24) swept.fcuc.constrained_periods.push_back(t);
    for (FcucEncoding mode : {FcucEncoding::DnnExact, FcucEncoding::DnnActive}) {
      try {
        SolveResult sr = cmd_solve(swept, mode);
        rep.sweep.emplace_back(hours, mode_name(mode), sr.solution.wall_time_s,
                               milp::to_string(sr.solution.status));
      } catch (const std::exception& e) {
        rep.sweep.emplace_back(hours, mode_name(mode), 0.0, "error");
      }
    }
  }
  {
    std::ofstream out(cfg.out_dir + "/benchmark_sweep.csv");
    out << "constrained_hours,mode,wall_time_s,status\n";
    char buf[128];
    for (const auto& [hours, mode, wall, status] : rep.sweep) {
      std::snprintf(buf, sizeof buf, "%d,%s,%.3f,%s\n", hours, mode.c_str(), wall,
                    status.c_str());
      out << buf;
    }
  }
  return rep;
}

}  // namespace fcuc
