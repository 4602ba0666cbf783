#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "fcuc/pipeline.hpp"

using namespace fcuc;

int main(int argc, char** argv) {
  CLI::App app{"fcuc: frequency-constrained unit commitment toolkit"};
  app.require_subcommand(1);

  std::string config_path, mode = "tscuc", out_override, schedule_path;
  long long seed_override = -1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (json)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed_override, "override the configured seed");
    sub->add_option("--out", out_override, "override the output directory");
  };
  CLI::App* dg = app.add_subcommand("datagen", "sample scenarios, solve, label states");
  add_common(dg);
  CLI::App* tr = app.add_subcommand("train", "active sampling plus sparse training");
  add_common(tr);
  CLI::App* so = app.add_subcommand("solve", "build and solve one scheduling mode");
  add_common(so);
  so->add_option("--mode", mode, "tscuc | erc | dnn-exact | dnn-active");
  CLI::App* va = app.add_subcommand("validate", "re-simulate a schedule hour by hour");
  add_common(va);
  va->add_option("--schedule", schedule_path, "schedule csv path")->required();
  CLI::App* be = app.add_subcommand("benchmark", "all four modes plus the hour sweep");
  add_common(be);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.out_dir = out_override;

    if (dg->parsed()) {
      DatagenResult r = cmd_datagen(cfg);
      std::printf("datagen: %d labeled, %d unlabeled (%d scenario solves, %d skipped)\n",
                  r.labeled, r.unlabeled, r.scenario_solves_ok,
                  r.scenario_solves_skipped);
    } else if (tr->parsed()) {
      TrainResult r = cmd_train(cfg);
      std::printf("train: model at %s, +%d actively labeled\n", r.model_path.c_str(),
                  r.active_added);
      std::printf("holdout accuracy at 10%% tolerance: rocof %.2f%%, deviation %.2f%%\n",
                  r.holdout_10pct.rocof_pct, r.holdout_10pct.deviation_pct);
    } else if (so->parsed()) {
      SolveResult r = cmd_solve(cfg, mode_from_name(mode));
      std::printf("solve %s: %s", r.mode.c_str(), milp::to_string(r.solution.status));
      if (r.solution.status == milp::Status::Optimal)
        std::printf(", cost %.2f, %ld nodes, %.2f s", r.solution.objective,
                    r.solution.nodes, r.solution.wall_time_s);
      std::printf("\n");
    } else if (va->parsed()) {
      ValidationResult r = cmd_validate(cfg, schedule_path);
      for (const HourValidation& h : r.hours)
        std::printf("hour %2d: trip gen %d (%.1f MW) rocof %.3f Hz/s dev %.3f Hz -> %s\n",
                    h.hour, h.tripped_gen, h.delta_p_mw, h.rocof_hz_s, h.delta_f_hz,
                    h.pass ? "pass" : "FAIL");
      std::printf("validate: %s\n",
                  r.all_pass ? "all constrained hours pass" : "violations found");
    } else if (be->parsed()) {
      BenchmarkReport r = cmd_benchmark(cfg);
      std::printf("%-12s %12s %10s %10s %10s %s\n", "model", "cost", "time_s", "rocof",
                  "dev", "pass");
      for (const BenchmarkRow& row : r.rows)
        std::printf("%-12s %12.2f %10.2f %10.3f %10.3f %s\n", row.model.c_str(),
                    row.cost, row.wall_s, row.rocof_hz_s, row.delta_f_hz,
                    row.status != "ok" ? row.status.c_str()
                                       : (row.all_pass ? "yes" : "no"));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
