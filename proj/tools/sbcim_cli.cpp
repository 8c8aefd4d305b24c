// sbcim command-line harness: gen | solve | bench | sweep | oracle.
// Exit codes: 0 success, 2 validation/usage error, 1 runtime error.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "sbcim/sbcim.h"

namespace {

int exit_code_for(sbcim_status status) {
  switch (status) {
    case SBCIM_OK:
      return 0;
    case SBCIM_ERR_INVALID_ARGUMENT:
    case SBCIM_ERR_DIMENSION_MISMATCH:
    case SBCIM_ERR_PARSE:
    case SBCIM_ERR_VALIDATION:
    case SBCIM_ERR_TOO_LARGE:
      return 2;
    default:
      return 1;
  }
}

int report_failure(sbcim_status status) {
  std::fprintf(stderr, "sbcim: %s: %s\n", sbcim_status_name(status),
               sbcim_last_error());
  return exit_code_for(status);
}

struct CommonFlags {
  std::string config;
  std::string out;
  std::string engine;
  uint64_t seed = 0;
  uint32_t trials = 0;
  uint32_t iterations = 0;
  bool has_seed = false, has_trials = false, has_iterations = false;

  void attach(CLI::App* cmd, bool with_engine = true) {
    cmd->add_option("--config", config, "config file (see docs/bench.example.conf)");
    cmd->add_option("--out", out, "output directory");
    if (with_engine)
      cmd->add_option("--engine", engine, "ideal | hardware")
          ->check(CLI::IsMember({"ideal", "hardware"}));
    cmd->add_option("--seed", seed, "base seed")->each([this](const std::string&) {
      has_seed = true;
    });
    cmd->add_option("--trials", trials, "trials per instance")
        ->each([this](const std::string&) { has_trials = true; });
    cmd->add_option("--iterations", iterations, "SB cycles per trial")
        ->each([this](const std::string&) { has_iterations = true; });
  }

  sbcim_cmd_overrides overrides() const {
    sbcim_cmd_overrides ov{};
    ov.out_dir = out.empty() ? nullptr : out.c_str();
    ov.engine = engine.empty() ? nullptr : engine.c_str();
    ov.has_seed = has_seed;
    ov.seed = seed;
    ov.has_trials = has_trials;
    ov.trials = trials;
    ov.has_iterations = has_iterations;
    ov.iterations = iterations;
    return ov;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulated-bifurcation MAXCUT solver and chip-model benchmark"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate random instances");
  uint32_t gen_n = 60, gen_count = 10;
  double gen_density = 0.5;
  uint64_t gen_seed = 1;
  std::string gen_out = "out";
  gen->add_option("--n", gen_n, "node count")->check(CLI::Range(2u, 100000u));
  gen->add_option("--density", gen_density, "edge probability in (0,1]");
  gen->add_option("--count", gen_count, "number of instances");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output directory");

  // solve
  auto* solve = app.add_subcommand("solve", "run trials on one instance");
  std::string solve_instance;
  solve->add_option("instance", solve_instance, "instance file")->required();
  CommonFlags solve_flags;
  solve_flags.attach(solve);

  // bench
  auto* bench = app.add_subcommand("bench", "reproduce the benchmark experiments");
  CommonFlags bench_flags;
  bench_flags.attach(bench);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid-scan loop parameters");
  CommonFlags sweep_flags;
  sweep_flags.attach(sweep, /*with_engine=*/false);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "compute and store the denominator");
  std::string oracle_instance;
  uint32_t oracle_restarts = 1000, oracle_max_flips = 0;
  uint64_t oracle_seed = 1;
  oracle->add_option("instance", oracle_instance, "instance file")->required();
  oracle->add_option("--restarts", oracle_restarts, "local-search restarts");
  oracle->add_option("--max-flips", oracle_max_flips, "flip budget (0: 10n)");
  oracle->add_option("--seed", oracle_seed, "local-search seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (gen->parsed()) {
    sbcim_status st =
        sbcim_cmd_gen(gen_n, gen_density, gen_count, gen_seed, gen_out.c_str());
    if (st != SBCIM_OK) return report_failure(st);
    std::printf("wrote %u instances to %s (manifest.json alongside)\n", gen_count,
                gen_out.c_str());
    return 0;
  }

  if (solve->parsed()) {
    auto ov = solve_flags.overrides();
    sbcim_solve_summary summary;
    sbcim_status st = sbcim_cmd_solve(
        solve_instance.c_str(),
        solve_flags.config.empty() ? nullptr : solve_flags.config.c_str(), &ov,
        &summary);
    if (st != SBCIM_OK) return report_failure(st);
    std::printf("denominator: %" PRIu64 " (%s)\n", summary.denominator,
                summary.provenance);
    for (uint32_t i = 0; i < summary.n_marks; ++i)
      std::printf("iteration %3u: mean best-so-far accuracy %.4f\n",
                  summary.marks[i].iteration, summary.marks[i].mean_acc);
    std::printf("best cut %" PRIu64 " (accuracy %.4f)\n", summary.best_cut,
                summary.best_acc);
    return 0;
  }

  if (bench->parsed()) {
    if (bench_flags.config.empty()) {
      std::fprintf(stderr, "sbcim: bench requires --config\n");
      return 2;
    }
    auto ov = bench_flags.overrides();
    sbcim_bench_summary summary;
    sbcim_status st = sbcim_cmd_bench(bench_flags.config.c_str(), &ov, &summary);
    if (st != SBCIM_OK) return report_failure(st);
    std::printf("%u instances x %u trials x %u iterations\n", summary.instances,
                summary.trials, summary.iterations);
    std::printf("pooled mean best-so-far accuracy at iteration %u: %.4f\n",
                summary.iterations, summary.pooled_mean_acc_final);
    std::printf("report: %s\n", summary.report_json);
    std::printf("csv:    %s\n", summary.report_csv);
    std::printf("trials: %s\n", summary.trials_jsonl);
    return 0;
  }

  if (sweep->parsed()) {
    if (sweep_flags.config.empty()) {
      std::fprintf(stderr, "sbcim: sweep requires --config\n");
      return 2;
    }
    auto ov = sweep_flags.overrides();
    sbcim_sweep_summary summary;
    sbcim_status st = sbcim_cmd_sweep(sweep_flags.config.c_str(), &ov, &summary);
    if (st != SBCIM_OK) return report_failure(st);
    std::printf("%" PRIu64 " grid points\n", summary.grid_points);
    std::printf("best point: alpha=%g beta=%g amplitude0=%g decay_g=%g (mean "
                "accuracy %.4f)\n",
                summary.best_alpha, summary.best_beta, summary.best_amplitude0,
                summary.best_decay_g, summary.best_mean_acc);
    std::printf("max gap vs per-instance best: %.4f\n",
                summary.max_gap_vs_instance_best);
    std::printf("csv: %s\n", summary.csv);
    return 0;
  }

  if (oracle->parsed()) {
    sbcim_oracle_outcome outcome;
    sbcim_status st = sbcim_cmd_oracle(oracle_instance.c_str(), oracle_restarts,
                                       oracle_max_flips, oracle_seed, &outcome);
    if (st != SBCIM_OK) return report_failure(st);
    std::printf("best_known=%" PRIu64 " provenance=%s (%s)\n", outcome.value,
                outcome.provenance, outcome.updated ? "updated" : "unchanged");
    return 0;
  }

  return 2;
}
