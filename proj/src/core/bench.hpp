#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/baselines.hpp"
#include "core/graph.hpp"
#include "core/hw.hpp"
#include "core/sb.hpp"

namespace sbcim {

enum class Engine { ideal, hardware };

struct GeneratorSpec {
  uint32_t n = 60;
  double density = 0.5;
  uint32_t count = 10;
  uint64_t seed = 1;

  void validate() const;
};

// One self-describing config document drives every command; sections map
// onto the engine/config types ([bench], [instances], [solver], [noise],
// [hardware], [dac], [oracle], [gw], [sweep]). See docs/bench.example.conf.
struct BenchConfig {
  Engine engine = Engine::ideal;
  std::vector<std::string> instance_files;
  std::optional<GeneratorSpec> generator;
  uint32_t trials = 100;
  uint64_t seed = 1;
  std::vector<double> thresholds{0.92, 0.95};
  std::string out_dir = "out";

  SbParams sb;
  NoiseSchedule noise = NoiseSchedule::decaying(24.0, 0.1);
  HwConfig hw;
  NoiseDacConfig dac;
  uint64_t mc_seed = 1;

  LocalSearchParams oracle_ls;
  GwParams gw;
  bool gw_enabled = true;

  std::vector<double> sweep_alpha;
  std::vector<double> sweep_beta;
  std::vector<double> sweep_amplitude0;
  std::vector<double> sweep_decay_g;

  void validate() const;
};

BenchConfig load_bench_config(const std::string& path);

struct BenchOverrides {
  std::optional<std::string> out_dir;
  std::optional<Engine> engine;
  std::optional<uint64_t> seed;
  std::optional<uint32_t> trials;
  std::optional<uint32_t> iterations;
};

void apply_overrides(BenchConfig& config, const BenchOverrides& overrides);

struct DenominatorRecord {
  uint64_t value = 0;
  std::string provenance;  // "exact" | "local-search(restarts=N)" | "stored"
};

// Accuracy denominator policy: exact ground state up to the exhaustive cap,
// long local search beyond it.
DenominatorRecord oracle_denominator(const ProblemInstance& instance,
                                     const LocalSearchParams& ls);

struct GenResult {
  std::vector<std::string> files;
  std::string manifest_path;
};

GenResult cmd_gen(const GeneratorSpec& spec, const std::string& out_dir);

struct SolveMark {
  uint32_t iteration;  // 1-based SB cycle count
  double mean_acc;
};

struct SolveSummary {
  std::string instance_id;
  DenominatorRecord denominator;
  uint64_t best_cut = 0;
  double best_acc = 0.0;
  std::vector<SolveMark> marks;
  std::string trials_path;
  std::string summary_path;
};

SolveSummary cmd_solve(const std::string& instance_path, const BenchConfig& config);

struct IterationRow {
  uint32_t iteration = 0;  // 1-based
  double mean_acc = 0.0;
  double std_acc = 0.0;
  std::vector<double> p_ge;  // per threshold, best-so-far semantics
};

struct GwReference {
  double expected_acc = 0.0;
  double best_acc = 0.0;
  int32_t crossover_iteration = -1;  // first iteration with mean_acc >= expected_acc
};

struct InstanceReport {
  std::string id;
  DenominatorRecord denominator;
  uint64_t best_cut = 0;
  double best_acc = 0.0;
  std::optional<GwReference> gw;
  std::vector<IterationRow> rows;
};

struct BenchReport {
  Engine engine = Engine::ideal;
  uint32_t trials = 0;
  uint32_t iterations = 0;
  std::vector<double> thresholds;
  std::vector<InstanceReport> instances;
  InstanceReport pooled;  // id "ALL", across every (instance, trial)
  double iteration_latency_seconds = 0.0;
  std::string report_json;
  std::string report_csv;
  std::string trials_jsonl;
};

BenchReport cmd_bench(const BenchConfig& config);

struct SweepRow {
  double alpha = 0, beta = 0, amplitude0 = 0, decay_g = 0;
  double mean_acc = 0;
  std::vector<double> per_instance_acc;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t best_row = 0;
  // Largest shortfall of the single best point against each instance's own
  // best grid point; small values back the single-tuning-point claim.
  double max_gap_vs_instance_best = 0.0;
  std::string csv_path;
  std::string summary_path;
};

SweepResult cmd_sweep(const BenchConfig& config);

struct OracleOutcome {
  DenominatorRecord record;
  bool updated = false;
  bool had_previous = false;
  uint64_t previous = 0;
};

// Computes the denominator and writes it back into the instance file;
// a stored best_known is never lowered.
OracleOutcome cmd_oracle(const std::string& instance_path,
                         const LocalSearchParams& ls);

}  // namespace sbcim
