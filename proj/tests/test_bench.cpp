#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"

#include "core/bench.hpp"

using namespace sbcim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const char* stem) {
    path = fs::path("/tmp") /
           (std::string("sbcim_bench_") + stem + "_" + std::to_string(getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
}

BenchConfig small_config(const std::string& out_dir) {
  BenchConfig cfg;
  cfg.generator = GeneratorSpec{16, 0.5, 2, 99};
  cfg.trials = 10;
  cfg.seed = 5;
  cfg.sb = SbParams::tuned_for(16, 0.5);
  cfg.sb.iterations = 8;
  cfg.noise = NoiseSchedule::tuned_for(16, 0.5);
  cfg.thresholds = {0.1, 0.9, 0.99};
  cfg.gw.roundings = 30;
  cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("config file parsing accepts the shipped example") {
  auto cfg = load_bench_config("docs/bench.example.conf");
  CHECK(cfg.engine == Engine::ideal);
  CHECK(cfg.trials == 100);
  CHECK(cfg.sb.alpha == 10.0);
  CHECK(cfg.noise.kind == NoiseKind::uniform_decaying);
  CHECK(cfg.noise.amplitude0 == 24.0);
  CHECK(cfg.generator.has_value());
  CHECK(cfg.generator->count == 10);
  CHECK(cfg.thresholds == std::vector<double>{0.92, 0.95});
  CHECK(cfg.sweep_alpha == std::vector<double>{8.0, 10.0, 12.0});
  CHECK(cfg.dac.branch_doubling);
}

TEST_CASE("config errors carry file, line and field context") {
  TempDir tmp("cfg");
  auto path = (tmp.path / "bad.conf").string();

  write_text(path, "[bench]\nturbo = on\n");
  CHECK_THROWS_WITH_AS(load_bench_config(path),
                       doctest::Contains("unknown key [bench] turbo"), Error);

  write_text(path, "[bench]\ntrials = many\n");
  CHECK_THROWS_WITH_AS(load_bench_config(path), doctest::Contains("expected integer"),
                       Error);

  write_text(path, "[bench]\ntrials = 5\ntrials = 6\n");
  CHECK_THROWS_WITH_AS(load_bench_config(path), doctest::Contains("duplicate key"),
                       Error);

  write_text(path, "[bench]\nthresholds = 0 0.5\n[instances]\nn = 8\n");
  CHECK_THROWS_WITH_AS(load_bench_config(path), doctest::Contains("(0, 1]"), Error);

  write_text(path, "stray = 1\n");
  CHECK_THROWS_WITH_AS(load_bench_config(path),
                       doctest::Contains("key before any [section]"), Error);

  write_text(path, "[bench]\ntrials = 5\n");
  CHECK_THROWS_WITH_AS(load_bench_config(path), doctest::Contains("[instances]"),
                       Error);
}

TEST_CASE("cmd_gen writes deterministic instances plus a manifest") {
  TempDir tmp("gen");
  GeneratorSpec spec{60, 0.5, 10, 7};
  auto a = cmd_gen(spec, (tmp.path / "a").string());
  auto b = cmd_gen(spec, (tmp.path / "b").string());
  REQUIRE(a.files.size() == 10);
  for (std::size_t i = 0; i < 10; ++i)
    CHECK(slurp(a.files[i]) == slurp(b.files[i]));
  CHECK(slurp(a.manifest_path) == slurp(b.manifest_path));

  // binomial sanity: every instance within 4 sigma of the mean edge count
  for (const auto& f : a.files) {
    auto inst = load_instance(f);
    CHECK(std::abs(double(inst.coupling.edge_count()) - 885.0) <= 4.0 * 21.04);
  }

  auto k4 = cmd_gen(GeneratorSpec{4, 1.0, 1, 1}, (tmp.path / "k4").string());
  CHECK(load_instance(k4.files[0]).coupling.edge_count() == 6);
}

TEST_CASE("oracle denominator policy and the oracle command") {
  TempDir tmp("oracle");
  LocalSearchParams ls;
  ls.restarts = 200;

  auto small = random_graph(12, 0.5, 1);
  auto exact = oracle_denominator(small, ls);
  CHECK(exact.provenance == "exact");
  CHECK(exact.value == brute_force_ground_state(small.coupling).cut);

  auto large = random_graph(40, 0.5, 2);
  auto heur = oracle_denominator(large, ls);
  CHECK(heur.provenance == "local-search(restarts=200)");

  // command writes the record back and never lowers it
  auto path = (tmp.path / "g.graph").string();
  save_instance(small, path);
  auto first = cmd_oracle(path, ls);
  CHECK(first.updated);
  CHECK(first.record.provenance == "exact");
  auto stored = load_instance(path);
  REQUIRE(stored.best_known.has_value());
  CHECK(stored.best_known->cut == exact.value);

  auto again = cmd_oracle(path, ls);
  CHECK_FALSE(again.updated);
  CHECK(again.record.value == exact.value);

  // a stored value above anything computable stays put
  auto inflated = stored;
  inflated.best_known = BestKnown{stored.coupling.edge_count(), "stored"};
  save_instance(inflated, path);
  auto kept = cmd_oracle(path, ls);
  CHECK_FALSE(kept.updated);
  CHECK(kept.record.value == inflated.best_known->cut);
}

TEST_CASE("cmd_solve writes trial lines and accuracy marks") {
  TempDir tmp("solve");
  auto inst = random_graph(16, 0.5, 3);
  auto path = (tmp.path / "g.graph").string();
  save_instance(inst, path);

  auto cfg = small_config((tmp.path / "out").string());
  cfg.generator.reset();
  cfg.instance_files = {path};
  cfg.sb.iterations = 12;

  auto summary = cmd_solve(path, cfg);
  CHECK(summary.denominator.provenance == "exact");  // computed on the fly
  REQUIRE(summary.marks.size() == 3);                // 5, 10, 12
  CHECK(summary.marks[0].iteration == 5);
  CHECK(summary.marks[2].iteration == 12);
  CHECK(summary.best_acc <= 1.0);
  for (std::size_t i = 1; i < summary.marks.size(); ++i)
    CHECK(summary.marks[i].mean_acc >= summary.marks[i - 1].mean_acc);

  std::istringstream lines(slurp(summary.trials_path));
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    auto row = nlohmann::json::parse(line);
    CHECK(row.contains("instance_id"));
    CHECK(row.contains("trial_seed"));
    CHECK(row.contains("trajectory"));
    CHECK(row.contains("best_cut"));
    CHECK(row.contains("best_iteration"));
    CHECK(row["trajectory"].size() == 12);
    ++rows;
  }
  CHECK(rows == int(cfg.trials));

  // boundary: one trial, one iteration -> a single row and a single mark
  cfg.trials = 1;
  cfg.sb.iterations = 1;
  auto tiny = cmd_solve(path, cfg);
  REQUIRE(tiny.marks.size() == 1);
  CHECK(tiny.marks[0].iteration == 1);
  std::istringstream tiny_lines(slurp(tiny.trials_path));
  rows = 0;
  while (std::getline(tiny_lines, line)) ++rows;
  CHECK(rows == 1);
}

TEST_CASE("cmd_bench aggregates, reports GW, and keeps accounting") {
  TempDir tmp("bench");
  auto cfg = small_config((tmp.path / "out").string());
  auto report = cmd_bench(cfg);

  REQUIRE(report.instances.size() == 2);
  for (const auto& rep : report.instances) {
    CHECK(rep.denominator.provenance == "exact");
    REQUIRE(rep.rows.size() == cfg.sb.iterations);
    for (std::size_t t = 0; t < cfg.thresholds.size(); ++t)
      for (std::size_t k = 1; k < rep.rows.size(); ++k)
        CHECK(rep.rows[k].p_ge[t] >= rep.rows[k - 1].p_ge[t]);  // best-so-far
    for (const auto& row : rep.rows) {
      CHECK(row.mean_acc <= 1.0);  // exact denominator bounds accuracy
      CHECK(row.p_ge[0] == 1.0);   // threshold far below any reachable accuracy
    }
    REQUIRE(rep.gw.has_value());
    CHECK(rep.gw->expected_acc > 0.5);
    CHECK(rep.gw->best_acc <= 1.0);
  }
  CHECK(report.pooled.id == "ALL");
  REQUIRE(report.pooled.rows.size() == cfg.sb.iterations);
  CHECK(report.iteration_latency_seconds == 30e-9);

  // accounting: trials x instances rows, none dropped
  std::istringstream lines(slurp(report.trials_jsonl));
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == int(cfg.trials * 2));

  auto j = nlohmann::json::parse(slurp(report.report_json));
  CHECK(j["instances"].size() == 2);
  CHECK(j["pooled"]["id"] == "ALL");
  CHECK(j["hardware_equivalent"]["iteration_latency_seconds"] == 30e-9);

  // csv: header + (instances + pooled) * iterations
  std::istringstream csv(slurp(report.report_csv));
  int csv_rows = 0;
  std::string first;
  while (std::getline(csv, line)) {
    if (csv_rows == 0) first = line;
    ++csv_rows;
  }
  CHECK(first == "instance_id,iteration,mean_acc,std_acc,p_ge_0.1,p_ge_0.9,p_ge_0.99");
  CHECK(csv_rows == 1 + 3 * int(cfg.sb.iterations));
}

TEST_CASE("cmd_bench output bytes are reproducible and worker-independent") {
  TempDir tmp("repro");
  auto cfg = small_config((tmp.path / "a").string());

  setenv("SBCIM_WORKERS", "1", 1);
  auto a = cmd_bench(cfg);
  cfg.out_dir = (tmp.path / "b").string();
  setenv("SBCIM_WORKERS", "4", 1);
  auto b = cmd_bench(cfg);
  unsetenv("SBCIM_WORKERS");

  CHECK(slurp(a.report_json) == slurp(b.report_json));
  CHECK(slurp(a.report_csv) == slurp(b.report_csv));
  CHECK(slurp(a.trials_jsonl) == slurp(b.trials_jsonl));
}

TEST_CASE("cmd_bench demands denominators for file instances") {
  TempDir tmp("nodenom");
  auto inst = random_graph(14, 0.5, 8);
  auto path = (tmp.path / "g.graph").string();
  save_instance(inst, path);

  auto cfg = small_config((tmp.path / "out").string());
  cfg.generator.reset();
  cfg.instance_files = {path};
  CHECK_THROWS_WITH_AS(cmd_bench(cfg), doctest::Contains("oracle"), Error);
}

TEST_CASE("cmd_bench rejects mixed denominator provenance") {
  TempDir tmp("mixed");
  auto a = random_graph(12, 0.5, 1);
  a.best_known = BestKnown{brute_force_ground_state(a.coupling).cut, "exact"};
  auto b = random_graph(12, 0.5, 2);
  b.best_known = BestKnown{brute_force_ground_state(b.coupling).cut,
                           "local-search(restarts=10)"};
  auto pa = (tmp.path / "a.graph").string();
  auto pb = (tmp.path / "b.graph").string();
  save_instance(a, pa);
  save_instance(b, pb);

  auto cfg = small_config((tmp.path / "out").string());
  cfg.generator.reset();
  cfg.instance_files = {pa, pb};
  CHECK_THROWS_WITH_AS(cmd_bench(cfg), doctest::Contains("mixed denominator"), Error);
}

TEST_CASE("cmd_sweep: degenerate grid, disabled coupling, gap check") {
  TempDir tmp("sweep");
  auto cfg = small_config((tmp.path / "out").string());
  cfg.trials = 20;

  // degenerate grid: single point at the config values
  auto single = cmd_sweep(cfg);
  REQUIRE(single.rows.size() == 1);
  CHECK(single.best_row == 0);
  CHECK(single.rows[0].alpha == cfg.sb.alpha);
  CHECK(single.max_gap_vs_instance_best == 0.0);

  // beta = 0 freezes the random initial assignment
  cfg.out_dir = (tmp.path / "out2").string();
  cfg.sweep_alpha = {1.0};
  cfg.sweep_beta = {0.0};
  cfg.sweep_amplitude0 = {0.0};
  cfg.sweep_decay_g = {0.1};
  auto frozen = cmd_sweep(cfg);
  REQUIRE(frozen.rows.size() == 1);

  // independent estimate of the random-assignment accuracy
  double est = 0;
  int count = 0;
  Xoshiro256ss rng(404);
  for (uint32_t i = 0; i < cfg.generator->count; ++i) {
    auto inst = random_graph(cfg.generator->n, cfg.generator->density,
                             split_seed(cfg.generator->seed, i));
    double denom = double(brute_force_ground_state(inst.coupling).cut);
    for (int s = 0; s < 400; ++s) {
      auto x = random_spins(cfg.generator->n, rng);
      est += double(cut_size(inst.coupling, x)) / denom;
      ++count;
    }
  }
  est /= count;
  CHECK(std::abs(frozen.rows[0].mean_acc - est) <= 0.03);
}

TEST_CASE("apply_overrides touches only the requested fields") {
  auto cfg = small_config("out");
  BenchOverrides ov;
  ov.engine = Engine::hardware;
  ov.trials = 3;
  ov.iterations = 4;
  apply_overrides(cfg, ov);
  CHECK(cfg.engine == Engine::hardware);
  CHECK(cfg.trials == 3);
  CHECK(cfg.sb.iterations == 4);
  CHECK(cfg.seed == 5);
  CHECK(cfg.out_dir == "out");
}
