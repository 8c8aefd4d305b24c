#include "core/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "core/parallel.hpp"

namespace sbcim {

using nlohmann::json;

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// config document

namespace {

struct IniEntry {
  std::string section, key, value;
  std::size_t line = 0;
  bool used = false;
};

class IniDoc {
public:
  static IniDoc parse(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open config " + path);
    IniDoc doc;
    doc.path_ = path;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      strip_comment(line);
      std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']')
          doc.fail_at(line_no, "malformed section header '" + trimmed + "'");
        section = trimmed.substr(1, trimmed.size() - 2);
        if (section.empty()) doc.fail_at(line_no, "empty section name");
        continue;
      }
      auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        doc.fail_at(line_no, "expected 'key = value', got '" + trimmed + "'");
      if (section.empty()) doc.fail_at(line_no, "key before any [section]");
      IniEntry e;
      e.section = section;
      e.key = trim(trimmed.substr(0, eq));
      e.value = trim(trimmed.substr(eq + 1));
      e.line = line_no;
      if (e.key.empty()) doc.fail_at(line_no, "empty key");
      for (const auto& other : doc.entries_)
        if (other.section == e.section && other.key == e.key)
          doc.fail_at(line_no, "duplicate key [" + e.section + "] " + e.key);
      doc.entries_.push_back(std::move(e));
    }
    return doc;
  }

  [[noreturn]] void fail_at(std::size_t line, const std::string& what) const {
    fail(ErrorCode::parse, path_ + ":" + std::to_string(line) + ": " + what);
  }

  const IniEntry* find(const std::string& section, const std::string& key) {
    for (auto& e : entries_)
      if (e.section == section && e.key == key) {
        e.used = true;
        return &e;
      }
    return nullptr;
  }

  bool has_section(const std::string& section) const {
    for (const auto& e : entries_)
      if (e.section == section) return true;
    return false;
  }

  void take_double(const std::string& sec, const std::string& key, double& out) {
    if (const auto* e = find(sec, key)) out = parse_double(*e);
  }

  void take_u64(const std::string& sec, const std::string& key, uint64_t& out) {
    if (const auto* e = find(sec, key)) out = parse_u64(*e);
  }

  void take_u32(const std::string& sec, const std::string& key, uint32_t& out) {
    if (const auto* e = find(sec, key)) {
      uint64_t v = parse_u64(*e);
      if (v > 0xFFFFFFFFull)
        fail_at(e->line, "[" + sec + "] " + key + ": value out of range");
      out = uint32_t(v);
    }
  }

  void take_bool(const std::string& sec, const std::string& key, bool& out) {
    if (const auto* e = find(sec, key)) {
      if (e->value == "true")
        out = true;
      else if (e->value == "false")
        out = false;
      else
        fail_at(e->line, "[" + sec + "] " + key + ": expected true or false");
    }
  }

  void take_string(const std::string& sec, const std::string& key, std::string& out) {
    if (const auto* e = find(sec, key)) out = e->value;
  }

  void take_list_double(const std::string& sec, const std::string& key,
                        std::vector<double>& out) {
    if (const auto* e = find(sec, key)) {
      out.clear();
      std::istringstream is(e->value);
      std::string tok;
      while (is >> tok) out.push_back(parse_double_token(*e, tok));
    }
  }

  void take_list_string(const std::string& sec, const std::string& key,
                        std::vector<std::string>& out) {
    if (const auto* e = find(sec, key)) {
      out.clear();
      std::istringstream is(e->value);
      std::string tok;
      while (is >> tok) out.push_back(tok);
    }
  }

  void finish() const {
    for (const auto& e : entries_)
      if (!e.used)
        fail(ErrorCode::validation, path_ + ":" + std::to_string(e.line) +
                                        ": unknown key [" + e.section + "] " + e.key);
  }

private:
  static std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
  }

  // comments start at line begin or after whitespace
  static void strip_comment(std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if ((line[i] == '#' || line[i] == ';') &&
          (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.resize(i);
        return;
      }
    }
  }

  double parse_double_token(const IniEntry& e, const std::string& tok) const {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.empty())
      fail_at(e.line, "[" + e.section + "] " + e.key + ": expected number, got '" +
                          tok + "'");
    return v;
  }

  double parse_double(const IniEntry& e) const { return parse_double_token(e, e.value); }

  uint64_t parse_u64(const IniEntry& e) const {
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc{} || p != e.value.data() + e.value.size())
      fail_at(e.line, "[" + e.section + "] " + e.key + ": expected integer, got '" +
                          e.value + "'");
    return v;
  }

  std::vector<IniEntry> entries_;
  std::string path_;
};

std::string format_double(double v, const char* fmt = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string threshold_label(double tau) { return format_double(tau, "%g"); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << content;
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

std::string instance_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

}  // namespace

void GeneratorSpec::validate() const {
  if (n < 2) fail(ErrorCode::validation, "[instances] n must be >= 2");
  if (!(density > 0.0) || !(density <= 1.0))
    fail(ErrorCode::validation, "[instances] density must be in (0, 1]");
  if (count < 1) fail(ErrorCode::validation, "[instances] count must be >= 1");
}

void BenchConfig::validate() const {
  if (trials < 1) fail(ErrorCode::validation, "[bench] trials must be >= 1");
  if (out_dir.empty()) fail(ErrorCode::validation, "[bench] out must not be empty");
  if (thresholds.empty())
    fail(ErrorCode::validation, "[bench] thresholds must not be empty");
  for (double t : thresholds)
    if (!(t > 0.0) || !(t <= 1.0))
      fail(ErrorCode::validation, "[bench] thresholds must lie in (0, 1]");
  if (instance_files.empty() && !generator)
    fail(ErrorCode::validation,
         "[instances] give either files or a generator spec (n/density/count/seed)");
  if (!instance_files.empty() && generator)
    fail(ErrorCode::validation, "[instances] files and generator spec are exclusive");
  if (generator) generator->validate();
  sb.validate();
  noise.validate();
  hw.validate();
  dac.validate();
  oracle_ls.validate();
  gw.validate();
}

BenchConfig load_bench_config(const std::string& path) {
  BenchConfig cfg;
  IniDoc doc = IniDoc::parse(path);

  if (const auto* e = doc.find("bench", "engine")) {
    if (e->value == "ideal")
      cfg.engine = Engine::ideal;
    else if (e->value == "hardware")
      cfg.engine = Engine::hardware;
    else
      doc.fail_at(e->line, "[bench] engine must be 'ideal' or 'hardware'");
  }
  doc.take_u32("bench", "trials", cfg.trials);
  doc.take_u64("bench", "seed", cfg.seed);
  doc.take_list_double("bench", "thresholds", cfg.thresholds);
  doc.take_string("bench", "out", cfg.out_dir);

  doc.take_list_string("instances", "files", cfg.instance_files);
  if (cfg.instance_files.empty() && doc.has_section("instances")) {
    GeneratorSpec spec;
    doc.take_u32("instances", "n", spec.n);
    doc.take_double("instances", "density", spec.density);
    doc.take_u32("instances", "count", spec.count);
    doc.take_u64("instances", "seed", spec.seed);
    cfg.generator = spec;
  }

  doc.take_double("solver", "alpha", cfg.sb.alpha);
  doc.take_double("solver", "beta", cfg.sb.beta);
  doc.take_u32("solver", "iterations", cfg.sb.iterations);

  if (const auto* e = doc.find("noise", "kind")) {
    if (e->value == "none")
      cfg.noise.kind = NoiseKind::none;
    else if (e->value == "uniform-constant")
      cfg.noise.kind = NoiseKind::uniform_constant;
    else if (e->value == "uniform-decaying")
      cfg.noise.kind = NoiseKind::uniform_decaying;
    else
      doc.fail_at(e->line,
                  "[noise] kind must be none, uniform-constant or uniform-decaying");
  }
  doc.take_double("noise", "amplitude0", cfg.noise.amplitude0);
  doc.take_u32("noise", "levels", cfg.noise.levels);
  doc.take_double("noise", "decay_g", cfg.noise.decay_g);

  doc.take_double("hardware", "i_fb", cfg.hw.i_fb);
  doc.take_double("hardware", "i_c", cfg.hw.i_c);
  doc.take_double("hardware", "c_bl", cfg.hw.c_bl);
  doc.take_double("hardware", "t_pulse", cfg.hw.t_pulse);
  doc.take_double("hardware", "v_precharge", cfg.hw.v_precharge);
  doc.take_double("hardware", "sigma_cell", cfg.hw.sigma_cell);
  doc.take_double("hardware", "i_leak", cfg.hw.i_leak);
  doc.take_double("hardware", "clock_hz", cfg.hw.clock_hz);
  doc.take_u32("hardware", "cycles_per_iteration", cfg.hw.cycles_per_iteration);
  doc.take_double("hardware", "sigma_offset", cfg.hw.sigma_offset);
  doc.take_double("hardware", "trim_lsb", cfg.hw.trim_lsb);
  if (const auto* e = doc.find("hardware", "noise_mode")) {
    if (e->value == "shared")
      cfg.hw.noise_mode = NoiseMode::shared_magnitude;
    else if (e->value == "per-column")
      cfg.hw.noise_mode = NoiseMode::per_column_magnitude;
    else
      doc.fail_at(e->line, "[hardware] noise_mode must be 'shared' or 'per-column'");
  }
  doc.take_u64("hardware", "mc_seed", cfg.mc_seed);

  doc.take_double("dac", "i_ref", cfg.dac.i_ref);
  doc.take_u32("dac", "mirror_bits", cfg.dac.mirror_bits);
  doc.take_u32("dac", "decay_bits", cfg.dac.decay_bits);
  doc.take_u32("dac", "counter_bits", cfg.dac.counter_bits);
  doc.take_double("dac", "decay_rate", cfg.dac.decay_rate);
  doc.take_bool("dac", "branch_doubling", cfg.dac.branch_doubling);
  doc.take_double("dac", "cell_gain", cfg.dac.cell_gain);
  doc.take_u32("dac", "prbs_width", cfg.dac.prbs_width);

  doc.take_u32("oracle", "restarts", cfg.oracle_ls.restarts);
  doc.take_u32("oracle", "max_flips", cfg.oracle_ls.max_flips);
  doc.take_u64("oracle", "seed", cfg.oracle_ls.seed);

  doc.take_bool("gw", "enabled", cfg.gw_enabled);
  doc.take_u32("gw", "rank", cfg.gw.rank);
  doc.take_u32("gw", "max_iters", cfg.gw.max_iters);
  doc.take_double("gw", "step_size", cfg.gw.step_size);
  doc.take_u32("gw", "roundings", cfg.gw.roundings);
  doc.take_u64("gw", "seed", cfg.gw.seed);

  doc.take_list_double("sweep", "alpha", cfg.sweep_alpha);
  doc.take_list_double("sweep", "beta", cfg.sweep_beta);
  doc.take_list_double("sweep", "amplitude0", cfg.sweep_amplitude0);
  doc.take_list_double("sweep", "decay_g", cfg.sweep_decay_g);

  doc.finish();
  cfg.validate();
  return cfg;
}

void apply_overrides(BenchConfig& config, const BenchOverrides& overrides) {
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  if (overrides.engine) config.engine = *overrides.engine;
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.trials) config.trials = *overrides.trials;
  if (overrides.iterations) config.sb.iterations = *overrides.iterations;
}

// ---------------------------------------------------------------------------
// denominators

DenominatorRecord oracle_denominator(const ProblemInstance& instance,
                                     const LocalSearchParams& ls) {
  const uint32_t n = instance.coupling.size();
  if (n <= kBruteForceMaxNodes)
    return {brute_force_ground_state(instance.coupling).cut, "exact"};
  auto r = local_search_best(instance, ls);
  return {r.cut, "local-search(restarts=" + std::to_string(ls.restarts) + ")"};
}

namespace {

std::string provenance_kind(const std::string& provenance) {
  auto paren = provenance.find('(');
  return paren == std::string::npos ? provenance : provenance.substr(0, paren);
}

}  // namespace

// ---------------------------------------------------------------------------
// gen

GenResult cmd_gen(const GeneratorSpec& spec, const std::string& out_dir) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + out_dir + ": " + ec.message());

  GenResult result;
  json manifest;
  manifest["n"] = spec.n;
  manifest["density"] = spec.density;
  manifest["count"] = spec.count;
  manifest["seed"] = spec.seed;
  json list = json::array();
  for (uint32_t i = 0; i < spec.count; ++i) {
    uint64_t seed_i = split_seed(spec.seed, i);
    auto inst = random_graph(spec.n, spec.density, seed_i);
    char name[32];
    std::snprintf(name, sizeof name, "g%03u.graph", i);
    std::string path = (fs::path(out_dir) / name).string();
    save_instance(inst, path);
    result.files.push_back(path);
    json row;
    row["id"] = instance_stem(path);
    row["file"] = name;
    row["seed"] = seed_i;
    row["edge_count"] = inst.coupling.edge_count();
    list.push_back(std::move(row));
  }
  manifest["instances"] = std::move(list);
  result.manifest_path = (fs::path(out_dir) / "manifest.json").string();
  write_file(result.manifest_path, manifest.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// shared trial machinery

namespace {

std::vector<TrialResult> run_engine_trials(const BenchConfig& config,
                                           const ProblemInstance& instance,
                                           uint64_t base_seed) {
  if (config.engine == Engine::ideal)
    return run_trials(instance, config.sb, config.noise, config.trials, base_seed);
  return run_trials_hw(instance, config.hw, config.dac, config.sb.iterations,
                       config.trials, base_seed, config.mc_seed);
}

// best-so-far accuracy per iteration for one trial
std::vector<double> accuracy_curve(const TrialResult& trial, uint64_t denominator) {
  std::vector<double> acc(trial.trajectory.size());
  uint64_t best = 0;
  for (std::size_t k = 0; k < trial.trajectory.size(); ++k) {
    best = std::max(best, trial.trajectory[k]);
    acc[k] = double(best) / double(denominator);
  }
  return acc;
}

std::vector<IterationRow> aggregate_rows(
    const std::vector<const std::vector<std::vector<double>>*>& groups,
    uint32_t iterations, const std::vector<double>& thresholds) {
  std::vector<IterationRow> rows(iterations);
  std::size_t total = 0;
  for (const auto* g : groups) total += g->size();
  for (uint32_t k = 0; k < iterations; ++k) {
    IterationRow row;
    row.iteration = k + 1;
    double sum = 0.0;
    for (const auto* g : groups)
      for (const auto& curve : *g) sum += curve[k];
    row.mean_acc = sum / double(total);
    double var = 0.0;
    for (const auto* g : groups)
      for (const auto& curve : *g) {
        double d = curve[k] - row.mean_acc;
        var += d * d;
      }
    row.std_acc = std::sqrt(var / double(total));
    row.p_ge.resize(thresholds.size());
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      std::size_t hits = 0;
      for (const auto* g : groups)
        for (const auto& curve : *g) hits += curve[k] >= thresholds[t] ? 1 : 0;
      row.p_ge[t] = double(hits) / double(total);
    }
    rows[k] = std::move(row);
  }
  return rows;
}

json row_to_json(const IterationRow& row, const std::vector<double>& thresholds,
                 double latency_s) {
  json r;
  r["iteration"] = row.iteration;
  r["mean_acc"] = row.mean_acc;
  r["std_acc"] = row.std_acc;
  json p;
  for (std::size_t t = 0; t < thresholds.size(); ++t)
    p[threshold_label(thresholds[t])] = row.p_ge[t];
  r["p_ge"] = std::move(p);
  r["tts_seconds"] = double(row.iteration) * latency_s;
  return r;
}

json instance_report_to_json(const InstanceReport& rep,
                             const std::vector<double>& thresholds,
                             double latency_s) {
  json r;
  r["id"] = rep.id;
  r["denominator"] = {{"value", rep.denominator.value},
                      {"provenance", rep.denominator.provenance}};
  r["best_cut"] = rep.best_cut;
  r["best_acc"] = rep.best_acc;
  if (rep.gw) {
    r["gw"] = {{"expected_acc", rep.gw->expected_acc},
               {"best_acc", rep.gw->best_acc},
               {"crossover_iteration", rep.gw->crossover_iteration}};
  }
  json rows = json::array();
  for (const auto& row : rep.rows)
    rows.push_back(row_to_json(row, thresholds, latency_s));
  r["iterations"] = std::move(rows);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// solve

SolveSummary cmd_solve(const std::string& instance_path, const BenchConfig& base) {
  BenchConfig config = base;
  config.generator.reset();
  config.instance_files = {instance_path};
  config.validate();
  auto inst = load_instance(instance_path);

  DenominatorRecord denom;
  if (inst.best_known) {
    denom.value = inst.best_known->cut;
    denom.provenance = inst.best_known->provenance.empty()
                           ? "stored"
                           : inst.best_known->provenance;
  } else {
    denom = oracle_denominator(inst, config.oracle_ls);
  }

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + config.out_dir + ": " + ec.message());

  auto trials = run_engine_trials(config, inst, config.seed);

  SolveSummary summary;
  summary.instance_id = instance_stem(instance_path);
  summary.denominator = denom;

  std::vector<std::vector<double>> curves(trials.size());
  std::ostringstream jsonl;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    curves[t] = accuracy_curve(trials[t], denom.value);
    summary.best_cut = std::max(summary.best_cut, trials[t].best_cut);
    json row;
    row["instance_id"] = summary.instance_id;
    row["trial_seed"] = trials[t].seed;
    row["trajectory"] = trials[t].trajectory;
    row["best_cut"] = trials[t].best_cut;
    row["best_iteration"] = trials[t].best_iteration;
    jsonl << row.dump() << "\n";
  }
  summary.best_acc = double(summary.best_cut) / double(denom.value);

  for (uint32_t mark = 5; mark <= config.sb.iterations; mark += 5) {
    double sum = 0;
    for (const auto& c : curves) sum += c[mark - 1];
    summary.marks.push_back({mark, sum / double(curves.size())});
  }
  if (config.sb.iterations % 5 != 0) {
    double sum = 0;
    for (const auto& c : curves) sum += c[config.sb.iterations - 1];
    summary.marks.push_back({config.sb.iterations, sum / double(curves.size())});
  }

  summary.trials_path =
      (fs::path(config.out_dir) / (summary.instance_id + ".trials.jsonl")).string();
  write_file(summary.trials_path, jsonl.str());

  json s;
  s["instance_id"] = summary.instance_id;
  s["engine"] = config.engine == Engine::ideal ? "ideal" : "hardware";
  s["trials"] = config.trials;
  s["iterations"] = config.sb.iterations;
  s["seed"] = config.seed;
  s["denominator"] = {{"value", denom.value}, {"provenance", denom.provenance}};
  s["best_cut"] = summary.best_cut;
  s["best_acc"] = summary.best_acc;
  json marks = json::array();
  for (const auto& m : summary.marks)
    marks.push_back({{"iteration", m.iteration}, {"mean_acc", m.mean_acc}});
  s["accuracy_marks"] = std::move(marks);
  summary.summary_path =
      (fs::path(config.out_dir) / (summary.instance_id + ".summary.json")).string();
  write_file(summary.summary_path, s.dump(2) + "\n");
  return summary;
}

// ---------------------------------------------------------------------------
// bench

BenchReport cmd_bench(const BenchConfig& config) {
  config.validate();

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + config.out_dir + ": " + ec.message());

  struct Loaded {
    std::string id;
    ProblemInstance instance;
    DenominatorRecord denom;
  };
  std::vector<Loaded> instances;

  if (config.generator) {
    auto gen = cmd_gen(*config.generator,
                       (fs::path(config.out_dir) / "instances").string());
    for (const auto& path : gen.files) {
      Loaded l{instance_stem(path), load_instance(path), {}};
      l.denom = oracle_denominator(l.instance, config.oracle_ls);
      instances.push_back(std::move(l));
    }
  } else {
    for (const auto& path : config.instance_files) {
      Loaded l{instance_stem(path), load_instance(path), {}};
      if (!l.instance.best_known)
        fail(ErrorCode::validation,
             path + " has no best_known denominator; run `sbcim oracle " + path +
                 "` first");
      l.denom.value = l.instance.best_known->cut;
      l.denom.provenance = l.instance.best_known->provenance.empty()
                               ? "stored"
                               : l.instance.best_known->provenance;
      instances.push_back(std::move(l));
    }
  }

  // one aggregate must not mix denominator kinds
  for (std::size_t i = 1; i < instances.size(); ++i) {
    if (provenance_kind(instances[i].denom.provenance) !=
        provenance_kind(instances[0].denom.provenance))
      fail(ErrorCode::validation,
           "mixed denominator provenance in one aggregate: '" +
               instances[0].denom.provenance + "' vs '" +
               instances[i].denom.provenance + "'");
  }

  BenchReport report;
  report.engine = config.engine;
  report.trials = config.trials;
  report.iterations = config.sb.iterations;
  report.thresholds = config.thresholds;
  report.iteration_latency_seconds = iteration_latency_seconds(config.hw);

  std::ostringstream jsonl;
  std::vector<std::vector<std::vector<double>>> all_curves(instances.size());

  for (std::size_t idx = 0; idx < instances.size(); ++idx) {
    const auto& entry = instances[idx];
    uint64_t base_seed = split_seed(config.seed, 10000 + idx);
    auto trials = run_engine_trials(config, entry.instance, base_seed);

    InstanceReport rep;
    rep.id = entry.id;
    rep.denominator = entry.denom;

    auto& curves = all_curves[idx];
    curves.resize(trials.size());
    for (std::size_t t = 0; t < trials.size(); ++t) {
      curves[t] = accuracy_curve(trials[t], entry.denom.value);
      rep.best_cut = std::max(rep.best_cut, trials[t].best_cut);
      json row;
      row["instance_id"] = entry.id;
      row["trial_seed"] = trials[t].seed;
      row["trajectory"] = trials[t].trajectory;
      row["best_cut"] = trials[t].best_cut;
      row["best_iteration"] = trials[t].best_iteration;
      jsonl << row.dump() << "\n";
    }
    rep.best_acc = double(rep.best_cut) / double(entry.denom.value);
    rep.rows = aggregate_rows({&curves}, config.sb.iterations, config.thresholds);

    if (config.gw_enabled) {
      auto gw = gw_solve(entry.instance, config.gw);
      GwReference ref;
      ref.expected_acc = gw.expected_cut / double(entry.denom.value);
      ref.best_acc = double(gw.best_cut) / double(entry.denom.value);
      ref.crossover_iteration = -1;
      for (const auto& row : rep.rows)
        if (row.mean_acc >= ref.expected_acc) {
          ref.crossover_iteration = int32_t(row.iteration);
          break;
        }
      rep.gw = ref;
    }
    report.instances.push_back(std::move(rep));
  }

  std::vector<const std::vector<std::vector<double>>*> group_ptrs;
  for (const auto& c : all_curves) group_ptrs.push_back(&c);
  report.pooled.id = "ALL";
  report.pooled.denominator.provenance =
      provenance_kind(instances[0].denom.provenance);
  report.pooled.rows =
      aggregate_rows(group_ptrs, config.sb.iterations, config.thresholds);
  for (const auto& rep : report.instances)
    report.pooled.best_cut = std::max(report.pooled.best_cut, rep.best_cut);

  // trials.jsonl
  report.trials_jsonl = (fs::path(config.out_dir) / "trials.jsonl").string();
  write_file(report.trials_jsonl, jsonl.str());

  // report.csv
  std::ostringstream csv;
  csv << "instance_id,iteration,mean_acc,std_acc";
  for (double t : config.thresholds) csv << ",p_ge_" << threshold_label(t);
  csv << "\n";
  auto emit_rows = [&](const InstanceReport& rep) {
    for (const auto& row : rep.rows) {
      csv << rep.id << "," << row.iteration << "," << format_double(row.mean_acc)
          << "," << format_double(row.std_acc);
      for (double p : row.p_ge) csv << "," << format_double(p);
      csv << "\n";
    }
  };
  for (const auto& rep : report.instances) emit_rows(rep);
  emit_rows(report.pooled);
  report.report_csv = (fs::path(config.out_dir) / "report.csv").string();
  write_file(report.report_csv, csv.str());

  // report.json
  json j;
  j["engine"] = config.engine == Engine::ideal ? "ideal" : "hardware";
  j["trials"] = config.trials;
  j["iterations"] = config.sb.iterations;
  j["seed"] = config.seed;
  json th = json::array();
  for (double t : config.thresholds) th.push_back(t);
  j["thresholds"] = std::move(th);
  // hardware-equivalent time model, distinct from simulator wall clock
  j["hardware_equivalent"] = {
      {"iteration_latency_seconds", report.iteration_latency_seconds},
      {"cycles_per_iteration", config.hw.cycles_per_iteration},
      {"clock_hz", config.hw.clock_hz}};
  json inst_json = json::array();
  for (const auto& rep : report.instances)
    inst_json.push_back(instance_report_to_json(rep, config.thresholds,
                                                report.iteration_latency_seconds));
  j["instances"] = std::move(inst_json);
  j["pooled"] = instance_report_to_json(report.pooled, config.thresholds,
                                        report.iteration_latency_seconds);
  report.report_json = (fs::path(config.out_dir) / "report.json").string();
  write_file(report.report_json, j.dump(2) + "\n");

  return report;
}

// ---------------------------------------------------------------------------
// sweep

SweepResult cmd_sweep(const BenchConfig& config) {
  config.validate();

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + config.out_dir + ": " + ec.message());

  auto grid_or = [](const std::vector<double>& list, double fallback) {
    return list.empty() ? std::vector<double>{fallback} : list;
  };
  auto alphas = grid_or(config.sweep_alpha, config.sb.alpha);
  auto betas = grid_or(config.sweep_beta, config.sb.beta);
  auto amplitudes = grid_or(config.sweep_amplitude0, config.noise.amplitude0);
  auto decays = grid_or(config.sweep_decay_g, config.noise.decay_g);

  struct Loaded {
    std::string id;
    ProblemInstance instance;
    DenominatorRecord denom;
  };
  std::vector<Loaded> instances;
  if (config.generator) {
    for (uint32_t i = 0; i < config.generator->count; ++i) {
      uint64_t seed_i = split_seed(config.generator->seed, i);
      char name[16];
      std::snprintf(name, sizeof name, "g%03u", i);
      Loaded l{name, random_graph(config.generator->n, config.generator->density, seed_i), {}};
      l.denom = oracle_denominator(l.instance, config.oracle_ls);
      instances.push_back(std::move(l));
    }
  } else {
    for (const auto& path : config.instance_files) {
      Loaded l{instance_stem(path), load_instance(path), {}};
      if (l.instance.best_known) {
        l.denom.value = l.instance.best_known->cut;
        l.denom.provenance = l.instance.best_known->provenance.empty()
                                 ? "stored"
                                 : l.instance.best_known->provenance;
      } else {
        l.denom = oracle_denominator(l.instance, config.oracle_ls);
      }
      instances.push_back(std::move(l));
    }
  }

  SweepResult result;
  for (double alpha : alphas)
    for (double beta : betas)
      for (double amp : amplitudes)
        for (double g : decays) {
          SweepRow row;
          row.alpha = alpha;
          row.beta = beta;
          row.amplitude0 = amp;
          row.decay_g = g;

          SbParams sb = config.sb;
          sb.alpha = alpha;
          sb.beta = beta;
          NoiseSchedule noise = NoiseSchedule::decaying(amp, g, config.noise.levels);

          double total = 0;
          for (std::size_t idx = 0; idx < instances.size(); ++idx) {
            // common random numbers: trial seeds depend only on the instance
            uint64_t base_seed = split_seed(config.seed, 10000 + idx);
            auto trials = run_trials(instances[idx].instance, sb, noise,
                                     config.trials, base_seed);
            double sum = 0;
            for (const auto& t : trials)
              sum += double(t.best_cut) / double(instances[idx].denom.value);
            double mean = sum / double(trials.size());
            row.per_instance_acc.push_back(mean);
            total += mean;
          }
          row.mean_acc = total / double(instances.size());
          result.rows.push_back(std::move(row));
        }

  for (std::size_t r = 1; r < result.rows.size(); ++r)
    if (result.rows[r].mean_acc > result.rows[result.best_row].mean_acc)
      result.best_row = r;

  // single-tuning-point check: how far the best point falls short of each
  // instance's individually best grid point
  double max_gap = 0.0;
  for (std::size_t idx = 0; idx < instances.size(); ++idx) {
    double instance_best = 0.0;
    for (const auto& row : result.rows)
      instance_best = std::max(instance_best, row.per_instance_acc[idx]);
    max_gap = std::max(
        max_gap, instance_best - result.rows[result.best_row].per_instance_acc[idx]);
  }
  result.max_gap_vs_instance_best = max_gap;

  std::ostringstream csv;
  csv << "alpha,beta,amplitude0,decay_g,mean_acc";
  for (const auto& l : instances) csv << ",acc_" << l.id;
  csv << "\n";
  for (const auto& row : result.rows) {
    csv << format_double(row.alpha) << "," << format_double(row.beta) << ","
        << format_double(row.amplitude0) << "," << format_double(row.decay_g) << ","
        << format_double(row.mean_acc);
    for (double a : row.per_instance_acc) csv << "," << format_double(a);
    csv << "\n";
  }
  result.csv_path = (fs::path(config.out_dir) / "sweep.csv").string();
  write_file(result.csv_path, csv.str());

  const auto& best = result.rows[result.best_row];
  json s;
  s["grid_points"] = result.rows.size();
  s["instances"] = instances.size();
  s["trials"] = config.trials;
  s["best"] = {{"alpha", best.alpha},
               {"beta", best.beta},
               {"amplitude0", best.amplitude0},
               {"decay_g", best.decay_g},
               {"mean_acc", best.mean_acc}};
  s["max_gap_vs_instance_best"] = result.max_gap_vs_instance_best;
  result.summary_path = (fs::path(config.out_dir) / "sweep_summary.json").string();
  write_file(result.summary_path, s.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// oracle

OracleOutcome cmd_oracle(const std::string& instance_path,
                         const LocalSearchParams& ls) {
  ls.validate();
  auto inst = load_instance(instance_path);

  OracleOutcome outcome;
  if (inst.best_known) {
    outcome.had_previous = true;
    outcome.previous = inst.best_known->cut;
  }

  auto fresh = oracle_denominator(inst, ls);

  if (!inst.best_known || fresh.value > inst.best_known->cut) {
    inst.best_known = BestKnown{fresh.value, fresh.provenance};
    save_instance(inst, instance_path);
    outcome.record = fresh;
    outcome.updated = true;
  } else {
    // never lower a stored value
    outcome.record.value = inst.best_known->cut;
    outcome.record.provenance = inst.best_known->provenance.empty()
                                    ? "stored"
                                    : inst.best_known->provenance;
    outcome.updated = false;
  }
  return outcome;
}

}  // namespace sbcim
