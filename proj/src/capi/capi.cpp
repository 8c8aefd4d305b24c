#include "sbcim/sbcim.h"

#include <cstring>
#include <exception>
#include <string>

#include "core/bench.hpp"

using namespace sbcim;

struct sbcim_instance {
  ProblemInstance value;
};

struct sbcim_trials {
  std::vector<TrialResult> value;
};

namespace {

thread_local std::string tls_error;

sbcim_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return SBCIM_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch: return SBCIM_ERR_DIMENSION_MISMATCH;
    case ErrorCode::parse: return SBCIM_ERR_PARSE;
    case ErrorCode::validation: return SBCIM_ERR_VALIDATION;
    case ErrorCode::io: return SBCIM_ERR_IO;
    case ErrorCode::too_large: return SBCIM_ERR_TOO_LARGE;
    case ErrorCode::internal: return SBCIM_ERR_INTERNAL;
  }
  return SBCIM_ERR_INTERNAL;
}

template <typename Fn>
sbcim_status guard(Fn&& fn) {
  try {
    fn();
    return SBCIM_OK;
  } catch (const Error& e) {
    tls_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    tls_error = e.what();
    return SBCIM_ERR_INTERNAL;
  } catch (...) {
    tls_error = "unknown error";
    return SBCIM_ERR_INTERNAL;
  }
}

sbcim_status fail_arg(const char* message) {
  tls_error = message;
  return SBCIM_ERR_INVALID_ARGUMENT;
}

void copy_string(const std::string& from, char* to, size_t cap) {
  if (!to || cap == 0) return;
  size_t len = from.size() < cap - 1 ? from.size() : cap - 1;
  std::memcpy(to, from.data(), len);
  to[len] = '\0';
}

SbParams to_core(const sbcim_sb_params& p) {
  SbParams out;
  out.alpha = p.alpha;
  out.beta = p.beta;
  out.iterations = p.iterations;
  out.seed = p.seed;
  return out;
}

NoiseSchedule to_core(const sbcim_noise_schedule& s) {
  NoiseSchedule out;
  switch (s.kind) {
    case SBCIM_NOISE_NONE: out.kind = NoiseKind::none; break;
    case SBCIM_NOISE_UNIFORM_CONSTANT: out.kind = NoiseKind::uniform_constant; break;
    case SBCIM_NOISE_UNIFORM_DECAYING: out.kind = NoiseKind::uniform_decaying; break;
    default: fail(ErrorCode::invalid_argument, "unknown noise kind");
  }
  out.amplitude0 = s.amplitude0;
  out.levels = s.levels;
  out.decay_g = s.decay_g;
  return out;
}

HwConfig to_core(const sbcim_hw_config& h) {
  HwConfig out;
  out.i_fb = h.i_fb;
  out.i_c = h.i_c;
  out.c_bl = h.c_bl;
  out.t_pulse = h.t_pulse;
  out.v_precharge = h.v_precharge;
  out.sigma_cell = h.sigma_cell;
  out.i_leak = h.i_leak;
  out.clock_hz = h.clock_hz;
  out.cycles_per_iteration = h.cycles_per_iteration;
  out.sigma_offset = h.sigma_offset;
  out.trim_lsb = h.trim_lsb;
  out.noise_mode = h.per_column_noise ? NoiseMode::per_column_magnitude
                                      : NoiseMode::shared_magnitude;
  return out;
}

NoiseDacConfig to_core(const sbcim_dac_config& d) {
  NoiseDacConfig out;
  out.i_ref = d.i_ref;
  out.mirror_bits = d.mirror_bits;
  out.decay_bits = d.decay_bits;
  out.counter_bits = d.counter_bits;
  out.decay_rate = d.decay_rate;
  out.branch_doubling = d.branch_doubling != 0;
  out.cell_gain = d.cell_gain;
  out.prbs_width = d.prbs_width;
  return out;
}

BenchOverrides to_core(const sbcim_cmd_overrides* ov) {
  BenchOverrides out;
  if (!ov) return out;
  if (ov->out_dir) out.out_dir = std::string(ov->out_dir);
  if (ov->engine) {
    std::string e = ov->engine;
    if (e == "ideal")
      out.engine = Engine::ideal;
    else if (e == "hardware")
      out.engine = Engine::hardware;
    else
      fail(ErrorCode::validation, "engine must be 'ideal' or 'hardware'");
  }
  if (ov->has_seed) out.seed = ov->seed;
  if (ov->has_trials) out.trials = ov->trials;
  if (ov->has_iterations) out.iterations = ov->iterations;
  return out;
}

}  // namespace

extern "C" {

const char* sbcim_version(void) { return "1.0.0"; }

const char* sbcim_status_name(sbcim_status status) {
  switch (status) {
    case SBCIM_OK: return "ok";
    case SBCIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SBCIM_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case SBCIM_ERR_PARSE: return "parse error";
    case SBCIM_ERR_VALIDATION: return "validation error";
    case SBCIM_ERR_IO: return "io error";
    case SBCIM_ERR_TOO_LARGE: return "too large";
    case SBCIM_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case SBCIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* sbcim_last_error(void) { return tls_error.c_str(); }

/* ------------------------------------------------------------------ */

sbcim_status sbcim_instance_random(uint32_t n, double density, uint64_t seed,
                                   sbcim_instance** out) {
  if (!out) return fail_arg("out must not be NULL");
  return guard([&] { *out = new sbcim_instance{random_graph(n, density, seed)}; });
}

sbcim_status sbcim_instance_from_entries(uint32_t n, const uint8_t* entries,
                                         sbcim_instance** out) {
  if (!out || !entries) return fail_arg("entries and out must not be NULL");
  return guard([&] {
    auto j = CouplingMatrix::from_entries(n, {entries, std::size_t(n) * n});
    double density =
        n < 2 ? 0.0 : double(j.edge_count()) / (double(n) * (n - 1) / 2.0);
    *out = new sbcim_instance{ProblemInstance{std::move(j), 0, density, {}}};
  });
}

sbcim_status sbcim_instance_load(const char* path, sbcim_instance** out) {
  if (!out || !path) return fail_arg("path and out must not be NULL");
  return guard([&] { *out = new sbcim_instance{load_instance(path)}; });
}

sbcim_status sbcim_instance_import_edges(const char* path, sbcim_instance** out) {
  if (!out || !path) return fail_arg("path and out must not be NULL");
  return guard([&] { *out = new sbcim_instance{import_edge_list(path)}; });
}

sbcim_status sbcim_instance_save(const sbcim_instance* instance, const char* path) {
  if (!instance || !path) return fail_arg("instance and path must not be NULL");
  return guard([&] { save_instance(instance->value, path); });
}

void sbcim_instance_free(sbcim_instance* instance) { delete instance; }

uint32_t sbcim_instance_n(const sbcim_instance* instance) {
  return instance ? instance->value.coupling.size() : 0;
}

double sbcim_instance_density(const sbcim_instance* instance) {
  return instance ? instance->value.density : 0.0;
}

uint64_t sbcim_instance_seed(const sbcim_instance* instance) {
  return instance ? instance->value.seed : 0;
}

uint64_t sbcim_instance_edge_count(const sbcim_instance* instance) {
  return instance ? instance->value.coupling.edge_count() : 0;
}

int sbcim_instance_edge(const sbcim_instance* instance, uint32_t m, uint32_t k) {
  if (!instance) return 0;
  const auto& j = instance->value.coupling;
  if (m >= j.size() || k >= j.size()) return 0;
  return j.edge(m, k) ? 1 : 0;
}

int sbcim_instance_best_known(const sbcim_instance* instance, uint64_t* cut,
                              char* provenance, size_t provenance_cap) {
  if (!instance || !instance->value.best_known) return 0;
  const auto& bk = *instance->value.best_known;
  if (cut) *cut = bk.cut;
  copy_string(bk.provenance, provenance, provenance_cap);
  return 1;
}

sbcim_status sbcim_instance_set_best_known(sbcim_instance* instance, uint64_t cut,
                                           const char* provenance) {
  if (!instance) return fail_arg("instance must not be NULL");
  return guard([&] {
    if (cut > instance->value.coupling.edge_count())
      fail(ErrorCode::validation, "best_known exceeds edge count");
    instance->value.best_known =
        BestKnown{cut, provenance ? std::string(provenance) : std::string()};
  });
}

/* ------------------------------------------------------------------ */

sbcim_status sbcim_cut_size(const sbcim_instance* instance, const int8_t* spins,
                            uint32_t len, uint64_t* out) {
  if (!instance || !spins || !out) return fail_arg("NULL argument");
  return guard([&] {
    std::span<const int8_t> x{spins, len};
    validate_spins(x, instance->value.coupling.size());
    *out = cut_size(instance->value.coupling, x);
  });
}

sbcim_status sbcim_ising_energy(const sbcim_instance* instance, const int8_t* spins,
                                uint32_t len, int64_t* out) {
  if (!instance || !spins || !out) return fail_arg("NULL argument");
  return guard([&] {
    std::span<const int8_t> x{spins, len};
    validate_spins(x, instance->value.coupling.size());
    *out = ising_energy(instance->value.coupling, x);
  });
}

sbcim_status sbcim_brute_force_ground_state(const sbcim_instance* instance,
                                            uint64_t* cut, int8_t* spins) {
  if (!instance || !cut) return fail_arg("instance and cut must not be NULL");
  return guard([&] {
    auto gs = brute_force_ground_state(instance->value.coupling);
    *cut = gs.cut;
    if (spins) std::memcpy(spins, gs.spins.data(), gs.spins.size());
  });
}

/* ------------------------------------------------------------------ */

void sbcim_sb_params_tuned(uint32_t n, double density, sbcim_sb_params* out) {
  if (!out) return;
  auto p = SbParams::tuned_for(n, density);
  out->alpha = p.alpha;
  out->beta = p.beta;
  out->iterations = p.iterations;
  out->seed = p.seed;
}

void sbcim_noise_schedule_tuned(uint32_t n, double density,
                                sbcim_noise_schedule* out) {
  if (!out) return;
  auto s = NoiseSchedule::tuned_for(n, density);
  out->kind = SBCIM_NOISE_UNIFORM_DECAYING;
  out->amplitude0 = s.amplitude0;
  out->levels = s.levels;
  out->decay_g = s.decay_g;
}

void sbcim_hw_config_default(sbcim_hw_config* out) {
  if (!out) return;
  HwConfig h;
  out->i_fb = h.i_fb;
  out->i_c = h.i_c;
  out->c_bl = h.c_bl;
  out->t_pulse = h.t_pulse;
  out->v_precharge = h.v_precharge;
  out->sigma_cell = h.sigma_cell;
  out->i_leak = h.i_leak;
  out->clock_hz = h.clock_hz;
  out->cycles_per_iteration = h.cycles_per_iteration;
  out->sigma_offset = h.sigma_offset;
  out->trim_lsb = h.trim_lsb;
  out->per_column_noise = h.noise_mode == NoiseMode::per_column_magnitude;
}

void sbcim_dac_config_default(sbcim_dac_config* out) {
  if (!out) return;
  NoiseDacConfig d;
  out->i_ref = d.i_ref;
  out->mirror_bits = d.mirror_bits;
  out->decay_bits = d.decay_bits;
  out->counter_bits = d.counter_bits;
  out->decay_rate = d.decay_rate;
  out->branch_doubling = d.branch_doubling;
  out->cell_gain = d.cell_gain;
  out->prbs_width = d.prbs_width;
}

sbcim_status sbcim_run_trials(const sbcim_instance* instance,
                              const sbcim_sb_params* params,
                              const sbcim_noise_schedule* schedule,
                              uint32_t n_trials, uint64_t base_seed,
                              uint32_t first_trial_index, sbcim_trials** out) {
  if (!instance || !params || !schedule || !out) return fail_arg("NULL argument");
  return guard([&] {
    *out = new sbcim_trials{run_trials(instance->value, to_core(*params),
                                       to_core(*schedule), n_trials, base_seed,
                                       first_trial_index)};
  });
}

sbcim_status sbcim_run_trials_hw(const sbcim_instance* instance,
                                 const sbcim_hw_config* hw,
                                 const sbcim_dac_config* dac, uint32_t iterations,
                                 uint32_t n_trials, uint64_t base_seed,
                                 uint64_t mc_seed, uint32_t first_trial_index,
                                 sbcim_trials** out) {
  if (!instance || !hw || !dac || !out) return fail_arg("NULL argument");
  return guard([&] {
    *out = new sbcim_trials{run_trials_hw(instance->value, to_core(*hw),
                                          to_core(*dac), iterations, n_trials,
                                          base_seed, mc_seed, first_trial_index)};
  });
}

void sbcim_trials_free(sbcim_trials* trials) { delete trials; }

uint32_t sbcim_trials_count(const sbcim_trials* trials) {
  return trials ? uint32_t(trials->value.size()) : 0;
}

uint64_t sbcim_trials_best_cut(const sbcim_trials* trials, uint32_t trial) {
  return trials && trial < trials->value.size() ? trials->value[trial].best_cut : 0;
}

uint32_t sbcim_trials_best_iteration(const sbcim_trials* trials, uint32_t trial) {
  return trials && trial < trials->value.size() ? trials->value[trial].best_iteration
                                                : 0;
}

uint64_t sbcim_trials_seed(const sbcim_trials* trials, uint32_t trial) {
  return trials && trial < trials->value.size() ? trials->value[trial].seed : 0;
}

uint32_t sbcim_trials_trajectory_len(const sbcim_trials* trials, uint32_t trial) {
  return trials && trial < trials->value.size()
             ? uint32_t(trials->value[trial].trajectory.size())
             : 0;
}

sbcim_status sbcim_trials_trajectory(const sbcim_trials* trials, uint32_t trial,
                                     uint64_t* out, uint32_t cap) {
  if (!trials || !out) return fail_arg("NULL argument");
  if (trial >= trials->value.size()) return fail_arg("trial index out of range");
  const auto& traj = trials->value[trial].trajectory;
  if (cap < traj.size()) {
    tls_error = "trajectory buffer too small";
    return SBCIM_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(out, traj.data(), traj.size() * sizeof(uint64_t));
  return SBCIM_OK;
}

sbcim_status sbcim_trials_final_spins(const sbcim_trials* trials, uint32_t trial,
                                      int8_t* out, uint32_t cap) {
  if (!trials || !out) return fail_arg("NULL argument");
  if (trial >= trials->value.size()) return fail_arg("trial index out of range");
  const auto& spins = trials->value[trial].final_spins;
  if (cap < spins.size()) {
    tls_error = "spin buffer too small";
    return SBCIM_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(out, spins.data(), spins.size());
  return SBCIM_OK;
}

/* ------------------------------------------------------------------ */

void sbcim_gw_params_default(sbcim_gw_params* out) {
  if (!out) return;
  GwParams p;
  out->rank = p.rank;
  out->max_iters = p.max_iters;
  out->step_size = p.step_size;
  out->roundings = p.roundings;
  out->seed = p.seed;
}

sbcim_status sbcim_gw_solve(const sbcim_instance* instance,
                            const sbcim_gw_params* params, sbcim_gw_result* out,
                            int8_t* best_spins) {
  if (!instance || !params || !out) return fail_arg("NULL argument");
  return guard([&] {
    GwParams p;
    p.rank = params->rank;
    p.max_iters = params->max_iters;
    p.step_size = params->step_size;
    p.roundings = params->roundings;
    p.seed = params->seed;
    auto r = gw_solve(instance->value, p);
    out->best_cut = r.best_cut;
    out->expected_cut = r.expected_cut;
    out->relax_value = r.relax_value;
    out->converged = r.converged;
    out->iters_used = r.iters_used;
    if (best_spins)
      std::memcpy(best_spins, r.best_spins.data(), r.best_spins.size());
  });
}

void sbcim_ls_params_default(sbcim_ls_params* out) {
  if (!out) return;
  LocalSearchParams p;
  out->restarts = p.restarts;
  out->max_flips = p.max_flips;
  out->seed = p.seed;
}

sbcim_status sbcim_local_search(const sbcim_instance* instance,
                                const sbcim_ls_params* params, uint64_t* cut,
                                int8_t* spins) {
  if (!instance || !params || !cut) return fail_arg("NULL argument");
  return guard([&] {
    LocalSearchParams p;
    p.restarts = params->restarts;
    p.max_flips = params->max_flips;
    p.seed = params->seed;
    auto r = local_search_best(instance->value, p);
    *cut = r.cut;
    if (spins) std::memcpy(spins, r.spins.data(), r.spins.size());
  });
}

/* ------------------------------------------------------------------ */

double sbcim_iteration_latency_seconds(const sbcim_hw_config* hw) {
  if (!hw) return 0.0;
  return iteration_latency_seconds(to_core(*hw));
}

double sbcim_hardware_time_seconds(const sbcim_hw_config* hw, uint64_t iterations) {
  if (!hw) return 0.0;
  return hardware_time_seconds(to_core(*hw), iterations);
}

/* ------------------------------------------------------------------ */

sbcim_status sbcim_cmd_gen(uint32_t n, double density, uint32_t count, uint64_t seed,
                           const char* out_dir) {
  if (!out_dir) return fail_arg("out_dir must not be NULL");
  return guard([&] { cmd_gen(GeneratorSpec{n, density, count, seed}, out_dir); });
}

sbcim_status sbcim_cmd_solve(const char* instance_path, const char* config_path,
                             const sbcim_cmd_overrides* overrides,
                             sbcim_solve_summary* out) {
  if (!instance_path || !out) return fail_arg("instance_path and out must not be NULL");
  return guard([&] {
    BenchConfig cfg;
    if (config_path) {
      cfg = load_bench_config(config_path);
    } else {
      auto peek = load_instance(instance_path);
      uint32_t n = peek.coupling.size();
      double density =
          peek.density > 0.0
              ? peek.density
              : double(peek.coupling.edge_count()) / (double(n) * (n - 1) / 2.0);
      cfg.sb = SbParams::tuned_for(n, density);
      cfg.noise = NoiseSchedule::tuned_for(n, density);
    }
    apply_overrides(cfg, to_core(overrides));
    auto summary = cmd_solve(instance_path, cfg);

    out->best_cut = summary.best_cut;
    out->best_acc = summary.best_acc;
    out->denominator = summary.denominator.value;
    copy_string(summary.denominator.provenance, out->provenance,
                sizeof out->provenance);
    out->n_marks = 0;
    for (const auto& m : summary.marks) {
      if (out->n_marks >= 64) break;
      out->marks[out->n_marks++] = {m.iteration, m.mean_acc};
    }
  });
}

sbcim_status sbcim_cmd_bench(const char* config_path,
                             const sbcim_cmd_overrides* overrides,
                             sbcim_bench_summary* out) {
  if (!config_path) return fail_arg("config_path must not be NULL");
  return guard([&] {
    BenchConfig cfg = load_bench_config(config_path);
    apply_overrides(cfg, to_core(overrides));
    auto report = cmd_bench(cfg);
    if (out) {
      out->instances = uint32_t(report.instances.size());
      out->trials = report.trials;
      out->iterations = report.iterations;
      out->pooled_mean_acc_final =
          report.pooled.rows.empty() ? 0.0 : report.pooled.rows.back().mean_acc;
      copy_string(report.report_json, out->report_json, sizeof out->report_json);
      copy_string(report.report_csv, out->report_csv, sizeof out->report_csv);
      copy_string(report.trials_jsonl, out->trials_jsonl, sizeof out->trials_jsonl);
    }
  });
}

sbcim_status sbcim_cmd_sweep(const char* config_path,
                             const sbcim_cmd_overrides* overrides,
                             sbcim_sweep_summary* out) {
  if (!config_path) return fail_arg("config_path must not be NULL");
  return guard([&] {
    BenchConfig cfg = load_bench_config(config_path);
    apply_overrides(cfg, to_core(overrides));
    auto result = cmd_sweep(cfg);
    if (out) {
      const auto& best = result.rows[result.best_row];
      out->grid_points = result.rows.size();
      out->best_alpha = best.alpha;
      out->best_beta = best.beta;
      out->best_amplitude0 = best.amplitude0;
      out->best_decay_g = best.decay_g;
      out->best_mean_acc = best.mean_acc;
      out->max_gap_vs_instance_best = result.max_gap_vs_instance_best;
      copy_string(result.csv_path, out->csv, sizeof out->csv);
      copy_string(result.summary_path, out->summary_json, sizeof out->summary_json);
    }
  });
}

sbcim_status sbcim_cmd_oracle(const char* instance_path, uint32_t restarts,
                              uint32_t max_flips, uint64_t seed,
                              sbcim_oracle_outcome* out) {
  if (!instance_path) return fail_arg("instance_path must not be NULL");
  return guard([&] {
    LocalSearchParams ls;
    if (restarts) ls.restarts = restarts;
    ls.max_flips = max_flips;
    ls.seed = seed;
    auto outcome = cmd_oracle(instance_path, ls);
    if (out) {
      out->value = outcome.record.value;
      copy_string(outcome.record.provenance, out->provenance, sizeof out->provenance);
      out->updated = outcome.updated;
    }
  });
}

}  // extern "C"
