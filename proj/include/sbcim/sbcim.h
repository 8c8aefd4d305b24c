/* sbcim — simulated-bifurcation MAXCUT solver with a compute-in-memory
 * hardware model, behind a C shared-library interface.
 *
 * Conventions: functions returning sbcim_status set a thread-local error
 * message readable via sbcim_last_error() on failure. Objects returned
 * through out-pointers are owned by the caller and released with the
 * matching _free function. Spin buffers hold int8_t values of exactly
 * -1 or +1.
 */
#ifndef SBCIM_H
#define SBCIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SBCIM_API __attribute__((visibility("default")))

typedef enum sbcim_status {
  SBCIM_OK = 0,
  SBCIM_ERR_INVALID_ARGUMENT = 1,
  SBCIM_ERR_DIMENSION_MISMATCH = 2,
  SBCIM_ERR_PARSE = 3,
  SBCIM_ERR_VALIDATION = 4,
  SBCIM_ERR_IO = 5,
  SBCIM_ERR_TOO_LARGE = 6,
  SBCIM_ERR_BUFFER_TOO_SMALL = 7,
  SBCIM_ERR_INTERNAL = 8
} sbcim_status;

SBCIM_API const char* sbcim_version(void);
SBCIM_API const char* sbcim_status_name(sbcim_status status);
SBCIM_API const char* sbcim_last_error(void);

/* ------------------------------------------------------------------ */
/* problem instances                                                   */

typedef struct sbcim_instance sbcim_instance;

SBCIM_API sbcim_status sbcim_instance_random(uint32_t n, double density,
                                             uint64_t seed, sbcim_instance** out);
/* entries: row-major n*n buffer over {0,1}; validated for symmetry and a
 * zero diagonal */
SBCIM_API sbcim_status sbcim_instance_from_entries(uint32_t n,
                                                   const uint8_t* entries,
                                                   sbcim_instance** out);
SBCIM_API sbcim_status sbcim_instance_load(const char* path, sbcim_instance** out);
SBCIM_API sbcim_status sbcim_instance_import_edges(const char* path,
                                                   sbcim_instance** out);
SBCIM_API sbcim_status sbcim_instance_save(const sbcim_instance* instance,
                                           const char* path);
SBCIM_API void sbcim_instance_free(sbcim_instance* instance);

SBCIM_API uint32_t sbcim_instance_n(const sbcim_instance* instance);
SBCIM_API double sbcim_instance_density(const sbcim_instance* instance);
SBCIM_API uint64_t sbcim_instance_seed(const sbcim_instance* instance);
SBCIM_API uint64_t sbcim_instance_edge_count(const sbcim_instance* instance);
SBCIM_API int sbcim_instance_edge(const sbcim_instance* instance, uint32_t m,
                                  uint32_t k);
/* returns 1 when a best-known record exists and fills the out arguments */
SBCIM_API int sbcim_instance_best_known(const sbcim_instance* instance,
                                        uint64_t* cut, char* provenance,
                                        size_t provenance_cap);
SBCIM_API sbcim_status sbcim_instance_set_best_known(sbcim_instance* instance,
                                                     uint64_t cut,
                                                     const char* provenance);

/* ------------------------------------------------------------------ */
/* evaluation and the exhaustive oracle                                */

SBCIM_API sbcim_status sbcim_cut_size(const sbcim_instance* instance,
                                      const int8_t* spins, uint32_t len,
                                      uint64_t* out);
SBCIM_API sbcim_status sbcim_ising_energy(const sbcim_instance* instance,
                                          const int8_t* spins, uint32_t len,
                                          int64_t* out);
/* exact maximum cut for n <= 26; spins may be NULL */
SBCIM_API sbcim_status sbcim_brute_force_ground_state(const sbcim_instance* instance,
                                                      uint64_t* cut, int8_t* spins);

/* ------------------------------------------------------------------ */
/* solver engines                                                      */

typedef struct sbcim_sb_params {
  double alpha;
  double beta;
  uint32_t iterations;
  uint64_t seed;
} sbcim_sb_params;

typedef enum sbcim_noise_kind {
  SBCIM_NOISE_NONE = 0,
  SBCIM_NOISE_UNIFORM_CONSTANT = 1,
  SBCIM_NOISE_UNIFORM_DECAYING = 2
} sbcim_noise_kind;

typedef struct sbcim_noise_schedule {
  int kind; /* sbcim_noise_kind */
  double amplitude0;
  uint32_t levels;
  double decay_g; /* A_k = amplitude0 / (1 + decay_g * k) */
} sbcim_noise_schedule;

/* grid-scan defaults for an n-node graph of the given density */
SBCIM_API void sbcim_sb_params_tuned(uint32_t n, double density,
                                     sbcim_sb_params* out);
SBCIM_API void sbcim_noise_schedule_tuned(uint32_t n, double density,
                                          sbcim_noise_schedule* out);

typedef struct sbcim_hw_config {
  double i_fb;
  double i_c;
  double c_bl;
  double t_pulse;
  double v_precharge;
  double sigma_cell;
  double i_leak;
  double clock_hz;
  uint32_t cycles_per_iteration;
  double sigma_offset;
  double trim_lsb;
  int per_column_noise; /* 0: one DAC magnitude shared per iteration */
} sbcim_hw_config;

typedef struct sbcim_dac_config {
  double i_ref;
  uint32_t mirror_bits;
  uint32_t decay_bits;
  uint32_t counter_bits;
  double decay_rate;
  int branch_doubling;
  double cell_gain;
  uint32_t prbs_width;
} sbcim_dac_config;

SBCIM_API void sbcim_hw_config_default(sbcim_hw_config* out);
SBCIM_API void sbcim_dac_config_default(sbcim_dac_config* out);

typedef struct sbcim_trials sbcim_trials;

SBCIM_API sbcim_status sbcim_run_trials(const sbcim_instance* instance,
                                        const sbcim_sb_params* params,
                                        const sbcim_noise_schedule* schedule,
                                        uint32_t n_trials, uint64_t base_seed,
                                        uint32_t first_trial_index,
                                        sbcim_trials** out);
SBCIM_API sbcim_status sbcim_run_trials_hw(const sbcim_instance* instance,
                                           const sbcim_hw_config* hw,
                                           const sbcim_dac_config* dac,
                                           uint32_t iterations, uint32_t n_trials,
                                           uint64_t base_seed, uint64_t mc_seed,
                                           uint32_t first_trial_index,
                                           sbcim_trials** out);
SBCIM_API void sbcim_trials_free(sbcim_trials* trials);

SBCIM_API uint32_t sbcim_trials_count(const sbcim_trials* trials);
SBCIM_API uint64_t sbcim_trials_best_cut(const sbcim_trials* trials, uint32_t trial);
SBCIM_API uint32_t sbcim_trials_best_iteration(const sbcim_trials* trials,
                                               uint32_t trial);
SBCIM_API uint64_t sbcim_trials_seed(const sbcim_trials* trials, uint32_t trial);
SBCIM_API uint32_t sbcim_trials_trajectory_len(const sbcim_trials* trials,
                                               uint32_t trial);
SBCIM_API sbcim_status sbcim_trials_trajectory(const sbcim_trials* trials,
                                               uint32_t trial, uint64_t* out,
                                               uint32_t cap);
SBCIM_API sbcim_status sbcim_trials_final_spins(const sbcim_trials* trials,
                                                uint32_t trial, int8_t* out,
                                                uint32_t cap);

/* ------------------------------------------------------------------ */
/* baselines                                                           */

typedef struct sbcim_gw_params {
  uint32_t rank; /* 0: ceil(sqrt(2n)) */
  uint32_t max_iters;
  double step_size;
  uint32_t roundings;
  uint64_t seed;
} sbcim_gw_params;

typedef struct sbcim_gw_result {
  uint64_t best_cut;
  double expected_cut;
  double relax_value;
  int converged;
  uint32_t iters_used;
} sbcim_gw_result;

SBCIM_API void sbcim_gw_params_default(sbcim_gw_params* out);
SBCIM_API sbcim_status sbcim_gw_solve(const sbcim_instance* instance,
                                      const sbcim_gw_params* params,
                                      sbcim_gw_result* out, int8_t* best_spins);

typedef struct sbcim_ls_params {
  uint32_t restarts;
  uint32_t max_flips; /* 0: 10n per restart */
  uint64_t seed;
} sbcim_ls_params;

SBCIM_API void sbcim_ls_params_default(sbcim_ls_params* out);
SBCIM_API sbcim_status sbcim_local_search(const sbcim_instance* instance,
                                          const sbcim_ls_params* params,
                                          uint64_t* cut, int8_t* spins);

/* ------------------------------------------------------------------ */
/* hardware timing                                                     */

SBCIM_API double sbcim_iteration_latency_seconds(const sbcim_hw_config* hw);
SBCIM_API double sbcim_hardware_time_seconds(const sbcim_hw_config* hw,
                                             uint64_t iterations);

/* ------------------------------------------------------------------ */
/* command layer (the CLI maps subcommands straight onto these)        */

typedef struct sbcim_cmd_overrides {
  const char* out_dir; /* NULL: keep the config's value */
  const char* engine;  /* "ideal" | "hardware" | NULL */
  int has_seed;
  uint64_t seed;
  int has_trials;
  uint32_t trials;
  int has_iterations;
  uint32_t iterations;
} sbcim_cmd_overrides;

SBCIM_API sbcim_status sbcim_cmd_gen(uint32_t n, double density, uint32_t count,
                                     uint64_t seed, const char* out_dir);

typedef struct sbcim_solve_mark {
  uint32_t iteration;
  double mean_acc;
} sbcim_solve_mark;

typedef struct sbcim_solve_summary {
  uint64_t best_cut;
  double best_acc;
  uint64_t denominator;
  char provenance[64];
  uint32_t n_marks;
  sbcim_solve_mark marks[64];
} sbcim_solve_summary;

/* config_path may be NULL: defaults plus the tuned point for the instance */
SBCIM_API sbcim_status sbcim_cmd_solve(const char* instance_path,
                                       const char* config_path,
                                       const sbcim_cmd_overrides* overrides,
                                       sbcim_solve_summary* out);

typedef struct sbcim_bench_summary {
  uint32_t instances;
  uint32_t trials;
  uint32_t iterations;
  double pooled_mean_acc_final;
  char report_json[512];
  char report_csv[512];
  char trials_jsonl[512];
} sbcim_bench_summary;

SBCIM_API sbcim_status sbcim_cmd_bench(const char* config_path,
                                       const sbcim_cmd_overrides* overrides,
                                       sbcim_bench_summary* out);

typedef struct sbcim_sweep_summary {
  uint64_t grid_points;
  double best_alpha;
  double best_beta;
  double best_amplitude0;
  double best_decay_g;
  double best_mean_acc;
  double max_gap_vs_instance_best;
  char csv[512];
  char summary_json[512];
} sbcim_sweep_summary;

SBCIM_API sbcim_status sbcim_cmd_sweep(const char* config_path,
                                       const sbcim_cmd_overrides* overrides,
                                       sbcim_sweep_summary* out);

typedef struct sbcim_oracle_outcome {
  uint64_t value;
  char provenance[64];
  int updated;
} sbcim_oracle_outcome;

SBCIM_API sbcim_status sbcim_cmd_oracle(const char* instance_path, uint32_t restarts,
                                        uint32_t max_flips, uint64_t seed,
                                        sbcim_oracle_outcome* out);

#ifdef __cplusplus
}
#endif

#endif /* SBCIM_H */
