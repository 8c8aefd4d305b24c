#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/graph.hpp"
#include "core/prbs.hpp"
#include "core/sb.hpp"

namespace sbcim {

// Whether one DAC magnitude sample is shared by all columns per iteration
// (one noise DAC on chip) or drawn per column (matches the ideal engine's
// i.i.d. noise for lockstep tests). Polarity is per-column in both modes.
enum class NoiseMode { shared_magnitude, per_column_magnitude };

struct HwConfig {
  double i_fb = 5e-6;        // FB-cell unit current (A)
  double i_c = 0.5e-6;       // C-cell unit current (A)
  double c_bl = 200e-15;     // bitline capacitance (F)
  double t_pulse = 4e-9;     // wordline pulse width (s)
  double v_precharge = 1.8;  // precharge voltage (V)
  double sigma_cell = 0.0;   // relative per-cell current mismatch
  double i_leak = 0.0;       // off-cell leakage current (A)
  double clock_hz = 100e6;
  uint32_t cycles_per_iteration = 3;
  double sigma_offset = 5e-3;  // comparator input-referred offset spread (V)
  double trim_lsb = 1e-3;      // offset-calibration DAC step (V)
  NoiseMode noise_mode = NoiseMode::shared_magnitude;

  void validate() const;

  // Run-start check: a worst-case column must not discharge below ground
  // within one wordline pulse.
  void check_discharge_budget(uint32_t n) const;

  double volts_per_amp() const { return t_pulse / c_bl; }
};

// Current-mirror noise DAC with a resistive decay divider. Magnitude comes
// from mirror_bits PRBS bits driving binary-weighted branches; the decay
// code d enables resistive branches one per code step, each branch doubling
// the previous one's conductance when branch_doubling is set.
struct NoiseDacConfig {
  double i_ref = 300e-6;
  uint32_t mirror_bits = 4;
  uint32_t decay_bits = 8;
  uint32_t counter_bits = 12;
  double decay_rate = 8.0;  // decay codes advanced per iteration
  bool branch_doubling = true;
  // Transfer from DAC branch current to the current the 4-T noise cell
  // injects on a bitline (the V_N-to-cell coupling is a modeling constant;
  // the default maps full scale to 24 C-cell units).
  double cell_gain = 0.04;
  uint32_t prbs_width = 24;

  void validate() const;

  uint32_t max_decay_code() const { return (uint32_t(1) << decay_bits) - 1; }
  uint32_t magnitude_levels() const { return uint32_t(1) << mirror_bits; }
  uint32_t counter_to_decay(uint64_t k) const;
  // decay_gain(0) = 1, strictly decreasing: 1/2^d with doubled branches,
  // 1/(1+d) with equal branches.
  double decay_gain(uint32_t d) const;
  double injected_full_scale() const { return i_ref * cell_gain; }
};

// DAC branch current for magnitude code m at iteration k (before the noise
// cell's gain). Saturates the decay at max code when the iteration counter
// overflows; warns once through warned_overflow.
double dac_branch_current(const NoiseDacConfig& dac, uint64_t k, uint32_t m,
                          bool* warned_overflow = nullptr);

struct NoiseDraw {
  double magnitude = 0.0;  // amperes, DAC side
  int sign = 1;
};

// Draws mirror_bits magnitude bits, then one polarity bit.
NoiseDraw noise_dac_current(uint64_t k, const NoiseDacConfig& dac, PrbsState& prbs,
                            bool* warned_overflow = nullptr);

struct ComparatorBank {
  std::vector<double> offsets;  // input-referred offsets (V)
  std::vector<double> trims;    // calibration voltages (V)

  static ComparatorBank ideal(uint32_t n);
  static ComparatorBank random(uint32_t n, double sigma_offset, Xoshiro256ss& rng);
};

// Sets each trim to the offset rounded to the nearest trim_lsb multiple;
// residual offsets are bounded by trim_lsb/2.
ComparatorBank calibrate_offsets(ComparatorBank bank, double trim_lsb);

// Frozen process variation: multiplicative factors on C-cell and FB-cell
// currents, drawn once per Monte-Carlo chip instance.
struct MismatchMap {
  std::vector<double> cell;  // n*n row-major
  std::vector<double> fb;    // per column
  bool unity = true;

  static MismatchMap none(uint32_t n);
  static MismatchMap gaussian(uint32_t n, double sigma, Xoshiro256ss& rng);
};

struct ColumnCurrents {
  double i_bl = 0.0;
  double i_blb = 0.0;
};

// Per-column MAC currents. A C cell (m,col) with J=1 sinks i_c from BL when
// x_m = +1 (driving the column toward -1) and from BLB when x_m = -1; the
// FB cell does the opposite for the column's own spin. Cells storing 0 leak
// i_leak into the wordline-selected side.
std::vector<ColumnCurrents> cell_currents(const CouplingMatrix& j,
                                          std::span<const int8_t> x,
                                          const HwConfig& cfg,
                                          const MismatchMap& mismatch);

struct Discharge {
  double delta_v = 0.0;
  bool saturated = false;  // would have discharged below ground
};

// Linear charge-sharing: dV = i * t_pulse / c_bl, clamped at v_precharge.
Discharge bitline_discharge(double i_amps, const HwConfig& cfg);

// Strong-arm latch decision: sign of v_bl - v_blb + offset - trim; exact
// equality keeps the previous spin.
int8_t comparator_decide(double v_bl, double v_blb, uint32_t column,
                         const ComparatorBank& bank, int8_t prev_spin);

struct HwTrialState {
  PrbsState prbs;
  ComparatorBank bank;
  MismatchMap mismatch;
  bool warned_overflow = false;
  bool any_saturation = false;
};

HwTrialState make_hw_trial_state(uint32_t n, const HwConfig& cfg,
                                 const NoiseDacConfig& dac, uint64_t prbs_seed,
                                 uint64_t mc_seed);

// One full SB iteration through the analog datapath: MAC currents, noise
// injection, bitline discharge, comparator readout. Synchronous update.
SpinVector hw_step(const CouplingMatrix& j, std::span<const int8_t> x,
                   const HwConfig& cfg, const NoiseDacConfig& dac,
                   HwTrialState& state, uint64_t k);

TrialResult run_trial_hw(const ProblemInstance& instance, const HwConfig& cfg,
                         const NoiseDacConfig& dac, uint32_t iterations,
                         uint64_t trial_seed, uint64_t mc_seed);

std::vector<TrialResult> run_trials_hw(const ProblemInstance& instance,
                                       const HwConfig& cfg, const NoiseDacConfig& dac,
                                       uint32_t iterations, uint32_t n_trials,
                                       uint64_t base_seed, uint64_t mc_seed,
                                       uint32_t first_trial_index = 0);

// Gain mapping between engines. The comparator decides on the sign of
// (i_blb - i_bl) * t/c, a positive multiple of alpha x - beta (J x) + zeta
// with alpha = i_fb/i_c and beta = 1, so configs are expressed in C-cell
// units and the scale factor drops out of sgn().
SbParams sb_params_from_hw(const HwConfig& cfg, uint32_t iterations, uint64_t seed);

// The DAC's staircase decay in the same units (full scale = injected/i_c).
NoiseSchedule hardware_schedule(const HwConfig& cfg, const NoiseDacConfig& dac);

// Saturation-law mapping from a shared bias voltage to a cell current;
// lower bias means higher current (source-side bias), current vanishes as
// the bias approaches the supply.
struct BiasModel {
  double v_supply = 1.8;
  double i_max = 20e-6;
  double exponent = 2.0;
};

double bias_to_current(double v_bias, const BiasModel& model);

double iteration_latency_seconds(const HwConfig& cfg);
double hardware_time_seconds(const HwConfig& cfg, uint64_t iterations);

}  // namespace sbcim
