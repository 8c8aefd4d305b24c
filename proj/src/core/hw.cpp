#include "core/hw.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

#include "core/parallel.hpp"

namespace sbcim {

void HwConfig::validate() const {
  if (!(i_fb > 0.0)) fail(ErrorCode::validation, "HwConfig.i_fb must be > 0");
  if (!(i_c > 0.0)) fail(ErrorCode::validation, "HwConfig.i_c must be > 0");
  if (!(c_bl > 0.0)) fail(ErrorCode::validation, "HwConfig.c_bl must be > 0");
  if (!(t_pulse > 0.0)) fail(ErrorCode::validation, "HwConfig.t_pulse must be > 0");
  if (!(v_precharge > 0.0))
    fail(ErrorCode::validation, "HwConfig.v_precharge must be > 0");
  if (!(sigma_cell >= 0.0))
    fail(ErrorCode::validation, "HwConfig.sigma_cell must be >= 0");
  if (!(i_leak >= 0.0)) fail(ErrorCode::validation, "HwConfig.i_leak must be >= 0");
  if (!(clock_hz > 0.0)) fail(ErrorCode::validation, "HwConfig.clock_hz must be > 0");
  if (cycles_per_iteration < 1)
    fail(ErrorCode::validation, "HwConfig.cycles_per_iteration must be >= 1");
  if (!(sigma_offset >= 0.0))
    fail(ErrorCode::validation, "HwConfig.sigma_offset must be >= 0");
  if (!(trim_lsb > 0.0)) fail(ErrorCode::validation, "HwConfig.trim_lsb must be > 0");
}

void HwConfig::check_discharge_budget(uint32_t n) const {
  double worst = t_pulse * (i_fb + double(n) * i_c) / c_bl;
  if (worst > v_precharge)
    fail(ErrorCode::validation,
         "bitline over-discharge: worst-case dV=" + std::to_string(worst) +
             "V exceeds v_precharge=" + std::to_string(v_precharge) + "V");
}

void NoiseDacConfig::validate() const {
  if (!(i_ref >= 0.0)) fail(ErrorCode::validation, "NoiseDacConfig.i_ref must be >= 0");
  if (mirror_bits < 1 || mirror_bits > 8)
    fail(ErrorCode::validation, "NoiseDacConfig.mirror_bits must be in [1,8]");
  if (decay_bits < 1 || decay_bits > 16)
    fail(ErrorCode::validation, "NoiseDacConfig.decay_bits must be in [1,16]");
  if (counter_bits < 1 || counter_bits > 32)
    fail(ErrorCode::validation, "NoiseDacConfig.counter_bits must be in [1,32]");
  if (!(decay_rate >= 0.0))
    fail(ErrorCode::validation, "NoiseDacConfig.decay_rate must be >= 0");
  if (!(cell_gain >= 0.0))
    fail(ErrorCode::validation, "NoiseDacConfig.cell_gain must be >= 0");
  if (!PrbsState::supported_width(prbs_width))
    fail(ErrorCode::validation, "NoiseDacConfig.prbs_width unsupported");
}

uint32_t NoiseDacConfig::counter_to_decay(uint64_t k) const {
  double code = std::floor(double(k) * decay_rate);
  if (code >= double(max_decay_code())) return max_decay_code();
  return uint32_t(code);
}

double NoiseDacConfig::decay_gain(uint32_t d) const {
  if (branch_doubling) return std::ldexp(1.0, -int(d));
  return 1.0 / (1.0 + double(d));
}

double dac_branch_current(const NoiseDacConfig& dac, uint64_t k, uint32_t m,
                          bool* warned_overflow) {
  uint32_t d;
  if (dac.counter_bits < 64 && (k >> dac.counter_bits) != 0) {
    bool already_warned;
    if (warned_overflow) {
      already_warned = *warned_overflow;
      *warned_overflow = true;
    } else {
      static std::atomic<bool> process_warned{false};
      already_warned = process_warned.exchange(true);
    }
    if (!already_warned)
      std::fprintf(stderr,
                   "sbcim: iteration counter overflow at k=%llu; decay held at "
                   "max code\n",
                   static_cast<unsigned long long>(k));
    d = dac.max_decay_code();
  } else {
    d = dac.counter_to_decay(k);
  }
  double levels_span = double(dac.magnitude_levels() - 1);
  return dac.i_ref * double(m) / levels_span * dac.decay_gain(d);
}

NoiseDraw noise_dac_current(uint64_t k, const NoiseDacConfig& dac, PrbsState& prbs,
                            bool* warned_overflow) {
  uint32_t m = prbs.next_bits(dac.mirror_bits);
  int sign = prbs.next_bit() ? 1 : -1;
  return {dac_branch_current(dac, k, m, warned_overflow), sign};
}

ComparatorBank ComparatorBank::ideal(uint32_t n) {
  ComparatorBank bank;
  bank.offsets.assign(n, 0.0);
  bank.trims.assign(n, 0.0);
  return bank;
}

ComparatorBank ComparatorBank::random(uint32_t n, double sigma_offset,
                                      Xoshiro256ss& rng) {
  ComparatorBank bank;
  bank.offsets.resize(n);
  bank.trims.assign(n, 0.0);
  for (auto& o : bank.offsets) o = sigma_offset * rng.gaussian();
  return bank;
}

ComparatorBank calibrate_offsets(ComparatorBank bank, double trim_lsb) {
  if (!(trim_lsb > 0.0)) fail(ErrorCode::validation, "trim_lsb must be > 0");
  for (std::size_t i = 0; i < bank.offsets.size(); ++i)
    bank.trims[i] = std::round(bank.offsets[i] / trim_lsb) * trim_lsb;
  return bank;
}

MismatchMap MismatchMap::none(uint32_t n) {
  MismatchMap m;
  m.cell.assign(std::size_t(n) * n, 1.0);
  m.fb.assign(n, 1.0);
  m.unity = true;
  return m;
}

MismatchMap MismatchMap::gaussian(uint32_t n, double sigma, Xoshiro256ss& rng) {
  if (sigma == 0.0) return none(n);
  MismatchMap m;
  m.cell.resize(std::size_t(n) * n);
  m.fb.resize(n);
  for (auto& f : m.cell) f = std::max(0.0, 1.0 + sigma * rng.gaussian());
  for (auto& f : m.fb) f = std::max(0.0, 1.0 + sigma * rng.gaussian());
  m.unity = false;
  return m;
}

std::vector<ColumnCurrents> cell_currents(const CouplingMatrix& j,
                                          std::span<const int8_t> x,
                                          const HwConfig& cfg,
                                          const MismatchMap& mismatch) {
  if (x.size() != j.size())
    fail(ErrorCode::dimension_mismatch,
         "spin vector length " + std::to_string(x.size()) +
             " does not match matrix size " + std::to_string(j.size()));
  const uint32_t n = j.size();
  std::vector<ColumnCurrents> out(n);

  if (mismatch.unity && cfg.i_leak == 0.0) {
    // Exact path: currents are integer multiples of the unit currents.
    for (uint32_t col = 0; col < n; ++col) {
      uint32_t on_bl = 0, on_blb = 0;
      for (uint32_t m = 0; m < n; ++m) {
        if (m == col || !j.edge(m, col)) continue;
        if (x[m] > 0)
          ++on_bl;
        else
          ++on_blb;
      }
      ColumnCurrents c;
      c.i_bl = double(on_bl) * cfg.i_c;
      c.i_blb = double(on_blb) * cfg.i_c;
      if (x[col] > 0)
        c.i_blb += cfg.i_fb;
      else
        c.i_bl += cfg.i_fb;
      out[col] = c;
    }
    return out;
  }

  for (uint32_t col = 0; col < n; ++col) {
    ColumnCurrents c;
    for (uint32_t m = 0; m < n; ++m) {
      if (m == col) continue;
      if (j.edge(m, col)) {
        double i = cfg.i_c * mismatch.cell[std::size_t(m) * n + col];
        if (x[m] > 0)
          c.i_bl += i;
        else
          c.i_blb += i;
      } else if (cfg.i_leak > 0.0) {
        if (x[m] > 0)
          c.i_bl += cfg.i_leak;
        else
          c.i_blb += cfg.i_leak;
      }
    }
    double fb = cfg.i_fb * mismatch.fb[col];
    if (x[col] > 0)
      c.i_blb += fb;
    else
      c.i_bl += fb;
    out[col] = c;
  }
  return out;
}

Discharge bitline_discharge(double i_amps, const HwConfig& cfg) {
  if (!(i_amps >= 0.0))
    fail(ErrorCode::invalid_argument, "discharge current must be >= 0");
  double dv = i_amps * (cfg.t_pulse / cfg.c_bl);
  if (dv > cfg.v_precharge) return {cfg.v_precharge, true};
  return {dv, false};
}

int8_t comparator_decide(double v_bl, double v_blb, uint32_t column,
                         const ComparatorBank& bank, int8_t prev_spin) {
  double d = v_bl - v_blb + bank.offsets[column] - bank.trims[column];
  if (d > 0.0) return 1;
  if (d < 0.0) return -1;
  return prev_spin;
}

HwTrialState make_hw_trial_state(uint32_t n, const HwConfig& cfg,
                                 const NoiseDacConfig& dac, uint64_t prbs_seed,
                                 uint64_t mc_seed) {
  PrbsState prbs(dac.prbs_width, prbs_seed);
  Xoshiro256ss mismatch_rng(split_seed(mc_seed, 0));
  MismatchMap mismatch = cfg.sigma_cell > 0.0
                             ? MismatchMap::gaussian(n, cfg.sigma_cell, mismatch_rng)
                             : MismatchMap::none(n);
  ComparatorBank bank;
  if (cfg.sigma_offset > 0.0) {
    Xoshiro256ss offset_rng(split_seed(mc_seed, 1));
    bank = calibrate_offsets(ComparatorBank::random(n, cfg.sigma_offset, offset_rng),
                             cfg.trim_lsb);
  } else {
    bank = ComparatorBank::ideal(n);
  }
  return HwTrialState{std::move(prbs), std::move(bank), std::move(mismatch), false,
                      false};
}

SpinVector hw_step(const CouplingMatrix& j, std::span<const int8_t> x,
                   const HwConfig& cfg, const NoiseDacConfig& dac,
                   HwTrialState& state, uint64_t k) {
  const uint32_t n = j.size();
  auto currents = cell_currents(j, x, cfg, state.mismatch);

  if (cfg.noise_mode == NoiseMode::per_column_magnitude) {
    for (uint32_t col = 0; col < n; ++col) {
      NoiseDraw draw = noise_dac_current(k, dac, state.prbs, &state.warned_overflow);
      double inj = draw.magnitude * dac.cell_gain;
      if (draw.sign > 0)
        currents[col].i_blb += inj;
      else
        currents[col].i_bl += inj;
    }
  } else {
    uint32_t m = state.prbs.next_bits(dac.mirror_bits);
    double inj =
        dac_branch_current(dac, k, m, &state.warned_overflow) * dac.cell_gain;
    for (uint32_t col = 0; col < n; ++col) {
      if (state.prbs.next_bit())
        currents[col].i_blb += inj;
      else
        currents[col].i_bl += inj;
    }
  }

  SpinVector next(n);
  for (uint32_t col = 0; col < n; ++col) {
    Discharge bl = bitline_discharge(currents[col].i_bl, cfg);
    Discharge blb = bitline_discharge(currents[col].i_blb, cfg);
    state.any_saturation = state.any_saturation || bl.saturated || blb.saturated;
    double v_bl = cfg.v_precharge - bl.delta_v;
    double v_blb = cfg.v_precharge - blb.delta_v;
    next[col] = comparator_decide(v_bl, v_blb, col, state.bank, x[col]);
  }
  return next;
}

TrialResult run_trial_hw(const ProblemInstance& instance, const HwConfig& cfg,
                         const NoiseDacConfig& dac, uint32_t iterations,
                         uint64_t trial_seed, uint64_t mc_seed) {
  cfg.validate();
  dac.validate();
  const auto& j = instance.coupling;
  cfg.check_discharge_budget(j.size());
  if (iterations < 1) fail(ErrorCode::validation, "iterations must be >= 1");

  Xoshiro256ss init_rng(split_seed(trial_seed, 0));
  SpinVector x = random_spins(j.size(), init_rng);
  HwTrialState state =
      make_hw_trial_state(j.size(), cfg, dac, split_seed(trial_seed, 1), mc_seed);

  TrialResult result;
  result.seed = trial_seed;
  result.trajectory.reserve(iterations);
  for (uint32_t k = 0; k < iterations; ++k) {
    x = hw_step(j, x, cfg, dac, state, k);
    uint64_t cut = cut_size(j, x);
    if (result.trajectory.empty() || cut > result.best_cut) {
      result.best_cut = cut;
      result.best_iteration = k;
    }
    result.trajectory.push_back(cut);
  }
  result.final_spins = std::move(x);
  return result;
}

std::vector<TrialResult> run_trials_hw(const ProblemInstance& instance,
                                       const HwConfig& cfg, const NoiseDacConfig& dac,
                                       uint32_t iterations, uint32_t n_trials,
                                       uint64_t base_seed, uint64_t mc_seed,
                                       uint32_t first_trial_index) {
  if (n_trials < 1) fail(ErrorCode::validation, "n_trials must be >= 1");
  std::vector<TrialResult> results(n_trials);
  parallel_for(n_trials, [&](std::size_t t) {
    uint64_t seed = trial_seed_for(base_seed, first_trial_index + uint32_t(t));
    results[t] = run_trial_hw(instance, cfg, dac, iterations, seed, mc_seed);
  });
  return results;
}

SbParams sb_params_from_hw(const HwConfig& cfg, uint32_t iterations, uint64_t seed) {
  SbParams p;
  p.alpha = cfg.i_fb / cfg.i_c;
  p.beta = 1.0;
  p.iterations = iterations;
  p.seed = seed;
  return p;
}

NoiseSchedule hardware_schedule(const HwConfig& cfg, const NoiseDacConfig& dac) {
  NoiseSchedule sched;
  sched.kind = NoiseKind::uniform_decaying;
  sched.levels = dac.magnitude_levels();
  double full_scale = dac.injected_full_scale() / cfg.i_c;
  sched.amplitude0 = full_scale;
  NoiseDacConfig snapshot = dac;
  sched.custom = [full_scale, snapshot](uint32_t k) {
    return full_scale * snapshot.decay_gain(snapshot.counter_to_decay(k));
  };
  return sched;
}

double bias_to_current(double v_bias, const BiasModel& model) {
  if (!(v_bias > 0.0) || !(v_bias < model.v_supply))
    fail(ErrorCode::invalid_argument,
         "bias voltage must lie strictly inside (0, v_supply)");
  return model.i_max *
         std::pow((model.v_supply - v_bias) / model.v_supply, model.exponent);
}

double iteration_latency_seconds(const HwConfig& cfg) {
  return double(cfg.cycles_per_iteration) / cfg.clock_hz;
}

double hardware_time_seconds(const HwConfig& cfg, uint64_t iterations) {
  return double(iterations * cfg.cycles_per_iteration) / cfg.clock_hz;
}

}  // namespace sbcim
