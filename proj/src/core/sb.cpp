#include "core/sb.hpp"

#include <cmath>

#include "core/parallel.hpp"

namespace sbcim {

void SbParams::validate() const {
  if (!(alpha > 0.0)) fail(ErrorCode::validation, "SbParams.alpha must be > 0");
  // beta = 0 is allowed for diagnostics (coupling disabled in sweeps).
  if (!(beta >= 0.0)) fail(ErrorCode::validation, "SbParams.beta must be >= 0");
  if (iterations < 1) fail(ErrorCode::validation, "SbParams.iterations must be >= 1");
}

SbParams SbParams::tuned_for(uint32_t n, double density) {
  SbParams p;
  p.alpha = std::max(2.0, std::round(double(n) * density / 3.0));
  p.beta = 1.0;
  return p;
}

double NoiseSchedule::amplitude(uint32_t k) const {
  switch (kind) {
    case NoiseKind::none: return 0.0;
    case NoiseKind::uniform_constant: return amplitude0;
    case NoiseKind::uniform_decaying:
      if (custom) return custom(k);
      return amplitude0 / (1.0 + decay_g * double(k));
  }
  return 0.0;
}

void NoiseSchedule::validate() const {
  if (!(amplitude0 >= 0.0))
    fail(ErrorCode::validation, "NoiseSchedule.amplitude0 must be >= 0");
  if (levels < 2) fail(ErrorCode::validation, "NoiseSchedule.levels must be >= 2");
  if (kind == NoiseKind::uniform_decaying && !custom && !(decay_g >= 0.0))
    fail(ErrorCode::validation, "NoiseSchedule.decay_g must be >= 0");
}

NoiseSchedule NoiseSchedule::none() {
  NoiseSchedule s;
  s.kind = NoiseKind::none;
  s.amplitude0 = 0.0;
  return s;
}

NoiseSchedule NoiseSchedule::constant(double amplitude, uint32_t levels) {
  NoiseSchedule s;
  s.kind = NoiseKind::uniform_constant;
  s.amplitude0 = amplitude;
  s.levels = levels;
  return s;
}

NoiseSchedule NoiseSchedule::decaying(double amplitude0, double g, uint32_t levels) {
  NoiseSchedule s;
  s.kind = NoiseKind::uniform_decaying;
  s.amplitude0 = amplitude0;
  s.decay_g = g;
  s.levels = levels;
  return s;
}

NoiseSchedule NoiseSchedule::tuned_for(uint32_t n, double density) {
  return decaying(2.4 * SbParams::tuned_for(n, density).alpha, 0.1);
}

double noise_sample(const NoiseSchedule& schedule, uint32_t k, BitSource& bits) {
  if (schedule.kind == NoiseKind::none) return 0.0;
  double step = schedule.amplitude(k) / double(schedule.levels - 1);
  uint32_t m = bits.uniform_levels(schedule.levels);
  double value = double(m) * step;
  return bits.bit() ? value : -value;
}

SpinVector sb_step(const CouplingMatrix& j, std::span<const int8_t> x,
                   const SbParams& params, const NoiseSchedule& schedule,
                   uint32_t k, BitSource& noise_bits) {
  if (x.size() != j.size())
    fail(ErrorCode::dimension_mismatch,
         "spin vector length " + std::to_string(x.size()) +
             " does not match matrix size " + std::to_string(j.size()));
  const uint32_t n = j.size();

  // All fields come from the old state: synchronous parallel update.
  std::vector<int32_t> field(n, 0);
  for (uint32_t i = 0; i < n; ++i) {
    auto row = j.row(i);
    int32_t f = 0;
    for (uint32_t m = 0; m < n; ++m)
      if (row[m]) f += x[m];
    field[i] = f;
  }

  SpinVector next(n);
  for (uint32_t i = 0; i < n; ++i) {
    double z = noise_sample(schedule, k, noise_bits);
    double y = params.alpha * double(x[i]) - params.beta * double(field[i]) + z;
    next[i] = y > 0.0 ? int8_t(1) : (y < 0.0 ? int8_t(-1) : x[i]);
  }
  return next;
}

uint64_t trial_seed_for(uint64_t base_seed, uint32_t trial_index) {
  return split_seed(base_seed, trial_index);
}

TrialResult run_trial_from(const ProblemInstance& instance, const SbParams& params,
                           const NoiseSchedule& schedule, SpinVector x0,
                           BitSource& noise_bits, uint64_t recorded_seed) {
  params.validate();
  schedule.validate();
  const auto& j = instance.coupling;
  validate_spins(x0, j.size());

  TrialResult result;
  result.seed = recorded_seed;
  result.trajectory.reserve(params.iterations);
  SpinVector x = std::move(x0);
  for (uint32_t k = 0; k < params.iterations; ++k) {
    x = sb_step(j, x, params, schedule, k, noise_bits);
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

TrialResult run_trial(const ProblemInstance& instance, const SbParams& params,
                      const NoiseSchedule& schedule, uint64_t trial_seed) {
  Xoshiro256ss init_rng(split_seed(trial_seed, 0));
  SpinVector x0 = random_spins(instance.coupling.size(), init_rng);
  XoshiroBits noise(split_seed(trial_seed, 1));
  return run_trial_from(instance, params, schedule, std::move(x0), noise, trial_seed);
}

std::vector<TrialResult> run_trials(const ProblemInstance& instance,
                                    const SbParams& params,
                                    const NoiseSchedule& schedule, uint32_t n_trials,
                                    uint64_t base_seed, uint32_t first_trial_index) {
  if (n_trials < 1) fail(ErrorCode::validation, "n_trials must be >= 1");
  std::vector<TrialResult> results(n_trials);
  parallel_for(n_trials, [&](std::size_t t) {
    uint64_t seed = trial_seed_for(base_seed, first_trial_index + uint32_t(t));
    results[t] = run_trial(instance, params, schedule, seed);
  });
  return results;
}

}  // namespace sbcim
