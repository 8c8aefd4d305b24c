#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/graph.hpp"
#include "core/rng.hpp"

namespace sbcim {

// Gains of the discrete bifurcation update
//   x_{k+1} = sgn(alpha x_k - beta J x_k + zeta_k).
// The engine is scale-invariant, so configs normally express alpha and the
// noise amplitude in units of beta = 1.
struct SbParams {
  double alpha = 10.0;
  double beta = 1.0;
  uint32_t iterations = 20;
  uint64_t seed = 1;

  void validate() const;

  // Defaults from the coarse grid-scan utility. alpha tracks the typical
  // coupling-field magnitude, which grows with n*density.
  static SbParams tuned_for(uint32_t n, double density);
};

enum class NoiseKind { none, uniform_constant, uniform_decaying };

// Injected-noise schedule. Samples are uniform over 2*levels symmetric
// quantized values spanning [-A_k, +A_k]; A_k follows the reciprocal law
// A0/(1 + g k) unless a custom curve (e.g. the DAC's staircase) is set.
struct NoiseSchedule {
  NoiseKind kind = NoiseKind::uniform_decaying;
  double amplitude0 = 24.0;
  uint32_t levels = 16;
  double decay_g = 0.1;
  std::function<double(uint32_t)> custom;

  double amplitude(uint32_t k) const;
  void validate() const;

  static NoiseSchedule none();
  static NoiseSchedule constant(double amplitude, uint32_t levels = 16);
  static NoiseSchedule decaying(double amplitude0, double g, uint32_t levels = 16);
  static NoiseSchedule tuned_for(uint32_t n, double density);
};

// One sample: sign * m * (A_k/(levels-1)), magnitude index first, then the
// sign bit. kind=none returns 0.0 without consuming bits.
double noise_sample(const NoiseSchedule& schedule, uint32_t k, BitSource& bits);

struct TrialResult {
  SpinVector final_spins;
  uint64_t best_cut = 0;
  uint32_t best_iteration = 0;     // first iteration reaching best_cut
  std::vector<uint64_t> trajectory;  // cut size after every step
  uint64_t seed = 0;
};

// Synchronous parallel update of every spin from the old state. Tie rule:
// y_i == 0 keeps the previous spin (a comparator never outputs "zero").
SpinVector sb_step(const CouplingMatrix& j, std::span<const int8_t> x,
                   const SbParams& params, const NoiseSchedule& schedule,
                   uint32_t k, BitSource& noise_bits);

uint64_t trial_seed_for(uint64_t base_seed, uint32_t trial_index);

TrialResult run_trial(const ProblemInstance& instance, const SbParams& params,
                      const NoiseSchedule& schedule, uint64_t trial_seed);

// Same loop with a caller-provided start state and noise stream, for
// lockstep and symmetry tests.
TrialResult run_trial_from(const ProblemInstance& instance, const SbParams& params,
                           const NoiseSchedule& schedule, SpinVector x0,
                           BitSource& noise_bits, uint64_t recorded_seed);

// Trial t uses trial_seed_for(base_seed, first_trial_index + t); results do
// not depend on how trials are scheduled across workers.
std::vector<TrialResult> run_trials(const ProblemInstance& instance,
                                    const SbParams& params,
                                    const NoiseSchedule& schedule, uint32_t n_trials,
                                    uint64_t base_seed,
                                    uint32_t first_trial_index = 0);

}  // namespace sbcim
