#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>

#include "core/hw.hpp"

using namespace sbcim;

namespace {

// Binary-exact configuration: every current is an integer multiple of
// 2^-21 A and the noise full scale (30 units) is divisible by the 15-step
// magnitude span, so bitline sums and the ideal engine's unit-normalized
// update are both exact and the two engines must agree bit for bit.
HwConfig lockstep_cfg() {
  HwConfig cfg;
  cfg.i_c = 0x1.0p-21;
  cfg.i_fb = 10 * 0x1.0p-21;
  cfg.sigma_cell = 0.0;
  cfg.i_leak = 0.0;
  cfg.sigma_offset = 0.0;
  cfg.noise_mode = NoiseMode::per_column_magnitude;
  return cfg;
}

NoiseDacConfig lockstep_dac() {
  NoiseDacConfig dac;
  dac.i_ref = 30 * 0x1.0p-21;
  dac.cell_gain = 1.0;
  dac.branch_doubling = true;
  dac.decay_rate = 0.25;
  dac.prbs_width = 24;
  return dac;
}

CouplingMatrix complete(uint32_t n) {
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t m = 0; m < n; ++m)
    for (uint32_t k = m + 1; k < n; ++k) edges.emplace_back(m, k);
  return CouplingMatrix::from_edges(n, edges);
}

}  // namespace

TEST_CASE("cell currents: one FB cell against 59 C cells") {
  HwConfig cfg;  // defaults
  auto j = complete(60);
  SpinVector x(60, int8_t(1));
  auto currents = cell_currents(j, x, cfg, MismatchMap::none(60));
  for (uint32_t col = 0; col < 60; ++col) {
    CHECK(currents[col].i_bl == 59.0 * cfg.i_c);  // large drop on BL
    CHECK(currents[col].i_blb == cfg.i_fb);       // small drop on BLB
    CHECK(currents[col].i_bl > currents[col].i_blb);
  }
}

TEST_CASE("cell currents: empty matrix leaves only the FB side") {
  HwConfig cfg;
  std::vector<uint8_t> zeros(16, 0);
  auto j = CouplingMatrix::from_entries(4, zeros);
  SpinVector x{1, -1, 1, -1};
  auto currents = cell_currents(j, x, cfg, MismatchMap::none(4));
  for (uint32_t col = 0; col < 4; ++col) {
    if (x[col] > 0) {
      CHECK(currents[col].i_bl == 0.0);
      CHECK(currents[col].i_blb == cfg.i_fb);
    } else {
      CHECK(currents[col].i_bl == cfg.i_fb);
      CHECK(currents[col].i_blb == 0.0);
    }
  }
}

TEST_CASE("cell currents match a direct count of active cells") {
  HwConfig cfg;
  Xoshiro256ss rng(17);
  for (int it = 0; it < 50; ++it) {
    uint32_t n = 4 + rng.below(30);
    auto j = CouplingMatrix::random(n, 0.5, rng.next());
    auto x = random_spins(n, rng);
    auto currents = cell_currents(j, x, cfg, MismatchMap::none(n));
    for (uint32_t col = 0; col < n; ++col) {
      uint32_t bl = 0, blb = 0;
      for (uint32_t m = 0; m < n; ++m) {
        if (m == col || !j.edge(m, col)) continue;
        (x[m] > 0 ? bl : blb) += 1;
      }
      double want_bl = double(bl) * cfg.i_c + (x[col] < 0 ? cfg.i_fb : 0.0);
      double want_blb = double(blb) * cfg.i_c + (x[col] > 0 ? cfg.i_fb : 0.0);
      CHECK(currents[col].i_bl == want_bl);
      CHECK(currents[col].i_blb == want_blb);
    }
  }
}

TEST_CASE("leakage goes to the wordline-selected side of off cells") {
  HwConfig cfg;
  cfg.i_leak = 1e-9;
  std::vector<uint8_t> zeros(16, 0);
  auto j = CouplingMatrix::from_entries(4, zeros);
  SpinVector x{1, 1, 1, -1};
  auto currents = cell_currents(j, x, cfg, MismatchMap::none(4));
  // column 0: rows 1,2 leak to BL (x=+1), row 3 leaks to BLB
  CHECK(currents[0].i_bl == doctest::Approx(2e-9).epsilon(1e-12));
  CHECK(currents[0].i_blb == doctest::Approx(cfg.i_fb + 1e-9).epsilon(1e-12));
}

TEST_CASE("bitline discharge arithmetic") {
  HwConfig cfg;  // 4ns, 200fF defaults
  auto d = bitline_discharge(10e-6, cfg);
  CHECK(std::abs(d.delta_v - 0.2) <= 1e-15);
  CHECK_FALSE(d.saturated);

  CHECK(bitline_discharge(0.0, cfg).delta_v == 0.0);

  auto clamped = bitline_discharge(1e-3, cfg);  // 20V worth of discharge
  CHECK(clamped.delta_v == cfg.v_precharge);
  CHECK(clamped.saturated);

  CHECK_THROWS_AS(bitline_discharge(-1e-6, cfg), Error);
}

TEST_CASE("discharge is linear: per-cell contributions sum exactly") {
  auto cfg = lockstep_cfg();
  Xoshiro256ss rng(4);
  for (int it = 0; it < 200; ++it) {
    uint32_t a = rng.below(60), b = rng.below(60);
    double ia = double(a) * cfg.i_c, ib = double(b) * cfg.i_c;
    double together = bitline_discharge(ia + ib, cfg).delta_v;
    double apart = bitline_discharge(ia, cfg).delta_v + bitline_discharge(ib, cfg).delta_v;
    CHECK(together == apart);
  }
}

TEST_CASE("comparator decisions and calibrated tie") {
  auto bank = ComparatorBank::ideal(4);
  CHECK(comparator_decide(1.8, 1.6, 0, bank, -1) == 1);
  CHECK(comparator_decide(1.5, 1.8, 1, bank, 1) == -1);

  bank.offsets[2] = 0.010;
  bank.trims[2] = 0.010;
  CHECK(comparator_decide(1.7, 1.7, 2, bank, 1) == 1);
  CHECK(comparator_decide(1.7, 1.7, 2, bank, -1) == -1);

  // C-cell discharge of BL drives the decision toward -1
  bank = ComparatorBank::ideal(1);
  CHECK(comparator_decide(1.8 - 0.3, 1.8 - 0.05, 0, bank, 1) == -1);
}

TEST_CASE("offset calibration properties") {
  auto zero = calibrate_offsets(ComparatorBank::ideal(8), 2e-3);
  for (double t : zero.trims) CHECK(t == 0.0);

  ComparatorBank one = ComparatorBank::ideal(1);
  one.offsets[0] = 7e-3;
  auto cal = calibrate_offsets(one, 2e-3);
  bool six = std::abs(cal.trims[0] - 6e-3) < 1e-12;
  bool eight = std::abs(cal.trims[0] - 8e-3) < 1e-12;
  CHECK((six || eight));
  CHECK(std::abs(cal.offsets[0] - cal.trims[0]) <= 1e-3 + 1e-12);

  Xoshiro256ss rng(12);
  auto big = calibrate_offsets(ComparatorBank::random(10000, 5e-3, rng), 1e-3);
  for (std::size_t i = 0; i < big.offsets.size(); ++i) {
    CHECK(std::abs(big.offsets[i] - big.trims[i]) <= 0.5e-3 * (1 + 1e-9));
    CHECK(std::abs(big.offsets[i] - big.trims[i]) <= 5 * 5e-3);
  }
}

TEST_CASE("dac branch current: zero code, full scale, decay curve") {
  NoiseDacConfig dac;
  CHECK(dac_branch_current(dac, 7, 0) == 0.0);

  NoiseDacConfig flat = dac;
  flat.decay_rate = 0.0;
  CHECK(dac_branch_current(flat, 0, 15) == flat.i_ref);

  CHECK(dac.decay_gain(0) == 1.0);
  for (uint32_t d = 0; d < 255; ++d)
    CHECK(dac.decay_gain(d + 1) < dac.decay_gain(d));
  CHECK(dac.decay_gain(3) == 0.125);  // doubled branches halve the gain per code

  NoiseDacConfig equal = dac;
  equal.branch_doubling = false;
  CHECK(equal.decay_gain(3) == 0.25);  // equal branches: 1/(1+d)
}

TEST_CASE("dac expected magnitude decays monotonically over k") {
  for (bool doubling : {true, false}) {
    NoiseDacConfig dac;
    dac.branch_doubling = doubling;
    dac.decay_rate = 0.5;
    double prev = 1e300;
    for (uint64_t k = 0; k <= 255; ++k) {
      // E[|i|] = i_ref * E[m]/15 * gain(d(k)); the PRBS part is constant in k
      double expectation = dac.i_ref * 7.5 / 15.0 * dac.decay_gain(dac.counter_to_decay(k));
      CHECK(expectation <= prev);
      if (k > 0 && dac.counter_to_decay(k) > dac.counter_to_decay(k - 1))
        CHECK(expectation < prev);
      prev = expectation;
    }
  }
}

TEST_CASE("dac magnitude histogram is uniform and signs balance") {
  NoiseDacConfig dac;
  PrbsState prbs(24, 0xBEEF);
  const int n = 100000;
  std::vector<int> counts(16, 0);
  int plus = 0;
  for (int i = 0; i < n; ++i) {
    auto draw = noise_dac_current(0, dac, prbs);
    int m = int(std::lround(draw.magnitude / dac.i_ref * 15.0));
    REQUIRE(m >= 0);
    REQUIRE(m <= 15);
    ++counts[m];
    plus += draw.sign > 0;
  }
  double chi2 = 0;
  for (int b = 0; b < 16; ++b) {
    double d = counts[b] - n / 16.0;
    chi2 += d * d / (n / 16.0);
  }
  CHECK(chi2 < 37.697);  // chi-square 0.999 quantile, 15 dof
  double imbalance = std::abs(2.0 * plus - n) / double(n);
  CHECK(imbalance <= 0.01);
}

TEST_CASE("iteration counter overflow saturates decay and warns once") {
  NoiseDacConfig dac;
  bool warned = false;
  double i = dac_branch_current(dac, uint64_t(1) << dac.counter_bits, 15, &warned);
  CHECK(warned);
  CHECK(i == dac.i_ref * dac.decay_gain(dac.max_decay_code()));
  double again = dac_branch_current(dac, (uint64_t(1) << dac.counter_bits) + 5, 15, &warned);
  CHECK(again == i);
}

TEST_CASE("bias-to-current saturation law") {
  BiasModel model;
  double prev = bias_to_current(0.05, model);
  for (double v = 0.1; v < 1.8; v += 0.05) {
    double i = bias_to_current(v, model);
    CHECK(i <= prev);  // lower bias, higher current
    prev = i;
  }
  CHECK(bias_to_current(1.79, model) < 1e-4 * model.i_max);
  double r = bias_to_current(0.6, model) / bias_to_current(1.2, model);
  double want = std::pow((1.8 - 0.6) / (1.8 - 1.2), model.exponent);
  CHECK(r == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS_AS(bias_to_current(0.0, model), Error);
  CHECK_THROWS_AS(bias_to_current(2.0, model), Error);
}

TEST_CASE("timing bookkeeping is exact") {
  HwConfig cfg;
  CHECK(iteration_latency_seconds(cfg) == 30e-9);
  CHECK(hardware_time_seconds(cfg, 20) == 0.6e-6);
}

TEST_CASE("no clamping in the all-active worst case with defaults") {
  HwConfig cfg;
  NoiseDacConfig dac;
  auto j = complete(60);
  SpinVector x(60, int8_t(1));
  x[0] = -1;  // FB cell of column 0 joins the 59 C cells on BL
  auto currents = cell_currents(j, x, cfg, MismatchMap::none(60));
  double worst = currents[0].i_bl + dac.injected_full_scale();
  auto d = bitline_discharge(worst, cfg);
  CHECK_FALSE(d.saturated);
  CHECK(d.delta_v < cfg.v_precharge);
  cfg.check_discharge_budget(60);  // run-start invariant holds for defaults
}

TEST_CASE("discharge budget check rejects over-aggressive currents") {
  HwConfig cfg;
  cfg.i_c = 2e-6;  // 60 * 2uA * 20kV/A = 2.4V > 1.8V
  CHECK_THROWS_AS(cfg.check_discharge_budget(60), Error);
}

TEST_CASE("hw_step equals sb_step when noise is disabled") {
  auto cfg = lockstep_cfg();
  auto dac = lockstep_dac();
  dac.cell_gain = 0.0;  // injected noise current is exactly zero
  auto params = sb_params_from_hw(cfg, 1, 0);
  auto off = NoiseSchedule::none();
  XoshiroBits unused(0);
  Xoshiro256ss rng(88);
  for (int it = 0; it < 1000; ++it) {
    uint32_t n = 4 + rng.below(40);
    auto j = CouplingMatrix::random(n, 0.1 + 0.8 * rng.uniform01(), rng.next());
    auto x = random_spins(n, rng);
    auto st = make_hw_trial_state(n, cfg, dac, rng.next(), 0);
    auto hw = hw_step(j, x, cfg, dac, st, 0);
    auto sb = sb_step(j, x, params, off, 0, unused);
    REQUIRE(hw == sb);
  }
}

TEST_CASE("hw trial locksteps with the ideal engine bit for bit") {
  auto cfg = lockstep_cfg();
  auto dac = lockstep_dac();
  const uint32_t iterations = 20;

  for (uint64_t g = 0; g < 5; ++g) {
    auto inst = random_graph(60, 0.5, 7000 + g);
    uint64_t trial_seed = trial_seed_for(555, uint32_t(g));

    auto hw = run_trial_hw(inst, cfg, dac, iterations, trial_seed, /*mc_seed=*/1);

    auto params = sb_params_from_hw(cfg, iterations, trial_seed);
    auto sched = hardware_schedule(cfg, dac);
    Xoshiro256ss init_rng(split_seed(trial_seed, 0));
    auto x0 = random_spins(60, init_rng);
    PrbsState noise(dac.prbs_width, split_seed(trial_seed, 1));
    auto ideal = run_trial_from(inst, params, sched, x0, noise, trial_seed);

    REQUIRE(hw.trajectory == ideal.trajectory);
    REQUIRE(hw.final_spins == ideal.final_spins);
    CHECK(hw.best_cut == ideal.best_cut);
    CHECK(hw.best_iteration == ideal.best_iteration);
  }
}

TEST_CASE("hw trials are deterministic and parallel-safe") {
  auto inst = random_graph(24, 0.5, 3);
  HwConfig cfg;
  NoiseDacConfig dac;
  auto a = run_trial_hw(inst, cfg, dac, 10, 42, 7);
  auto b = run_trial_hw(inst, cfg, dac, 10, 42, 7);
  CHECK(a.trajectory == b.trajectory);
  CHECK(a.final_spins == b.final_spins);

  setenv("SBCIM_WORKERS", "1", 1);
  auto serial = run_trials_hw(inst, cfg, dac, 10, 20, 9, 7);
  setenv("SBCIM_WORKERS", "4", 1);
  auto parallel = run_trials_hw(inst, cfg, dac, 10, 20, 9, 7);
  unsetenv("SBCIM_WORKERS");
  for (int t = 0; t < 20; ++t) {
    CHECK(serial[t].trajectory == parallel[t].trajectory);
    CHECK(serial[t].final_spins == parallel[t].final_spins);
  }
}

TEST_CASE("solver accuracy degrades gracefully under 5% mismatch") {
  // Tuned-style hardware point for n=24, density 0.5: alpha=4, noise full
  // scale 9.6 units with the equal-branch staircase.
  HwConfig cfg;
  cfg.i_fb = 4 * cfg.i_c;
  NoiseDacConfig dac;
  dac.cell_gain = 9.6 * cfg.i_c / dac.i_ref;
  dac.branch_doubling = false;
  dac.decay_rate = 0.1;

  auto inst = random_graph(24, 0.5, 12);
  double denom = double(brute_force_ground_state(inst.coupling).cut);
  const uint32_t iters = 15, trials = 6;

  auto mean_acc = [&](double sigma, uint64_t mc_base, int mc_count) {
    HwConfig c = cfg;
    c.sigma_cell = sigma;
    double total = 0;
    int count = 0;
    for (int mc = 0; mc < mc_count; ++mc) {
      auto results = run_trials_hw(inst, c, dac, iters, trials, 1000, mc_base + mc);
      for (const auto& r : results) {
        total += double(r.best_cut) / denom;
        ++count;
      }
    }
    return total / count;
  };

  double nominal = mean_acc(0.0, 0, 1);
  double varied = mean_acc(0.05, 100, 100);
  CHECK(std::abs(nominal - varied) <= 0.05);
}

TEST_CASE("shared-magnitude mode produces valid trajectories") {
  auto inst = random_graph(30, 0.5, 44);
  HwConfig cfg;
  cfg.noise_mode = NoiseMode::shared_magnitude;
  NoiseDacConfig dac;
  auto r = run_trial_hw(inst, cfg, dac, 12, 5, 6);
  CHECK(r.trajectory.size() == 12);
  for (auto c : r.trajectory) CHECK(c <= inst.coupling.edge_count());
  for (auto s : r.final_spins) CHECK((s == 1 || s == -1));
}
