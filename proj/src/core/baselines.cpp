#include "core/baselines.hpp"

#include <cmath>

#include "core/parallel.hpp"

namespace sbcim {

void GwParams::validate() const {
  if (rank == 1) fail(ErrorCode::validation, "GwParams.rank must be 0 (auto) or >= 2");
  if (max_iters < 1) fail(ErrorCode::validation, "GwParams.max_iters must be >= 1");
  if (!(step_size > 0.0)) fail(ErrorCode::validation, "GwParams.step_size must be > 0");
  if (roundings < 1) fail(ErrorCode::validation, "GwParams.roundings must be >= 1");
}

void LocalSearchParams::validate() const {
  if (restarts < 1) fail(ErrorCode::validation, "LocalSearchParams.restarts must be >= 1");
}

namespace {

// Relaxation objective sum_{m<k} J_mk (1 - v_m.v_k)/2 for unit rows of V.
double relax_objective(const CouplingMatrix& j, const std::vector<double>& v,
                       uint32_t rank) {
  const uint32_t n = j.size();
  double dots = 0.0;
  for (uint32_t m = 0; m < n; ++m) {
    auto row = j.row(m);
    for (uint32_t k = m + 1; k < n; ++k) {
      if (!row[k]) continue;
      double d = 0.0;
      for (uint32_t r = 0; r < rank; ++r)
        d += v[std::size_t(m) * rank + r] * v[std::size_t(k) * rank + r];
      dots += d;
    }
  }
  return 0.5 * (double(j.edge_count()) - dots);
}

void normalize_rows(std::vector<double>& v, uint32_t n, uint32_t rank,
                    Xoshiro256ss& rng) {
  for (uint32_t i = 0; i < n; ++i) {
    double* row = v.data() + std::size_t(i) * rank;
    double norm2 = 0.0;
    for (uint32_t r = 0; r < rank; ++r) norm2 += row[r] * row[r];
    if (norm2 == 0.0) {
      // degenerate row: re-draw a random direction
      for (uint32_t r = 0; r < rank; ++r) row[r] = rng.gaussian();
      norm2 = 0.0;
      for (uint32_t r = 0; r < rank; ++r) norm2 += row[r] * row[r];
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (uint32_t r = 0; r < rank; ++r) row[r] *= inv;
  }
}

}  // namespace

GwResult gw_solve(const ProblemInstance& instance, const GwParams& params) {
  params.validate();
  const auto& j = instance.coupling;
  const uint32_t n = j.size();
  const uint32_t rank =
      params.rank ? params.rank
                  : std::max<uint32_t>(2, uint32_t(std::ceil(std::sqrt(2.0 * n))));

  Xoshiro256ss rng(split_seed(params.seed, 0));
  std::vector<double> v(std::size_t(n) * rank);
  for (auto& x : v) x = rng.gaussian();
  normalize_rows(v, n, rank, rng);

  std::vector<double> grad(std::size_t(n) * rank);
  std::vector<double> trial(v.size());

  double objective = relax_objective(j, v, rank);
  double eta = params.step_size;
  GwResult result;
  uint32_t stall = 0;

  uint32_t iter = 0;
  for (; iter < params.max_iters; ++iter) {
    // ascent direction of sum J (1 - v.v)/2 w.r.t. row i is -(J V)_i / 2;
    // the 1/2 folds into the step size
    for (uint32_t i = 0; i < n; ++i) {
      auto row = j.row(i);
      double* g = grad.data() + std::size_t(i) * rank;
      for (uint32_t r = 0; r < rank; ++r) g[r] = 0.0;
      for (uint32_t k = 0; k < n; ++k) {
        if (!row[k]) continue;
        const double* vk = v.data() + std::size_t(k) * rank;
        for (uint32_t r = 0; r < rank; ++r) g[r] += vk[r];
      }
    }

    // backtracking keeps the objective monotone
    bool accepted = false;
    while (eta >= 1e-12) {
      for (std::size_t idx = 0; idx < v.size(); ++idx)
        trial[idx] = v[idx] - eta * grad[idx];
      normalize_rows(trial, n, rank, rng);
      double next = relax_objective(j, trial, rank);
      if (next + 1e-12 >= objective) {
        double gain = next - objective;
        v.swap(trial);
        stall = gain < 1e-10 * std::max(1.0, std::abs(objective)) ? stall + 1 : 0;
        objective = next;
        accepted = true;
        eta = std::min(eta * 1.2, 16.0 * params.step_size);
        break;
      }
      eta *= 0.5;
    }
    result.objective_trace.push_back(objective);
    if (!accepted || stall >= 3) {
      result.converged = true;
      ++iter;
      break;
    }
  }
  result.iters_used = iter;
  result.relax_value = objective;

  for (uint32_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (uint32_t r = 0; r < rank; ++r) {
      double c = v[std::size_t(i) * rank + r];
      norm2 += c * c;
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
      fail(ErrorCode::internal, "gw embedding row drifted off the unit sphere");
  }

  // hyperplane rounding, one derived stream per sample
  std::vector<uint64_t> cuts(params.roundings);
  std::vector<SpinVector> spins(params.roundings);
  parallel_for(params.roundings, [&](std::size_t s) {
    Xoshiro256ss hrng(split_seed(params.seed, 1000 + s));
    std::vector<double> plane(rank);
    for (auto& p : plane) p = hrng.gaussian();
    SpinVector x(n);
    for (uint32_t i = 0; i < n; ++i) {
      double d = 0.0;
      const double* vi = v.data() + std::size_t(i) * rank;
      for (uint32_t r = 0; r < rank; ++r) d += vi[r] * plane[r];
      x[i] = d >= 0.0 ? int8_t(1) : int8_t(-1);
    }
    cuts[s] = cut_size(j, x);
    spins[s] = std::move(x);
  });

  double total = 0.0;
  for (uint32_t s = 0; s < params.roundings; ++s) {
    total += double(cuts[s]);
    if (s == 0 || cuts[s] > result.best_cut) {
      result.best_cut = cuts[s];
      result.best_spins = spins[s];
    }
  }
  result.expected_cut = total / double(params.roundings);
  return result;
}

namespace {

struct AscentOutcome {
  uint64_t cut = 0;
  SpinVector spins;
};

// Steepest single-flip ascent from x. gain(i) = deg(i) - 2*cross(i); the
// cross counts are maintained incrementally and audited against a fresh
// cut_size every 64 flips.
AscentOutcome ascend(const CouplingMatrix& j, SpinVector x, uint32_t max_flips) {
  const uint32_t n = j.size();
  std::vector<int32_t> cross(n, 0), deg(n, 0);
  for (uint32_t i = 0; i < n; ++i) {
    auto row = j.row(i);
    for (uint32_t k = 0; k < n; ++k) {
      if (!row[k]) continue;
      ++deg[i];
      if (x[i] != x[k]) ++cross[i];
    }
  }
  uint64_t cut = 0;
  for (uint32_t i = 0; i < n; ++i) cut += uint64_t(cross[i]);
  cut /= 2;

  for (uint32_t flips = 0; flips < max_flips; ++flips) {
    int32_t best_gain = 0;
    uint32_t best_i = n;
    for (uint32_t i = 0; i < n; ++i) {
      int32_t gain = deg[i] - 2 * cross[i];
      if (gain > best_gain) {
        best_gain = gain;
        best_i = i;
      }
    }
    if (best_i == n) break;  // 1-flip optimal

    auto row = j.row(best_i);
    for (uint32_t k = 0; k < n; ++k) {
      if (!row[k]) continue;
      // edge (best_i, k) toggles its crossing state
      if (x[best_i] != x[k])
        --cross[k];
      else
        ++cross[k];
    }
    cross[best_i] = deg[best_i] - cross[best_i];
    x[best_i] = int8_t(-x[best_i]);
    cut += uint64_t(best_gain);

    if ((flips & 63u) == 63u && cut != cut_size(j, x))
      fail(ErrorCode::internal, "local search gain bookkeeping diverged");
  }
  if (cut != cut_size(j, x))
    fail(ErrorCode::internal, "local search gain bookkeeping diverged");
  return {cut, std::move(x)};
}

}  // namespace

LocalSearchResult local_search_best(const ProblemInstance& instance,
                                    const LocalSearchParams& params) {
  params.validate();
  const auto& j = instance.coupling;
  const uint32_t n = j.size();
  const uint32_t max_flips = params.max_flips ? params.max_flips : 10 * n;

  std::vector<AscentOutcome> outcomes(params.restarts);
  parallel_for(params.restarts, [&](std::size_t r) {
    Xoshiro256ss rng(split_seed(params.seed, r));
    outcomes[r] = ascend(j, random_spins(n, rng), max_flips);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r)
    if (outcomes[r].cut > outcomes[best].cut) best = r;
  return {outcomes[best].cut, std::move(outcomes[best].spins)};
}

}  // namespace sbcim
