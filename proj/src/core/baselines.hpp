#pragma once

#include <cstdint>

#include "core/graph.hpp"

namespace sbcim {

// Low-rank (Burer-Monteiro) factorization of the MAXCUT SDP relaxation,
// optimized by projected gradient ascent with backtracking, then rounded
// with random hyperplanes.
struct GwParams {
  uint32_t rank = 0;  // 0: ceil(sqrt(2n))
  uint32_t max_iters = 500;
  double step_size = 0.25;
  uint32_t roundings = 100;
  uint64_t seed = 1;

  void validate() const;
};

struct GwResult {
  uint64_t best_cut = 0;
  SpinVector best_spins;
  double expected_cut = 0.0;  // mean over the rounding samples
  double relax_value = 0.0;   // relaxation objective at the final iterate
  bool converged = false;
  uint32_t iters_used = 0;
  std::vector<double> objective_trace;  // accepted objective per iteration
};

GwResult gw_solve(const ProblemInstance& instance, const GwParams& params);

// Multi-start steepest-ascent single-flip search with incremental gain
// bookkeeping; the workhorse best-known-cut oracle beyond the exhaustive cap.
struct LocalSearchParams {
  uint32_t restarts = 1000;
  uint32_t max_flips = 0;  // 0: 10n per restart
  uint64_t seed = 1;

  void validate() const;
};

struct LocalSearchResult {
  uint64_t cut = 0;
  SpinVector spins;
};

LocalSearchResult local_search_best(const ProblemInstance& instance,
                                    const LocalSearchParams& params);

}  // namespace sbcim
