#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace sbcim {

// Spins are stored as int8_t and every element is exactly -1 or +1.
using SpinVector = std::vector<int8_t>;

// Symmetric binary edge matrix with zero diagonal, stored dense (desk-scale
// instances are small and ~50% dense, matching the chip's SRAM array).
class CouplingMatrix {
public:
  static CouplingMatrix random(uint32_t n, double density, uint64_t seed);

  // Builds from a full row-major n*n buffer of {0,1} entries, validating
  // symmetry and the zero diagonal.
  static CouplingMatrix from_entries(uint32_t n, std::span<const uint8_t> entries);

  // Builds from an undirected edge list; each edge at most once in either
  // orientation.
  static CouplingMatrix from_edges(uint32_t n,
                                   std::span<const std::pair<uint32_t, uint32_t>> edges);

  uint32_t size() const { return n_; }
  uint64_t edge_count() const { return edge_count_; }

  bool edge(uint32_t m, uint32_t k) const {
    return entries_[std::size_t(m) * n_ + k] != 0;
  }

  std::span<const uint8_t> row(uint32_t m) const {
    return {entries_.data() + std::size_t(m) * n_, n_};
  }

  std::span<const uint8_t> entries() const { return entries_; }

  bool operator==(const CouplingMatrix& other) const = default;

private:
  explicit CouplingMatrix(uint32_t n);
  void add_edge(uint32_t m, uint32_t k);

  uint32_t n_ = 2;
  uint64_t edge_count_ = 0;
  std::vector<uint8_t> entries_;
};

struct BestKnown {
  uint64_t cut = 0;
  std::string provenance;  // e.g. "exact", "local-search(restarts=1000)"

  bool operator==(const BestKnown&) const = default;
};

struct ProblemInstance {
  CouplingMatrix coupling;
  uint64_t seed = 0;
  double density = 0.0;
  std::optional<BestKnown> best_known;
};

// Bernoulli(density) on every unordered pair, deterministic in seed.
ProblemInstance random_graph(uint32_t n, double density, uint64_t seed);

// Number of edges {m,k} with J_mk = 1 and x_m != x_k.
uint64_t cut_size(const CouplingMatrix& j, std::span<const int8_t> x);

// H = sum_{m<k} J_mk x_m x_k. Identity: cut_size == (edge_count - H) / 2.
int64_t ising_energy(const CouplingMatrix& j, std::span<const int8_t> x);

// Exhaustive-search cap; 2^25 states after fixing spin 0 by the global
// flip symmetry.
inline constexpr uint32_t kBruteForceMaxNodes = 26;

struct GroundState {
  uint64_t cut = 0;
  SpinVector spins;
};

// Exact maximum cut by Gray-code enumeration with O(n) incremental field
// updates. Work is split over a fixed block partition, so the result is
// identical regardless of worker count.
GroundState brute_force_ground_state(const CouplingMatrix& j);

SpinVector random_spins(uint32_t n, Xoshiro256ss& rng);

// Length and {-1,+1} domain check for spin buffers crossing the API boundary.
void validate_spins(std::span<const int8_t> x, uint32_t n);

// Native text format, one instance per file:
//   line 1:  ising-maxcut v1
//   line 2:  n=<int> density=<float> seed=<u64> best_known=<int|none>
//            [provenance=<tag>]
//   lines 3..3+n-1: for row m, the columns k>m with J_mk=1, space-separated
//            (empty line when the row has no later neighbors)
ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& instance, const std::string& path);

// Plain adjacency-list import: "n=<int>" on the first non-comment line,
// then one "u v" pair per line, each undirected edge listed once.
ProblemInstance import_edge_list(const std::string& path);

}  // namespace sbcim
