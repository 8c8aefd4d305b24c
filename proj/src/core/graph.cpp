#include "core/graph.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/parallel.hpp"

namespace sbcim {

namespace {

std::string format_pair(uint32_t m, uint32_t k) {
  std::ostringstream os;
  os << "(" << m << "," << k << ")";
  return os.str();
}

}  // namespace

CouplingMatrix::CouplingMatrix(uint32_t n) : n_(n), entries_(std::size_t(n) * n, 0) {
  if (n < 2) fail(ErrorCode::invalid_argument, "node count must be at least 2");
}

void CouplingMatrix::add_edge(uint32_t m, uint32_t k) {
  entries_[std::size_t(m) * n_ + k] = 1;
  entries_[std::size_t(k) * n_ + m] = 1;
  ++edge_count_;
}

CouplingMatrix CouplingMatrix::random(uint32_t n, double density, uint64_t seed) {
  if (n < 2) fail(ErrorCode::invalid_argument, "node count must be at least 2");
  if (!(density > 0.0) || !(density <= 1.0))
    fail(ErrorCode::invalid_argument, "density must be in (0, 1]");
  CouplingMatrix j(n);
  Xoshiro256ss rng(seed);
  for (uint32_t m = 0; m < n; ++m)
    for (uint32_t k = m + 1; k < n; ++k)
      if (rng.uniform01() < density) j.add_edge(m, k);
  return j;
}

CouplingMatrix CouplingMatrix::from_entries(uint32_t n, std::span<const uint8_t> entries) {
  if (n < 2) fail(ErrorCode::invalid_argument, "node count must be at least 2");
  if (entries.size() != std::size_t(n) * n)
    fail(ErrorCode::invalid_argument, "entry buffer size does not match n*n");
  CouplingMatrix j(n);
  for (uint32_t m = 0; m < n; ++m) {
    for (uint32_t k = 0; k < n; ++k) {
      uint8_t v = entries[std::size_t(m) * n + k];
      if (v > 1)
        fail(ErrorCode::validation, "entry " + format_pair(m, k) + " must be 0 or 1");
      if (m == k && v != 0)
        fail(ErrorCode::validation, "nonzero diagonal at " + format_pair(m, m));
      if (k > m && v != entries[std::size_t(k) * n + m])
        fail(ErrorCode::validation, "asymmetric at " + format_pair(m, k));
    }
  }
  for (uint32_t m = 0; m < n; ++m)
    for (uint32_t k = m + 1; k < n; ++k)
      if (entries[std::size_t(m) * n + k]) j.add_edge(m, k);
  return j;
}

CouplingMatrix CouplingMatrix::from_edges(uint32_t n,
                                          std::span<const std::pair<uint32_t, uint32_t>> edges) {
  CouplingMatrix j(n);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n)
      fail(ErrorCode::validation, "edge " + format_pair(u, v) + " out of range for n=" +
                                      std::to_string(n));
    if (u == v) fail(ErrorCode::validation, "self-loop at node " + std::to_string(u));
    if (j.edge(u, v))
      fail(ErrorCode::validation, "duplicate edge " + format_pair(u, v));
    j.add_edge(std::min(u, v), std::max(u, v));
  }
  return j;
}

ProblemInstance random_graph(uint32_t n, double density, uint64_t seed) {
  ProblemInstance inst{CouplingMatrix::random(n, density, seed), seed, density, {}};
  return inst;
}

static void check_dims(const CouplingMatrix& j, std::span<const int8_t> x) {
  if (x.size() != j.size())
    fail(ErrorCode::dimension_mismatch,
         "spin vector length " + std::to_string(x.size()) +
             " does not match matrix size " + std::to_string(j.size()));
}

uint64_t cut_size(const CouplingMatrix& j, std::span<const int8_t> x) {
  check_dims(j, x);
  const uint32_t n = j.size();
  uint64_t cut = 0;
  for (uint32_t m = 0; m < n; ++m) {
    auto row = j.row(m);
    for (uint32_t k = m + 1; k < n; ++k)
      if (row[k] && x[m] != x[k]) ++cut;
  }
  return cut;
}

int64_t ising_energy(const CouplingMatrix& j, std::span<const int8_t> x) {
  check_dims(j, x);
  const uint32_t n = j.size();
  int64_t h = 0;
  for (uint32_t m = 0; m < n; ++m) {
    auto row = j.row(m);
    for (uint32_t k = m + 1; k < n; ++k)
      if (row[k]) h += int64_t(x[m]) * x[k];
  }
  return h;
}

namespace {

// Spin assignment encoded by a Gray code index: spin 0 is fixed to +1,
// bit b of gray(index) drives spin b+1.
SpinVector spins_from_gray(const uint64_t index, uint32_t n) {
  uint64_t g = index ^ (index >> 1);
  SpinVector x(n, int8_t(1));
  for (uint32_t b = 0; b + 1 < n; ++b)
    if ((g >> b) & 1) x[b + 1] = -1;
  return x;
}

struct BlockBest {
  uint64_t cut = 0;
  uint64_t index = 0;
  bool valid = false;
};

BlockBest scan_block(const CouplingMatrix& j, uint64_t begin, uint64_t end) {
  const uint32_t n = j.size();
  const int64_t edges = int64_t(j.edge_count());
  SpinVector x = spins_from_gray(begin, n);
  std::vector<int32_t> field(n, 0);
  for (uint32_t i = 0; i < n; ++i) {
    auto row = j.row(i);
    int32_t f = 0;
    for (uint32_t k = 0; k < n; ++k)
      if (row[k]) f += x[k];
    field[i] = f;
  }
  int64_t h = 0;
  for (uint32_t i = 0; i < n; ++i) h += int64_t(x[i]) * field[i];
  h /= 2;

  BlockBest best;
  for (uint64_t idx = begin; idx < end; ++idx) {
    uint64_t cut = uint64_t((edges - h) / 2);
    if (!best.valid || cut > best.cut) {
      best.cut = cut;
      best.index = idx;
      best.valid = true;
    }
    if (idx + 1 == end) break;
    uint32_t flip = uint32_t(std::countr_zero(idx + 1)) + 1;
    h -= 2 * int64_t(x[flip]) * field[flip];
    int8_t old = x[flip];
    x[flip] = int8_t(-old);
    auto row = j.row(flip);
    for (uint32_t k = 0; k < n; ++k)
      if (row[k]) field[k] -= 2 * old;
  }
  return best;
}

}  // namespace

GroundState brute_force_ground_state(const CouplingMatrix& j) {
  const uint32_t n = j.size();
  if (n > kBruteForceMaxNodes)
    fail(ErrorCode::too_large, "instance too large for exhaustive oracle (n=" +
                                   std::to_string(n) + " > " +
                                   std::to_string(kBruteForceMaxNodes) + ")");
  const uint64_t total = uint64_t(1) << (n - 1);
  // Fixed partition independent of worker count keeps the witness stable.
  const uint64_t blocks = std::min<uint64_t>(total, 64);
  std::vector<BlockBest> results(blocks);
  parallel_for(std::size_t(blocks), [&](std::size_t b) {
    uint64_t begin = total / blocks * b + std::min<uint64_t>(b, total % blocks);
    uint64_t len = total / blocks + (b < total % blocks ? 1 : 0);
    results[b] = scan_block(j, begin, begin + len);
  });
  BlockBest best;
  for (const auto& r : results) {
    if (!r.valid) continue;
    if (!best.valid || r.cut > best.cut) best = r;
  }
  return {best.cut, spins_from_gray(best.index, n)};
}

SpinVector random_spins(uint32_t n, Xoshiro256ss& rng) {
  SpinVector x(n);
  for (auto& s : x) s = rng.spin();
  return x;
}

void validate_spins(std::span<const int8_t> x, uint32_t n) {
  if (x.size() != n)
    fail(ErrorCode::dimension_mismatch,
         "spin vector length " + std::to_string(x.size()) + " does not match n=" +
             std::to_string(n));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 1 && x[i] != -1)
      fail(ErrorCode::validation,
           "spin " + std::to_string(i) + " is " + std::to_string(int(x[i])) +
               ", expected -1 or +1");
}

namespace {

constexpr const char* kHeader = "ising-maxcut v1";

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  fail(ErrorCode::parse, path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// Splits "key=value" and checks the key.
std::string expect_kv(const std::string& token, const std::string& key,
                      const std::string& path, std::size_t line) {
  auto eq = token.find('=');
  if (eq == std::string::npos || token.substr(0, eq) != key)
    parse_fail(path, line, "expected " + key + "=<value>, got '" + token + "'");
  return token.substr(eq + 1);
}

uint64_t parse_u64(const std::string& text, const std::string& field,
                   const std::string& path, std::size_t line) {
  uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    parse_fail(path, line, field + ": invalid integer '" + text + "'");
  return value;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

ProblemInstance load_instance(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) parse_fail(path, 1, "empty file");
  if (lines[0] != kHeader)
    parse_fail(path, 1, std::string("expected header '") + kHeader + "'");
  if (lines.size() < 2) parse_fail(path, 2, "missing instance line");

  auto tokens = split_ws(lines[1]);
  if (tokens.size() < 4 || tokens.size() > 5)
    parse_fail(path, 2, "expected 'n=... density=... seed=... best_known=...'");
  uint64_t n64 = parse_u64(expect_kv(tokens[0], "n", path, 2), "n", path, 2);
  if (n64 < 2 || n64 > 100000) parse_fail(path, 2, "n out of range");
  auto n = uint32_t(n64);

  std::string dtext = expect_kv(tokens[1], "density", path, 2);
  char* dend = nullptr;
  double density = std::strtod(dtext.c_str(), &dend);
  if (dend != dtext.c_str() + dtext.size() || !(density >= 0.0) || !(density <= 1.0))
    parse_fail(path, 2, "density: invalid value '" + dtext + "'");

  uint64_t seed = parse_u64(expect_kv(tokens[2], "seed", path, 2), "seed", path, 2);

  std::string bk = expect_kv(tokens[3], "best_known", path, 2);
  std::optional<BestKnown> best_known;
  if (bk != "none") {
    BestKnown record;
    record.cut = parse_u64(bk, "best_known", path, 2);
    if (tokens.size() == 5)
      record.provenance = expect_kv(tokens[4], "provenance", path, 2);
    best_known = std::move(record);
  } else if (tokens.size() == 5) {
    parse_fail(path, 2, "provenance given without best_known value");
  }

  if (lines.size() < 2 + n)
    parse_fail(path, lines.size() + 1, "expected " + std::to_string(n) + " row lines");
  for (std::size_t l = 2 + n; l < lines.size(); ++l)
    if (!lines[l].empty())
      parse_fail(path, l + 1, "unexpected trailing content");

  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t m = 0; m < n; ++m) {
    std::size_t line_no = 3 + m;
    for (const auto& tok : split_ws(lines[2 + m])) {
      uint64_t k = parse_u64(tok, "column", path, line_no);
      if (k <= m || k >= n)
        parse_fail(path, line_no,
                   "column index " + tok + " out of range for row " + std::to_string(m));
      edges.emplace_back(m, uint32_t(k));
    }
  }

  CouplingMatrix j = [&] {
    try {
      return CouplingMatrix::from_edges(n, edges);
    } catch (const Error& e) {
      fail(ErrorCode::parse, path + ": " + e.what());
    }
  }();

  if (best_known && best_known->cut > j.edge_count())
    fail(ErrorCode::validation, path + ": best_known=" + std::to_string(best_known->cut) +
                                    " exceeds edge count " +
                                    std::to_string(j.edge_count()));

  return ProblemInstance{std::move(j), seed, density, std::move(best_known)};
}

void save_instance(const ProblemInstance& instance, const std::string& path) {
  const auto& j = instance.coupling;
  if (instance.best_known) {
    if (instance.best_known->cut > j.edge_count())
      fail(ErrorCode::validation, "best_known exceeds edge count");
    for (char c : instance.best_known->provenance)
      if (std::isspace(static_cast<unsigned char>(c)))
        fail(ErrorCode::validation, "provenance must not contain whitespace");
  }

  std::ostringstream out;
  out << kHeader << "\n";
  char dbuf[64];
  std::snprintf(dbuf, sizeof dbuf, "%.17g", instance.density);
  out << "n=" << j.size() << " density=" << dbuf << " seed=" << instance.seed;
  if (instance.best_known) {
    out << " best_known=" << instance.best_known->cut;
    if (!instance.best_known->provenance.empty())
      out << " provenance=" << instance.best_known->provenance;
  } else {
    out << " best_known=none";
  }
  out << "\n";
  const uint32_t n = j.size();
  for (uint32_t m = 0; m < n; ++m) {
    bool first = true;
    auto row = j.row(m);
    for (uint32_t k = m + 1; k < n; ++k) {
      if (!row[k]) continue;
      if (!first) out << ' ';
      out << k;
      first = false;
    }
    out << "\n";
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorCode::io, "cannot write " + path);
  file << out.str();
  if (!file) fail(ErrorCode::io, "write failed: " + path);
}

ProblemInstance import_edge_list(const std::string& path) {
  auto lines = read_lines(path);
  uint32_t n = 0;
  bool have_n = false;
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    std::string s = lines[l];
    if (auto hash = s.find('#'); hash != std::string::npos) s.resize(hash);
    auto toks = split_ws(s);
    if (toks.empty()) continue;
    if (!have_n) {
      if (toks.size() != 1)
        parse_fail(path, l + 1, "expected 'n=<int>' before edges");
      uint64_t v = parse_u64(expect_kv(toks[0], "n", path, l + 1), "n", path, l + 1);
      if (v < 2 || v > 100000) parse_fail(path, l + 1, "n out of range");
      n = uint32_t(v);
      have_n = true;
      continue;
    }
    if (toks.size() != 2)
      parse_fail(path, l + 1, "expected 'u v' edge line");
    uint64_t u = parse_u64(toks[0], "u", path, l + 1);
    uint64_t v = parse_u64(toks[1], "v", path, l + 1);
    edges.emplace_back(uint32_t(u), uint32_t(v));
  }
  if (!have_n) parse_fail(path, 1, "missing 'n=<int>' line");

  CouplingMatrix j = [&] {
    try {
      return CouplingMatrix::from_edges(n, edges);
    } catch (const Error& e) {
      fail(ErrorCode::parse, path + ": " + e.what());
    }
  }();
  double density =
      double(j.edge_count()) / (double(n) * double(n - 1) / 2.0);
  return ProblemInstance{std::move(j), 0, density, {}};
}

}  // namespace sbcim
