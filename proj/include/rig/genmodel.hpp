#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rig/pmf.hpp"
#include "rig/rng.hpp"
#include "rig/weights.hpp"

namespace rig {

using VertexId = std::uint32_t;

// One instance of G(P1, P2, n, m). Attribute i links vertex j with
// probability min(1, X_i Y_j / sqrt(n m)).
struct ModelParams {
  std::uint32_t n = 2;
  std::uint32_t m = 1;
  WeightSpec p1 = WeightSpec::degenerate(1.0);
  WeightSpec p2 = WeightSpec::degenerate(1.0);
  std::uint64_t seed = 1;

  double beta_n() const { return static_cast<double>(m) / static_cast<double>(n); }
  void validate() const;
};

// Realized bipartite witness graph: members[i] is the sorted vertex list of
// attribute i. Ids are 0-based.
struct BipartiteIncidence {
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  std::vector<std::vector<VertexId>> members;
  std::vector<double> x;  // attribute weights
  std::vector<double> y;  // vertex weights

  std::size_t link_count() const;
};

// Intersection graph in CSR form. Neighbor lists are sorted; witnesses[e]
// counts the attributes shared by the pair stored at neighbors[e].
struct IntersectionView {
  std::uint32_t n = 0;
  std::vector<std::size_t> offsets;  // n + 1 entries
  std::vector<VertexId> neighbors;
  std::vector<std::uint32_t> witnesses;

  std::span<const VertexId> neighbors_of(VertexId v) const {
    return {neighbors.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
  std::uint32_t degree(VertexId v) const { return static_cast<std::uint32_t>(offsets[v + 1] - offsets[v]); }
  std::vector<std::uint32_t> degrees() const;
  std::size_t edge_count() const { return neighbors.size() / 2; }
  bool adjacent(VertexId u, VertexId v) const;

  // Builds a view from an undirected edge list (duplicates and loops ignored).
  static IntersectionView from_edges(std::uint32_t n, std::span<const std::pair<VertexId, VertexId>> edges);
};

std::vector<double> sample_weights(const WeightSpec& spec, std::size_t count, std::uint64_t seed, StreamKind kind);

// Direct Bernoulli draw for each of the n*m pairs. Refuses n*m > 1e8.
BipartiteIncidence generate_naive(const ModelParams& params, int threads = 1);

// Same law, sampled by geometric skipping under per-bucket envelopes with
// vertices grouped by Y into [2^t, 2^(t+1)).
BipartiteIncidence generate_fast(const ModelParams& params, int threads = 1);

inline constexpr std::uint64_t kDefaultPairCap = 4'000'000'000ULL;

// Declares every pair of members of an attribute adjacent. Throws
// CapExceeded when sum |S_w|^2 exceeds `cap`.
IntersectionView build_intersection(const BipartiteIncidence& incidence, std::uint64_t cap = kDefaultPairCap,
                                    int threads = 1);

struct ExactLaw {
  double p_adjacent = 0.0;            // P(v1 ~ v2)
  JointPmf conditional_joint;         // P(d(v1) = k1+1, d(v2) = k2+1 | v1 ~ v2)
  std::optional<double> clustering;   // P(v1 ~ v2 | v1 ~ v3, v2 ~ v3), n >= 3
};

inline constexpr double kEnumerationStateCap = 1e7;

// Exhaustive enumeration over weight atoms and link patterns. Weights must
// have finite support.
ExactLaw enumerate_exact(const ModelParams& params);

void write_incidence_csv(std::ostream& out, const BipartiteIncidence& incidence);
void write_weights_csv(std::ostream& out, std::span<const double> weights);

}  // namespace rig
