#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rig/genmodel.hpp"
#include "rig/pmf.hpp"

namespace rig {

// Count-based summary of one or more realized graphs. Merging adds counts,
// so it is associative and commutative; every probability is derived on
// demand from the pooled counts.
struct EmpiricalReport {
  std::uint64_t replica_count = 0;
  std::uint64_t vertex_count = 0;
  std::uint64_t ordered_edge_count = 0;
  std::uint64_t isolated_count = 0;
  std::uint64_t triangle_corners = 0;  // 3 x triangles
  std::uint64_t path_count = 0;        // paths of length two
  std::vector<std::uint64_t> degree_counts;
  std::vector<std::uint64_t> conditioned_degree_counts;  // d(u) over ordered adjacent (u, v)
  std::vector<std::uint64_t> common_neighbor_counts;     // |N(u) & N(v)| over ordered adjacent (u, v)
  // (d(u) - 1, d(v) - 1) over ordered adjacent pairs, key = k1 << 32 | k2.
  std::unordered_map<std::uint64_t, std::uint64_t> edge_joint_counts;

  void merge(const EmpiricalReport& other);

  Pmf degree_pmf() const;
  Pmf conditioned_degree_pmf() const;
  Pmf common_neighbor_pmf() const;
  // Joint histogram on 0..k_max; mass beyond goes to the residual.
  JointPmf edge_joint(std::size_t k_max) const;
  std::size_t max_joint_index() const;
  double clustering() const;
  double assortativity() const;
  double isolated_fraction() const;
  std::uint64_t edge_count() const { return ordered_edge_count / 2; }

  nlohmann::json to_json(std::size_t joint_k_max) const;
};

EmpiricalReport analyze(const IntersectionView& view);

Pmf degree_histogram(const IntersectionView& view);
JointPmf edge_joint_histogram(const IntersectionView& view);
Pmf conditioned_degree_histogram(const IntersectionView& view);
Pmf common_neighbor_histogram(const IntersectionView& view);

struct ClusteringEstimate {
  double value;
  std::uint64_t path_count;
};

ClusteringEstimate clustering_estimate(const IntersectionView& view);

// Pearson correlation of (k1, k2) under the core of the joint pmf.
double assortativity(const JointPmf& joint);

struct SlopeFit {
  double slope;
  double stderr;
  std::size_t points;
};

// Least-squares slope of log p(r) against log r over r_min..r_max.
SlopeFit tail_slope_fit(const Pmf& pmf, std::size_t r_min, std::size_t r_max);

// Total variation after truncating both laws to 0..r_max and lumping all
// mass beyond into one extra cell.
double lumped_tv(const Pmf& p, const Pmf& q, std::size_t r_max);
double lumped_tv(const JointPmf& p, const JointPmf& q, std::size_t k_max);

// CSV with columns index,count,probability.
void write_histogram_csv(std::ostream& out, std::span<const std::uint64_t> counts);

}  // namespace rig
