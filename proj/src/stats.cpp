#include "rig/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rig/error.hpp"

namespace rig {

namespace {

std::uint64_t joint_key(std::uint64_t k1, std::uint64_t k2) { return k1 << 32 | k2; }

void add_counts(std::vector<std::uint64_t>& into, std::span<const std::uint64_t> from) {
  if (into.size() < from.size()) into.resize(from.size(), 0);
  for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

// Joint counts in key order, so derived sums do not depend on merge history.
std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted_joint(
    const std::unordered_map<std::uint64_t, std::uint64_t>& counts) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end());
  return out;
}

void bump(std::vector<std::uint64_t>& counts, std::size_t index, std::uint64_t by = 1) {
  if (counts.size() <= index) counts.resize(index + 1, 0);
  counts[index] += by;
}

std::size_t intersection_size(std::span<const VertexId> a, std::span<const VertexId> b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

void require_edges(const IntersectionView& view) {
  if (view.neighbors.empty()) throw Error(ErrorCode::NoEdges, "graph has no edges");
}

}  // namespace

void EmpiricalReport::merge(const EmpiricalReport& other) {
  replica_count += other.replica_count;
  vertex_count += other.vertex_count;
  ordered_edge_count += other.ordered_edge_count;
  isolated_count += other.isolated_count;
  triangle_corners += other.triangle_corners;
  path_count += other.path_count;
  add_counts(degree_counts, other.degree_counts);
  add_counts(conditioned_degree_counts, other.conditioned_degree_counts);
  add_counts(common_neighbor_counts, other.common_neighbor_counts);
  for (const auto& [key, count] : other.edge_joint_counts) edge_joint_counts[key] += count;
}

Pmf EmpiricalReport::degree_pmf() const { return Pmf::from_counts(degree_counts, "empirical_degree"); }

Pmf EmpiricalReport::conditioned_degree_pmf() const {
  return Pmf::from_counts(conditioned_degree_counts, "empirical_conditioned_degree");
}

Pmf EmpiricalReport::common_neighbor_pmf() const {
  return Pmf::from_counts(common_neighbor_counts, "empirical_common_neighbors");
}

std::size_t EmpiricalReport::max_joint_index() const {
  std::size_t top = 0;
  for (const auto& [key, count] : edge_joint_counts)
    top = std::max<std::size_t>(top, std::max<std::uint64_t>(key >> 32, key & 0xffffffffULL));
  return top;
}

JointPmf EmpiricalReport::edge_joint(std::size_t k_max) const {
  if (ordered_edge_count == 0) throw Error(ErrorCode::NoEdges, "graph has no edges");
  JointPmf out(k_max + 1, "empirical_edge_joint");
  const double total = static_cast<double>(ordered_edge_count);
  for (const auto& [key, count] : sorted_joint(edge_joint_counts)) {
    const std::size_t k1 = key >> 32;
    const std::size_t k2 = key & 0xffffffffULL;
    const double p = static_cast<double>(count) / total;
    if (k1 <= k_max && k2 <= k_max)
      out.at(k1, k2) = p;
    else
      out.residual += p;
  }
  return out;
}

double EmpiricalReport::clustering() const {
  if (path_count == 0) throw Error(ErrorCode::NoPaths, "no paths of length two");
  return static_cast<double>(triangle_corners) / static_cast<double>(path_count);
}

double EmpiricalReport::assortativity() const {
  if (ordered_edge_count == 0) throw Error(ErrorCode::NoEdges, "graph has no edges");
  // Both coordinates share one marginal because both orders are counted.
  double s1 = 0.0, s2 = 0.0, s12 = 0.0;
  for (const auto& [key, count] : sorted_joint(edge_joint_counts)) {
    const double k1 = static_cast<double>(key >> 32);
    const double k2 = static_cast<double>(key & 0xffffffffULL);
    const double c = static_cast<double>(count);
    s1 += c * k1;
    s2 += c * k1 * k1;
    s12 += c * k1 * k2;
  }
  const double total = static_cast<double>(ordered_edge_count);
  const double mean = s1 / total;
  const double var = s2 / total - mean * mean;
  if (!(var > 1e-300)) throw Error(ErrorCode::ZeroVariance, "endpoint degrees have zero variance");
  return (s12 / total - mean * mean) / var;
}

double EmpiricalReport::isolated_fraction() const {
  return vertex_count == 0 ? 0.0 : static_cast<double>(isolated_count) / static_cast<double>(vertex_count);
}

nlohmann::json EmpiricalReport::to_json(std::size_t joint_k_max) const {
  nlohmann::json j{{"replica_count", replica_count},
                   {"vertex_count", vertex_count},
                   {"edge_count", edge_count()},
                   {"ordered_edge_count", ordered_edge_count},
                   {"isolated_fraction", isolated_fraction()},
                   {"triangle_corners", triangle_corners},
                   {"path_count", path_count},
                   {"degree_counts", degree_counts},
                   {"conditioned_degree_counts", conditioned_degree_counts},
                   {"common_neighbor_counts", common_neighbor_counts},
                   {"degree_pmf", rig::to_json(degree_pmf())}};
  j["clustering"] = path_count > 0 ? nlohmann::json(clustering()) : nlohmann::json(nullptr);
  try {
    j["assortativity"] = assortativity();
  } catch (const Error&) {
    j["assortativity"] = nullptr;
  }
  if (ordered_edge_count > 0) {
    j["edge_joint"] = rig::to_json(edge_joint(joint_k_max));
    j["common_neighbor_pmf"] = rig::to_json(common_neighbor_pmf());
  }
  return j;
}

EmpiricalReport analyze(const IntersectionView& view) {
  EmpiricalReport report;
  report.replica_count = 1;
  report.vertex_count = view.n;
  report.ordered_edge_count = view.neighbors.size();
  for (VertexId u = 0; u < view.n; ++u) {
    const std::uint64_t du = view.degree(u);
    bump(report.degree_counts, du);
    if (du == 0) {
      ++report.isolated_count;
      continue;
    }
    bump(report.conditioned_degree_counts, du, du);
    report.path_count += du * (du - 1) / 2;
    const auto nu = view.neighbors_of(u);
    for (VertexId v : nu) {
      report.edge_joint_counts[joint_key(du - 1, view.degree(v) - 1)] += 1;
      if (u < v) {
        const std::size_t common = intersection_size(nu, view.neighbors_of(v));
        bump(report.common_neighbor_counts, common, 2);
        report.triangle_corners += common;
      }
    }
  }
  return report;
}

Pmf degree_histogram(const IntersectionView& view) {
  std::vector<std::uint64_t> counts;
  for (VertexId v = 0; v < view.n; ++v) bump(counts, view.degree(v));
  if (counts.empty()) counts.push_back(0);
  return Pmf::from_counts(counts, "empirical_degree");
}

JointPmf edge_joint_histogram(const IntersectionView& view) {
  require_edges(view);
  const EmpiricalReport report = analyze(view);
  return report.edge_joint(report.max_joint_index());
}

Pmf conditioned_degree_histogram(const IntersectionView& view) {
  require_edges(view);
  std::vector<std::uint64_t> counts;
  for (VertexId u = 0; u < view.n; ++u)
    if (view.degree(u) > 0) bump(counts, view.degree(u), view.degree(u));
  return Pmf::from_counts(counts, "empirical_conditioned_degree");
}

Pmf common_neighbor_histogram(const IntersectionView& view) {
  require_edges(view);
  std::vector<std::uint64_t> counts;
  for (VertexId u = 0; u < view.n; ++u) {
    const auto nu = view.neighbors_of(u);
    for (VertexId v : nu) bump(counts, intersection_size(nu, view.neighbors_of(v)));
  }
  return Pmf::from_counts(counts, "empirical_common_neighbors");
}

ClusteringEstimate clustering_estimate(const IntersectionView& view) {
  std::uint64_t paths = 0;
  std::uint64_t corners = 0;
  for (VertexId u = 0; u < view.n; ++u) {
    const std::uint64_t du = view.degree(u);
    if (du >= 2) paths += du * (du - 1) / 2;
    const auto nu = view.neighbors_of(u);
    for (VertexId v : nu)
      if (u < v) corners += intersection_size(nu, view.neighbors_of(v));
  }
  if (paths == 0) throw Error(ErrorCode::NoPaths, "no paths of length two");
  return {static_cast<double>(corners) / static_cast<double>(paths), paths};
}

double assortativity(const JointPmf& joint) {
  const double total = joint.core_mass();
  if (!(total > 0.0)) throw Error(ErrorCode::EmptyJoint, "joint pmf has no mass");
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k1 = 0; k1 < joint.dim; ++k1) {
    for (std::size_t k2 = 0; k2 < joint.dim; ++k2) {
      const double p = joint(k1, k2) / total;
      m1 += p * static_cast<double>(k1);
      m2 += p * static_cast<double>(k2);
    }
  }
  double v1 = 0.0, v2 = 0.0, cov = 0.0;
  for (std::size_t k1 = 0; k1 < joint.dim; ++k1) {
    for (std::size_t k2 = 0; k2 < joint.dim; ++k2) {
      const double p = joint(k1, k2) / total;
      const double d1 = static_cast<double>(k1) - m1;
      const double d2 = static_cast<double>(k2) - m2;
      v1 += p * d1 * d1;
      v2 += p * d2 * d2;
      cov += p * d1 * d2;
    }
  }
  if (!(v1 > 1e-300) || !(v2 > 1e-300)) throw Error(ErrorCode::ZeroVariance, "a marginal has zero variance");
  return cov / std::sqrt(v1 * v2);
}

SlopeFit tail_slope_fit(const Pmf& pmf, std::size_t r_min, std::size_t r_max) {
  std::vector<double> xs, ys;
  for (std::size_t r = std::max<std::size_t>(r_min, 1); r <= r_max && r < pmf.size(); ++r) {
    if (pmf.probs[r] > 0.0) {
      xs.push_back(std::log(static_cast<double>(r)));
      ys.push_back(std::log(pmf.probs[r]));
    }
  }
  if (xs.size() < 10) {
    std::ostringstream msg;
    msg << "only " << xs.size() << " positive points in [" << r_min << ", " << r_max << "], need 10";
    throw Error(ErrorCode::InsufficientSupport, msg.str());
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - my - slope * (xs[i] - mx);
    sse += e * e;
  }
  return {slope, std::sqrt(sse / (n - 2.0) / sxx), xs.size()};
}

namespace {

Pmf on_range(const Pmf& p, std::size_t r_max) {
  return p.size() > r_max + 1 ? p.truncated(r_max) : p.resized(r_max + 1);
}

JointPmf on_range(const JointPmf& p, std::size_t k_max) {
  if (p.dim > k_max + 1) return p.truncated(k_max);
  JointPmf out(k_max + 1, p.label);
  out.residual = p.residual;
  for (std::size_t k1 = 0; k1 < p.dim; ++k1)
    for (std::size_t k2 = 0; k2 < p.dim; ++k2) out.at(k1, k2) = p(k1, k2);
  return out;
}

}  // namespace

double lumped_tv(const Pmf& p, const Pmf& q, std::size_t r_max) {
  const Pmf a = on_range(p, r_max);
  const Pmf b = on_range(q, r_max);
  return tv_distance(a, b).core + 0.5 * std::abs(a.residual - b.residual);
}

double lumped_tv(const JointPmf& p, const JointPmf& q, std::size_t k_max) {
  const JointPmf a = on_range(p, k_max);
  const JointPmf b = on_range(q, k_max);
  return tv_distance(a, b).core + 0.5 * std::abs(a.residual - b.residual);
}

void write_histogram_csv(std::ostream& out, std::span<const std::uint64_t> counts) {
  out << "index,count,probability\n";
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  char buf[32];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", total > 0.0 ? static_cast<double>(counts[i]) / total : 0.0);
    out << i << ',' << counts[i] << ',' << buf << '\n';
  }
}

}  // namespace rig
