#include <bit>
#include <cmath>
#include <sstream>

#include "rig/error.hpp"
#include "rig/genmodel.hpp"

namespace rig {

namespace {

struct Atom {
  double value;
  double prob;
};

std::vector<Atom> atoms_of(const WeightSpec& spec) {
  if (const auto* d = spec.as<Degenerate>()) return {{d->x, 1.0}};
  if (const auto* f = spec.as<FiniteSupport>()) {
    std::vector<Atom> out;
    for (std::size_t i = 0; i < f->values.size(); ++i)
      if (f->probs[i] > 0.0) out.push_back({f->values[i], f->probs[i]});
    return out;
  }
  throw Error(ErrorCode::InvalidSpec, "exact enumeration needs finite-support weights, got " + spec.name());
}

}  // namespace

ExactLaw enumerate_exact(const ModelParams& params) {
  params.validate();
  const auto atoms1 = atoms_of(params.p1);
  const auto atoms2 = atoms_of(params.p2);
  const std::uint32_t n = params.n;
  const std::uint32_t m = params.m;
  const std::uint32_t links = n * m;

  const double states = std::pow(static_cast<double>(atoms1.size()), m) *
                        std::pow(static_cast<double>(atoms2.size()), n) * std::ldexp(1.0, static_cast<int>(links));
  if (links > 30 || n > 32 || states > kEnumerationStateCap) {
    std::ostringstream msg;
    msg << "enumeration needs " << states << " states, cap is " << kEnumerationStateCap;
    throw Error(ErrorCode::StateGuard, msg.str());
  }

  const double inv_root = 1.0 / std::sqrt(static_cast<double>(n) * static_cast<double>(m));
  ExactLaw out;
  out.conditional_joint = JointPmf(n - 1, "exact_conditional_joint");
  double two_paths = 0.0;
  double triangles = 0.0;

  std::vector<std::size_t> xi(m, 0);
  std::vector<std::size_t> yj(n, 0);
  std::vector<double> p(links);
  std::vector<std::uint32_t> attribute_members(m);
  std::vector<std::uint32_t> neighborhood(n);

  // Mixed-radix counter over all weight assignments.
  while (true) {
    double weight_prob = 1.0;
    for (std::uint32_t i = 0; i < m; ++i) weight_prob *= atoms1[xi[i]].prob;
    for (std::uint32_t j = 0; j < n; ++j) weight_prob *= atoms2[yj[j]].prob;
    for (std::uint32_t i = 0; i < m; ++i)
      for (std::uint32_t j = 0; j < n; ++j)
        p[i * n + j] = std::min(1.0, atoms1[xi[i]].value * atoms2[yj[j]].value * inv_root);

    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << links); ++mask) {
      double prob = weight_prob;
      for (std::uint32_t b = 0; b < links && prob > 0.0; ++b) prob *= (mask >> b & 1U) ? p[b] : 1.0 - p[b];
      if (prob == 0.0) continue;

      for (std::uint32_t i = 0; i < m; ++i)
        attribute_members[i] = static_cast<std::uint32_t>((mask >> (i * n)) & ((std::uint64_t{1} << n) - 1));
      std::fill(neighborhood.begin(), neighborhood.end(), 0U);
      for (std::uint32_t i = 0; i < m; ++i) {
        const std::uint32_t s = attribute_members[i];
        if (std::popcount(s) < 2) continue;
        for (std::uint32_t v = 0; v < n; ++v)
          if (s >> v & 1U) neighborhood[v] |= s;
      }
      for (std::uint32_t v = 0; v < n; ++v) neighborhood[v] &= ~(1U << v);

      const bool adj12 = neighborhood[0] >> 1 & 1U;
      if (adj12) {
        out.p_adjacent += prob;
        const auto d1 = static_cast<std::size_t>(std::popcount(neighborhood[0]));
        const auto d2 = static_cast<std::size_t>(std::popcount(neighborhood[1]));
        out.conditional_joint.at(d1 - 1, d2 - 1) += prob;
      }
      if (n >= 3 && (neighborhood[2] & 3U) == 3U) {
        two_paths += prob;
        if (adj12) triangles += prob;
      }
    }

    std::uint32_t pos = 0;
    for (; pos < m + n; ++pos) {
      auto& digit = pos < m ? xi[pos] : yj[pos - m];
      const std::size_t radix = pos < m ? atoms1.size() : atoms2.size();
      if (++digit < radix) break;
      digit = 0;
    }
    if (pos == m + n) break;
  }

  if (out.p_adjacent > 0.0) {
    for (double& v : out.conditional_joint.probs) v /= out.p_adjacent;
  } else {
    out.conditional_joint.residual = 1.0;
  }
  if (n >= 3 && two_paths > 0.0) out.clustering = triangles / two_paths;
  return out;
}

}  // namespace rig
