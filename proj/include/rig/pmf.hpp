#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace rig {

// Truncated probability array on 0..size()-1. `residual` bounds the mass
// that lies beyond the last index.
struct Pmf {
  std::vector<double> probs;
  double residual = 0.0;
  std::string label;

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t r) const { return r < probs.size() ? probs[r] : 0.0; }
  double core_mass() const;
  double mean() const;  // over the truncated core, not renormalized

  // Keeps indices 0..r_max; dropped mass moves into the residual.
  Pmf truncated(std::size_t r_max) const;
  // Same index range as `size` entries, zero-padding or truncating.
  Pmf resized(std::size_t size) const;

  static Pmf point_mass(std::size_t r, std::string label = {});
  static Pmf from_counts(std::span<const std::uint64_t> counts, std::string label = {});
};

// Square joint table on 0..k_max in both coordinates, row-major.
struct JointPmf {
  std::size_t dim = 0;
  std::vector<double> probs;
  double residual = 0.0;
  std::string label;

  JointPmf() = default;
  JointPmf(std::size_t dim, std::string label = {}) : dim(dim), probs(dim * dim, 0.0), label(std::move(label)) {}

  std::size_t k_max() const { return dim == 0 ? 0 : dim - 1; }
  double operator()(std::size_t k1, std::size_t k2) const { return probs[k1 * dim + k2]; }
  double& at(std::size_t k1, std::size_t k2) { return probs[k1 * dim + k2]; }
  double at(std::size_t k1, std::size_t k2) const { return probs[k1 * dim + k2]; }
  double core_mass() const;

  Pmf first_marginal() const;
  JointPmf truncated(std::size_t k_max) const;
};

// q_0..q_rmax of an unnormalized sequence whose full sum is known.
struct QSeq {
  std::vector<double> q;
  double residual = 0.0;

  double core_sum() const;
};

struct TvResult {
  double core;   // half L1 over the shared truncated core
  double bound;  // core plus half of both residuals
};

TvResult tv_distance(const Pmf& p, const Pmf& q);
TvResult tv_distance(const JointPmf& p, const JointPmf& q);

void write_csv(std::ostream& out, const Pmf& pmf);
void write_csv(std::ostream& out, const JointPmf& joint);
Pmf read_pmf_csv(std::istream& in);
JointPmf read_joint_csv(std::istream& in);

nlohmann::json to_json(const Pmf& pmf);
nlohmann::json to_json(const JointPmf& joint);
nlohmann::json to_json(const QSeq& q);
Pmf pmf_from_json(const nlohmann::json& j);
JointPmf joint_from_json(const nlohmann::json& j);

}  // namespace rig
