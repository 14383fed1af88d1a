#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rig/rng.hpp"

namespace rig {

struct Degenerate {
  double x;
};

// Density (kappa-1) t0^(kappa-1) t^-kappa on [t0, inf).
struct ParetoContinuous {
  double t0;
  double kappa;
};

// P(Z = r) = r^-kappa / zeta(kappa), r >= 1.
struct DiscretePowerLaw {
  double kappa;
};

struct Exponential {
  double rate;
};

struct FiniteSupport {
  std::vector<double> values;
  std::vector<double> probs;
};

// One-dimensional non-negative weight law. Immutable after construction.
class WeightSpec {
 public:
  using Variant = std::variant<Degenerate, ParetoContinuous, DiscretePowerLaw, Exponential, FiniteSupport>;

  static WeightSpec degenerate(double x);
  static WeightSpec pareto(double t0, double kappa);
  static WeightSpec discrete_power_law(double kappa);
  static WeightSpec exponential(double rate);
  static WeightSpec finite(std::vector<double> values, std::vector<double> probs);

  const Variant& variant() const { return variant_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&variant_);
  }

  // JSON tag of the variant: "degenerate", "pareto", ...
  std::string name() const;

  // Atoms are evaluated exactly; no quadrature is involved.
  bool has_finite_support() const;

  double cdf(double z) const;
  double tail_mass(double z) const;          // P(Z > z)
  double tail_first_moment(double z) const;  // E[Z; Z > z]
  double quantile(double u) const;           // inverse CDF, u in [0, 1)

  // Density for continuous laws, pmf for discrete ones.
  double density(double z) const;

  bool operator==(const WeightSpec& other) const;

 private:
  explicit WeightSpec(Variant v);

  Variant variant_;
  // Cumulative pmf for DiscretePowerLaw, r = 1..table size.
  std::shared_ptr<const std::vector<double>> cdf_table_;
  double zeta_ = 0.0;
};

// Hurwitz zeta sum_{k>=0} (a+k)^-s for s > 1, a > 0.
double hurwitz_zeta(double s, double a);

// E Z^order in closed form. Throws InfiniteMoment or NegativeOrder.
double moment(const WeightSpec& spec, int order);

// Inverse-CDF transform of one uniform on [0, 1).
double sample_from_uniform(const WeightSpec& spec, double u);

double sample(const WeightSpec& spec, Stream& stream);

// Constants of the power-law class: density (or pmf) ~ constant * t^-exponent.
struct PowerLawTail {
  double constant;
  double exponent;
};

std::optional<PowerLawTail> power_law_tail(const WeightSpec& spec);

enum class Growth {
  Bounded,  // |g(z)| <= bound
  Linear,   // |g(z)| <= bound * z
};

struct ExpectOptions {
  double tol = 1e-11;
  Growth growth = Growth::Bounded;
  double bound = 1.0;
  // Lower limit for the truncation point; the (1 - 1e-10) quantile is used
  // when larger, and the point is pushed out until the tail term fits in tol/4.
  double z_max = 0.0;
  int max_panels = 1 << 15;
};

struct Expectation {
  double value;
  double err_bound;
};

struct VectorExpectation {
  std::vector<double> values;
  double err_bound;     // max over components
  double z_max = 0.0;   // truncation point; 0 for exact sums
  double tail = 0.0;    // tail term included in err_bound
};

using VectorIntegrand = std::function<void(double z, std::span<double> out)>;

Expectation expect(const WeightSpec& spec, const std::function<double(double)>& g,
                   const ExpectOptions& options = {});

// Componentwise E g(Z) for a vector-valued g sharing one quadrature rule.
VectorExpectation expect_vector(const WeightSpec& spec, std::size_t dim, const VectorIntegrand& g,
                                const ExpectOptions& options = {});

// Limit of m/n. The finite regime carries its value.
struct Beta {
  enum class Kind { Zero, Finite, Infinity };
  Kind kind = Kind::Finite;
  double value = 1.0;

  static Beta finite(double value);
  static Beta infinity() { return {Kind::Infinity, 0.0}; }
  static Beta zero() { return {Kind::Zero, 0.0}; }

  bool is_finite() const { return kind == Kind::Finite; }
};

// a_i = E X^i, b_j = E Y^j. Infinite moments are stored as +inf and rejected
// by the operations that need them.
struct Moments {
  double a1 = 0, a2 = 0, a3 = 0;
  double b1 = 0, b2 = 0;
  Beta beta;

  static Moments of(const WeightSpec& p1, const WeightSpec& p2, Beta beta);
};

nlohmann::json weight_spec_to_json(const WeightSpec& spec);
WeightSpec weight_spec_from_json(const nlohmann::json& j);

}  // namespace rig

namespace nlohmann {
template <>
struct adl_serializer<rig::WeightSpec> {
  static rig::WeightSpec from_json(const json& j) { return rig::weight_spec_from_json(j); }
  static void to_json(json& j, const rig::WeightSpec& spec) { j = rig::weight_spec_to_json(spec); }
};
}  // namespace nlohmann
