#include "rig/weights.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rig/error.hpp"

namespace rig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kDiscreteTableSize = 4096;
constexpr double kDefaultTailMass = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidSpec, what);
}

// Eight-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 4> kGaussX = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                           0.9602898564975363};
constexpr std::array<double, 4> kGaussW = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                           0.1012285362903763};

struct Node {
  double z;
  double w;
};

template <class F>
void for_each_gauss_node(double lo, double hi, F&& f) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < kGaussX.size(); ++i) {
    f(mid - half * kGaussX[i], half * kGaussW[i]);
    f(mid + half * kGaussX[i], half * kGaussW[i]);
  }
}

// Quadrature nodes for the continuous variants on [lower support, z_max]
// with the density folded into the weights.
std::vector<Node> continuous_rule(const WeightSpec& spec, double z_max, int panels) {
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(panels) * 8 + 8);
  if (const auto* p = spec.as<ParetoContinuous>()) {
    // Log-spaced panels: integrate g(e^u) f(e^u) e^u du.
    const double u0 = std::log(p->t0);
    const double u1 = std::log(z_max);
    const double du = (u1 - u0) / panels;
    for (int k = 0; k < panels; ++k) {
      for_each_gauss_node(u0 + k * du, u0 + (k + 1) * du, [&](double u, double w) {
        const double z = std::exp(u);
        nodes.push_back({z, w * z * spec.density(z)});
      });
    }
  } else if (spec.as<Exponential>()) {
    // One panel near zero, then log-spaced panels up to z_max.
    const double z_min = z_max * 1e-9;
    for_each_gauss_node(0.0, z_min, [&](double z, double w) { nodes.push_back({z, w * spec.density(z)}); });
    const double u0 = std::log(z_min);
    const double u1 = std::log(z_max);
    const double du = (u1 - u0) / panels;
    for (int k = 0; k < panels; ++k) {
      for_each_gauss_node(u0 + k * du, u0 + (k + 1) * du, [&](double u, double w) {
        const double z = std::exp(u);
        nodes.push_back({z, w * z * spec.density(z)});
      });
    }
  }
  return nodes;
}

std::vector<double> integrate(const std::vector<Node>& nodes, std::size_t dim, const VectorIntegrand& g) {
  std::vector<double> acc(dim, 0.0);
  std::vector<double> buf(dim);
  for (const auto& node : nodes) {
    if (node.w == 0.0) continue;
    std::fill(buf.begin(), buf.end(), 0.0);
    g(node.z, buf);
    for (std::size_t k = 0; k < dim; ++k) acc[k] += node.w * buf[k];
  }
  return acc;
}

double tail_term(const WeightSpec& spec, double z, const ExpectOptions& options) {
  const double t = options.growth == Growth::Bounded ? spec.tail_mass(z) : spec.tail_first_moment(z);
  return options.bound * t;
}

}  // namespace

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0)) throw Error(ErrorCode::InvalidSpec, "hurwitz_zeta needs s > 1, a > 0");
  // Direct sum until a + N >= 10, then Euler-Maclaurin with six Bernoulli terms.
  double sum = 0.0;
  double x = a;
  while (x < 10.0) {
    sum += std::pow(x, -s);
    x += 1.0;
  }
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  static constexpr std::array<double, 6> kB2jOverFact = {
      1.0 / 6.0 / 2.0,           -1.0 / 30.0 / 24.0,       1.0 / 42.0 / 720.0,
      -1.0 / 30.0 / 40320.0,     5.0 / 66.0 / 3628800.0,   -691.0 / 2730.0 / 479001600.0};
  double rising = s;  // s (s+1) ... (s+2j-2)
  double power = std::pow(x, -s - 1.0);
  for (std::size_t j = 0; j < kB2jOverFact.size(); ++j) {
    sum += kB2jOverFact[j] * rising * power;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power /= x * x;
  }
  return sum;
}

WeightSpec::WeightSpec(Variant v) : variant_(std::move(v)) {
  std::visit(Overloaded{
                 [](const Degenerate& d) { require(d.x >= 0.0 && std::isfinite(d.x), "degenerate value must be >= 0"); },
                 [](const ParetoContinuous& p) {
                   require(p.t0 > 0.0 && std::isfinite(p.t0), "pareto t0 must be > 0");
                   require(p.kappa > 2.0 && std::isfinite(p.kappa), "pareto kappa must be > 2");
                 },
                 [this](const DiscretePowerLaw& p) {
                   require(p.kappa > 2.0 && std::isfinite(p.kappa), "discrete power law kappa must be > 2");
                   zeta_ = hurwitz_zeta(p.kappa, 1.0);
                   auto table = std::make_shared<std::vector<double>>(kDiscreteTableSize);
                   double acc = 0.0;
                   for (std::size_t r = 1; r <= kDiscreteTableSize; ++r) {
                     acc += std::pow(static_cast<double>(r), -p.kappa) / zeta_;
                     (*table)[r - 1] = acc;
                   }
                   cdf_table_ = std::move(table);
                 },
                 [](const Exponential& e) { require(e.rate > 0.0 && std::isfinite(e.rate), "exponential rate must be > 0"); },
                 [](const FiniteSupport& f) {
                   require(!f.values.empty(), "finite support needs at least one value");
                   require(f.values.size() == f.probs.size(), "values and probs differ in length");
                   double total = 0.0;
                   for (std::size_t i = 0; i < f.values.size(); ++i) {
                     require(f.values[i] >= 0.0 && std::isfinite(f.values[i]), "finite support values must be >= 0");
                     require(f.probs[i] >= 0.0, "finite support probs must be >= 0");
                     total += f.probs[i];
                   }
                   require(std::abs(total - 1.0) <= 1e-12, "finite support probs must sum to 1");
                 },
             },
             variant_);
}

WeightSpec WeightSpec::degenerate(double x) { return WeightSpec(Degenerate{x}); }
WeightSpec WeightSpec::pareto(double t0, double kappa) { return WeightSpec(ParetoContinuous{t0, kappa}); }
WeightSpec WeightSpec::discrete_power_law(double kappa) { return WeightSpec(DiscretePowerLaw{kappa}); }
WeightSpec WeightSpec::exponential(double rate) { return WeightSpec(Exponential{rate}); }
WeightSpec WeightSpec::finite(std::vector<double> values, std::vector<double> probs) {
  return WeightSpec(FiniteSupport{std::move(values), std::move(probs)});
}

std::string WeightSpec::name() const {
  return std::visit(Overloaded{
                        [](const Degenerate&) { return std::string("degenerate"); },
                        [](const ParetoContinuous&) { return std::string("pareto"); },
                        [](const DiscretePowerLaw&) { return std::string("discrete_power_law"); },
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const FiniteSupport&) { return std::string("finite"); },
                    },
                    variant_);
}

bool WeightSpec::has_finite_support() const { return as<Degenerate>() || as<FiniteSupport>(); }

bool WeightSpec::operator==(const WeightSpec& other) const {
  if (variant_.index() != other.variant_.index()) return false;
  return std::visit(Overloaded{
                        [&](const Degenerate& d) { return d.x == other.as<Degenerate>()->x; },
                        [&](const ParetoContinuous& p) {
                          const auto* o = other.as<ParetoContinuous>();
                          return p.t0 == o->t0 && p.kappa == o->kappa;
                        },
                        [&](const DiscretePowerLaw& p) { return p.kappa == other.as<DiscretePowerLaw>()->kappa; },
                        [&](const Exponential& e) { return e.rate == other.as<Exponential>()->rate; },
                        [&](const FiniteSupport& f) {
                          const auto* o = other.as<FiniteSupport>();
                          return f.values == o->values && f.probs == o->probs;
                        },
                    },
                    variant_);
}

double WeightSpec::density(double z) const {
  return std::visit(Overloaded{
                        [&](const Degenerate& d) { return z == d.x ? 1.0 : 0.0; },
                        [&](const ParetoContinuous& p) {
                          if (z < p.t0) return 0.0;
                          return (p.kappa - 1.0) / p.t0 * std::pow(z / p.t0, -p.kappa);
                        },
                        [&](const DiscretePowerLaw& p) {
                          if (z < 1.0 || z != std::floor(z)) return 0.0;
                          return std::pow(z, -p.kappa) / zeta_;
                        },
                        [&](const Exponential& e) { return z < 0.0 ? 0.0 : e.rate * std::exp(-e.rate * z); },
                        [&](const FiniteSupport& f) {
                          double p = 0.0;
                          for (std::size_t i = 0; i < f.values.size(); ++i)
                            if (f.values[i] == z) p += f.probs[i];
                          return p;
                        },
                    },
                    variant_);
}

double WeightSpec::tail_mass(double z) const {
  return std::visit(Overloaded{
                        [&](const Degenerate& d) { return d.x > z ? 1.0 : 0.0; },
                        [&](const ParetoContinuous& p) { return z < p.t0 ? 1.0 : std::pow(z / p.t0, 1.0 - p.kappa); },
                        [&](const DiscretePowerLaw& p) {
                          if (z < 1.0) return 1.0;
                          const double r = std::floor(z);
                          if (r < 64.0) return std::max(0.0, 1.0 - (*cdf_table_)[static_cast<std::size_t>(r) - 1]);
                          return hurwitz_zeta(p.kappa, r + 1.0) / zeta_;
                        },
                        [&](const Exponential& e) { return z < 0.0 ? 1.0 : std::exp(-e.rate * z); },
                        [&](const FiniteSupport& f) {
                          double t = 0.0;
                          for (std::size_t i = 0; i < f.values.size(); ++i)
                            if (f.values[i] > z) t += f.probs[i];
                          return t;
                        },
                    },
                    variant_);
}

double WeightSpec::cdf(double z) const { return 1.0 - tail_mass(z); }

double WeightSpec::tail_first_moment(double z) const {
  return std::visit(Overloaded{
                        [&](const Degenerate& d) { return d.x > z ? d.x : 0.0; },
                        [&](const ParetoContinuous& p) {
                          const double c = (p.kappa - 1.0) * std::pow(p.t0, p.kappa - 1.0);
                          const double from = std::max(z, p.t0);
                          return c / (p.kappa - 2.0) * std::pow(from, 2.0 - p.kappa);
                        },
                        [&](const DiscretePowerLaw& p) {
                          const double r = std::max(0.0, std::floor(z));
                          return hurwitz_zeta(p.kappa - 1.0, r + 1.0) / zeta_;
                        },
                        [&](const Exponential& e) {
                          const double from = std::max(z, 0.0);
                          return (from + 1.0 / e.rate) * std::exp(-e.rate * from);
                        },
                        [&](const FiniteSupport& f) {
                          double t = 0.0;
                          for (std::size_t i = 0; i < f.values.size(); ++i)
                            if (f.values[i] > z) t += f.values[i] * f.probs[i];
                          return t;
                        },
                    },
                    variant_);
}

double WeightSpec::quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw Error(ErrorCode::InvalidSpec, "quantile needs u in [0, 1)");
  return std::visit(Overloaded{
                        [&](const Degenerate& d) { return d.x; },
                        [&](const ParetoContinuous& p) { return p.t0 * std::pow(1.0 - u, -1.0 / (p.kappa - 1.0)); },
                        [&](const DiscretePowerLaw& p) {
                          const auto& table = *cdf_table_;
                          if (u < table.back()) {
                            const auto it = std::upper_bound(table.begin(), table.end(), u);
                            return static_cast<double>(it - table.begin() + 1);
                          }
                          // Smallest r with P(Z > r) <= 1 - u, by doubling then bisection.
                          const double target = 1.0 - u;
                          auto survival = [&](double r) { return hurwitz_zeta(p.kappa, r + 1.0) / zeta_; };
                          double lo = static_cast<double>(kDiscreteTableSize);
                          double hi = 2.0 * lo;
                          while (survival(hi) > target) {
                            lo = hi;
                            hi *= 2.0;
                          }
                          while (hi - lo > 1.0) {
                            const double mid = std::floor(0.5 * (lo + hi));
                            if (survival(mid) > target)
                              lo = mid;
                            else
                              hi = mid;
                          }
                          return hi;
                        },
                        [&](const Exponential& e) { return -std::log1p(-u) / e.rate; },
                        [&](const FiniteSupport& f) {
                          double acc = 0.0;
                          for (std::size_t i = 0; i < f.values.size(); ++i) {
                            acc += f.probs[i];
                            if (u < acc) return f.values[i];
                          }
                          return f.values.back();
                        },
                    },
                    variant_);
}

double moment(const WeightSpec& spec, int order) {
  if (order < 0) throw Error(ErrorCode::NegativeOrder, "moment order must be >= 0");
  if (order == 0) return 1.0;
  const double k = order;
  auto infinite = [&](double kappa) {
    std::ostringstream msg;
    msg << "moment of order " << order << " needs kappa > " << order + 1 << ", got " << kappa;
    return Error(ErrorCode::InfiniteMoment, msg.str());
  };
  return std::visit(Overloaded{
                        [&](const Degenerate& d) { return std::pow(d.x, k); },
                        [&](const ParetoContinuous& p) {
                          if (!(p.kappa > k + 1.0)) throw infinite(p.kappa);
                          return (p.kappa - 1.0) / (p.kappa - 1.0 - k) * std::pow(p.t0, k);
                        },
                        [&](const DiscretePowerLaw& p) {
                          if (!(p.kappa > k + 1.0)) throw infinite(p.kappa);
                          return hurwitz_zeta(p.kappa - k, 1.0) / hurwitz_zeta(p.kappa, 1.0);
                        },
                        [&](const Exponential& e) { return std::tgamma(k + 1.0) / std::pow(e.rate, k); },
                        [&](const FiniteSupport& f) {
                          double s = 0.0;
                          for (std::size_t i = 0; i < f.values.size(); ++i) s += f.probs[i] * std::pow(f.values[i], k);
                          return s;
                        },
                    },
                    spec.variant());
}

double sample_from_uniform(const WeightSpec& spec, double u) { return spec.quantile(u); }

double sample(const WeightSpec& spec, Stream& stream) {
  if (const auto* d = spec.as<Degenerate>()) return d->x;
  return spec.quantile(stream.uniform());
}

std::optional<PowerLawTail> power_law_tail(const WeightSpec& spec) {
  if (const auto* p = spec.as<ParetoContinuous>())
    return PowerLawTail{(p->kappa - 1.0) * std::pow(p->t0, p->kappa - 1.0), p->kappa};
  if (const auto* p = spec.as<DiscretePowerLaw>()) return PowerLawTail{1.0 / hurwitz_zeta(p->kappa, 1.0), p->kappa};
  return std::nullopt;
}

VectorExpectation expect_vector(const WeightSpec& spec, std::size_t dim, const VectorIntegrand& g,
                                const ExpectOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidSpec, "expect needs tol > 0");
  if (const auto* d = spec.as<Degenerate>()) {
    std::vector<double> out(dim, 0.0);
    g(d->x, out);
    return {std::move(out), 0.0};
  }
  if (const auto* f = spec.as<FiniteSupport>()) {
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < f->values.size(); ++i) nodes.push_back({f->values[i], f->probs[i]});
    return {integrate(nodes, dim, g), 0.0};
  }

  double z_max = std::max(options.z_max, spec.quantile(1.0 - kDefaultTailMass));
  while (tail_term(spec, z_max, options) > 0.25 * options.tol && z_max < 1e30) z_max *= 2.0;
  const double tail = tail_term(spec, z_max, options);

  if (const auto* p = spec.as<DiscretePowerLaw>()) {
    const auto r_max = static_cast<std::size_t>(std::floor(z_max));
    const double zeta = hurwitz_zeta(p->kappa, 1.0);
    std::vector<Node> nodes;
    nodes.reserve(r_max);
    for (std::size_t r = 1; r <= r_max; ++r) {
      const double z = static_cast<double>(r);
      nodes.push_back({z, std::pow(z, -p->kappa) / zeta});
    }
    return {integrate(nodes, dim, g), tail, z_max, tail};
  }

  int panels = 64;
  auto previous = integrate(continuous_rule(spec, z_max, panels), dim, g);
  while (true) {
    panels *= 2;
    auto current = integrate(continuous_rule(spec, z_max, panels), dim, g);
    double diff = 0.0;
    for (std::size_t k = 0; k < dim; ++k) diff = std::max(diff, std::abs(current[k] - previous[k]));
    if (diff <= options.tol) return {std::move(current), diff + tail, z_max, tail};
    if (panels >= options.max_panels) {
      std::ostringstream msg;
      msg << "panel doubling stalled at " << panels << " panels with change " << diff << " > tol " << options.tol;
      throw Error(ErrorCode::ToleranceNotMet, msg.str());
    }
    previous = std::move(current);
  }
}

Expectation expect(const WeightSpec& spec, const std::function<double(double)>& g, const ExpectOptions& options) {
  auto r = expect_vector(
      spec, 1, [&](double z, std::span<double> out) { out[0] = g(z); }, options);
  return {r.values[0], r.err_bound};
}

Beta Beta::finite(double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw Error(ErrorCode::InvalidSpec, "finite beta must be a positive real");
  return {Kind::Finite, value};
}

Moments Moments::of(const WeightSpec& p1, const WeightSpec& p2, Beta beta) {
  auto moment_or_inf = [](const WeightSpec& s, int k) {
    try {
      return moment(s, k);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InfiniteMoment) return kInf;
      throw;
    }
  };
  Moments m;
  m.a1 = moment_or_inf(p1, 1);
  m.a2 = moment_or_inf(p1, 2);
  m.a3 = moment_or_inf(p1, 3);
  m.b1 = moment_or_inf(p2, 1);
  m.b2 = moment_or_inf(p2, 2);
  m.beta = beta;
  return m;
}

nlohmann::json weight_spec_to_json(const WeightSpec& spec) {
  using nlohmann::json;
  return std::visit(Overloaded{
                        [](const Degenerate& d) { return json{{"variant", "degenerate"}, {"x", d.x}}; },
                        [](const ParetoContinuous& p) {
                          return json{{"variant", "pareto"}, {"t0", p.t0}, {"kappa", p.kappa}};
                        },
                        [](const DiscretePowerLaw& p) { return json{{"variant", "discrete_power_law"}, {"kappa", p.kappa}}; },
                        [](const Exponential& e) { return json{{"variant", "exponential"}, {"rate", e.rate}}; },
                        [](const FiniteSupport& f) {
                          return json{{"variant", "finite"}, {"values", f.values}, {"probs", f.probs}};
                        },
                    },
                    spec.variant());
}

WeightSpec weight_spec_from_json(const nlohmann::json& j) {
  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw Error(ErrorCode::InvalidSpec, std::string("weight spec missing field '") + key + "'");
    return j.at(key);
  };
  if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "weight spec must be a JSON object");
  const std::string variant = field("variant").get<std::string>();
  try {
    if (variant == "degenerate") return WeightSpec::degenerate(field("x").get<double>());
    if (variant == "pareto") return WeightSpec::pareto(field("t0").get<double>(), field("kappa").get<double>());
    if (variant == "discrete_power_law") return WeightSpec::discrete_power_law(field("kappa").get<double>());
    if (variant == "exponential") return WeightSpec::exponential(field("rate").get<double>());
    if (variant == "finite")
      return WeightSpec::finite(field("values").get<std::vector<double>>(), field("probs").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("weight spec field has wrong type: ") + e.what());
  }
  throw Error(ErrorCode::InvalidSpec, "unknown weight variant '" + variant + "'");
}

}  // namespace rig
