#include "rig/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "rig/error.hpp"

namespace rig {

namespace {

constexpr double kRescaleAbove = 1e280;
constexpr double kLogUnderflow = -745.0;

void require_finite_beta(const Beta& beta, const char* what) {
  if (!beta.is_finite())
    throw Error(ErrorCode::UnsupportedRegime, std::string(what) + " needs m/n -> beta in (0, inf)");
}

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InfiniteMoment, std::string(name) + " is infinite");
}

// Fills out[0..r_max] with Poisson(mean) probabilities, using a shared
// log-factorial table.
void fill_poisson(double mean, std::span<const double> log_factorial, std::span<double> out) {
  if (mean <= 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
    return;
  }
  const double log_mean = std::log(mean);
  for (std::size_t r = 0; r < out.size(); ++r)
    out[r] = std::exp(-mean + static_cast<double>(r) * log_mean - log_factorial[r]);
}

std::vector<double> log_factorials(std::size_t r_max) {
  std::vector<double> table(r_max + 1);
  for (std::size_t r = 0; r <= r_max; ++r) table[r] = std::lgamma(static_cast<double>(r) + 1.0);
  return table;
}

// Panjer recursion for a compound Poisson law. `weighted` holds j * f_j.
// Intermediate values are kept in a rescaled range so that e^{-a} can
// underflow without zeroing the whole recursion.
void panjer(double rate, double f0, std::span<const double> weighted, std::span<double> out) {
  const std::size_t r_max = out.size() - 1;
  const double a = rate * (1.0 - f0);
  if (a > static_cast<double>(r_max) && r_max > 0) {
    // Chernoff bound on the count of nonzero severities: every entry is at most this.
    const double s = static_cast<double>(r_max);
    const double log_bound = -a + s * (1.0 + std::log(a / s));
    if (log_bound < kLogUnderflow) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
  }
  std::vector<double> g(r_max + 1, 0.0);
  double log_scale = -a;
  g[0] = 1.0;
  for (std::size_t k = 1; k <= r_max; ++k) {
    double acc = 0.0;
    const std::size_t jmax = std::min(k, weighted.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) acc += weighted[j] * g[k - j];
    g[k] = rate / static_cast<double>(k) * acc;
    if (g[k] > kRescaleAbove) {
      for (std::size_t i = 0; i <= k; ++i) g[i] /= kRescaleAbove;
      log_scale += std::log(kRescaleAbove);
    }
  }
  for (std::size_t k = 0; k <= r_max; ++k)
    out[k] = g[k] > 0.0 ? std::exp(std::log(g[k]) + log_scale) : 0.0;
}

struct Severity {
  double f0;
  std::vector<double> weighted;  // j * f_j, j = 0..r_max
};

Severity prepare_severity(const Pmf& severity, std::size_t r_max) {
  Severity s{severity[0], std::vector<double>(r_max + 1, 0.0)};
  for (std::size_t j = 1; j <= r_max; ++j) s.weighted[j] = static_cast<double>(j) * severity[j];
  return s;
}

double clamp_non_negative(double x) { return x < 0.0 ? 0.0 : x; }

}  // namespace

LambdaSpecs lambda_specs(const WeightSpec& p1, const WeightSpec& p2, Beta beta) {
  const Moments m = Moments::of(p1, p2, beta);
  require_finite(m.b1, "b1 = E Y");
  LambdaSpecs out;
  if (std::isfinite(m.a2)) out.lambda3 = LambdaSpec{p2, m.a2 * m.b1, m.a2 * m.b1 * m.b1};
  if (beta.is_finite()) {
    const double root = std::sqrt(beta.value);
    out.lambda0 = LambdaSpec{p1, m.b1 / root, m.a1 * m.b1 / root};
    out.lambda1 = LambdaSpec{p2, m.a1 * root, m.a1 * m.b1 * root};
  }
  return out;
}

Pmf poisson_pmf(double mean, std::size_t r_max) {
  if (mean < 0.0) throw Error(ErrorCode::NegativeRate, "poisson mean must be >= 0");
  Pmf out{std::vector<double>(r_max + 1), poisson_upper_tail(mean, r_max), "poisson"};
  const auto lf = log_factorials(r_max);
  fill_poisson(mean, lf, out.probs);
  return out;
}

double poisson_upper_tail(double mean, std::size_t r) {
  if (mean <= 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(r) + 1.0, mean);
}

Pmf mixed_poisson_pmf(const WeightSpec& mix, double scale, std::size_t r_max, double tol) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorCode::InvalidSpec, "mixed poisson scale must be > 0");
  moment(mix, 1);  // finite mean required

  const auto lf = log_factorials(r_max);
  const std::size_t dim = r_max + 2;
  auto integrand = [&](double z, std::span<double> out) {
    const double mean = scale * z;
    fill_poisson(mean, lf, out.first(r_max + 1));
    out[r_max + 1] = poisson_upper_tail(mean, r_max);
  };
  ExpectOptions options;
  options.tol = tol;
  const double rr = static_cast<double>(r_max);
  options.z_max = 2.0 * (rr + 10.0 * std::sqrt(rr) + 10.0) / scale;
  const auto e = expect_vector(mix, dim, integrand, options);

  Pmf out{std::vector<double>(r_max + 1), 0.0, "mixed_poisson"};
  for (std::size_t r = 0; r <= r_max; ++r) out.probs[r] = clamp_non_negative(e.values[r]);
  out.residual = clamp_non_negative(e.values[r_max + 1]) + (e.z_max > 0.0 ? mix.tail_mass(e.z_max) : 0.0);
  return out;
}

Pmf tau_pmf(const Pmf& lambda0, double mean_lambda0) {
  if (!(mean_lambda0 > 0.0)) throw Error(ErrorCode::ZeroMean, "E Lambda0 must be > 0 to size-bias");
  if (lambda0.size() < 2) throw Error(ErrorCode::ShapeMismatch, "Lambda0 pmf needs at least two entries");
  Pmf out{std::vector<double>(lambda0.size() - 1), 0.0, "tau"};
  for (std::size_t r = 0; r + 1 < lambda0.size(); ++r)
    out.probs[r] = static_cast<double>(r + 1) * lambda0.probs[r + 1] / mean_lambda0;
  out.residual = clamp_non_negative(1.0 - out.core_mass());
  return out;
}

Pmf compound_poisson_pmf(double rate, const Pmf& severity, std::size_t r_max) {
  if (rate < 0.0 || std::isnan(rate)) throw Error(ErrorCode::NegativeRate, "compound poisson rate must be >= 0");
  Pmf out{std::vector<double>(r_max + 1, 0.0), 0.0, "compound_poisson"};
  if (rate == 0.0) {
    out.probs[0] = 1.0;
    return out;
  }
  const Severity s = prepare_severity(severity, r_max);
  panjer(rate, s.f0, s.weighted, out.probs);
  out.residual = clamp_non_negative(1.0 - out.core_mass());
  return out;
}

Pmf dstar_pmf(const WeightSpec& p2, const Pmf& tau, double a1, Beta beta, std::size_t r_max, double tol) {
  require_finite_beta(beta, "d*");
  const double rate_per_y = a1 * std::sqrt(beta.value);
  const Severity s = prepare_severity(tau, r_max);
  auto integrand = [&](double y, std::span<double> out) {
    auto g = out.first(r_max + 1);
    panjer(y * rate_per_y, s.f0, s.weighted, g);
    double total = 0.0;
    for (double v : g) total += v;
    out[r_max + 1] = clamp_non_negative(1.0 - total);
  };
  ExpectOptions options;
  options.tol = tol;
  const auto e = expect_vector(p2, r_max + 2, integrand, options);
  Pmf out{std::vector<double>(r_max + 1), 0.0, "dstar"};
  for (std::size_t r = 0; r <= r_max; ++r) out.probs[r] = clamp_non_negative(e.values[r]);
  out.residual = clamp_non_negative(e.values[r_max + 1]) + (e.z_max > 0.0 ? p2.tail_mass(e.z_max) : 0.0);
  return out;
}

QSeq q_seq(const WeightSpec& p2, const Pmf& tau, double a1, Beta beta, std::size_t r_max, double tol) {
  require_finite_beta(beta, "q_r");
  moment(p2, 1);
  const double rate_per_y = a1 * std::sqrt(beta.value);
  const Severity s = prepare_severity(tau, r_max);
  auto integrand = [&](double y, std::span<double> out) {
    auto g = out.first(r_max + 1);
    panjer(y * rate_per_y, s.f0, s.weighted, g);
    double total = 0.0;
    for (double& v : g) {
      total += v;
      v *= y;
    }
    out[r_max + 1] = y * clamp_non_negative(1.0 - total);
  };
  ExpectOptions options;
  options.tol = tol;
  options.growth = Growth::Linear;
  const auto e = expect_vector(p2, r_max + 2, integrand, options);
  QSeq out{std::vector<double>(r_max + 1), 0.0};
  for (std::size_t r = 0; r <= r_max; ++r) out.q[r] = clamp_non_negative(e.values[r]);
  out.residual = clamp_non_negative(e.values[r_max + 1]) + (e.z_max > 0.0 ? p2.tail_first_moment(e.z_max) : 0.0);
  return out;
}

JointPmf p_beta_joint(const Pmf& lambda0, const QSeq& q, const Moments& moments, std::size_t k_max) {
  require_finite_beta(moments.beta, "p_beta");
  require_finite(moments.a2, "a2 = E X^2");
  require_finite(moments.b1, "b1 = E Y");
  if (!(moments.a2 > 0.0) || !(moments.b1 > 0.0)) throw Error(ErrorCode::ZeroMean, "p_beta needs a2 > 0 and b1 > 0");
  if (lambda0.size() < k_max + 3) throw Error(ErrorCode::ShapeMismatch, "Lambda0 pmf must reach k_max + 2");
  if (q.q.size() < k_max + 1) throw Error(ErrorCode::ShapeMismatch, "q sequence must reach k_max");

  const double beta = moments.beta.value;
  const double b1 = moments.b1;
  const double scale = beta / (b1 * b1 * b1 * b1 * moments.a2);
  std::vector<double> weight(k_max + 1);
  for (std::size_t r = 0; r <= k_max; ++r)
    weight[r] = static_cast<double>((r + 1) * (r + 2)) * lambda0.probs[r + 2];

  JointPmf out(k_max + 1, "p_beta");
  for (std::size_t k1 = 0; k1 <= k_max; ++k1) {
    for (std::size_t k2 = k1; k2 <= k_max; ++k2) {
      double acc = 0.0;
      for (std::size_t r = 0; r <= k1; ++r) acc += weight[r] * q.q[k1 - r] * q.q[k2 - r];
      out.at(k1, k2) = scale * acc;
      out.at(k2, k1) = scale * acc;
    }
  }
  // Full mass is scale * E lambda0^2 * (sum q)^2 with E lambda0^2 = a2 b1^2 / beta.
  const double q_total = q.core_sum() + q.residual;
  const double full = scale * (moments.a2 * b1 * b1 / beta) * q_total * q_total;
  out.residual = clamp_non_negative(full - out.core_mass());
  return out;
}

Pmf tilde_p(const Pmf& lambda3, double mean_lambda3) {
  if (!(mean_lambda3 > 0.0)) throw Error(ErrorCode::ZeroMean, "E Lambda3 must be > 0 to size-bias");
  Pmf out{std::vector<double>(lambda3.size(), 0.0), 0.0, "tilde_p"};
  for (std::size_t r = 1; r < lambda3.size(); ++r)
    out.probs[r] = static_cast<double>(r) * lambda3.probs[r] / mean_lambda3;
  out.residual = clamp_non_negative(1.0 - out.core_mass());
  return out;
}

JointPmf p_infty_joint(const Pmf& lambda3, double mean_lambda3, std::size_t k_max) {
  if (lambda3.size() < k_max + 2) throw Error(ErrorCode::ShapeMismatch, "Lambda3 pmf must reach k_max + 1");
  const Pmf tp = tilde_p(lambda3, mean_lambda3);
  JointPmf out(k_max + 1, "p_infty");
  for (std::size_t k1 = 0; k1 <= k_max; ++k1)
    for (std::size_t k2 = 0; k2 <= k_max; ++k2) out.at(k1, k2) = tp.probs[k1 + 1] * tp.probs[k2 + 1];
  out.residual = clamp_non_negative(1.0 - out.core_mass());
  return out;
}

double clustering_limit(const Moments& moments) {
  require_finite_beta(moments.beta, "clustering limit");
  require_finite(moments.a3, "a3 = E X^3");
  require_finite(moments.b2, "b2 = E Y^2");
  if (!(moments.a2 > 0.0) || !(moments.b2 > 0.0))
    throw Error(ErrorCode::ZeroMean, "clustering limit needs a2 > 0 and b2 > 0");
  const double kappa = moments.b1 / moments.b2 * moments.a3 / (moments.a2 * moments.a2);
  return kappa / (kappa + std::sqrt(moments.beta.value));
}

TransitionMatrix degree_transition_matrix(const JointPmf& joint) {
  TransitionMatrix out;
  for (std::size_t k = 0; k < joint.dim; ++k) {
    double row_sum = 0.0;
    for (std::size_t l = 0; l < joint.dim; ++l) row_sum += joint(k, l);
    if (!(row_sum > 0.0)) {
      out.dropped.push_back(k);
      continue;
    }
    std::vector<double> row(joint.dim);
    for (std::size_t l = 0; l < joint.dim; ++l) row[l] = joint(k, l) / row_sum;
    out.states.push_back(k);
    out.rows.push_back(std::move(row));
  }
  if (out.states.empty()) throw Error(ErrorCode::EmptyJoint, "joint pmf has no row with positive mass");
  return out;
}

LeCamResult lecam_check(std::span<const double> p) {
  if (p.size() > 30) throw Error(ErrorCode::TooManyTerms, "lecam_check supports at most 30 indicators");
  double mean = 0.0;
  double bound = 0.0;
  for (double pi : p) {
    if (!(pi >= 0.0 && pi <= 1.0)) throw Error(ErrorCode::InvalidSpec, "indicator probabilities must lie in [0, 1]");
    mean += pi;
    bound += pi * pi;
  }
  // Poisson-binomial law by convolution, one indicator at a time.
  std::vector<double> law(p.size() + 1, 0.0);
  law[0] = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t k = i + 1; k > 0; --k) law[k] = law[k] * (1.0 - p[i]) + law[k - 1] * p[i];
    law[0] *= 1.0 - p[i];
  }
  const Pmf poisson = poisson_pmf(mean, p.size());
  double l1 = 0.0;
  for (std::size_t k = 0; k < law.size(); ++k) l1 += std::abs(law[k] - poisson.probs[k]);
  l1 += poisson.residual;
  return {0.5 * l1, bound};
}

}  // namespace rig
