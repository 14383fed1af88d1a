#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rig/pmf.hpp"
#include "rig/weights.hpp"

namespace rig {

// Intensity scale * Z of a mixed Poisson law, Z ~ mixer.
struct LambdaSpec {
  WeightSpec mixer;
  double scale;
  double mean;  // E(scale * Z), from closed-form moments
};

// The intensities of the limiting degree laws:
//   lambda0 = X b1 / sqrt(beta), lambda1 = Y a1 sqrt(beta), lambda3 = Y a2 b1.
// lambda0 and lambda1 exist only for a finite beta; lambda3 only for a
// finite a2.
struct LambdaSpecs {
  std::optional<LambdaSpec> lambda0;
  std::optional<LambdaSpec> lambda1;
  std::optional<LambdaSpec> lambda3;
};

LambdaSpecs lambda_specs(const WeightSpec& p1, const WeightSpec& p2, Beta beta);

Pmf poisson_pmf(double mean, std::size_t r_max);
// P(Poisson(mean) > r)
double poisson_upper_tail(double mean, std::size_t r);

// P(Lambda = r) = E[e^{-sZ} (sZ)^r / r!] for r = 0..r_max, each entry within tol.
Pmf mixed_poisson_pmf(const WeightSpec& mix, double scale, std::size_t r_max, double tol = 1e-11);

// Size-biased law shifted down by one: (r+1) P(Lambda0 = r+1) / E Lambda0.
Pmf tau_pmf(const Pmf& lambda0, double mean_lambda0);

// Law of a Poisson(rate) sum of i.i.d. severities, by Panjer recursion.
Pmf compound_poisson_pmf(double rate, const Pmf& severity, std::size_t r_max);

// Limiting degree law d* mixed over Y: compound Poisson with rate Y a1 sqrt(beta).
Pmf dstar_pmf(const WeightSpec& p2, const Pmf& tau, double a1, Beta beta, std::size_t r_max, double tol = 1e-11);

// q_r = E[Y P(d*_Y = r)].
QSeq q_seq(const WeightSpec& p2, const Pmf& tau, double a1, Beta beta, std::size_t r_max, double tol = 1e-11);

// Limiting degree-degree law for m/n -> beta in (0, inf).
JointPmf p_beta_joint(const Pmf& lambda0, const QSeq& q, const Moments& moments, std::size_t k_max);

// p~(r) = r P(Lambda3 = r) / E Lambda3.
Pmf tilde_p(const Pmf& lambda3, double mean_lambda3);

// Limiting degree-degree law for m/n -> inf: p~(k1+1) p~(k2+1).
JointPmf p_infty_joint(const Pmf& lambda3, double mean_lambda3, std::size_t k_max);

// Limiting clustering coefficient kappa / (kappa + sqrt(beta)) with
// kappa = b1 a3 / (b2 a2^2).
double clustering_limit(const Moments& moments);

struct TransitionMatrix {
  std::vector<std::size_t> states;         // retained row indices
  std::vector<std::vector<double>> rows;   // rows[i][l] = P(next = l | state = states[i])
  std::vector<std::size_t> dropped;        // rows with zero mass
};

TransitionMatrix degree_transition_matrix(const JointPmf& joint);

struct LeCamResult {
  double exact_tv;
  double bound;
};

// Exact TV between a Poisson-binomial sum and Poisson(sum p), with the
// sum p^2 bound. At most 30 terms.
LeCamResult lecam_check(std::span<const double> p);

enum class AsymptoteRegime {
  Remark0I,     // P(d* = r), X power law, Y light-tailed
  Remark0II,    // P(d* = r), X degenerate, Y power law
  Cor1I,        // p_inf(k1, k2), Y power law
  Cor1IIFar,    // p_beta(k1, k2), k2 - k1 -> inf
  Cor1IINear,   // p_beta(k1, k1 + k)
  Cor1III,      // p_beta(k1, k2), X degenerate, Y power law
  Lemma3Tail,   // P(Lambda_Z > t)
  Lemma3Local,  // P(Lambda_Z = r)
  TauTail,      // P(tau = r)
  QTail,        // q_r
};

std::string to_string(AsymptoteRegime regime);
AsymptoteRegime asymptote_regime_from_string(const std::string& name);

struct AsymptoteParams {
  PowerLawTail tail{1.0, 3.0};  // constant c and exponent of the power-law weight
  Moments moments;
  double x = 1.0;       // value of a degenerate X
  double scale = 1.0;   // Lambda_Z intensity is scale * Z
  std::size_t k = 0;    // offset k2 - k1 of the near branch
  const QSeq* q = nullptr;
};

struct AsymptotePrediction {
  AsymptoteRegime regime;
  double constant;
  double exponent;
  std::optional<double> exponent2;  // power of (k2 - k1) in the far branch
  double constant_error = 0.0;      // truncation bound, near branch only
  bool two_index = false;

  // constant * r^exponent, or the two-index form for joint regimes.
  double evaluate(double k1, double k2 = 0.0) const;
};

AsymptotePrediction asymptote(AsymptoteRegime regime, const AsymptoteParams& params);

nlohmann::json to_json(const AsymptotePrediction& prediction);

}  // namespace rig
