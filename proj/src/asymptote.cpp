#include <algorithm>
#include <cmath>

#include "rig/analytic.hpp"
#include "rig/error.hpp"

namespace rig {

namespace {

struct RegimeName {
  AsymptoteRegime regime;
  const char* name;
};

constexpr RegimeName kRegimeNames[] = {
    {AsymptoteRegime::Remark0I, "remark0_i"},       {AsymptoteRegime::Remark0II, "remark0_ii"},
    {AsymptoteRegime::Cor1I, "cor1_i"},             {AsymptoteRegime::Cor1IIFar, "cor1_ii_far"},
    {AsymptoteRegime::Cor1IINear, "cor1_ii_near"},  {AsymptoteRegime::Cor1III, "cor1_iii"},
    {AsymptoteRegime::Lemma3Tail, "lemma3_tail"},   {AsymptoteRegime::Lemma3Local, "lemma3_local"},
    {AsymptoteRegime::TauTail, "tau_tail"},         {AsymptoteRegime::QTail, "q_tail"},
};

void need(double value, const char* name) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InfiniteMoment, std::string(name) + " is infinite");
  if (!(value > 0.0)) throw Error(ErrorCode::ZeroMean, std::string(name) + " must be positive");
}

void need_finite_beta(const Moments& m, AsymptoteRegime regime) {
  if (!m.beta.is_finite())
    throw Error(ErrorCode::UnsupportedRegime, to_string(regime) + " holds only for m/n -> beta in (0, inf)");
}

// c_3,k = sum_i q_i q_{k+i}, with the unseen tail bounded through the
// envelope q_i <= C i^{1-kappa} fitted on the upper half of the sequence.
std::pair<double, double> near_branch_sum(const QSeq& q, std::size_t k, double kappa) {
  const std::size_t len = q.q.size();
  if (len <= k + 1) throw Error(ErrorCode::ShapeMismatch, "q sequence too short for the near-branch offset");
  const std::size_t last = len - 1 - k;
  double core = 0.0;
  for (std::size_t i = 0; i <= last; ++i) core += q.q[i] * q.q[i + k];
  double envelope = 0.0;
  for (std::size_t i = std::max<std::size_t>(1, len / 2); i < len; ++i)
    envelope = std::max(envelope, q.q[i] * std::pow(static_cast<double>(i), kappa - 1.0));
  const double tail = envelope * envelope * std::pow(static_cast<double>(last), 3.0 - 2.0 * kappa) / (2.0 * kappa - 3.0);
  return {core, tail};
}

}  // namespace

std::string to_string(AsymptoteRegime regime) {
  for (const auto& entry : kRegimeNames)
    if (entry.regime == regime) return entry.name;
  return "unknown";
}

AsymptoteRegime asymptote_regime_from_string(const std::string& name) {
  for (const auto& entry : kRegimeNames)
    if (name == entry.name) return entry.regime;
  throw Error(ErrorCode::UnsupportedRegime, "unknown asymptote regime '" + name + "'");
}

double AsymptotePrediction::evaluate(double k1, double k2) const {
  if (!two_index) return constant * std::pow(k1, exponent);
  if (exponent2) return constant * std::pow(k1, exponent) * std::pow(k2 - k1, *exponent2);
  return constant * std::pow(k1 * k2, exponent);
}

AsymptotePrediction asymptote(AsymptoteRegime regime, const AsymptoteParams& params) {
  const double c = params.tail.constant;
  const double kappa = params.tail.exponent;
  const Moments& m = params.moments;
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidSpec, "tail constant must be positive");
  if (!(kappa > 2.0)) throw Error(ErrorCode::InvalidSpec, "tail exponent must exceed 2");

  AsymptotePrediction out{regime, 0.0, 0.0, std::nullopt, 0.0, false};
  switch (regime) {
    case AsymptoteRegime::Remark0I: {
      need_finite_beta(m, regime);
      need(m.b1, "b1");
      out.constant = c * std::pow(m.b1, kappa - 1.0) * std::pow(m.beta.value, (3.0 - kappa) / 2.0);
      out.exponent = 1.0 - kappa;
      break;
    }
    case AsymptoteRegime::Remark0II: {
      need_finite_beta(m, regime);
      need(m.b1, "b1");
      need(params.x, "x");
      out.constant = c * std::pow(params.x * params.x * m.b1, kappa - 1.0);
      out.exponent = -kappa;
      break;
    }
    case AsymptoteRegime::Cor1I: {
      if (m.beta.kind != Beta::Kind::Infinity)
        throw Error(ErrorCode::UnsupportedRegime, "cor1_i holds only for m/n -> inf");
      need(m.a2, "a2");
      need(m.b1, "b1");
      out.constant = c * c * std::pow(m.a2, 2.0 * kappa - 4.0) * std::pow(m.b1, 2.0 * kappa - 6.0);
      out.exponent = 1.0 - kappa;
      out.two_index = true;
      break;
    }
    case AsymptoteRegime::Cor1IIFar:
    case AsymptoteRegime::Cor1IINear: {
      need_finite_beta(m, regime);
      need(m.a2, "a2");
      need(m.b1, "b1");
      const double beta = m.beta.value;
      const double prefactor = beta / (std::pow(m.b1, 4.0) * m.a2);
      const double c1 = c * std::pow(m.b1 / std::sqrt(beta), kappa - 1.0);
      out.exponent = 2.0 - kappa;
      if (regime == AsymptoteRegime::Cor1IIFar) {
        need(m.b2, "b2");
        const double c2 = c * std::pow(m.b1, kappa - 2.0) * m.b2 * std::pow(beta, (3.0 - kappa) / 2.0);
        out.constant = prefactor * c1 * c2;
        out.exponent2 = 1.0 - kappa;
        out.two_index = true;
      } else {
        if (params.q == nullptr) throw Error(ErrorCode::InvalidSpec, "cor1_ii_near needs the q sequence");
        const auto [c3, tail] = near_branch_sum(*params.q, params.k, kappa);
        out.constant = prefactor * c1 * c3;
        out.constant_error = prefactor * c1 * tail;
      }
      break;
    }
    case AsymptoteRegime::Cor1III: {
      need_finite_beta(m, regime);
      need(m.b1, "b1");
      need(params.x, "x");
      out.constant = c * c * std::pow(params.x, 4.0 * kappa - 8.0) * std::pow(m.b1, 2.0 * kappa - 6.0);
      out.exponent = 1.0 - kappa;
      out.two_index = true;
      break;
    }
    case AsymptoteRegime::Lemma3Tail: {
      need(params.scale, "scale");
      out.constant = c * std::pow(params.scale, kappa - 1.0) / (kappa - 1.0);
      out.exponent = 1.0 - kappa;
      break;
    }
    case AsymptoteRegime::Lemma3Local: {
      need(params.scale, "scale");
      out.constant = c * std::pow(params.scale, kappa - 1.0);
      out.exponent = -kappa;
      break;
    }
    case AsymptoteRegime::TauTail: {
      need_finite_beta(m, regime);
      need(m.a1, "a1");
      need(m.b1, "b1");
      out.constant = c / m.a1 * std::pow(m.b1 / std::sqrt(m.beta.value), kappa - 2.0);
      out.exponent = 1.0 - kappa;
      break;
    }
    case AsymptoteRegime::QTail: {
      need_finite_beta(m, regime);
      need(m.b1, "b1");
      need(m.b2, "b2");
      out.constant = c * std::pow(m.b1, kappa - 2.0) * m.b2 * std::pow(m.beta.value, (3.0 - kappa) / 2.0);
      out.exponent = 1.0 - kappa;
      break;
    }
  }
  return out;
}

nlohmann::json to_json(const AsymptotePrediction& prediction) {
  nlohmann::json j{{"regime", to_string(prediction.regime)},
                   {"constant", prediction.constant},
                   {"exponent", prediction.exponent}};
  if (prediction.exponent2) j["exponent2"] = *prediction.exponent2;
  if (prediction.constant_error > 0.0) j["constant_error"] = prediction.constant_error;
  return j;
}

}  // namespace rig
