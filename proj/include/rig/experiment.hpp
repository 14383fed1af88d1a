#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rig/analytic.hpp"
#include "rig/genmodel.hpp"
#include "rig/stats.hpp"
#include "rig/weights.hpp"

namespace rig {

enum class ExperimentKind { Analytic, Simulate, Compare, Oracle, Asymptote };
enum class RegimeKind { Beta, Infinity, Zero };
enum class GeneratorKind { Fast, Naive };

std::string to_string(ExperimentKind kind);
std::string to_string(RegimeKind kind);

// Growth rule m = floor(c * n^gamma). gamma = 1 is the beta regime,
// gamma > 1 the infinite one and gamma < 1 the zero one.
struct RegimeConfig {
  RegimeKind kind = RegimeKind::Beta;
  std::optional<double> beta;  // analytic beta; defaults to c for gamma = 1
  std::optional<double> c;
  std::optional<double> gamma;
};

struct Tolerances {
  double degree_tv = 0.02;
  double edge_joint_tv = 0.05;
  double conditioned_degree_tv = 0.05;
  double common_neighbor_tv = 0.03;
  double clustering_abs = 0.02;
  double assortativity_abs = 0.02;
  double isolated_min = 0.95;
};

struct AsymptoteConfig {
  AsymptoteRegime regime = AsymptoteRegime::Lemma3Local;
  std::string mixer = "p2";  // weight law of Lambda_Z in the lemma3_* regimes
  double scale = 1.0;
  std::size_t k = 0;
  std::vector<std::pair<double, double>> points;  // (r, unused) or (k1, k2)
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Analytic;
  ModelParams model;
  std::optional<RegimeConfig> regime;
  std::size_t k_max = 30;
  std::size_t r_max = 100;
  double tol = 1e-10;
  std::uint32_t replicas = 1;
  int threads = 1;
  GeneratorKind generator = GeneratorKind::Fast;
  std::uint64_t pair_cap = kDefaultPairCap;
  std::filesystem::path out = "out";
  Tolerances tolerances;
  AsymptoteConfig asymptote;

  RegimeKind regime_kind() const;
  // beta used by analytic formulas; infinity and zero markers otherwise.
  Beta analytic_beta() const;
};

// Applies the growth rule and validates. Throws ConfigError naming the field.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

// Limiting laws of the configured regime.
struct AnalyticLaws {
  Moments moments;
  Pmf degree;
  std::optional<JointPmf> edge_joint;
  std::optional<Pmf> conditioned_degree;
  std::optional<Pmf> common_neighbor;
  std::optional<Pmf> tau;
  std::optional<QSeq> q;
  std::optional<double> clustering;
};

AnalyticLaws analytic_laws(const ExperimentConfig& config);

// Pooled report of config.replicas graphs; replica r uses replica_seed(seed, r).
EmpiricalReport simulate_replicas(const ExperimentConfig& config, std::ostream& log);

struct ComparisonRow {
  std::string quantity;
  double empirical;
  double analytic;
  double tv_or_ratio;
  double tolerance;
  bool pass;
};

std::vector<ComparisonRow> compare_report(const EmpiricalReport& report, const AnalyticLaws& laws,
                                          const ExperimentConfig& config);
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

struct RunResult {
  int exit_code;
  nlohmann::json summary;
};

// Runs the configured experiment and writes its files under config.out.
// Exit code 2 marks a tolerance failure; errors propagate as exceptions.
RunResult run(const ExperimentConfig& config, std::ostream& log);

}  // namespace rig
