#include "rig/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "rig/error.hpp"

namespace rig {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "config field '" + field + "': " + what);
}

template <typename T>
T read_field(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(path + key, e.what());
  }
}

template <typename T>
std::optional<T> read_optional(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return read_field<T>(j, key, path, T{});
}

WeightSpec read_weight(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) return WeightSpec::degenerate(1.0);
  try {
    return weight_spec_from_json(j.at(key));
  } catch (const Error& e) {
    config_error(path + key, e.what());
  } catch (const json::exception& e) {
    config_error(path + key, e.what());
  }
}

ExperimentKind experiment_from_string(const std::string& s) {
  if (s == "analytic") return ExperimentKind::Analytic;
  if (s == "simulate") return ExperimentKind::Simulate;
  if (s == "compare") return ExperimentKind::Compare;
  if (s == "oracle") return ExperimentKind::Oracle;
  if (s == "asymptote") return ExperimentKind::Asymptote;
  config_error("experiment", "unknown experiment '" + s + "'");
}

RegimeKind regime_from_string(const std::string& s) {
  if (s == "beta") return RegimeKind::Beta;
  if (s == "infinity") return RegimeKind::Infinity;
  if (s == "zero") return RegimeKind::Zero;
  config_error("regime.kind", "unknown regime '" + s + "'");
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot open '" + path.string() + "' for writing");
  writer(out);
}

double weighted_mean(const Pmf& p) {
  const double mass = p.core_mass();
  return mass > 0.0 ? p.mean() / mass : 0.0;
}

PowerLawTail tail_of(const WeightSpec& spec, const char* role) {
  const auto tail = power_law_tail(spec);
  if (!tail) throw Error(ErrorCode::RegimeMismatch, std::string("regime needs a power-law ") + role + ", got " + spec.name());
  return *tail;
}

const LambdaSpec& lambda3_of(const LambdaSpecs& specs) {
  if (!specs.lambda3) throw Error(ErrorCode::InfiniteMoment, "Lambda3 needs a finite a2 = E X^2");
  return *specs.lambda3;
}

const LambdaSpec& lambda0_of(const LambdaSpecs& specs) {
  if (!specs.lambda0) throw Error(ErrorCode::UnsupportedRegime, "Lambda0 exists only for a finite beta");
  return *specs.lambda0;
}

std::size_t max_point(const std::vector<std::pair<double, double>>& points) {
  double top = 0.0;
  for (const auto& [a, b] : points) top = std::max({top, a, b});
  return static_cast<std::size_t>(std::ceil(top));
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Analytic: return "analytic";
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Compare: return "compare";
    case ExperimentKind::Oracle: return "oracle";
    case ExperimentKind::Asymptote: return "asymptote";
  }
  return "unknown";
}

std::string to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::Beta: return "beta";
    case RegimeKind::Infinity: return "infinity";
    case RegimeKind::Zero: return "zero";
  }
  return "unknown";
}

RegimeKind ExperimentConfig::regime_kind() const { return regime ? regime->kind : RegimeKind::Beta; }

Beta ExperimentConfig::analytic_beta() const {
  switch (regime_kind()) {
    case RegimeKind::Infinity: return Beta::infinity();
    case RegimeKind::Zero: return Beta::zero();
    case RegimeKind::Beta: break;
  }
  if (regime && regime->beta) return Beta::finite(*regime->beta);
  if (regime && regime->c && regime->gamma) return Beta::finite(*regime->c);
  return Beta::finite(model.beta_n());
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) config_error("<root>", "config must be a JSON object");
  ExperimentConfig config;
  config.experiment = experiment_from_string(read_field<std::string>(j, "experiment", "", "analytic"));

  if (!j.contains("model") || !j.at("model").is_object()) config_error("model", "missing model object");
  const json& model = j.at("model");
  const auto n = read_optional<std::uint32_t>(model, "n", "model.");
  if (!n) config_error("model.n", "missing vertex count");
  config.model.n = *n;
  const auto m = read_optional<std::uint32_t>(model, "m", "model.");
  config.model.p1 = read_weight(model, "p1", "model.");
  config.model.p2 = read_weight(model, "p2", "model.");
  config.model.seed = read_field<std::uint64_t>(j, "seed", "", read_field<std::uint64_t>(model, "seed", "model.", 1));

  if (j.contains("regime")) {
    const json& r = j.at("regime");
    if (!r.is_object()) config_error("regime", "must be an object");
    RegimeConfig regime;
    regime.kind = regime_from_string(read_field<std::string>(r, "kind", "regime.", "beta"));
    regime.beta = read_optional<double>(r, "beta", "regime.");
    regime.c = read_optional<double>(r, "c", "regime.");
    regime.gamma = read_optional<double>(r, "gamma", "regime.");
    if (regime.gamma) {
      const double gamma = *regime.gamma;
      const bool consistent = (gamma == 1.0 && regime.kind == RegimeKind::Beta) ||
                              (gamma > 1.0 && regime.kind == RegimeKind::Infinity) ||
                              (gamma < 1.0 && regime.kind == RegimeKind::Zero);
      if (!consistent) config_error("regime.gamma", "gamma inconsistent with regime kind " + to_string(regime.kind));
      const double c = regime.c.value_or(1.0);
      if (!(c > 0.0)) config_error("regime.c", "must be positive");
      const double grown = std::floor(c * std::pow(static_cast<double>(config.model.n), gamma));
      if (!(grown >= 1.0) || grown > 4294967295.0) config_error("regime", "growth rule gives m out of range");
      const auto m_rule = static_cast<std::uint32_t>(grown);
      if (m && *m != m_rule) config_error("model.m", "conflicts with the growth rule m = floor(c n^gamma)");
      config.model.m = m_rule;
    } else {
      if (!m) config_error("model.m", "missing attribute count and no growth rule");
      config.model.m = *m;
    }
    if (regime.beta && !(*regime.beta > 0.0)) config_error("regime.beta", "must be positive");
    if (regime.beta && regime.kind != RegimeKind::Beta) config_error("regime.beta", "only valid for kind beta");
    config.regime = regime;
  } else {
    if (!m) config_error("model.m", "missing attribute count and no growth rule");
    config.model.m = *m;
  }
  try {
    config.model.validate();
  } catch (const Error& e) {
    config_error("model", e.what());
  }

  config.k_max = read_field<std::size_t>(j, "k_max", "", config.k_max);
  config.r_max = read_field<std::size_t>(j, "r_max", "", config.r_max);
  config.tol = read_field<double>(j, "tol", "", config.tol);
  if (!(config.tol > 0.0)) config_error("tol", "must be positive");
  config.replicas = read_field<std::uint32_t>(j, "replicas", "", config.replicas);
  if (config.replicas < 1) config_error("replicas", "must be >= 1");
  config.threads = read_field<int>(j, "threads", "", config.threads);
  if (config.threads < 1) config_error("threads", "must be >= 1");
  const auto generator = read_field<std::string>(j, "generator", "", "fast");
  if (generator == "fast")
    config.generator = GeneratorKind::Fast;
  else if (generator == "naive")
    config.generator = GeneratorKind::Naive;
  else
    config_error("generator", "must be 'fast' or 'naive'");
  config.pair_cap = read_field<std::uint64_t>(j, "pair_cap", "", config.pair_cap);
  config.out = read_field<std::string>(j, "out", "", config.out.string());

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    auto& tol = config.tolerances;
    tol.degree_tv = read_field<double>(t, "degree_tv", "tolerances.", tol.degree_tv);
    tol.edge_joint_tv = read_field<double>(t, "edge_joint_tv", "tolerances.", tol.edge_joint_tv);
    tol.conditioned_degree_tv = read_field<double>(t, "conditioned_degree_tv", "tolerances.", tol.conditioned_degree_tv);
    tol.common_neighbor_tv = read_field<double>(t, "common_neighbor_tv", "tolerances.", tol.common_neighbor_tv);
    tol.clustering_abs = read_field<double>(t, "clustering_abs", "tolerances.", tol.clustering_abs);
    tol.assortativity_abs = read_field<double>(t, "assortativity_abs", "tolerances.", tol.assortativity_abs);
    tol.isolated_min = read_field<double>(t, "isolated_min", "tolerances.", tol.isolated_min);
  }

  if (j.contains("asymptote")) {
    const json& a = j.at("asymptote");
    auto& asy = config.asymptote;
    try {
      asy.regime = asymptote_regime_from_string(read_field<std::string>(a, "regime", "asymptote.", "lemma3_local"));
    } catch (const Error& e) {
      config_error("asymptote.regime", e.what());
    }
    asy.mixer = read_field<std::string>(a, "mixer", "asymptote.", asy.mixer);
    if (asy.mixer != "p1" && asy.mixer != "p2") config_error("asymptote.mixer", "must be 'p1' or 'p2'");
    asy.scale = read_field<double>(a, "scale", "asymptote.", asy.scale);
    asy.k = read_field<std::size_t>(a, "k", "asymptote.", asy.k);
    if (a.contains("points")) {
      const json& pts = a.at("points");
      if (!pts.is_array()) config_error("asymptote.points", "must be an array");
      for (const auto& p : pts) {
        if (p.is_number()) {
          asy.points.emplace_back(p.get<double>(), 0.0);
        } else if (p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number()) {
          asy.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        } else {
          config_error("asymptote.points", "entries must be numbers or [k1, k2] pairs");
        }
      }
    }
  }
  return config;
}

json to_json(const ExperimentConfig& config) {
  // threads is omitted: outputs do not depend on it.
  json j{{"experiment", to_string(config.experiment)},
         {"model",
          {{"n", config.model.n}, {"m", config.model.m}, {"p1", config.model.p1}, {"p2", config.model.p2}}},
         {"seed", config.model.seed},
         {"k_max", config.k_max},
         {"r_max", config.r_max},
         {"tol", config.tol},
         {"replicas", config.replicas},
         {"generator", config.generator == GeneratorKind::Fast ? "fast" : "naive"},
         {"pair_cap", config.pair_cap},
         {"out", config.out.string()}};
  json regime{{"kind", to_string(config.regime_kind())}};
  const Beta beta = config.analytic_beta();
  if (beta.is_finite()) regime["beta"] = beta.value;
  if (config.regime && config.regime->c) regime["c"] = *config.regime->c;
  if (config.regime && config.regime->gamma) regime["gamma"] = *config.regime->gamma;
  j["regime"] = regime;
  const auto& t = config.tolerances;
  j["tolerances"] = {{"degree_tv", t.degree_tv},
                     {"edge_joint_tv", t.edge_joint_tv},
                     {"conditioned_degree_tv", t.conditioned_degree_tv},
                     {"common_neighbor_tv", t.common_neighbor_tv},
                     {"clustering_abs", t.clustering_abs},
                     {"assortativity_abs", t.assortativity_abs},
                     {"isolated_min", t.isolated_min}};
  if (config.experiment == ExperimentKind::Asymptote) {
    json points = json::array();
    for (const auto& [a, b] : config.asymptote.points) points.push_back({a, b});
    j["asymptote"] = {{"regime", to_string(config.asymptote.regime)},
                      {"mixer", config.asymptote.mixer},
                      {"scale", config.asymptote.scale},
                      {"k", config.asymptote.k},
                      {"points", points}};
  }
  return j;
}

AnalyticLaws analytic_laws(const ExperimentConfig& config) {
  const Beta beta = config.analytic_beta();
  const WeightSpec& p1 = config.model.p1;
  const WeightSpec& p2 = config.model.p2;
  AnalyticLaws laws{Moments::of(p1, p2, beta), Pmf::point_mass(0, "degree"), {}, {}, {}, {}, {}, {}};
  const std::size_t k_max = config.k_max;
  const std::size_t reach = std::max(config.r_max, k_max) + 2;

  if (beta.kind == Beta::Kind::Zero) return laws;

  const LambdaSpecs specs = lambda_specs(p1, p2, beta);
  if (beta.kind == Beta::Kind::Infinity) {
    const LambdaSpec& l3 = lambda3_of(specs);
    const Pmf lambda3 = mixed_poisson_pmf(l3.mixer, l3.scale, reach, config.tol);
    laws.degree = lambda3.truncated(config.r_max);
    laws.degree.label = "degree";
    laws.edge_joint = p_infty_joint(lambda3, l3.mean, k_max);
    laws.conditioned_degree = tilde_p(lambda3, l3.mean);
    return laws;
  }

  const Moments& mo = laws.moments;
  const Pmf lambda0 = mixed_poisson_pmf(specs.lambda0->mixer, specs.lambda0->scale, reach, config.tol);
  laws.tau = tau_pmf(lambda0, specs.lambda0->mean);
  laws.degree = dstar_pmf(p2, *laws.tau, mo.a1, beta, config.r_max, config.tol);
  laws.q = q_seq(p2, *laws.tau, mo.a1, beta, k_max, config.tol);
  laws.edge_joint = p_beta_joint(lambda0, *laws.q, mo, k_max);

  // Marginal of p_beta: the k2 sum of q_{k2-r} is the full q mass b1.
  const double scale = beta.value / (std::pow(mo.b1, 4.0) * mo.a2);
  std::vector<double> weight(k_max + 1);
  for (std::size_t r = 0; r <= k_max; ++r) weight[r] = static_cast<double>((r + 1) * (r + 2)) * lambda0.probs[r + 2];
  Pmf conditioned{std::vector<double>(k_max + 2, 0.0), 0.0, "conditioned_degree"};
  for (std::size_t k = 0; k <= k_max; ++k) {
    double acc = 0.0;
    for (std::size_t r = 0; r <= k; ++r) acc += weight[r] * laws.q->q[k - r];
    conditioned.probs[k + 1] = scale * mo.b1 * acc;
  }
  conditioned.residual = std::max(0.0, 1.0 - conditioned.core_mass());
  laws.conditioned_degree = conditioned;

  Pmf common{std::vector<double>(k_max + 1, 0.0), 0.0, "common_neighbor"};
  const double norm = beta.value / (mo.a2 * mo.b1 * mo.b1);
  for (std::size_t r = 0; r <= k_max; ++r) common.probs[r] = norm * weight[r];
  common.residual = std::max(0.0, 1.0 - common.core_mass());
  laws.common_neighbor = common;

  if (std::isfinite(mo.a3) && std::isfinite(mo.b2)) laws.clustering = clustering_limit(mo);
  return laws;
}

EmpiricalReport simulate_replicas(const ExperimentConfig& config, std::ostream& log) {
  const auto replicas = static_cast<std::int64_t>(config.replicas);
  std::vector<EmpiricalReport> reports(config.replicas);
  std::vector<std::exception_ptr> failures(config.replicas);

#pragma omp parallel for schedule(dynamic, 1) num_threads(config.threads)
  for (std::int64_t r = 0; r < replicas; ++r) {
    try {
      ModelParams params = config.model;
      params.seed = replica_seed(config.model.seed, static_cast<std::uint64_t>(r));
      const BipartiteIncidence incidence =
          config.generator == GeneratorKind::Fast ? generate_fast(params) : generate_naive(params);
      reports[static_cast<std::size_t>(r)] = analyze(build_intersection(incidence, config.pair_cap));
    } catch (...) {
      failures[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  EmpiricalReport pooled;
  for (const auto& report : reports) pooled.merge(report);
  log << "simulated " << config.replicas << " replicas of n=" << config.model.n << " m=" << config.model.m << ", "
      << pooled.edge_count() << " edges in total\n";
  return pooled;
}

std::vector<ComparisonRow> compare_report(const EmpiricalReport& report, const AnalyticLaws& laws,
                                          const ExperimentConfig& config) {
  const Tolerances& tol = config.tolerances;
  std::vector<ComparisonRow> rows;
  auto add_tv = [&](const std::string& name, const Pmf& emp, const Pmf& ana, std::size_t r_max, double limit) {
    const double tv = lumped_tv(emp, ana, r_max);
    rows.push_back({name, weighted_mean(emp), weighted_mean(ana), tv, limit, tv <= limit});
  };

  add_tv("degree_tv", report.degree_pmf(), laws.degree, config.r_max, tol.degree_tv);
  const bool has_edges = report.ordered_edge_count > 0;
  if (laws.edge_joint && has_edges) {
    const JointPmf emp = report.edge_joint(config.k_max);
    const double tv = lumped_tv(emp, *laws.edge_joint, config.k_max);
    rows.push_back({"edge_joint_tv", emp.core_mass(), laws.edge_joint->core_mass(), tv, tol.edge_joint_tv,
                    tv <= tol.edge_joint_tv});
  }
  if (laws.conditioned_degree && has_edges)
    add_tv("conditioned_degree_tv", report.conditioned_degree_pmf(), *laws.conditioned_degree, config.k_max + 1,
           tol.conditioned_degree_tv);
  if (laws.common_neighbor && has_edges)
    add_tv("common_neighbor_tv", report.common_neighbor_pmf(), *laws.common_neighbor, config.k_max,
           tol.common_neighbor_tv);
  if (laws.clustering && report.path_count > 0) {
    const double emp = report.clustering();
    const double diff = std::abs(emp - *laws.clustering);
    rows.push_back({"clustering_abs", emp, *laws.clustering, diff, tol.clustering_abs, diff <= tol.clustering_abs});
  }
  if (config.regime_kind() == RegimeKind::Infinity && has_edges) {
    const double emp = report.assortativity();
    rows.push_back({"assortativity_abs", emp, 0.0, std::abs(emp), tol.assortativity_abs,
                    std::abs(emp) <= tol.assortativity_abs});
  }
  if (config.regime_kind() == RegimeKind::Zero) {
    const double emp = report.isolated_fraction();
    rows.push_back({"isolated_fraction", emp, 1.0, emp, tol.isolated_min, emp >= tol.isolated_min});
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "quantity,empirical,analytic,tv_or_ratio,tolerance,pass\n";
  for (const auto& row : rows)
    out << row.quantity << ',' << format_double(row.empirical) << ',' << format_double(row.analytic) << ','
        << format_double(row.tv_or_ratio) << ',' << format_double(row.tolerance) << ','
        << (row.pass ? "true" : "false") << '\n';
}

namespace {

json laws_summary(const AnalyticLaws& laws) {
  const Moments& m = laws.moments;
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j{{"moments",
          {{"a1", finite_or_null(m.a1)},
           {"a2", finite_or_null(m.a2)},
           {"a3", finite_or_null(m.a3)},
           {"b1", finite_or_null(m.b1)},
           {"b2", finite_or_null(m.b2)}}},
         {"degree_residual", laws.degree.residual}};
  j["clustering_limit"] = laws.clustering ? json(*laws.clustering) : json(nullptr);
  if (laws.edge_joint) j["edge_joint_residual"] = laws.edge_joint->residual;
  if (laws.q) j["q"] = to_json(*laws.q);
  return j;
}

void write_laws(const std::filesystem::path& dir, const AnalyticLaws& laws) {
  write_file(dir / "degree_pmf.csv", [&](std::ostream& o) { write_csv(o, laws.degree); });
  if (laws.edge_joint) write_file(dir / "edge_joint.csv", [&](std::ostream& o) { write_csv(o, *laws.edge_joint); });
  if (laws.conditioned_degree)
    write_file(dir / "conditioned_degree.csv", [&](std::ostream& o) { write_csv(o, *laws.conditioned_degree); });
  if (laws.common_neighbor)
    write_file(dir / "common_neighbor.csv", [&](std::ostream& o) { write_csv(o, *laws.common_neighbor); });
  if (laws.tau) write_file(dir / "tau.csv", [&](std::ostream& o) { write_csv(o, *laws.tau); });
}

void write_report(const std::filesystem::path& dir, const EmpiricalReport& report, std::size_t k_max) {
  write_file(dir / "report.json", [&](std::ostream& o) { o << report.to_json(k_max).dump(2) << '\n'; });
  write_file(dir / "degree_histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, report.degree_counts); });
  if (report.ordered_edge_count > 0)
    write_file(dir / "empirical_edge_joint.csv", [&](std::ostream& o) { write_csv(o, report.edge_joint(k_max)); });
}

struct AsymptoteRow {
  double k1, k2, exact, predicted;
};

json run_asymptote(const ExperimentConfig& config) {
  const AsymptoteConfig& asy = config.asymptote;
  if (asy.points.empty()) config_error("asymptote.points", "no evaluation points");
  const Beta beta = config.analytic_beta();
  const Moments moments = Moments::of(config.model.p1, config.model.p2, beta);
  const std::size_t top = max_point(asy.points);
  AsymptoteParams params;
  params.moments = moments;
  params.k = asy.k;
  params.scale = asy.scale;
  if (const auto* d = config.model.p1.as<Degenerate>()) params.x = d->x;

  std::optional<QSeq> q;
  std::function<double(double, double)> exact;
  try {
    switch (asy.regime) {
      case AsymptoteRegime::Remark0I:
      case AsymptoteRegime::Remark0II: {
        params.tail = tail_of(asy.regime == AsymptoteRegime::Remark0I ? config.model.p1 : config.model.p2,
                              asy.regime == AsymptoteRegime::Remark0I ? "X" : "Y");
        const auto specs = lambda_specs(config.model.p1, config.model.p2, beta);
        const LambdaSpec& l0 = lambda0_of(specs);
        const Pmf lambda0 = mixed_poisson_pmf(l0.mixer, l0.scale, top + 2, config.tol);
        const Pmf tau = tau_pmf(lambda0, l0.mean);
        const Pmf dstar = dstar_pmf(config.model.p2, tau, moments.a1, beta, top, config.tol);
        exact = [dstar](double r, double) { return dstar[static_cast<std::size_t>(r)]; };
        break;
      }
      case AsymptoteRegime::Cor1I: {
        params.tail = tail_of(config.model.p2, "Y");
        const auto specs = lambda_specs(config.model.p1, config.model.p2, beta);
        const LambdaSpec& l3 = lambda3_of(specs);
        const Pmf lambda3 = mixed_poisson_pmf(l3.mixer, l3.scale, top + 2, config.tol);
        const Pmf tp = tilde_p(lambda3, l3.mean);
        exact = [tp](double k1, double k2) {
          return tp[static_cast<std::size_t>(k1) + 1] * tp[static_cast<std::size_t>(k2) + 1];
        };
        break;
      }
      case AsymptoteRegime::Cor1IIFar:
      case AsymptoteRegime::Cor1IINear:
      case AsymptoteRegime::Cor1III: {
        params.tail = tail_of(asy.regime == AsymptoteRegime::Cor1III ? config.model.p2 : config.model.p1,
                              asy.regime == AsymptoteRegime::Cor1III ? "Y" : "X");
        const std::size_t reach = std::max(top, config.r_max);
        const auto specs = lambda_specs(config.model.p1, config.model.p2, beta);
        const LambdaSpec& l0 = lambda0_of(specs);
        const Pmf lambda0 = mixed_poisson_pmf(l0.mixer, l0.scale, reach + 2, config.tol);
        const Pmf tau = tau_pmf(lambda0, l0.mean);
        q = q_seq(config.model.p2, tau, moments.a1, beta, reach, config.tol);
        const JointPmf joint = p_beta_joint(lambda0, *q, moments, top);
        exact = [joint](double k1, double k2) {
          return joint(static_cast<std::size_t>(k1), static_cast<std::size_t>(k2));
        };
        break;
      }
      case AsymptoteRegime::Lemma3Local:
      case AsymptoteRegime::Lemma3Tail: {
        const WeightSpec& mixer = asy.mixer == "p1" ? config.model.p1 : config.model.p2;
        params.tail = tail_of(mixer, "mixer");
        const WeightSpec mix = mixer;
        const double scale = asy.scale;
        const double tol = config.tol;
        if (asy.regime == AsymptoteRegime::Lemma3Local) {
          const Pmf pmf = mixed_poisson_pmf(mix, scale, top, tol);
          exact = [pmf](double r, double) { return pmf[static_cast<std::size_t>(r)]; };
        } else {
          exact = [mix, scale, tol](double t, double) {
            return mixed_poisson_pmf(mix, scale, static_cast<std::size_t>(std::floor(t)), tol).residual;
          };
        }
        break;
      }
      case AsymptoteRegime::TauTail:
      case AsymptoteRegime::QTail: {
        params.tail = tail_of(config.model.p1, "X");
        const auto specs = lambda_specs(config.model.p1, config.model.p2, beta);
        const LambdaSpec& l0 = lambda0_of(specs);
        const Pmf lambda0 = mixed_poisson_pmf(l0.mixer, l0.scale, top + 2, config.tol);
        const Pmf tau = tau_pmf(lambda0, l0.mean);
        if (asy.regime == AsymptoteRegime::TauTail) {
          exact = [tau](double r, double) { return tau[static_cast<std::size_t>(r)]; };
        } else {
          const QSeq qs = q_seq(config.model.p2, tau, moments.a1, beta, top, config.tol);
          exact = [qs](double r, double) { return qs.q[static_cast<std::size_t>(r)]; };
        }
        break;
      }
    }
    if (q) params.q = &*q;
    const AsymptotePrediction prediction = asymptote(asy.regime, params);

    std::vector<AsymptoteRow> rows;
    for (const auto& [a, b] : asy.points) {
      const double k2 = asy.regime == AsymptoteRegime::Cor1IINear ? a + static_cast<double>(asy.k) : b;
      rows.push_back({a, k2, exact(a, k2), prediction.evaluate(a, k2)});
    }
    write_file(config.out / "asymptote.csv", [&](std::ostream& o) {
      o << "k1,k2,exact,predicted,ratio\n";
      for (const auto& row : rows)
        o << format_double(row.k1) << ',' << format_double(row.k2) << ',' << format_double(row.exact) << ','
          << format_double(row.predicted) << ',' << format_double(row.exact / row.predicted) << '\n';
    });
    json points = json::array();
    for (const auto& row : rows)
      points.push_back({{"k1", row.k1}, {"k2", row.k2}, {"exact", row.exact}, {"predicted", row.predicted},
                        {"ratio", row.exact / row.predicted}});
    return {{"prediction", to_json(prediction)}, {"points", points}};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnsupportedRegime) throw Error(ErrorCode::RegimeMismatch, e.what());
    throw;
  }
}

}  // namespace

RunResult run(const ExperimentConfig& config, std::ostream& log) {
  std::filesystem::create_directories(config.out);
  json summary{{"config", to_json(config)}};
  int exit_code = 0;

  auto laws_or_mismatch = [&] {
    try {
      return analytic_laws(config);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::UnsupportedRegime) throw Error(ErrorCode::RegimeMismatch, e.what());
      throw;
    }
  };

  switch (config.experiment) {
    case ExperimentKind::Analytic: {
      const AnalyticLaws laws = laws_or_mismatch();
      write_laws(config.out, laws);
      summary["analytic"] = laws_summary(laws);
      break;
    }
    case ExperimentKind::Simulate: {
      const EmpiricalReport report = simulate_replicas(config, log);
      write_report(config.out, report, config.k_max);
      summary["empirical"] = {{"replica_count", report.replica_count}, {"edge_count", report.edge_count()}};
      break;
    }
    case ExperimentKind::Compare: {
      const AnalyticLaws laws = laws_or_mismatch();
      const EmpiricalReport report = simulate_replicas(config, log);
      write_laws(config.out, laws);
      write_report(config.out, report, config.k_max);
      const auto rows = compare_report(report, laws, config);
      write_file(config.out / "comparison.csv", [&](std::ostream& o) { write_comparison_csv(o, rows); });
      bool all_pass = true;
      json table = json::array();
      for (const auto& row : rows) {
        all_pass = all_pass && row.pass;
        table.push_back({{"quantity", row.quantity},
                         {"empirical", row.empirical},
                         {"analytic", row.analytic},
                         {"tv_or_ratio", row.tv_or_ratio},
                         {"tolerance", row.tolerance},
                         {"pass", row.pass}});
        log << row.quantity << ": " << row.tv_or_ratio << " (tolerance " << row.tolerance << ") "
            << (row.pass ? "pass" : "FAIL") << '\n';
      }
      summary["analytic"] = laws_summary(laws);
      summary["comparisons"] = table;
      summary["pass"] = all_pass;
      if (!all_pass) exit_code = 2;
      break;
    }
    case ExperimentKind::Oracle: {
      const ExactLaw law = enumerate_exact(config.model);
      write_file(config.out / "oracle_joint.csv", [&](std::ostream& o) { write_csv(o, law.conditional_joint); });
      summary["oracle"] = {{"p_adjacent", law.p_adjacent},
                           {"clustering", law.clustering ? json(*law.clustering) : json(nullptr)}};
      log << "P(v1 ~ v2) = " << law.p_adjacent << '\n';
      break;
    }
    case ExperimentKind::Asymptote: {
      summary["asymptote"] = run_asymptote(config);
      break;
    }
  }

  write_file(config.out / "summary.json", [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
  return {exit_code, summary};
}

}  // namespace rig
