// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rig/analytic.hpp"
#include "rig/error.hpp"
#include "rig/experiment.hpp"
#include "rig/genmodel.hpp"
#include "rig/stats.hpp"

using namespace rig;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

int worker_count() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

struct Outcome {
  bool pass;
  std::string detail;
};

// Pooled replicas plus the regime's limiting laws.
struct Experiment {
  ExperimentConfig config;
  AnalyticLaws laws;
  EmpiricalReport report;

  double row(const std::string& name) const {
    for (const auto& r : compare_report(report, laws, config))
      if (r.quantity == name) return r.tv_or_ratio;
    throw Error(ErrorCode::InvalidSpec, "no comparison row " + name);
  }
};

Experiment simulate(json j) {
  j["threads"] = worker_count();
  j["experiment"] = "compare";
  Experiment e;
  e.config = parse_config(j);
  e.laws = analytic_laws(e.config);
  std::ostringstream quiet;
  e.report = simulate_replicas(e.config, quiet);
  return e;
}

json unit_beta(std::uint32_t n, std::uint32_t replicas, std::uint64_t seed) {
  return {{"model", {{"n", n}}},
          {"regime", {{"kind", "beta"}, {"gamma", 1}}},
          {"k_max", 30},
          {"r_max", 100},
          {"replicas", replicas},
          {"seed", seed}};
}

Pmf pooled_degrees(bool fast, ModelParams params, int replicas) {
  std::vector<std::uint64_t> counts;
  const std::uint64_t base = params.seed;
  for (int r = 0; r < replicas; ++r) {
    params.seed = replica_seed(base, static_cast<std::uint64_t>(r));
    const auto incidence = fast ? generate_fast(params, worker_count()) : generate_naive(params, worker_count());
    for (auto d : build_intersection(incidence, kDefaultPairCap, worker_count()).degrees()) {
      if (d >= counts.size()) counts.resize(d + 1, 0);
      ++counts[d];
    }
  }
  return Pmf::from_counts(counts);
}

// Beta-regime experiments shared by criteria 2, 4 and 6.
const std::vector<Experiment>& beta_runs() {
  static const std::vector<Experiment> runs = [] {
    std::vector<Experiment> out;
    std::uint64_t seed = 2001;
    for (std::uint32_t n : {1000u, 10000u, 100000u}) out.push_back(simulate(unit_beta(n, 20, seed++)));
    return out;
  }();
  return runs;
}

// m = n^1.5 experiment shared by criteria 3 and 7.
const Experiment& infinity_run() {
  static const Experiment run = simulate({{"model",
                                           {{"n", 10000},
                                            {"p1", {{"variant", "pareto"}, {"t0", 1}, {"kappa", 4}}},
                                            {"p2", {{"variant", "exponential"}, {"rate", 1}}}}},
                                          {"regime", {{"kind", "infinity"}, {"gamma", 1.5}}},
                                          {"k_max", 30},
                                          {"r_max", 100},
                                          {"replicas", 20},
                                          {"seed", 3001}});
  return run;
}

Outcome criterion1() {
  ModelParams params;
  params.n = 3;
  params.m = 2;
  const ExactLaw exact = enumerate_exact(params);

  const std::uint64_t replicas = 1'000'000;
  std::vector<std::uint64_t> counts(4, 0);
  std::uint64_t adjacent = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    params.seed = replica_seed(101, r);
    const IntersectionView view = build_intersection(generate_fast(params));
    if (!view.adjacent(0, 1)) continue;
    ++adjacent;
    ++counts[(view.degree(0) - 1) * 2 + (view.degree(1) - 1)];
  }
  JointPmf mc(2, "monte_carlo");
  for (std::size_t k = 0; k < 4; ++k) mc.probs[k] = static_cast<double>(counts[k]) / static_cast<double>(adjacent);
  const double tv = lumped_tv(exact.conditional_joint, mc, 1);
  const double p_hat = static_cast<double>(adjacent) / static_cast<double>(replicas);
  return {tv <= 0.01, "TV(exact, MC) = " + fmt(tv) + " <= 0.01; P(v1~v2) exact " + fmt(exact.p_adjacent, 6) +
                          ", MC " + fmt(p_hat, 6)};
}

Outcome criterion2() {
  const auto& runs = beta_runs();
  std::vector<double> tv;
  for (const auto& e : runs) tv.push_back(e.row("edge_joint_tv"));
  const bool small = tv[2] <= 0.05;
  const bool monotone = tv[1] <= tv[0] + 0.005 && tv[2] <= tv[1] + 0.005;
  return {small && monotone, "edge-joint TV at n=1e3,1e4,1e5: " + fmt(tv[0]) + ", " + fmt(tv[1]) + ", " +
                                 fmt(tv[2]) + " (final <= 0.05, non-increasing within 0.005)"};
}

Outcome criterion3() {
  const Experiment& e = infinity_run();
  const double tv = e.row("edge_joint_tv");
  const double r = e.report.assortativity();
  // Diagnostic only: the same coefficient over the k <= 30 window of the joint.
  const double windowed = assortativity(e.report.edge_joint(e.config.k_max));
  return {tv <= 0.05 && std::abs(r) <= 0.02,
          "m=" + std::to_string(e.config.model.m) + ": TV(edge joint, p_inf) = " + fmt(tv) +
              " <= 0.05; assortativity = " + fmt(r) + ", |r| <= 0.02 (k <= 30 window: " + fmt(windowed) + ")"};
}

Outcome criterion4() {
  const double tv = beta_runs()[2].row("degree_tv");
  return {tv <= 0.02, "n=m=1e5: TV(degree, d*) = " + fmt(tv) + " <= 0.02"};
}

Outcome criterion5() {
  std::vector<double> isolated;
  std::uint64_t seed = 5001;
  for (std::uint32_t n : {10000u, 100000u, 1000000u}) {
    const Experiment e = simulate({{"model", {{"n", n}}},
                                   {"regime", {{"kind", "zero"}, {"gamma", 0.5}}},
                                   {"replicas", 4},
                                   {"seed", seed++}});
    isolated.push_back(e.report.isolated_fraction());
  }
  const bool increasing = isolated[0] < isolated[1] && isolated[1] < isolated[2];
  return {isolated[2] >= 0.95 && increasing, "isolated fraction at n=1e4,1e5,1e6: " + fmt(isolated[0]) + ", " +
                                                 fmt(isolated[1]) + ", " + fmt(isolated[2]) +
                                                 " (final >= 0.95, increasing)"};
}

Outcome criterion6() {
  const Experiment& e = beta_runs()[1];
  const double c = e.report.clustering();
  const double limit = clustering_limit(e.laws.moments);
  return {std::abs(c - 0.5) <= 0.02 && std::abs(limit - 0.5) <= 1e-12,
          "n=m=1e4, 20 replicas: clustering = " + fmt(c) + " (limit " + fmt(limit) + "), |c - 0.5| <= 0.02"};
}

Outcome criterion7() {
  const double tv = infinity_run().row("conditioned_degree_tv");
  return {tv <= 0.05, "m=n^1.5, n=1e4: TV(conditioned degree, p~) = " + fmt(tv) + " <= 0.05"};
}

// Direct convolution: sum_N P(N) f^{*N} for N <= n_max.
std::vector<double> compound_by_convolution(double rate, const std::vector<double>& f, std::size_t r_max, int n_max) {
  std::vector<double> out(r_max + 1, 0.0);
  std::vector<double> power(r_max + 1, 0.0);
  power[0] = 1.0;
  long double pn = std::exp(-static_cast<long double>(rate));
  for (int n = 0; n <= n_max; ++n) {
    for (std::size_t r = 0; r <= r_max; ++r) out[r] += static_cast<double>(pn) * power[r];
    std::vector<double> next(r_max + 1, 0.0);
    for (std::size_t a = 0; a <= r_max; ++a)
      for (std::size_t b = 0; b < f.size() && a + b <= r_max; ++b) next[a + b] += power[a] * f[b];
    power = std::move(next);
    pn *= rate / static_cast<long double>(n + 1);
  }
  return out;
}

Outcome criterion8() {
  double asymmetry = 0.0, mass_error = 0.0, q_error = 0.0;
  const std::size_t k_max = 60;
  for (const auto& [p1, p2, beta] : std::vector<std::tuple<WeightSpec, WeightSpec, double>>{
           {WeightSpec::degenerate(1.0), WeightSpec::degenerate(1.0), 1.0},
           {WeightSpec::pareto(1.0, 3.5), WeightSpec::exponential(1.0), 0.5},
           {WeightSpec::exponential(1.0), WeightSpec::pareto(1.0, 3.5), 2.0},
           {WeightSpec::finite({1.0, 3.0}, {0.6, 0.4}), WeightSpec::discrete_power_law(3.5), 1.0}}) {
    const Beta b = Beta::finite(beta);
    const Moments moments = Moments::of(p1, p2, b);
    const auto specs = lambda_specs(p1, p2, b);
    const Pmf lambda0 = mixed_poisson_pmf(specs.lambda0->mixer, specs.lambda0->scale, k_max + 2);
    const Pmf tau = tau_pmf(lambda0, specs.lambda0->mean);
    const QSeq q = q_seq(p2, tau, moments.a1, b, k_max);
    const JointPmf joint = p_beta_joint(lambda0, q, moments, k_max);
    for (std::size_t a = 0; a <= k_max; ++a)
      for (std::size_t c = 0; c <= k_max; ++c) asymmetry = std::max(asymmetry, std::abs(joint(a, c) - joint(c, a)));
    mass_error = std::max(mass_error, std::abs(joint.core_mass() + joint.residual - 1.0));
    q_error = std::max(q_error, std::abs(q.core_sum() + q.residual - moments.b1));
  }

  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double panjer_error = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> f(1 + rep % 6);
    double total = 0.0;
    for (auto& v : f) total += (v = u(gen));
    for (auto& v : f) v /= total;
    const double rate = 0.1 + 3.0 * u(gen);
    const Pmf panjer = compound_poisson_pmf(rate, Pmf{f, 0.0, "f"}, 50);
    const auto direct = compound_by_convolution(rate, f, 50, 100);
    for (std::size_t r = 0; r <= 50; ++r) panjer_error = std::max(panjer_error, std::abs(panjer[r] - direct[r]));
  }

  std::uniform_int_distribution<int> len(1, 30);
  int lecam_ok = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> p(static_cast<std::size_t>(len(gen)));
    for (auto& x : p) x = u(gen) * u(gen);
    const LeCamResult res = lecam_check(p);
    lecam_ok += res.exact_tv <= res.bound;
  }

  const bool pass = asymmetry == 0.0 && mass_error <= 1e-6 && q_error <= 1e-6 && panjer_error <= 1e-12 &&
                    lecam_ok == 100;
  return {pass, "p_beta asymmetry " + fmt(asymmetry) + "; |mass - 1| " + fmt(mass_error) + "; |sum q - b1| " +
                    fmt(q_error) + "; Panjer vs convolution " + fmt(panjer_error) + "; LeCam " +
                    std::to_string(lecam_ok) + "/100"};
}

Outcome criterion9() {
  const auto z = WeightSpec::pareto(1.0, 3.0);
  const double c = power_law_tail(z)->constant;
  const Pmf pmf = mixed_poisson_pmf(z, 1.0, 1000);
  bool pass = true;
  std::string detail = "r^3 P(Lambda=r)/c at r=";
  for (std::size_t r : {200u, 500u, 1000u}) {
    const double ratio = std::pow(static_cast<double>(r), 3.0) * pmf[r] / c;
    pass = pass && ratio >= 0.9 && ratio <= 1.1;
    detail += std::to_string(r) + ": " + fmt(ratio) + "  ";
  }
  return {pass, detail + "(each in [0.9, 1.1])"};
}

Outcome criterion10() {
  const auto p1 = WeightSpec::exponential(1.0);
  const auto p2 = WeightSpec::pareto(1.0, 3.5);
  const Beta beta = Beta::infinity();
  const auto specs = lambda_specs(p1, p2, beta);
  const std::size_t k = 200;
  const Pmf lambda3 = mixed_poisson_pmf(specs.lambda3->mixer, specs.lambda3->scale, k + 3);
  const JointPmf joint = p_infty_joint(lambda3, specs.lambda3->mean, k);
  AsymptoteParams params;
  params.tail = *power_law_tail(p2);
  params.moments = Moments::of(p1, p2, beta);
  const auto prediction = asymptote(AsymptoteRegime::Cor1I, params);
  const double ratio = joint(k, k) / prediction.evaluate(static_cast<double>(k), static_cast<double>(k));
  return {ratio >= 0.85 && ratio <= 1.15, "X ~ Exp(1): p_inf(200,200)/prediction = " + fmt(ratio) + " in [0.85, 1.15]"};
}

Outcome criterion11() {
  const auto p1 = WeightSpec::degenerate(1.0);
  const auto p2 = WeightSpec::pareto(1.0, 3.0);
  const Beta beta = Beta::finite(1.0);
  const std::size_t r = 300;
  const Moments moments = Moments::of(p1, p2, beta);
  const auto specs = lambda_specs(p1, p2, beta);
  const Pmf lambda0 = mixed_poisson_pmf(specs.lambda0->mixer, specs.lambda0->scale, r + 2);
  const Pmf tau = tau_pmf(lambda0, specs.lambda0->mean);
  const Pmf dstar = dstar_pmf(p2, tau, moments.a1, beta, r);
  AsymptoteParams params;
  params.tail = *power_law_tail(p2);
  params.moments = moments;
  params.x = 1.0;
  const double ratio = dstar[r] / asymptote(AsymptoteRegime::Remark0II, params).evaluate(static_cast<double>(r));
  return {ratio >= 0.85 && ratio <= 1.15, "r^kappa P(d*=300)/constant = " + fmt(ratio) + " in [0.85, 1.15]"};
}

Outcome criterion12() {
  const auto specs = lambda_specs(WeightSpec::degenerate(1.0), WeightSpec::pareto(1.0, 3.5), Beta::finite(1.0));
  const Pmf lambda3 = mixed_poisson_pmf(specs.lambda3->mixer, specs.lambda3->scale, 500);
  const SlopeFit fit = tail_slope_fit(lambda3, 50, 500);
  return {std::abs(fit.slope + 3.5) <= 0.15,
          "slope over [50, 500] = " + fmt(fit.slope) + " (stderr " + fmt(fit.stderr) + "), target -3.5 +- 0.15"};
}

Outcome criterion13() {
  ModelParams params;
  params.n = 10000;
  params.m = 10000;
  params.p1 = WeightSpec::pareto(1.0, 3.5);
  params.p2 = WeightSpec::exponential(1.0);
  params.seed = 13001;
  const Pmf naive = pooled_degrees(false, params, 100);
  params.seed = 13002;
  const Pmf fast = pooled_degrees(true, params, 100);
  const double tv = lumped_tv(naive, fast, std::max(naive.size(), fast.size()));

  ModelParams big;
  big.n = 1'000'000;
  big.m = 1'000'000;
  big.seed = 13003;
  const auto start = Clock::now();
  const auto incidence = generate_fast(big, worker_count());
  const double generate_s = seconds_since(start);
  const auto view = build_intersection(incidence, kDefaultPairCap, worker_count());
  const double total_s = seconds_since(start);
  return {tv <= 0.01 && generate_s < 60.0,
          "TV(naive, fast) at n=m=1e4 = " + fmt(tv) + " <= 0.01; n=m=1e6 fast generation " + fmt(generate_s, 3) +
              " s (with intersection " + fmt(total_s, 3) + " s, " + std::to_string(view.edge_count()) +
              " edges) < 60 s on " + std::to_string(worker_count()) + " thread(s)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact enumeration vs Monte Carlo, n=3 m=2", criterion1},
      {"edge joint vs p_beta, unit weights", criterion2},
      {"edge joint vs p_inf and assortativity, m=n^1.5", criterion3},
      {"degree pmf vs d*, n=m=1e5", criterion4},
      {"isolated fraction, m=sqrt(n)", criterion5},
      {"clustering, unit weights", criterion6},
      {"conditioned degree vs p~, m=n^1.5", criterion7},
      {"analytic identities", criterion8},
      {"mixed Poisson local tail, Pareto(1,3)", criterion9},
      {"p_inf diagonal tail, Pareto Y(3.5)", criterion10},
      {"d* tail, X=1 and Pareto Y(3)", criterion11},
      {"Lambda3 tail slope, Pareto Y(3.5)", criterion12},
      {"naive vs fast generator and fast scaling", criterion13},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failures += !outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " | "
              << outcome.detail << " | " << fmt(seconds_since(start), 3) << " s" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
