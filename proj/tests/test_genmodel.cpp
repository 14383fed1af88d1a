#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "rig/error.hpp"
#include "rig/genmodel.hpp"
#include "rig/stats.hpp"

using namespace rig;

namespace {

ModelParams params_of(std::uint32_t n, std::uint32_t m, WeightSpec p1, WeightSpec p2, std::uint64_t seed) {
  ModelParams p;
  p.n = n;
  p.m = m;
  p.p1 = std::move(p1);
  p.p2 = std::move(p2);
  p.seed = seed;
  return p;
}

BipartiteIncidence incidence_of(std::uint32_t n, std::vector<std::vector<VertexId>> members) {
  BipartiteIncidence inc;
  inc.n = n;
  inc.m = static_cast<std::uint32_t>(members.size());
  inc.members = std::move(members);
  inc.x.assign(inc.m, 1.0);
  inc.y.assign(n, 1.0);
  return inc;
}

void check_symmetric(const IntersectionView& v) {
  for (VertexId u = 0; u < v.n; ++u)
    for (VertexId w : v.neighbors_of(u)) {
      REQUIRE(w != u);
      REQUIRE(v.adjacent(w, u));
    }
}

Pmf pooled_degrees(bool fast, const ModelParams& base, int replicas) {
  std::vector<std::uint64_t> counts;
  for (int r = 0; r < replicas; ++r) {
    ModelParams p = base;
    p.seed = replica_seed(base.seed, static_cast<std::uint64_t>(r));
    const auto inc = fast ? generate_fast(p) : generate_naive(p);
    for (auto d : build_intersection(inc).degrees()) {
      if (d >= counts.size()) counts.resize(d + 1, 0);
      ++counts[d];
    }
  }
  return Pmf::from_counts(counts);
}

}  // namespace

TEST_CASE("zero attribute weights give an empty incidence") {
  const auto p = params_of(50, 40, WeightSpec::degenerate(0.0), WeightSpec::exponential(1.0), 3);
  CHECK(generate_naive(p).link_count() == 0);
  CHECK(generate_fast(p).link_count() == 0);
}

TEST_CASE("weights with lambda >= 1 link every pair") {
  const auto p = params_of(30, 20, WeightSpec::degenerate(100.0), WeightSpec::degenerate(100.0), 5);
  CHECK(generate_naive(p).link_count() == 600);
  CHECK(generate_fast(p).link_count() == 600);
  const auto mixed = params_of(40, 40, WeightSpec::degenerate(50.0),
                               WeightSpec::finite({0.01, 1.0, 3.0}, {0.4, 0.3, 0.3}), 7);
  const auto inc = generate_fast(mixed);
  for (const auto& list : inc.members)
    for (VertexId j = 0; j < 40; ++j)
      if (inc.y[j] >= 1.0) CHECK(std::binary_search(list.begin(), list.end(), j));
}

TEST_CASE("single link frequency is 1/sqrt(2)") {
  for (bool fast : {false, true}) {
    CAPTURE(fast);
    const int seeds = 100000;
    int hits = 0;
    for (int s = 0; s < seeds; ++s) {
      const auto p = params_of(2, 1, WeightSpec::degenerate(1.0), WeightSpec::degenerate(1.0), 1000 + s);
      const auto inc = fast ? generate_fast(p) : generate_naive(p);
      hits += std::binary_search(inc.members[0].begin(), inc.members[0].end(), 0u);
    }
    CHECK(std::abs(static_cast<double>(hits) / seeds - 1.0 / std::sqrt(2.0)) <= 0.005);
  }
}

TEST_CASE("naive size guard") {
  const auto p = params_of(20000, 10000, WeightSpec::degenerate(1.0), WeightSpec::degenerate(1.0), 1);
  try {
    generate_naive(p);
    FAIL("expected SizeGuard");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeGuard);
  }
}

TEST_CASE("invalid model parameters") {
  CHECK_THROWS_AS(generate_fast(params_of(1, 1, WeightSpec::degenerate(1.0), WeightSpec::degenerate(1.0), 1)), Error);
  CHECK_THROWS_AS(generate_fast(params_of(5, 0, WeightSpec::degenerate(1.0), WeightSpec::degenerate(1.0), 1)), Error);
}

TEST_CASE("per-attribute link count matches its expectation") {
  // For each attribute the count is a sum of independent Bernoullis given the weights.
  const auto p = params_of(20000, 5000, WeightSpec::pareto(1.0, 3.5), WeightSpec::exponential(1.0), 11);
  const auto inc = generate_fast(p);
  const double inv_root = 1.0 / std::sqrt(20000.0 * 5000.0);
  double observed = 0.0, expected = 0.0, variance = 0.0;
  for (std::uint32_t i = 0; i < p.m; ++i) {
    observed += static_cast<double>(inc.members[i].size());
    for (double y : inc.y) {
      const double q = std::min(1.0, inc.x[i] * y * inv_root);
      expected += q;
      variance += q * (1.0 - q);
    }
  }
  CHECK(std::abs(observed - expected) <= 4.0 * std::sqrt(variance));

  // One attribute with a fixed weight across many seeds.
  double sum = 0.0, sum_expected = 0.0, var = 0.0;
  for (int s = 0; s < 200; ++s) {
    const auto q = params_of(2000, 1, WeightSpec::degenerate(3.0), WeightSpec::exponential(1.0), 500 + s);
    const auto one = generate_fast(q);
    sum += static_cast<double>(one.members[0].size());
    for (double y : one.y) {
      const double pr = std::min(1.0, 3.0 * y / std::sqrt(2000.0));
      sum_expected += pr;
      var += pr * (1.0 - pr);
    }
  }
  CHECK(std::abs(sum - sum_expected) <= 4.0 * std::sqrt(var));
}

TEST_CASE("incidence lists are sorted and in range") {
  const auto p = params_of(3000, 3000, WeightSpec::pareto(1.0, 2.5), WeightSpec::pareto(1.0, 2.5), 17);
  for (const auto& inc : {generate_fast(p), generate_naive(p)})
    for (const auto& list : inc.members) {
      CHECK(std::is_sorted(list.begin(), list.end()));
      CHECK(std::adjacent_find(list.begin(), list.end()) == list.end());
      if (!list.empty()) CHECK(list.back() < p.n);
    }
}

TEST_CASE("fast and naive generators agree in distribution") {
  const auto base = params_of(3000, 3000, WeightSpec::pareto(1.0, 3.5), WeightSpec::exponential(1.0), 21);
  const Pmf naive = pooled_degrees(false, base, 30);
  ModelParams shifted = base;
  shifted.seed = 99;
  const Pmf fast = pooled_degrees(true, shifted, 30);
  CHECK(lumped_tv(naive, fast, 40) <= 0.015);

  // Degenerate Y: one bucket with a tight envelope.
  const auto unit = params_of(3000, 3000, WeightSpec::degenerate(1.0), WeightSpec::degenerate(1.0), 23);
  ModelParams unit_shift = unit;
  unit_shift.seed = 77;
  CHECK(lumped_tv(pooled_degrees(false, unit, 30), pooled_degrees(true, unit_shift, 30), 40) <= 0.015);
}

TEST_CASE("generators are reproducible across thread counts") {
  const auto p = params_of(4000, 3000, WeightSpec::pareto(1.0, 3.0), WeightSpec::exponential(1.0), 31);
  CHECK(generate_naive(p, 1).members == generate_naive(p, 4).members);
  CHECK(generate_fast(p, 1).members == generate_fast(p, 4).members);
  const auto inc = generate_fast(p);
  const auto v1 = build_intersection(inc, kDefaultPairCap, 1);
  const auto v4 = build_intersection(inc, kDefaultPairCap, 4);
  CHECK(v1.offsets == v4.offsets);
  CHECK(v1.neighbors == v4.neighbors);
  CHECK(v1.witnesses == v4.witnesses);
  auto q = p;
  q.seed = 32;
  CHECK(generate_fast(q).members != generate_fast(p).members);
}

TEST_CASE("intersection of one attribute is a triangle") {
  const auto view = build_intersection(incidence_of(3, {{0, 1, 2}}));
  CHECK(view.degrees() == std::vector<std::uint32_t>{2, 2, 2});
  CHECK(view.edge_count() == 3);
  check_symmetric(view);
}

TEST_CASE("two overlapping attributes give a path") {
  const auto view = build_intersection(incidence_of(3, {{0, 1}, {1, 2}}));
  CHECK(view.degrees() == std::vector<std::uint32_t>{1, 2, 1});
  CHECK(view.adjacent(0, 1));
  CHECK_FALSE(view.adjacent(0, 2));
  const auto n0 = view.neighbors_of(0);
  const auto n2 = view.neighbors_of(2);
  std::vector<VertexId> common;
  std::set_intersection(n0.begin(), n0.end(), n2.begin(), n2.end(), std::back_inserter(common));
  CHECK(common == std::vector<VertexId>{1});
}

TEST_CASE("disjoint singletons give an empty graph") {
  const auto view = build_intersection(incidence_of(4, {{0}, {1}, {3}, {}}));
  CHECK(view.degrees() == std::vector<std::uint32_t>{0, 0, 0, 0});
  CHECK(view.edge_count() == 0);
}

TEST_CASE("witness counts and deduplication") {
  const auto view = build_intersection(incidence_of(3, {{0, 1}, {0, 1, 2}, {0, 1}}));
  CHECK(view.degrees() == std::vector<std::uint32_t>{2, 2, 2});
  const auto nb = view.neighbors_of(0);
  REQUIRE(nb.size() == 2);
  CHECK(nb[0] == 1);
  CHECK(view.witnesses[view.offsets[0]] == 3);
  CHECK(view.witnesses[view.offsets[0] + 1] == 1);
}

TEST_CASE("pair cap") {
  try {
    build_intersection(incidence_of(10, {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}), 50);
    FAIL("expected CapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
    CHECK(std::string(e.what()).find("10") != std::string::npos);
  }
}

TEST_CASE("random intersection views are symmetric") {
  const auto p = params_of(2000, 2000, WeightSpec::pareto(1.0, 2.5), WeightSpec::pareto(1.0, 3.0), 41);
  const auto view = build_intersection(generate_fast(p));
  check_symmetric(view);
  const auto d = view.degrees();
  CHECK(std::accumulate(d.begin(), d.end(), std::uint64_t{0}) == 2 * view.edge_count());
}

TEST_CASE("view from an edge list") {
  const std::vector<std::pair<VertexId, VertexId>> edges{{0, 1}, {1, 0}, {2, 2}, {1, 2}};
  const auto view = IntersectionView::from_edges(4, edges);
  CHECK(view.degrees() == std::vector<std::uint32_t>{1, 2, 1, 0});
  check_symmetric(view);
}

TEST_CASE("exact enumeration of a single pair") {
  const auto law = enumerate_exact(params_of(2, 1, WeightSpec::degenerate(1.0), WeightSpec::degenerate(1.0), 1));
  CHECK(law.p_adjacent == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(law.conditional_joint.at(0, 0) == doctest::Approx(1.0));
  CHECK_FALSE(law.clustering.has_value());
}

TEST_CASE("exact enumeration with clipped links") {
  const auto law = enumerate_exact(params_of(3, 1, WeightSpec::degenerate(10.0), WeightSpec::degenerate(10.0), 1));
  CHECK(law.p_adjacent == doctest::Approx(1.0));
  CHECK(law.conditional_joint.at(1, 1) == doctest::Approx(1.0));
  REQUIRE(law.clustering.has_value());
  CHECK(*law.clustering == doctest::Approx(1.0));
}

TEST_CASE("exact enumeration of n=3, m=2 against a hand count") {
  // Each attribute links each vertex w.p. p = 1/sqrt(6); P(1~2) = 1 - (1 - p^2)^2.
  const double p = 1.0 / std::sqrt(6.0);
  const auto law = enumerate_exact(params_of(3, 2, WeightSpec::degenerate(1.0), WeightSpec::degenerate(1.0), 1));
  CHECK(law.p_adjacent == doctest::Approx(1.0 - std::pow(1.0 - p * p, 2)).epsilon(1e-12));
  CHECK(law.conditional_joint.core_mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      CHECK(law.conditional_joint.at(a, b) == doctest::Approx(law.conditional_joint.at(b, a)).epsilon(1e-12));
  REQUIRE(law.clustering.has_value());
  CHECK(*law.clustering > 0.0);
  CHECK(*law.clustering <= 1.0);
}

TEST_CASE("exact enumeration with mixed finite weights sums to one") {
  const auto law = enumerate_exact(params_of(3, 2, WeightSpec::finite({0.5, 2.0}, {0.5, 0.5}),
                                             WeightSpec::finite({1.0, 3.0}, {0.7, 0.3}), 1));
  CHECK(law.conditional_joint.core_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(law.p_adjacent > 0.0);
  CHECK(law.p_adjacent < 1.0);
}

TEST_CASE("enumeration guards") {
  try {
    enumerate_exact(params_of(6, 5, WeightSpec::degenerate(1.0), WeightSpec::degenerate(1.0), 1));
    FAIL("expected StateGuard");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StateGuard);
  }
  CHECK_THROWS_AS(enumerate_exact(params_of(3, 2, WeightSpec::exponential(1.0), WeightSpec::degenerate(1.0), 1)),
                  Error);
}

TEST_CASE("csv dumps") {
  const auto inc = incidence_of(3, {{0, 2}, {1}});
  std::ostringstream s;
  write_incidence_csv(s, inc);
  CHECK(s.str() == "attribute_id,vertex_id\n0,0\n0,2\n1,1\n");
  std::ostringstream w;
  const std::vector<double> weights{1.5, 2.0};
  write_weights_csv(w, weights);
  CHECK(w.str().rfind("id,weight\n", 0) == 0);
}
