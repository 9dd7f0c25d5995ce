#include "sketchopt/errors.hpp"
#include "sketchopt/nsga2.hpp"
#include "support.hpp"

#include <doctest.h>

#include <limits>
#include <set>

using namespace sketchopt;
using namespace sketchopt::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Individual ind(std::vector<double> obj, int rank = -1, double crowding = 0.0) {
  Individual i;
  i.objectives = std::move(obj);
  i.rank = rank;
  i.crowding = crowding;
  return i;
}

Individual infeasible() {
  Individual i;
  i.infeasible = true;
  return i;
}

// Independent oracle: peel off the non-dominated set repeatedly.
std::vector<int> oracle_ranks(const std::vector<std::vector<double>>& objs) {
  auto dom = [](const std::vector<double>& a, const std::vector<double>& b) {
    bool le = true, lt = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
      le = le && a[k] <= b[k];
      lt = lt || a[k] < b[k];
    }
    return le && lt;
  };
  std::vector<int> rank(objs.size(), -1);
  for (int r = 0;; ++r) {
    std::vector<std::size_t> layer;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      if (rank[i] >= 0) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < objs.size() && !dominated; ++j) dominated = rank[j] < 0 && dom(objs[j], objs[i]);
      if (!dominated) layer.push_back(i);
    }
    if (layer.empty()) return rank;
    for (std::size_t i : layer) rank[i] = r;
  }
}

Problem schaffer() {
  Problem p;
  p.bounds = {{-10.0}, {10.0}};
  p.evaluate = [](const std::vector<double>& x) {
    return Evaluation{{x[0] * x[0], (x[0] - 2.0) * (x[0] - 2.0)}, false};
  };
  return p;
}

std::string fingerprint(const OptimizationResult& r) {
  std::string s;
  char buf[64];
  for (const GenerationRecord& g : r.history) {
    for (const Individual& i : g.population) {
      for (double v : i.genome) s.append(buf, std::snprintf(buf, sizeof buf, "%a,", v));
      for (double v : i.objectives) s.append(buf, std::snprintf(buf, sizeof buf, "%a,", v));
      s.append(buf, std::snprintf(buf, sizeof buf, "%d,%a;", i.rank, i.crowding));
    }
    s.append(buf, std::snprintf(buf, sizeof buf, "|%a\n", g.hypervolume));
  }
  return s;
}

}  // namespace

TEST_CASE("dominance examples") {
  CHECK(dominates(std::vector<double>{1, 2}, std::vector<double>{2, 3}));
  CHECK_FALSE(dominates(std::vector<double>{1, 2}, std::vector<double>{2, 1}));
  CHECK_FALSE(dominates(std::vector<double>{2, 1}, std::vector<double>{1, 2}));
  CHECK_FALSE(dominates(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
  CHECK(dominates(std::vector<double>{1, 2}, std::vector<double>{1, 3}));
  CHECK_THROWS_AS(dominates(std::vector<double>{1}, std::vector<double>{1, 2}), ParamError);
}

TEST_CASE("feasibility dominance") {
  CHECK(dominates(ind({100, 100}), infeasible()));
  CHECK_FALSE(dominates(infeasible(), ind({100, 100})));
  CHECK_FALSE(dominates(infeasible(), infeasible()));
}

TEST_CASE("sorting small populations") {
  std::vector<Individual> pop{ind({1, 2}), ind({2, 1}), ind({3, 3})};
  const auto fronts = fast_nondominated_sort(pop);
  REQUIRE(fronts.size() == 2);
  CHECK(fronts[0] == std::vector<std::size_t>{0, 1});
  CHECK(fronts[1] == std::vector<std::size_t>{2});
  CHECK(pop[2].rank == 1);

  std::vector<Individual> same(5, ind({4, 4}));
  CHECK(fast_nondominated_sort(same).size() == 1);

  std::vector<Individual> mixed{infeasible(), ind({9, 9}), infeasible()};
  const auto f = fast_nondominated_sort(mixed);
  REQUIRE(f.size() == 2);
  CHECK(f.back() == std::vector<std::size_t>{0, 2});
}

TEST_CASE("sorting matches the brute-force oracle") {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 120)(rng);
    const int m = std::uniform_int_distribution<int>(2, 4)(rng);
    std::uniform_int_distribution<int> coarse(0, 6);  // ties are common
    std::vector<Individual> pop;
    std::vector<std::vector<double>> objs;
    for (int i = 0; i < n; ++i) {
      std::vector<double> o;
      for (int k = 0; k < m; ++k) o.push_back(coarse(rng));
      objs.push_back(o);
      pop.push_back(ind(o));
    }
    const auto fronts = fast_nondominated_sort(pop);
    const std::vector<int> expect = oracle_ranks(objs);
    std::size_t covered = 0;
    for (const auto& f : fronts) covered += f.size();
    CHECK(covered == pop.size());
    for (int i = 0; i < n; ++i) CHECK(pop[i].rank == expect[i]);
  }
}

TEST_CASE("crowding distance examples") {
  const auto d = crowding_distance({{1, 3}, {2, 2}, {3, 1}});
  CHECK(d[0] == kInf);
  CHECK(d[2] == kInf);
  CHECK(d[1] == 2.0);
  CHECK(crowding_distance({{5, 5}})[0] == kInf);
  // Objective 2 is constant: it adds nothing to the interior members.
  const auto flat = crowding_distance({{1, 7}, {2, 7}, {4, 7}, {8, 7}});
  CHECK(flat[1] == doctest::Approx((4.0 - 1.0) / 7.0));
  CHECK(flat[2] == doctest::Approx((8.0 - 2.0) / 7.0));
}

TEST_CASE("crowded comparison rules") {
  CHECK(crowded_better(ind({}, 0, 0.1), ind({}, 2, kInf)));
  CHECK(crowded_better(ind({}, 1, kInf), ind({}, 1, 0.4)));
  CHECK_FALSE(crowded_better(ind({}, 1, 0.4), ind({}, 1, 0.4)));
}

TEST_CASE("tournament keeps the first draw on ties") {
  std::vector<Individual> pop{ind({}, 0, 1.0), ind({}, 2, 5.0), ind({}, 1, kInf), ind({}, 1, 1.0), ind({}, 0, 1.0)};
  Rng rng(9), mirror(9);
  for (int t = 0; t < 200; ++t) {
    const std::size_t a = mirror.index(pop.size());
    const std::size_t b = mirror.index(pop.size());
    const std::size_t expect = (pop[b].rank < pop[a].rank || (pop[b].rank == pop[a].rank && pop[b].crowding > pop[a].crowding)) ? b : a;
    CHECK(tournament_select(pop, rng) == expect);
  }
}

TEST_CASE("SBX spread factor") {
  CHECK(sbx_beta(0.5, 20) == 1.0);
  CHECK(sbx_beta(0.0, 20) == 0.0);
  CHECK(sbx_beta(0.75, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(sbx_beta(0.25, 1) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("SBX of equal parents reproduces them") {
  Rng rng(1);
  const Bounds b{{-3, -3}, {3, 3}};
  for (int t = 0; t < 100; ++t) {
    const auto [c1, c2] = sbx_crossover({1.5, -2}, {1.5, -2}, 20, b, rng, t % 2 == 1);
    CHECK(c1 == std::vector<double>{1.5, -2});
    CHECK(c2 == std::vector<double>{1.5, -2});
  }
}

TEST_CASE("SBX preserves the parents' midpoint and the bounds") {
  Rng rng(42);
  const Bounds wide{{-100, -100}, {100, 100}};
  const Bounds box{{-3, -3}, {3, 3}};
  for (int t = 0; t < 500; ++t) {
    const auto [c1, c2] = sbx_crossover({-3, 0}, {3, 0}, 20, wide, rng);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(0.5 * (c1[i] + c2[i])) <= 1e-12);
    const auto [d1, d2] = sbx_crossover({-3, 0}, {3, 0}, 20, box, rng);
    for (int i = 0; i < 2; ++i) {
      CHECK(d1[i] >= -3);
      CHECK(d1[i] <= 3);
      CHECK(d2[i] >= -3);
      CHECK(d2[i] <= 3);
      // Clamping is the only thing that can move the midpoint.
      const bool clamped = std::abs(d1[i]) == 3 || std::abs(d2[i]) == 3;
      CHECK((clamped || std::abs(0.5 * (d1[i] + d2[i])) <= 1e-12));
    }
  }
}

TEST_CASE("mutation with probability 0 is a no-op") {
  Rng rng(3);
  const Bounds b{{0, 0, 0}, {1, 1, 1}};
  CHECK(polynomial_mutation({0.1, 0.5, 0.9}, 20, b, 0.0, rng) == std::vector<double>{0.1, 0.5, 0.9});
}

TEST_CASE("a gene at the lower bound only moves up") {
  Rng rng(4);
  const Bounds b{{-2}, {5}};
  int moved = 0;
  for (int t = 0; t < 2000; ++t) {
    const double v = polynomial_mutation({-2}, 20, b, 1.0, rng)[0];
    CHECK(v >= -2.0);
    CHECK(v <= 5.0);
    moved += v > -2.0;
  }
  CHECK(moved > 0);
}

TEST_CASE("mutation of a centered gene is unbiased") {
  Rng rng(5);
  const Bounds b{{0}, {10}};
  double sum = 0.0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) sum += polynomial_mutation({5}, 20, b, 1.0, rng)[0];
  CHECK(std::abs(sum / n - 5.0) <= 0.01 * 10.0);
}

TEST_CASE("hypervolume by hand") {
  CHECK(hypervolume({{1, 2}, {2, 1}}, {3, 3}) == 3.0);
  CHECK(hypervolume({{1, 1, 1}}, {2, 2, 2}) == 1.0);
  CHECK(hypervolume({{1, 3}, {3, 1}}, {3, 3}) == 0.0);
  CHECK(hypervolume({{1, 2, 1}, {2, 1, 1}}, {3, 3, 2}) == 3.0);
  CHECK(hypervolume({}, {1, 1}) == 0.0);
}

TEST_CASE("config validation") {
  OptConfig c;
  CHECK_NOTHROW(c.validate());
  c.population_size = 7;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.population_size = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.crossover_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.mutation_prob = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.eta_m = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  CHECK(c.mutation_prob_for(4) == 0.25);
  c.mutation_prob = 0.5;
  CHECK(c.mutation_prob_for(4) == 0.5);
}

TEST_CASE("an always infeasible problem fails after resampling") {
  Problem p;
  p.bounds = {{0}, {1}};
  int calls = 0;
  p.evaluate = [&](const std::vector<double>&) {
    ++calls;
    return Evaluation{{}, true};
  };
  OptConfig c;
  c.population_size = 8;
  CHECK_THROWS_AS(evolve(p, c), InfeasibleProblemError);
  CHECK(calls == 80);
}

TEST_CASE("evolution invariants on a convex two-objective problem") {
  OptConfig c;
  c.population_size = 24;
  c.generations = 30;
  c.seed = 11;
  const OptimizationResult r = evolve(schaffer(), c);
  REQUIRE(r.history.size() == 31);
  CHECK(r.front.hypervolume_history.size() == 31);
  std::vector<double> best(2, kInf);
  for (const GenerationRecord& g : r.history) {
    CHECK(g.population.size() == 24);
    std::vector<double> gen_best(2, kInf);
    for (const Individual& i : g.population) {
      CHECK(i.genome[0] >= -10.0);
      CHECK(i.genome[0] <= 10.0);
      for (int k = 0; k < 2; ++k) gen_best[k] = std::min(gen_best[k], i.objectives[k]);
    }
    for (int k = 0; k < 2; ++k) {
      CHECK(gen_best[k] <= best[k]);
      best[k] = gen_best[k];
    }
  }
  REQUIRE_FALSE(r.front.members.empty());
  for (const Individual& a : r.front.members) {
    CHECK(a.rank == 0);
    CHECK(a.genome[0] >= -0.01);
    CHECK(a.genome[0] <= 2.01);
    for (const Individual& b : r.front.members) CHECK_FALSE(dominates(a, b));
  }
  std::set<double> genomes;
  for (const Individual& a : r.front.members) genomes.insert(a.genome[0]);
  CHECK(genomes.size() == r.front.members.size());
}

TEST_CASE("fixed seeds reproduce the whole history") {
  OptConfig c;
  c.population_size = 20;
  c.generations = 15;
  CHECK(fingerprint(evolve(schaffer(), c)) == fingerprint(evolve(schaffer(), c)));
  OptConfig other = c;
  other.seed = 43;
  CHECK(fingerprint(evolve(schaffer(), c)) != fingerprint(evolve(schaffer(), other)));
}

TEST_CASE("wall-axis optimization on a plan with one variable") {
  const ParametricGraph g = merged(scene_of({seg(0, 0, 100, 0), seg(100, 0, 100, 60), seg(100, 60, 0, 60), seg(0, 60, 0, 0),
                                             seg(30, 0, 30, 60)}));
  DesignVariable v;
  v.axis_id = axis_at(g, true, 30.0);
  v.lo = -20;
  v.hi = 20;
  OptConfig c;
  c.population_size = 16;
  c.generations = 20;
  const OptimizationResult r = evolve(g, {v}, make_registry({"stress", "torsion"}), c);
  REQUIRE_FALSE(r.front.members.empty());
  for (const Individual& a : r.front.members)
    for (const Individual& b : r.history.back().population) CHECK_FALSE(dominates(b, a));
  // The symmetric position x = 50 is the torsion optimum.
  double best = kInf;
  for (const Individual& a : r.front.members) best = std::min(best, std::abs(a.genome[0] - 20.0));
  CHECK(best < 1.0);
  CHECK_THROWS_AS(evolve(g, {}, make_registry({"stress"}), c), ConfigError);
}
