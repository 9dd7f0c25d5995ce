#include "sketchopt/nsga2.hpp"

#include "sketchopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sketchopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double slice_volume(std::vector<std::vector<double>>& pts, const std::vector<double>& ref, std::size_t dims) {
  if (pts.empty()) return 0.0;
  if (dims == 1) {
    double best = ref[0];
    for (const auto& p : pts) best = std::min(best, p[0]);
    return ref[0] - best;
  }
  const std::size_t k = dims - 1;
  std::sort(pts.begin(), pts.end(), [k](const auto& a, const auto& b) { return a[k] < b[k]; });
  double vol = 0.0;
  std::vector<std::vector<double>> prefix;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    prefix.push_back(pts[i]);
    const double top = i + 1 < pts.size() ? pts[i + 1][k] : ref[k];
    const double h = top - pts[i][k];
    if (h <= 0.0) continue;
    std::vector<std::vector<double>> work = prefix;
    vol += h * slice_volume(work, ref, k);
  }
  return vol;
}

void rank_and_crowd(std::vector<Individual>& pop, std::vector<std::vector<std::size_t>>& fronts) {
  fronts = fast_nondominated_sort(pop);
  for (const auto& f : fronts) assign_crowding(pop, f);
}

double front_hypervolume(const std::vector<Individual>& pop, const std::vector<double>& ref) {
  std::vector<std::vector<double>> pts;
  for (const Individual& ind : pop)
    if (ind.rank == 0 && !ind.infeasible) pts.push_back(ind.objectives);
  return hypervolume(std::move(pts), ref);
}

Individual make_individual(const Problem& problem, std::vector<double> genome) {
  Individual ind;
  ind.genome = std::move(genome);
  Evaluation ev = problem.evaluate(ind.genome);
  ind.infeasible = ev.infeasible;
  if (!ev.infeasible) ind.objectives = std::move(ev.values);
  return ind;
}

}  // namespace

void OptConfig::validate() const {
  if (population_size < 4 || population_size % 2 != 0) throw ConfigError("population_size must be even and >= 4");
  if (generations < 0) throw ConfigError("generations must be >= 0");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) throw ConfigError("crossover_prob must lie in [0, 1]");
  if (mutation_prob && !(*mutation_prob >= 0.0 && *mutation_prob <= 1.0))
    throw ConfigError("mutation_prob must lie in [0, 1]");
  if (!(eta_c > 0.0) || !std::isfinite(eta_c)) throw ConfigError("eta_c must be positive");
  if (!(eta_m > 0.0) || !std::isfinite(eta_m)) throw ConfigError("eta_m must be positive");
  if (objectives.empty()) throw ConfigError("at least one objective is required");
}

double OptConfig::mutation_prob_for(std::size_t genome_length) const {
  if (mutation_prob) return *mutation_prob;
  return genome_length == 0 ? 0.0 : 1.0 / static_cast<double>(genome_length);
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ParamError("objective vectors differ in length");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

bool dominates(const Individual& a, const Individual& b) {
  if (a.infeasible) return false;
  if (b.infeasible) return true;
  return dominates(a.objectives, b.objectives);
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::vector<Individual>& pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(pop[p], pop[q])) {
        dominated[p].push_back(q);
        ++count[q];
      } else if (dominates(pop[q], pop[p])) {
        dominated[q].push_back(p);
        ++count[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    if (count[p] == 0) current.push_back(p);
  int rank = 0;
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current) {
      pop[p].rank = rank;
      for (std::size_t q : dominated[p])
        if (--count[q] == 0) next.push_back(q);
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
    ++rank;
  }
  return fronts;
}

std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front) {
  const std::size_t n = front.size();
  std::vector<double> d(n, 0.0);
  if (n == 0) return d;
  if (n <= 2) return std::vector<double>(n, kInf);
  const std::size_t m = front[0].size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < m; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return front[a][k] < front[b][k]; });
    const double lo = front[order.front()][k];
    const double hi = front[order.back()][k];
    d[order.front()] = kInf;
    d[order.back()] = kInf;
    if (!(hi > lo)) continue;
    for (std::size_t i = 1; i + 1 < n; ++i)
      d[order[i]] += (front[order[i + 1]][k] - front[order[i - 1]][k]) / (hi - lo);
  }
  return d;
}

void assign_crowding(std::vector<Individual>& pop, const std::vector<std::size_t>& front) {
  if (front.empty()) return;
  if (pop[front[0]].infeasible) {
    for (std::size_t i : front) pop[i].crowding = 0.0;
    return;
  }
  std::vector<std::vector<double>> objs;
  for (std::size_t i : front) objs.push_back(pop[i].objectives);
  const auto d = crowding_distance(objs);
  for (std::size_t k = 0; k < front.size(); ++k) pop[front[k]].crowding = d[k];
}

bool crowded_better(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

std::size_t tournament_select(const std::vector<Individual>& pop, Rng& rng) {
  const std::size_t a = rng.index(pop.size());
  const std::size_t b = rng.index(pop.size());
  return crowded_better(pop[b], pop[a]) ? b : a;
}

double sbx_beta(double u, double eta_c) {
  const double e = 1.0 / (eta_c + 1.0);
  return u <= 0.5 ? std::pow(2.0 * u, e) : std::pow(1.0 / (2.0 * (1.0 - u)), e);
}

std::pair<std::vector<double>, std::vector<double>> sbx_crossover(const std::vector<double>& p1,
                                                                  const std::vector<double>& p2, double eta_c,
                                                                  const Bounds& bounds, Rng& rng, bool exchange) {
  std::vector<double> c1 = p1, c2 = p2;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (rng.uniform() >= 0.5) continue;
    const double beta = sbx_beta(rng.uniform(), eta_c);
    // Equal parents reproduce exactly; the formula would only add round-off.
    if (p1[i] == p2[i]) {
      if (exchange) rng.uniform();
      continue;
    }
    const double a = 0.5 * ((1.0 + beta) * p1[i] + (1.0 - beta) * p2[i]);
    const double b = 0.5 * ((1.0 - beta) * p1[i] + (1.0 + beta) * p2[i]);
    c1[i] = std::clamp(a, bounds.lo[i], bounds.hi[i]);
    c2[i] = std::clamp(b, bounds.lo[i], bounds.hi[i]);
    if (exchange && rng.uniform() < 0.5) std::swap(c1[i], c2[i]);
  }
  return {std::move(c1), std::move(c2)};
}

std::vector<double> polynomial_mutation(std::vector<double> genome, double eta_m, const Bounds& bounds, double prob,
                                        Rng& rng) {
  const double power = 1.0 / (eta_m + 1.0);
  for (std::size_t i = 0; i < genome.size(); ++i) {
    if (!(rng.uniform() < prob)) continue;
    const double lo = bounds.lo[i], hi = bounds.hi[i];
    const double span = hi - lo;
    const double r = rng.uniform();
    if (!(span > 0.0)) continue;
    const double y = genome[i];
    double dq = 0.0;
    if (r < 0.5) {
      const double xy = 1.0 - (y - lo) / span;
      const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(xy, eta_m + 1.0);
      dq = std::pow(val, power) - 1.0;
    } else {
      const double xy = 1.0 - (hi - y) / span;
      const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(xy, eta_m + 1.0);
      dq = 1.0 - std::pow(val, power);
    }
    genome[i] = std::clamp(y + dq * span, lo, hi);
  }
  return genome;
}

double hypervolume(std::vector<std::vector<double>> points, const std::vector<double>& ref) {
  std::erase_if(points, [&](const std::vector<double>& p) {
    if (p.size() != ref.size()) throw ParamError("point and reference differ in dimension");
    for (std::size_t k = 0; k < p.size(); ++k)
      if (!(p[k] < ref[k])) return true;
    return false;
  });
  if (points.empty() || ref.empty()) return 0.0;
  return slice_volume(points, ref, ref.size());
}

OptimizationResult evolve(const Problem& problem, const OptConfig& config, const GenerationObserver& observer) {
  config.validate();
  const Bounds& bounds = problem.bounds;
  const std::size_t n = bounds.size();
  if (n == 0) throw ConfigError("nothing to optimize: no design variables");
  if (bounds.hi.size() != n) throw ParamError("bounds differ in length");
  for (std::size_t i = 0; i < n; ++i)
    if (!(bounds.lo[i] <= bounds.hi[i])) throw ParamError("variable bounds are inverted");

  Rng rng(config.seed);
  const std::size_t N = static_cast<std::size_t>(config.population_size);
  const double pm = config.mutation_prob_for(n);

  std::vector<Individual> pop;
  for (int attempt = 0;; ++attempt) {
    pop.clear();
    for (std::size_t k = 0; k < N; ++k) {
      std::vector<double> g(n);
      for (std::size_t i = 0; i < n; ++i) g[i] = bounds.lo[i] + rng.uniform() * (bounds.hi[i] - bounds.lo[i]);
      pop.push_back(make_individual(problem, std::move(g)));
    }
    if (std::any_of(pop.begin(), pop.end(), [](const Individual& i) { return !i.infeasible; })) break;
    if (attempt + 1 >= 10) throw InfeasibleProblemError("every initial individual is infeasible after 10 attempts");
  }

  std::vector<std::vector<std::size_t>> fronts;
  rank_and_crowd(pop, fronts);

  OptimizationResult result;
  // Reference point: a margin past the worst feasible initial value.
  std::size_t m = 0;
  for (const Individual& ind : pop)
    if (!ind.infeasible) m = ind.objectives.size();
  std::vector<double> ref(m, -kInf), lo(m, kInf);
  for (const Individual& ind : pop) {
    if (ind.infeasible) continue;
    for (std::size_t k = 0; k < m; ++k) {
      ref[k] = std::max(ref[k], ind.objectives[k]);
      lo[k] = std::min(lo[k], ind.objectives[k]);
    }
  }
  for (std::size_t k = 0; k < m; ++k) ref[k] += 0.1 * std::max({ref[k] - lo[k], std::abs(ref[k]), 1e-12});
  result.front.reference_point = ref;

  auto record = [&](int index) {
    GenerationRecord rec{index, pop, front_hypervolume(pop, ref)};
    result.front.hypervolume_history.push_back(rec.hypervolume);
    if (observer) observer(rec);
    result.history.push_back(std::move(rec));
  };
  record(0);

  for (int gen = 1; gen <= config.generations; ++gen) {
    std::vector<Individual> merged = pop;
    while (merged.size() < 2 * N) {
      const auto& a = pop[tournament_select(pop, rng)].genome;
      const auto& b = pop[tournament_select(pop, rng)].genome;
      std::pair<std::vector<double>, std::vector<double>> kids{a, b};
      if (rng.uniform() < config.crossover_prob) kids = sbx_crossover(a, b, config.eta_c, bounds, rng, true);
      kids.first = polynomial_mutation(std::move(kids.first), config.eta_m, bounds, pm, rng);
      kids.second = polynomial_mutation(std::move(kids.second), config.eta_m, bounds, pm, rng);
      merged.push_back(make_individual(problem, std::move(kids.first)));
      if (merged.size() < 2 * N) merged.push_back(make_individual(problem, std::move(kids.second)));
    }
    rank_and_crowd(merged, fronts);
    std::vector<Individual> next;
    for (auto& f : fronts) {
      if (next.size() + f.size() <= N) {
        for (std::size_t i : f) next.push_back(merged[i]);
        if (next.size() == N) break;
        continue;
      }
      std::stable_sort(f.begin(), f.end(),
                       [&](std::size_t a, std::size_t b) { return merged[a].crowding > merged[b].crowding; });
      for (std::size_t k = 0; next.size() < N; ++k) next.push_back(merged[f[k]]);
      break;
    }
    pop = std::move(next);
    // Ranks and crowding are reported relative to the survivors.
    rank_and_crowd(pop, fronts);
    record(gen);
  }

  for (const Individual& ind : pop) {
    if (ind.rank != 0 || ind.infeasible) continue;
    const bool dup = std::any_of(result.front.members.begin(), result.front.members.end(), [&](const Individual& o) {
      for (std::size_t i = 0; i < n; ++i)
        if (std::abs(o.genome[i] - ind.genome[i]) > 1e-9) return false;
      return true;
    });
    if (!dup) result.front.members.push_back(ind);
  }
  return result;
}

Assignment assignment_from_genome(const std::vector<DesignVariable>& variables, const std::vector<double>& genome) {
  if (variables.size() != genome.size()) throw ParamError("genome length differs from variable count");
  Assignment a;
  for (std::size_t i = 0; i < variables.size(); ++i) a[variables[i].id] = genome[i];
  return a;
}

OptimizationResult evolve(const ParametricGraph& graph, const std::vector<DesignVariable>& variables,
                          const ObjectiveRegistry& registry, const OptConfig& config,
                          const GenerationObserver& observer) {
  if (variables.empty()) throw ConfigError("nothing to optimize: the model has no design variables");
  Problem problem;
  for (const DesignVariable& v : variables) {
    problem.bounds.lo.push_back(v.lo);
    problem.bounds.hi.push_back(v.hi);
  }
  problem.evaluate = [&](const std::vector<double>& genome) {
    const ObjectiveVector ov = evaluate_objectives(graph, variables, assignment_from_genome(variables, genome), registry);
    return Evaluation{ov.values, ov.infeasible};
  };
  return evolve(problem, config, observer);
}

}  // namespace sketchopt
