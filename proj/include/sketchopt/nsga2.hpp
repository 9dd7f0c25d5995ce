#pragma once

#include "sketchopt/objective.hpp"
#include "sketchopt/parametrizer.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace sketchopt {

/// The optimizer's only source of randomness.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) from the top 53 bits of one draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
  std::mt19937_64 engine_;
};

struct Individual {
  std::vector<double> genome;
  std::vector<double> objectives;  // empty when infeasible
  bool infeasible = false;
  int rank = -1;
  double crowding = 0.0;
};

struct Bounds {
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t size() const { return lo.size(); }
};

struct OptConfig {
  int population_size = 40;
  int generations = 60;
  double crossover_prob = 0.9;
  std::optional<double> mutation_prob;  // default 1 / genome length
  double eta_c = 20.0;
  double eta_m = 20.0;
  std::uint64_t seed = 42;
  std::vector<std::string> objectives{"stress", "torsion"};
  double stiffness_exponent = 3.0;
  double area_target = 0.0;

  /// Throws ConfigError.
  void validate() const;
  double mutation_prob_for(std::size_t genome_length) const;
};

/// Plain Pareto dominance for minimization. Throws ParamError on length mismatch.
bool dominates(const std::vector<double>& a, const std::vector<double>& b);

/// Constraint dominance: a feasible individual dominates any infeasible one,
/// and two infeasible individuals never dominate each other.
bool dominates(const Individual& a, const Individual& b);

/// Partition into fronts (indices into `pop`) and store ranks. Infeasible
/// individuals form the last front.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::vector<Individual>& pop);

/// Crowding distance of each member of one front of objective vectors.
std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front);

/// Store crowding for a front of `pop`; infeasible members get 0.
void assign_crowding(std::vector<Individual>& pop, const std::vector<std::size_t>& front);

/// Lower rank wins, then larger crowding, then the first drawn.
bool crowded_better(const Individual& a, const Individual& b);

/// Binary tournament; returns the winner's index.
std::size_t tournament_select(const std::vector<Individual>& pop, Rng& rng);

double sbx_beta(double u, double eta_c);

/// Simulated binary crossover, each gene crossed with probability 0.5. With
/// `exchange`, the two children also trade each crossed gene with probability
/// 0.5 as in Deb's reference code; evolve() crosses this way.
std::pair<std::vector<double>, std::vector<double>> sbx_crossover(const std::vector<double>& p1,
                                                                  const std::vector<double>& p2, double eta_c,
                                                                  const Bounds& bounds, Rng& rng,
                                                                  bool exchange = false);

/// Deb's bounded polynomial mutation.
std::vector<double> polynomial_mutation(std::vector<double> genome, double eta_m, const Bounds& bounds, double prob,
                                        Rng& rng);

/// Dominated volume of a set of minimization points up to `ref`; points not
/// strictly below `ref` in every objective contribute nothing.
double hypervolume(std::vector<std::vector<double>> points, const std::vector<double>& ref);

struct Evaluation {
  std::vector<double> values;
  bool infeasible = false;
};

struct Problem {
  Bounds bounds;
  std::function<Evaluation(const std::vector<double>&)> evaluate;
};

struct GenerationRecord {
  int index = 0;
  std::vector<Individual> population;  // survivors, ranked
  double hypervolume = 0.0;            // of the feasible rank-0 members
};

struct ParetoFront {
  std::vector<Individual> members;  // feasible rank-0, unique genomes
  std::vector<double> hypervolume_history;
  std::vector<double> reference_point;  // fixed from the initial population
};

struct OptimizationResult {
  ParetoFront front;
  std::vector<GenerationRecord> history;  // generation 0 is the initial population
};

using GenerationObserver = std::function<void(const GenerationRecord&)>;

OptimizationResult evolve(const Problem& problem, const OptConfig& config, const GenerationObserver& observer = {});

/// Optimize wall-axis translations. Genes follow `variables` order.
OptimizationResult evolve(const ParametricGraph& graph, const std::vector<DesignVariable>& variables,
                          const ObjectiveRegistry& registry, const OptConfig& config,
                          const GenerationObserver& observer = {});

Assignment assignment_from_genome(const std::vector<DesignVariable>& variables, const std::vector<double>& genome);

}  // namespace sketchopt
