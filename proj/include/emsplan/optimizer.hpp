#ifndef EMSPLAN_OPTIMIZER_HPP
#define EMSPLAN_OPTIMIZER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emsplan/fitness.hpp"
#include "emsplan/rng.hpp"
#include "emsplan/surrogate.hpp"

namespace emsplan {

struct GaConfig {
    int population = 40;              // P, even and >= 2
    int max_iterations = 1000;        // I
    double crossover_prob = 0.8;      // per mating pair
    double mutation_prob = 0.1;       // per offspring
    double bit_mutation_prob = 0.01;  // per bit of a mutating offspring
    std::optional<double> convergence_phi;  // xi; unset disables early stop
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

struct ScoredChromosome {
    Chromosome chromosome;
    double predicted_phi = 0.0;
};

struct GaState {
    int iteration = 0;
    std::vector<ScoredChromosome> population;
    ScoredChromosome elite;              // all-time best by predicted phi
    std::vector<double> best_history;    // elite phi after each iteration (index 0 = init)
    std::vector<double> mean_history;    // population mean per iteration
    std::vector<int> elite_q_history;
    Rng rng;
};

struct PlanResult {
    Chromosome chromosome;  // all-time elite
    double predicted_phi = 0.0;
    double predicted_phi_cov = 0.0;
    double phi_cost = 0.0;                 // exact
    FitnessBreakdown true_breakdown;       // elite re-scored with the true simulator
    ScoredChromosome final_population_best;
    int iterations = 0;
    bool converged = false;
    std::vector<double> best_history;
    std::vector<double> mean_history;
    std::vector<int> elite_q_history;
    double time_saving = 0.0;
    double solution_space = 0.0;  // B = 2^K
    std::uint64_t seed = 0;
};

/// Roulette-wheel selection: `draws` independent spins with probability
/// proportional to 1/phi. Non-positive (or sentinel +inf-fitness) phi maps
/// to a dominant finite weight so a perfect individual wins almost surely
/// without breaking the wheel's arithmetic.
std::vector<std::size_t> rouletteSelect(const std::vector<double>& phi_values,
                                        std::size_t draws, Rng& rng);

/// Single-point crossover at `cut` in [1, K-1]: children swap tails.
std::pair<Chromosome, Chromosome> singlePointCrossover(const Chromosome& a, const Chromosome& b,
                                                       std::size_t cut);

/// Initial population: training pairs sorted by true total phi ascending;
/// P individuals drawn uniformly without replacement from the best half
/// (widened to P entries when T/2 < P). Requires T >= P.
GaState initialize(const TrainingSet& training, const GaConfig& config,
                   const SurrogateModel& model);

/// One generation: roulette selection, pairwise single-point crossover,
/// two-level mutation, surrogate scoring, elite update. The RNG stream is
/// consumed in a fixed documented order (selection spins, pool shuffle,
/// per-pair crossover draws, per-offspring mutation draws), so runs are
/// reproducible bit-for-bit.
void step(GaState& state, const SurrogateModel& model, const GaConfig& config);

/// Full SSE run: initialize, iterate until i = I or elite predicted phi <=
/// xi, then re-score the all-time elite with the true evaluator.
PlanResult run(const Evaluator& evaluator, const SurrogateModel& model,
               const TrainingSet& training, const GaConfig& config);

/// ((P*I) - T) / (P*I).
double timeSaving(const GaConfig& config, std::size_t training_size);

struct BruteForceResult {
    Chromosome chromosome;
    FitnessBreakdown breakdown;
    std::uint64_t evaluations = 0;
};

/// Exhaustive scan of all 2^K deployments; the global optimum of phi.
/// Guarded: throws std::invalid_argument when K > max_k.
BruteForceResult bruteForce(const Evaluator& evaluator, std::size_t max_k = 12);

void writeRunLog(const PlanResult& result, const std::string& path);
std::string writePlanJson(const PlanResult& result, const GaConfig& config);
void savePlanJson(const PlanResult& result, const GaConfig& config, const std::string& path);

}  // namespace emsplan

#endif
