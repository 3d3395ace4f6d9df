#include "emsplan/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace emsplan {
namespace {

// Weight assigned to a phi at or below zero (the +inf-fitness sentinel).
// Any realistic 1/phi stays far below this, so a fully-satisfied deployment
// dominates the wheel without producing non-finite cumulative sums.
constexpr double kSentinelWeight = 1e12;

double eliteUpdate(GaState& state) {
    for (const auto& member : state.population) {
        if (member.predicted_phi < state.elite.predicted_phi) {
            state.elite = member;
        }
    }
    return state.elite.predicted_phi;
}

void recordIteration(GaState& state) {
    double mean = 0.0;
    for (const auto& member : state.population) {
        mean += member.predicted_phi;
    }
    mean /= static_cast<double>(state.population.size());
    state.best_history.push_back(state.elite.predicted_phi);
    state.mean_history.push_back(mean);
    state.elite_q_history.push_back(state.elite.chromosome.countInstalled());
}

}  // namespace

void GaConfig::validate() const {
    if (population < 2 || population % 2 != 0) {
        throw std::invalid_argument("ga: population must be even and >= 2");
    }
    if (max_iterations < 1) {
        throw std::invalid_argument("ga: max_iterations must be >= 1");
    }
    const auto check_prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument(std::string("ga: ") + name + " must lie in [0, 1]");
        }
    };
    check_prob(crossover_prob, "crossover_prob");
    check_prob(mutation_prob, "mutation_prob");
    check_prob(bit_mutation_prob, "bit_mutation_prob");
    if (convergence_phi && !(*convergence_phi >= 0.0)) {
        throw std::invalid_argument("ga: convergence_phi must be >= 0");
    }
}

std::vector<std::size_t> rouletteSelect(const std::vector<double>& phi_values,
                                        std::size_t draws, Rng& rng) {
    if (phi_values.empty()) {
        throw std::invalid_argument("rouletteSelect: empty population");
    }
    std::vector<double> cumulative(phi_values.size());
    double total = 0.0;
    for (std::size_t i = 0; i < phi_values.size(); ++i) {
        const double phi = phi_values[i];
        total += phi > 1.0 / kSentinelWeight ? 1.0 / phi : kSentinelWeight;
        cumulative[i] = total;
    }
    std::vector<std::size_t> picks(draws);
    for (std::size_t d = 0; d < draws; ++d) {
        const double u = rng.uniformDouble() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        picks[d] = std::min<std::size_t>(
            static_cast<std::size_t>(it - cumulative.begin()), phi_values.size() - 1);
    }
    return picks;
}

std::pair<Chromosome, Chromosome> singlePointCrossover(const Chromosome& a, const Chromosome& b,
                                                       std::size_t cut) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("crossover: parents differ in length");
    }
    if (cut < 1 || cut >= a.size()) {
        throw std::invalid_argument("crossover: cut must lie in [1, K-1]");
    }
    Chromosome c1 = a;
    Chromosome c2 = b;
    for (std::size_t i = cut; i < a.size(); ++i) {
        c1.bits[i] = b.bits[i];
        c2.bits[i] = a.bits[i];
    }
    return {std::move(c1), std::move(c2)};
}

GaState initialize(const TrainingSet& training, const GaConfig& config,
                   const SurrogateModel& model) {
    config.validate();
    const std::size_t t = training.size();
    const auto p = static_cast<std::size_t>(config.population);
    if (t < p) {
        throw std::invalid_argument("ga: training size " + std::to_string(t) +
                                    " is smaller than the population " + std::to_string(p));
    }

    // Sort by true total cost, best first (stable, so ties keep file order).
    std::vector<std::size_t> order(t);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> total_phi(t);
    for (std::size_t i = 0; i < t; ++i) {
        total_phi[i] = training.targets[i] + costTerm(training.inputs[i]);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return total_phi[a] < total_phi[b]; });

    // Candidate pool: the above-median half, widened to P entries when the
    // half is too small to fill the population without replacement.
    const std::size_t pool = std::min(t, std::max((t + 1) / 2, p));

    GaState state{.iteration = 0,
                  .population = {},
                  .elite = {Chromosome{}, std::numeric_limits<double>::infinity()},
                  .best_history = {},
                  .mean_history = {},
                  .elite_q_history = {},
                  .rng = Rng(config.seed)};

    // Partial Fisher-Yates over the pool: draw P distinct pool slots.
    std::vector<std::size_t> slots(pool);
    std::iota(slots.begin(), slots.end(), 0);
    for (std::size_t i = 0; i < p; ++i) {
        const std::size_t j = i + state.rng.uniformIndex(pool - i);
        std::swap(slots[i], slots[j]);
    }
    state.population.reserve(p);
    for (std::size_t i = 0; i < p; ++i) {
        const Chromosome& c = training.inputs[order[slots[i]]];
        state.population.push_back({c, model.predictTotal(c)});
    }
    eliteUpdate(state);
    recordIteration(state);
    return state;
}

void step(GaState& state, const SurrogateModel& model, const GaConfig& config) {
    const std::size_t p = state.population.size();
    const std::size_t k = state.population.front().chromosome.size();

    // (i) Roulette selection fills the mating pool.
    std::vector<double> phis(p);
    for (std::size_t i = 0; i < p; ++i) {
        phis[i] = state.population[i].predicted_phi;
    }
    const auto picks = rouletteSelect(phis, p, state.rng);
    std::vector<Chromosome> pool;
    pool.reserve(p);
    for (auto idx : picks) {
        pool.push_back(state.population[idx].chromosome);
    }

    // Shuffle so mating pairs are adjacent indices.
    for (std::size_t i = 0; i + 1 < p; ++i) {
        const std::size_t j = i + state.rng.uniformIndex(p - i);
        std::swap(pool[i], pool[j]);
    }

    // (ii) Single-point crossover on disjoint pairs.
    if (k >= 2) {
        for (std::size_t i = 0; i + 1 < p; i += 2) {
            if (state.rng.bernoulli(config.crossover_prob)) {
                const std::size_t cut = 1 + state.rng.uniformIndex(k - 1);
                auto [c1, c2] = singlePointCrossover(pool[i], pool[i + 1], cut);
                pool[i] = std::move(c1);
                pool[i + 1] = std::move(c2);
            }
        }
    }

    // (iii) Two-level mutation.
    for (auto& c : pool) {
        if (state.rng.bernoulli(config.mutation_prob)) {
            for (std::size_t b = 0; b < k; ++b) {
                if (state.rng.bernoulli(config.bit_mutation_prob)) {
                    c.bits[b] ^= 1;
                }
            }
        }
    }

    // Score offspring on the surrogate only; no RNG from here on.
    state.population.clear();
    for (auto& c : pool) {
        const double phi = model.predictTotal(c);
        state.population.push_back({std::move(c), phi});
    }
    state.iteration += 1;
    eliteUpdate(state);
    recordIteration(state);
}

PlanResult run(const Evaluator& evaluator, const SurrogateModel& model,
               const TrainingSet& training, const GaConfig& config) {
    if (model.inputSize() != evaluator.wallCount()) {
        throw std::invalid_argument("ga: surrogate K does not match the scenario");
    }
    GaState state = initialize(training, config, model);
    bool converged = false;
    while (state.iteration < config.max_iterations) {
        step(state, model, config);
        if (config.convergence_phi && state.elite.predicted_phi <= *config.convergence_phi) {
            converged = true;
            break;
        }
    }

    PlanResult result;
    result.chromosome = state.elite.chromosome;
    result.predicted_phi = state.elite.predicted_phi;
    result.predicted_phi_cov = model.predict(state.elite.chromosome);
    result.phi_cost = costTerm(state.elite.chromosome);
    result.true_breakdown = evaluator.totalCost(state.elite.chromosome);
    result.final_population_best = *std::min_element(
        state.population.begin(), state.population.end(),
        [](const ScoredChromosome& a, const ScoredChromosome& b) {
            return a.predicted_phi < b.predicted_phi;
        });
    result.iterations = state.iteration;
    result.converged = converged;
    result.best_history = state.best_history;
    result.mean_history = state.mean_history;
    result.elite_q_history = state.elite_q_history;
    result.time_saving = timeSaving(config, training.size());
    result.solution_space = std::ldexp(1.0, static_cast<int>(evaluator.wallCount()));
    result.seed = config.seed;
    return result;
}

double timeSaving(const GaConfig& config, std::size_t training_size) {
    const double budget = static_cast<double>(config.population) *
                          static_cast<double>(config.max_iterations);
    if (!(budget > 0.0)) {
        throw std::invalid_argument("timeSaving: P*I must be positive");
    }
    return (budget - static_cast<double>(training_size)) / budget;
}

BruteForceResult bruteForce(const Evaluator& evaluator, std::size_t max_k) {
    const std::size_t k = evaluator.wallCount();
    if (k > max_k) {
        throw std::invalid_argument("bruteForce: K=" + std::to_string(k) +
                                    " exceeds the enumeration guard (" + std::to_string(max_k) +
                                    ")");
    }
    const std::uint64_t count = std::uint64_t{1} << k;
    Chromosome best;
    double best_phi = std::numeric_limits<double>::infinity();
    for (std::uint64_t code = 0; code < count; ++code) {
        Chromosome c(k);
        for (std::size_t bit = 0; bit < k; ++bit) {
            c.bits[bit] = static_cast<std::uint8_t>((code >> bit) & 1U);
        }
        const double phi = evaluator.coverage(c) + costTerm(c);
        if (phi < best_phi) {  // strict: ties keep the lowest enumeration code
            best_phi = phi;
            best = std::move(c);
        }
    }
    BruteForceResult result;
    result.breakdown = evaluator.totalCost(best);
    result.chromosome = std::move(best);
    result.evaluations = count;
    return result;
}

void writeRunLog(const PlanResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("runlog: cannot write '" + path + "'");
    }
    out << "iter,best_phi_pred,mean_phi_pred,Q_of_elite\n";
    out.precision(12);
    for (std::size_t i = 0; i < result.best_history.size(); ++i) {
        out << i << ',' << result.best_history[i] << ',' << result.mean_history[i] << ','
            << result.elite_q_history[i] << '\n';
    }
}

std::string writePlanJson(const PlanResult& result, const GaConfig& config) {
    nlohmann::json j;
    j["chromosome"] = result.chromosome.toString();
    j["q"] = result.chromosome.countInstalled();
    j["k"] = result.chromosome.size();
    j["solution_space"] = result.solution_space;
    j["predicted"] = {{"phi", result.predicted_phi},
                      {"phi_cov", result.predicted_phi_cov},
                      {"phi_cost", result.phi_cost}};
    j["true"] = nlohmann::json::parse(writeBreakdown(result.true_breakdown));
    j["final_population_best"] = {
        {"chromosome", result.final_population_best.chromosome.toString()},
        {"phi", result.final_population_best.predicted_phi}};
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["time_saving"] = result.time_saving;
    j["seed"] = result.seed;
    j["config"] = {{"population", config.population},
                   {"max_iterations", config.max_iterations},
                   {"crossover_prob", config.crossover_prob},
                   {"mutation_prob", config.mutation_prob},
                   {"bit_mutation_prob", config.bit_mutation_prob}};
    if (config.convergence_phi) {
        j["config"]["convergence_phi"] = *config.convergence_phi;
    }
    return j.dump(2) + "\n";
}

void savePlanJson(const PlanResult& result, const GaConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("plan: cannot write '" + path + "'");
    }
    out << writePlanJson(result, config);
}

}  // namespace emsplan
