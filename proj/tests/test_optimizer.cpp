#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <doctest.h>

#include "emsplan/optimizer.hpp"
#include "emsplan/rng.hpp"
#include "test_helpers.hpp"

using namespace emsplan;
using namespace emsplan::test;

namespace {

/// A tiny model fitted on simple analytic targets, for tests that need a
/// surrogate but not the full simulator.
SurrogateModel toyModel(std::size_t k, std::size_t t, std::uint64_t seed) {
    TrainingSet training;
    Rng rng(seed);
    std::set<std::string> seen;
    while (training.inputs.size() < t) {
        Chromosome c(k);
        for (auto& b : c.bits) {
            b = rng.bernoulli(0.5) ? 1 : 0;
        }
        if (!seen.insert(c.toString()).second) {
            continue;
        }
        training.inputs.push_back(c);
    }
    for (const auto& c : training.inputs) {
        // smooth pseudo-coverage: fewer panels -> more deficit
        training.targets.push_back(1.0 / (1.0 + c.countInstalled()));
    }
    return fitSurrogate(training, {.seed = seed});
}

GaConfig smallConfig() {
    GaConfig config;
    config.population = 8;
    config.max_iterations = 20;
    config.crossover_prob = 0.8;
    config.mutation_prob = 0.1;
    config.bit_mutation_prob = 0.05;
    config.seed = 42;
    return config;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("config validation") {
    GaConfig config = smallConfig();
    CHECK_NOTHROW(config.validate());

    config.population = 7;  // odd
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.population = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = smallConfig();
    config.crossover_prob = 1.5;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = smallConfig();
    config.convergence_phi = -0.1;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = smallConfig();
    config.max_iterations = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("single-point crossover swaps tails") {
    const auto [c1, c2] = singlePointCrossover(Chromosome::fromString("000000"),
                                               Chromosome::fromString("111111"), 3);
    CHECK(c1.toString() == "000111");
    CHECK(c2.toString() == "111000");

    CHECK_THROWS_AS(singlePointCrossover(Chromosome::fromString("000000"),
                                         Chromosome::fromString("111111"), 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(singlePointCrossover(Chromosome::fromString("000000"),
                                         Chromosome::fromString("111111"), 6),
                    std::invalid_argument);
}

TEST_CASE("crossover preserves the per-locus bit multiset") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        Chromosome a(9);
        Chromosome b(9);
        for (std::size_t i = 0; i < 9; ++i) {
            a.bits[i] = rng.bernoulli(0.5) ? 1 : 0;
            b.bits[i] = rng.bernoulli(0.5) ? 1 : 0;
        }
        const std::size_t cut = 1 + rng.uniformIndex(8);
        const auto [c1, c2] = singlePointCrossover(a, b, cut);
        for (std::size_t i = 0; i < 9; ++i) {
            CHECK(int(c1.bits[i]) + int(c2.bits[i]) == int(a.bits[i]) + int(b.bits[i]));
        }
    }
}

TEST_CASE("roulette selection over equal fitness is uniform") {
    // chi-square on P=8 categories over 10^4 spins; p > 0.01 needs
    // chi2 < 18.475 at 7 degrees of freedom.
    const std::vector<double> equal_phi(8, 0.5);
    Rng rng(2024);
    const auto picks = rouletteSelect(equal_phi, 10000, rng);
    std::vector<int> counts(8, 0);
    for (auto p : picks) {
        counts[p] += 1;
    }
    const double expected = 10000.0 / 8.0;
    double chi2 = 0.0;
    for (int c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    CHECK(chi2 < 18.475);
}

TEST_CASE("roulette favors low phi and tolerates the sentinel") {
    Rng rng(7);
    const auto picks = rouletteSelect({1.0, 0.01, 1.0, 1.0}, 2000, rng);
    std::map<std::size_t, int> counts;
    for (auto p : picks) {
        counts[p] += 1;
    }
    CHECK(counts[1] > 1800);  // 100x fitness of the others

    Rng rng2(8);
    const auto sentinel_picks = rouletteSelect({0.5, 0.0, 0.5}, 500, rng2);
    int zeros = 0;
    for (auto p : sentinel_picks) {
        zeros += p == 1 ? 1 : 0;
    }
    CHECK(zeros == 500);  // the perfect individual dominates the wheel
}

TEST_CASE("initialization draws from the best half") {
    TrainingSet training;
    const std::size_t k = 6;
    for (std::uint64_t code = 0; code < 8; ++code) {
        Chromosome c(k);
        for (std::size_t bit = 0; bit < 3; ++bit) {
            c.bits[bit] = static_cast<std::uint8_t>((code >> bit) & 1U);
        }
        training.inputs.push_back(c);
        training.targets.push_back(0.1 * static_cast<double>(code));  // best first
    }
    const SurrogateModel model = fitSurrogate(training, {.seed = 1});

    GaConfig config = smallConfig();
    config.population = 4;
    const GaState state = initialize(training, config, model);
    CHECK(state.population.size() == 4);

    // total phi = 0.1 code + Q/6; the best half by that ranking is
    // codes {0, 1, 2, 4} (code 4 beats code 3 on the cost term)
    std::set<std::string> allowed;
    for (int code : {0, 1, 2, 4}) {
        allowed.insert(training.inputs[static_cast<std::size_t>(code)].toString());
    }
    std::set<std::string> drawn;
    for (const auto& member : state.population) {
        CHECK(allowed.count(member.chromosome.toString()) == 1);
        drawn.insert(member.chromosome.toString());
    }
    CHECK(drawn.size() == 4);  // without replacement
}

TEST_CASE("initialization handles ties and rejects small training sets") {
    TrainingSet training;
    for (std::uint64_t code = 0; code < 8; ++code) {
        Chromosome c(3);
        for (std::size_t bit = 0; bit < 3; ++bit) {
            c.bits[bit] = static_cast<std::uint8_t>((code >> bit) & 1U);
        }
        training.inputs.push_back(c);
        training.targets.push_back(0.5);  // all equal
    }
    const SurrogateModel model = fitSurrogate(training, {.seed = 2});
    GaConfig config = smallConfig();
    config.population = 6;
    const GaState state = initialize(training, config, model);
    CHECK(state.population.size() == 6);
    std::set<std::string> distinct;
    for (const auto& member : state.population) {
        distinct.insert(member.chromosome.toString());
    }
    CHECK(distinct.size() == 6);

    config.population = 10;  // T=8 < P
    CHECK_THROWS_AS(initialize(training, config, model), std::invalid_argument);
}

TEST_CASE("inert operators reduce step to resampling") {
    const SurrogateModel model = toyModel(8, 40, 3);
    GaConfig config = smallConfig();
    config.crossover_prob = 0.0;
    config.mutation_prob = 0.0;
    GaState state = initialize(model.training(), config, model);

    std::set<std::string> parents;
    for (const auto& member : state.population) {
        parents.insert(member.chromosome.toString());
    }
    step(state, model, config);
    CHECK(state.population.size() == 8);
    for (const auto& member : state.population) {
        CHECK(parents.count(member.chromosome.toString()) == 1);
    }
}

TEST_CASE("forced mutation complements every offspring") {
    const SurrogateModel model = toyModel(8, 40, 4);
    GaConfig config = smallConfig();
    config.crossover_prob = 0.0;
    config.mutation_prob = 1.0;
    config.bit_mutation_prob = 1.0;
    GaState state = initialize(model.training(), config, model);

    std::set<std::string> parents;
    for (const auto& member : state.population) {
        parents.insert(member.chromosome.toString());
    }
    step(state, model, config);
    for (const auto& member : state.population) {
        std::string complement;
        for (auto b : member.chromosome.bits) {
            complement.push_back(b ? '0' : '1');
        }
        CHECK(parents.count(complement) == 1);
    }
}

TEST_CASE("elitism is monotone and population size is stable") {
    const SurrogateModel model = toyModel(10, 60, 5);
    const GaConfig config = smallConfig();
    GaState state = initialize(model.training(), config, model);
    double best = state.elite.predicted_phi;
    for (int i = 0; i < 20; ++i) {
        step(state, model, config);
        CHECK(state.population.size() == 8);
        CHECK(state.elite.predicted_phi <= best);
        best = state.elite.predicted_phi;
    }
    REQUIRE(state.best_history.size() == 21);
    CHECK(std::is_sorted(state.best_history.rbegin(), state.best_history.rend()));
}

TEST_CASE("time saving formula") {
    GaConfig config;
    config.population = 40;
    config.max_iterations = 1000;
    CHECK(timeSaving(config, 4000) == doctest::Approx(0.90).epsilon(1e-12));
    CHECK(timeSaving(config, 40000) == doctest::Approx(0.0));
    config.population = 76;
    CHECK(timeSaving(config, 7600) == doctest::Approx(0.90).epsilon(1e-12));
}

TEST_CASE("iteration budget of one evolves exactly one generation") {
    const Scenario s = loadScenario(scenarioPath("demo_k10.json"));
    const Simulator sim(s);
    const Evaluator ev(sim);
    const TrainingSet training = generateTrainingSet(ev, 32, 1);
    const SurrogateModel model = fitSurrogate(training, {.seed = 1});

    GaConfig config = smallConfig();
    config.max_iterations = 1;
    const PlanResult result = run(ev, model, training, config);
    CHECK(result.iterations == 1);
    CHECK_FALSE(result.converged);

    // a huge threshold stops right after the first generation, flagged
    config.max_iterations = 50;
    config.convergence_phi = 1e9;
    const PlanResult early = run(ev, model, training, config);
    CHECK(early.iterations == 1);
    CHECK(early.converged);
}

TEST_CASE("seeded runs are bit-identical") {
    const Scenario s = loadScenario(scenarioPath("demo_k10.json"));
    const Simulator sim(s);
    const Evaluator ev(sim);
    const TrainingSet training = generateTrainingSet(ev, 64, 9);
    const SurrogateModel model = fitSurrogate(training, {.seed = 9});

    GaConfig config = smallConfig();
    config.population = 10;
    config.max_iterations = 40;
    const PlanResult a = run(ev, model, training, config);
    const PlanResult b = run(ev, model, training, config);
    CHECK(writePlanJson(a, config) == writePlanJson(b, config));
    CHECK(a.chromosome == b.chromosome);
    CHECK(a.best_history == b.best_history);

    config.seed = 43;
    const PlanResult c = run(ev, model, training, config);
    CHECK((c.best_history != a.best_history || c.chromosome == a.chromosome));
}

TEST_CASE("GA matches the brute-force optimum on the demo canyon") {
    const Scenario s = loadScenario(scenarioPath("demo_k10.json"));
    const Simulator sim(s);
    const Evaluator ev(sim);
    const BruteForceResult truth = bruteForce(ev);

    const TrainingSet training = generateTrainingSet(ev, 256, 11);
    const SurrogateModel model = fitSurrogate(training, {.seed = 11});
    GaConfig config;
    config.population = 20;
    config.max_iterations = 200;
    config.seed = 11;
    const PlanResult result = run(ev, model, training, config);

    CHECK(result.true_breakdown.phi <= truth.breakdown.phi * 1.05);
}

TEST_CASE("brute force guard") {
    const Scenario s = loadScenario(scenarioPath("paper_shaped_k20.json"));
    const Simulator sim(s);
    const Evaluator ev(sim);
    CHECK_THROWS_AS(bruteForce(ev), std::invalid_argument);  // K=20 > 12
}

TEST_CASE("plan artifacts serialize") {
    const Scenario s = loadScenario(scenarioPath("demo_k10.json"));
    const Simulator sim(s);
    const Evaluator ev(sim);
    const TrainingSet training = generateTrainingSet(ev, 32, 2);
    const SurrogateModel model = fitSurrogate(training, {.seed = 2});
    GaConfig config = smallConfig();
    config.max_iterations = 5;
    const PlanResult result = run(ev, model, training, config);

    const std::string json = writePlanJson(result, config);
    CHECK(json.find("\"chromosome\"") != std::string::npos);
    CHECK(json.find("\"time_saving\"") != std::string::npos);
    CHECK(json.find("\"final_population_best\"") != std::string::npos);

    writeRunLog(result, "/tmp/emsplan_test_runlog.csv");
    std::ifstream in("/tmp/emsplan_test_runlog.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "iter,best_phi_pred,mean_phi_pred,Q_of_elite");
}

}  // TEST_SUITE
