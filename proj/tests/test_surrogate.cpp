#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <doctest.h>
#include <json.hpp>

#include "emsplan/rng.hpp"
#include "emsplan/surrogate.hpp"
#include "test_helpers.hpp"

using namespace emsplan;
using namespace emsplan::test;

namespace {

std::vector<double> ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> out(values.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        out[order[r]] = static_cast<double>(r);
    }
    return out;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double num = 0.0;
    double va = 0.0;
    double vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    return num / std::sqrt(va * vb);
}

Chromosome fromCode(std::uint64_t code, std::size_t k) {
    Chromosome c(k);
    for (std::size_t bit = 0; bit < k; ++bit) {
        c.bits[bit] = static_cast<std::uint8_t>((code >> bit) & 1U);
    }
    return c;
}

}  // namespace

TEST_SUITE("surrogate") {

TEST_CASE("correlation kernel hand cases") {
    const std::vector<double> beta(4, 1.0);
    const std::vector<double> gamma(4, 2.0);
    const Chromosome a = Chromosome::fromString("0101");
    CHECK(correlation(a, a, beta, gamma) == 1.0);

    // d differing bits with unit beta: e^-d
    CHECK(correlation(a, Chromosome::fromString("0100"), beta, gamma) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(correlation(a, Chromosome::fromString("1010"), beta, gamma) ==
          doctest::Approx(std::exp(-4.0)).epsilon(1e-12));

    CHECK_THROWS_AS(correlation(a, Chromosome::fromString("01"), beta, gamma),
                    std::invalid_argument);
}

TEST_CASE("correlation stays in (0, 1]") {
    Rng rng(41);
    const std::size_t k = 12;
    for (int i = 0; i < 200; ++i) {
        // moderate beta so the exponential cannot underflow to exactly 0
        std::vector<double> beta(k);
        for (auto& b : beta) {
            b = std::exp(rng.uniformDouble() * 8.0 - 6.0);
        }
        const std::vector<double> gamma(k, 2.0);
        Chromosome a(k);
        Chromosome b(k);
        for (std::size_t j = 0; j < k; ++j) {
            a.bits[j] = rng.bernoulli(0.5) ? 1 : 0;
            b.bits[j] = rng.bernoulli(0.5) ? 1 : 0;
        }
        const double v = correlation(a, b, beta, gamma);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("training set generation") {
    const Scenario s = k6Scenario();
    const Simulator sim(s);
    const Evaluator ev(sim);

    SUBCASE("K=3 exhausts at T=8") {
        Scenario s3 = s;
        s3.walls.resize(3);
        const Simulator sim3(s3);
        const Evaluator ev3(sim3);
        const TrainingSet t = generateTrainingSet(ev3, 8, 99);
        CHECK(t.size() == 8);
        std::set<std::string> seen;
        for (const auto& c : t.inputs) {
            seen.insert(c.toString());
        }
        CHECK(seen.size() == 8);  // every 3-bit chromosome exactly once
        CHECK_THROWS_AS(generateTrainingSet(ev3, 9, 99), std::invalid_argument);
    }
    SUBCASE("same seed reproduces the set") {
        const TrainingSet t1 = generateTrainingSet(ev, 20, 1234);
        const TrainingSet t2 = generateTrainingSet(ev, 20, 1234);
        REQUIRE(t1.size() == t2.size());
        for (std::size_t i = 0; i < t1.size(); ++i) {
            CHECK(t1.inputs[i] == t2.inputs[i]);
            CHECK(t1.targets[i] == t2.targets[i]);
        }
        const TrainingSet t3 = generateTrainingSet(ev, 20, 1235);
        bool any_difference = false;
        for (std::size_t i = 0; i < t1.size(); ++i) {
            any_difference = any_difference || !(t3.inputs[i] == t1.inputs[i]);
        }
        CHECK(any_difference);
    }
    SUBCASE("targets carry the coverage term") {
        const TrainingSet t = generateTrainingSet(ev, 10, 7);
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(t.targets[i] == ev.coverage(t.inputs[i]));
        }
    }
}

TEST_CASE("kriging interpolates its training data") {
    const Scenario s = k6Scenario();
    const Simulator sim(s);
    const Evaluator ev(sim);
    const TrainingSet training = generateTrainingSet(ev, 24, 5);
    const SurrogateModel model = fitSurrogate(training, {.seed = 5});

    CHECK(model.nugget() <= 1e-10);
    for (std::size_t t = 0; t < training.size(); ++t) {
        CHECK(std::abs(model.predict(training.inputs[t]) - training.targets[t]) <= 1e-6);
    }
}

TEST_CASE("two points interpolate exactly") {
    TrainingSet t;
    t.inputs = {Chromosome::fromString("0000"), Chromosome::fromString("1111")};
    t.targets = {0.25, 0.75};
    const SurrogateModel model = fitSurrogate(t);
    CHECK(model.nugget() <= 1e-10);
    CHECK(std::abs(model.predict(t.inputs[0]) - 0.25) <= 1e-6);
    CHECK(std::abs(model.predict(t.inputs[1]) - 0.75) <= 1e-6);
}

TEST_CASE("constant targets give a flat predictor") {
    TrainingSet t;
    t.inputs = {Chromosome::fromString("000"), Chromosome::fromString("011"),
                Chromosome::fromString("101")};
    t.targets = {0.4, 0.4, 0.4};
    const SurrogateModel model = fitSurrogate(t);
    CHECK(model.predict(Chromosome::fromString("000")) == doctest::Approx(0.4));
    CHECK(model.predict(Chromosome::fromString("110")) == doctest::Approx(0.4));
    CHECK(model.predict(Chromosome::fromString("111")) == doctest::Approx(0.4));
}

TEST_CASE("far-field prediction collapses to the kriging mean") {
    // Hand-assembled artifact: strong beta means any far input decorrelates.
    TrainingSet t;
    t.inputs = {Chromosome::fromString("0000000000000000"),
                Chromosome::fromString("0000000011111111")};
    t.targets = {0.2, 0.6};
    nlohmann::json j;
    j["format"] = "emsplan-surrogate";
    j["version"] = 1;
    j["beta"] = std::vector<double>(16, 5.0);
    j["gamma"] = std::vector<double>(16, 2.0);
    j["nu"] = 0.0;  // informational; recomputed on load
    j["nugget"] = 1e-12;
    j["training_inputs"] = {"0000000000000000", "0000000011111111"};
    j["training_targets"] = {0.2, 0.6};
    const SurrogateModel model = SurrogateModel::fromJson(j.dump());
    const double far = model.predict(Chromosome::fromString("1111111100000000"));
    CHECK(far == doctest::Approx(model.mean()).epsilon(1e-9));
}

TEST_CASE("prediction is invariant under training permutation") {
    const Scenario s = k6Scenario();
    const Simulator sim(s);
    const Evaluator ev(sim);
    const TrainingSet training = generateTrainingSet(ev, 16, 3);
    const SurrogateModel model = fitSurrogate(training, {.seed = 3});

    // Same hyperparameters, reversed pairs.
    nlohmann::json j = nlohmann::json::parse(model.toJson());
    auto inputs = j["training_inputs"];
    auto targets = j["training_targets"];
    std::reverse(inputs.begin(), inputs.end());
    std::reverse(targets.begin(), targets.end());
    j["training_inputs"] = inputs;
    j["training_targets"] = targets;
    const SurrogateModel reversed = SurrogateModel::fromJson(j.dump());

    Rng rng(9);
    for (int i = 0; i < 40; ++i) {
        Chromosome c(6);
        for (auto& b : c.bits) {
            b = rng.bernoulli(0.5) ? 1 : 0;
        }
        CHECK(reversed.predict(c) == doctest::Approx(model.predict(c)).epsilon(1e-9));
    }
}

TEST_CASE("predict_total adds the exact cost term") {
    const Scenario s = k6Scenario();
    const Simulator sim(s);
    const Evaluator ev(sim);
    const SurrogateModel model = fitSurrogate(generateTrainingSet(ev, 20, 11), {.seed = 11});
    Rng rng(13);
    for (int i = 0; i < 30; ++i) {
        Chromosome c(6);
        for (auto& b : c.bits) {
            b = rng.bernoulli(0.5) ? 1 : 0;
        }
        CHECK(model.predictTotal(c) - model.predict(c) ==
              doctest::Approx(costTerm(c)).epsilon(1e-12));
    }
}

TEST_CASE("K=6 fit against the exhaustive table") {
    const Scenario s = k6Scenario();
    const Simulator sim(s);
    const Evaluator ev(sim);

    // Independent oracle: the true coverage term for all 64 deployments.
    std::vector<Chromosome> all;
    std::vector<double> truth;
    for (std::uint64_t code = 0; code < 64; ++code) {
        all.push_back(fromCode(code, 6));
        truth.push_back(ev.coverage(all.back()));
    }

    // Fit on the even half, predict the odd half.
    TrainingSet training;
    std::vector<double> held_truth;
    std::vector<Chromosome> held;
    for (std::uint64_t code = 0; code < 64; ++code) {
        if (code % 2 == 0) {
            training.inputs.push_back(all[code]);
            training.targets.push_back(truth[code]);
        } else {
            held.push_back(all[code]);
            held_truth.push_back(truth[code]);
        }
    }
    const SurrogateModel model = fitSurrogate(training, {.seed = 21});

    const auto loo = model.leaveOneOut();
    CHECK(loo.rmse < loo.target_stddev);

    std::vector<double> predictions;
    for (const auto& c : held) {
        predictions.push_back(model.predict(c));
    }
    CHECK(spearman(predictions, held_truth) > 0.8);
}

TEST_CASE("fit rejects bad training sets") {
    TrainingSet too_small;
    too_small.inputs = {Chromosome::fromString("01")};
    too_small.targets = {0.5};
    CHECK_THROWS_AS(fitSurrogate(too_small), std::invalid_argument);

    TrainingSet dup;
    dup.inputs = {Chromosome::fromString("01"), Chromosome::fromString("01")};
    dup.targets = {0.5, 0.6};
    CHECK_THROWS_AS(fitSurrogate(dup), std::invalid_argument);

    TrainingSet bad_target;
    bad_target.inputs = {Chromosome::fromString("01"), Chromosome::fromString("10")};
    bad_target.targets = {0.5, -0.1};
    CHECK_THROWS_AS(fitSurrogate(bad_target), std::invalid_argument);
}

TEST_CASE("model artifact round trip is byte identical") {
    const Scenario s = k6Scenario();
    const Simulator sim(s);
    const Evaluator ev(sim);
    const SurrogateModel model = fitSurrogate(generateTrainingSet(ev, 18, 77), {.seed = 77});

    const std::string first = model.toJson();
    const SurrogateModel reloaded = SurrogateModel::fromJson(first);
    CHECK(reloaded.toJson() == first);

    // and the reloaded model predicts identically
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
        Chromosome c(6);
        for (auto& b : c.bits) {
            b = rng.bernoulli(0.5) ? 1 : 0;
        }
        CHECK(reloaded.predict(c) == model.predict(c));
    }

    CHECK_THROWS(SurrogateModel::fromJson("{\"format\": \"other\"}"));
}

}  // TEST_SUITE
