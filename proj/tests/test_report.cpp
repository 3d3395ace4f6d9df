#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "emsplan/report.hpp"
#include "test_helpers.hpp"

using namespace emsplan;
using namespace emsplan::test;

namespace {

CoverageField fieldOf(std::vector<Vec3> grid, std::vector<double> power) {
    CoverageField f;
    f.grid = std::move(grid);
    f.power_dbm = std::move(power);
    f.nx = f.grid.size();
    f.ny = 1;
    return f;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("empirical CDF hand cases") {
    const CoverageField f =
        fieldOf({{0, 0, 1.5}, {5, 0, 1.5}}, {-70.0, -60.0});

    const CdfCurve curve = cdf(f, {2.5, 0.0, 1.5}, 10.0, {-75.0, -65.0, -55.0});
    CHECK(curve.probabilities[0] == 0.0);   // below all samples
    CHECK(curve.probabilities[1] == 0.5);   // one of two
    CHECK(curve.probabilities[2] == 1.0);   // above all samples
    CHECK(curve.at(-65.0) == 0.5);
    CHECK_THROWS_AS(curve.at(-64.0), std::invalid_argument);
}

TEST_CASE("fully covered region has zero CDF at threshold") {
    const CoverageField f = fieldOf({{0, 0, 1.5}, {5, 0, 1.5}}, {-60.0, -58.0});
    const CdfCurve curve = cdf(f, {0.0, 0.0, 1.5}, 10.0, {-65.0});
    CHECK(curve.probabilities[0] == 0.0);
}

TEST_CASE("CDF region membership uses 2D distance") {
    const CoverageField f =
        fieldOf({{0, 0, 1.5}, {100, 0, 1.5}}, {-70.0, -50.0});
    const CdfCurve curve = cdf(f, {0.0, 0.0, 1.5}, 10.0, {-60.0});
    CHECK(curve.probabilities[0] == 1.0);  // only the near sample is in range

    CHECK_THROWS_AS(cdf(f, {500.0, 500.0, 1.5}, 1.0, {-60.0}), std::invalid_argument);
}

TEST_CASE("CDF is monotone within bounds on a real field") {
    const Scenario s = loadScenario(scenarioPath("demo_k10.json"));
    const Simulator sim(s);
    const CoverageField field = sim.coverage(Chromosome::fromString("1001100000"));
    const CdfCurve curve = cdf(field, s.rois[0].center, 40.0);
    REQUIRE(curve.levels_dbm.size() == 81);  // default [-70, -50] at 0.25 dB
    CHECK(std::is_sorted(curve.probabilities.begin(), curve.probabilities.end()));
    CHECK(curve.probabilities.front() >= 0.0);
    CHECK(curve.probabilities.back() <= 1.0);
}

TEST_CASE("power gap hand cases") {
    const CoverageField nominal = fieldOf({{0, 0, 1.5}}, {-70.0});
    const CoverageField boosted = fieldOf({{0, 0, 1.5}}, {-63.0});
    const auto gap = powerGap(boosted, nominal);
    CHECK(gap[0] == doctest::Approx(7.0));

    const auto zero = powerGap(nominal, nominal);
    CHECK(zero[0] == 0.0);

    const CoverageField other_grid = fieldOf({{5, 0, 1.5}}, {-70.0});
    CHECK_THROWS_AS(powerGap(other_grid, nominal), std::invalid_argument);
}

TEST_CASE("power gap is non-negative under the additive simulator") {
    const Scenario s = loadScenario(scenarioPath("demo_k10.json"));
    const Simulator sim(s);
    const CoverageField nominal = sim.coverage(Chromosome(s.wallCount()));
    const CoverageField optimized = sim.coverage(Chromosome::fromString("1001100000"));
    const auto gap = powerGap(optimized, nominal);
    for (double g : gap) {
        CHECK(g >= 0.0);
    }
}

TEST_CASE("coverage widening fractions") {
    const auto make = [](int blind, int total) {
        std::vector<bool> mask(static_cast<std::size_t>(total), true);
        for (int i = 0; i < blind; ++i) {
            mask[static_cast<std::size_t>(i)] = false;
        }
        return mask;
    };

    // 50 blind cells reduced to 7: 86%
    CHECK(*coverageWidening(make(50, 100), make(7, 100)) == doctest::Approx(0.86));
    // full recovery
    CHECK(*coverageWidening(make(10, 50), make(0, 50)) == doctest::Approx(1.0));
    // no change
    CHECK(*coverageWidening(make(10, 50), make(10, 50)) == doctest::Approx(0.0));
    // nothing blind to begin with -> not applicable
    CHECK_FALSE(coverageWidening(make(0, 50), make(0, 50)).has_value());

    CHECK_THROWS_AS(coverageWidening(make(1, 3), make(1, 4)), std::invalid_argument);
}

TEST_CASE("widening stays within [0,1] under the monotone simulator") {
    const Scenario s = loadScenario(scenarioPath("demo_k10.json"));
    const Simulator sim(s);
    const Evaluator ev(sim);
    const auto nominal = ev.roiPowers(Chromosome(s.wallCount()));
    const auto optimized = ev.roiPowers(Chromosome::fromString("1001100000"));
    std::vector<bool> m0(nominal.size());
    std::vector<bool> m1(nominal.size());
    for (std::size_t i = 0; i < nominal.size(); ++i) {
        m0[i] = nominal[i] >= s.coverage_threshold_dbm;
        m1[i] = optimized[i] >= s.coverage_threshold_dbm;
    }
    const auto widening = coverageWidening(m0, m1);
    REQUIRE(widening.has_value());
    CHECK(*widening >= 0.0);
    CHECK(*widening <= 1.0);
    CHECK(*widening == doctest::Approx(1.0));  // the optimum clears the RoI
}

TEST_CASE("summary table carries the scenario descriptors") {
    const Scenario s = loadScenario(scenarioPath("paper_shaped_k20.json"));
    const Simulator sim(s);
    const Evaluator ev(sim);
    const FitnessBreakdown nominal = ev.totalCost(Chromosome(s.wallCount()));
    Chromosome some(s.wallCount());
    some.bits[0] = some.bits[3] = some.bits[11] = 1;
    const FitnessBreakdown opt = ev.totalCost(some);

    const TableSummary t = summarize(s, nominal, opt, some.countInstalled());
    CHECK(t.roi_count == 2);
    CHECK(t.wall_count == 20);
    CHECK(t.solution_space == doctest::Approx(1048576.0));
    CHECK(t.q_opt == 3);
    CHECK(t.phi_cost_opt == doctest::Approx(0.15));

    const std::string json = writeSummaryJson(t);
    CHECK(json.find("\"solution_space\"") != std::string::npos);
    const std::string text = formatSummaryText(t);
    CHECK(text.find("P_th") != std::string::npos);
    CHECK(text.find("Q_opt") != std::string::npos);
}

}  // TEST_SUITE
