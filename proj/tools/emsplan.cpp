// Command-line driver: wires scenario loading, the coverage simulator, the
// kriging twin, and the genetic search into reproducible end-to-end runs.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/validation error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "emsplan/ems.hpp"
#include "emsplan/fitness.hpp"
#include "emsplan/optimizer.hpp"
#include "emsplan/propagation.hpp"
#include "emsplan/report.hpp"
#include "emsplan/rng.hpp"
#include "emsplan/scenario.hpp"
#include "emsplan/surrogate.hpp"

namespace {

namespace fs = std::filesystem;
using namespace emsplan;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Sub-seed stages fanned out from the single run-level seed.
constexpr std::uint64_t kStageTraining = 1;
constexpr std::uint64_t kStageFit = 2;
constexpr std::uint64_t kStageGa = 3;

struct CommonOpts {
    std::string scenario_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

std::string defaultOutDir() {
    if (const char* env = std::getenv("EMSPLAN_OUT")) {
        return env;
    }
    return "out";
}

fs::path ensureOutDir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

Chromosome parseChromosomeArg(const std::string& bits, std::size_t k) {
    Chromosome c = Chromosome::fromString(bits);
    if (c.size() != k) {
        throw std::invalid_argument("chromosome has " + std::to_string(c.size()) +
                                    " bits but the scenario has K=" + std::to_string(k) +
                                    " candidate walls");
    }
    return c;
}

BetaStructure parseStructure(const std::string& name) {
    if (name == "auto") {
        return BetaStructure::kAuto;
    }
    if (name == "isotropic") {
        return BetaStructure::kIsotropic;
    }
    if (name == "anisotropic") {
        return BetaStructure::kAnisotropic;
    }
    throw std::invalid_argument("structure must be auto|isotropic|anisotropic, got '" + name +
                                "'");
}

void writeCoverageArtifacts(const CoverageField& field, double threshold_dbm,
                            const fs::path& dir, const std::string& stem) {
    writeCoverageCsv(field, (dir / (stem + ".csv")).string());
    writeCoverageGridText(field, (dir / (stem + "_grid.txt")).string());
    writeMaskCsv(field, threshold_dbm, (dir / (stem + "_mask.csv")).string());
}

int cmdSimulate(const CommonOpts& opts, const std::string& chromosome_bits) {
    const Scenario scenario = loadScenario(opts.scenario_path);
    const Simulator simulator(scenario);
    const fs::path dir = ensureOutDir(opts.out_dir);

    const CoverageField nominal =
        simulator.coverage(Chromosome(scenario.wallCount()), opts.threads);
    writeCoverageArtifacts(nominal, scenario.coverage_threshold_dbm, dir, "coverage_nominal");

    if (!chromosome_bits.empty()) {
        const Chromosome c = parseChromosomeArg(chromosome_bits, scenario.wallCount());
        const CoverageField optimized = simulator.coverage(c, opts.threads);
        writeCoverageArtifacts(optimized, scenario.coverage_threshold_dbm, dir,
                               "coverage_optimized");
        writePowerGapCsv(optimized, nominal, (dir / "delta_p.csv").string());
    }
    std::cout << "wrote coverage artifacts to " << dir.string() << "\n";
    return kExitOk;
}

int cmdTrain(const CommonOpts& opts, std::size_t samples, const std::string& model_out,
             const std::string& structure) {
    const Scenario scenario = loadScenario(opts.scenario_path);
    const Simulator simulator(scenario);
    const Evaluator evaluator(simulator, opts.threads);

    const TrainingSet training =
        generateTrainingSet(evaluator, samples, subSeed(opts.seed, kStageTraining));
    SurrogateConfig config;
    config.seed = subSeed(opts.seed, kStageFit);
    config.structure = parseStructure(structure);
    const SurrogateModel model = fitSurrogate(training, config);
    model.save(model_out);

    const auto loo = model.leaveOneOut();
    std::cout << "trained on T=" << training.size() << " samples (K=" << scenario.wallCount()
              << ")\n"
              << "leave-one-out RMSE: " << loo.rmse << " (target stddev " << loo.target_stddev
              << ")\n"
              << "nugget: " << model.nugget() << "\n"
              << "model written to " << model_out << "\n";
    return kExitOk;
}

struct PlanOpts {
    std::size_t samples = 256;
    GaConfig ga;
    std::string model_path;
    double zeta = 40.0;
    std::string structure = "auto";
};

void applyManifest(const std::string& path, CommonOpts& common, PlanOpts& plan) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("manifest: cannot open '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("manifest: JSON parse failure: ") + e.what());
    }
    if (j.contains("scenario")) {
        common.scenario_path = j["scenario"].get<std::string>();
    }
    if (j.contains("output_dir")) {
        common.out_dir = j["output_dir"].get<std::string>();
    }
    common.seed = j.value("seed", common.seed);
    common.threads = j.value("threads", common.threads);
    plan.zeta = j.value("zeta_m", plan.zeta);
    if (j.contains("surrogate")) {
        const auto& s = j["surrogate"];
        plan.samples = s.value("samples", plan.samples);
        plan.structure = s.value("structure", plan.structure);
        if (s.contains("model")) {
            plan.model_path = s["model"].get<std::string>();
        }
    }
    if (j.contains("ga")) {
        const auto& g = j["ga"];
        plan.ga.population = g.value("population", plan.ga.population);
        plan.ga.max_iterations = g.value("iterations", plan.ga.max_iterations);
        plan.ga.crossover_prob = g.value("crossover_prob", plan.ga.crossover_prob);
        plan.ga.mutation_prob = g.value("mutation_prob", plan.ga.mutation_prob);
        plan.ga.bit_mutation_prob = g.value("bit_mutation_prob", plan.ga.bit_mutation_prob);
        if (g.contains("convergence_phi")) {
            plan.ga.convergence_phi = g["convergence_phi"].get<double>();
        }
    }
}

int cmdPlan(const CommonOpts& opts, const PlanOpts& plan_opts) {
    const Scenario scenario = loadScenario(opts.scenario_path);
    const Simulator simulator(scenario);
    const Evaluator evaluator(simulator, opts.threads);
    const fs::path dir = ensureOutDir(opts.out_dir);

    TrainingSet training;
    SurrogateModel model = [&]() {
        if (!plan_opts.model_path.empty()) {
            SurrogateModel loaded = SurrogateModel::load(plan_opts.model_path);
            training = loaded.training();
            return loaded;
        }
        training = generateTrainingSet(evaluator, plan_opts.samples,
                                       subSeed(opts.seed, kStageTraining));
        SurrogateConfig config;
        config.seed = subSeed(opts.seed, kStageFit);
        config.structure = parseStructure(plan_opts.structure);
        return fitSurrogate(training, config);
    }();

    GaConfig ga = plan_opts.ga;
    ga.seed = subSeed(opts.seed, kStageGa);
    const PlanResult result = run(evaluator, model, training, ga);

    savePlanJson(result, ga, (dir / "plan.json").string());
    writeRunLog(result, (dir / "runlog.csv").string());

    // Maps and per-RoI statistics for the chosen deployment.
    const CoverageField nominal =
        simulator.coverage(Chromosome(scenario.wallCount()), opts.threads);
    const CoverageField optimized = simulator.coverage(result.chromosome, opts.threads);
    writeCoverageArtifacts(nominal, scenario.coverage_threshold_dbm, dir, "coverage_nominal");
    writeCoverageArtifacts(optimized, scenario.coverage_threshold_dbm, dir,
                           "coverage_optimized");
    writePowerGapCsv(optimized, nominal, (dir / "delta_p.csv").string());
    for (const auto& roi : scenario.rois) {
        const CdfCurve curve = cdf(optimized, roi.center, plan_opts.zeta);
        writeCdfCsv(curve, (dir / ("cdf_roi_" + std::to_string(roi.id) + ".csv")).string());
    }

    const FitnessBreakdown nominal_cost = evaluator.totalCost(Chromosome(scenario.wallCount()));
    const TableSummary summary = summarize(scenario, nominal_cost, result.true_breakdown,
                                           result.chromosome.countInstalled());
    {
        std::ofstream out(dir / "summary.json");
        out << writeSummaryJson(summary);
    }
    {
        std::ofstream out(dir / "summary.txt");
        out << formatSummaryText(summary);
    }

    std::cout << formatSummaryText(summary);
    std::cout << "chromosome: " << result.chromosome.toString() << "\n"
              << "predicted phi: " << result.predicted_phi
              << "  true phi: " << result.true_breakdown.phi << "\n"
              << "iterations: " << result.iterations
              << (result.converged ? " (converged)" : " (iteration budget)") << "\n"
              << "time saving: " << result.time_saving * 100.0 << "%\n"
              << "artifacts in " << dir.string() << "\n";
    return kExitOk;
}

int cmdBruteForce(const CommonOpts& opts, std::size_t max_k) {
    const Scenario scenario = loadScenario(opts.scenario_path);
    const Simulator simulator(scenario);
    const Evaluator evaluator(simulator, opts.threads);
    const fs::path dir = ensureOutDir(opts.out_dir);

    const BruteForceResult result = bruteForce(evaluator, max_k);
    nlohmann::json j;
    j["chromosome"] = result.chromosome.toString();
    j["q"] = result.chromosome.countInstalled();
    j["evaluations"] = result.evaluations;
    j["breakdown"] = nlohmann::json::parse(writeBreakdown(result.breakdown));
    {
        std::ofstream out(dir / "bruteforce.json");
        out << j.dump(2) << "\n";
    }
    std::cout << "global optimum chromosome: " << result.chromosome.toString()
              << "  phi: " << result.breakdown.phi << " (phi_cov " << result.breakdown.phi_cov
              << ", phi_cost " << result.breakdown.phi_cost << ")\n"
              << "evaluated " << result.evaluations << " deployments\n";
    return kExitOk;
}

int cmdReport(const CommonOpts& opts, const std::string& chromosome_bits, double zeta) {
    const Scenario scenario = loadScenario(opts.scenario_path);
    const Simulator simulator(scenario);
    const Evaluator evaluator(simulator, opts.threads);
    const fs::path dir = ensureOutDir(opts.out_dir);

    const Chromosome c = parseChromosomeArg(chromosome_bits, scenario.wallCount());
    const CoverageField nominal =
        simulator.coverage(Chromosome(scenario.wallCount()), opts.threads);
    const CoverageField optimized = simulator.coverage(c, opts.threads);
    writeCoverageArtifacts(nominal, scenario.coverage_threshold_dbm, dir, "coverage_nominal");
    writeCoverageArtifacts(optimized, scenario.coverage_threshold_dbm, dir,
                           "coverage_optimized");
    writePowerGapCsv(optimized, nominal, (dir / "delta_p.csv").string());

    nlohmann::json stats = nlohmann::json::array();
    const auto nominal_powers = evaluator.roiPowers(Chromosome(scenario.wallCount()));
    const auto optimized_powers = evaluator.roiPowers(c);
    std::size_t offset = 0;
    for (const auto& roi : scenario.rois) {
        const CdfCurve curve = cdf(optimized, roi.center, zeta);
        writeCdfCsv(curve, (dir / ("cdf_roi_" + std::to_string(roi.id) + ".csv")).string());

        std::vector<bool> nominal_mask(roi.receivers.size());
        std::vector<bool> optimized_mask(roi.receivers.size());
        for (std::size_t m = 0; m < roi.receivers.size(); ++m) {
            nominal_mask[m] = nominal_powers[offset + m] >= scenario.coverage_threshold_dbm;
            optimized_mask[m] = optimized_powers[offset + m] >= scenario.coverage_threshold_dbm;
        }
        offset += roi.receivers.size();

        const auto widening = coverageWidening(nominal_mask, optimized_mask);
        nlohmann::json entry;
        entry["roi_id"] = roi.id;
        if (widening) {
            entry["coverage_widening"] = *widening;
        } else {
            entry["coverage_widening"] = "n/a";
        }
        stats.push_back(entry);
        std::cout << "roi " << roi.id << " coverage widening: ";
        if (widening) {
            std::cout << *widening * 100.0 << "%\n";
        } else {
            std::cout << "n/a (no nominal blind cells)\n";
        }
    }
    {
        std::ofstream out(dir / "widening.json");
        out << stats.dump(2) << "\n";
    }

    const FitnessBreakdown nominal_cost = evaluator.totalCost(Chromosome(scenario.wallCount()));
    const FitnessBreakdown optimized_cost = evaluator.totalCost(c);
    const TableSummary summary =
        summarize(scenario, nominal_cost, optimized_cost, c.countInstalled());
    {
        std::ofstream out(dir / "summary.json");
        out << writeSummaryJson(summary);
    }
    std::cout << formatSummaryText(summary);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EMS deployment planning over a deterministic coverage simulator"};
    app.require_subcommand(1);

    CommonOpts common;
    common.out_dir = defaultOutDir();

    std::string chromosome_bits;
    std::string manifest_path;
    std::string model_out = "model.json";
    std::size_t samples = 256;
    std::size_t max_k = 12;
    double zeta = 40.0;
    double convergence_phi = -1.0;
    PlanOpts plan_opts;

    const auto add_common = [&](CLI::App* cmd, bool scenario_required = true) {
        auto* s = cmd->add_option("--scenario", common.scenario_path, "scenario JSON file");
        if (scenario_required) {
            s->required();
        }
        cmd->add_option("--out", common.out_dir, "output directory (env EMSPLAN_OUT)");
        cmd->add_option("--seed", common.seed, "run-level seed");
        cmd->add_option("--threads", common.threads, "worker cap, 0 = hardware");
    };

    auto* simulate = app.add_subcommand("simulate", "coverage maps for a deployment");
    add_common(simulate);
    simulate->add_option("--chromosome", chromosome_bits, "deployment bits, e.g. 10110");

    auto* train = app.add_subcommand("train", "generate a training set and fit the twin");
    add_common(train);
    train->add_option("--samples", samples, "training set size T");
    train->add_option("--model-out", model_out, "model artifact path");
    train->add_option("--structure", plan_opts.structure, "auto|isotropic|anisotropic");

    auto* plan = app.add_subcommand("plan", "full planning pipeline");
    add_common(plan, false);
    plan->add_option("--manifest", manifest_path, "run manifest JSON");
    plan->add_option("--model", plan_opts.model_path, "pre-trained model artifact");
    plan->add_option("--samples", plan_opts.samples, "training set size T (inline training)");
    plan->add_option("--structure", plan_opts.structure, "auto|isotropic|anisotropic");
    plan->add_option("--population", plan_opts.ga.population, "P");
    plan->add_option("--iterations", plan_opts.ga.max_iterations, "I");
    plan->add_option("--crossover-prob", plan_opts.ga.crossover_prob, "delta_C");
    plan->add_option("--mutation-prob", plan_opts.ga.mutation_prob, "delta_M1");
    plan->add_option("--bit-mutation-prob", plan_opts.ga.bit_mutation_prob, "delta_M2");
    plan->add_option("--convergence-phi", convergence_phi, "xi, early-stop threshold");
    plan->add_option("--zeta", plan_opts.zeta, "CDF sample disc radius [m]");

    auto* brute = app.add_subcommand("brute-force", "exhaustive optimum (K <= 12)");
    add_common(brute);
    brute->add_option("--max-k", max_k, "enumeration guard");

    auto* report = app.add_subcommand("report", "maps, CDFs and widening for a deployment");
    add_common(report);
    report->add_option("--chromosome", chromosome_bits, "deployment bits")->required();
    report->add_option("--zeta", zeta, "CDF sample disc radius [m]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*plan) {
            if (!manifest_path.empty()) {
                applyManifest(manifest_path, common, plan_opts);
            }
            if (convergence_phi >= 0.0) {
                plan_opts.ga.convergence_phi = convergence_phi;
            }
            if (common.scenario_path.empty()) {
                throw std::invalid_argument(
                    "plan: a scenario is required (--scenario or manifest)");
            }
            return cmdPlan(common, plan_opts);
        }
        if (*simulate) {
            return cmdSimulate(common, chromosome_bits);
        }
        if (*train) {
            return cmdTrain(common, samples, model_out, plan_opts.structure);
        }
        if (*brute) {
            return cmdBruteForce(common, max_k);
        }
        if (*report) {
            return cmdReport(common, chromosome_bits, zeta);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
