#include "emsplan/surrogate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

#include "emsplan/rng.hpp"

namespace emsplan {
namespace {

/// Pairwise bit-difference sets, precomputed once per training set. For
/// binary inputs |a_k - b_k| is 0 or 1 whatever gamma is, so the kernel
/// exponent is just the sum of beta over the differing bits. K <= 64 packs
/// each pair into one mask word; larger K falls back to index lists.
class PairDiffs {
public:
    explicit PairDiffs(const TrainingSet& training) : t_(training.size()) {
        const std::size_t k = training.inputs.empty() ? 0 : training.inputs.front().size();
        packed_ = k <= 64;
        if (packed_) {
            std::vector<std::uint64_t> words(t_);
            for (std::size_t i = 0; i < t_; ++i) {
                std::uint64_t w = 0;
                for (std::size_t bit = 0; bit < k; ++bit) {
                    w |= static_cast<std::uint64_t>(training.inputs[i].bits[bit] ? 1 : 0) << bit;
                }
                words[i] = w;
            }
            masks_.resize(t_ * t_);
            for (std::size_t p = 0; p < t_; ++p) {
                for (std::size_t q = 0; q < t_; ++q) {
                    masks_[p * t_ + q] = words[p] ^ words[q];
                }
            }
        } else {
            indices_.resize(t_ * t_);
            for (std::size_t p = 0; p < t_; ++p) {
                for (std::size_t q = p + 1; q < t_; ++q) {
                    std::vector<std::uint32_t> diff;
                    for (std::size_t bit = 0; bit < k; ++bit) {
                        if (training.inputs[p].bits[bit] != training.inputs[q].bits[bit]) {
                            diff.push_back(static_cast<std::uint32_t>(bit));
                        }
                    }
                    indices_[p * t_ + q] = diff;
                    indices_[q * t_ + p] = std::move(diff);
                }
            }
        }
    }

    double exponent(std::size_t p, std::size_t q, const std::vector<double>& beta) const {
        double sum = 0.0;
        if (packed_) {
            std::uint64_t m = masks_[p * t_ + q];
            while (m != 0) {
                const int bit = std::countr_zero(m);
                sum += beta[static_cast<std::size_t>(bit)];
                m &= m - 1;
            }
        } else {
            for (auto bit : indices_[p * t_ + q]) {
                sum += beta[bit];
            }
        }
        return sum;
    }

private:
    std::size_t t_;
    bool packed_ = true;
    std::vector<std::uint64_t> masks_;
    std::vector<std::vector<std::uint32_t>> indices_;
};

Eigen::MatrixXd correlationMatrix(const TrainingSet& training, const PairDiffs& diffs,
                                  const std::vector<double>& beta, double nugget) {
    const auto t = static_cast<Eigen::Index>(training.size());
    Eigen::MatrixXd c(t, t);
    for (Eigen::Index p = 0; p < t; ++p) {
        c(p, p) = 1.0 + nugget;
        for (Eigen::Index q = p + 1; q < t; ++q) {
            const double v = std::exp(-diffs.exponent(static_cast<std::size_t>(p),
                                                      static_cast<std::size_t>(q), beta));
            c(p, q) = v;
            c(q, p) = v;
        }
    }
    return c;
}

struct Factorization {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double nugget = 0.0;
};

/// Cholesky with an adaptive nugget: start small, x10 until the matrix is
/// positive definite, error past the cap.
Factorization factorize(const TrainingSet& training, const PairDiffs& diffs,
                        const std::vector<double>& beta, double nugget_initial,
                        double nugget_max) {
    double nugget = nugget_initial;
    while (true) {
        Factorization f;
        f.llt.compute(correlationMatrix(training, diffs, beta, nugget));
        f.nugget = nugget;
        if (f.llt.info() == Eigen::Success) {
            return f;
        }
        if (nugget >= nugget_max) {
            throw std::runtime_error(
                "surrogate: correlation matrix is not positive definite even at the "
                "nugget cap; training inputs are too correlated");
        }
        nugget = std::min(nugget * 10.0, nugget_max);
    }
}

struct LikelihoodParts {
    double nu = 0.0;
    double log_likelihood = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd weights;
    double nugget = 0.0;
};

/// Concentrated log-likelihood of ordinary kriging: the GLS mean nu and the
/// process variance are profiled out, leaving
///   -T/2 log(sigma^2) - 1/2 log det C.
LikelihoodParts evaluateLikelihood(const TrainingSet& training, const PairDiffs& diffs,
                                   const std::vector<double>& beta, double nugget_initial,
                                   double nugget_max) {
    const auto f = factorize(training, diffs, beta, nugget_initial, nugget_max);
    const auto t = static_cast<Eigen::Index>(training.size());
    Eigen::VectorXd targets(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        targets(i) = training.targets[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(t);
    const Eigen::VectorXd cinv_ones = f.llt.solve(ones);
    const Eigen::VectorXd cinv_targets = f.llt.solve(targets);

    LikelihoodParts parts;
    parts.nugget = f.nugget;
    parts.nu = ones.dot(cinv_targets) / ones.dot(cinv_ones);
    const Eigen::VectorXd centered = targets - ones * parts.nu;
    parts.weights = cinv_targets - cinv_ones * parts.nu;  // = C^-1 centered
    const double sigma2 = std::max(centered.dot(parts.weights) / static_cast<double>(t), 1e-300);
    double log_det = 0.0;
    const auto& l = f.llt.matrixLLT();
    for (Eigen::Index i = 0; i < t; ++i) {
        log_det += 2.0 * std::log(l(i, i));
    }
    parts.log_likelihood = -0.5 * static_cast<double>(t) * std::log(sigma2) - 0.5 * log_det;
    return parts;
}

void validateTraining(const TrainingSet& training) {
    if (training.inputs.size() != training.targets.size()) {
        throw std::invalid_argument("surrogate: inputs/targets size mismatch");
    }
    if (training.size() < 2) {
        throw std::invalid_argument("surrogate: need at least 2 training pairs");
    }
    const std::size_t k = training.inputs.front().size();
    std::set<std::string> seen;
    for (std::size_t i = 0; i < training.size(); ++i) {
        if (training.inputs[i].size() != k) {
            throw std::invalid_argument("surrogate: inconsistent chromosome lengths");
        }
        if (!seen.insert(training.inputs[i].toString()).second) {
            throw std::invalid_argument("surrogate: duplicate training input " +
                                        training.inputs[i].toString());
        }
        const double y = training.targets[i];
        if (!std::isfinite(y) || y < 0.0) {
            throw std::invalid_argument("surrogate: training target must be finite and >= 0");
        }
    }
}

/// Compass (pattern) search in a box, log-space coordinates. Derivative-free
/// and deterministic; good enough for the smooth concentrated likelihood.
template <typename Objective>
std::vector<double> patternSearch(std::vector<double> point, double lo, double hi,
                                  Objective&& objective, int max_evals) {
    double best = objective(point);
    double step = 1.0;
    int evals = 1;
    while (step > 1e-3 && evals < max_evals) {
        bool improved = false;
        for (std::size_t d = 0; d < point.size() && evals < max_evals; ++d) {
            for (double sign : {+1.0, -1.0}) {
                std::vector<double> trial = point;
                trial[d] = std::clamp(trial[d] + sign * step, lo, hi);
                if (trial[d] == point[d]) {
                    continue;
                }
                const double v = objective(trial);
                ++evals;
                if (v > best) {
                    best = v;
                    point = trial;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }
    return point;
}

}  // namespace

double correlation(const Chromosome& a, const Chromosome& b,
                   const std::vector<double>& beta, const std::vector<double>& gamma) {
    if (a.size() != b.size() || a.size() != beta.size() || a.size() != gamma.size()) {
        throw std::invalid_argument("correlation: length mismatch");
    }
    double exponent = 0.0;
    for (std::size_t k = 0; k < beta.size(); ++k) {
        const double d = std::abs(static_cast<double>(a.bits[k]) - static_cast<double>(b.bits[k]));
        if (d != 0.0) {
            exponent += beta[k] * std::pow(d, gamma[k]);
        }
    }
    return std::exp(-exponent);
}

TrainingSet generateTrainingSet(const Evaluator& evaluator, std::size_t count,
                                std::uint64_t seed) {
    const std::size_t k = evaluator.wallCount();
    if (k < 64 && count > (std::size_t{1} << k)) {
        throw std::invalid_argument("generateTrainingSet: requested " + std::to_string(count) +
                                    " samples but only 2^" + std::to_string(k) + " exist");
    }
    Rng rng(seed);
    TrainingSet training;
    std::set<std::string> seen;
    while (training.inputs.size() < count) {
        Chromosome c(k);
        for (std::size_t i = 0; i < k; ++i) {
            c.bits[i] = rng.bernoulli(0.5) ? 1 : 0;
        }
        if (!seen.insert(c.toString()).second) {
            continue;
        }
        training.inputs.push_back(std::move(c));
    }
    training.targets.resize(count);
    for (std::size_t t = 0; t < count; ++t) {
        training.targets[t] = evaluator.coverage(training.inputs[t]);
    }
    return training;
}

SurrogateModel SurrogateModel::assemble(TrainingSet training, std::vector<double> beta,
                                        std::vector<double> gamma, double nugget_initial,
                                        double nugget_max) {
    const PairDiffs diffs(training);
    const auto parts = evaluateLikelihood(training, diffs, beta, nugget_initial, nugget_max);
    SurrogateModel model;
    model.training_ = std::move(training);
    model.beta_ = std::move(beta);
    model.gamma_ = std::move(gamma);
    model.nu_ = parts.nu;
    model.nugget_ = parts.nugget;
    model.weights_.assign(parts.weights.data(), parts.weights.data() + parts.weights.size());
    return model;
}

SurrogateModel fitSurrogate(const TrainingSet& training, const SurrogateConfig& config) {
    validateTraining(training);
    const std::size_t k = training.inputs.front().size();
    std::vector<double> gamma(k, 2.0);

    // Constant targets carry no structure to fit: flat predictor at nu.
    const double first = training.targets.front();
    const bool constant = std::all_of(training.targets.begin(), training.targets.end(),
                                      [&](double y) { return y == first; });
    if (constant) {
        return SurrogateModel::assemble(training, std::vector<double>(k, 1.0), gamma,
                                        config.nugget_initial, config.nugget_max);
    }

    const bool isotropic =
        config.structure == BetaStructure::kIsotropic ||
        (config.structure == BetaStructure::kAuto && training.size() < 10 * k);
    const std::size_t dims = (isotropic ? 1 : k) + (config.fit_gamma ? k : 0);

    const auto expand_beta = [&](const std::vector<double>& point) {
        std::vector<double> beta(k);
        for (std::size_t i = 0; i < k; ++i) {
            beta[i] = std::exp(point[isotropic ? 0 : i]);
        }
        return beta;
    };
    const auto expand_gamma = [&](const std::vector<double>& point) {
        if (!config.fit_gamma) {
            return gamma;
        }
        std::vector<double> g(k);
        const std::size_t off = isotropic ? 1 : k;
        for (std::size_t i = 0; i < k; ++i) {
            // gamma lives in [1, 2]; the search coordinate is mapped linearly
            // from the log-beta box.
            const double u = (point[off + i] - config.log_beta_min) /
                             (config.log_beta_max - config.log_beta_min);
            g[i] = 1.0 + std::clamp(u, 0.0, 1.0);
        }
        return g;
    };
    const PairDiffs diffs(training);
    const auto objective = [&](const std::vector<double>& point) {
        return evaluateLikelihood(training, diffs, expand_beta(point), config.nugget_initial,
                                  config.nugget_max)
            .log_likelihood;
    };

    Rng rng(subSeed(config.seed, 0x5eed));
    std::vector<double> best_point;
    double best_value = -std::numeric_limits<double>::infinity();
    const int max_evals = 30 + 10 * static_cast<int>(dims);
    for (int restart = 0; restart < std::max(config.restarts, 1); ++restart) {
        std::vector<double> start(dims);
        for (auto& x : start) {
            x = config.log_beta_min +
                rng.uniformDouble() * (config.log_beta_max - config.log_beta_min);
        }
        if (restart == 0) {
            std::fill(start.begin(), start.end(), 0.0);  // beta = 1 is a sane anchor
        }
        const auto point = patternSearch(std::move(start), config.log_beta_min,
                                         config.log_beta_max, objective, max_evals);
        const double value = objective(point);
        if (value > best_value) {
            best_value = value;
            best_point = point;
        }
    }
    return SurrogateModel::assemble(training, expand_beta(best_point), expand_gamma(best_point),
                                    config.nugget_initial, config.nugget_max);
}

double SurrogateModel::predict(const Chromosome& chromosome) const {
    if (chromosome.size() != beta_.size()) {
        throw std::invalid_argument("predict: chromosome length " +
                                    std::to_string(chromosome.size()) + " does not match K=" +
                                    std::to_string(beta_.size()));
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < training_.size(); ++t) {
        acc += correlation(chromosome, training_.inputs[t], beta_, gamma_) * weights_[t];
    }
    return nu_ + acc;
}

double SurrogateModel::predictTotal(const Chromosome& chromosome) const {
    return predict(chromosome) + costTerm(chromosome);
}

SurrogateModel::LooDiagnostics SurrogateModel::leaveOneOut() const {
    const auto t = static_cast<Eigen::Index>(training_.size());
    const PairDiffs diffs(training_);
    const Eigen::MatrixXd c = correlationMatrix(training_, diffs, beta_, nugget_);
    const Eigen::MatrixXd cinv = c.llt().solve(Eigen::MatrixXd::Identity(t, t));

    LooDiagnostics diag;
    diag.residuals.resize(training_.size());
    double mean = 0.0;
    for (double y : training_.targets) {
        mean += y;
    }
    mean /= static_cast<double>(t);
    double var = 0.0;
    double sq = 0.0;
    for (Eigen::Index i = 0; i < t; ++i) {
        const double r = weights_[static_cast<std::size_t>(i)] / cinv(i, i);
        diag.residuals[static_cast<std::size_t>(i)] = r;
        sq += r * r;
        const double d = training_.targets[static_cast<std::size_t>(i)] - mean;
        var += d * d;
    }
    diag.rmse = std::sqrt(sq / static_cast<double>(t));
    diag.target_stddev = std::sqrt(var / static_cast<double>(t));
    return diag;
}

std::string SurrogateModel::toJson() const {
    nlohmann::json j;
    j["format"] = "emsplan-surrogate";
    j["version"] = 1;
    j["beta"] = beta_;
    j["gamma"] = gamma_;
    j["nu"] = nu_;
    j["nugget"] = nugget_;
    auto inputs = nlohmann::json::array();
    for (const auto& c : training_.inputs) {
        inputs.push_back(c.toString());
    }
    j["training_inputs"] = std::move(inputs);
    j["training_targets"] = training_.targets;
    return j.dump(2) + "\n";
}

SurrogateModel SurrogateModel::fromJson(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("surrogate: JSON parse failure: ") + e.what());
    }
    if (j.value("format", std::string()) != "emsplan-surrogate" || j.value("version", 0) != 1) {
        throw std::runtime_error("surrogate: unrecognized artifact format/version");
    }
    TrainingSet training;
    for (const auto& s : j.at("training_inputs")) {
        training.inputs.push_back(Chromosome::fromString(s.get<std::string>()));
    }
    training.targets = j.at("training_targets").get<std::vector<double>>();
    validateTraining(training);
    const double nugget = j.at("nugget").get<double>();
    // Rebuild the factorization-derived weights from the stored
    // hyperparameters; the fixed nugget makes the rebuild deterministic.
    return SurrogateModel::assemble(std::move(training),
                                    j.at("beta").get<std::vector<double>>(),
                                    j.at("gamma").get<std::vector<double>>(), nugget, nugget);
}

void SurrogateModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("surrogate: cannot write '" + path + "'");
    }
    out << toJson();
}

SurrogateModel SurrogateModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("surrogate: cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return fromJson(buf.str());
}

}  // namespace emsplan
