#ifndef EMSPLAN_SURROGATE_HPP
#define EMSPLAN_SURROGATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "emsplan/chromosome.hpp"
#include "emsplan/fitness.hpp"

namespace emsplan {

/// Input/output pairs (chromosome, phi_cov) evaluated with the true
/// simulator. Inputs are pairwise distinct.
struct TrainingSet {
    std::vector<Chromosome> inputs;
    std::vector<double> targets;

    std::size_t size() const { return inputs.size(); }
};

/// T distinct uniform-random chromosomes (rejection sampling on duplicates),
/// each scored with the true evaluator. Deterministic given the seed.
/// Throws std::invalid_argument when count > 2^K.
TrainingSet generateTrainingSet(const Evaluator& evaluator, std::size_t count,
                                std::uint64_t seed);

enum class BetaStructure {
    kAuto,         // isotropic when T < 10 K, anisotropic otherwise
    kIsotropic,    // one shared beta
    kAnisotropic,  // one beta per bit
};

struct SurrogateConfig {
    BetaStructure structure = BetaStructure::kAuto;
    bool fit_gamma = false;  // gamma is unidentifiable on binary inputs; fixed at 2
    int restarts = 10;
    double log_beta_min = -6.0;
    double log_beta_max = 6.0;
    double nugget_initial = 1e-12;
    double nugget_max = 1e-6;
    std::uint64_t seed = 0;
};

/// exp(-sum_k beta_k |a_k - b_k|^gamma_k), in (0, 1].
/// Throws std::invalid_argument on a length mismatch.
double correlation(const Chromosome& a, const Chromosome& b,
                   const std::vector<double>& beta, const std::vector<double>& gamma);

/// Ordinary-kriging predictor of phi_cov over binary deployment vectors.
/// Immutable once fitted; predict() is safe to call concurrently.
class SurrogateModel {
public:
    /// nu + rho' C^-1 (targets - 1 nu). At a training input this returns the
    /// training target up to the nugget; with all correlations -> 0 it
    /// returns nu.
    double predict(const Chromosome& chromosome) const;

    /// predict + Q/K; the cost term is always exact (never surrogate-modeled).
    double predictTotal(const Chromosome& chromosome) const;

    double mean() const { return nu_; }
    double nugget() const { return nugget_; }
    const std::vector<double>& beta() const { return beta_; }
    const std::vector<double>& gamma() const { return gamma_; }
    const TrainingSet& training() const { return training_; }
    std::size_t inputSize() const { return beta_.size(); }  // K

    /// Leave-one-out residuals at fixed kriging mean, cheap closed form.
    struct LooDiagnostics {
        double rmse = 0.0;
        double target_stddev = 0.0;
        std::vector<double> residuals;
    };
    LooDiagnostics leaveOneOut() const;

    std::string toJson() const;
    static SurrogateModel fromJson(const std::string& text);
    void save(const std::string& path) const;
    static SurrogateModel load(const std::string& path);

private:
    friend SurrogateModel fitSurrogate(const TrainingSet&, const SurrogateConfig&);
    static SurrogateModel assemble(TrainingSet training, std::vector<double> beta,
                                   std::vector<double> gamma, double nugget_initial,
                                   double nugget_max);

    TrainingSet training_;
    std::vector<double> beta_;
    std::vector<double> gamma_;
    double nu_ = 0.0;
    double nugget_ = 0.0;
    std::vector<double> weights_;  // C^-1 (targets - 1 nu)
};

/// Hyperparameter fit by maximizing the concentrated log-likelihood with a
/// seeded multi-start pattern search over log beta in the configured box.
/// Requires T >= 2 and distinct inputs. Constant targets yield the flat
/// predictor (nu = the common value) without a search.
SurrogateModel fitSurrogate(const TrainingSet& training, const SurrogateConfig& config = {});

}  // namespace emsplan

#endif
