#include "emsplan/fitness.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "emsplan/parallel.hpp"

namespace emsplan {

double coverageTerm(const std::vector<double>& powers_dbm, double threshold_dbm) {
    if (powers_dbm.empty()) {
        throw std::invalid_argument("coverageTerm: empty receiver set");
    }
    if (threshold_dbm == 0.0) {
        throw std::invalid_argument("coverageTerm: threshold of 0 dBm is not normalizable");
    }
    double sum = 0.0;
    for (double p : powers_dbm) {
        const double gap = threshold_dbm - p;
        if (gap > 0.0) {  // Heaviside gate: deficit only strictly below threshold
            sum += gap / std::abs(threshold_dbm);
        }
    }
    return sum / static_cast<double>(powers_dbm.size());
}

double costTerm(const Chromosome& chromosome) {
    if (chromosome.size() == 0) {
        throw std::invalid_argument("costTerm: chromosome is empty");
    }
    return static_cast<double>(chromosome.countInstalled()) /
           static_cast<double>(chromosome.size());
}

Evaluator::Evaluator(const Simulator& simulator, unsigned threads)
    : simulator_(simulator) {
    const Scenario& s = simulator.scenario();
    threshold_dbm_ = s.coverage_threshold_dbm;
    for (std::size_t r = 0; r < s.rois.size(); ++r) {
        for (const auto& rx : s.rois[r].receivers) {
            receivers_.push_back(rx);
            roi_of_receiver_.push_back(static_cast<int>(r));
        }
    }
    direct_watts_.resize(receivers_.size());
    parallelFor(receivers_.size(), threads, [&](std::size_t m) {
        direct_watts_[m] = dbmToWatts(simulator.directPowerDbm(receivers_[m]));
    });
    contributions_.resize(s.walls.size());
    for (std::size_t k = 0; k < s.walls.size(); ++k) {
        contributions_[k].resize(receivers_.size());
        parallelFor(receivers_.size(), threads, [&](std::size_t m) {
            contributions_[k][m] = simulator.emsReflectedPowerWatts(k, receivers_[m]);
        });
    }
}

std::vector<double> Evaluator::roiPowers(const Chromosome& chromosome) const {
    if (chromosome.size() != contributions_.size()) {
        throw std::invalid_argument("roiPowers: chromosome length " +
                                    std::to_string(chromosome.size()) + " does not match K=" +
                                    std::to_string(contributions_.size()));
    }
    std::vector<double> out(receivers_.size());
    for (std::size_t m = 0; m < receivers_.size(); ++m) {
        double watts = direct_watts_[m];
        for (std::size_t k = 0; k < contributions_.size(); ++k) {
            if (chromosome.bits[k]) {
                watts += contributions_[k][m];
            }
        }
        out[m] = wattsToDbm(watts);
    }
    return out;
}

double Evaluator::coverage(const Chromosome& chromosome) const {
    return coverageTerm(roiPowers(chromosome), threshold_dbm_);
}

FitnessBreakdown Evaluator::totalCost(const Chromosome& chromosome) const {
    const auto powers = roiPowers(chromosome);
    FitnessBreakdown b;
    b.phi_cov = coverageTerm(powers, threshold_dbm_);
    b.phi_cost = costTerm(chromosome);
    b.phi = b.phi_cov + b.phi_cost;
    b.fitness = b.phi == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / b.phi;

    const auto& rois = simulator_.scenario().rois;
    b.per_roi.resize(rois.size());
    for (std::size_t r = 0; r < rois.size(); ++r) {
        b.per_roi[r].roi_id = rois[r].id;
        b.per_roi[r].receivers_total = static_cast<int>(rois[r].receivers.size());
    }
    const double m_total = static_cast<double>(powers.size());
    for (std::size_t m = 0; m < powers.size(); ++m) {
        const double gap = threshold_dbm_ - powers[m];
        if (gap > 0.0) {
            auto& roi = b.per_roi[static_cast<std::size_t>(roi_of_receiver_[m])];
            roi.deficit += gap / std::abs(threshold_dbm_) / m_total;
            roi.receivers_below += 1;
        }
    }
    return b;
}

std::string writeBreakdown(const FitnessBreakdown& b) {
    nlohmann::json j;
    j["phi"] = b.phi;
    j["phi_cov"] = b.phi_cov;
    j["phi_cost"] = b.phi_cost;
    if (std::isinf(b.fitness)) {
        j["fitness"] = "inf";
    } else {
        j["fitness"] = b.fitness;
    }
    auto per_roi = nlohmann::json::array();
    for (const auto& r : b.per_roi) {
        per_roi.push_back({{"roi_id", r.roi_id},
                           {"deficit", r.deficit},
                           {"receivers_below", r.receivers_below},
                           {"receivers_total", r.receivers_total}});
    }
    j["per_roi"] = std::move(per_roi);
    return j.dump(2) + "\n";
}

}  // namespace emsplan
