#ifndef EMSPLAN_FITNESS_HPP
#define EMSPLAN_FITNESS_HPP

#include <string>
#include <vector>

#include "emsplan/chromosome.hpp"
#include "emsplan/propagation.hpp"

namespace emsplan {

struct RoiDeficit {
    int roi_id = 0;
    double deficit = 0.0;        // this RoI's contribution to phi_cov
    int receivers_below = 0;     // receivers under the threshold
    int receivers_total = 0;
};

struct FitnessBreakdown {
    double phi = 0.0;       // phi_cov + phi_cost
    double phi_cov = 0.0;
    double phi_cost = 0.0;
    double fitness = 0.0;   // 1/phi; +inf when phi == 0
    std::vector<RoiDeficit> per_roi;
};

std::string writeBreakdown(const FitnessBreakdown& b);

/// Normalized threshold-deficit mean over every RoI receiver:
///   (1/M) sum |P_th - P| / |P_th|  over receivers with P < P_th.
/// A receiver exactly at the threshold contributes nothing.
/// Throws std::invalid_argument on an empty receiver set or P_th == 0.
double coverageTerm(const std::vector<double>& powers_dbm, double threshold_dbm);

/// Q/K, the deployment-count cost. Throws std::invalid_argument for K == 0.
double costTerm(const Chromosome& chromosome);

/// Evaluates the two-term cost of any deployment against the true simulator.
///
/// The direct path and each panel's contribution at the RoI receivers do not
/// depend on the chromosome, so they are tabulated once at construction;
/// an evaluation is then a masked sum over the tables. The accumulation
/// order matches Simulator::powerAtPoints exactly (direct path first, then
/// walls by index), so both routes produce bit-identical powers.
class Evaluator {
public:
    explicit Evaluator(const Simulator& simulator, unsigned threads = 0);

    std::size_t wallCount() const { return contributions_.size(); }  // K
    std::size_t receiverCount() const { return direct_watts_.size(); }  // M

    /// Received power (dBm) at every RoI receiver, flattened in RoI file
    /// order, for deployment `chromosome`.
    std::vector<double> roiPowers(const Chromosome& chromosome) const;

    double coverage(const Chromosome& chromosome) const;  // phi_cov
    FitnessBreakdown totalCost(const Chromosome& chromosome) const;

    const Simulator& simulator() const { return simulator_; }

private:
    const Simulator& simulator_;
    std::vector<Vec3> receivers_;                       // flattened RoI receivers
    std::vector<int> roi_of_receiver_;                  // index into scenario rois
    std::vector<double> direct_watts_;                  // per receiver
    std::vector<std::vector<double>> contributions_;    // [wall][receiver], watts
    double threshold_dbm_ = 0.0;
};

}  // namespace emsplan

#endif
