#ifndef EMSPLAN_REPORT_HPP
#define EMSPLAN_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "emsplan/fitness.hpp"
#include "emsplan/propagation.hpp"
#include "emsplan/scenario.hpp"

namespace emsplan {

/// Empirical CDF of received power over a circular sample region.
struct CdfCurve {
    Vec3 center;
    double radius = 0.0;             // zeta, m
    std::vector<double> levels_dbm;  // ordered abscissae
    std::vector<double> probabilities;  // non-decreasing, in [0, 1]

    /// Theta at one level (fraction of in-region samples <= level).
    double at(double level_dbm) const;
};

/// Default abscissae: [-70, -50] dBm in 0.25 dB steps.
std::vector<double> defaultCdfLevels();

/// Empirical Theta{P(r) | P_hat} over the grid points within 2D distance
/// `radius` of `center`. Throws std::invalid_argument when the disc contains
/// no grid point.
CdfCurve cdf(const CoverageField& field, const Vec3& center, double radius,
             const std::vector<double>& levels_dbm = defaultCdfLevels());

/// Pointwise power gap field_opt - field_nominal, in dB.
/// Throws std::invalid_argument when the grids differ.
std::vector<double> powerGap(const CoverageField& field_opt, const CoverageField& field_nominal);

void writePowerGapCsv(const CoverageField& field_opt, const CoverageField& field_nominal,
                      const std::string& path);

/// Fractional reduction of the below-threshold cell count:
/// (blind0 - blind1) / blind0 over a RoI's receiver mask (true = covered).
/// Empty when the nominal deployment has no blind cells (not applicable).
std::optional<double> coverageWidening(const std::vector<bool>& nominal_covered,
                                       const std::vector<bool>& optimized_covered);

void writeCdfCsv(const CdfCurve& curve, const std::string& path);

/// Scenario/OPP descriptor summary (threshold, S, K, B, nominal coverage
/// cost, and the optimized breakdown).
struct TableSummary {
    double threshold_dbm = 0.0;
    int roi_count = 0;          // S
    std::size_t wall_count = 0;  // K
    double solution_space = 0.0;  // B = 2^K
    double phi_cov_nominal = 0.0;
    int q_opt = 0;
    double phi_opt = 0.0;
    double phi_cov_opt = 0.0;
    double phi_cost_opt = 0.0;
};

TableSummary summarize(const Scenario& scenario, const FitnessBreakdown& nominal,
                       const FitnessBreakdown& optimized, int q_opt);

std::string writeSummaryJson(const TableSummary& summary);
std::string formatSummaryText(const TableSummary& summary);

}  // namespace emsplan

#endif
