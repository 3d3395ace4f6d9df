#include "emsplan/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace emsplan {

double CdfCurve::at(double level_dbm) const {
    for (std::size_t i = 0; i < levels_dbm.size(); ++i) {
        if (levels_dbm[i] == level_dbm) {
            return probabilities[i];
        }
    }
    throw std::invalid_argument("cdf: level not among the curve abscissae");
}

std::vector<double> defaultCdfLevels() {
    std::vector<double> levels;
    for (int i = 0; i <= 80; ++i) {
        levels.push_back(-70.0 + 0.25 * i);
    }
    return levels;
}

CdfCurve cdf(const CoverageField& field, const Vec3& center, double radius,
             const std::vector<double>& levels_dbm) {
    std::vector<double> samples;
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
        if (distance2d(field.grid[i], center) <= radius) {
            samples.push_back(field.power_dbm[i]);
        }
    }
    if (samples.empty()) {
        throw std::invalid_argument("cdf: no grid point falls within the sample disc");
    }
    std::sort(samples.begin(), samples.end());

    CdfCurve curve;
    curve.center = center;
    curve.radius = radius;
    curve.levels_dbm = levels_dbm;
    curve.probabilities.reserve(levels_dbm.size());
    for (double level : levels_dbm) {
        const auto below = std::upper_bound(samples.begin(), samples.end(), level);
        curve.probabilities.push_back(static_cast<double>(below - samples.begin()) /
                                      static_cast<double>(samples.size()));
    }
    return curve;
}

std::vector<double> powerGap(const CoverageField& field_opt, const CoverageField& field_nominal) {
    if (field_opt.grid.size() != field_nominal.grid.size()) {
        throw std::invalid_argument("powerGap: grid size mismatch");
    }
    for (std::size_t i = 0; i < field_opt.grid.size(); ++i) {
        if (!(field_opt.grid[i] == field_nominal.grid[i])) {
            throw std::invalid_argument("powerGap: grids differ at point " + std::to_string(i));
        }
    }
    std::vector<double> gap(field_opt.power_dbm.size());
    for (std::size_t i = 0; i < gap.size(); ++i) {
        gap[i] = field_opt.power_dbm[i] - field_nominal.power_dbm[i];
    }
    return gap;
}

void writePowerGapCsv(const CoverageField& field_opt, const CoverageField& field_nominal,
                      const std::string& path) {
    const auto gap = powerGap(field_opt, field_nominal);
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("power gap: cannot write '" + path + "'");
    }
    out << "x,y,delta_p_db\n";
    out.precision(12);
    for (std::size_t i = 0; i < gap.size(); ++i) {
        out << field_opt.grid[i].x << ',' << field_opt.grid[i].y << ',' << gap[i] << '\n';
    }
}

std::optional<double> coverageWidening(const std::vector<bool>& nominal_covered,
                                       const std::vector<bool>& optimized_covered) {
    if (nominal_covered.size() != optimized_covered.size()) {
        throw std::invalid_argument("coverageWidening: mask size mismatch");
    }
    std::size_t blind0 = 0;
    std::size_t blind1 = 0;
    for (std::size_t i = 0; i < nominal_covered.size(); ++i) {
        blind0 += nominal_covered[i] ? 0 : 1;
        blind1 += optimized_covered[i] ? 0 : 1;
    }
    if (blind0 == 0) {
        return std::nullopt;  // nothing to widen
    }
    return (static_cast<double>(blind0) - static_cast<double>(blind1)) /
           static_cast<double>(blind0);
}

void writeCdfCsv(const CdfCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cdf: cannot write '" + path + "'");
    }
    out << "level_dbm,theta\n";
    out.precision(12);
    for (std::size_t i = 0; i < curve.levels_dbm.size(); ++i) {
        out << curve.levels_dbm[i] << ',' << curve.probabilities[i] << '\n';
    }
}

TableSummary summarize(const Scenario& scenario, const FitnessBreakdown& nominal,
                       const FitnessBreakdown& optimized, int q_opt) {
    TableSummary t;
    t.threshold_dbm = scenario.coverage_threshold_dbm;
    t.roi_count = static_cast<int>(scenario.rois.size());
    t.wall_count = scenario.wallCount();
    t.solution_space = std::ldexp(1.0, static_cast<int>(scenario.wallCount()));
    t.phi_cov_nominal = nominal.phi_cov;
    t.q_opt = q_opt;
    t.phi_opt = optimized.phi;
    t.phi_cov_opt = optimized.phi_cov;
    t.phi_cost_opt = optimized.phi_cost;
    return t;
}

std::string writeSummaryJson(const TableSummary& s) {
    nlohmann::json j;
    j["threshold_dbm"] = s.threshold_dbm;
    j["roi_count"] = s.roi_count;
    j["wall_count"] = s.wall_count;
    j["solution_space"] = s.solution_space;
    j["phi_cov_nominal"] = s.phi_cov_nominal;
    j["q_opt"] = s.q_opt;
    j["phi_opt"] = s.phi_opt;
    j["phi_cov_opt"] = s.phi_cov_opt;
    j["phi_cost_opt"] = s.phi_cost_opt;
    return j.dump(2) + "\n";
}

std::string formatSummaryText(const TableSummary& s) {
    std::ostringstream out;
    out << std::left;
    out << std::setw(16) << "P_th [dBm]" << std::setw(6) << "S" << std::setw(6) << "K"
        << std::setw(12) << "B" << std::setw(14) << "Phi_cov{0}" << std::setw(8) << "Q_opt"
        << std::setw(12) << "Phi" << std::setw(12) << "Phi_cov" << std::setw(12) << "Phi_cost"
        << '\n';
    out << std::setw(16) << s.threshold_dbm << std::setw(6) << s.roi_count << std::setw(6)
        << s.wall_count;
    out << std::setw(12) << std::setprecision(3) << s.solution_space;
    out << std::setw(14) << std::setprecision(3) << s.phi_cov_nominal;
    out << std::setw(8) << s.q_opt;
    out << std::setw(12) << std::setprecision(3) << s.phi_opt;
    out << std::setw(12) << std::setprecision(3) << s.phi_cov_opt;
    out << std::setw(12) << std::setprecision(3) << s.phi_cost_opt << '\n';
    return out.str();
}

}  // namespace emsplan
