#ifndef EMSPLAN_PROPAGATION_HPP
#define EMSPLAN_PROPAGATION_HPP

#include <string>
#include <vector>

#include "emsplan/chromosome.hpp"
#include "emsplan/ems.hpp"
#include "emsplan/scenario.hpp"
#include "emsplan/vec3.hpp"

namespace emsplan {

double wattsToDbm(double watts);
double dbmToWatts(double dbm);

/// Received power on the fixed receiver grid for one deployment.
struct CoverageField {
    std::vector<Vec3> grid;
    std::vector<double> power_dbm;  // same length as grid
    Chromosome chromosome;
    std::size_t nx = 0;  // grid shape (row-major, rows along x)
    std::size_t ny = 0;
};

/// Deterministic coverage oracle: a direct BTS path (sector-pattern Friis
/// minus a fixed penetration loss per building wall crossed) plus one
/// additive single-bounce path per installed EMS, power-summed in watts.
/// See docs/simulator_model.md for the full path model.
///
/// Immutable after construction; all evaluation methods are const and safe
/// to call concurrently.
class Simulator {
public:
    explicit Simulator(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }
    const std::vector<EmsDesign>& designs() const { return designs_; }

    /// Direct-path received power in dBm. Throws std::domain_error when the
    /// receiver sits exactly at the BTS.
    double directPowerDbm(const Vec3& receiver) const;

    /// Single-bounce contribution of the k-th candidate panel, in watts
    /// (0 when the panel is unusable or the panel->receiver ray is blocked).
    double emsReflectedPowerWatts(std::size_t wall_index, const Vec3& receiver) const;

    /// Same contribution in dBm (-inf for a zero contribution).
    double emsReflectedPowerDbm(std::size_t wall_index, const Vec3& receiver) const;

    /// Total received power under deployment `chromosome` at arbitrary
    /// points. Accumulation order is fixed (direct path, then walls by
    /// index), so results are bit-identical across runs and thread counts.
    std::vector<double> powerAtPoints(const Chromosome& chromosome,
                                      const std::vector<Vec3>& points,
                                      unsigned threads = 0) const;

    CoverageField coverage(const Chromosome& chromosome, unsigned threads = 0) const;

    /// Number of building-footprint edges crossed by the 3D segment a->b
    /// (2D crossing test, counted only where the building is tall enough to
    /// intersect the ray at the crossing point).
    int wallCrossings(const Vec3& a, const Vec3& b) const;

    bool occluded(const Vec3& a, const Vec3& b) const { return wallCrossings(a, b) > 0; }

    double wavelength() const { return wavelength_; }

private:
    double sectorGainDbi(const Vec3& direction_unit) const;

    Scenario scenario_;
    std::vector<EmsDesign> designs_;
    double wavelength_ = 0.0;
    double azimuth_exponent_ = 1.0;          // cosine-power fit to the -3 dB sector edge
    std::vector<Vec3> sector_boresights_;    // unit vectors, one per sector
};

void writeCoverageCsv(const CoverageField& field, const std::string& path);
void writeCoverageGridText(const CoverageField& field, const std::string& path);

/// true = at/above threshold (covered).
std::vector<bool> thresholdMask(const CoverageField& field, double threshold_dbm);
void writeMaskCsv(const CoverageField& field, double threshold_dbm, const std::string& path);

}  // namespace emsplan

#endif
