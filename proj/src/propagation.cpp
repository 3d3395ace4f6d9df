#include "emsplan/propagation.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "emsplan/geometry.hpp"
#include "emsplan/parallel.hpp"

namespace emsplan {
namespace {

constexpr double kPi = 3.14159265358979323846;
// Relative back-lobe floor of the sector pattern (-30 dB). Keeps the direct
// path finite in every direction, which in turn keeps all field values finite.
constexpr double kBacklobeFloor = 1e-3;
// Endpoint guard for the crossing test: a segment that starts on a wall (an
// EMS panel sits on one) must not count its own mounting wall.
constexpr double kSegmentTol = 1e-9;

}  // namespace

double wattsToDbm(double watts) {
    if (watts <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(watts) + 30.0;
}

double dbmToWatts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

Simulator::Simulator(Scenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
    designs_ = designAll(scenario_);
    wavelength_ = scenario_.bts.wavelength();

    // Fit the cosine-power exponent so the pattern is 3 dB down at the
    // sector half-width. A width of 180 deg or more degenerates to an
    // isotropic pattern (no -3 dB point exists on the cosine).
    const double half = scenario_.bts.sector_width / 2.0;
    azimuth_exponent_ = half < kPi / 2.0 ? std::log(0.5) / std::log(std::cos(half)) : 0.0;

    const double tilt = -scenario_.bts.downtilt;
    for (double az : scenario_.bts.sector_azimuths) {
        sector_boresights_.push_back({std::cos(tilt) * std::cos(az),
                                      std::cos(tilt) * std::sin(az),
                                      std::sin(tilt)});
    }
}

double Simulator::sectorGainDbi(const Vec3& direction_unit) const {
    // Power-sum of the per-sector patterns; each sector is an independent
    // incoherent source fed with the same input power.
    double total = 0.0;
    for (const auto& bore : sector_boresights_) {
        const double c = dot(direction_unit, bore);
        double taper = c > 0.0 ? std::pow(c, azimuth_exponent_) : 0.0;
        taper = std::max(taper, kBacklobeFloor);
        total += taper;
    }
    return scenario_.bts.max_gain_dbi + 10.0 * std::log10(total);
}

int Simulator::wallCrossings(const Vec3& a, const Vec3& b) const {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    int crossings = 0;
    for (const auto& building : scenario_.buildings) {
        const auto& poly = building.footprint;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3& p = poly[i];
            const Vec3& q = poly[(i + 1) % n];
            const double ex = q.x - p.x;
            const double ey = q.y - p.y;
            const double denom = dx * ey - dy * ex;
            if (denom == 0.0) {
                continue;  // parallel or degenerate edge
            }
            const double rx = p.x - a.x;
            const double ry = p.y - a.y;
            const double t = (rx * ey - ry * ex) / denom;
            const double s = (rx * dy - ry * dx) / denom;
            // s in [0,1) so a ray through a shared vertex counts one edge,
            // not both; t open at the endpoints so a segment anchored on a
            // wall does not intersect its own anchor.
            if (t <= kSegmentTol || t >= 1.0 - kSegmentTol || s < 0.0 || s >= 1.0) {
                continue;
            }
            const double ray_z = a.z + t * (b.z - a.z);
            if (ray_z <= building.height) {
                ++crossings;
            }
        }
    }
    return crossings;
}

double Simulator::directPowerDbm(const Vec3& receiver) const {
    const Vec3 d = receiver - scenario_.bts.position;
    const double dist = norm(d);
    if (dist == 0.0) {
        throw std::domain_error("directPowerDbm: receiver coincides with the BTS");
    }
    const Vec3 u = d * (1.0 / dist);
    const double tx_dbm = wattsToDbm(scenario_.bts.input_power);
    const double fspl_db = 20.0 * std::log10(4.0 * kPi * dist / wavelength_);
    const double pen_db =
        scenario_.penetration_loss_db * wallCrossings(scenario_.bts.position, receiver);
    return tx_dbm + sectorGainDbi(u) - fspl_db - pen_db;
}

double Simulator::emsReflectedPowerWatts(std::size_t wall_index, const Vec3& receiver) const {
    const EmsDesign& d = designs_.at(wall_index);
    if (!d.usable) {
        return 0.0;
    }
    const Vec3& panel = d.frame.origin;
    const double hop2 = distance(panel, receiver);
    if (hop2 == 0.0 || occluded(panel, receiver)) {
        return 0.0;
    }
    // Hop 1 is the direct path evaluated at the panel barycenter.
    const double panel_in_w = dbmToWatts(directPowerDbm(panel));
    const double aperture_gain = 4.0 * kPi * d.panel_area / (wavelength_ * wavelength_);
    const double spread = wavelength_ / (4.0 * kPi * hop2);
    const double off_axis = angleBetween(toLocal(receiver, d.frame), polarToCart(d.reflection));
    const double taper = std::exp(-(off_axis / d.beamwidth) * (off_axis / d.beamwidth));
    return panel_in_w * aperture_gain * spread * spread * taper;
}

double Simulator::emsReflectedPowerDbm(std::size_t wall_index, const Vec3& receiver) const {
    return wattsToDbm(emsReflectedPowerWatts(wall_index, receiver));
}

std::vector<double> Simulator::powerAtPoints(const Chromosome& chromosome,
                                             const std::vector<Vec3>& points,
                                             unsigned threads) const {
    if (chromosome.size() != designs_.size()) {
        throw std::invalid_argument("powerAtPoints: chromosome length " +
                                    std::to_string(chromosome.size()) + " does not match K=" +
                                    std::to_string(designs_.size()));
    }
    std::vector<double> out(points.size());
    parallelFor(points.size(), threads, [&](std::size_t i) {
        double watts = dbmToWatts(directPowerDbm(points[i]));
        for (std::size_t k = 0; k < designs_.size(); ++k) {
            if (chromosome.bits[k]) {
                watts += emsReflectedPowerWatts(k, points[i]);
            }
        }
        out[i] = wattsToDbm(watts);
    });
    return out;
}

CoverageField Simulator::coverage(const Chromosome& chromosome, unsigned threads) const {
    CoverageField field;
    field.grid = receiverGrid(scenario_);
    const auto [nx, ny] = gridShape(scenario_);
    field.nx = nx;
    field.ny = ny;
    field.power_dbm = powerAtPoints(chromosome, field.grid, threads);
    field.chromosome = chromosome;
    return field;
}

void writeCoverageCsv(const CoverageField& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("coverage: cannot write '" + path + "'");
    }
    out << "x,y,power_dbm\n";
    out.precision(12);
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
        out << field.grid[i].x << ',' << field.grid[i].y << ',' << field.power_dbm[i] << '\n';
    }
}

void writeCoverageGridText(const CoverageField& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("coverage: cannot write '" + path + "'");
    }
    out.precision(12);
    for (std::size_t iy = 0; iy < field.ny; ++iy) {
        for (std::size_t ix = 0; ix < field.nx; ++ix) {
            out << field.power_dbm[iy * field.nx + ix] << (ix + 1 < field.nx ? ' ' : '\n');
        }
    }
}

std::vector<bool> thresholdMask(const CoverageField& field, double threshold_dbm) {
    std::vector<bool> mask(field.power_dbm.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = field.power_dbm[i] >= threshold_dbm;
    }
    return mask;
}

void writeMaskCsv(const CoverageField& field, double threshold_dbm, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("mask: cannot write '" + path + "'");
    }
    const auto mask = thresholdMask(field, threshold_dbm);
    out << "x,y,covered\n";
    out.precision(12);
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
        out << field.grid[i].x << ',' << field.grid[i].y << ',' << (mask[i] ? 1 : 0) << '\n';
    }
}

}  // namespace emsplan
