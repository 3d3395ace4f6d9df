#ifndef EMSPLAN_SCENARIO_HPP
#define EMSPLAN_SCENARIO_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "emsplan/vec3.hpp"

namespace emsplan {

/// Raised when a scenario file violates the documented schema or an entity
/// invariant. The message names the offending entity/field.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Building {
    std::string name;
    std::vector<Vec3> footprint;  // ordered 2D vertices, z ignored (= 0)
    double height = 0.0;          // m
    double permittivity = 4.0;    // relative, concrete default
    double conductivity = 1e-2;   // S/m
};

struct BaseStation {
    Vec3 position;                       // m, global frame
    int sector_count = 1;                // V
    std::vector<double> sector_azimuths; // rad, one per sector
    double sector_width = 0.0;           // rad, azimuth extension per sector
    double downtilt = 0.0;               // rad, mechanical tilt below horizon
    double input_power = 0.0;            // W per sector
    double max_gain_dbi = 0.0;
    double frequency = 0.0;              // Hz

    double wavelength() const;
};

struct RegionOfInterest {
    int id = 0;                    // s
    Vec3 center;                   // r_Omega
    std::vector<Vec3> receivers;   // all at scenario receiver height
    double area = 0.0;             // m^2
};

struct CandidateWall {
    int wall_id = 0;        // w, unique within its RoI group
    int roi_id = 0;         // s
    Vec3 barycenter;        // z must equal wall_height - 2 (installation quota)
    double orientation = 0.0;  // alpha, rad vs global x-axis, in [0, 2pi)
    double wall_height = 0.0;  // m
    double panel_area = 0.0;   // m^2
};

struct Extent {
    double x_min = 0.0;
    double y_min = 0.0;
    double side = 0.0;  // axis-aligned bounding square

    bool contains(double x, double y) const {
        return x >= x_min && x <= x_min + side && y >= y_min && y <= y_min + side;
    }
};

/// Immutable world description. Built by loadScenario (which validates every
/// invariant) and shared read-only across threads afterwards.
struct Scenario {
    std::string name;
    Extent extent;
    std::vector<Building> buildings;
    BaseStation bts;
    std::vector<RegionOfInterest> rois;
    std::vector<CandidateWall> walls;  // file order defines chromosome bit order
    double coverage_threshold_dbm = 0.0;  // P_th
    double grid_spacing_x = 0.0;          // m
    double grid_spacing_y = 0.0;          // m
    double receiver_height = 1.5;         // h, m

    // Simulator knobs (see docs/simulator_model.md).
    double penetration_loss_db = 12.0;  // per footprint edge crossed
    double beamwidth = 0.087266462599716474;  // psi_0, rad (5 deg default)

    std::size_t wallCount() const { return walls.size(); }  // K
    int totalReceivers() const;                             // M
    const RegionOfInterest& roiById(int id) const;

    /// Checks every invariant; throws ValidationError naming the entity.
    void validate() const;
};

Scenario loadScenario(const std::string& path);
Scenario parseScenario(const std::string& json_text);
std::string writeScenario(const Scenario& scenario);
void saveScenario(const Scenario& scenario, const std::string& path);

/// Row-major receiver grid over the extent at (grid_spacing_x, grid_spacing_y),
/// all points at receiver_height. Rows run along x, row index along y, so
/// point i = (x_min + (i % nx) dx, y_min + (i / nx) dy, h).
std::vector<Vec3> receiverGrid(const Scenario& scenario);

/// Per-axis grid point counts, (nx, ny), with nx = floor(side/dx) + 1.
std::pair<std::size_t, std::size_t> gridShape(const Scenario& scenario);

void writeGridCsv(const std::vector<Vec3>& grid, const std::string& path);

}  // namespace emsplan

#endif
