#ifndef EMSPLAN_TEST_HELPERS_HPP
#define EMSPLAN_TEST_HELPERS_HPP

#include <string>
#include <vector>

#include "emsplan/scenario.hpp"

namespace emsplan::test {

constexpr double kPi = 3.14159265358979323846;

#ifndef EMSPLAN_SCENARIO_DIR
#define EMSPLAN_SCENARIO_DIR "scenarios"
#endif

inline std::string scenarioPath(const std::string& name) {
    return std::string(EMSPLAN_SCENARIO_DIR) + "/" + name;
}

/// Empty landscape, single sector pointing along +x with no tilt; the two
/// candidate walls face the BTS from the north. Receivers sit close to the
/// BTS, so the RoI is fully covered in the nominal case.
inline Scenario freeSpaceScenario() {
    Scenario s;
    s.name = "free_space";
    s.extent = {0.0, 0.0, 400.0};
    s.grid_spacing_x = 5.0;
    s.grid_spacing_y = 5.0;
    s.coverage_threshold_dbm = -65.0;
    s.receiver_height = 1.5;
    s.penetration_loss_db = 12.0;
    s.beamwidth = 5.0 * kPi / 180.0;

    s.bts.position = {200.0, 200.0, 30.0};
    s.bts.sector_count = 1;
    s.bts.sector_azimuths = {0.0};
    s.bts.sector_width = 120.0 * kPi / 180.0;
    s.bts.downtilt = 0.0;
    s.bts.input_power = 20.0;
    s.bts.max_gain_dbi = 16.3;
    s.bts.frequency = 3.5e9;

    RegionOfInterest roi;
    roi.id = 1;
    roi.center = {240.0, 200.0, 1.5};
    roi.receivers = {{240.0, 200.0, 1.5}, {245.0, 200.0, 1.5}};
    roi.area = 50.0;
    s.rois.push_back(roi);

    CandidateWall w1;
    w1.wall_id = 1;
    w1.roi_id = 1;
    w1.barycenter = {240.0, 300.0, 10.0};
    w1.orientation = 0.0;  // faces -y, toward BTS and RoI
    w1.wall_height = 12.0;
    w1.panel_area = 25.0;
    CandidateWall w2 = w1;
    w2.wall_id = 2;
    w2.barycenter = {160.0, 300.0, 10.0};
    s.walls = {w1, w2};
    return s;
}

/// One tall box between the BTS and the east half of the extent.
inline Scenario boxScenario() {
    Scenario s = freeSpaceScenario();
    s.name = "box";
    Building b;
    b.name = "box";
    b.footprint = {{240.0, 180.0, 0.0}, {260.0, 180.0, 0.0}, {260.0, 220.0, 0.0},
                   {240.0, 220.0, 0.0}};
    b.height = 40.0;
    s.buildings.push_back(b);
    return s;
}

/// Smallest valid world: one building, one single-receiver RoI, two walls.
inline Scenario tinyScenario() {
    Scenario s = freeSpaceScenario();
    s.name = "tiny";
    Building b;
    b.name = "b0";
    b.footprint = {{40.0, 40.0, 0.0}, {60.0, 40.0, 0.0}, {50.0, 60.0, 0.0}};
    b.height = 10.0;
    s.buildings.push_back(b);
    s.rois[0].receivers = {{240.0, 200.0, 1.5}};
    return s;
}

/// The demo canyon restricted to its six usable walls (K=6), small enough
/// to enumerate all 64 deployments as a ground-truth table.
inline Scenario k6Scenario() {
    Scenario s = loadScenario(scenarioPath("demo_k10.json"));
    s.name = "k6";
    s.walls.resize(6);
    s.validate();
    return s;
}

}  // namespace emsplan::test

#endif
