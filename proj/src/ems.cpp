#include "emsplan/ems.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace emsplan {
namespace {
constexpr double kHalfPi = 1.57079632679489661923;
}

std::vector<EmsDesign> designAll(const Scenario& scenario) {
    const double lambda = scenario.bts.wavelength();
    std::vector<EmsDesign> designs;
    designs.reserve(scenario.walls.size());
    for (const auto& wall : scenario.walls) {
        EmsDesign d;
        d.wall_id = wall.wall_id;
        d.roi_id = wall.roi_id;
        d.frame = wallFrame(wall.barycenter, wall.orientation);
        d.incidence = incidenceAngles(scenario.bts.position, d.frame);
        d.reflection = reflectionAngles(scenario.roiById(wall.roi_id).center, d.frame);
        d.panel_area = wall.panel_area;
        // The beam cannot be narrower than the panel's diffraction limit.
        d.beamwidth = std::max(scenario.beamwidth, lambda / std::sqrt(wall.panel_area));
        d.usable = d.incidence.theta < kHalfPi;
        designs.push_back(d);
    }
    return designs;
}

std::string writeDesigns(const std::vector<EmsDesign>& designs) {
    auto arr = nlohmann::json::array();
    for (const auto& d : designs) {
        nlohmann::json j;
        j["wall_id"] = d.wall_id;
        j["roi_id"] = d.roi_id;
        j["barycenter_m"] = {d.frame.origin.x, d.frame.origin.y, d.frame.origin.z};
        j["orientation_rad"] = d.frame.orientation;
        j["incidence_rad"] = {{"theta", d.incidence.theta}, {"phi", d.incidence.phi}};
        j["reflection_rad"] = {{"theta", d.reflection.theta}, {"phi", d.reflection.phi}};
        j["panel_area_m2"] = d.panel_area;
        j["beamwidth_rad"] = d.beamwidth;
        j["usable"] = d.usable;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

void saveDesigns(const std::vector<EmsDesign>& designs, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("ems: cannot write '" + path + "'");
    }
    out << writeDesigns(designs);
}

}  // namespace emsplan
