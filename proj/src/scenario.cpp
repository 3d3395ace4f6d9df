#include "emsplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace emsplan {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedOfLight = 299792458.0;  // m/s
constexpr double kGeomTol = 1e-9;

double degToRad(double deg) { return deg * kPi / 180.0; }
double radToDeg(double rad) { return rad * 180.0 / kPi; }

[[noreturn]] void fail(const std::string& entity, const std::string& what) {
    throw ValidationError(entity + ": " + what);
}

// Proper crossing test between open segments (a1,a2) and (b1,b2), 2D.
bool segmentsCross(const Vec3& a1, const Vec3& a2, const Vec3& b1, const Vec3& b2) {
    const auto orient = [](const Vec3& p, const Vec3& q, const Vec3& r) {
        return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    };
    const double o1 = orient(a1, a2, b1);
    const double o2 = orient(a1, a2, b2);
    const double o3 = orient(b1, b2, a1);
    const double o4 = orient(b1, b2, a2);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) &&
           o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

void checkSimplePolygon(const std::vector<Vec3>& poly, const std::string& entity) {
    if (poly.size() < 3) {
        fail(entity, "footprint needs at least 3 vertices");
    }
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip adjacent edges (shared vertex).
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) {
                continue;
            }
            if (segmentsCross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
                fail(entity, "footprint is self-intersecting");
            }
        }
    }
}

Vec3 parseVec3(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) {
        fail(field, "expected an array of 3 numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Vec3 parseVec2(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2) {
        fail(field, "expected an array of 2 numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), 0.0};
}

const nlohmann::json& requireField(const nlohmann::json& j, const std::string& key,
                                   const std::string& entity) {
    const auto it = j.find(key);
    if (it == j.end()) {
        fail(entity, "missing required field '" + key + "'");
    }
    return *it;
}

double normalizeAngle(double rad) {
    double a = std::fmod(rad, 2.0 * kPi);
    if (a < 0.0) {
        a += 2.0 * kPi;
    }
    return a;
}

}  // namespace

double BaseStation::wavelength() const { return kSpeedOfLight / frequency; }

int Scenario::totalReceivers() const {
    std::size_t m = 0;
    for (const auto& roi : rois) {
        m += roi.receivers.size();
    }
    return static_cast<int>(m);
}

const RegionOfInterest& Scenario::roiById(int id) const {
    for (const auto& roi : rois) {
        if (roi.id == id) {
            return roi;
        }
    }
    throw ValidationError("roi " + std::to_string(id) + ": not defined");
}

void Scenario::validate() const {
    if (!(extent.side > 0.0)) {
        fail("extent", "side must be positive");
    }
    if (!(grid_spacing_x > 0.0) || !(grid_spacing_y > 0.0)) {
        fail("grid_spacing", "spacing must be positive");
    }
    if (coverage_threshold_dbm == 0.0) {
        fail("coverage_threshold_dbm", "threshold of 0 dBm is not allowed "
             "(the coverage term normalizes by |P_th|)");
    }
    for (const auto& b : buildings) {
        const std::string entity = "building '" + b.name + "'";
        checkSimplePolygon(b.footprint, entity);
        if (!(b.height > 0.0)) {
            fail(entity, "height must be positive");
        }
        if (b.permittivity < 1.0) {
            fail(entity, "permittivity must be >= 1");
        }
        if (b.conductivity < 0.0) {
            fail(entity, "conductivity must be >= 0");
        }
    }
    if (bts.sector_count < 1) {
        fail("bts", "needs at least one sector");
    }
    if (bts.sector_azimuths.size() != static_cast<std::size_t>(bts.sector_count)) {
        fail("bts", "sector_azimuths length must equal sector count");
    }
    if (!(bts.sector_width > 0.0) || bts.sector_width > 2.0 * kPi) {
        fail("bts", "sector width must be in (0, 360] deg");
    }
    if (!(bts.input_power > 0.0)) {
        fail("bts", "input power must be positive");
    }
    if (!(bts.frequency > 0.0)) {
        fail("bts", "frequency must be positive");
    }
    std::set<int> roi_ids;
    for (const auto& roi : rois) {
        const std::string entity = "roi " + std::to_string(roi.id);
        if (!roi_ids.insert(roi.id).second) {
            fail(entity, "duplicate id");
        }
        if (roi.receivers.empty()) {
            fail(entity, "needs at least one receiver");
        }
        if (!(roi.area > 0.0)) {
            fail(entity, "area must be positive");
        }
        for (const auto& r : roi.receivers) {
            if (std::abs(r.z - receiver_height) > kGeomTol) {
                fail(entity, "receiver height differs from scenario receiver_height");
            }
            if (!extent.contains(r.x, r.y)) {
                fail(entity, "receiver outside extent");
            }
        }
    }
    std::set<std::pair<int, int>> wall_ids;
    for (const auto& w : walls) {
        const std::string entity =
            "wall (" + std::to_string(w.wall_id) + "," + std::to_string(w.roi_id) + ")";
        if (!wall_ids.insert({w.roi_id, w.wall_id}).second) {
            fail(entity, "duplicate (wall_id, roi_id)");
        }
        if (roi_ids.count(w.roi_id) == 0) {
            fail(entity, "references undefined roi_id");
        }
        if (std::abs(w.barycenter.z - (w.wall_height - 2.0)) > kGeomTol) {
            fail(entity, "barycenter z must equal wall_height - 2 (installation quota)");
        }
        if (w.orientation < 0.0 || w.orientation >= 2.0 * kPi) {
            fail(entity, "orientation must lie in [0, 2pi)");
        }
        if (!(w.panel_area > 0.0)) {
            fail(entity, "panel area must be positive");
        }
        if (!extent.contains(w.barycenter.x, w.barycenter.y)) {
            fail(entity, "barycenter outside extent");
        }
        if (distance(w.barycenter, bts.position) < kGeomTol) {
            fail(entity, "barycenter coincides with the BTS position");
        }
    }
    if (!(penetration_loss_db >= 0.0)) {
        fail("penetration_loss_db", "must be >= 0");
    }
    if (!(beamwidth > 0.0)) {
        fail("beamwidth", "must be positive");
    }
}

Scenario parseScenario(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("scenario: JSON parse failure: ") + e.what());
    }

    Scenario s;
    try {
        s.name = j.value("name", std::string("unnamed"));

        const auto& ext = requireField(j, "extent", "scenario");
        s.extent.x_min = requireField(ext, "x_min", "extent").get<double>();
        s.extent.y_min = requireField(ext, "y_min", "extent").get<double>();
        s.extent.side = requireField(ext, "side", "extent").get<double>();

        const auto& spacing = requireField(j, "grid_spacing_m", "scenario");
        s.grid_spacing_x = requireField(spacing, "dx", "grid_spacing_m").get<double>();
        s.grid_spacing_y = requireField(spacing, "dy", "grid_spacing_m").get<double>();

        s.coverage_threshold_dbm =
            requireField(j, "coverage_threshold_dbm", "scenario").get<double>();
        s.receiver_height = j.value("receiver_height_m", 1.5);
        s.penetration_loss_db = j.value("penetration_loss_db", 12.0);
        s.beamwidth = degToRad(j.value("beamwidth_deg", 5.0));

        const auto& bts = requireField(j, "bts", "scenario");
        s.bts.position = parseVec3(requireField(bts, "position_m", "bts"), "bts.position_m");
        for (const auto& az : requireField(bts, "sector_azimuths_deg", "bts")) {
            s.bts.sector_azimuths.push_back(degToRad(az.get<double>()));
        }
        s.bts.sector_count = static_cast<int>(s.bts.sector_azimuths.size());
        s.bts.sector_width = degToRad(requireField(bts, "sector_width_deg", "bts").get<double>());
        s.bts.downtilt = degToRad(requireField(bts, "downtilt_deg", "bts").get<double>());
        s.bts.input_power = requireField(bts, "input_power_w", "bts").get<double>();
        s.bts.max_gain_dbi = requireField(bts, "max_gain_dbi", "bts").get<double>();
        s.bts.frequency = requireField(bts, "frequency_hz", "bts").get<double>();

        for (const auto& bj : j.value("buildings", nlohmann::json::array())) {
            Building b;
            b.name = bj.value("name", std::string("building") +
                                           std::to_string(s.buildings.size()));
            for (const auto& v : requireField(bj, "footprint_m", b.name)) {
                b.footprint.push_back(parseVec2(v, b.name + ".footprint_m"));
            }
            b.height = requireField(bj, "height_m", b.name).get<double>();
            b.permittivity = bj.value("permittivity", 4.0);
            b.conductivity = bj.value("conductivity_s_per_m", 1e-2);
            s.buildings.push_back(std::move(b));
        }

        for (const auto& rj : requireField(j, "rois", "scenario")) {
            RegionOfInterest roi;
            roi.id = requireField(rj, "id", "roi").get<int>();
            const std::string entity = "roi " + std::to_string(roi.id);
            roi.center = parseVec3(requireField(rj, "center_m", entity), entity + ".center_m");
            for (const auto& r : requireField(rj, "receivers_m", entity)) {
                roi.receivers.push_back(parseVec3(r, entity + ".receivers_m"));
            }
            roi.area = requireField(rj, "area_m2", entity).get<double>();
            s.rois.push_back(std::move(roi));
        }

        for (const auto& wj : requireField(j, "walls", "scenario")) {
            CandidateWall w;
            w.wall_id = requireField(wj, "wall_id", "wall").get<int>();
            w.roi_id = requireField(wj, "roi_id", "wall").get<int>();
            const std::string entity =
                "wall (" + std::to_string(w.wall_id) + "," + std::to_string(w.roi_id) + ")";
            w.barycenter = parseVec3(requireField(wj, "barycenter_m", entity),
                                     entity + ".barycenter_m");
            w.orientation =
                normalizeAngle(degToRad(requireField(wj, "orientation_deg", entity).get<double>()));
            w.wall_height = requireField(wj, "wall_height_m", entity).get<double>();
            w.panel_area = requireField(wj, "panel_area_m2", entity).get<double>();
            s.walls.push_back(w);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("scenario: malformed field: ") + e.what());
    }

    s.validate();
    return s;
}

Scenario loadScenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("scenario: cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseScenario(buf.str());
}

std::string writeScenario(const Scenario& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["extent"] = {{"x_min", s.extent.x_min}, {"y_min", s.extent.y_min}, {"side", s.extent.side}};
    j["grid_spacing_m"] = {{"dx", s.grid_spacing_x}, {"dy", s.grid_spacing_y}};
    j["coverage_threshold_dbm"] = s.coverage_threshold_dbm;
    j["receiver_height_m"] = s.receiver_height;
    j["penetration_loss_db"] = s.penetration_loss_db;
    j["beamwidth_deg"] = radToDeg(s.beamwidth);

    nlohmann::json bts;
    bts["position_m"] = {s.bts.position.x, s.bts.position.y, s.bts.position.z};
    auto azimuths = nlohmann::json::array();
    for (double a : s.bts.sector_azimuths) {
        azimuths.push_back(radToDeg(a));
    }
    bts["sector_azimuths_deg"] = azimuths;
    bts["sector_width_deg"] = radToDeg(s.bts.sector_width);
    bts["downtilt_deg"] = radToDeg(s.bts.downtilt);
    bts["input_power_w"] = s.bts.input_power;
    bts["max_gain_dbi"] = s.bts.max_gain_dbi;
    bts["frequency_hz"] = s.bts.frequency;
    j["bts"] = std::move(bts);

    auto buildings = nlohmann::json::array();
    for (const auto& b : s.buildings) {
        nlohmann::json bj;
        bj["name"] = b.name;
        auto fp = nlohmann::json::array();
        for (const auto& v : b.footprint) {
            fp.push_back({v.x, v.y});
        }
        bj["footprint_m"] = std::move(fp);
        bj["height_m"] = b.height;
        bj["permittivity"] = b.permittivity;
        bj["conductivity_s_per_m"] = b.conductivity;
        buildings.push_back(std::move(bj));
    }
    j["buildings"] = std::move(buildings);

    auto rois = nlohmann::json::array();
    for (const auto& roi : s.rois) {
        nlohmann::json rj;
        rj["id"] = roi.id;
        rj["center_m"] = {roi.center.x, roi.center.y, roi.center.z};
        auto rx = nlohmann::json::array();
        for (const auto& r : roi.receivers) {
            rx.push_back({r.x, r.y, r.z});
        }
        rj["receivers_m"] = std::move(rx);
        rj["area_m2"] = roi.area;
        rois.push_back(std::move(rj));
    }
    j["rois"] = std::move(rois);

    auto walls = nlohmann::json::array();
    for (const auto& w : s.walls) {
        nlohmann::json wj;
        wj["wall_id"] = w.wall_id;
        wj["roi_id"] = w.roi_id;
        wj["barycenter_m"] = {w.barycenter.x, w.barycenter.y, w.barycenter.z};
        wj["orientation_deg"] = radToDeg(w.orientation);
        wj["wall_height_m"] = w.wall_height;
        wj["panel_area_m2"] = w.panel_area;
        walls.push_back(std::move(wj));
    }
    j["walls"] = std::move(walls);

    return j.dump(2) + "\n";
}

void saveScenario(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("scenario: cannot write '" + path + "'");
    }
    out << writeScenario(scenario);
}

std::pair<std::size_t, std::size_t> gridShape(const Scenario& s) {
    if (!(s.grid_spacing_x > 0.0) || !(s.grid_spacing_y > 0.0)) {
        throw ValidationError("grid_spacing: spacing must be positive");
    }
    const auto count = [side = s.extent.side](double d) {
        return static_cast<std::size_t>(std::floor(side / d + kGeomTol)) + 1;
    };
    return {count(s.grid_spacing_x), count(s.grid_spacing_y)};
}

std::vector<Vec3> receiverGrid(const Scenario& s) {
    const auto [nx, ny] = gridShape(s);
    std::vector<Vec3> grid;
    grid.reserve(nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            grid.push_back({s.extent.x_min + static_cast<double>(ix) * s.grid_spacing_x,
                            s.extent.y_min + static_cast<double>(iy) * s.grid_spacing_y,
                            s.receiver_height});
        }
    }
    return grid;
}

void writeGridCsv(const std::vector<Vec3>& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("grid: cannot write '" + path + "'");
    }
    out << "x,y,z\n";
    out.precision(12);
    for (const auto& p : grid) {
        out << p.x << ',' << p.y << ',' << p.z << '\n';
    }
}

}  // namespace emsplan
