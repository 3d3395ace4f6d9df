#include "emsplan/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace emsplan {
namespace {
constexpr double kPi = 3.14159265358979323846;
}

LocalFrame wallFrame(const Vec3& barycenter, double orientation) {
    return {barycenter, orientation};
}

AnglePair cartToPolar(const Vec3& r) {
    const double n = norm(r);
    if (n == 0.0) {
        throw std::domain_error("cartToPolar: zero vector has no direction");
    }
    AnglePair out;
    out.theta = std::acos(r.z / n);
    // atan(y/x) loses the half-plane; the two-argument form resolves the
    // quadrant. On the polar axis (x = y = 0) the azimuth is conventionally 0.
    out.phi = (r.x == 0.0 && r.y == 0.0) ? 0.0 : std::atan2(r.y, r.x);
    if (out.phi == -kPi) {
        out.phi = kPi;  // keep phi in (-pi, pi]
    }
    return out;
}

Vec3 polarToCart(const AnglePair& a) {
    return {std::sin(a.theta) * std::cos(a.phi),
            std::sin(a.theta) * std::sin(a.phi),
            std::cos(a.theta)};
}

Vec3 toLocal(const Vec3& r, const LocalFrame& frame) {
    const double dx = r.x - frame.origin.x;
    const double dy = r.y - frame.origin.y;
    const double dz = r.z - frame.origin.z;
    const double c = std::cos(frame.orientation);
    const double s = std::sin(frame.orientation);
    return {dx * c + dy * s,   // along the wall
            dz,                // vertical
            dx * s - dy * c};  // outward normal
}

AnglePair incidenceAngles(const Vec3& bts_position, const LocalFrame& frame) {
    const Vec3 local = toLocal(bts_position, frame);
    if (norm(local) == 0.0) {
        throw std::domain_error("incidenceAngles: BTS coincides with the wall barycenter");
    }
    return cartToPolar(local);
}

AnglePair reflectionAngles(const Vec3& roi_center, const LocalFrame& frame) {
    const Vec3 local = toLocal(roi_center, frame);
    if (norm(local) == 0.0) {
        throw std::domain_error("reflectionAngles: RoI center coincides with the wall barycenter");
    }
    return cartToPolar(local);
}

Vec3 incidentWaveVector(const LocalFrame& frame, const Vec3& bts_position, double wavelength) {
    if (!(wavelength > 0.0)) {
        throw std::domain_error("incidentWaveVector: wavelength must be positive");
    }
    const AnglePair inc = incidenceAngles(bts_position, frame);
    return polarToCart(inc) * (-2.0 * kPi / wavelength);
}

}  // namespace emsplan
