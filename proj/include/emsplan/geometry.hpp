#ifndef EMSPLAN_GEOMETRY_HPP
#define EMSPLAN_GEOMETRY_HPP

#include "emsplan/vec3.hpp"

namespace emsplan {

/// Elevation/azimuth pair: theta in [0, pi] measured from the local z' axis
/// (the outward wall normal), phi in (-pi, pi] around it.
struct AnglePair {
    double theta = 0.0;
    double phi = 0.0;
};

/// Wall-attached frame. Axes in global coordinates:
///   x' = (cos a, sin a, 0)   along the wall
///   y' = (0, 0, 1)           vertical
///   z' = (sin a, -cos a, 0)  outward wall normal
/// a is the wall orientation versus the global x-axis.
struct LocalFrame {
    Vec3 origin;
    double orientation = 0.0;
};

LocalFrame wallFrame(const Vec3& barycenter, double orientation);

/// theta = arccos(z/|r|), phi = quadrant-resolved azimuth of (x, y).
/// Throws std::domain_error on the zero vector.
AnglePair cartToPolar(const Vec3& r);

/// Unit direction for an angle pair: (sin t cos p, sin t sin p, cos t).
Vec3 polarToCart(const AnglePair& a);

/// Rotate-translate r into the wall frame (an isometry).
Vec3 toLocal(const Vec3& r, const LocalFrame& frame);

/// Incidence angles of the BTS as seen from the wall frame.
/// Throws std::domain_error if the BTS coincides with the frame origin.
AnglePair incidenceAngles(const Vec3& bts_position, const LocalFrame& frame);

/// Design reflection direction toward a RoI center, same contract.
AnglePair reflectionAngles(const Vec3& roi_center, const LocalFrame& frame);

/// Plane-wave vector of the incident field, expressed in the wall frame:
/// magnitude 2 pi / lambda, direction opposite the BTS direction.
/// Throws std::domain_error for lambda <= 0.
Vec3 incidentWaveVector(const LocalFrame& frame, const Vec3& bts_position, double wavelength);

}  // namespace emsplan

#endif
