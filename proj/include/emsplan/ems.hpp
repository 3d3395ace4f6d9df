#ifndef EMSPLAN_EMS_HPP
#define EMSPLAN_EMS_HPP

#include <string>
#include <vector>

#include "emsplan/geometry.hpp"
#include "emsplan/scenario.hpp"

namespace emsplan {

/// Macro-scale description of one candidate panel: the angle pairs that
/// parameterize its designed reflected beam. A wall whose outward normal
/// faces away from the BTS (theta_inc >= pi/2) cannot intercept the incident
/// wave and is flagged unusable; its installation is forced off downstream.
struct EmsDesign {
    int wall_id = 0;
    int roi_id = 0;
    LocalFrame frame;
    AnglePair incidence;   // (theta_psi, phi_psi), BTS seen from the wall
    AnglePair reflection;  // (theta_omega, phi_omega), toward the RoI center
    double panel_area = 0.0;  // m^2
    double beamwidth = 0.0;   // psi_0, rad, already floored at lambda/sqrt(A)
    bool usable = true;
};

/// One design per candidate wall, in wall (chromosome bit) order.
std::vector<EmsDesign> designAll(const Scenario& scenario);

std::string writeDesigns(const std::vector<EmsDesign>& designs);
void saveDesigns(const std::vector<EmsDesign>& designs, const std::string& path);

}  // namespace emsplan

#endif
