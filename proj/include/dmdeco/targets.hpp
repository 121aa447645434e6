//! \file dmdeco/targets.hpp
//! Superposed objects: presets, geometry and exposure scaling.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dmdeco/scattering.hpp"
#include "dmdeco/vec3.hpp"

namespace dmdeco
{
enum class Orientation
{
    parallel,       //!< dx along the wind
    perpendicular,  //!< dx across the wind
    angle,          //!< dx at TargetSpec::angle from the wind
};

std::string_view to_string(Orientation o);
Orientation orientation_from_string(std::string_view s);

//! Provenance tag for values not quoted for a preset
inline constexpr std::string_view artifact_default = "artifact-default";

/*!
 * A superposed object and its shot parameters (SI units).
 *
 * The object is N identical nuclei of A nucleons in a homogeneous sphere;
 * N = total_mass / (A amu) need not be an integer.
 */
struct TargetSpec
{
    std::string name;
    std::string material;
    double total_mass = 0;    //!< kg
    double nucleus_A = 1;     //!< nucleons per nucleus
    double radius = 0;        //!< m
    double bulk_density = 0;  //!< kg/m^3, 0 if unknown
    double separation = 0;    //!< |dx| [m]
    Orientation orientation = Orientation::parallel;
    double angle = 0;         //!< rad from the wind, for Orientation::angle
    double exposure = 0;      //!< T per shot [s]
    double altitude = 0;      //!< m
    std::uint64_t shots = 1;
    //! field name -> "stated" or artifact_default
    std::map<std::string, std::string> provenance;

    double nucleus_count() const;
    TargetComposition composition() const;
    //! Angle between dx and the wind axis
    double wind_angle() const;
    Vec3 separation_vector() const;

    // Throws InvalidInput on non-physical fields
    void validate() const;
};

//! Radius of a homogeneous sphere of given mass and bulk density
double radius_from_bulk_density(double mass, double bulk_density);

//! base_T * mass / base_mass: exposure growing with object size
double time_domain_exposure(double base_T, double base_mass, double mass);

/*!
 * The same experiment with a heavier or lighter object: the radius follows
 * the bulk density (or mass^{1/3} if none is known) and the exposure follows
 * time_domain_exposure.
 */
TargetSpec scale_target_mass(TargetSpec const& spec, double mass);

//! Presets parsed from the bundled defaults file
std::vector<TargetSpec> builtin_targets();

//! Preset by name; throws InvalidInput if unknown
TargetSpec builtin_target(std::string_view name);
}  // namespace dmdeco
