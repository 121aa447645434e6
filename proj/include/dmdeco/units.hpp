//! \file dmdeco/units.hpp
//! Physical constants (CODATA 2018) and boundary-unit conversions.
//!
//! Everything inside the library is SI. The helpers here are the only place
//! where amu, eV/c^2, km/s, cm^2 and GeV/cm^3 are converted.
#pragma once

#include <cmath>
#include <numbers>

namespace dmdeco
{
namespace constants
{
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double c_light = 299792458.0;          // m / s
inline constexpr double G_newton = 6.67430e-11;         // m^3 kg^-1 s^-2
inline constexpr double amu = 1.66053906660e-27;        // kg
inline constexpr double eV = 1.602176634e-19;           // J
inline constexpr double standard_gravity = 9.80665;     // m / s^2
inline constexpr double standard_pressure = 101325.0;   // Pa
inline constexpr double seconds_per_day = 86400.0;
inline constexpr double days_per_year = 365.25;

//! sqrt(hbar c / G)
inline double planck_mass()
{
    return std::sqrt(hbar * c_light / G_newton);
}
}  // namespace constants

namespace units
{
inline constexpr double km_per_s = 1.0e3;    // m / s
inline constexpr double cm2 = 1.0e-4;        // m^2
inline constexpr double nm = 1.0e-9;         // m
inline constexpr double km = 1.0e3;          // m
inline constexpr double microgram = 1.0e-9;  // kg
inline constexpr double degree = std::numbers::pi / 180.0;

//! Mass of energy-equivalent E [eV] in kg
constexpr double mass_from_ev(double ev)
{
    return ev * constants::eV / (constants::c_light * constants::c_light);
}
constexpr double mass_to_ev(double kg)
{
    return kg * constants::c_light * constants::c_light / constants::eV;
}
constexpr double mass_from_amu(double amu)
{
    return amu * constants::amu;
}
constexpr double mass_to_amu(double kg)
{
    return kg / constants::amu;
}
//! Mass density from GeV/cm^3 to kg/m^3
constexpr double density_from_gev_cm3(double gev_cm3)
{
    return mass_from_ev(gev_cm3 * 1.0e9) / 1.0e-6;
}
constexpr double density_to_gev_cm3(double kg_m3)
{
    return mass_to_ev(kg_m3 * 1.0e-6) * 1.0e-9;
}
//! Column density g/cm^2 <-> kg/m^2
constexpr double column_from_g_cm2(double g_cm2)
{
    return g_cm2 * 10.0;
}
constexpr double column_to_g_cm2(double kg_m2)
{
    return kg_m2 / 10.0;
}
//! Bulk density g/cm^3 <-> kg/m^3
constexpr double bulk_density_from_g_cm3(double g_cm3)
{
    return g_cm3 * 1.0e3;
}
}  // namespace units
}  // namespace dmdeco
