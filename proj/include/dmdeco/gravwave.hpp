//! \file dmdeco/gravwave.hpp
//! Decoherence by gravitational bremsstrahlung: Gamma = alpha_G beta^4 with
//! alpha_G = G m^2 / (hbar c), order-unity prefactor set to 1.
#pragma once

#include <string_view>

#include "dmdeco/core.hpp"

namespace dmdeco
{
inline constexpr std::string_view graviton_model_tag
    = "alphaG-beta4-prefactor1";

struct GravSuperposition
{
    double mass = 0;  //!< kg
    double beta = 0;  //!< v / c in [0, 1)
    //! Path extent [m] and duration [s]; carried as metadata only
    double extent = 0;
    double duration = 0;

    void validate() const;
};

//! G m^2 / (hbar c)
double gravitational_coupling(double mass);

DecoherenceExponent grav_exponent(GravSuperposition const& s);

//! m with grav_exponent = target at speed beta: m_P sqrt(target) / beta^2
double planck_crossover_mass(double beta, double target_exponent);
}  // namespace dmdeco
