//! \file dmdeco/shielding.hpp
//! Atmospheric overburden and the largest cross-section that still reaches
//! a detector at a given altitude.
#pragma once

#include <string_view>
#include <vector>

namespace dmdeco
{
//! Column mass above a given altitude, tabulated (SI: m, kg/m^2).
struct AtmosphereModel
{
    struct Layer
    {
        double altitude;  //!< m
        double column;    //!< kg/m^2 above this altitude
    };
    std::vector<Layer> layers;
    double mean_nucleus_A = 14.5;

    //! Bundled 1976 US Standard Atmosphere table
    static AtmosphereModel standard();

    //! Parse "altitude_m,column_g_cm2" CSV text
    static AtmosphereModel from_csv(std::string_view text);

    // Throws InvalidInput unless altitudes increase strictly from 0, the
    // column decreases strictly and the sea-level column is 1000-1060 g/cm^2
    void validate() const;
};

/*!
 * Opacity criterion: a particle is screened once it expects more than
 * n_crit (m_A / m_dm)^p scatterings on the way down; p weights energy
 * loss by the mass ratio. extra_column adds a local shield of the same
 * composition.
 */
struct ShieldCriterion
{
    double n_crit = 1;
    double mass_exponent = 0;  //!< p in [0, 1]
    double extra_column = 0;   //!< kg/m^2

    void validate() const;
};

//! Column above altitude [m], kg/m^2. Log-linear between table rows; above
//! the top row it falls with the local scale height of the last interval.
double column_density(AtmosphereModel const& atm, double altitude);

//! sigma_n [m^2] at which the expected number of scatterings in the column
//! equals n_crit (m_A / m_dm)^p, with coherent A^2 enhancement
double max_visible_sigma(AtmosphereModel const& atm,
                         ShieldCriterion const& crit,
                         double m_dm,
                         double altitude);

//! n_crit for which the sea-level ceiling (p = 0) equals sigma [m^2]
double calibrate_n_crit(AtmosphereModel const& atm, double sigma);

//! Sea-level ceiling used for the default calibration, 10^-28.5 cm^2 [m^2]
double reference_sea_level_sigma();
}  // namespace dmdeco
