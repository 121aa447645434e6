//! \file dmdeco/halo.hpp
//! Standard halo model: truncated Maxwell-Boltzmann flux seen from the lab.
#pragma once

#include "dmdeco/vec3.hpp"

namespace dmdeco
{
//---------------------------------------------------------------------------//
/*!
 * Galactic dark-matter halo and the lab's motion through it (SI units).
 *
 * The wind axis is +z: the lab moves through the halo along +z, so the dark
 * matter streams past it towards -z on average. The Earth's orbital velocity
 * enters through its projection on the solar direction,
 * \f[ v_\mathrm{lab}(t) = v_\odot + v_\oplus \cos i \cos \omega (t - t_0), \f]
 * with one maximum per year at \c peak_day.
 */
struct HaloModel
{
    double mass_density;       //!< kg / m^3
    double v0;                 //!< dispersion speed [m/s]
    double v_esc;              //!< galactic escape speed [m/s]
    double v_sun;              //!< solar speed w.r.t. halo [m/s]
    double orbit_speed;        //!< Earth orbital speed [m/s]
    double orbit_inclination;  //!< orbit plane vs solar motion [rad]
    double peak_day;           //!< day-of-year of maximal lab speed

    //! 0.3 GeV/cm^3, 220, 550, 230, 29.8 km/s, 60 deg, day 152.5
    static HaloModel standard();

    // Throws InvalidInput unless rho > 0 and 0 < v0 < v_esc < c
    void validate() const;
};

//! Lab velocity through the halo at a given epoch.
struct WindState
{
    Vec3 v_lab;
    double epoch = 0;  //!< day of year

    double speed() const { return norm(v_lab); }
};

//! Day at which the orbital projection vanishes and |v_lab| = v_sun.
double mean_wind_day(HaloModel const& halo);

// n = rho / m
double number_density(HaloModel const& halo, double m_dm);

WindState wind_velocity(HaloModel const& halo, double day);

//---------------------------------------------------------------------------//
/*!
 * Lab-frame velocity density f(v), normalised over R^3.
 *
 * f(v) = exp(-|v + v_lab|^2 / v0^2) / N_esc for |v + v_lab| < v_esc.
 * The normalisation is the closed form
 * N_esc = pi^{3/2} v0^3 [erf(z) - 2 z exp(-z^2) / sqrt(pi)], z = v_esc / v0.
 */
class VelocityDistribution
{
  public:
    VelocityDistribution(HaloModel const& halo, WindState const& wind);

    double operator()(Vec3 v) const;

    //! Density at lab speed v and cos(angle to +z) mu, assuming v_lab || z
    double operator()(double speed, double mu) const;

    //! Support in speed along direction mu: [lo, hi], empty if hi <= lo.
    struct SpeedRange
    {
        double lo;
        double hi;
    };
    SpeedRange speed_range(double mu) const;

    //! Upper end of the polar support at lab speed v (lower end is -1);
    //! below -1 when no direction is allowed.
    double mu_max(double speed) const;

    //! Largest lab speed with non-zero density
    double max_speed() const { return v_esc_ + wind_speed_; }

    double wind_speed() const { return wind_speed_; }
    double v0() const { return v0_; }
    double v_esc() const { return v_esc_; }
    Vec3 v_lab() const { return v_lab_; }
    double normalisation() const { return norm_; }

  private:
    Vec3 v_lab_;
    double wind_speed_;
    double v0_;
    double v_esc_;
    double norm_;
};

// Convenience wrapper around VelocityDistribution
double velocity_pdf(HaloModel const& halo, WindState const& wind, Vec3 v);

//! Mean lab-frame speed <|v|> by 2-D quadrature
double mean_speed(HaloModel const& halo,
                  WindState const& wind,
                  double rel_tol = 1e-10);
}  // namespace dmdeco
