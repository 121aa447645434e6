//! \file dmdeco/scattering.hpp
//! Spin-independent s-wave elastic scattering off a homogeneous sphere of
//! identical nuclei.
#pragma once

namespace dmdeco
{
enum class ScatterMode
{
    pointlike,  //!< object treated as one point scatterer (form factor 1)
    extended,   //!< homogeneous-sphere form factor
};

struct ScatteringModel
{
    double sigma_n = 0;  //!< per-nucleon cross-section [m^2]
    ScatterMode mode = ScatterMode::extended;
};

//! Effective (N, N_A, R) description of the superposed object.
struct TargetComposition
{
    double nucleons_per_nucleus = 1;  //!< N_A
    double nucleus_count = 1;         //!< N
    double radius = 0;                //!< R [m]

    void validate() const;
};

//! 3 (sin x - x cos x) / x^3, with the series 1 - x^2/10 below x = 1e-3
double form_factor_sphere(double x);

/*!
 * Differential cross-section at momentum transfer q [kg m/s].
 *
 * \f[ \frac{d\sigma}{d\Omega} = \frac{\sigma_n}{4\pi} N_A^2
 *     \left[ N + N(N-1) F(qR/\hbar)^2 \right] \f]
 * Nuclei are taken as structureless (long wavelength); the pointlike mode
 * sets F = 1.
 */
double differential_cross_section(ScatteringModel const& model,
                                  TargetComposition const& comp,
                                  double q_transfer);

//! sigma_n N_A^2 N^2: the coherent point-scatterer cross-section
double pointlike_cross_section(ScatteringModel const& model,
                               TargetComposition const& comp);

//! \int_0^x F(y)^2 y dy, in closed form
double form_factor_sq_moment(double x);

//! <F^2> = (2 k^2)^{-1} \int_0^{2k} F(x)^2 x dx, with k = p R / hbar
double mean_form_factor_sq(double k);

struct CrossSection
{
    double value = 0;  //!< m^2
    double error = 0;  //!< roundoff estimate [m^2]
    //! Result exceeds the geometric area pi R^2 (Born formula outside its
    //! regime of validity)
    bool exceeds_geometric = false;
};

/*!
 * Total elastic cross-section for incoming speed v and DM mass m_dm.
 *
 * Integrates dsigma/dOmega over outgoing directions with |p_out| = |p_in|,
 * i.e. sigma_n N_A^2 [N + N(N-1) <F^2>], where
 * <F^2> = (2 k^2)^{-1} \int_0^{2k} F(x)^2 x dx and k = m v R / hbar.
 */
CrossSection total_cross_section(ScatteringModel const& model,
                                  TargetComposition const& comp,
                                  double speed,
                                  double m_dm);
}  // namespace dmdeco
