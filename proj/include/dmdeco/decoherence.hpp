//! \file dmdeco/decoherence.hpp
//! Complex collisional decoherence rate F(dx) from the halo flux.
//!
//! Adopted model (tag \c model_tag): recoilless, elastic, Born-regime
//! collisional decoherence,
//! \f[
//!   F(\Delta x) = n \int d^3v\, f(v)\, |v| \int d\Omega'
//!     \frac{d\sigma}{d\Omega'}(\Delta q)
//!     \left[ 1 - e^{i \Delta q \cdot \Delta x / \hbar} \right],
//!   \qquad \Delta q = m (v' - v),\ |v'| = |v|.
//! \f]
//! With an isotropic cross-section the angular integral is closed:
//! sigma [1 - exp(-i m v.dx / hbar) sinc(m |v| |dx| / hbar)]. This fixes the
//! sign of Im F; only |Im Gamma| is meaningful downstream.
#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

#include "dmdeco/core.hpp"
#include "dmdeco/halo.hpp"
#include "dmdeco/scattering.hpp"
#include "dmdeco/vec3.hpp"

namespace dmdeco
{
inline constexpr std::string_view model_tag
    = "collisional-sWave-recoilless-v1";
inline constexpr std::string_view phase_convention
    = "exp(-i m v.dx/hbar)";

struct RateOptions
{
    double rel_tol = 1e-4;
    std::uint64_t max_evaluations = 100'000'000;
};

struct RateResult
{
    std::complex<double> F{};     //!< 1/s
    double quadrature_error = 0;  //!< absolute, 1/s (both components)
    double error_re = 0;          //!< absolute error on Re F
    double error_im = 0;          //!< absolute error on Im F
    std::uint64_t evaluations = 0;
};

//! Separation of length L at angle theta from the wind axis (+z), in x-z.
Vec3 separation_vector(double length, double angle_from_wind);

/*!
 * Point scatterer of cross-section sigma_n N_A^2 N^2.
 *
 * The velocity azimuth about the wind is integrated in closed form (a J0
 * factor), leaving a (speed, polar) quadrature. At large phase the polar
 * integral is closed as well: at fixed speed the halo density is
 * exponential in the polar cosine, so over the whole sphere the phase
 * factor integrates to sinh(sqrt(p.p))/sqrt(p.p). Directions beyond the
 * escape speed are then subtracted by quadrature.
 */
RateResult rate_pointlike(HaloModel const& halo,
                          WindState const& wind,
                          ScatteringModel const& model,
                          TargetComposition const& comp,
                          double m_dm,
                          Vec3 dx,
                          RateOptions const& opts = {});

/*!
 * Homogeneous sphere with coherent form factor.
 *
 * Incoherent part as in \c rate_pointlike. The coherent part takes the
 * outgoing-direction integral about the incoming momentum; its azimuth is
 * done in closed form (a J0 factor). At small phase the rest is a nested
 * (speed, polar[, azimuth], scattering angle) quadrature. At large phase the
 * incoming direction is integrated over the sphere in closed form for each
 * momentum transfer, as for the point scatterer, and the escape cap is
 * subtracted.
 */
RateResult rate_extended(HaloModel const& halo,
                         WindState const& wind,
                         ScatteringModel const& model,
                         TargetComposition const& comp,
                         double m_dm,
                         Vec3 dx,
                         RateOptions const& opts = {});

//! Dispatch on model.mode
RateResult decoherence_rate(HaloModel const& halo,
                            WindState const& wind,
                            ScatteringModel const& model,
                            TargetComposition const& comp,
                            double m_dm,
                            Vec3 dx,
                            RateOptions const& opts = {});

//! n <sigma_tot |v|>: the rate F tends to at large separation
RateResult total_scattering_rate(HaloModel const& halo,
                                 WindState const& wind,
                                 ScatteringModel const& model,
                                 TargetComposition const& comp,
                                 double m_dm,
                                 RateOptions const& opts = {});

// Gamma = F T. A negative real part within the error bar is clamped to 0;
// beyond it NumericalError is thrown.
DecoherenceExponent exponent(RateResult const& rate, double exposure);

struct AnisotropyResult
{
    double ratio = 1;
    double error = 0;
    RateResult parallel;
    RateResult perpendicular;
};

//! Re F(dx || wind) / Re F(dx perpendicular to wind)
AnisotropyResult anisotropy_ratio(HaloModel const& halo,
                                  WindState const& wind,
                                  ScatteringModel const& model,
                                  TargetComposition const& comp,
                                  double m_dm,
                                  double separation,
                                  RateOptions const& opts = {});

namespace detail
{
//! 1 - exp(-i a) J0(b) sin(y)/y, free of cancellation for small a, b, y
std::complex<double> decoherence_kernel(double a, double b, double y);

//! (1 - exp(-z)) / z for Re z >= 0
std::complex<double> expm1_ratio(std::complex<double> z);

//! sinh(sqrt(q)) / sqrt(q); the sphere average of exp(p.n) for p.p = q
std::complex<double> sinh_ratio(std::complex<double> q);
}  // namespace detail
}  // namespace dmdeco
