//! \file dmdeco/scan.hpp
//! Exclusion band in the (m_dm, sigma_n) plane: the floor is the smallest
//! detectable cross-section, the ceiling the largest one the overburden lets
//! through.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dmdeco/decoherence.hpp"
#include "dmdeco/halo.hpp"
#include "dmdeco/scattering.hpp"
#include "dmdeco/shielding.hpp"
#include "dmdeco/targets.hpp"

namespace dmdeco
{
//! Per-mass status bits, written as '|'-separated names
enum ScanFlag : unsigned
{
    flag_none = 0,
    flag_insensitive = 1u << 0,        //!< Re Gamma = 0: no floor
    flag_band_empty = 1u << 1,         //!< floor above ceiling
    flag_unconverged = 1u << 2,        //!< floor from a partial estimate
    flag_quadrature_failed = 1u << 3,  //!< no usable estimate
};

std::string flags_to_string(unsigned flags);

//! Points from min to max (eV), log-spaced, both ends included exactly
std::vector<double>
log_mass_grid(double min_eV, double max_eV, int points_per_decade);

struct FloorOptions
{
    //! Exposure of the whole campaign (shots x T) rather than one shot
    bool per_campaign = true;
    RateOptions rate;
    //! A partial estimate with at most this relative error is still used
    double accept_partial = 0.01;
};

struct FloorResult
{
    double sigma = 0;  //!< m^2; NaN unless flags allow a number
    double re_gamma_ref = 0;  //!< Re Gamma at model.sigma_n
    unsigned flags = flag_none;
    RateResult rate;
};

//! Exposure multiplying F: T, times shots when per_campaign
double campaign_exposure(TargetSpec const& target, bool per_campaign);

/*!
 * sigma_n with Re Gamma = 1, from one evaluation at model.sigma_n.
 *
 * Gamma is linear in sigma_n, so floor = sigma_ref / Re Gamma(sigma_ref).
 */
FloorResult sensitivity_floor(TargetSpec const& target,
                              HaloModel const& halo,
                              WindState const& wind,
                              ScatteringModel const& model,
                              double m_dm,
                              FloorOptions const& opts = {});

/*!
 * Root of re_gamma(sigma) = 1 by bisection in log sigma.
 *
 * The bracket [lo, hi] must straddle the root; re_gamma must be increasing.
 */
double bisection_floor(std::function<double(double)> const& re_gamma,
                       double lo,
                       double hi,
                       double rel_tol = 1e-6);

struct ScanPoint
{
    double mass_eV = 0;
    double sigma_floor_cm2 = 0;
    double sigma_ceiling_cm2 = 0;
    unsigned flags = flag_none;
    std::string message;  //!< failure diagnostic, not written to CSV
};

struct ExclusionGrid
{
    std::vector<ScanPoint> points;
};

struct ScanInputs
{
    TargetSpec target;
    HaloModel halo;
    WindState wind;
    ScatteringModel model;  //!< sigma_n is the reference sigma
    AtmosphereModel atmosphere;
    ShieldCriterion shield;
    FloorOptions floor;
};

//! Called once per finished mass, from the worker that computed it
using ScanProgress = std::function<void(ScanPoint const&)>;

/*!
 * Floor and ceiling at each mass. Failures are recorded in the point's
 * flags; results do not depend on the thread count.
 */
ExclusionGrid exclusion_scan(ScanInputs const& in,
                             std::vector<double> const& masses_eV,
                             unsigned threads = 1,
                             ScanProgress const& progress = {});

//! "mass_eV,sigma_floor_cm2,sigma_ceiling_cm2,flags" with round-trip numbers
std::string scan_csv(ExclusionGrid const& grid);
}  // namespace dmdeco
