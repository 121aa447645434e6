//! \file dmdeco/montecarlo.hpp
//! Sampling estimate of F, and shot-by-shot campaign simulation.
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "dmdeco/decoherence.hpp"
#include "dmdeco/halo.hpp"
#include "dmdeco/scattering.hpp"
#include "dmdeco/targets.hpp"

namespace dmdeco
{
struct McEstimate
{
    std::complex<double> F{};  //!< 1/s
    double se_re = 0;          //!< standard error of Re F
    double se_im = 0;          //!< standard error of Im F
    std::uint64_t samples = 0;
    std::uint64_t attempts = 0;  //!< galactic draws including rejections
};

/*!
 * F by direct sampling of the same integrand the quadrature uses.
 *
 * Galactic velocities are Gaussian per component (variance v0^2/2) and
 * rejected at the escape speed; the lab velocity is u - v_lab. The
 * incoherent part uses its closed angular average; the coherent part
 * samples the outgoing direction uniformly. Sample i draws from Philox
 * stream i, so the estimate is independent of the thread count.
 */
McEstimate mc_rate(HaloModel const& halo,
                   WindState const& wind,
                   ScatteringModel const& model,
                   TargetComposition const& comp,
                   double m_dm,
                   Vec3 dx,
                   std::uint64_t samples,
                   std::uint64_t seed,
                   unsigned threads = 1);

//! Exact (Clopper-Pearson) interval for a binomial proportion
struct Interval
{
    double lo = 0;
    double hi = 1;
};
Interval clopper_pearson(std::uint64_t successes,
                         std::uint64_t trials,
                         double confidence);

//! Central acceptance region [lo, hi] of successes for Binomial(n, p)
struct CountInterval
{
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};
CountInterval
binomial_acceptance(std::uint64_t trials, double p, double confidence);

struct ShotRecord
{
    std::uint64_t shot = 0;
    double day = 0;
    std::complex<double> gamma{1.0, 0.0};
    bool dim = false;
};

struct CampaignSummary
{
    std::uint64_t shots = 0;
    std::uint64_t dim = 0;
    double dim_fraction = 0;
    Interval ci99;  //!< Clopper-Pearson 99% interval on the dim fraction
    std::uint64_t rate_evaluations = 0;  //!< distinct wind speeds computed
    std::uint64_t unconverged_rates = 0;  //!< of which partial estimates
};

struct CampaignResult
{
    std::vector<ShotRecord> records;
    CampaignSummary summary;
    std::uint64_t seed = 0;
};

struct CampaignInputs
{
    TargetSpec target;  //!< exposure per shot, separation
    HaloModel halo;
    ScatteringModel model;
    double m_dm = 0;  //!< kg
    std::uint64_t shots = 1;
    double start_day = 0;
    double window_days = 365.25;
    double gamma_background = 0;  //!< constant extra Re Gamma per shot
    std::uint64_t seed = 1;
    RateOptions rate;
    //! Relative error up to which a partial quadrature estimate is used
    double accept_partial = 0.01;
};

//! Wind speeds are cached on a 0.1 km/s grid
inline constexpr double campaign_speed_step = 100.0;  // m/s

/*!
 * Shots spread uniformly over the window: shot i at start + window i / n.
 * F is evaluated at the wind speed rounded to campaign_speed_step; the shot
 * is dim if its uniform draw (stream i) falls below (1 - Re gamma) / 2.
 */
CampaignResult simulate_campaign(CampaignInputs const& in, unsigned threads = 1);

//! "shot,day,gamma_re,gamma_im,outcome"
std::string campaign_csv(CampaignResult const& result);
}  // namespace dmdeco
