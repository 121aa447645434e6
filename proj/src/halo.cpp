#include "dmdeco/halo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dmdeco/error.hpp"
#include "dmdeco/quadrature.hpp"
#include "dmdeco/units.hpp"

namespace dmdeco
{
HaloModel HaloModel::standard()
{
    using namespace units;
    return HaloModel{density_from_gev_cm3(0.3),
                     220 * km_per_s,
                     550 * km_per_s,
                     230 * km_per_s,
                     29.8 * km_per_s,
                     60 * degree,
                     152.5};
}

void HaloModel::validate() const
{
    if (!(mass_density > 0))
        throw InvalidInput("halo mass density must be positive");
    if (!(v0 > 0 && v0 < v_esc && v_esc < constants::c_light))
    {
        throw InvalidInput(
            fmt::format("halo speeds must satisfy 0 < v0 < v_esc < c (got "
                        "v0 = {:g}, v_esc = {:g} m/s)",
                        v0,
                        v_esc));
    }
    if (!(v_sun >= 0 && orbit_speed >= 0 && orbit_speed <= v_sun))
    {
        throw InvalidInput(
            "halo requires 0 <= orbit_speed <= v_sun");
    }
    if (!std::isfinite(orbit_inclination) || !std::isfinite(peak_day))
        throw InvalidInput("halo orbit angle and peak day must be finite");
}

double mean_wind_day(HaloModel const& halo)
{
    return halo.peak_day - constants::days_per_year / 4;
}

double number_density(HaloModel const& halo, double m_dm)
{
    if (!(m_dm > 0))
        throw InvalidInput("dark matter mass must be positive");
    return halo.mass_density / m_dm;
}

WindState wind_velocity(HaloModel const& halo, double day)
{
    if (!std::isfinite(day))
        throw InvalidInput("epoch day must be finite");
    double const phase = 2 * std::numbers::pi * (day - halo.peak_day)
                         / constants::days_per_year;
    double const speed = halo.v_sun
                         + halo.orbit_speed * std::cos(halo.orbit_inclination)
                               * std::cos(phase);
    return WindState{Vec3{0, 0, speed}, day};
}

//---------------------------------------------------------------------------//
VelocityDistribution::VelocityDistribution(HaloModel const& halo,
                                           WindState const& wind)
    : v_lab_(wind.v_lab)
    , wind_speed_(wind.speed())
    , v0_(halo.v0)
    , v_esc_(halo.v_esc)
{
    halo.validate();
    double const z = v_esc_ / v0_;
    norm_ = std::pow(std::numbers::pi, 1.5) * v0_ * v0_ * v0_
            * (std::erf(z)
               - 2 * z * std::exp(-z * z) * std::numbers::inv_sqrtpi);
}

double VelocityDistribution::operator()(Vec3 v) const
{
    double const u2 = dot(v + v_lab_, v + v_lab_);
    if (!(u2 < v_esc_ * v_esc_))
        return 0;
    return std::exp(-u2 / (v0_ * v0_)) / norm_;
}

double VelocityDistribution::operator()(double speed, double mu) const
{
    double const u2 = speed * speed + 2 * speed * wind_speed_ * mu
                      + wind_speed_ * wind_speed_;
    if (!(u2 < v_esc_ * v_esc_))
        return 0;
    return std::exp(-u2 / (v0_ * v0_)) / norm_;
}

auto VelocityDistribution::speed_range(double mu) const -> SpeedRange
{
    double const disc = v_esc_ * v_esc_
                        - wind_speed_ * wind_speed_ * (1 - mu * mu);
    if (disc <= 0)
        return {0, 0};
    double const root = std::sqrt(disc);
    return {std::max(0.0, -wind_speed_ * mu - root),
            std::max(0.0, -wind_speed_ * mu + root)};
}

double VelocityDistribution::mu_max(double speed) const
{
    double const num = v_esc_ * v_esc_ - speed * speed
                       - wind_speed_ * wind_speed_;
    double const den = 2 * speed * wind_speed_;
    if (den == 0)
        return num > 0 ? 1.0 : -2.0;
    return std::min(1.0, num / den);
}

double velocity_pdf(HaloModel const& halo, WindState const& wind, Vec3 v)
{
    return VelocityDistribution(halo, wind)(v);
}

double mean_speed(HaloModel const& halo, WindState const& wind, double rel_tol)
{
    VelocityDistribution const f(halo, wind);
    EvaluationBudget budget(100'000'000);
    AdaptiveOptions opts;
    opts.rel_tol = rel_tol;
    AdaptiveOptions inner = opts;
    inner.rel_tol = 0.25 * rel_tol;
    auto result = integrate(
        [&](double mu) {
            auto const range = f.speed_range(mu);
            return integrate(
                [&](double v) { return v * v * v * f(v, mu); },
                range.lo,
                range.hi,
                inner,
                budget);
        },
        -1.0,
        1.0,
        opts,
        budget);
    return 2 * std::numbers::pi * result.value.real();
}
}  // namespace dmdeco
