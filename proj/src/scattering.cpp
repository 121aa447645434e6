#include "dmdeco/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "dmdeco/error.hpp"
#include "dmdeco/units.hpp"

namespace dmdeco
{
namespace
{
constexpr double series_cutoff = 1e-3;

// Below this x the closed antiderivative loses digits to cancellation
constexpr double moment_series_cutoff = 0.5;
}  // namespace

double form_factor_sq_moment(double x)
{
    if (!(x >= 0))
        throw InvalidInput("form factor argument must be non-negative");
    double const x2 = x * x;
    if (x < moment_series_cutoff)
    {
        return x2 / 2
               * (1 - x2 / 10
                        * (1 - x2 / 17.5
                                   * (1 - x2 / 27 * (1 - x2 / 38.5))));
    }
    // Antiderivative of x F^2 is -9/(4x^2) + 9 sin 2x/(4x^3)
    // + 9 (cos 2x - 1)/(8x^4), which tends to -9/4 at 0
    double const s = std::sin(x);
    return 2.25 * (1 - 1 / x2 + std::sin(2 * x) / (x2 * x)
                   - s * s / (x2 * x2));
}

double mean_form_factor_sq(double k)
{
    if (!(k >= 0))
        throw InvalidInput("form factor argument must be non-negative");
    if (k == 0)
        return 1;
    return form_factor_sq_moment(2 * k) / (2 * k * k);
}

void TargetComposition::validate() const
{
    if (!(nucleons_per_nucleus >= 1 && nucleus_count >= 1 && radius >= 0))
    {
        throw InvalidInput(
            fmt::format("target composition requires N_A >= 1, N >= 1, "
                        "R >= 0 (got {:g}, {:g}, {:g})",
                        nucleons_per_nucleus,
                        nucleus_count,
                        radius));
    }
}

double form_factor_sphere(double x)
{
    if (x <= series_cutoff)
        return 1 - x * x / 10;
    return 3 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

double differential_cross_section(ScatteringModel const& model,
                                  TargetComposition const& comp,
                                  double q_transfer)
{
    if (!(q_transfer >= 0))
        throw InvalidInput("momentum transfer must be non-negative");
    double const n = comp.nucleus_count;
    double const a2 = comp.nucleons_per_nucleus * comp.nucleons_per_nucleus;
    double ff2 = 1;
    if (model.mode == ScatterMode::extended)
    {
        double const ff
            = form_factor_sphere(q_transfer * comp.radius / constants::hbar);
        ff2 = ff * ff;
    }
    return model.sigma_n / (4 * std::numbers::pi) * a2
           * (n + n * (n - 1) * ff2);
}

double pointlike_cross_section(ScatteringModel const& model,
                               TargetComposition const& comp)
{
    double const n = comp.nucleus_count;
    double const a = comp.nucleons_per_nucleus;
    return model.sigma_n * a * a * n * n;
}

CrossSection total_cross_section(ScatteringModel const& model,
                                 TargetComposition const& comp,
                                 double speed,
                                 double m_dm)
{
    if (!(speed > 0) || !(m_dm > 0))
        throw InvalidInput("total cross-section needs v > 0 and m > 0");
    comp.validate();

    CrossSection result;
    if (model.mode == ScatterMode::pointlike || comp.radius == 0)
    {
        result.value = pointlike_cross_section(model, comp);
    }
    else
    {
        double const k = m_dm * speed * comp.radius / constants::hbar;
        double const ff2 = mean_form_factor_sq(k);
        double const n = comp.nucleus_count;
        double const a2 = comp.nucleons_per_nucleus
                          * comp.nucleons_per_nucleus;
        result.value = model.sigma_n * a2 * (n + n * (n - 1) * ff2);
        result.error = 64 * std::numeric_limits<double>::epsilon()
                       * result.value;
    }
    double const geometric = std::numbers::pi * comp.radius * comp.radius;
    result.exceeds_geometric = comp.radius > 0 && result.value > geometric;
    return result;
}
}  // namespace dmdeco
