#include "dmdeco/targets.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dmdeco/config.hpp"
#include "dmdeco/decoherence.hpp"
#include "dmdeco/error.hpp"
#include "dmdeco/units.hpp"

namespace dmdeco
{
std::string_view to_string(Orientation o)
{
    switch (o)
    {
        case Orientation::parallel:
            return "parallel";
        case Orientation::perpendicular:
            return "perpendicular";
        case Orientation::angle:
            return "angle";
    }
    return "unknown";
}

Orientation orientation_from_string(std::string_view s)
{
    if (s == "parallel")
        return Orientation::parallel;
    if (s == "perpendicular")
        return Orientation::perpendicular;
    if (s == "angle")
        return Orientation::angle;
    throw InvalidInput(fmt::format(
        "orientation '{}' is not parallel, perpendicular or angle", s));
}

double TargetSpec::nucleus_count() const
{
    return total_mass / (nucleus_A * constants::amu);
}

TargetComposition TargetSpec::composition() const
{
    return {nucleus_A, nucleus_count(), radius};
}

double TargetSpec::wind_angle() const
{
    switch (orientation)
    {
        case Orientation::parallel:
            return 0;
        case Orientation::perpendicular:
            return std::numbers::pi / 2;
        case Orientation::angle:
            return angle;
    }
    return 0;
}

Vec3 TargetSpec::separation_vector() const
{
    return dmdeco::separation_vector(separation, wind_angle());
}

void TargetSpec::validate() const
{
    if (!(total_mass > 0))
        throw InvalidInput("total mass must be positive");
    if (!(nucleus_A >= 1))
        throw InvalidInput("nucleus_A must be at least 1");
    if (!(radius >= 0) || !std::isfinite(radius))
        throw InvalidInput("radius must be non-negative");
    if (!(bulk_density >= 0))
        throw InvalidInput("bulk density must be non-negative");
    if (!(separation >= 0) || !std::isfinite(separation))
        throw InvalidInput("separation must be non-negative");
    if (!(angle >= 0 && angle <= std::numbers::pi))
        throw InvalidInput("angle must lie in [0, 180] degrees");
    if (!(exposure >= 0) || !std::isfinite(exposure))
        throw InvalidInput("exposure must be non-negative");
    if (!(altitude >= 0) || !std::isfinite(altitude))
        throw InvalidInput("altitude must be non-negative");
    if (shots == 0)
        throw InvalidInput("shots must be at least 1");
    if (nucleus_count() < 1 - 1e-12)
        throw InvalidInput("total mass is below one nucleus");
}

double radius_from_bulk_density(double mass, double bulk_density)
{
    if (!(mass > 0 && bulk_density > 0))
        throw InvalidInput("mass and bulk density must be positive");
    return std::cbrt(3 * mass / (4 * std::numbers::pi * bulk_density));
}

double time_domain_exposure(double base_T, double base_mass, double mass)
{
    if (!(base_mass > 0 && mass > 0))
        throw InvalidInput("masses must be positive");
    return base_T * mass / base_mass;
}

TargetSpec scale_target_mass(TargetSpec const& spec, double mass)
{
    spec.validate();
    TargetSpec s = spec;
    s.total_mass = mass;
    if (spec.bulk_density > 0)
        s.radius = radius_from_bulk_density(mass, spec.bulk_density);
    else
        s.radius = spec.radius * std::cbrt(mass / spec.total_mass);
    s.exposure = time_domain_exposure(spec.exposure, spec.total_mass, mass);
    s.validate();
    return s;
}

std::vector<TargetSpec> builtin_targets()
{
    std::vector<TargetSpec> result;
    for (auto const& b : builtin_target_blocks())
        result.push_back(b.spec());
    return result;
}

TargetSpec builtin_target(std::string_view name)
{
    for (auto const& b : builtin_target_blocks())
    {
        if (b.name == name)
            return b.spec();
    }
    throw InvalidInput(fmt::format("no preset named '{}'", name));
}
}  // namespace dmdeco
