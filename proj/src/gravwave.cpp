#include "dmdeco/gravwave.hpp"

#include <cmath>

#include "dmdeco/error.hpp"
#include "dmdeco/units.hpp"

namespace dmdeco
{
void GravSuperposition::validate() const
{
    if (!(mass > 0))
        throw InvalidInput("superposed mass must be positive");
    if (!(beta >= 0 && beta < 1))
        throw InvalidInput("beta must lie in [0, 1)");
    if (!(extent >= 0 && duration >= 0))
        throw InvalidInput("extent and duration must be non-negative");
}

double gravitational_coupling(double mass)
{
    using namespace constants;
    return G_newton * mass * mass / (hbar * c_light);
}

DecoherenceExponent grav_exponent(GravSuperposition const& s)
{
    s.validate();
    double const b2 = s.beta * s.beta;
    return {gravitational_coupling(s.mass) * b2 * b2, 0.0};
}

double planck_crossover_mass(double beta, double target_exponent)
{
    if (!(beta > 0 && beta < 1))
        throw InvalidInput("beta must lie in (0, 1)");
    if (!(target_exponent > 0))
        throw InvalidInput("target exponent must be positive");
    return constants::planck_mass() * std::sqrt(target_exponent)
           / (beta * beta);
}
}  // namespace dmdeco
