#include "dmdeco/core.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dmdeco/error.hpp"

namespace dmdeco
{
namespace
{
void check_gamma(std::complex<double> gamma)
{
    double const mag = std::abs(gamma);
    if (!(mag <= 1.0 + gamma_tolerance))
    {
        throw InvalidInput(
            fmt::format("|gamma| = {:.17g} exceeds 1 (tolerance {:g})",
                        mag,
                        gamma_tolerance));
    }
}
}  // namespace

TwoPathState::TwoPathState(std::complex<double> gamma) : gamma_(gamma)
{
    check_gamma(gamma);
}

std::array<std::complex<double>, 4> TwoPathState::density_matrix() const
{
    return {0.5, 0.5 * gamma_, 0.5 * std::conj(gamma_), 0.5};
}

std::array<double, 2> TwoPathState::eigenvalues() const
{
    double const mag = std::abs(gamma_);
    return {0.5 * (1 - mag), 0.5 * (1 + mag)};
}

std::complex<double> gamma_from_exponent(DecoherenceExponent exponent)
{
    if (!(exponent.re >= 0))
    {
        throw InvalidInput(fmt::format(
            "decoherence exponent has negative real part {:.17g}",
            exponent.re));
    }
    double const mag = std::exp(-exponent.re);
    return {mag * std::cos(exponent.im), -mag * std::sin(exponent.im)};
}

double dim_port_probability(std::complex<double> gamma)
{
    check_gamma(gamma);
    double const p = 0.5 * (1 - gamma.real());
    return std::clamp(p, 0.0, 1.0);
}

double visibility(std::complex<double> gamma)
{
    check_gamma(gamma);
    return std::min(std::abs(gamma), 1.0);
}
}  // namespace dmdeco
