//! \file dmdeco/core.hpp
//! Two-path interferometer readout of a decoherence exponent.
//!
//! The superposed object ends a shot in
//! \f[ \rho = \frac12 \begin{pmatrix} 1 & \gamma \\ \gamma^* & 1\end{pmatrix},
//!     \quad \gamma = e^{-\Gamma}, \f]
//! in the (left, right) path basis. Re Gamma suppresses the fringes, Im Gamma
//! shifts them.
#pragma once

#include <array>
#include <complex>

namespace dmdeco
{
//! Tolerance used when validating |gamma| <= 1.
inline constexpr double gamma_tolerance = 1e-9;

//! Complex exponent Gamma = integral of F dt. Stored as (re, im).
struct DecoherenceExponent
{
    double re = 0;  //!< >= 0, suppresses visibility
    double im = 0;  //!< phase [rad]

    friend constexpr DecoherenceExponent
    operator+(DecoherenceExponent a, DecoherenceExponent b)
    {
        return {a.re + b.re, a.im + b.im};
    }
    friend constexpr DecoherenceExponent
    operator*(double s, DecoherenceExponent a)
    {
        return {s * a.re, s * a.im};
    }
};

//! Off-diagonal element of the 2x2 path density matrix.
class TwoPathState
{
  public:
    explicit TwoPathState(std::complex<double> gamma);

    std::complex<double> gamma() const { return gamma_; }

    //! Row-major 2x2 density matrix
    std::array<std::complex<double>, 4> density_matrix() const;

    //! Eigenvalues (1 - |gamma|)/2, (1 + |gamma|)/2
    std::array<double, 2> eigenvalues() const;

  private:
    std::complex<double> gamma_;
};

// gamma = exp(-re) exp(-i im); throws InvalidInput for re < 0
std::complex<double> gamma_from_exponent(DecoherenceExponent exponent);

// Probability of the dim port, (1 - Re gamma) / 2
double dim_port_probability(std::complex<double> gamma);

// Fringe visibility |gamma|
double visibility(std::complex<double> gamma);
}  // namespace dmdeco
