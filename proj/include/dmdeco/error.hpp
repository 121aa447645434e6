//! \file dmdeco/error.hpp
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dmdeco
{
//! Rejected input value (precondition failure).
class InvalidInput : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//! Malformed or inconsistent configuration; the message names the field
//! and, when known, the line.
class ConfigError : public InvalidInput
{
  public:
    using InvalidInput::InvalidInput;
};

//! Quadrature, root-finding or sampling failure.
class NumericalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Evaluation budget exhausted before the requested tolerance was met.
class QuadratureError : public NumericalError
{
  public:
    QuadratureError(std::string const& what,
                    std::complex<double> partial,
                    double error,
                    std::uint64_t evaluations)
        : NumericalError(what)
        , partial_(partial)
        , error_(error)
        , evaluations_(evaluations)
    {
    }

    std::complex<double> partial() const { return partial_; }
    double error_estimate() const { return error_; }
    std::uint64_t evaluations() const { return evaluations_; }

  private:
    std::complex<double> partial_;
    double error_;
    std::uint64_t evaluations_;
};
}  // namespace dmdeco
