//---------------------------------------------------------------------------//
//! \file bfp/errors.hpp
//! Exception types thrown by the solver library.
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bfp
{
//! Scientific-notation string for diagnostics.
inline std::string to_sci(double v)
{
    std::ostringstream os;
    os << std::scientific << v;
    return os.str();
}

//---------------------------------------------------------------------------//
/*!
 * Base class for all library errors.
 */
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! A precondition on user-supplied data was violated.
class InvalidArgument : public Error
{
  public:
    using Error::Error;
};

//! Adaptive panel integration could not reach its error target.
class IntegrationFailure : public Error
{
  public:
    IntegrationFailure(std::string const& what, double rel_error)
        : Error(what), rel_error_(rel_error)
    {
    }

    double rel_error() const noexcept { return rel_error_; }

  private:
    double rel_error_;
};

//! A linear system was singular (or numerically so).
class SingularSystem : public Error
{
  public:
    SingularSystem(std::string const& what, std::size_t pivot)
        : Error(what), pivot_(pivot)
    {
    }

    std::size_t pivot() const noexcept { return pivot_; }

  private:
    std::size_t pivot_;
};

//! A linear solve returned an answer whose residual is too large.
class SolverFailure : public Error
{
  public:
    SolverFailure(std::string const& what, double residual)
        : Error(what), residual_(residual)
    {
    }

    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

//! A closure quantity needed division by a vanishing scalar flux.
class DegenerateFlux : public Error
{
  public:
    DegenerateFlux(std::string const& what, std::size_t edge)
        : Error(what), edge_(edge)
    {
    }

    std::size_t edge() const noexcept { return edge_; }

  private:
    std::size_t edge_;
};

//---------------------------------------------------------------------------//
}  // namespace bfp
