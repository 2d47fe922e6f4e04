///
/// \file core.hpp
///
/// Shared vocabulary: chart points, error types and a few scalar helpers used
/// throughout the library.
///
#ifndef FRACCAL_CORE_HPP
#define FRACCAL_CORE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fraccal
{

///
/// Coordinates of a point in a model's chart. Unused trailing slots are zero.
///
///  - circle: (theta)
///  - flat torus: (x, y) with x in [0, L1), y in [0, L2)
///  - sphere: (colatitude, longitude)
///  - matrix model: (index)
///
using Point = std::array<double, 3>;

/// Maps a point in one model's chart to the corresponding point of another.
using PointMap = std::function<Point(const Point&)>;

inline Point identity_map(const Point& p)
{
    return p;
}

//
// Error hierarchy. Everything thrown by the library derives from Error.
//
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller-supplied value.
class InvalidArgument : public Error
{
public:
    using Error::Error;
};

/// Model construction or model/grid mismatch.
class ModelError : public Error
{
public:
    using Error::Error;
};

/// A quadrature did not reach its requested tolerance.
class QuadratureError : public Error
{
public:
    using Error::Error;
};

/// Exponential fitting could not produce a stable spectrum.
class IdentificationError : public Error
{
public:
    using Error::Error;
};

/// Malformed configuration. Carries the offending field path.
class ConfigError : public Error
{
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what),
          field_(std::move(field))
    {
    }

    const std::string& field() const noexcept
    {
        return field_;
    }

private:
    std::string field_;
};

/// Malformed CSV input. Carries the 1-based line number.
class ParseError : public Error
{
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept
    {
        return line_;
    }

private:
    std::size_t line_;
};

inline constexpr double pi = std::numbers::pi;

/// Relative tolerance under which two eigenvalues are one level.
inline constexpr double kLevelMergeTolerance = 1e-9;

inline bool same_level(double a, double b)
{
    return std::abs(a - b) <= kLevelMergeTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

///
/// sin(t * sqrt(lambda)) / sqrt(lambda), continued analytically through
/// lambda = 0 (value t) and to lambda < 0 (sinh branch).
///
inline double sine_propagator(double lambda, double t)
{
    const double x = t * t * lambda;
    if (std::abs(x) < 1e-6)
    {
        // t * (1 - x/6 + x^2/120 - ...)
        return t * (1.0 - x / 6.0 * (1.0 - x / 20.0 * (1.0 - x / 42.0)));
    }
    if (lambda > 0.0)
    {
        const double w = std::sqrt(lambda);
        return std::sin(t * w) / w;
    }
    const double w = std::sqrt(-lambda);
    return std::sinh(t * w) / w;
}

/// d/dt of sine_propagator: cos(t sqrt(lambda)).
inline double cosine_propagator(double lambda, double t)
{
    if (lambda >= 0.0)
    {
        return std::cos(t * std::sqrt(lambda));
    }
    return std::cosh(t * std::sqrt(-lambda));
}

} // namespace fraccal

#endif
