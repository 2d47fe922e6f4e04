///
/// \file sources.hpp
///
/// Compactly supported test sources on a model's quadrature grid and the
/// description of a source placed in the chart of a reference model.
///
#ifndef FRACCAL_SOURCES_HPP
#define FRACCAL_SOURCES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"
#include "operators.hpp"
#include "spectral_model.hpp"

namespace fraccal
{

/// \f$ \psi(r) = \exp(-1/(1-r^2)) \f$ for |r| < 1, zero otherwise.
inline double bump_profile(double r)
{
    const double r2 = r * r;
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

/// Smooth bump of geodesic radius `radius` centred at `center`.
inline GridFunction bump(const SpectralModel& model, GridRef grid, const Point& center, double radius)
{
    if (!(radius > 0.0))
    {
        throw InvalidArgument("bump: radius must be positive");
    }
    return sample_function(std::move(grid), [&](const Point& x) {
        return bump_profile(model.distance(x, center) / radius);
    });
}

/// Coefficients of a dipole c_plus * bump(plus) - c_minus * bump(minus).
struct DipoleField
{
    Point plus{};
    Point minus{};
    double radius  = 0.1;
    double c_plus  = 1.0;
    double c_minus = 1.0;

    double operator()(const SpectralModel& model, const Point& x) const
    {
        return c_plus * bump_profile(model.distance(x, plus) / radius) -
               c_minus * bump_profile(model.distance(x, minus) / radius);
    }
};

///
/// Dipole coefficients making the grid integral vanish: the negative lobe is
/// rescaled to the positive one, and the rounding residual is removed on the
/// positive lobe.
///
inline DipoleField dipole_field(const SpectralModel& model, const GridRef& grid, const Point& plus,
                                const Point& minus, double radius)
{
    const GridFunction p = bump(model, grid, plus, radius);
    const GridFunction m = bump(model, grid, minus, radius);
    const double ip      = p.integral();
    const double im      = m.integral();
    if (!(ip > 0.0) || !(im > 0.0))
    {
        throw InvalidArgument("dipole: a lobe contains no grid point; refine the grid or enlarge the radius");
    }
    const Eigen::VectorXd v = p.values() - (ip / im) * m.values();
    const double resid      = grid->weight_vector().dot(v);
    return DipoleField{plus, minus, radius, 1.0 - resid / ip, ip / im};
}

/// Mean-zero dipole sampled on `grid`.
inline GridFunction dipole(const SpectralModel& model, GridRef grid, const Point& plus, const Point& minus,
                           double radius)
{
    const DipoleField d = dipole_field(model, grid, plus, minus, radius);
    const GridFunction p = bump(model, grid, plus, radius);
    const GridFunction m = bump(model, grid, minus, radius);
    Eigen::VectorXd v    = d.c_plus * p.values() - d.c_minus * m.values();
    return GridFunction(std::move(grid), std::move(v), true);
}

/// Points of the grid where f is nonzero.
inline std::vector<Point> support(const GridFunction& f)
{
    std::vector<Point> out;
    for (std::size_t i = 0; i < f.size(); ++i)
    {
        if (f[i] != 0.0)
        {
            out.push_back(f.grid()->point(i));
        }
    }
    return out;
}

///
/// A dipole source written in the chart of a reference model; realize()
/// places it on any model of a pair after mapping the centres.
///
struct SourceSpec
{
    Point plus{};
    Point minus{};
    double radius = 0.1;

    GridFunction realize(const SpectralModel& model, const PointMap& map = identity_map) const
    {
        return dipole(model, model.quadrature_grid(), map(plus), map(minus), radius);
    }
};

/// Maps every point through `map`.
inline std::vector<Point> map_points(const std::vector<Point>& pts, const PointMap& map)
{
    std::vector<Point> out;
    out.reserve(pts.size());
    for (const auto& p : pts)
    {
        out.push_back(map(p));
    }
    return out;
}

} // namespace fraccal

#endif
