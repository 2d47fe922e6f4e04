///
/// \file spherical_harmonics.hpp
///
/// Real, L^2-orthonormal spherical harmonics on the unit sphere, evaluated by
/// the three-term recurrence for fully normalized associated Legendre
/// functions. Stable well past degree 200 in double precision.
///
#ifndef FRACCAL_SPHERICAL_HARMONICS_HPP
#define FRACCAL_SPHERICAL_HARMONICS_HPP

#include <cmath>
#include <span>
#include <vector>

#include "core.hpp"

namespace fraccal
{

/// Index of Y_{l, m-slot} in the flat layout used below: degree l occupies
/// slots [l^2, (l+1)^2), ordered m = 0, (cos 1, sin 1), (cos 2, sin 2), ...
inline constexpr int sh_offset(int l)
{
    return l * l;
}

///
/// Fill `out` (size >= (lmax+1)^2) with every real spherical harmonic of
/// degree <= lmax at colatitude theta, longitude phi.
///
inline void real_spherical_harmonics(int lmax, double theta, double phi, std::span<double> out)
{
    const double x = std::cos(theta);
    const double y = std::sin(theta);

    // pbar(l, m): normalized so that sum_m |Y|^2 integrates to one on S^2.
    std::vector<double> p_mm(lmax + 1);
    p_mm[0] = std::sqrt(1.0 / (4.0 * pi));
    for (int m = 1; m <= lmax; ++m)
    {
        p_mm[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * y * p_mm[m - 1];
    }

    for (int m = 0; m <= lmax; ++m)
    {
        const double c = (m == 0) ? 1.0 : std::sqrt(2.0) * std::cos(m * phi);
        const double s = (m == 0) ? 0.0 : std::sqrt(2.0) * std::sin(m * phi);

        auto store = [&](int l, double p) {
            if (m == 0)
            {
                out[sh_offset(l)] = p;
            }
            else
            {
                out[sh_offset(l) + 2 * m - 1] = p * c;
                out[sh_offset(l) + 2 * m]     = p * s;
            }
        };

        double p_lm2 = 0.0;
        double p_lm1 = p_mm[m];
        store(m, p_lm1);
        if (m + 1 <= lmax)
        {
            const double p = std::sqrt(2.0 * m + 3.0) * x * p_mm[m];
            store(m + 1, p);
            p_lm2 = p_lm1;
            p_lm1 = p;
        }
        for (int l = m + 2; l <= lmax; ++l)
        {
            const double ll = static_cast<double>(l) * l;
            const double mm = static_cast<double>(m) * m;
            const double a  = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
            const double b  = std::sqrt(((l - 1.0) * (l - 1.0) - mm) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
            const double p  = a * (x * p_lm1 - b * p_lm2);
            store(l, p);
            p_lm2 = p_lm1;
            p_lm1 = p;
        }
    }
}

} // namespace fraccal

#endif
