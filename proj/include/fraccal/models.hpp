///
/// \file models.hpp
///
/// Analytic model manifolds (circle, rectangular flat torus, round sphere),
/// finite matrix surrogates, and the quadrature grids they ship with.
///
#ifndef FRACCAL_MODELS_HPP
#define FRACCAL_MODELS_HPP

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "quadrature.hpp"
#include "spectral_model.hpp"
#include "spherical_harmonics.hpp"

namespace fraccal
{

namespace detail
{

inline double wrap_angle(double d)
{
    d = std::fmod(std::abs(d), 2.0 * pi);
    return std::min(d, 2.0 * pi - d);
}

inline double wrap_length(double d, double period)
{
    d = std::fmod(std::abs(d), period);
    return std::min(d, period - d);
}

inline void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v))
    {
        throw InvalidArgument(std::string(what) + " must be positive and finite");
    }
}

inline void require_levels(int K)
{
    if (K < 1)
    {
        throw InvalidArgument("truncation K must be at least 1");
    }
}

} // namespace detail

//------------------------------------------------------------------------------
// Grids
//------------------------------------------------------------------------------

/// n equispaced angles on the circle of radius r; exact for trigonometric
/// polynomials of degree < n.
inline ObservationGrid circle_grid(double radius, int n)
{
    detail::require_positive(radius, "radius");
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i)
    {
        pts.push_back({2.0 * pi * i / n, 0.0, 0.0});
    }
    return ObservationGrid(std::move(pts), std::vector<double>(n, 2.0 * pi * radius / n), "circle");
}

/// Uniform n1 x n2 tensor grid on [0, L1) x [0, L2).
inline ObservationGrid torus_grid(double L1, double L2, int n1, int n2)
{
    std::vector<Point> pts;
    for (int i = 0; i < n1; ++i)
    {
        for (int j = 0; j < n2; ++j)
        {
            pts.push_back({L1 * i / n1, L2 * j / n2, 0.0});
        }
    }
    std::vector<double> w(pts.size(), L1 * L2 / (static_cast<double>(n1) * n2));
    return ObservationGrid(std::move(pts), std::move(w), "torus");
}

/// Gauss-Legendre in cos(colatitude) times uniform longitude.
inline ObservationGrid sphere_grid(double radius, int n_theta, int n_phi)
{
    const QuadratureRule gl = gauss_legendre(n_theta);
    std::vector<Point> pts;
    std::vector<double> w;
    for (std::size_t i = 0; i < gl.size(); ++i)
    {
        const double theta = std::acos(gl.nodes[i]);
        for (int j = 0; j < n_phi; ++j)
        {
            pts.push_back({theta, 2.0 * pi * j / n_phi, 0.0});
            w.push_back(radius * radius * gl.weights[i] * 2.0 * pi / n_phi);
        }
    }
    return ObservationGrid(std::move(pts), std::move(w), "sphere");
}

/// Indices 0..n-1 with unit weights.
inline ObservationGrid index_grid(int n)
{
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i)
    {
        pts.push_back({static_cast<double>(i), 0.0, 0.0});
    }
    return ObservationGrid::unit_weights(std::move(pts), "indices");
}

/// Points of `grid` inside the closed geodesic ball B(center, radius).
inline ObservationGrid geodesic_ball(const SpectralModel& model, const ObservationGrid& grid,
                                     const Point& center, double radius)
{
    return grid.subset([&](const Point& x) { return model.distance(x, center) <= radius; },
                       "ball");
}

/// At most `count` points of `grid`, taken at evenly spaced indices.
inline ObservationGrid thin(const ObservationGrid& grid, std::size_t count)
{
    if (count == 0 || count >= grid.size())
    {
        return grid;
    }
    std::vector<Point> p;
    std::vector<double> w;
    for (std::size_t i = 0; i < count; ++i)
    {
        const std::size_t idx = (i * (grid.size() - 1)) / std::max<std::size_t>(count - 1, 1);
        p.push_back(grid.point(idx));
        w.push_back(grid.weight(idx));
    }
    return ObservationGrid(std::move(p), std::move(w), grid.label());
}

//------------------------------------------------------------------------------
// Circle
//------------------------------------------------------------------------------

///
/// Circle of radius r: eigenvalues m^2/r^2, multiplicity 2 for m >= 1, with
/// basis (sin m theta, cos m theta)/sqrt(pi r) in that branch order.
///
/// `grid_points` = 0 selects max(256, 4K) equispaced points.
///
inline SpectralModel make_circle(double radius, int K, int grid_points = 0)
{
    detail::require_positive(radius, "circle radius");
    detail::require_levels(K);
    const int n = grid_points > 0 ? grid_points : std::max(256, 4 * K);
    if (n <= 2 * (K - 1))
    {
        throw InvalidArgument("circle grid too coarse for the truncation");
    }

    ModelParts parts;
    parts.kind       = "circle";
    parts.parameters = {{"radius", radius}};
    parts.dimension  = 1;
    parts.volume     = 2.0 * pi * radius;
    const double c0  = 1.0 / std::sqrt(2.0 * pi * radius);
    const double c1  = 1.0 / std::sqrt(pi * radius);
    parts.levels.push_back({0.0, 1, [c0](int, const Point&) { return c0; }});
    for (int m = 1; m < K; ++m)
    {
        parts.levels.push_back({m * m / (radius * radius), 2, [m, c1](int j, const Point& x) {
                                    return j == 0 ? c1 * std::sin(m * x[0]) : c1 * std::cos(m * x[0]);
                                }});
    }
    parts.basis = [K, c0, c1](const Point& x, std::span<double> out) {
        out[0] = c0;
        for (int m = 1; m < K; ++m)
        {
            out[2 * m - 1] = c1 * std::sin(m * x[0]);
            out[2 * m]     = c1 * std::cos(m * x[0]);
        }
    };
    parts.distance = [radius](const Point& a, const Point& b) {
        return radius * detail::wrap_angle(a[0] - b[0]);
    };
    const int tail = std::max(200, 2 * K);
    for (int m = K; m < K + tail; ++m)
    {
        parts.tail.push_back({m * m / (radius * radius), 2});
    }
    parts.density_bound   = 1.0 / (2.0 * pi * radius);
    parts.quadrature_grid = share(circle_grid(radius, n));
    return SpectralModel(std::move(parts));
}

//------------------------------------------------------------------------------
// Flat torus
//------------------------------------------------------------------------------

namespace detail
{

/// Representative of a +-(m, n) pair of dual-lattice points.
struct TorusMode
{
    int m;
    int n;
    double eigenvalue;
};

///
/// Distinct eigenvalues of the rectangular torus, grouped with their modes,
/// for at least `count` levels. The zero mode is level 0.
///
inline std::vector<std::vector<TorusMode>> torus_levels(double L1, double L2, std::size_t count)
{
    const double k1 = 4.0 * pi * pi / (L1 * L1);
    const double k2 = 4.0 * pi * pi / (L2 * L2);
    double bound    = 4.0 * std::max(k1, k2);
    for (;;)
    {
        const int M = static_cast<int>(std::ceil(std::sqrt(bound / k1)));
        const int N = static_cast<int>(std::ceil(std::sqrt(bound / k2)));
        std::vector<TorusMode> modes;
        for (int m = 0; m <= M; ++m)
        {
            for (int n = -N; n <= N; ++n)
            {
                if (m == 0 && n < 0)
                {
                    continue;
                }
                const double lam = k1 * m * m + k2 * n * n;
                if (lam <= bound)
                {
                    modes.push_back({m, n, lam});
                }
            }
        }
        std::sort(modes.begin(), modes.end(), [](const TorusMode& a, const TorusMode& b) {
            if (a.eigenvalue != b.eigenvalue)
            {
                return a.eigenvalue < b.eigenvalue;
            }
            return std::pair(a.m, a.n) < std::pair(b.m, b.n);
        });
        std::vector<std::vector<TorusMode>> levels;
        for (const auto& mode : modes)
        {
            if (!levels.empty() && same_level(levels.back().front().eigenvalue, mode.eigenvalue))
            {
                levels.back().push_back(mode);
            }
            else
            {
                levels.push_back({mode});
            }
        }
        // The last level may be incomplete at the bound; keep only levels
        // strictly below it.
        if (levels.size() > count + 1)
        {
            levels.resize(count);
            return levels;
        }
        bound *= 2.0;
    }
}

} // namespace detail

///
/// Rectangular flat torus R^2 / (L1 Z x L2 Z): eigenvalues
/// 4 pi^2 (m^2/L1^2 + n^2/L2^2). Each +-(m, n) pair contributes
/// sqrt(2/A) cos and sqrt(2/A) sin of 2 pi (m x/L1 + n y/L2).
///
/// `n1`, `n2` = 0 select a grid resolving both the retained modes and
/// localized sources (at least 48 points per unit length).
///
inline SpectralModel make_flat_torus(double L1, double L2, int K, int n1 = 0, int n2 = 0)
{
    detail::require_positive(L1, "torus length L1");
    detail::require_positive(L2, "torus length L2");
    detail::require_levels(K);
    const std::size_t tail_count = static_cast<std::size_t>(std::max(200, 2 * K));
    const auto all               = detail::torus_levels(L1, L2, K + tail_count);

    ModelParts parts;
    parts.kind       = "torus";
    parts.parameters = {{"L1", L1}, {"L2", L2}};
    parts.dimension  = 2;
    parts.volume     = L1 * L2;
    const double c0  = 1.0 / std::sqrt(L1 * L2);
    const double c1  = std::sqrt(2.0 / (L1 * L2));

    int max_m = 0;
    int max_n = 0;
    std::vector<detail::TorusMode> flat;
    for (int k = 0; k < K; ++k)
    {
        const auto& lev = all[k];
        if (k == 0)
        {
            parts.levels.push_back({0.0, 1, [c0](int, const Point&) { return c0; }});
            continue;
        }
        std::vector<detail::TorusMode> modes = lev;
        for (const auto& md : modes)
        {
            max_m = std::max(max_m, std::abs(md.m));
            max_n = std::max(max_n, std::abs(md.n));
            flat.push_back(md);
        }
        parts.levels.push_back(
            {lev.front().eigenvalue, static_cast<int>(2 * modes.size()),
             [modes, c1, L1, L2](int j, const Point& x) {
                 const auto& md     = modes[j / 2];
                 const double phase = 2.0 * pi * (md.m * x[0] / L1 + md.n * x[1] / L2);
                 return j % 2 == 0 ? c1 * std::cos(phase) : c1 * std::sin(phase);
             }});
    }
    parts.basis = [flat, c0, c1, L1, L2](const Point& x, std::span<double> out) {
        out[0] = c0;
        for (std::size_t i = 0; i < flat.size(); ++i)
        {
            const double phase = 2.0 * pi * (flat[i].m * x[0] / L1 + flat[i].n * x[1] / L2);
            out[1 + 2 * i]     = c1 * std::cos(phase);
            out[2 + 2 * i]     = c1 * std::sin(phase);
        }
    };
    for (std::size_t k = K; k < all.size(); ++k)
    {
        parts.tail.push_back({all[k].front().eigenvalue, static_cast<int>(2 * all[k].size())});
    }
    parts.distance = [L1, L2](const Point& a, const Point& b) {
        const double dx = detail::wrap_length(a[0] - b[0], L1);
        const double dy = detail::wrap_length(a[1] - b[1], L2);
        return std::hypot(dx, dy);
    };
    parts.density_bound = 1.0 / (L1 * L2);
    const int g1 = n1 > 0 ? n1 : std::max(2 * max_m + 2, static_cast<int>(std::ceil(48.0 * L1)));
    const int g2 = n2 > 0 ? n2 : std::max(2 * max_n + 2, static_cast<int>(std::ceil(48.0 * L2)));
    if (g1 <= 2 * max_m || g2 <= 2 * max_n)
    {
        throw InvalidArgument("torus grid too coarse for the truncation");
    }
    parts.quadrature_grid = share(torus_grid(L1, L2, g1, g2));
    return SpectralModel(std::move(parts));
}

//------------------------------------------------------------------------------
// Sphere
//------------------------------------------------------------------------------

///
/// Round sphere of radius r: levels l = 0..K-1 with eigenvalue l(l+1)/r^2 and
/// multiplicity 2l+1; basis Y_{l,m}/r from the normalized recurrence.
///
inline SpectralModel make_sphere(double radius, int K, int n_theta = 0, int n_phi = 0)
{
    detail::require_positive(radius, "sphere radius");
    detail::require_levels(K);
    const int lmax = K - 1;

    ModelParts parts;
    parts.kind         = "sphere";
    parts.parameters   = {{"radius", radius}};
    parts.dimension    = 2;
    parts.volume       = 4.0 * pi * radius * radius;
    const double scale = 1.0 / radius;
    for (int l = 0; l <= lmax; ++l)
    {
        parts.levels.push_back({l * (l + 1.0) / (radius * radius), 2 * l + 1,
                                [l, scale](int j, const Point& x) {
                                    std::vector<double> buf((l + 1) * (l + 1));
                                    real_spherical_harmonics(l, x[0], x[1], buf);
                                    return scale * buf[sh_offset(l) + j];
                                }});
    }
    parts.levels[0].evaluate = [c = scale / std::sqrt(4.0 * pi)](int, const Point&) { return c; };
    parts.basis = [lmax, scale](const Point& x, std::span<double> out) {
        real_spherical_harmonics(lmax, x[0], x[1], out);
        for (int i = 0; i < (lmax + 1) * (lmax + 1); ++i)
        {
            out[i] *= scale;
        }
    };
    parts.distance = [radius](const Point& a, const Point& b) {
        const double ua[3] = {std::sin(a[0]) * std::cos(a[1]), std::sin(a[0]) * std::sin(a[1]), std::cos(a[0])};
        const double ub[3] = {std::sin(b[0]) * std::cos(b[1]), std::sin(b[0]) * std::sin(b[1]), std::cos(b[0])};
        const double cx    = ua[1] * ub[2] - ua[2] * ub[1];
        const double cy    = ua[2] * ub[0] - ua[0] * ub[2];
        const double cz    = ua[0] * ub[1] - ua[1] * ub[0];
        const double dot   = ua[0] * ub[0] + ua[1] * ub[1] + ua[2] * ub[2];
        return radius * std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
    };
    const int tail = std::max(200, 2 * K);
    for (int l = K; l < K + tail; ++l)
    {
        parts.tail.push_back({l * (l + 1.0) / (radius * radius), 2 * l + 1});
    }
    parts.density_bound   = 1.0 / (4.0 * pi * radius * radius);
    const int nt          = n_theta > 0 ? n_theta : std::max(K + 1, 64);
    const int np          = n_phi > 0 ? n_phi : std::max(2 * K + 1, 128);
    if (nt < K || np <= 2 * lmax)
    {
        throw InvalidArgument("sphere grid too coarse for the truncation");
    }
    parts.quadrature_grid = share(sphere_grid(radius, nt, np));
    return SpectralModel(std::move(parts));
}

//------------------------------------------------------------------------------
// Matrix surrogates
//------------------------------------------------------------------------------

///
/// All-pairs shortest path lengths of the graph given by the nonzero
/// off-diagonal pattern of `a`; unreachable pairs get infinity.
///
inline Eigen::MatrixXd graph_distances(const Eigen::MatrixXd& a)
{
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd d    = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
    for (Eigen::Index s = 0; s < n; ++s)
    {
        std::deque<Eigen::Index> queue{s};
        d(s, s) = 0.0;
        while (!queue.empty())
        {
            const Eigen::Index u = queue.front();
            queue.pop_front();
            for (Eigen::Index v = 0; v < n; ++v)
            {
                if (v != u && a(u, v) != 0.0 && std::isinf(d(s, v)))
                {
                    d(s, v) = d(s, u) + 1.0;
                    queue.push_back(v);
                }
            }
        }
    }
    return d;
}

///
/// Finite surrogate from a symmetric positive semi-definite matrix whose
/// kernel is spanned by the constant vector. Points are indices with unit
/// weights; the distance is the graph distance of the sparsity pattern.
///
/// `K` = 0 keeps every distinct eigenvalue; otherwise the remainder becomes an
/// exact (complete) tail.
///
inline SpectralModel make_matrix_model(const Eigen::MatrixXd& a, int K = 0)
{
    const Eigen::Index n = a.rows();
    if (n < 2 || a.cols() != n)
    {
        throw ModelError("matrix model: need a square matrix of size at least 2");
    }
    if (!a.allFinite())
    {
        throw ModelError("matrix model: non-finite entries");
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double asym  = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
    {
        throw ModelError("matrix model: asymmetric input (max |A - A^T| = " + std::to_string(asym) + ")");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()));
    const Eigen::VectorXd& lam = eig.eigenvalues();
    if (lam(0) < -1e-10)
    {
        throw ModelError("matrix model: indefinite input (smallest eigenvalue " + std::to_string(lam(0)) + ")");
    }
    if (std::abs(lam(0)) >= 1e-10)
    {
        throw ModelError("matrix model: no zero eigenvalue (smallest " + std::to_string(lam(0)) + ")");
    }
    if (lam(1) < 1e-10)
    {
        throw ModelError("matrix model: kernel is not one-dimensional");
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    if ((eig.eigenvectors().col(0).cwiseAbs() - ones).cwiseAbs().maxCoeff() > 1e-8)
    {
        throw ModelError("matrix model: kernel is not spanned by the constant vector");
    }

    // Group eigenpairs into levels.
    struct Group
    {
        double eigenvalue;
        std::vector<Eigen::Index> columns;
    };
    std::vector<Group> groups{{0.0, {0}}};
    for (Eigen::Index i = 1; i < n; ++i)
    {
        if (groups.size() > 1 && same_level(groups.back().eigenvalue, lam(i)))
        {
            groups.back().columns.push_back(i);
        }
        else
        {
            groups.push_back({lam(i), {i}});
        }
    }
    for (auto& g : groups)
    {
        if (g.columns.size() > 1)
        {
            double mean = 0.0;
            for (auto c : g.columns)
            {
                mean += lam(c);
            }
            g.eigenvalue = mean / static_cast<double>(g.columns.size());
        }
    }
    const std::size_t keep = K > 0 ? std::min<std::size_t>(K, groups.size()) : groups.size();

    auto basis                     = std::make_shared<Eigen::MatrixXd>(eig.eigenvectors());
    basis->col(0)                  = ones;
    const auto dist                = std::make_shared<const Eigen::MatrixXd>(graph_distances(a));

    ModelParts parts;
    parts.kind       = "matrix";
    parts.parameters = {{"size", static_cast<double>(n)}};
    parts.dimension  = 1;
    parts.volume     = static_cast<double>(n);
    double density   = 0.0;
    for (std::size_t k = 0; k < groups.size(); ++k)
    {
        const auto cols = groups[k].columns;
        for (Eigen::Index x = 0; x < n; ++x)
        {
            double s = 0.0;
            for (auto c : cols)
            {
                s += (*basis)(x, c) * (*basis)(x, c);
            }
            density = std::max(density, s / static_cast<double>(cols.size()));
        }
        if (k >= keep)
        {
            parts.tail.push_back({groups[k].eigenvalue, static_cast<int>(cols.size())});
            continue;
        }
        std::shared_ptr<const Eigen::MatrixXd> b = basis;
        parts.levels.push_back({groups[k].eigenvalue, static_cast<int>(cols.size()),
                                [b, cols, n](int j, const Point& x) {
                                    const auto i = static_cast<Eigen::Index>(std::lround(x[0]));
                                    if (i < 0 || i >= n)
                                    {
                                        throw InvalidArgument("matrix model: index out of range");
                                    }
                                    return (*b)(i, cols[j]);
                                }});
    }
    parts.tail_is_complete = true;
    parts.density_bound    = density;
    parts.distance         = [dist, n](const Point& p, const Point& q) {
        const auto i = static_cast<Eigen::Index>(std::lround(p[0]));
        const auto j = static_cast<Eigen::Index>(std::lround(q[0]));
        if (i < 0 || j < 0 || i >= n || j >= n)
        {
            throw InvalidArgument("matrix model: index out of range");
        }
        return (*dist)(i, j);
    };
    parts.quadrature_grid = share(index_grid(static_cast<int>(n)));
    return SpectralModel(std::move(parts));
}

/// Graph Laplacian of the cycle C_n.
inline Eigen::MatrixXd cycle_laplacian(int n)
{
    if (n < 3)
    {
        throw InvalidArgument("cycle graph needs at least 3 vertices");
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
    {
        const int j = (i + 1) % n;
        a(i, i) += 1.0;
        a(j, j) += 1.0;
        a(i, j) -= 1.0;
        a(j, i) -= 1.0;
    }
    return a;
}

///
/// Weighted Laplacian of a random connected graph on n vertices: a spanning
/// path plus each other edge with probability `density`, weights in [0.5, 2).
///
inline Eigen::MatrixXd random_graph_laplacian(int n, std::uint64_t seed, double density = 0.4)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> weight(0.5, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    auto connect      = [&](int i, int j) {
        const double w = weight(rng);
        a(i, i) += w;
        a(j, j) += w;
        a(i, j) -= w;
        a(j, i) -= w;
    };
    for (int i = 0; i + 1 < n; ++i)
    {
        connect(i, i + 1);
    }
    for (int i = 0; i < n; ++i)
    {
        for (int j = i + 2; j < n; ++j)
        {
            if (coin(rng) < density)
            {
                connect(i, j);
            }
        }
    }
    return a;
}

} // namespace fraccal

#endif
