#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fraccal/models.hpp"
#include "fraccal/operators.hpp"
#include "fraccal/oracles.hpp"
#include "fraccal/sources.hpp"

using namespace fraccal;

namespace
{

Eigen::VectorXd random_mean_zero(int n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
    {
        v(i) = g(rng);
    }
    return v.array() - v.mean();
}

double max_abs(const Eigen::VectorXd& v)
{
    return v.cwiseAbs().maxCoeff();
}

double inner(const GridFunction& f, const GridFunction& g)
{
    return (f.grid()->weight_vector().array() * f.values().array() * g.values().array()).sum();
}

} // namespace

TEST(Fractional, ModeIsScaledByEigenvaluePower)
{
    // cos(2 theta) on the unit circle: (-Delta)^{-1/2} gives cos(2 theta) / 2.
    const SpectralModel m = make_circle(1.0, 12);
    const GridRef g       = m.quadrature_grid();
    const GridFunction f  = sample_function(g, [](const Point& x) { return std::cos(2 * x[0]); }, true);
    const GridFunction u  = fractional_solve(m, f, 0.5);
    EXPECT_LT(max_abs(u.values() - 0.5 * f.values()), 1e-14);
    const GridFunction w = fractional_apply(m, u, 0.5);
    EXPECT_LT(max_abs(w.values() - f.values()), 1e-14);
}

TEST(Fractional, MatrixSolveMatchesDenseEigendecomposition)
{
    for (auto a : {cycle_laplacian(8), cycle_laplacian(16), random_graph_laplacian(12, 5)})
    {
        const SpectralModel m = make_matrix_model(a);
        const GridFunction f(m.quadrature_grid(), random_mean_zero(static_cast<int>(a.rows()), 9), true);
        for (double alpha : {0.1, 0.5, 0.9})
        {
            const Eigen::VectorXd ref = oracle::dense_fractional_solve(a, f.values(), alpha);
            EXPECT_LT(max_abs(fractional_solve(m, f, alpha).values() - ref), 1e-12);
        }
    }
}

TEST(Fractional, GammaRouteMatchesSpectralSolve)
{
    for (double a : {0.5, 1.0, 4.0, 37.0})
    {
        for (double alpha : {0.25, 0.5, 0.75})
        {
            EXPECT_NEAR(gamma_scalar(a, alpha) / std::pow(a, -alpha), 1.0, 1e-11);
        }
    }
    const SpectralModel m = make_sphere(1.0, 8);
    const GridFunction f  = dipole(m, m.quadrature_grid(), {0.5, 0.2, 0}, {2.0, 3.0, 0}, 0.5);
    EXPECT_LT(max_abs(gamma_fractional(m, f, 0.3).values() - fractional_solve(m, f, 0.3).values()), 1e-9);
}

TEST(Fractional, SolveIsSelfAdjoint)
{
    const SpectralModel m = make_flat_torus(1.0, 1.4, 12);
    const GridRef g       = m.quadrature_grid();
    const GridFunction f  = dipole(m, g, {0.2, 0.3, 0}, {0.7, 1.0, 0}, 0.2);
    const GridFunction h  = dipole(m, g, {0.5, 0.1, 0}, {0.1, 0.9, 0}, 0.25);
    const double lhs      = inner(fractional_solve(m, f, 0.4), h);
    const double rhs      = inner(f, fractional_solve(m, h, 0.4));
    EXPECT_NEAR(lhs, rhs, 1e-13 * std::max(1.0, std::abs(lhs)));
}

TEST(Fractional, RequiresMeanZeroSourceAndValidAlpha)
{
    const SpectralModel m = make_circle(1.0, 6);
    const GridFunction one = sample_function(m.quadrature_grid(), [](const Point&) { return 1.0; });
    EXPECT_THROW(fractional_solve(m, one, 0.5), InvalidArgument);
    const GridFunction f = eigenfunction(m, m.quadrature_grid(), 1, 0);
    EXPECT_THROW(fractional_solve(m, f, 1.0), InvalidArgument);
    EXPECT_THROW(fractional_solve(m, f, 0.0), InvalidArgument);
}

TEST(SourceToSolution, RejectsSourcesOutsideObservationSet)
{
    const SpectralModel m = make_circle(1.0, 8);
    const GridFunction f  = dipole(m, m.quadrature_grid(), {0.5, 0, 0}, {2.5, 0, 0}, 0.4);
    const GridRef half    = share(m.quadrature_grid()->subset([](const Point& x) { return x[0] < 1.5; }));
    EXPECT_THROW(source_to_solution(m, half, f, 0.5), InvalidArgument);
    const GridRef all = m.quadrature_grid();
    EXPECT_NO_THROW(source_to_solution(m, all, f, 0.5));
}

TEST(Heat, SemigroupProperty)
{
    const SpectralModel m = make_sphere(1.0, 10);
    const GridFunction f  = dipole(m, m.quadrature_grid(), {0.4, 0, 0}, {2.0, 1.0, 0}, 0.4);
    const GridFunction a  = heat_apply(m, heat_apply(m, f, 0.03), 0.07);
    const GridFunction b  = heat_apply(m, f, 0.1);
    EXPECT_LT(max_abs(a.values() - b.values()), 1e-13 * std::max(1.0, max_abs(b.values())));
}

TEST(Heat, MatrixHeatMatchesTaylorOracle)
{
    const Eigen::MatrixXd a = random_graph_laplacian(9, 21);
    const SpectralModel m   = make_matrix_model(a);
    Eigen::VectorXd v       = Eigen::VectorXd::Zero(9);
    v(2)                    = 1.0;
    const GridFunction f(m.quadrature_grid(), v);
    for (double t : {0.1, 1.0, 3.0})
    {
        EXPECT_LT(max_abs(heat_apply(m, f, t).values() - oracle::dense_heat(a, v, t)), 1e-12);
    }
}

TEST(Heat, KernelsMatchImageSums)
{
    const SpectralModel torus = make_flat_torus(1.0, 1.0, 40);
    const std::vector<Point> tp = {{0.1, 0.2, 0}, {0.6, 0.7, 0}, {0.95, 0.1, 0}};
    const GridRef tg            = share(ObservationGrid::unit_weights(tp));
    const KernelSamples kt      = heat_kernel(torus, tg, tg, {0.05, 0.2});
    for (std::size_t ti = 0; ti < 2; ++ti)
    {
        for (int i = 0; i < 3; ++i)
        {
            for (int j = 0; j < 3; ++j)
            {
                EXPECT_NEAR(kt.values[ti](i, j), oracle::torus_heat_image_sum(1, 1, tp[i], tp[j], kt.times[ti]), 1e-10);
            }
        }
    }
    const SpectralModel circle  = make_circle(2.0, 60);
    const std::vector<Point> cp = {{0.3, 0, 0}, {2.0, 0, 0}, {5.9, 0, 0}};
    const GridRef cg            = share(ObservationGrid::unit_weights(cp));
    const KernelSamples kc      = heat_kernel(circle, cg, cg, {0.05, 1.0});
    for (std::size_t ti = 0; ti < 2; ++ti)
    {
        for (int i = 0; i < 3; ++i)
        {
            for (int j = 0; j < 3; ++j)
            {
                EXPECT_NEAR(kc.values[ti](i, j), oracle::circle_heat_image_sum(2.0, cp[i][0], cp[j][0], kc.times[ti]), 1e-10);
            }
        }
    }
}

TEST(Heat, KernelIsSymmetric)
{
    const SpectralModel m = make_sphere(1.0, 12);
    const GridRef g = share(ObservationGrid::unit_weights({{0.3, 0.1, 0}, {1.7, 2.0, 0}, {2.5, 4.0, 0}}));
    const KernelSamples k = heat_kernel(m, g, g, {0.05, 0.5});
    for (const auto& v : k.values)
    {
        EXPECT_LT((v - v.transpose()).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(Wave, DuhamelMatchesLeapfrogOnCycle)
{
    const Eigen::MatrixXd a = cycle_laplacian(16);
    const SpectralModel m   = make_matrix_model(a);
    Eigen::VectorXd g       = Eigen::VectorXd::Zero(16);
    g(0)                    = 1.0;
    auto profile            = [](double t) { return std::exp(-t) * std::sin(3 * t); };
    SpaceTimeSource src;
    src.terms.push_back({GridFunction(m.quadrature_grid(), g), profile});
    const double dt = 5e-4;
    const Eigen::MatrixXd lf =
        oracle::leapfrog(a, [&](double t) -> Eigen::VectorXd { return profile(t) * g; }, dt, 6000, 200);
    std::vector<double> times;
    for (Eigen::Index i = 0; i < lf.cols(); ++i)
    {
        times.push_back(static_cast<double>(i) * 200 * dt);
    }
    const WaveSolution u = wave_duhamel(m, src, times, m.quadrature_grid());
    EXPECT_LT((u.values - lf).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Wave, EnergyIsConservedAfterSourceStops)
{
    const SpectralModel m = make_circle(1.0, 10);
    const GridFunction f  = dipole(m, m.quadrature_grid(), {0.5, 0, 0}, {3.5, 0, 0}, 0.5);
    SpaceTimeSource src;
    src.terms.push_back({f, [](double t) { return bump_profile(2.0 * t - 1.0); }});
    const std::vector<double> times = {1.0, 1.7, 2.9, 4.4};
    const WaveSolution u            = wave_duhamel(m, src, times, m.quadrature_grid());
    const std::vector<double> e     = wave_energy(m, u);
    for (double x : e)
    {
        EXPECT_NEAR(x, e.front(), 1e-10 * e.front());
    }
}

TEST(Wave, SinePropagatorOfModeIsClosedForm)
{
    const SpectralModel m = make_flat_torus(1.0, 1.3, 6);
    const GridFunction f  = eigenfunction(m, m.quadrature_grid(), 2, 1);
    const double w        = std::sqrt(m.level(2).eigenvalue);
    for (double t : {0.0, 0.3, 2.0})
    {
        const GridFunction u = wave_sine_apply(m, f, t);
        EXPECT_LT(max_abs(u.values() - std::sin(w * t) / w * f.values()), 1e-13);
    }
}

TEST(Gaussian, OffDiagonalDecayHasNegativeSlope)
{
    const SpectralModel m = make_circle(1.0, 200);
    const GridRef w1      = share(ObservationGrid::unit_weights({{0.0, 0, 0}}));
    const GridRef w2      = share(ObservationGrid::unit_weights({{1.0, 0, 0}}));
    std::vector<double> t;
    for (int i = 0; i <= 8; ++i)
    {
        t.push_back(0.02 * std::pow(5.0, i / 8.0));
    }
    const GaussianDecayFit fit = fit_gaussian_decay(m, w1, w2, t);
    EXPECT_LT(fit.slope, 0.0);
    // On [0.02, 0.1] the image-sum prefactor is mild: c is close to d^2/4.
    EXPECT_NEAR(fit.c_fit, 0.25, 0.05);
}
