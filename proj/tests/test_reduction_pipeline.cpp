#include <cmath>

#include <gtest/gtest.h>

#include "fraccal/models.hpp"
#include "fraccal/operators.hpp"
#include "fraccal/oracles.hpp"
#include "fraccal/pairs.hpp"
#include "fraccal/reduction.hpp"
#include "fraccal/sources.hpp"

using namespace fraccal;

namespace
{

double max_abs(const Eigen::VectorXd& v)
{
    return v.cwiseAbs().maxCoeff();
}

// Weighted cycle: unit weights except edge (0,1), which gets weight w.
Eigen::MatrixXd weighted_cycle(int n, double w)
{
    Eigen::MatrixXd a = cycle_laplacian(n);
    a(0, 0) += w - 1.0;
    a(1, 1) += w - 1.0;
    a(0, 1) -= w - 1.0;
    a(1, 0) -= w - 1.0;
    return a;
}

} // namespace

TEST(Moments, MatchAdaptiveQuadratureOnGraphs)
{
    // Source e_0 - e_1, receiver at distance 6, so D(t) = O(t^5) as t -> 0 and
    // moments up to order 3 converge.
    const int n             = 12;
    const Eigen::MatrixXd a = weighted_cycle(n, 1.0);
    const Eigen::MatrixXd b = weighted_cycle(n, 1.7);
    const SpectralModel ma  = make_matrix_model(a);
    const SpectralModel mb  = make_matrix_model(b);
    Eigen::VectorXd f       = Eigen::VectorXd::Zero(n);
    f(0)                    = 1.0;
    f(1)                    = -1.0;
    const GridFunction fa(ma.quadrature_grid(), f, true);
    const GridFunction fb(mb.quadrature_grid(), f, true);
    const std::vector<Point> rx = {{6, 0, 0}};
    const double alpha          = 0.5;
    MomentOptions opt;
    opt.m_max                          = 3;
    const std::vector<MomentRecord> ms = heat_difference_moments(ma, fa, rx, mb, fb, rx, alpha, opt);
    ASSERT_EQ(ms.size(), 4u);
    for (const auto& m : ms)
    {
        // int_0^inf s^{m-alpha} D(1/s) ds = int_0^inf t^{alpha-m-2} D(t) dt, with t = e^u.
        auto integrand = [&](double u) {
            const double t = std::exp(u);
            const double d = oracle::dense_heat(a, f, t)(6) - oracle::dense_heat(b, f, t)(6);
            return d * std::pow(t, alpha - m.order - 1.0);
        };
        const double ref = oracle::adaptive_simpson(integrand, std::log(1e-4), std::log(400.0), 1e-13);
        EXPECT_NEAR(m.value, ref, std::max(m.error, 1e-9 * std::abs(ref))) << "m=" << m.order;
        EXPECT_LT(m.error, 1e-6 * std::max(1.0, std::abs(ref))) << "m=" << m.order;
    }
}

TEST(Moments, IdenticalModelsGiveZero)
{
    const SpectralModel m = make_sphere(1.0, 12);
    const GridFunction f  = dipole(m, m.quadrature_grid(), {0.3, 0, 0}, {0.35, 2.0, 0}, 0.25);
    const std::vector<Point> rx = {{1.5, 0.5, 0}, {2.0, 3.0, 0}};
    for (const auto& r : heat_difference_moments(m, f, rx, m, f, rx, 0.5))
    {
        EXPECT_EQ(r.value, 0.0);
        EXPECT_FALSE(r.significant());
    }
}

TEST(Moments, RejectOverlappingReceivers)
{
    const SpectralModel m = make_circle(1.0, 10);
    const GridFunction f  = dipole(m, m.quadrature_grid(), {0.5, 0, 0}, {2.5, 0, 0}, 0.4);
    EXPECT_THROW(heat_difference_moments(m, f, {{0.5, 0, 0}}, m, f, {{0.5, 0, 0}}, 0.5), InvalidArgument);
}

TEST(Moments, IntegrationByPartsIdentity)
{
    // Exact graph models: D(t) = O(t^6) at the receiver, so the boundary terms vanish.
    const int n           = 12;
    const SpectralModel a = make_matrix_model(weighted_cycle(n, 1.0));
    const SpectralModel b = make_matrix_model(weighted_cycle(n, 0.6));
    Eigen::VectorXd f     = Eigen::VectorXd::Zero(n);
    f(0)                  = 1.0;
    f(1)                  = -1.0;
    const GridFunction fa(a.quadrature_grid(), f, true);
    const GridFunction fb(b.quadrature_grid(), f, true);
    for (double alpha : {0.25, 0.5, 0.75})
    {
        const auto pairs = integration_by_parts_check(a, fa, {{6, 0, 0}, {8, 0, 0}}, b, fb, {{6, 0, 0}, {8, 0, 0}}, alpha);
        for (const auto& [lhs, rhs] : pairs)
        {
            EXPECT_GT(std::abs(lhs), 1e-6);
            EXPECT_NEAR(lhs, rhs, QuadratureScheme{}.tolerance) << "alpha=" << alpha;
        }
    }
}

TEST(Commutation, TimeDerivativesOfHeatEqualPowersOfOperator)
{
    // d^m/dt^m e^{-tP} f = (-P)^m e^{-tP} f for m = 1, 2, by Richardson-extrapolated differences.
    const SpectralModel m = make_circle(1.0, 10);
    const GridFunction f  = dipole(m, m.quadrature_grid(), {0.5, 0, 0}, {3.0, 0, 0}, 0.6);
    const double t        = 0.3;
    auto heat             = [&](double s) { return heat_apply(m, f, s).values(); };
    auto d1 = [&](double h) { return Eigen::VectorXd((heat(t + h) - heat(t - h)) / (2 * h)); };
    auto d2 = [&](double h) { return Eigen::VectorXd((heat(t + h) - 2 * heat(t) + heat(t - h)) / (h * h)); };
    const double h = 1e-2;
    const Eigen::VectorXd r1 = (4.0 * d1(h / 2) - d1(h)) / 3.0;
    const Eigen::VectorXd r2 = (4.0 * d2(h / 2) - d2(h)) / 3.0;
    const Eigen::VectorXd p1 = -apply_multiplier(m, f, [t](double lam, int) { return lam * std::exp(-t * lam); }).values();
    const Eigen::VectorXd p2 = apply_multiplier(m, f, [t](double lam, int) { return lam * lam * std::exp(-t * lam); }).values();
    EXPECT_LT(max_abs(r1 - p1), 1e-6 * max_abs(p1));
    EXPECT_LT(max_abs(r2 - p2), 1e-5 * max_abs(p2));
}

TEST(Transmutation, ScalarMatchesGaussian)
{
    for (double lambda : {0.0, 0.7, 2.0, 5.0})
    {
        for (double t : {0.1, 0.5, 2.0})
        {
            EXPECT_NEAR(transmutation_scalar(lambda, t), std::exp(-t * lambda * lambda), 1e-10);
        }
    }
}

TEST(Transmutation, OperatorMatchesHeatInBothModes)
{
    const SpectralModel m = make_flat_torus(1.0, 1.2, 8);
    const GridFunction f  = dipole(m, m.quadrature_grid(), {0.2, 0.3, 0}, {0.7, 0.9, 0}, 0.25);
    for (double t : {0.05, 0.5})
    {
        const Eigen::VectorXd h = heat_apply(m, f, t).values();
        EXPECT_LT(max_abs(transmutation_operator(m, f, t).values() - h), 1e-8);
        EXPECT_LT(max_abs(transmutation_operator(m, f, t, {}, TransmutationMode::analytic).values() - h), 1e-12);
    }
}

TEST(Transmutation, UnderresolvedRuleIsReported)
{
    const SpectralModel m = make_circle(1.0, 12);
    const GridFunction f  = eigenfunction(m, m.quadrature_grid(), 11, 0);
    OscillatoryScheme coarse;
    coarse.order           = 4;
    coarse.min_panels      = 1;
    coarse.panels_per_wave = 0.1;
    EXPECT_THROW(transmutation_operator(m, f, 1.0, coarse), QuadratureError);
}

TEST(HeatToWave, RecoveredWaveMatchesDirectWave)
{
    const SpectralModel m = make_circle(1.0, 8);
    const GridRef o = share(ObservationGrid::unit_weights({{0.2, 0, 0}, {1.4, 0, 0}, {3.0, 0, 0}}));
    std::vector<double> t;
    for (int i = 1; i <= 300; ++i)
    {
        t.push_back(0.01 * i);
    }
    const std::vector<double> wt = {0.0, 0.5, 1.0, 2.5, 5.0};
    const WaveData rec           = heat_to_wave(heat_kernel(m, o, o, t), wt);
    const WaveData dir           = wave_kernel(m, o, o, wt);
    EXPECT_EQ(rec.provenance, Provenance::recovered_from_heat);
    EXPECT_LT(max_difference(rec, dir), 1e-7);
}

TEST(HeatToWave, GaverStehfestIsALowAccuracyCrossCheck)
{
    EXPECT_NEAR(gaver_stehfest([](double p) { return 1.0 / (p + 1.0); }, 1.0), std::exp(-1.0), 1e-4);
    const double lam = 2.0;
    auto heat        = [lam](double s) { return std::exp(-lam * s); };
    for (double time : {0.5, 1.0})
    {
        EXPECT_NEAR(wave_from_heat_stehfest(heat, time), std::sin(std::sqrt(lam) * time) / std::sqrt(lam), 1e-2);
    }
}

TEST(Pairs, IdenticalSolutionsImplyIdenticalHeatKernels)
{
    const SpectralModel a = make_sphere(1.0, 10);
    PairProtocol p;
    p.observation = {{0.3, 0, 0}, {0.3, 1, 0}, {0.5, 2, 0}, {1.2, 0.5, 0}};
    p.receivers   = {{1.2, 0.5, 0}};
    p.sources     = {SourceSpec{{0.3, 0.0, 0}, {0.35, 2.0, 0}, 0.25}};
    const FractionalHeatReport same = verify_fractional_to_heat(a, a, p, 1e-9);
    EXPECT_EQ(same.solution_discrepancy, 0.0);
    EXPECT_EQ(same.heat_discrepancy, 0.0);
    EXPECT_TRUE(same.implication_holds);
    const FractionalHeatReport diff = verify_fractional_to_heat(a, make_sphere(1.05, 10), p, 1e-9);
    EXPECT_GT(diff.solution_discrepancy, 1e-6);
    EXPECT_GT(diff.heat_discrepancy, diff.derived_tolerance);
}

TEST(Pairs, DistinguishSeparatesSpheres)
{
    const SpectralModel a = make_sphere(1.0, 12);
    PairProtocol p;
    p.observation = {{0.3, 0, 0}, {0.3, 1, 0}, {0.5, 2, 0}, {1.2, 0.5, 0}, {1.3, 1.5, 0}, {1.0, 3, 0}};
    p.receivers   = {{1.2, 0.5, 0}, {1.3, 1.5, 0}};
    p.sources     = {SourceSpec{{0.3, 0.0, 0}, {0.35, 2.0, 0}, 0.25}};
    p.id_dt       = 0.6 / a.levels().back().eigenvalue;
    p.identification.r_max = 12;
    EXPECT_TRUE(distinguish(a, a, p).same);
    const Verdict v = distinguish(a, make_sphere(1.05, 12), p);
    EXPECT_FALSE(v.same);
    EXPECT_FALSE(v.stage.empty());
    EXPECT_FALSE(v.log.empty());
}
