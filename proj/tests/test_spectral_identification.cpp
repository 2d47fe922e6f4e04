#include <cmath>

#include <gtest/gtest.h>

#include "fraccal/identification.hpp"
#include "fraccal/models.hpp"
#include "fraccal/operators.hpp"

using namespace fraccal;

namespace
{

KernelSamples uniform_heat(const SpectralModel& m, std::vector<Point> pts, double dt, int count)
{
    const GridRef g = share(ObservationGrid::unit_weights(std::move(pts)));
    std::vector<double> t;
    for (int i = 1; i <= count; ++i)
    {
        t.push_back(i * dt);
    }
    return heat_kernel(m, g, g, t);
}

} // namespace

TEST(Identify, CircleEigenvaluesAndMultiplicities)
{
    const SpectralModel m  = make_circle(1.0, 6);
    const IdentifiedSpectrum s =
        identify_spectrum(uniform_heat(m, {{0.1, 0, 0}, {0.9, 0, 0}, {2.2, 0, 0}, {4.0, 0, 0}}, 0.02, 400));
    ASSERT_EQ(s.size(), 6u);
    EXPECT_NEAR(s.eigenvalues[0], 0.0, 1e-10);
    EXPECT_EQ(s.multiplicities[0], 1);
    for (int k = 1; k <= 5; ++k)
    {
        EXPECT_NEAR(s.eigenvalues[static_cast<std::size_t>(k)] / (k * k), 1.0, 1e-9);
        EXPECT_EQ(s.multiplicities[static_cast<std::size_t>(k)], 2);
    }
    EXPECT_FALSE(s.unstable);
    EXPECT_LT(s.residual, 1e-10);
}

TEST(Identify, SingleReceiverSeesMultiplicityOne)
{
    // One observation point cannot separate the branches of a level.
    const SpectralModel m      = make_circle(1.0, 4);
    const IdentifiedSpectrum s = identify_spectrum(uniform_heat(m, {{0.3, 0, 0}}, 0.05, 200));
    ASSERT_EQ(s.size(), 4u);
    for (std::size_t k = 0; k < s.size(); ++k)
    {
        EXPECT_EQ(s.multiplicities[k], 1);
    }
}

TEST(Identify, SphereRadiusFromFirstEigenvalue)
{
    for (double r : {0.7, 1.0, 2.4})
    {
        const SpectralModel m = make_sphere(r, 5);
        const double dt       = 0.6 / m.levels().back().eigenvalue;
        const IdentifiedSpectrum s = identify_spectrum(
            uniform_heat(m, {{0.3, 0.1, 0}, {1.1, 2.0, 0}, {2.0, 4.1, 0}, {2.7, 5.5, 0}}, dt, 400));
        const FamilyEstimate f = identify_family(s, "sphere");
        EXPECT_NEAR(f.parameters.at(0), r, 1e-8 * r);
        for (std::size_t k = 1; k < s.size(); ++k)
        {
            EXPECT_EQ(s.multiplicities[k], std::min<int>(2 * static_cast<int>(k) + 1, 4));
        }
    }
}

TEST(Identify, TorusLengthsInCanonicalOrder)
{
    const SpectralModel m      = make_flat_torus(std::sqrt(2.0), 1.0, 8);
    const IdentifiedSpectrum s = identify_spectrum(uniform_heat(
        m, {{0.1, 0.2, 0}, {0.9, 0.45, 0}, {0.35, 0.8, 0}, {1.2, 0.3, 0}, {0.6, 0.65, 0}}, 0.004, 400));
    const FamilyEstimate f = identify_family(s, "torus");
    ASSERT_EQ(f.parameters.size(), 2u);
    EXPECT_NEAR(f.parameters[0], 1.0, 1e-6);
    EXPECT_NEAR(f.parameters[1], std::sqrt(2.0), 1e-6);
    EXPECT_FALSE(f.ambiguous);
}

TEST(Identify, CircleFamilyRadius)
{
    const SpectralModel m      = make_circle(1.7, 5);
    const IdentifiedSpectrum s = identify_spectrum(uniform_heat(m, {{0.1, 0, 0}, {2.0, 0, 0}}, 0.05, 300));
    EXPECT_NEAR(identify_family(s, "circle").parameters.at(0), 1.7, 1e-8);
}

TEST(Identify, RejectsNonUniformOrShortGrids)
{
    const SpectralModel m = make_circle(1.0, 4);
    const GridRef g       = share(ObservationGrid::unit_weights({{0.2, 0, 0}}));
    std::vector<double> t;
    for (int i = 1; i <= 100; ++i)
    {
        t.push_back(0.01 * i * i);
    }
    EXPECT_THROW(identify_spectrum(heat_kernel(m, g, g, t)), IdentificationError);
    EXPECT_THROW(identify_spectrum(uniform_heat(m, {{0.2, 0, 0}}, 0.05, 10)), IdentificationError);
}

TEST(Identify, RankCapIsFlagged)
{
    // More levels than r_max allows: the spectrum is flagged unstable.
    const SpectralModel m = make_circle(1.0, 12);
    IdentificationOptions opt;
    opt.r_max                  = 5;
    const IdentifiedSpectrum s = identify_spectrum(uniform_heat(m, {{0.1, 0, 0}, {2.0, 0, 0}}, 0.005, 400), opt);
    EXPECT_LE(s.size(), 5u);
    EXPECT_TRUE(s.unstable);
}

TEST(Identify, WaveFromIdentifiedSpectrumMatchesDirectWave)
{
    const SpectralModel m      = make_flat_torus(1.0, 1.3, 6);
    const KernelSamples heat   = uniform_heat(m, {{0.1, 0.2, 0}, {0.5, 0.9, 0}, {0.8, 0.4, 0}}, 0.004, 400);
    const IdentifiedSpectrum s = identify_spectrum(heat);
    const std::vector<double> wt = {0.0, 0.4, 1.3, 3.0, 5.0};
    const WaveData rec           = wave_from_identified(s, wt);
    const WaveData dir           = wave_kernel(m, heat.sources, heat.receivers, wt);
    EXPECT_LT(max_difference(rec, dir), 1e-8);
    for (double b : rec.kernel.tail_bounds)
    {
        EXPECT_GE(b, 0.0);
    }
}

TEST(Identify, FromEigenvaluesKeepsMultiplicities)
{
    const IdentifiedSpectrum s = IdentifiedSpectrum::from_eigenvalues({0.0, 1.0, 4.0}, {1, 2, 2});
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.multiplicities[2], 2);
    const auto pos = s.positive_eigenvalues();
    ASSERT_EQ(pos.size(), 2u);
    EXPECT_EQ(pos[0], 1.0);
}

TEST(Identify, UnknownFamilyIsRejected)
{
    const IdentifiedSpectrum s = IdentifiedSpectrum::from_eigenvalues({0.0, 1.0, 4.0}, {1, 2, 2});
    EXPECT_THROW(identify_family(s, "hyperbolic"), InvalidArgument);
}
