#include <algorithm>
#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "fraccal/models.hpp"
#include "fraccal/oracles.hpp"
#include "fraccal/operators.hpp"

using namespace fraccal;

namespace
{

// Distinct torus eigenvalues with multiplicities, by enumerating lattice points.
std::vector<std::pair<double, int>> brute_force_torus(double L1, double L2, std::size_t count)
{
    std::map<long long, std::pair<double, int>> levels;
    const int range = 40;
    for (int m = -range; m <= range; ++m)
    {
        for (int n = -range; n <= range; ++n)
        {
            const double lam = 4.0 * pi * pi * (m * m / (L1 * L1) + n * n / (L2 * L2));
            const auto key   = static_cast<long long>(std::llround(lam * 1e6));
            auto& e          = levels[key];
            e.first          = lam;
            e.second += 1;
        }
    }
    std::vector<std::pair<double, int>> out;
    for (const auto& [key, e] : levels)
    {
        if (out.size() == count)
        {
            break;
        }
        out.push_back(e);
    }
    return out;
}

double max_offdiag_gram(const SpectralModel& m)
{
    const Eigen::MatrixXd g = m.gram(*m.quadrature_grid());
    return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

} // namespace

TEST(Circle, EigenvaluesAreSquaredFrequencies)
{
    const SpectralModel m = make_circle(2.0, 7);
    ASSERT_EQ(m.levels().size(), 7u);
    EXPECT_EQ(m.level(0).eigenvalue, 0.0);
    EXPECT_EQ(m.level(0).multiplicity, 1);
    for (std::size_t k = 1; k < 7; ++k)
    {
        EXPECT_NEAR(m.level(k).eigenvalue, k * k / 4.0, 1e-14);
        EXPECT_EQ(m.level(k).multiplicity, 2);
    }
}

TEST(Torus, LevelsMatchLatticeEnumeration)
{
    for (auto [L1, L2] : {std::pair{1.0, 1.0}, {1.0, std::sqrt(2.0)}, {1.0, 2.0}, {0.9, 1.0 / 0.9}})
    {
        const SpectralModel m = make_flat_torus(L1, L2, 25);
        const auto oracle     = brute_force_torus(L1, L2, 25);
        ASSERT_EQ(m.levels().size(), oracle.size());
        for (std::size_t k = 0; k < oracle.size(); ++k)
        {
            EXPECT_NEAR(m.level(k).eigenvalue, oracle[k].first, 1e-9 * std::max(1.0, oracle[k].first));
            EXPECT_EQ(m.level(k).multiplicity, oracle[k].second) << "L=(" << L1 << "," << L2 << ") k=" << k;
        }
    }
}

TEST(Sphere, EigenvaluesAndMultiplicities)
{
    const double r        = 1.3;
    const SpectralModel m = make_sphere(r, 9);
    for (int l = 0; l < 9; ++l)
    {
        EXPECT_NEAR(m.level(static_cast<std::size_t>(l)).eigenvalue, l * (l + 1) / (r * r), 1e-12);
        EXPECT_EQ(m.level(static_cast<std::size_t>(l)).multiplicity, 2 * l + 1);
    }
}

TEST(Models, QuadratureGridsMakeBasesOrthonormal)
{
    EXPECT_LT(max_offdiag_gram(make_circle(1.0, 12)), 1e-12);
    EXPECT_LT(max_offdiag_gram(make_flat_torus(1.0, 1.7, 15)), 1e-12);
    EXPECT_LT(max_offdiag_gram(make_sphere(0.8, 10)), 1e-12);
    EXPECT_LT(max_offdiag_gram(make_matrix_model(random_graph_laplacian(10, 3))), 1e-12);
}

TEST(Models, VolumeIsTotalQuadratureWeight)
{
    EXPECT_NEAR(make_circle(1.5, 4).quadrature_grid()->total_weight(), 3.0 * pi, 1e-12);
    EXPECT_NEAR(make_flat_torus(1.0, 2.5, 4).quadrature_grid()->total_weight(), 2.5, 1e-12);
    EXPECT_NEAR(make_sphere(2.0, 4).quadrature_grid()->total_weight(), 16.0 * pi, 1e-10);
}

TEST(Models, HeatTraceMatchesPoissonDualAndWeylLaw)
{
    // Flat torus: trace = area/(4 pi t) * prod_i sum_n exp(-n^2 L_i^2 / (4t)).
    const double L1 = 1.0;
    const double L2 = 1.2;
    const SpectralModel m = make_flat_torus(L1, L2, 80);
    for (double t : {0.01, 0.02, 0.05})
    {
        double trace = 0.0;
        for (const auto& lv : m.levels())
        {
            trace += lv.multiplicity * std::exp(-lv.eigenvalue * t);
        }
        auto theta = [t](double L) {
            double s = 0.0;
            for (int n = -20; n <= 20; ++n)
            {
                s += std::exp(-n * n * L * L / (4.0 * t));
            }
            return s;
        };
        const double weyl = L1 * L2 / (4.0 * pi * t);
        EXPECT_NEAR(trace / (weyl * theta(L1) * theta(L2)), 1.0, 1e-9) << "t=" << t;
        if (t <= 0.01)
        {
            EXPECT_NEAR(trace / weyl, 1.0, 1e-9) << "t=" << t;
        }
    }
}

TEST(Models, TailBoundCoversTruncationError)
{
    const SpectralModel m = make_flat_torus(1.0, 1.0, 8);
    const Point x{0.3, 0.4, 0};
    const Point y{0.35, 0.5, 0};
    const GridRef g = share(ObservationGrid::unit_weights({x, y}));
    for (double t : {0.05, 0.1, 0.3})
    {
        const KernelSamples k = heat_kernel(m, g, g, {t});
        const double err      = std::abs(k.values[0](1, 0) - oracle::torus_heat_image_sum(1.0, 1.0, y, x, t));
        EXPECT_LE(err, m.heat_tail_bound(t) + 1e-14) << "t=" << t;
    }
}

TEST(Models, GeodesicDistances)
{
    const SpectralModel c = make_circle(2.0, 3);
    EXPECT_NEAR(c.distance({0.1, 0, 0}, {2 * pi - 0.1, 0, 0}), 0.4, 1e-12);
    const SpectralModel s = make_sphere(1.5, 3);
    EXPECT_NEAR(s.distance({0.0, 0, 0}, {pi, 0, 0}), 1.5 * pi, 1e-12);
    EXPECT_NEAR(s.distance({pi / 2, 0, 0}, {pi / 2, pi / 2, 0}), 1.5 * pi / 2, 1e-12);
    const SpectralModel t = make_flat_torus(1.0, 2.0, 3);
    EXPECT_NEAR(t.distance({0.05, 0.1, 0}, {0.95, 1.9, 0}), std::hypot(0.1, 0.2), 1e-12);
    const SpectralModel g = make_matrix_model(cycle_laplacian(10));
    EXPECT_EQ(g.distance({0, 0, 0}, {7, 0, 0}), 3.0);
}

TEST(Models, SphereHarmonicsAreEigenfunctions)
{
    // Check Delta Y = -l(l+1) Y pointwise by finite differences in (theta, phi).
    const SpectralModel m = make_sphere(1.0, 5);
    const double h        = 1e-4;
    const Point x{1.1, 0.7, 0};
    for (std::size_t l = 1; l < 5; ++l)
    {
        for (int j = 0; j < m.level(l).multiplicity; ++j)
        {
            auto f = [&](double th, double ph) { return m.evaluate(l, j, {th, ph, 0}); };
            const double th  = x[0];
            const double ph  = x[1];
            const double ft  = (f(th + h, ph) - f(th - h, ph)) / (2 * h);
            const double ftt = (f(th + h, ph) - 2 * f(th, ph) + f(th - h, ph)) / (h * h);
            const double fpp = (f(th, ph + h) - 2 * f(th, ph) + f(th, ph - h)) / (h * h);
            const double lap = ftt + std::cos(th) / std::sin(th) * ft + fpp / (std::sin(th) * std::sin(th));
            EXPECT_NEAR(lap, -m.level(l).eigenvalue * f(th, ph), 1e-5) << "l=" << l << " j=" << j;
        }
    }
}

TEST(MatrixModel, RejectsInvalidInput)
{
    Eigen::MatrixXd a = cycle_laplacian(5);
    a(0, 1) += 0.1;
    EXPECT_THROW(make_matrix_model(a), ModelError);
    EXPECT_THROW(make_matrix_model(Eigen::MatrixXd::Identity(4, 4)), ModelError);
    Eigen::MatrixXd two = Eigen::MatrixXd::Zero(4, 4);
    two.topLeftCorner(2, 2) << 1, -1, -1, 1;
    two.bottomRightCorner(2, 2) << 1, -1, -1, 1;
    EXPECT_THROW(make_matrix_model(two), ModelError);
}

TEST(MatrixModel, TruncationMovesLevelsToCompleteTail)
{
    const SpectralModel full = make_matrix_model(cycle_laplacian(8));
    const SpectralModel cut  = make_matrix_model(cycle_laplacian(8), 3);
    EXPECT_EQ(full.levels().size(), 5u);
    EXPECT_EQ(cut.levels().size(), 3u);
    EXPECT_GT(cut.heat_tail_bound(0.5), 0.0);
    EXPECT_EQ(full.heat_tail_bound(0.5), 0.0);
}

TEST(Models, InvalidParametersThrow)
{
    EXPECT_THROW(make_circle(-1.0, 4), InvalidArgument);
    EXPECT_THROW(make_flat_torus(1.0, 0.0, 4), InvalidArgument);
    EXPECT_THROW(make_sphere(1.0, 0), InvalidArgument);
}
