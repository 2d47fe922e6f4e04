///
/// \file acceptance.hpp
///
/// The acceptance suite: ten property checks with quantitative thresholds,
/// each reported as one line with the measured value.
///
#ifndef FRACCAL_ACCEPTANCE_HPP
#define FRACCAL_ACCEPTANCE_HPP

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "config.hpp"
#include "identification.hpp"
#include "models.hpp"
#include "operators.hpp"
#include "oracles.hpp"
#include "pairs.hpp"
#include "reduction.hpp"
#include "sources.hpp"

namespace fraccal
{

struct CriterionResult
{
    int id = 0;
    std::string name;
    bool passed = false;
    /// Measured value and threshold, already formatted.
    std::string measured;
    std::string threshold;
    std::string detail;
    double seconds = 0.0;

    std::string line() const
    {
        return fmt::format("[{}] {:2d} {}: {} (threshold {}){}{} [{:.2f} s]", passed ? "PASS" : "FAIL", id, name,
                           measured, threshold, detail.empty() ? "" : "; ", detail, seconds);
    }
};

namespace acceptance
{

inline std::string sci(double x)
{
    return fmt::format("{:.3e}", x);
}

inline std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v;
    for (int i = 0; i < n; ++i)
    {
        v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1.0));
    }
    return v;
}

inline double max_abs(const Eigen::VectorXd& v)
{
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

inline Eigen::VectorXd random_mean_zero(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
    {
        v(i) = g(rng);
    }
    return v.array() - v.mean();
}

/// 1. Gamma identity for scalars.
inline CriterionResult gamma_scalar_identity(const AcceptanceSpec& s)
{
    CriterionResult r{1, "scalar Gamma identity"};
    double worst = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (double a : {0.5, 1.0, 4.0})
    {
        for (double alpha : {0.25, 0.5, 0.75})
        {
            const double exact = std::pow(a, -alpha);
            worst              = std::max(worst, std::abs(gamma_scalar(a, alpha) - exact) / exact);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.passed          = worst < s.gamma_scalar && secs < s.gamma_runtime;
    r.measured        = fmt::format("max rel error {}, runtime {:.3g} s", sci(worst), secs);
    r.threshold       = fmt::format("< {}, < {:.3g} s", sci(s.gamma_scalar), s.gamma_runtime);
    return r;
}

/// 2. Operator Gamma representation against the spectral solve, and the
/// matrix solve against a dense eigendecomposition.
inline CriterionResult gamma_operator(const AcceptanceSpec& s, std::uint64_t seed)
{
    CriterionResult r{2, "operator Gamma representation"};
    std::mt19937_64 rng(seed);
    double route  = 0.0;
    double oracle = 0.0;
    const std::vector<std::pair<std::string, Eigen::MatrixXd>> mats = {
        {"C_8", cycle_laplacian(8)}, {"C_16", cycle_laplacian(16)}, {"random_12", random_graph_laplacian(12, seed)}};
    for (const auto& [name, a] : mats)
    {
        const SpectralModel m = make_matrix_model(a);
        for (double alpha : {0.25, 0.5, 0.75})
        {
            const GridFunction f(m.quadrature_grid(), random_mean_zero(static_cast<int>(a.rows()), rng), true);
            const GridFunction u = fractional_solve(m, f, alpha);
            route  = std::max(route, max_abs(gamma_fractional(m, f, alpha).values() - u.values()));
            oracle = std::max(oracle, max_abs(u.values() - oracle::dense_fractional_solve(a, f.values(), alpha)));
        }
    }
    const SpectralModel c = make_circle(1.0, 12);
    const GridFunction f  = dipole(c, c.quadrature_grid(), {0.5, 0, 0}, {3.0, 0, 0}, 0.6);
    for (double alpha : {0.25, 0.5, 0.75})
    {
        route = std::max(route, max_abs(gamma_fractional(c, f, alpha).values() - fractional_solve(c, f, alpha).values()));
    }
    r.passed    = route < s.gamma_operator && oracle < s.eigen_oracle;
    r.measured  = fmt::format("Gamma vs spectral {}, matrix vs dense eigendecomposition {}", sci(route), sci(oracle));
    r.threshold = fmt::format("< {}, < {}", sci(s.gamma_operator), sci(s.eigen_oracle));
    r.detail    = "C_8, C_16, random 12-vertex graph, circle K=12; alpha 0.25/0.5/0.75";
    return r;
}

/// 3. Scalar transmutation against exp(-t lambda^2).
inline CriterionResult transmutation_scalar_check(const AcceptanceSpec& s, const OscillatoryScheme& scheme)
{
    CriterionResult r{3, "transmutation scalar"};
    double worst = 0.0;
    double zero  = 0.0;
    for (double lambda : linspace(0.0, 5.0, 20))
    {
        for (double t : linspace(0.1, 2.0, 10))
        {
            worst = std::max(worst, std::abs(transmutation_scalar(lambda, t, scheme) - std::exp(-t * lambda * lambda)));
        }
    }
    for (double t : linspace(0.1, 2.0, 10))
    {
        zero = std::max(zero, std::abs(transmutation_scalar(0.0, t, scheme) - 1.0));
    }
    r.passed    = worst < s.transmutation && zero < s.transmutation_zero;
    r.measured  = fmt::format("max error {} on 20x10 grid, lambda=0 error {}", sci(worst), sci(zero));
    r.threshold = fmt::format("< {}, < {}", sci(s.transmutation), sci(s.transmutation_zero));
    return r;
}

/// 4. Transmutation operator against the heat semigroup.
inline CriterionResult transmutation_operator_check(const AcceptanceSpec& s, const OscillatoryScheme& scheme)
{
    CriterionResult r{4, "transmutation operator"};
    double worst = 0.0;
    const SpectralModel c8 = make_matrix_model(cycle_laplacian(8));
    const SpectralModel ci = make_circle(1.0, 12);
    for (double t : {0.2, 0.5, 1.0})
    {
        for (int i = 0; i < 8; ++i)
        {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(8);
            e(i)              = 1.0;
            const GridFunction f(c8.quadrature_grid(), e);
            worst = std::max(worst, max_abs(transmutation_operator(c8, f, t, scheme).values() - heat_apply(c8, f, t).values()));
        }
        for (std::size_t k = 0; k < ci.levels().size(); ++k)
        {
            for (int j = 0; j < ci.level(k).multiplicity; ++j)
            {
                const GridFunction f = eigenfunction(ci, ci.quadrature_grid(), k, j);
                worst = std::max(worst, max_abs(transmutation_operator(ci, f, t, scheme).values() - heat_apply(ci, f, t).values()));
            }
        }
    }
    r.passed    = worst < s.transmutation_op;
    r.measured  = fmt::format("max error {}", sci(worst));
    r.threshold = fmt::format("< {}", sci(s.transmutation_op));
    r.detail    = "standard basis of C_8, eigenbasis of circle K=12, t = 0.2/0.5/1";
    return r;
}

/// 5. Torus (1,1) spectral heat kernel against the image sum.
inline CriterionResult heat_image_sum(const AcceptanceSpec& s)
{
    CriterionResult r{5, "heat kernel vs image sum"};
    const SpectralModel m          = make_flat_torus(1.0, 1.0, 40);
    const std::vector<Point> pts   = {{0.1, 0.2, 0}, {0.5, 0.5, 0}, {0.9, 0.05, 0}, {0.3, 0.8, 0}, {0.72, 0.41, 0}};
    const GridRef g                = share(ObservationGrid::unit_weights(pts, "points"));
    const std::vector<double> times = {0.05, 0.1, 0.5};
    const KernelSamples k          = heat_kernel(m, g, g, times);
    double worst                   = 0.0;
    for (std::size_t ti = 0; ti < times.size(); ++ti)
    {
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            for (std::size_t j = 0; j < pts.size(); ++j)
            {
                const double o = oracle::torus_heat_image_sum(1.0, 1.0, pts[i], pts[j], times[ti]);
                worst = std::max(worst, std::abs(k.values[ti](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - o));
            }
        }
    }
    r.passed    = worst < s.image_sum;
    r.measured  = fmt::format("max error {}", sci(worst));
    r.threshold = fmt::format("< {}", sci(s.image_sum));
    r.detail    = "K=40, t = 0.05/0.1/0.5";
    return r;
}

/// 6. Off-diagonal Gaussian decay: log max |K_t| against 1/t has negative slope.
inline CriterionResult gaussian_decay()
{
    CriterionResult r{6, "Gaussian decay of the heat kernel"};
    std::vector<double> times;
    for (int i = 0; i <= 12; ++i)
    {
        times.push_back(1e-3 * std::pow(100.0, i / 12.0));
    }
    struct Case
    {
        std::string name;
        SpectralModel model;
        std::vector<Point> w1;
        std::vector<Point> w2;
    };
    std::vector<Case> cases;
    cases.push_back({"circle", make_circle(1.0, 400), {{0.0, 0, 0}, {0.1, 0, 0}}, {{1.5, 0, 0}, {1.6, 0, 0}}});
    cases.push_back({"torus", make_flat_torus(1.0, 1.0, 400), {{0.1, 0.1, 0}, {0.15, 0.1, 0}}, {{0.5, 0.55, 0}, {0.55, 0.5, 0}}});
    cases.push_back({"sphere", make_sphere(1.0, 160), {{0.3, 0.0, 0}, {0.35, 0.2, 0}}, {{2.0, 2.5, 0}, {2.2, 3.0, 0}}});
    double worst = -std::numeric_limits<double>::infinity();
    std::string fits;
    for (const auto& c : cases)
    {
        const GaussianDecayFit fit = fit_gaussian_decay(c.model, share(ObservationGrid::unit_weights(c.w1, "w1")),
                                                        share(ObservationGrid::unit_weights(c.w2, "w2")), times);
        worst = std::max(worst, fit.slope);
        fits += fmt::format("{}{} c={:.4g} (d^2/4={:.4g})", fits.empty() ? "" : ", ", c.name, fit.c_fit,
                            fit.separation * fit.separation / 4.0);
    }
    r.passed    = worst < 0.0;
    r.measured  = fmt::format("max slope {:.4g}", worst);
    r.threshold = "< 0";
    r.detail    = fits;
    return r;
}

/// 7. Duhamel formula against a leapfrog stepper and single-mode closed forms.
inline CriterionResult duhamel_check(const AcceptanceSpec& s)
{
    CriterionResult r{7, "Duhamel vs time stepper"};
    const Eigen::MatrixXd a = cycle_laplacian(16);
    const SpectralModel m   = make_matrix_model(a);
    const GridRef grid      = m.quadrature_grid();
    Eigen::VectorXd g       = Eigen::VectorXd::Zero(16);
    g(3)                    = 1.0;
    g(4)                    = 0.5;
    const auto profile      = [](double t) { return std::sin(2.0 * t) + 0.5 * std::cos(t); };
    SpaceTimeSource src;
    src.terms.push_back({GridFunction(grid, g), profile});

    const double dt   = 1e-3;
    const int stride  = 100;
    const int steps   = 5000;
    const Eigen::MatrixXd lf =
        oracle::leapfrog(a, [&](double t) -> Eigen::VectorXd { return profile(t) * g; }, dt, steps, stride);
    std::vector<double> times;
    for (int i = 0; i <= steps / stride; ++i)
    {
        times.push_back(i * stride * dt);
    }
    const WaveSolution u = wave_duhamel(m, src, times, grid);
    const double stepper = (u.values - lf).cwiseAbs().maxCoeff();

    double closed = 0.0;
    const SpectralModel circle = make_circle(1.0, 12);
    for (const SpectralModel* model : {&m, &circle})
    {
        const std::size_t k  = 3;
        const double lambda  = model->level(k).eigenvalue;
        SpaceTimeSource mode;
        mode.terms.push_back({eigenfunction(*model, model->quadrature_grid(), k, 0), [](double) { return 1.0; }});
        const WaveSolution w = wave_duhamel(*model, mode, times, model->quadrature_grid());
        const GridFunction phi = eigenfunction(*model, model->quadrature_grid(), k, 0);
        for (std::size_t ti = 0; ti < times.size(); ++ti)
        {
            const double amp = (1.0 - std::cos(std::sqrt(lambda) * times[ti])) / lambda;
            closed = std::max(closed, max_abs(w.values.col(static_cast<Eigen::Index>(ti)) - amp * phi.values()));
        }
    }
    r.passed    = stepper < s.duhamel_stepper && closed < s.duhamel_closed;
    r.measured  = fmt::format("leapfrog difference {}, closed-form error {}", sci(stepper), sci(closed));
    r.threshold = fmt::format("< {}, < {}", sci(s.duhamel_stepper), sci(s.duhamel_closed));
    r.detail    = fmt::format("C_16, leapfrog step {}, t in [0, 5]", dt);
    return r;
}

namespace detail
{

inline KernelSamples uniform_heat(const SpectralModel& m, const std::vector<Point>& pts, double dt, int count)
{
    const GridRef g = share(ObservationGrid::unit_weights(pts, "O"));
    std::vector<double> t;
    for (int i = 1; i <= count; ++i)
    {
        t.push_back(i * dt);
    }
    return heat_kernel(m, g, g, t);
}

} // namespace detail

/// 8. Eigenvalues, multiplicities and family parameters from heat data.
inline CriterionResult identification_accuracy(const AcceptanceSpec& s, const IdentificationOptions& opt)
{
    CriterionResult r{8, "identification accuracy"};
    const SpectralModel circle = make_circle(1.0, 6);
    const IdentifiedSpectrum sc =
        identify_spectrum(detail::uniform_heat(circle, {{0.1, 0, 0}, {0.9, 0, 0}, {2.2, 0, 0}, {4.0, 0, 0}}, 0.02, 400), opt);
    double rel     = 0.0;
    bool mult_ok   = true;
    const auto pos = sc.positive_eigenvalues();
    for (int k = 1; k <= 5; ++k)
    {
        if (static_cast<int>(pos.size()) < k)
        {
            rel = std::numeric_limits<double>::infinity();
            break;
        }
        rel = std::max(rel, std::abs(pos[static_cast<std::size_t>(k - 1)] - k * k) / (k * k));
    }
    for (std::size_t i = 0; i < sc.size(); ++i)
    {
        if (sc.eigenvalues[i] > 1e-8 && sc.multiplicities[i] != 2)
        {
            mult_ok = false;
        }
    }

    const double radius       = 1.3;
    const SpectralModel sph   = make_sphere(radius, 6);
    const IdentifiedSpectrum ss = identify_spectrum(
        detail::uniform_heat(sph, {{0.3, 0.1, 0}, {1.1, 2.0, 0}, {2.0, 4.1, 0}, {2.7, 5.5, 0}, {1.6, 0.7, 0}}, 0.03, 400),
        opt);
    const double sphere_err = std::abs(identify_family(ss, "sphere").parameters.at(0) - radius);

    const SpectralModel tor    = make_flat_torus(1.0, std::sqrt(2.0), 8);
    const IdentifiedSpectrum st = identify_spectrum(
        detail::uniform_heat(tor, {{0.1, 0.2, 0}, {0.45, 0.9, 0}, {0.8, 0.35, 0}, {0.3, 1.2, 0}, {0.65, 0.6, 0}}, 0.004, 400),
        opt);
    const FamilyEstimate ft = identify_family(st, "torus");
    const double torus_err  = std::max(std::abs(ft.parameters.at(0) - 1.0), std::abs(ft.parameters.at(1) - std::sqrt(2.0)));

    r.passed    = rel < s.eigen_relative && mult_ok && sphere_err < s.sphere_radius && torus_err < s.torus_lengths;
    r.measured  = fmt::format("circle rel error {}, multiplicity 2: {}, sphere radius error {}, torus length error {}",
                              sci(rel), mult_ok ? "yes" : "no", sci(sphere_err), sci(torus_err));
    r.threshold = fmt::format("< {}, yes, < {}, < {}", sci(s.eigen_relative), sci(s.sphere_radius), sci(s.torus_lengths));
    return r;
}

/// 9. Wave data recovered from heat samples against direct spectral wave data.
inline CriterionResult wave_recovery(const AcceptanceSpec& s, const IdentificationOptions& opt)
{
    CriterionResult r{9, "heat-to-wave reduction"};
    const std::vector<double> wt = linspace(0.0, 5.0, 101);
    double worst                 = 0.0;
    std::string parts;
    const SpectralModel circle   = make_circle(1.0, 12);
    const SpectralModel torus    = make_flat_torus(1.0, 1.3, 10);
    const std::vector<std::pair<const SpectralModel*, std::vector<Point>>> cases = {
        {&circle, {{0.2, 0, 0}, {1.0, 0, 0}, {2.5, 0, 0}, {4.4, 0, 0}}},
        {&torus, {{0.1, 0.2, 0}, {0.45, 0.9, 0}, {0.8, 0.35, 0}, {0.3, 1.2, 0}, {0.65, 0.6, 0}}}};
    for (const auto& [m, pts] : cases)
    {
        IdentificationOptions o = opt;
        o.r_max                 = std::max<int>(o.r_max, static_cast<int>(m->levels().size()));
        const double dt         = 0.6 / m->levels().back().eigenvalue;
        const KernelSamples h   = detail::uniform_heat(*m, pts, dt, 400);
        const WaveData rec      = heat_to_wave(h, wt, o);
        const WaveData dir      = wave_kernel(*m, h.sources, h.receivers, wt);
        const double e          = max_difference(rec, dir);
        worst                   = std::max(worst, e);
        parts += fmt::format("{}{} {}", parts.empty() ? "" : ", ", m->kind(), sci(e));
    }
    r.passed    = worst < s.wave_recovery;
    r.measured  = fmt::format("max error {}", sci(worst));
    r.threshold = fmt::format("< {}", sci(s.wave_recovery));
    r.detail    = parts + "; t in [0, 5]";
    return r;
}

/// One pair of the uniqueness check.
struct PairCase
{
    std::string name;
    SpectralModel a;
    SpectralModel b;
    PairProtocol protocol;
    bool isometric = false;
    bool identical = false;
};

inline PairProtocol torus_protocol(const SpectralModel& a)
{
    PairProtocol p;
    p.observation = {{0.2, 0.2, 0}, {0.2, 0.5, 0}, {0.65, 0.35, 0}, {0.7, 0.6, 0}, {0.6, 0.8, 0}, {0.3, 0.75, 0}};
    p.receivers   = {{0.65, 0.35, 0}, {0.7, 0.6, 0}, {0.6, 0.8, 0}};
    p.sources     = {SourceSpec{{0.2, 0.2, 0}, {0.2, 0.5, 0}, 0.12}};
    p.id_dt       = 0.6 / a.levels().back().eigenvalue;
    p.identification.r_max = static_cast<int>(a.levels().size());
    return p;
}

inline PairProtocol sphere_protocol(const SpectralModel& a)
{
    PairProtocol p;
    p.observation = {{0.3, 0, 0}, {0.3, 1, 0}, {0.5, 2, 0}, {1.2, 0.5, 0}, {1.3, 1.5, 0}, {1.0, 3, 0}};
    p.receivers   = {{1.2, 0.5, 0}, {1.3, 1.5, 0}, {1.4, 3.0, 0}};
    p.sources     = {SourceSpec{{0.3, 0.0, 0}, {0.35, 2.0, 0}, 0.25}};
    p.id_dt       = 0.6 / a.levels().back().eigenvalue;
    p.identification.r_max = static_cast<int>(a.levels().size());
    return p;
}

inline std::vector<PairCase> shipped_pairs()
{
    std::vector<PairCase> out;
    const int kt = 40;
    const int ks = 20;
    {
        SpectralModel a = make_flat_torus(1.0, 2.0, kt);
        PairProtocol p  = torus_protocol(a);
        p.to_b          = [](const Point& x) { return Point{x[1], x[0], x[2]}; };
        out.push_back({"tori (1,2)/(2,1)", std::move(a), make_flat_torus(2.0, 1.0, kt), p, true, false});
    }
    {
        SpectralModel a = make_sphere(1.0, ks);
        PairProtocol p  = sphere_protocol(a);
        out.push_back({"identical spheres", a, a, p, true, true});
    }
    {
        SpectralModel a = make_flat_torus(1.0, 1.0, kt);
        PairProtocol p  = torus_protocol(a);
        out.push_back({"identical tori", a, a, p, true, true});
    }
    {
        SpectralModel a = make_sphere(1.0, ks);
        PairProtocol p  = sphere_protocol(a);
        out.push_back({"spheres 1/1.05", std::move(a), make_sphere(1.05, ks), p, false, false});
    }
    {
        SpectralModel a = make_flat_torus(1.0, 1.0, kt);
        PairProtocol p  = torus_protocol(a);
        out.push_back({"tori (1,1)/(1,1.3)", std::move(a), make_flat_torus(1.0, 1.3, kt), p, false, false});
    }
    {
        SpectralModel a = make_flat_torus(1.0, 1.0, kt);
        PairProtocol p  = torus_protocol(a);
        out.push_back({"area-matched tori (1,1)/(0.9,1/0.9)", std::move(a), make_flat_torus(0.9, 1.0 / 0.9, kt), p,
                       false, false});
    }
    return out;
}

/// 10. distinguish verdicts and the moment test on the shipped pairs.
inline CriterionResult uniqueness(const AcceptanceSpec& s)
{
    CriterionResult r{10, "uniqueness contrapositive"};
    int wrong            = 0;
    double identical_max = 0.0;
    double detect_min    = std::numeric_limits<double>::infinity();
    std::string log;
    for (const auto& c : shipped_pairs())
    {
        PairProtocol p    = c.protocol;
        p.moment_factor   = s.moment_factor;
        const Verdict v   = distinguish(c.a, c.b, p);
        const bool ok     = v.same == c.isometric;
        wrong += ok ? 0 : 1;
        double best = 0.0;
        for (const auto& src : p.sources)
        {
            const auto ms = heat_difference_moments(c.a, src.realize(c.a), p.receivers, c.b, src.realize(c.b, p.to_b),
                                                    map_points(p.receivers, p.to_b), p.alpha, p.moments);
            for (const auto& m : ms)
            {
                const double ratio = m.error > 0.0 ? std::abs(m.value) / m.error : (m.value == 0.0 ? 0.0 : INFINITY);
                if (c.identical)
                {
                    identical_max = std::max(identical_max, ratio);
                }
                else if (m.order <= 4)
                {
                    best = std::max(best, ratio);
                }
            }
        }
        if (!c.isometric)
        {
            detect_min = std::min(detect_min, best);
        }
        log += fmt::format("{}{}: {}{}", log.empty() ? "" : " | ", c.name, v.summary(),
                           c.isometric ? "" : fmt::format(", best moment ratio {:.3g}", best));
    }
    r.passed    = wrong == 0 && identical_max <= 1.0 && detect_min > s.moment_factor;
    r.measured  = fmt::format("wrong verdicts {}, identical max |moment|/error {:.3g}, non-isometric min best ratio {:.3g}",
                              wrong, identical_max, detect_min);
    r.threshold = fmt::format("0, <= 1, > {:.3g}", s.moment_factor);
    r.detail    = log;
    return r;
}

} // namespace acceptance

///
/// Runs every criterion, writing one line per criterion to `os` as soon as
/// it finishes. A criterion that throws is reported as failed.
///
inline std::vector<CriterionResult> run_acceptance(const ExperimentConfig& c, std::ostream& os)
{
    const AcceptanceSpec& s = c.acceptance;
    const std::vector<std::pair<std::string, std::function<CriterionResult()>>> suite = {
        {"scalar Gamma identity", [&] { return acceptance::gamma_scalar_identity(s); }},
        {"operator Gamma representation", [&] { return acceptance::gamma_operator(s, c.seed); }},
        {"transmutation scalar", [&] { return acceptance::transmutation_scalar_check(s, c.oscillatory); }},
        {"transmutation operator", [&] { return acceptance::transmutation_operator_check(s, c.oscillatory); }},
        {"heat kernel vs image sum", [&] { return acceptance::heat_image_sum(s); }},
        {"Gaussian decay of the heat kernel", [&] { return acceptance::gaussian_decay(); }},
        {"Duhamel vs time stepper", [&] { return acceptance::duhamel_check(s); }},
        {"identification accuracy", [&] { return acceptance::identification_accuracy(s, c.identification); }},
        {"heat-to-wave reduction", [&] { return acceptance::wave_recovery(s, c.identification); }},
        {"uniqueness contrapositive", [&] { return acceptance::uniqueness(s); }},
    };
    std::vector<CriterionResult> out;
    for (std::size_t i = 0; i < suite.size(); ++i)
    {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try
        {
            r = suite[i].second();
        }
        catch (const std::exception& e)
        {
            r          = CriterionResult{static_cast<int>(i + 1), suite[i].first};
            r.passed   = false;
            r.measured = "error";
            r.threshold = "-";
            r.detail   = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        os << r.line() << std::endl;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace fraccal

#endif
