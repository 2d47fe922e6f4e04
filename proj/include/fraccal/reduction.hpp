///
/// \file reduction.hpp
///
/// Data transformations between the three kinds of observations on O:
/// fractional source-to-solution data, heat-kernel data and wave data.
///
///  - Moments of the heat difference \f$ D(t)(x) = ((e^{-tP_A} - e^{-tP_B}) f)(x) \f$
///    after the substitution s = 1/t.
///  - The Gaussian transmutation identity expressing \f$ e^{-tP} \f$ through
///    the sine propagator.
///  - Heat-to-wave recovery through spectral identification, with a
///    Gaver-Stehfest Laplace inverter kept as a low-accuracy cross-check.
///
#ifndef FRACCAL_REDUCTION_HPP
#define FRACCAL_REDUCTION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "identification.hpp"
#include "kernel_samples.hpp"
#include "operators.hpp"
#include "quadrature.hpp"
#include "sources.hpp"
#include "spectral_model.hpp"

namespace fraccal
{

//------------------------------------------------------------------------------
// Heat difference and its moments
//------------------------------------------------------------------------------

///
/// \f$ D(t)(x_i) = \sum_k e^{-\lambda^A_k t} (\pi^A_k f_A)(x_i)
///   - \sum_k e^{-\lambda^B_k t} (\pi^B_k f_B)(y_i) \f$
/// held as per-level components so every t costs one pass over the levels.
///
class HeatDifference
{
public:
    HeatDifference(const SpectralModel& a, const GridFunction& fa, const std::vector<Point>& xa,
                   const SpectralModel& b, const GridFunction& fb, const std::vector<Point>& xb)
    {
        if (xa.size() != xb.size())
        {
            throw InvalidArgument("heat difference: receiver lists differ in length");
        }
        lam_a_ = Eigen::Map<const Eigen::VectorXd>(a.eigenvalues().data(), a.truncation());
        lam_b_ = Eigen::Map<const Eigen::VectorXd>(b.eigenvalues().data(), b.truncation());
        ca_    = level_components(a, project(a, fa), xa);
        cb_    = level_components(b, project(b, fb), xb);
        gap_   = std::min(a.spectral_gap(), b.spectral_gap());
    }

    std::size_t receivers() const
    {
        return static_cast<std::size_t>(ca_.rows());
    }

    double spectral_gap() const
    {
        return gap_;
    }

    /// D(t) at receiver i.
    double value(std::size_t i, double t) const
    {
        const auto r = static_cast<Eigen::Index>(i);
        return ca_.row(r).dot((-lam_a_ * t).array().exp().matrix()) -
               cb_.row(r).dot((-lam_b_ * t).array().exp().matrix());
    }

    /// d/dt D(t) at receiver i.
    double derivative(std::size_t i, double t) const
    {
        const auto r = static_cast<Eigen::Index>(i);
        return -ca_.row(r).dot((lam_a_.array() * (-lam_a_ * t).array().exp()).matrix()) +
               cb_.row(r).dot((lam_b_.array() * (-lam_b_ * t).array().exp()).matrix());
    }

    /// Sum of the magnitudes of the terms of D(t): the scale of its rounding error.
    double magnitude(std::size_t i, double t) const
    {
        const auto r = static_cast<Eigen::Index>(i);
        return ca_.row(r).cwiseAbs().dot((-lam_a_ * t).array().exp().matrix()) +
               cb_.row(r).cwiseAbs().dot((-lam_b_ * t).array().exp().matrix());
    }

private:
    Eigen::VectorXd lam_a_;
    Eigen::VectorXd lam_b_;
    Eigen::MatrixXd ca_;
    Eigen::MatrixXd cb_;
    double gap_ = 0.0;
};

/// One moment \f$ \int_0^\infty \varphi(s) s^m ds \f$ at one receiver.
struct MomentRecord
{
    int order = 0;
    std::size_t receiver = 0;
    Point x{};
    double value = 0.0;
    /// Positive quadrature error estimate.
    double error = 0.0;
    /// Upper integration limit actually used.
    double s_max = 0.0;
    /// Decay rate c of |D| ~ exp(-c s) between its peak and the cut.
    double decay = 0.0;

    /// |value| exceeds `factor` times the error estimate.
    bool significant(double factor = 10.0) const
    {
        return std::abs(value) > factor * error;
    }
};

struct MomentOptions
{
    int m_max = 6;
    double s_min = 1e-4;
    double s_cap = 1e5;
    int points_per_decade = 400;
    /// |phi| within this factor of the rounding scale counts as noise.
    double noise_factor = 64.0;
};

namespace detail
{

inline double trapezoid(const std::vector<double>& y, double h, std::size_t n, std::size_t stride)
{
    double s = 0.5 * (y[0] + y[n - 1]);
    for (std::size_t i = stride; i + 1 < n; i += stride)
    {
        s += y[i];
    }
    return s * h * static_cast<double>(stride);
}

inline void check_disjoint(const SpectralModel& model, const GridFunction& f, const std::vector<Point>& receivers,
                           const char* which)
{
    const std::vector<Point> supp = support(f);
    if (supp.empty())
    {
        throw InvalidArgument(std::string("heat_difference_moments: source on model ") + which + " is zero");
    }
    const double d = separation(model, supp, receivers);
    // A receiver whose nearest grid point carries source mass lies inside the support.
    const ObservationGrid& grid = *f.grid();
    bool inside                 = !(d > 0.0);
    for (std::size_t r = 0; r < receivers.size() && !inside; ++r)
    {
        std::size_t nearest = 0;
        double best         = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            const double di = model.distance(grid.point(i), receivers[r]);
            if (di < best)
            {
                best    = di;
                nearest = i;
            }
        }
        inside = f[nearest] != 0.0;
    }
    if (inside)
    {
        throw InvalidArgument(std::string("heat_difference_moments: source support and receivers overlap on model ") +
                              which + " (omega_1 and omega_2 must be disjoint)");
    }
}

} // namespace detail

///
/// Moments \f$ \int_0^\infty \varphi(s) s^m ds \f$, m = 0..m_max, of
/// \f$ \varphi(s) = s^{-\alpha} D(1/s)(x) \f$ at every receiver.
///
/// The integral runs over a logarithmic grid in s from s_min up to the point
/// past the peak of |D| where its envelope is smallest: beyond it lies
/// rounding noise, or the plateau a truncated expansion leaves as t -> 0.
/// The error estimate adds the trapezoid step-halving difference, the
/// rounding scale of the summed terms, the envelope level at the cut
/// integrated over the range, and both end contributions.
///
inline std::vector<MomentRecord> heat_difference_moments(const SpectralModel& a, const GridFunction& fa,
                                                         const std::vector<Point>& xa, const SpectralModel& b,
                                                         const GridFunction& fb, const std::vector<Point>& xb,
                                                         double alpha, const MomentOptions& opt = {})
{
    detail::require_alpha(alpha);
    detail::require_mean_zero(fa, "heat_difference_moments");
    detail::require_mean_zero(fb, "heat_difference_moments");
    if (opt.m_max < 0 || !(opt.s_min > 0.0) || !(opt.s_cap > opt.s_min) || opt.points_per_decade < 4)
    {
        throw InvalidArgument("heat_difference_moments: invalid options");
    }
    detail::check_disjoint(a, fa, xa, "A");
    detail::check_disjoint(b, fb, xb, "B");
    const HeatDifference diff(a, fa, xa, b, fb, xb);

    const double u0   = std::log(opt.s_min);
    const double u1   = std::log(opt.s_cap);
    const double h    = std::log(10.0) / opt.points_per_decade;
    std::size_t count = static_cast<std::size_t>(std::ceil((u1 - u0) / h)) + 1;
    const double eps  = std::numeric_limits<double>::epsilon();

    std::vector<MomentRecord> out;
    std::vector<double> s(count);
    std::vector<double> d(count);
    std::vector<double> mag(count);
    for (std::size_t i = 0; i < diff.receivers(); ++i)
    {
        for (std::size_t j = 0; j < count; ++j)
        {
            s[j]   = std::exp(u0 + h * static_cast<double>(j));
            d[j]   = diff.value(i, 1.0 / s[j]);
            mag[j] = diff.magnitude(i, 1.0 / s[j]);
        }
        // Local envelope: max of |D| over an eighth of a decade on either
        // side, which bridges zero crossings of D.
        const auto window = static_cast<std::size_t>(std::max(1, opt.points_per_decade / 8));
        std::vector<double> env(count);
        for (std::size_t j = 0; j < count; ++j)
        {
            double e = 0.0;
            for (std::size_t k = j > window ? j - window : 0; k < std::min(count, j + window + 1); ++k)
            {
                e = std::max(e, std::abs(d[k]));
            }
            env[j] = std::max(e, opt.noise_factor * eps * mag[j]);
        }
        // |D| rises from zero, peaks, and decays until rounding or the
        // truncation plateau takes over. Cut at the deepest valley: the
        // smallest ratio of the envelope to the largest |D| seen so far.
        std::size_t cut  = 0;
        std::size_t peak = 0;
        double best      = std::numeric_limits<double>::infinity();
        double prefix    = 0.0;
        std::size_t arg  = 0;
        for (std::size_t j = 0; j < count; ++j)
        {
            if (std::abs(d[j]) > prefix)
            {
                prefix = std::abs(d[j]);
                arg    = j;
            }
            if (prefix > 0.0 && env[j] / prefix < best)
            {
                best = env[j] / prefix;
                cut  = j;
                peak = arg;
            }
        }
        const double level = env[cut];
        // Odd node count so the halved rule shares both endpoints.
        cut = std::max<std::size_t>(cut, 2);
        if (cut % 2 == 1)
        {
            cut = cut + 1 < count ? cut + 1 : cut - 1;
        }
        const std::size_t n = cut + 1;

        // Decay rate c of the envelope between the peak and the cut.
        double decay = 0.0;
        if (cut > peak + 1 && env[peak] > 0.0 && env[cut] > 0.0)
        {
            decay = std::log(env[peak] / env[cut]) / (s[cut] - s[peak]);
        }

        std::vector<double> y(n);
        std::vector<double> ya(n);
        std::vector<double> yl(n);
        for (int m = 0; m <= opt.m_max; ++m)
        {
            const double p = m - alpha;
            for (std::size_t j = 0; j < n; ++j)
            {
                // ds = s du
                const double w = std::pow(s[j], p + 1.0);
                y[j]           = d[j] * w;
                ya[j]          = mag[j] * w;
                yl[j]          = level * w;
            }
            MomentRecord r;
            r.order    = m;
            r.receiver = i;
            r.x        = xa[i];
            r.s_max    = s[n - 1];
            r.decay    = decay;
            r.value    = detail::trapezoid(y, h, n, 1);
            const double coarse = detail::trapezoid(y, h, n, 2);
            const double lower  = std::abs(d[0]) * std::pow(s[0], p + 1.0) / (p + 1.0);
            const double upper  = std::abs(y[n - 1]) * (decay > 0.0 ? 1.0 / (decay * s[n - 1]) : 1.0);
            r.error = std::abs(r.value - coarse) + opt.noise_factor * eps * detail::trapezoid(ya, h, n, 1) +
                      detail::trapezoid(yl, h, n, 1) + lower + upper;
            out.push_back(r);
        }
    }
    return out;
}

///
/// Integration-by-parts identity for the first moment:
/// \f$ \int_0^\infty D'(t) t^{\alpha-1} dt = (1-\alpha) \int_0^\infty D(t) t^{\alpha-2} dt \f$
/// at every receiver. Returns (differentiated form, integrated form) pairs.
///
inline std::vector<std::pair<double, double>> integration_by_parts_check(
    const SpectralModel& a, const GridFunction& fa, const std::vector<Point>& xa, const SpectralModel& b,
    const GridFunction& fb, const std::vector<Point>& xb, double alpha, const QuadratureScheme& scheme = {})
{
    detail::require_alpha(alpha);
    detail::check_disjoint(a, fa, xa, "A");
    detail::check_disjoint(b, fb, xb, "B");
    const HeatDifference diff(a, fa, xa, b, fb, xb);
    const QuadratureRule rule = scheme.build(alpha, diff.spectral_gap());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < diff.receivers(); ++i)
    {
        const double lhs = rule.integrate([&](double t) { return diff.derivative(i, t); });
        const double rhs = (1.0 - alpha) * rule.integrate([&](double t) { return diff.value(i, t) / t; });
        out.emplace_back(lhs, rhs);
    }
    return out;
}

//------------------------------------------------------------------------------
// Transmutation
//------------------------------------------------------------------------------

///
/// \f$ \frac{1}{4\sqrt{\pi} t^{3/2}} \int_0^\infty e^{-\tau/(4t)}
///     \frac{\sin(\sqrt{\tau}\lambda)}{\lambda} d\tau \f$, which equals
/// \f$ e^{-t\lambda^2} \f$. Computed with \f$ \tau = s^2 \f$ on the
/// scheme's composite Gauss-Legendre rule.
///
inline double transmutation_scalar(double lambda, double t, const OscillatoryScheme& scheme = {})
{
    if (!(t > 0.0))
    {
        throw InvalidArgument("transmutation_scalar: t must be positive");
    }
    if (!(lambda >= 0.0))
    {
        throw InvalidArgument("transmutation_scalar: lambda must be non-negative");
    }
    const QuadratureRule rule = scheme.build(t, lambda);
    const double c            = 1.0 / (4.0 * std::sqrt(pi) * std::pow(t, 1.5));
    return c * rule.integrate([&](double s) {
        return 2.0 * s * std::exp(-s * s / (4.0 * t)) * sine_propagator(lambda * lambda, s);
    });
}

enum class TransmutationMode
{
    /// Integrate the sine propagator numerically (refinement-checked).
    quadrature,
    /// Use the closed form of the integral per eigenvalue.
    analytic
};

///
/// \f$ \frac{1}{4\sqrt{\pi} t^{3/2}} \int_0^\infty e^{-\tau/(4t)}
///     \frac{\sin(\sqrt{\tau P})}{\sqrt{P}} f\, d\tau \f$, which equals
/// \f$ e^{-tP} f \f$.
///
/// In quadrature mode the node count scales with \f$ \sqrt{\lambda_K} t \f$
/// and the result is compared against a rule with twice the panels; a
/// difference above the scheme tolerance raises QuadratureError.
///
inline GridFunction transmutation_operator(const SpectralModel& model, const GridFunction& f, double t,
                                           const OscillatoryScheme& scheme = {},
                                           TransmutationMode mode = TransmutationMode::quadrature,
                                           GridRef target = nullptr)
{
    if (!(t > 0.0))
    {
        throw InvalidArgument("transmutation_operator: t must be positive");
    }
    if (!target)
    {
        target = f.grid();
    }
    const SpectralCoefficients c = project(model, f);
    const Eigen::MatrixXd comp   = level_components(model, c, target->points());
    Eigen::VectorXd mult(model.truncation());
    if (mode == TransmutationMode::analytic)
    {
        for (int k = 0; k < model.truncation(); ++k)
        {
            mult(k) = std::exp(-t * model.level(k).eigenvalue);
        }
    }
    else
    {
        const double freq = std::sqrt(std::max(0.0, model.levels().back().eigenvalue));
        const double norm = 1.0 / (4.0 * std::sqrt(pi) * std::pow(t, 1.5));
        auto integrate    = [&](int refine) {
            const QuadratureRule rule = scheme.build(t, freq, refine);
            Eigen::VectorXd m         = Eigen::VectorXd::Zero(model.truncation());
            for (std::size_t i = 0; i < rule.size(); ++i)
            {
                const double s = rule.nodes[i];
                const double w = rule.weights[i] * 2.0 * s * std::exp(-s * s / (4.0 * t)) * norm;
                for (int k = 0; k < model.truncation(); ++k)
                {
                    m(k) += w * sine_propagator(model.level(k).eigenvalue, s);
                }
            }
            return m;
        };
        mult                      = integrate(1);
        const Eigen::VectorXd fine = integrate(2);
        const Eigen::VectorXd colmax = comp.cwiseAbs().colwise().maxCoeff().transpose();
        const double change          = ((mult - fine).cwiseAbs().cwiseProduct(colmax)).sum();
        if (change > scheme.tolerance)
        {
            throw QuadratureError("transmutation_operator: tau-integral changed by " + format_real(change) +
                                  " under refinement (tolerance " + format_real(scheme.tolerance) +
                                  "); increase panels_per_wave or order");
        }
        mult = fine;
    }
    return detail::make_output(target, comp * mult);
}

//------------------------------------------------------------------------------
// Heat to wave
//------------------------------------------------------------------------------

///
/// Wave data on the grids of `heat`: identify the exponential content of the
/// heat samples (or take `hint` when it already carries amplitude matrices)
/// and evaluate the sine propagator of each recovered mode.
///
inline WaveData heat_to_wave(const KernelSamples& heat, const std::vector<double>& wave_times,
                             const IdentificationOptions& opt = {},
                             const std::optional<IdentifiedSpectrum>& hint = std::nullopt)
{
    if (heat.kind != KernelKind::heat)
    {
        throw InvalidArgument("heat_to_wave: input is not heat-kernel data");
    }
    if (hint && !hint->amplitudes.empty())
    {
        return wave_from_identified(*hint, wave_times);
    }
    IdentifiedSpectrum spec = identify_spectrum(heat, opt);
    spec.sources            = heat.sources;
    spec.receivers          = heat.receivers;
    return wave_from_identified(spec, wave_times);
}

/// Stehfest weights V_k, k = 1..n (n even).
inline std::vector<double> stehfest_weights(int n)
{
    if (n < 2 || n % 2 != 0 || n > 20)
    {
        throw InvalidArgument("stehfest_weights: n must be even and in [2, 20]");
    }
    const int half = n / 2;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k)
    {
        double sum = 0.0;
        for (int j = (k + 1) / 2; j <= std::min(k, half); ++j)
        {
            sum += std::pow(j, half) * std::tgamma(2.0 * j + 1.0) /
                   (std::tgamma(half - j + 1.0) * std::tgamma(j + 1.0) * std::tgamma(j) *
                    std::tgamma(k - j + 1.0) * std::tgamma(2.0 * j - k + 1.0));
        }
        v[static_cast<std::size_t>(k - 1)] = ((k + half) % 2 == 0 ? 1.0 : -1.0) * sum;
    }
    return v;
}

/// Gaver-Stehfest approximation of the inverse Laplace transform of F at x.
template <typename F>
double gaver_stehfest(F&& laplace, double x, int n = 14)
{
    if (!(x > 0.0))
    {
        throw InvalidArgument("gaver_stehfest: x must be positive");
    }
    const std::vector<double> v = stehfest_weights(n);
    const double a              = std::log(2.0) / x;
    double sum                  = 0.0;
    for (int k = 1; k <= n; ++k)
    {
        sum += v[static_cast<std::size_t>(k - 1)] * laplace(k * a);
    }
    return a * sum;
}

///
/// Diagnostic inversion: with \f$ H(t) \f$ a heat value and
/// \f$ W(\tau) \f$ the wave value at time \f$ \sqrt{\tau} \f$,
/// \f$ \int_0^\infty e^{-p\tau} W(\tau) d\tau = \frac{\sqrt{\pi}}{2} p^{-3/2} H(1/(4p)) \f$.
/// Returns the Gaver-Stehfest estimate of the wave value at time `time`.
///
template <typename H>
double wave_from_heat_stehfest(H&& heat, double time, int n = 14)
{
    auto laplace = [&](double p) { return 0.5 * std::sqrt(pi) * std::pow(p, -1.5) * heat(1.0 / (4.0 * p)); };
    return gaver_stehfest(laplace, time * time, n);
}

} // namespace fraccal

#endif
