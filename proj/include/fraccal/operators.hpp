///
/// \file operators.hpp
///
/// Operator-valued functions of the Laplacian on a SpectralModel: fractional
/// powers, the heat semigroup and its kernel, the sine propagator of the wave
/// equation, the Duhamel solution, and the heat-semigroup (Gamma-function)
/// representation of negative fractional powers.
///
/// Every operator here is a spectral multiplier: expand f in the truncated
/// eigenbasis with the grid quadrature, scale each eigenspace component by a
/// function of its eigenvalue, evaluate on the requested points.
///
#ifndef FRACCAL_OPERATORS_HPP
#define FRACCAL_OPERATORS_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "kernel_samples.hpp"
#include "quadrature.hpp"
#include "spectral_model.hpp"

namespace fraccal
{

///
/// Real samples of a function on an ObservationGrid. When `mean_zero` is set
/// the construction enforces \f$ |\sum_i w_i f_i| \le 10^{-12} \sum_i w_i |f_i| \f$.
///
class GridFunction
{
public:
    GridFunction(GridRef grid, Eigen::VectorXd values, bool mean_zero = false)
        : grid_(std::move(grid)), values_(std::move(values)), mean_zero_(mean_zero)
    {
        if (!grid_)
        {
            throw InvalidArgument("grid function: null grid");
        }
        if (values_.size() != static_cast<Eigen::Index>(grid_->size()))
        {
            throw InvalidArgument("grid function: value count does not match grid size");
        }
        if (!values_.allFinite())
        {
            throw InvalidArgument("grid function: non-finite value");
        }
        if (mean_zero_ && !satisfies_mean_zero())
        {
            throw InvalidArgument("grid function: flagged mean-zero but (f, 1) = " +
                                  std::to_string(integral()));
        }
    }

    const GridRef& grid() const
    {
        return grid_;
    }
    const Eigen::VectorXd& values() const
    {
        return values_;
    }
    double operator[](std::size_t i) const
    {
        return values_(static_cast<Eigen::Index>(i));
    }
    std::size_t size() const
    {
        return grid_->size();
    }
    bool mean_zero() const
    {
        return mean_zero_;
    }

    /// (f, 1) under the grid quadrature.
    double integral() const
    {
        return grid_->weight_vector().dot(values_);
    }

    double l2_norm() const
    {
        return std::sqrt(grid_->weight_vector().dot(values_.cwiseAbs2()));
    }

    bool satisfies_mean_zero() const
    {
        const double scale = grid_->weight_vector().dot(values_.cwiseAbs());
        return std::abs(integral()) <= 1e-12 * scale;
    }

    /// Same values, with the mean-zero flag set (validated).
    GridFunction as_mean_zero() const
    {
        return GridFunction(grid_, values_, true);
    }

private:
    GridRef grid_;
    Eigen::VectorXd values_;
    bool mean_zero_ = false;
};

/// Samples of a callable on a grid.
template <typename F>
GridFunction sample_function(GridRef grid, F&& f, bool mean_zero = false)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid->size()));
    for (std::size_t i = 0; i < grid->size(); ++i)
    {
        v(static_cast<Eigen::Index>(i)) = f(grid->point(i));
    }
    return GridFunction(std::move(grid), std::move(v), mean_zero);
}

/// Basis function (level k, branch j) of the model sampled on a grid.
inline GridFunction eigenfunction(const SpectralModel& model, GridRef grid, std::size_t k, int j)
{
    return sample_function(
        std::move(grid), [&](const Point& x) { return model.evaluate(k, j, x); }, k > 0);
}

///
/// Coefficients \f$ c_{k,j} = (f, \varphi_{k,j}) \f$ of the retained
/// expansion, laid out level by level.
///
struct SpectralCoefficients
{
    Eigen::VectorXd values;
    /// offsets[k] is the first entry of level k; offsets.back() == values.size().
    std::vector<int> offsets;
    /// \f$ \|f\|^2 - \sum c^2 \f$ under the grid quadrature.
    double parseval_defect = 0.0;

    int levels() const
    {
        return static_cast<int>(offsets.size()) - 1;
    }

    auto level(int k) const
    {
        return values.segment(offsets[k], offsets[k + 1] - offsets[k]);
    }

    /// \f$ \|\pi_k f\|^2 \f$ per level.
    Eigen::VectorXd level_energy() const
    {
        Eigen::VectorXd e(levels());
        for (int k = 0; k < levels(); ++k)
        {
            e(k) = level(k).squaredNorm();
        }
        return e;
    }
};

/// Projection onto every retained eigenspace.
inline SpectralCoefficients project(const SpectralModel& model, const GridFunction& f)
{
    const ObservationGrid& grid = *f.grid();
    if (static_cast<int>(grid.size()) < 1)
    {
        throw ModelError("project: empty grid");
    }
    const Eigen::MatrixXd phi = model.sample(grid);
    SpectralCoefficients c;
    c.values = phi.transpose() * (grid.weight_vector().cwiseProduct(f.values()));
    for (int k = 0; k <= model.truncation(); ++k)
    {
        c.offsets.push_back(k < model.truncation() ? model.level_offset(k) : model.basis_size());
    }
    c.parseval_defect = f.l2_norm() * f.l2_norm() - c.values.squaredNorm();
    return c;
}

///
/// Eigenspace components at points: entry (i, k) is \f$ (\pi_k f)(x_i) \f$.
/// Any spectral multiplier g evaluates as the row sums weighted by g(lambda_k).
///
inline Eigen::MatrixXd level_components(const SpectralModel& model, const SpectralCoefficients& c,
                                        const std::vector<Point>& points)
{
    const Eigen::MatrixXd phi = model.sample(points);
    Eigen::MatrixXd out(phi.rows(), c.levels());
    for (int k = 0; k < c.levels(); ++k)
    {
        const int off = c.offsets[k];
        const int len = c.offsets[k + 1] - off;
        out.col(k)    = phi.middleCols(off, len) * c.level(k);
    }
    return out;
}

/// Multiplier values g(lambda_k) for every retained level.
template <typename G>
Eigen::VectorXd multiplier(const SpectralModel& model, G&& g)
{
    Eigen::VectorXd m(model.truncation());
    for (int k = 0; k < model.truncation(); ++k)
    {
        m(k) = g(model.level(k).eigenvalue, k);
    }
    return m;
}

namespace detail
{

inline void require_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
    {
        throw InvalidArgument("alpha must lie in (0, 1)");
    }
}

inline void require_mean_zero(const GridFunction& f, const char* op)
{
    if (!f.mean_zero())
    {
        throw InvalidArgument(std::string(op) +
                              ": source must be mean-zero ((f, 1) = 0 is the solvability condition)");
    }
}

inline GridFunction make_output(GridRef grid, Eigen::VectorXd v)
{
    GridFunction out(std::move(grid), std::move(v));
    return out.satisfies_mean_zero() ? out.as_mean_zero() : out;
}

} // namespace detail

///
/// \f$ \sum_k g(\lambda_k) \pi_k f \f$ evaluated on `target` (the grid of f
/// when null). g receives (eigenvalue, level index).
///
template <typename G>
GridFunction apply_multiplier(const SpectralModel& model, const GridFunction& f, G&& g,
                              GridRef target = nullptr)
{
    if (!target)
    {
        target = f.grid();
    }
    const SpectralCoefficients c = project(model, f);
    const Eigen::MatrixXd comp   = level_components(model, c, target->points());
    return detail::make_output(target, comp * multiplier(model, g));
}

/// \f$ (-\Delta)^\alpha f = \sum_k \lambda_k^\alpha \pi_k f \f$.
inline GridFunction fractional_apply(const SpectralModel& model, const GridFunction& f, double alpha)
{
    detail::require_alpha(alpha);
    return apply_multiplier(model, f, [alpha](double lam, int k) {
        return k == 0 ? 0.0 : std::pow(lam, alpha);
    });
}

///
/// Mean-zero solution of \f$ (-\Delta)^\alpha u = f \f$:
/// \f$ u = \sum_{k \ge 1} \lambda_k^{-\alpha} \pi_k f \f$.
///
inline GridFunction fractional_solve(const SpectralModel& model, const GridFunction& f, double alpha,
                                     GridRef target = nullptr)
{
    detail::require_alpha(alpha);
    detail::require_mean_zero(f, "fractional_solve");
    return apply_multiplier(
        model, f, [alpha](double lam, int k) { return k == 0 ? 0.0 : std::pow(lam, -alpha); },
        std::move(target));
}

///
/// Local source-to-solution map: f lives on a grid containing O and must
/// vanish at every point not in O; the solution is returned on O.
///
inline GridFunction source_to_solution(const SpectralModel& model, GridRef observation,
                                       const GridFunction& f, double alpha)
{
    if (!observation)
    {
        throw InvalidArgument("source_to_solution: null observation grid");
    }
    const ObservationGrid& grid = *f.grid();
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (f[i] != 0.0 && !observation->find(grid.point(i)))
        {
            throw InvalidArgument("source_to_solution: source has nonzero sample at grid point " +
                                  std::to_string(i) + " outside the observation set");
        }
    }
    return fractional_solve(model, f, alpha, std::move(observation));
}

/// \f$ e^{-tP} f \f$.
inline GridFunction heat_apply(const SpectralModel& model, const GridFunction& f, double t,
                               GridRef target = nullptr)
{
    if (!(t > 0.0))
    {
        throw InvalidArgument("heat_apply: t must be positive");
    }
    return apply_multiplier(
        model, f, [t](double lam, int) { return std::exp(-lam * t); }, std::move(target));
}

/// \f$ \sin(t\sqrt{P})/\sqrt{P} f \f$ with the value t on the zero eigenspace.
inline GridFunction wave_sine_apply(const SpectralModel& model, const GridFunction& f, double t,
                                    GridRef target = nullptr)
{
    if (!(t >= 0.0))
    {
        throw InvalidArgument("wave_sine_apply: t must be non-negative");
    }
    return apply_multiplier(
        model, f, [t](double lam, int) { return sine_propagator(lam, t); }, std::move(target));
}

//------------------------------------------------------------------------------
// Kernels
//------------------------------------------------------------------------------

namespace detail
{

inline void require_time_grid(const std::vector<double>& times, bool allow_zero)
{
    if (times.empty())
    {
        throw InvalidArgument("time grid is empty");
    }
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        if (!(allow_zero ? times[i] >= 0.0 : times[i] > 0.0) || !std::isfinite(times[i]))
        {
            throw InvalidArgument(allow_zero ? "time grid must be non-negative" : "time grid must be positive");
        }
        if (i > 0 && !(times[i] > times[i - 1]))
        {
            throw InvalidArgument("time grid must be strictly increasing");
        }
    }
}

///
/// Kernel of a multiplier family on receivers x sources:
/// \f$ K(t, x, y) = \sum_k g(\lambda_k, t) \sum_j \varphi_{k,j}(x)\varphi_{k,j}(y) \f$.
///
template <typename G>
std::vector<Eigen::MatrixXd> tabulate_kernel(const SpectralModel& model, const ObservationGrid& sources,
                                             const ObservationGrid& receivers,
                                             const std::vector<double>& times, G&& g)
{
    const Eigen::MatrixXd ps = model.sample(sources);
    const Eigen::MatrixXd pr = model.sample(receivers);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(times.size());
    Eigen::VectorXd scale(model.basis_size());
    for (double t : times)
    {
        for (int k = 0; k < model.truncation(); ++k)
        {
            const double gk = g(model.level(k).eigenvalue, t);
            scale.segment(model.level_offset(k), model.level(k).multiplicity).setConstant(gk);
        }
        out.push_back(pr * scale.asDiagonal() * ps.transpose());
    }
    return out;
}

} // namespace detail

///
/// Heat kernel on receivers x sources over a time grid, with the truncation
/// tail bound recorded per time.
///
inline KernelSamples heat_kernel(const SpectralModel& model, GridRef sources, GridRef receivers,
                                 const std::vector<double>& times)
{
    detail::require_time_grid(times, false);
    KernelSamples k;
    k.kind      = KernelKind::heat;
    k.sources   = sources;
    k.receivers = receivers;
    k.times     = times;
    k.values    = detail::tabulate_kernel(model, *sources, *receivers, times,
                                          [](double lam, double t) { return std::exp(-lam * t); });
    for (double t : times)
    {
        k.tail_bounds.push_back(model.heat_tail_bound(t));
    }
    k.metadata["model"]      = model.kind();
    k.metadata["truncation"] = std::to_string(model.truncation());
    return k;
}

///
/// Kernel of \f$ \sin(t\sqrt{P})/\sqrt{P} \f$ on receivers x sources (direct
/// spectral evaluation). No tail bound exists for the undamped wave kernel;
/// the recorded bound is zero relative to the truncated model.
///
inline WaveData wave_kernel(const SpectralModel& model, GridRef sources, GridRef receivers,
                            const std::vector<double>& times)
{
    detail::require_time_grid(times, true);
    WaveData w;
    w.provenance       = Provenance::direct_spectral;
    w.kernel.kind      = KernelKind::wave;
    w.kernel.sources   = sources;
    w.kernel.receivers = receivers;
    w.kernel.times     = times;
    w.kernel.values    = detail::tabulate_kernel(model, *sources, *receivers, times,
                                                 [](double lam, double t) { return sine_propagator(lam, t); });
    w.kernel.tail_bounds.assign(times.size(), 0.0);
    w.kernel.metadata["provenance"] = to_string(w.provenance);
    w.kernel.metadata["model"]      = model.kind();
    return w;
}

//------------------------------------------------------------------------------
// Gamma-function representation of P^{-alpha}
//------------------------------------------------------------------------------

///
/// \f$ a^{-\alpha} \f$ computed as
/// \f$ \Gamma(\alpha)^{-1} \int_0^\infty e^{-at} t^{\alpha-1} dt \f$.
///
inline double gamma_scalar(double a, double alpha, const QuadratureScheme& scheme = {})
{
    detail::require_alpha(alpha);
    if (!(a > 0.0))
    {
        throw InvalidArgument("gamma_scalar: a must be positive");
    }
    const QuadratureRule rule = scheme.build(alpha, a);
    return rule.integrate([a](double t) { return std::exp(-a * t); }) / std::tgamma(alpha);
}

///
/// \f$ P^{-\alpha} f = \Gamma(\alpha)^{-1} \int_0^\infty e^{-tP} f\, t^{\alpha-1} dt \f$
/// for mean-zero f: the heat semigroup sampled at the scheme's nodes and
/// summed with its weights. The zero eigenspace (where the integral diverges)
/// carries no mass for mean-zero f and is skipped.
///
inline GridFunction gamma_fractional(const SpectralModel& model, const GridFunction& f, double alpha,
                                     const QuadratureScheme& scheme = {}, GridRef target = nullptr)
{
    detail::require_alpha(alpha);
    detail::require_mean_zero(f, "gamma_fractional");
    if (model.truncation() < 2)
    {
        return apply_multiplier(model, f, [](double, int) { return 0.0; }, std::move(target));
    }
    const QuadratureRule rule = scheme.build(alpha, model.spectral_gap());
    const double inv_gamma    = 1.0 / std::tgamma(alpha);
    return apply_multiplier(
        model, f,
        [&](double lam, int k) {
            if (k == 0)
            {
                return 0.0;
            }
            return inv_gamma * rule.integrate([lam](double t) { return std::exp(-lam * t); });
        },
        std::move(target));
}

//------------------------------------------------------------------------------
// Duhamel
//------------------------------------------------------------------------------

/// One separable term q(s) g(x) of a space-time source.
struct SpaceTimeTerm
{
    GridFunction space;
    std::function<double(double)> profile;
};

/// \f$ F(s, x) = \sum_r q_r(s) g_r(x) \f$.
struct SpaceTimeSource
{
    std::vector<SpaceTimeTerm> terms;
};

/// u^F (and its time derivative) on receiver points over a time grid.
struct WaveSolution
{
    GridRef receivers;
    std::vector<double> times;
    /// receivers x times
    Eigen::MatrixXd values;
    Eigen::MatrixXd velocities;
};

/// Controls the time quadrature of the Duhamel integral.
struct DuhamelScheme
{
    int order = 16;
    /// Panels per unit time per unit of angular frequency (plus one).
    double panels_per_unit = 1.5;
    int min_panels         = 4;
};

///
/// Solution of \f$ u_{tt} + P u = F,\ u(0) = u_t(0) = 0 \f$ by
/// \f$ u(t) = \int_0^t \sin((t-s)\sqrt{P})/\sqrt{P}\, F(s)\, ds \f$, evaluated
/// on `receivers` at every time in `times`.
///
inline WaveSolution wave_duhamel(const SpectralModel& model, const SpaceTimeSource& source,
                                 const std::vector<double>& times, GridRef receivers,
                                 const DuhamelScheme& scheme = {})
{
    detail::require_time_grid(times, true);
    if (!receivers)
    {
        throw InvalidArgument("wave_duhamel: null receiver grid");
    }
    const double omega_max = std::sqrt(std::max(0.0, model.levels().back().eigenvalue)) + 1.0;
    const QuadratureRule base = gauss_legendre(scheme.order);

    WaveSolution out;
    out.receivers  = receivers;
    out.times      = times;
    out.values     = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(receivers->size()),
                                           static_cast<Eigen::Index>(times.size()));
    out.velocities = out.values;

    for (const auto& term : source.terms)
    {
        const SpectralCoefficients c = project(model, term.space);
        const Eigen::MatrixXd comp   = level_components(model, c, receivers->points());
        for (std::size_t ti = 0; ti < times.size(); ++ti)
        {
            const double t = times[ti];
            if (t == 0.0)
            {
                continue;
            }
            const int panels = std::max(
                scheme.min_panels, static_cast<int>(std::ceil(scheme.panels_per_unit * t * omega_max)));
            const double h = t / panels;
            std::vector<double> nodes;
            std::vector<double> weights;
            std::vector<double> q;
            for (int p = 0; p < panels; ++p)
            {
                for (std::size_t i = 0; i < base.size(); ++i)
                {
                    const double s = p * h + 0.5 * h * (base.nodes[i] + 1.0);
                    nodes.push_back(s);
                    weights.push_back(0.5 * h * base.weights[i]);
                    q.push_back(term.profile(s));
                }
            }
            Eigen::VectorXd mu(model.truncation());
            Eigen::VectorXd mv(model.truncation());
            for (int k = 0; k < model.truncation(); ++k)
            {
                const double lam = model.level(k).eigenvalue;
                double su        = 0.0;
                double sv        = 0.0;
                for (std::size_t i = 0; i < nodes.size(); ++i)
                {
                    su += weights[i] * sine_propagator(lam, t - nodes[i]) * q[i];
                    sv += weights[i] * cosine_propagator(lam, t - nodes[i]) * q[i];
                }
                mu(k) = su;
                mv(k) = sv;
            }
            out.values.col(static_cast<Eigen::Index>(ti)) += comp * mu;
            out.velocities.col(static_cast<Eigen::Index>(ti)) += comp * mv;
        }
    }
    return out;
}

///
/// Wave energy \f$ \|u_t\|^2 + (Pu, u) \f$ of the Duhamel solution at each
/// time, evaluated from the spectral expansion of the receiver samples (the
/// receivers must form a quadrature grid for the model).
///
inline std::vector<double> wave_energy(const SpectralModel& model, const WaveSolution& u)
{
    std::vector<double> e;
    for (Eigen::Index ti = 0; ti < static_cast<Eigen::Index>(u.times.size()); ++ti)
    {
        const SpectralCoefficients cu = project(model, GridFunction(u.receivers, u.values.col(ti)));
        const SpectralCoefficients cv = project(model, GridFunction(u.receivers, u.velocities.col(ti)));
        double pu = 0.0;
        for (int k = 0; k < cu.levels(); ++k)
        {
            pu += model.level(k).eigenvalue * cu.level(k).squaredNorm();
        }
        e.push_back(cv.values.squaredNorm() + pu);
    }
    return e;
}

//------------------------------------------------------------------------------
// Gaussian decay of the heat kernel between separated sets
//------------------------------------------------------------------------------

/// Least-squares fit of \f$ \log \max |K_t| \f$ against 1/t.
struct GaussianDecayFit
{
    std::vector<double> times;
    std::vector<double> log_max;
    double slope     = 0.0;
    double intercept = 0.0;
    /// -slope; positive when the kernel decays like exp(-c/t).
    double c_fit = 0.0;
    /// Minimum distance between the two point sets.
    double separation = 0.0;
};

inline GaussianDecayFit fit_gaussian_decay(const SpectralModel& model, GridRef omega1, GridRef omega2,
                                           const std::vector<double>& times)
{
    detail::require_time_grid(times, false);
    if (times.size() < 2)
    {
        throw InvalidArgument("fit_gaussian_decay: need at least two times");
    }
    const KernelSamples k = heat_kernel(model, omega1, omega2, times);
    GaussianDecayFit fit;
    fit.times      = times;
    fit.separation = separation(model, omega1->points(), omega2->points());
    Eigen::MatrixXd design(static_cast<Eigen::Index>(times.size()), 2);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(times.size()));
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        const double m = k.values[i].cwiseAbs().maxCoeff();
        fit.log_max.push_back(std::log(m));
        design(static_cast<Eigen::Index>(i), 0) = 1.0 / times[i];
        design(static_cast<Eigen::Index>(i), 1) = 1.0;
        rhs(static_cast<Eigen::Index>(i))       = std::log(m);
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    fit.slope                  = coef(0);
    fit.intercept              = coef(1);
    fit.c_fit                  = -coef(0);
    return fit;
}

} // namespace fraccal

#endif
