///
/// \file identification.hpp
///
/// Recovery of eigenvalues, multiplicities and projector-kernel restrictions
/// from heat-kernel samples, and parameter identification within the circle,
/// sphere and rectangular-torus families.
///
/// Eigenvalues come from a multi-channel matrix pencil: every (receiver,
/// source) pair is one channel, the Hankel matrices of all channels are
/// stacked side by side, and the exponents are the generalized eigenvalues of
/// the shifted pair restricted to the dominant singular subspace. The pencil
/// estimate is then polished by variable-projection Gauss-Newton steps.
///
#ifndef FRACCAL_IDENTIFICATION_HPP
#define FRACCAL_IDENTIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "kernel_samples.hpp"
#include "spectral_model.hpp"

namespace fraccal
{

/// Tuning of identify_spectrum.
struct IdentificationOptions
{
    /// Maximum number of exponential modes.
    int r_max = 12;
    /// Relative singular-value threshold for multiplicity (rank of A_k).
    double rank_tol = 1e-7;
    /// Relative singular-value floor of the stacked Hankel matrix.
    double pencil_floor = 1e-13;
    /// Adjacent singular values closer than this ratio at the cut are ambiguous.
    double gap_ratio = 1e-2;
    /// Modes whose earliest-time amplitude falls below this (relative) are dropped.
    double amplitude_floor = 1e-12;
    /// Variable-projection refinement steps (0 disables).
    int refine_steps = 30;
    /// Relative uniformity tolerance of the time grid.
    double grid_tolerance = 1e-9;
};

///
/// Eigenvalues mu_k (increasing), amplitude matrices A_k on receivers x
/// sources, estimated multiplicities and fit diagnostics.
///
struct IdentifiedSpectrum
{
    std::vector<double> eigenvalues;
    std::vector<Eigen::MatrixXd> amplitudes;
    std::vector<int> multiplicities;
    /// Max over channels of |fit - data| at each time sample.
    std::vector<double> residuals;
    /// max(residuals).
    double residual = 0.0;
    /// Normalized singular values of the stacked Hankel matrix.
    std::vector<double> singular_values;
    /// Pencil rank used.
    int rank = 0;
    /// Set when no clear singular-value gap separates signal from noise.
    bool unstable = false;
    /// Both candidate ranks when unstable.
    std::vector<int> candidate_ranks;
    /// Condition number of the exponential (Vandermonde) design matrix.
    double condition = 0.0;
    GridRef sources;
    GridRef receivers;

    std::size_t size() const
    {
        return eigenvalues.size();
    }

    /// Spectrum known exactly (no amplitudes), as used by family fits.
    static IdentifiedSpectrum from_eigenvalues(std::vector<double> values, std::vector<int> mult = {})
    {
        IdentifiedSpectrum s;
        s.eigenvalues = std::move(values);
        if (mult.empty())
        {
            mult.assign(s.eigenvalues.size(), 0);
        }
        if (mult.size() != s.eigenvalues.size())
        {
            throw InvalidArgument("identified spectrum: multiplicity count mismatch");
        }
        s.multiplicities = std::move(mult);
        s.rank           = static_cast<int>(s.eigenvalues.size());
        return s;
    }

    /// Eigenvalues strictly above `floor` (the nonzero part of the spectrum).
    std::vector<double> positive_eigenvalues(double floor = 1e-8) const
    {
        std::vector<double> out;
        for (double mu : eigenvalues)
        {
            if (mu > floor)
            {
                out.push_back(mu);
            }
        }
        return out;
    }
};

namespace detail
{

struct Channels
{
    /// times x channels
    Eigen::MatrixXd data;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> index;
};

inline Channels collect_channels(const KernelSamples& heat)
{
    const bool symmetric = heat.same_grids();
    Channels c;
    const Eigen::Index nr = heat.values.front().rows();
    const Eigen::Index ns = heat.values.front().cols();
    for (Eigen::Index s = 0; s < ns; ++s)
    {
        for (Eigen::Index r = symmetric ? s : 0; r < nr; ++r)
        {
            c.index.emplace_back(r, s);
        }
    }
    c.data.resize(static_cast<Eigen::Index>(heat.times.size()), static_cast<Eigen::Index>(c.index.size()));
    for (std::size_t ti = 0; ti < heat.times.size(); ++ti)
    {
        for (std::size_t ch = 0; ch < c.index.size(); ++ch)
        {
            const double v = heat.values[ti](c.index[ch].first, c.index[ch].second);
            if (symmetric && c.index[ch].first != c.index[ch].second)
            {
                c.data(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(ch)) =
                    0.5 * (v + heat.values[ti](c.index[ch].second, c.index[ch].first));
            }
            else
            {
                c.data(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(ch)) = v;
            }
        }
    }
    return c;
}

inline Eigen::MatrixXd exp_design(const std::vector<double>& mu, const Eigen::VectorXd& t)
{
    Eigen::MatrixXd phi(t.size(), static_cast<Eigen::Index>(mu.size()));
    for (std::size_t k = 0; k < mu.size(); ++k)
    {
        phi.col(static_cast<Eigen::Index>(k)) = (-mu[k] * t.array()).exp().matrix();
    }
    return phi;
}

/// Linear amplitudes and residual norm for fixed exponents.
inline double project_out(const std::vector<double>& mu, const Eigen::VectorXd& t, const Eigen::MatrixXd& y,
                          Eigen::MatrixXd& amp)
{
    const Eigen::MatrixXd phi = exp_design(mu, t);
    amp                       = phi.colPivHouseholderQr().solve(y);
    return (y - phi * amp).norm();
}

/// Variable-projection Gauss-Newton (Kaufman Jacobian) with Levenberg damping.
inline void varpro_refine(std::vector<double>& mu, const Eigen::VectorXd& t, const Eigen::MatrixXd& y, int steps)
{
    Eigen::MatrixXd amp;
    double rn     = project_out(mu, t, y, amp);
    double lambda = 1e-6;
    const auto r  = static_cast<Eigen::Index>(mu.size());
    for (int it = 0; it < steps && rn > 0.0; ++it)
    {
        const Eigen::MatrixXd phi = exp_design(mu, t);
        const Eigen::MatrixXd res = y - phi * amp;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(phi);
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(phi.rows(), r);
        // d_k = d phi_k / d mu_k = -t * phi_k, projected off range(phi).
        Eigen::MatrixXd d(phi.rows(), r);
        for (Eigen::Index k = 0; k < r; ++k)
        {
            d.col(k) = -(t.array() * phi.col(k).array()).matrix();
        }
        const Eigen::MatrixXd pd = d - q * (q.transpose() * d);
        Eigen::MatrixXd g(r, r);
        Eigen::VectorXd grad(r);
        for (Eigen::Index k = 0; k < r; ++k)
        {
            for (Eigen::Index l = 0; l < r; ++l)
            {
                g(k, l) = pd.col(k).dot(pd.col(l)) * amp.row(k).dot(amp.row(l));
            }
            grad(k) = pd.col(k).transpose() * res * amp.row(k).transpose();
        }
        bool improved = false;
        for (int tries = 0; tries < 12; ++tries)
        {
            Eigen::MatrixXd damped = g;
            damped.diagonal() += lambda * g.diagonal().cwiseMax(1e-300);
            const Eigen::VectorXd delta = damped.ldlt().solve(grad);
            if (!delta.allFinite())
            {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial = mu;
            for (Eigen::Index k = 0; k < r; ++k)
            {
                trial[k] += delta(k);
            }
            Eigen::MatrixXd trial_amp;
            const double trn = project_out(trial, t, y, trial_amp);
            if (trn < rn)
            {
                const double gain = (rn - trn) / rn;
                mu                = std::move(trial);
                amp               = std::move(trial_amp);
                rn                = trn;
                lambda            = std::max(lambda / 10.0, 1e-12);
                improved          = gain > 1e-14;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved)
        {
            break;
        }
    }
}

inline int numerical_rank(const Eigen::MatrixXd& a, double tol)
{
    if (a.size() == 0)
    {
        return 0;
    }
    const Eigen::VectorXd sv = a.jacobiSvd().singularValues();
    if (sv(0) == 0.0)
    {
        return 0;
    }
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
    {
        r += sv(i) > tol * sv(0) ? 1 : 0;
    }
    return r;
}

} // namespace detail

///
/// Fit \f$ K_t \approx \sum_k A_k e^{-\mu_k t} \f$ to heat-kernel samples on a
/// uniform time grid.
///
/// Throws IdentificationError when the grid is not uniform, too short for
/// r_max modes, or when no mode can be recovered.
///
inline IdentifiedSpectrum identify_spectrum(const KernelSamples& heat, const IdentificationOptions& opt = {})
{
    heat.validate();
    const std::size_t n = heat.times.size();
    if (opt.r_max < 1)
    {
        throw InvalidArgument("identify_spectrum: r_max must be positive");
    }
    if (n < 4 * static_cast<std::size_t>(opt.r_max))
    {
        throw IdentificationError("identify_spectrum: need at least 4 r_max = " +
                                  std::to_string(4 * opt.r_max) + " time samples, got " + std::to_string(n));
    }
    const double dt = heat.times[1] - heat.times[0];
    for (std::size_t i = 1; i < n; ++i)
    {
        const double step = heat.times[i] - heat.times[i - 1];
        if (std::abs(step - dt) > opt.grid_tolerance * std::max(dt, heat.times[i]))
        {
            throw IdentificationError("identify_spectrum: the matrix pencil needs a uniform time grid "
                                      "(step " + std::to_string(i) + " differs)");
        }
    }

    const detail::Channels ch = detail::collect_channels(heat);
    const Eigen::Index nc     = ch.data.cols();
    const double scale        = ch.data.cwiseAbs().maxCoeff();
    if (!(scale > 0.0))
    {
        throw IdentificationError("identify_spectrum: data are identically zero");
    }

    // Stacked Hankel pencil.
    const auto rows = static_cast<Eigen::Index>(n / 3);
    const auto cols = static_cast<Eigen::Index>(n) - rows;
    Eigen::MatrixXd h0(rows, nc * (cols - 1));
    Eigen::MatrixXd h1(rows, nc * (cols - 1));
    for (Eigen::Index c = 0; c < nc; ++c)
    {
        for (Eigen::Index j = 0; j < cols - 1; ++j)
        {
            h0.col(c * (cols - 1) + j) = ch.data.col(c).segment(j, rows);
            h1.col(c * (cols - 1) + j) = ch.data.col(c).segment(j + 1, rows);
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(h0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();

    IdentifiedSpectrum out;
    out.sources   = heat.sources;
    out.receivers = heat.receivers;
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(sv.size(), opt.r_max + 4); ++i)
    {
        out.singular_values.push_back(sv(i) / sv(0));
    }
    int rank = 0;
    while (rank < sv.size() && rank < opt.r_max && sv(rank) > opt.pencil_floor * sv(0))
    {
        ++rank;
    }
    if (rank == 0)
    {
        throw IdentificationError("identify_spectrum: no singular value above the floor");
    }
    // Ambiguity: the first discarded value is not clearly below the last kept one.
    if (rank < sv.size() && sv(rank) > opt.gap_ratio * sv(rank - 1))
    {
        out.unstable        = true;
        out.candidate_ranks = {rank, rank < opt.r_max ? rank + 1 : rank - 1};
    }
    out.rank = rank;

    const Eigen::MatrixXd u  = svd.matrixU().leftCols(rank);
    const Eigen::MatrixXd v  = svd.matrixV().leftCols(rank);
    const Eigen::VectorXd si = sv.head(rank).cwiseInverse();
    const Eigen::MatrixXd pencil = si.asDiagonal() * (u.transpose() * h1 * v);
    Eigen::EigenSolver<Eigen::MatrixXd> es(pencil, false);
    std::vector<double> mu;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    {
        const std::complex<double> z = es.eigenvalues()(i);
        if (z.real() <= 0.0 || std::abs(z.imag()) > 1e-6 * std::abs(z))
        {
            continue;
        }
        mu.push_back(-std::log(z.real()) / dt);
    }
    if (mu.empty())
    {
        throw IdentificationError("identify_spectrum: pencil produced no real positive roots");
    }
    std::sort(mu.begin(), mu.end());

    Eigen::VectorXd t(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
    {
        t(static_cast<Eigen::Index>(i)) = heat.times[i];
    }
    const Eigen::MatrixXd y = ch.data / scale;
    if (opt.refine_steps > 0)
    {
        detail::varpro_refine(mu, t, y, opt.refine_steps);
    }

    // Order, drop unrecoverable modes, and recompute amplitudes.
    std::sort(mu.begin(), mu.end());
    Eigen::MatrixXd amp;
    detail::project_out(mu, t, y, amp);
    std::vector<double> kept;
    for (std::size_t k = 0; k < mu.size(); ++k)
    {
        const double early = amp.row(static_cast<Eigen::Index>(k)).cwiseAbs().maxCoeff() * std::exp(-mu[k] * t(0));
        if (early >= opt.amplitude_floor && std::isfinite(mu[k]))
        {
            kept.push_back(mu[k]);
        }
    }
    if (kept.empty())
    {
        throw IdentificationError("identify_spectrum: every mode below the amplitude floor");
    }
    for (std::size_t k = 1; k < kept.size(); ++k)
    {
        if (!(kept[k] > kept[k - 1]))
        {
            throw IdentificationError("identify_spectrum: recovered eigenvalues coalesce near " +
                                      std::to_string(kept[k]));
        }
    }
    const Eigen::MatrixXd phi = detail::exp_design(kept, t);
    Eigen::JacobiSVD<Eigen::MatrixXd> dsvd(phi);
    out.condition = dsvd.singularValues()(0) / dsvd.singularValues().tail(1)(0);
    amp           = phi.colPivHouseholderQr().solve(y) * scale;
    const Eigen::MatrixXd fit = phi * amp;

    const Eigen::Index nr = heat.values.front().rows();
    const Eigen::Index ns = heat.values.front().cols();
    const bool symmetric  = heat.same_grids();
    for (std::size_t k = 0; k < kept.size(); ++k)
    {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nr, ns);
        for (std::size_t c = 0; c < ch.index.size(); ++c)
        {
            const auto [r, s] = ch.index[c];
            a(r, s)           = amp(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c));
            if (symmetric)
            {
                a(s, r) = a(r, s);
            }
        }
        out.eigenvalues.push_back(kept[k]);
        out.multiplicities.push_back(detail::numerical_rank(a, opt.rank_tol));
        out.amplitudes.push_back(std::move(a));
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        double worst = 0.0;
        for (std::size_t c = 0; c < ch.index.size(); ++c)
        {
            const auto [r, s] = ch.index[c];
            worst = std::max(worst, std::abs(fit(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) -
                                             heat.values[i](r, s)));
        }
        out.residuals.push_back(worst);
        out.residual = std::max(out.residual, worst);
    }
    return out;
}

///
/// Wave kernel \f$ \sum_k A_k \sin(t\sqrt{\mu_k})/\sqrt{\mu_k} \f$ from an
/// identified spectrum. The bound recorded per time is residual * max(t, 1)
/// scaled by the mode count.
///
inline WaveData wave_from_identified(const IdentifiedSpectrum& spec, const std::vector<double>& times)
{
    if (spec.amplitudes.size() != spec.eigenvalues.size() || spec.amplitudes.empty())
    {
        throw InvalidArgument("wave_from_identified: spectrum carries no amplitude matrices");
    }
    if (!spec.sources || !spec.receivers)
    {
        throw InvalidArgument("wave_from_identified: spectrum carries no grids");
    }
    WaveData w;
    w.provenance       = Provenance::recovered_from_heat;
    w.kernel.kind      = KernelKind::wave;
    w.kernel.sources   = spec.sources;
    w.kernel.receivers = spec.receivers;
    w.kernel.times     = times;
    for (double t : times)
    {
        if (!(t >= 0.0))
        {
            throw InvalidArgument("wave_from_identified: times must be non-negative");
        }
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(spec.amplitudes[0].rows(), spec.amplitudes[0].cols());
        for (std::size_t k = 0; k < spec.size(); ++k)
        {
            // Near-zero recovered exponents are the constant mode; clamp tiny
            // negative values produced by the fit onto the removable limit.
            const double mu = std::abs(spec.eigenvalues[k]) < 1e-10 ? 0.0 : spec.eigenvalues[k];
            v += spec.amplitudes[k] * sine_propagator(mu, t);
        }
        w.kernel.values.push_back(std::move(v));
        w.kernel.tail_bounds.push_back(spec.residual * static_cast<double>(spec.size()) * std::max(t, 1.0));
    }
    w.kernel.metadata["provenance"] = to_string(w.provenance);
    w.kernel.metadata["modes"]      = std::to_string(spec.size());
    w.kernel.metadata["residual"]   = format_real(spec.residual);
    return w;
}

//------------------------------------------------------------------------------
// Family fits
//------------------------------------------------------------------------------

struct FamilyEstimate
{
    std::string family;
    /// radius for circle and sphere; L1 <= L2 for the torus.
    std::vector<double> parameters;
    /// RMS relative eigenvalue misfit.
    double residual = 0.0;
    /// Two label assignments fit within tolerance with different parameters.
    bool ambiguous = false;
    /// The runner-up parameters when ambiguous.
    std::vector<double> alternative;
    /// Label (integer index) assigned to each fitted eigenvalue.
    std::vector<std::pair<int, int>> labels;
};

struct FamilyOptions
{
    /// Relative tolerance when matching a recovered eigenvalue to a label.
    double match_tolerance = 1e-4;
    /// Largest lattice index tried for the torus second-generator assignment.
    int max_label = 4;
    /// Number of lowest nonzero eigenvalues the torus search uses.
    int torus_levels = 8;
};

namespace detail
{

inline FamilyEstimate fit_one_parameter(const std::vector<double>& mu, const std::string& family,
                                        double (*label_value)(int), int (*invert)(double),
                                        double (*to_parameter)(double))
{
    if (mu.empty())
    {
        throw IdentificationError("identify_family: no nonzero eigenvalues");
    }
    // First guess from the lowest level, labels by rounding, then least squares.
    double x = mu[0] / label_value(1);
    FamilyEstimate e;
    e.family = family;
    for (int pass = 0; pass < 2; ++pass)
    {
        double num = 0.0;
        double den = 0.0;
        e.labels.clear();
        for (double m : mu)
        {
            const int k    = std::max(1, invert(m / x));
            const double v = label_value(k);
            num += m * v;
            den += v * v;
            e.labels.emplace_back(k, 0);
        }
        x = num / den;
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
    {
        const double pred = x * label_value(e.labels[i].first);
        ss += std::pow((mu[i] - pred) / mu[i], 2);
    }
    e.residual   = std::sqrt(ss / static_cast<double>(mu.size()));
    e.parameters = {to_parameter(x)};
    return e;
}

struct TorusCandidate
{
    double a;
    double b;
    double residual;
    std::vector<std::pair<int, int>> labels;
};

/// Distinct values 4 pi^2 (m^2 a + n^2 b) below `limit`, each with one (m, n).
inline std::vector<std::pair<double, std::pair<int, int>>> torus_spectrum(double a, double b, double limit)
{
    std::vector<std::pair<double, std::pair<int, int>>> all;
    const int mmax = static_cast<int>(std::sqrt(limit / (4.0 * pi * pi * a))) + 1;
    const int nmax = static_cast<int>(std::sqrt(limit / (4.0 * pi * pi * b))) + 1;
    for (int m = 0; m <= mmax; ++m)
    {
        for (int n = 0; n <= nmax; ++n)
        {
            const double v = 4.0 * pi * pi * (m * m * a + n * n * b);
            if ((m > 0 || n > 0) && v <= limit)
            {
                all.push_back({v, {m, n}});
            }
        }
    }
    std::sort(all.begin(), all.end());
    std::vector<std::pair<double, std::pair<int, int>>> distinct;
    for (const auto& p : all)
    {
        if (distinct.empty() || !same_level(distinct.back().first, p.first))
        {
            distinct.push_back(p);
        }
    }
    return distinct;
}

inline std::optional<TorusCandidate> score_torus(double a, double b, const std::vector<double>& mu, double tol)
{
    if (!(a > 0.0) || !(b > 0.0))
    {
        return std::nullopt;
    }
    const auto pred = torus_spectrum(a, b, mu.back() * (1.0 + 10.0 * tol));
    if (pred.size() != mu.size())
    {
        return std::nullopt;
    }
    TorusCandidate c{a, b, 0.0, {}};
    Eigen::MatrixXd design(static_cast<Eigen::Index>(mu.size()), 2);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(mu.size()));
    for (std::size_t i = 0; i < mu.size(); ++i)
    {
        if (std::abs(pred[i].first - mu[i]) > tol * mu[i])
        {
            return std::nullopt;
        }
        const auto [m, n] = pred[i].second;
        c.labels.emplace_back(m, n);
        design(static_cast<Eigen::Index>(i), 0) = 4.0 * pi * pi * m * m / mu[i];
        design(static_cast<Eigen::Index>(i), 1) = 4.0 * pi * pi * n * n / mu[i];
        rhs(static_cast<Eigen::Index>(i))       = 1.0;
    }
    const Eigen::Vector2d ab = design.colPivHouseholderQr().solve(rhs);
    c.a                      = ab(0);
    c.b                      = ab(1);
    c.residual               = (design * ab - rhs).norm() / std::sqrt(static_cast<double>(mu.size()));
    return c;
}

} // namespace detail

///
/// Fit family parameters to identified eigenvalues. `family` is one of
/// "circle", "sphere", "torus" (alias "rectangular-torus").
///
inline FamilyEstimate identify_family(const IdentifiedSpectrum& spec, const std::string& family,
                                      const FamilyOptions& opt = {})
{
    std::vector<double> mu = spec.positive_eigenvalues();
    std::sort(mu.begin(), mu.end());
    if (mu.size() < 2)
    {
        throw IdentificationError("identify_family: need at least two nonzero eigenvalues, got " +
                                  std::to_string(mu.size()));
    }
    if (family == "circle")
    {
        return detail::fit_one_parameter(
            mu, "circle", [](int k) { return static_cast<double>(k) * k; },
            [](double v) { return static_cast<int>(std::lround(std::sqrt(v))); },
            [](double x) { return 1.0 / std::sqrt(x); });
    }
    if (family == "sphere")
    {
        return detail::fit_one_parameter(
            mu, "sphere", [](int l) { return l * (l + 1.0); },
            [](double v) { return static_cast<int>(std::lround(0.5 * (std::sqrt(1.0 + 4.0 * v) - 1.0))); },
            [](double x) { return 1.0 / std::sqrt(x); });
    }
    if (family != "torus" && family != "rectangular-torus")
    {
        throw InvalidArgument("identify_family: unknown family '" + family + "'");
    }

    if (mu.size() > static_cast<std::size_t>(opt.torus_levels))
    {
        mu.resize(static_cast<std::size_t>(opt.torus_levels));
    }
    // Canonical order L1 <= L2 puts the lowest level at (m, n) = (0, 1): b = mu_1 / 4pi^2.
    const double b = mu[0] / (4.0 * pi * pi);
    std::vector<detail::TorusCandidate> found;
    for (std::size_t j = 0; j < mu.size(); ++j)
    {
        for (int m = 1; m <= opt.max_label; ++m)
        {
            for (int n = 0; n <= opt.max_label; ++n)
            {
                const double a = (mu[j] / (4.0 * pi * pi) - n * n * b) / (m * m);
                if (!(a >= b * (1.0 - opt.match_tolerance)))
                {
                    continue;
                }
                auto c = detail::score_torus(a, b, mu, opt.match_tolerance);
                if (!c)
                {
                    continue;
                }
                const bool duplicate = std::any_of(found.begin(), found.end(), [&](const auto& f) {
                    return std::abs(f.a - c->a) <= opt.match_tolerance * f.a &&
                           std::abs(f.b - c->b) <= opt.match_tolerance * f.b;
                });
                if (!duplicate)
                {
                    found.push_back(*c);
                }
            }
        }
    }
    if (found.empty())
    {
        throw IdentificationError("identify_family: no rectangular-torus assignment matches the spectrum");
    }
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.residual < y.residual; });
    FamilyEstimate e;
    e.family     = "torus";
    const auto& best = found.front();
    e.parameters = {1.0 / std::sqrt(best.a), 1.0 / std::sqrt(best.b)};
    std::sort(e.parameters.begin(), e.parameters.end());
    e.residual = best.residual;
    e.labels   = best.labels;
    if (found.size() > 1 && found[1].residual <= std::max(opt.match_tolerance, 10.0 * best.residual))
    {
        e.ambiguous   = true;
        e.alternative = {1.0 / std::sqrt(found[1].a), 1.0 / std::sqrt(found[1].b)};
        std::sort(e.alternative.begin(), e.alternative.end());
    }
    return e;
}

} // namespace fraccal

#endif
