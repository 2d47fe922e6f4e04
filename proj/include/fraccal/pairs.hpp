///
/// \file pairs.hpp
///
/// Comparisons of two models observed on the same set O: source-to-solution
/// versus heat-kernel agreement, heat versus wave agreement, and the staged
/// SAME / DIFFERENT verdict.
///
/// Points and sources are written in the chart of model A; `to_b` carries
/// them to model B (identity unless the pair is related by a known isometry
/// of charts, such as swapping the two torus coordinates).
///
#ifndef FRACCAL_PAIRS_HPP
#define FRACCAL_PAIRS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "core.hpp"
#include "identification.hpp"
#include "operators.hpp"
#include "reduction.hpp"
#include "sources.hpp"
#include "spectral_model.hpp"

namespace fraccal
{

/// Everything fixed by an experiment comparing two models on O.
struct PairProtocol
{
    PointMap to_b = identity_map;
    /// Sample points of O (chart of A).
    std::vector<Point> observation;
    /// Receivers in omega_2, disjoint from every source support (chart of A).
    std::vector<Point> receivers;
    /// Mean-zero sources supported in omega_1.
    std::vector<SourceSpec> sources;
    double alpha = 0.5;
    /// Times at which heat kernels on O x O are compared.
    std::vector<double> heat_times = {0.05, 0.1, 0.2, 0.5, 1.0};
    /// Uniform grid for identification: t_i = id_dt * i, i = 1..id_count.
    double id_dt = 0.005;
    int id_count = 400;
    IdentificationOptions identification;
    MomentOptions moments;
    /// Relative tolerance on identified eigenvalues.
    double eigen_tolerance = 1e-6;
    /// Relative tolerance on kernel and solution discrepancies.
    double data_tolerance = 1e-9;
    /// A moment is detecting when |value| exceeds this multiple of its error.
    double moment_factor = 10.0;
    /// Highest moment order consulted by distinguish.
    int detect_order = 4;

    std::vector<double> identification_times() const
    {
        std::vector<double> t;
        for (int i = 1; i <= id_count; ++i)
        {
            t.push_back(id_dt * i);
        }
        return t;
    }
};

namespace detail
{

inline double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

/// Heat kernels of both models on O x O, judged time by time against
/// data_tolerance * scale(t) + tail(t). The reported time is the one with the
/// largest discrepancy/threshold ratio.
struct HeatComparison
{
    double discrepancy = 0.0;
    double threshold = std::numeric_limits<double>::infinity();
    double at_time = 0.0;
    bool exceeds() const { return discrepancy > threshold; }
};

inline HeatComparison compare_heat(const SpectralModel& a, const SpectralModel& b, const PairProtocol& p)
{
    const GridRef oa = share(ObservationGrid::unit_weights(p.observation, "O"));
    const GridRef ob = share(ObservationGrid::unit_weights(map_points(p.observation, p.to_b), "O"));
    const KernelSamples ka = heat_kernel(a, oa, oa, p.heat_times);
    const KernelSamples kb = heat_kernel(b, ob, ob, p.heat_times);
    HeatComparison c;
    double worst = -1.0;
    for (std::size_t i = 0; i < p.heat_times.size(); ++i)
    {
        const double d     = (ka.values[i] - kb.values[i]).cwiseAbs().maxCoeff();
        const double scale = std::max({1.0, ka.values[i].cwiseAbs().maxCoeff(), kb.values[i].cwiseAbs().maxCoeff()});
        const double thr   = p.data_tolerance * scale + ka.tail_bounds[i] + kb.tail_bounds[i];
        const double ratio = std::isfinite(thr) ? d / thr : 0.0;
        if (ratio > worst)
        {
            worst         = ratio;
            c.discrepancy = d;
            c.threshold   = thr;
            c.at_time     = p.heat_times[i];
        }
    }
    return c;
}

} // namespace detail

/// Outcome of verify_fractional_to_heat.
struct FractionalHeatReport
{
    /// Max over sources and receivers of |L_A f - L_B f| on O.
    double solution_discrepancy = 0.0;
    /// Max over O x O x heat times of |K^A_t - K^B_t|.
    double heat_discrepancy = 0.0;
    /// Bound the heat discrepancy must respect when the solutions agree.
    double derived_tolerance = 0.0;
    /// Solutions agree (to tol) implies kernels agree (to derived tolerance).
    bool implication_holds = true;
    /// Lowest detecting moment order, or -1.
    int first_detecting_order = -1;
    std::vector<MomentRecord> moments;
};

///
/// Compare source-to-solution data against heat-kernel data for one pair.
/// The solution discrepancy is evaluated on O for every protocol source;
/// moments are evaluated at the protocol receivers.
///
inline FractionalHeatReport verify_fractional_to_heat(const SpectralModel& a, const SpectralModel& b,
                                                      const PairProtocol& p, double tol)
{
    if (p.sources.empty())
    {
        throw InvalidArgument("verify_fractional_to_heat: empty source set");
    }
    FractionalHeatReport r;
    const GridRef oa = share(ObservationGrid::unit_weights(p.observation, "O"));
    const GridRef ob = share(ObservationGrid::unit_weights(map_points(p.observation, p.to_b), "O"));
    const std::vector<Point> rb = map_points(p.receivers, p.to_b);
    for (const auto& src : p.sources)
    {
        const GridFunction fa = src.realize(a);
        const GridFunction fb = src.realize(b, p.to_b);
        const GridFunction ua = fractional_solve(a, fa, p.alpha, oa);
        const GridFunction ub = fractional_solve(b, fb, p.alpha, ob);
        r.solution_discrepancy = std::max(r.solution_discrepancy, detail::max_abs_diff(ua.values(), ub.values()));
        if (!p.receivers.empty())
        {
            auto m = heat_difference_moments(a, fa, p.receivers, b, fb, rb, p.alpha, p.moments);
            r.moments.insert(r.moments.end(), m.begin(), m.end());
        }
    }
    const detail::HeatComparison h = detail::compare_heat(a, b, p);
    r.heat_discrepancy             = h.discrepancy;
    r.derived_tolerance            = h.threshold;
    r.implication_holds            = !(r.solution_discrepancy <= tol) || r.heat_discrepancy <= r.derived_tolerance;
    for (const auto& m : r.moments)
    {
        if (m.significant(p.moment_factor) && (r.first_detecting_order < 0 || m.order < r.first_detecting_order))
        {
            r.first_detecting_order = m.order;
        }
    }
    return r;
}

/// One time-dependent source: a dipole in space times a profile in time.
struct WaveSourceSpec
{
    SourceSpec space;
    std::function<double(double)> profile;
};

struct HeatWaveReport
{
    double heat_discrepancy = 0.0;
    double derived_tolerance = 0.0;
    /// Max over sources, receivers and times of |u^F_A - u^F_B| on O.
    double wave_discrepancy = 0.0;
    /// Where the wave discrepancy is attained.
    double at_time = 0.0;
    std::size_t at_receiver = 0;
    bool implication_holds = true;
};

///
/// Compare heat kernels on O with wave source-to-solution outputs u^F on O
/// for every source in `sources`, sampled at `times`.
///
inline HeatWaveReport verify_heat_to_wave_map(const SpectralModel& a, const SpectralModel& b, const PairProtocol& p,
                                              const std::vector<WaveSourceSpec>& sources,
                                              const std::vector<double>& times, double tol)
{
    HeatWaveReport r;
    const detail::HeatComparison h = detail::compare_heat(a, b, p);
    r.heat_discrepancy             = h.discrepancy;
    r.derived_tolerance            = h.threshold;
    const GridRef oa = share(ObservationGrid::unit_weights(p.observation, "O"));
    const GridRef ob = share(ObservationGrid::unit_weights(map_points(p.observation, p.to_b), "O"));
    for (const auto& src : sources)
    {
        SpaceTimeSource fa;
        SpaceTimeSource fb;
        fa.terms.push_back({src.space.realize(a), src.profile});
        fb.terms.push_back({src.space.realize(b, p.to_b), src.profile});
        const WaveSolution ua = wave_duhamel(a, fa, times, oa);
        const WaveSolution ub = wave_duhamel(b, fb, times, ob);
        Eigen::Index row = 0;
        Eigen::Index col = 0;
        const double d   = (ua.values - ub.values).cwiseAbs().maxCoeff(&row, &col);
        if (d > r.wave_discrepancy)
        {
            r.wave_discrepancy = d;
            r.at_receiver      = static_cast<std::size_t>(row);
            r.at_time          = times[static_cast<std::size_t>(col)];
        }
    }
    r.implication_holds = !(r.heat_discrepancy <= tol) || r.wave_discrepancy <= r.derived_tolerance;
    return r;
}

//------------------------------------------------------------------------------
// Verdict
//------------------------------------------------------------------------------

struct Verdict
{
    bool same = true;
    /// "eigenvalue", "heat" or "moment" for DIFFERENT; empty for SAME.
    std::string stage;
    /// Eigenvalue index, or moment order, of the detecting statistic.
    int index = -1;
    /// Time of the detecting heat discrepancy.
    double time = 0.0;
    /// Value of the detecting statistic.
    double value = 0.0;
    /// Threshold it exceeded.
    double threshold = 0.0;
    /// One line per stage.
    std::vector<std::string> log;

    std::string summary() const
    {
        if (same)
        {
            return "SAME";
        }
        if (stage == "eigenvalue")
        {
            return fmt::format("DIFFERENT eigenvalue index={} discrepancy={:.6g} threshold={:.3g}", index, value,
                               threshold);
        }
        if (stage == "heat")
        {
            return fmt::format("DIFFERENT heat t={:.6g} discrepancy={:.6g} threshold={:.3g}", time, value, threshold);
        }
        return fmt::format("DIFFERENT moment order={} |moment|/error={:.6g} threshold={:.3g}", index, value,
                           threshold);
    }
};

///
/// Staged comparison of two models on O: identified eigenvalues, then heat
/// kernels on O x O, then heat-difference moments. The first stage that
/// separates the models decides. The eigenvalue stage is skipped when either
/// identification reports an unseparated rank.
///
inline Verdict distinguish(const SpectralModel& a, const SpectralModel& b, const PairProtocol& p)
{
    Verdict v;
    const GridRef oa = share(ObservationGrid::unit_weights(p.observation, "O"));
    const GridRef ob = share(ObservationGrid::unit_weights(map_points(p.observation, p.to_b), "O"));
    const std::vector<double> times = p.identification_times();

    // Stage 1: eigenvalues recovered from heat data on O.
    const IdentifiedSpectrum sa = identify_spectrum(heat_kernel(a, oa, oa, times), p.identification);
    const IdentifiedSpectrum sb = identify_spectrum(heat_kernel(b, ob, ob, times), p.identification);
    const std::size_t common    = std::min(sa.size(), sb.size());
    const bool resolved         = !sa.unstable && !sb.unstable;
    for (std::size_t k = 0; resolved && k < common; ++k)
    {
        const double x = sa.eigenvalues[k];
        const double y = sb.eigenvalues[k];
        const double d = std::abs(x - y);
        if (d > p.eigen_tolerance * std::max({1.0, std::abs(x), std::abs(y)}))
        {
            v.same      = false;
            v.stage     = "eigenvalue";
            v.index     = static_cast<int>(k);
            v.value     = d;
            v.threshold = p.eigen_tolerance * std::max({1.0, std::abs(x), std::abs(y)});
            break;
        }
    }
    if (v.same && resolved && sa.size() != sb.size())
    {
        v.same      = false;
        v.stage     = "eigenvalue";
        v.index     = static_cast<int>(common);
        v.value     = std::abs(static_cast<double>(sa.size()) - static_cast<double>(sb.size()));
        v.threshold = 0.0;
    }
    v.log.push_back(fmt::format("eigenvalue stage: {} vs {} levels recovered, {}", sa.size(), sb.size(),
                                !resolved ? "inconclusive (rank not separated)"
                                : v.same  ? "agree"
                                          : "differ at index " + std::to_string(v.index)));
    if (!v.same)
    {
        return v;
    }

    // Stage 2: heat kernels on O x O.
    const detail::HeatComparison h = detail::compare_heat(a, b, p);
    const double threshold         = h.threshold;
    v.log.push_back(fmt::format("heat stage: discrepancy {:.3g} at t={:.3g} (threshold {:.3g})", h.discrepancy,
                                h.at_time, threshold));
    if (h.exceeds())
    {
        v.same      = false;
        v.stage     = "heat";
        v.time      = h.at_time;
        v.value     = h.discrepancy;
        v.threshold = threshold;
        return v;
    }

    // Stage 3: moments of the heat difference.
    if (!p.receivers.empty())
    {
        const std::vector<Point> rb = map_points(p.receivers, p.to_b);
        MomentOptions mo            = p.moments;
        mo.m_max                    = std::min(mo.m_max, p.detect_order);
        double worst                = 0.0;
        int order                   = -1;
        for (const auto& src : p.sources)
        {
            const auto ms = heat_difference_moments(a, src.realize(a), p.receivers, b, src.realize(b, p.to_b), rb,
                                                    p.alpha, mo);
            for (const auto& m : ms)
            {
                const double ratio = std::abs(m.value) / m.error;
                if (m.significant(p.moment_factor) && (order < 0 || m.order < order))
                {
                    order = m.order;
                    worst = ratio;
                }
                else if (order < 0)
                {
                    worst = std::max(worst, ratio);
                }
            }
        }
        v.log.push_back(fmt::format("moment stage: max |moment|/error {:.3g} (threshold {:.3g})", worst,
                                    p.moment_factor));
        if (order >= 0)
        {
            v.same      = false;
            v.stage     = "moment";
            v.index     = order;
            v.value     = worst;
            v.threshold = p.moment_factor;
        }
    }
    return v;
}

} // namespace fraccal

#endif
