///
/// \file experiment.hpp
///
/// Config-driven experiments. Each run writes CSV tables and a plain-text
/// report into an output directory; every file carries the config hash.
///
#ifndef FRACCAL_EXPERIMENT_HPP
#define FRACCAL_EXPERIMENT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "config.hpp"
#include "identification.hpp"
#include "kernel_samples.hpp"
#include "models.hpp"
#include "operators.hpp"
#include "pairs.hpp"
#include "reduction.hpp"
#include "sources.hpp"

namespace fraccal
{

/// Failure inside a named stage of a run.
class StageError : public Error
{
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage " + stage + ": " + what), stage_(std::move(stage))
    {
    }
    const std::string& stage() const noexcept
    {
        return stage_;
    }

private:
    std::string stage_;
};

template <typename F>
auto in_stage(const std::string& stage, F&& body) -> decltype(body())
{
    try
    {
        return body();
    }
    catch (const StageError&)
    {
        throw;
    }
    catch (const ConfigError&)
    {
        throw;
    }
    catch (const Error& e)
    {
        throw StageError(stage, e.what());
    }
}

//------------------------------------------------------------------------------
// Tables
//------------------------------------------------------------------------------

/// A named-column numeric table with `#` metadata lines.
struct Table
{
    std::map<std::string, std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    bool operator==(const Table&) const = default;
};

inline void write_table(std::ostream& os, const Table& t)
{
    for (const auto& [k, v] : t.metadata)
    {
        os << "# " << k << '=' << v << '\n';
    }
    for (std::size_t j = 0; j < t.columns.size(); ++j)
    {
        os << (j ? "," : "") << t.columns[j];
    }
    os << '\n';
    for (const auto& row : t.rows)
    {
        for (std::size_t j = 0; j < row.size(); ++j)
        {
            os << (j ? "," : "") << format_real(row[j]);
        }
        os << '\n';
    }
}

inline Table read_table(std::istream& is)
{
    Table t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        const std::string text = detail::trim(line);
        if (text.empty())
        {
            continue;
        }
        if (text[0] == '#')
        {
            const std::string body = detail::trim(text.substr(1));
            const auto eq          = body.find('=');
            if (eq != std::string::npos)
            {
                t.metadata[detail::trim(body.substr(0, eq))] = detail::trim(body.substr(eq + 1));
            }
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(text);
        std::string f;
        while (std::getline(ss, f, ','))
        {
            fields.push_back(detail::trim(f));
        }
        if (t.columns.empty())
        {
            t.columns = std::move(fields);
            continue;
        }
        if (fields.size() != t.columns.size())
        {
            throw ParseError(lineno, fmt::format("expected {} fields, found {}", t.columns.size(), fields.size()));
        }
        std::vector<double> row;
        for (const auto& x : fields)
        {
            row.push_back(detail::parse_real(x, lineno));
        }
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty())
    {
        throw ParseError(lineno, "missing header line");
    }
    return t;
}

namespace detail
{

template <typename Writer>
void write_atomic(const std::filesystem::path& path, Writer&& write)
{
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os)
        {
            throw Error("cannot open '" + tmp.string() + "' for writing");
        }
        write(os);
        if (!os)
        {
            throw Error("write to '" + tmp.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace detail

inline void save_table(const std::filesystem::path& path, const Table& t)
{
    detail::write_atomic(path, [&](std::ostream& os) { write_table(os, t); });
}

inline Table load_table(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
    {
        throw Error("cannot open '" + path.string() + "'");
    }
    return read_table(is);
}

//------------------------------------------------------------------------------
// Building blocks from config
//------------------------------------------------------------------------------

inline SpectralModel build_model(const ModelSpec& s, std::uint64_t seed)
{
    if (s.kind == "circle")
    {
        return make_circle(s.radius, s.K);
    }
    if (s.kind == "torus")
    {
        return make_flat_torus(s.L1, s.L2, s.K);
    }
    if (s.kind == "sphere")
    {
        return make_sphere(s.radius, s.K);
    }
    const Eigen::MatrixXd a = !s.matrix.empty()     ? load_matrix(s.matrix)
                              : s.graph == "cycle" ? cycle_laplacian(s.nodes)
                                                   : random_graph_laplacian(s.nodes, seed, s.density);
    return make_matrix_model(a, std::min<int>(s.K, static_cast<int>(a.rows())));
}

/// Chart map taking points written in the chart of model A to model `s`.
inline PointMap chart_map(const ModelSpec& s)
{
    if (s.chart_map == "swap")
    {
        return [](const Point& x) { return Point{x[1], x[0], x[2]}; };
    }
    return identity_map;
}

/// O: the explicit point list, or up to `count` points of the model grid in a ball.
inline std::vector<Point> observation_points(const ExperimentConfig& c, const SpectralModel& a)
{
    if (!c.observation.points.empty())
    {
        return c.observation.points;
    }
    const ObservationGrid ball = geodesic_ball(a, *a.quadrature_grid(), c.observation.center, c.observation.radius);
    if (ball.size() == 0)
    {
        throw ConfigError("observation.radius", "ball contains no grid point");
    }
    return thin(ball, static_cast<std::size_t>(c.observation.count)).points();
}

/// The configured source on `model`, with a pointwise evaluator for reporting.
struct RealizedSource
{
    GridFunction values;
    std::function<double(const Point&)> at;
};

inline RealizedSource realize_source(const ExperimentConfig& c, const SpectralModel& model,
                                     const PointMap& map = identity_map)
{
    const SourceConfig& s = c.source;
    if (s.kind == "mode")
    {
        if (static_cast<std::size_t>(s.level) >= model.levels().size())
        {
            throw ConfigError("sources.level", "exceeds the model truncation");
        }
        const auto k = static_cast<std::size_t>(s.level);
        if (s.branch < 0 || s.branch >= model.level(k).multiplicity)
        {
            throw ConfigError("sources.branch", "exceeds the level multiplicity");
        }
        return {eigenfunction(model, model.quadrature_grid(), k, s.branch),
                [&model, k, j = s.branch](const Point& x) { return model.evaluate(k, j, x); }};
    }
    const DipoleField d = dipole_field(model, model.quadrature_grid(), map(s.plus), map(s.minus), s.radius);
    return {dipole(model, model.quadrature_grid(), map(s.plus), map(s.minus), s.radius),
            [&model, d](const Point& x) { return d(model, x); }};
}

inline PairProtocol make_protocol(const ExperimentConfig& c, const SpectralModel& a)
{
    if (c.source.kind != "dipole")
    {
        throw ConfigError("sources.kind", "pair experiments need a dipole source");
    }
    PairProtocol p;
    if (c.model_b)
    {
        p.to_b = chart_map(*c.model_b);
    }
    p.observation     = observation_points(c, a);
    p.receivers       = c.observation.receivers;
    p.sources         = {SourceSpec{c.source.plus, c.source.minus, c.source.radius}};
    p.alpha           = c.alpha;
    p.heat_times      = c.time.heat;
    p.id_dt           = c.time.id_dt;
    p.id_count        = c.time.id_count;
    p.identification  = c.identification;
    p.moments         = c.moments;
    p.eigen_tolerance = c.tolerances.eigen;
    p.data_tolerance  = c.tolerances.data;
    p.moment_factor   = c.tolerances.moment_factor;
    p.detect_order    = c.tolerances.moment_order;
    return p;
}

namespace detail
{

inline std::map<std::string, std::string> base_metadata(const ExperimentConfig& c, const std::string& what)
{
    return {{"config_hash", config_hash(c)}, {"content", what}, {"alpha", format_real(c.alpha)},
            {"seed", std::to_string(c.seed)}};
}

inline std::string describe(const ModelSpec& s)
{
    if (s.kind == "circle" || s.kind == "sphere")
    {
        return fmt::format("{} radius={} K={}", s.kind, s.radius, s.K);
    }
    if (s.kind == "torus")
    {
        return fmt::format("torus L1={} L2={} K={}", s.L1, s.L2, s.K);
    }
    return s.matrix.empty() ? fmt::format("matrix graph={} nodes={} K={}", s.graph, s.nodes, s.K)
                            : fmt::format("matrix file={} K={}", s.matrix, s.K);
}

inline const ModelSpec& require_model(const std::optional<ModelSpec>& m, const std::string& section)
{
    if (!m)
    {
        throw ConfigError(section, "missing section: this run needs it");
    }
    return *m;
}

inline void save_kernel(const std::filesystem::path& path, KernelSamples k, const ExperimentConfig& c,
                        const std::string& what)
{
    for (auto& [key, value] : base_metadata(c, what))
    {
        k.metadata[key] = value;
    }
    save_csv(path.string(), k);
}

inline std::filesystem::path prepare(const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    return dir;
}

/// Writes `key = value` lines.
inline void save_report(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& kv)
{
    write_atomic(path, [&](std::ostream& os) {
        for (const auto& [k, v] : kv)
        {
            os << k << " = " << v << '\n';
        }
    });
}

} // namespace detail

//------------------------------------------------------------------------------
// Runs
//------------------------------------------------------------------------------

struct ForwardResult
{
    std::vector<std::filesystem::path> files;
    /// Solution on O, in observation order.
    Eigen::VectorXd solution;
    /// Source values at O.
    Eigen::VectorXd source;
};

///
/// Source-to-solution output on O, heat kernel and wave data on O x O for
/// model A.
///
inline ForwardResult run_forward(const ExperimentConfig& c, const std::filesystem::path& out)
{
    c.validate();
    const ModelSpec& spec = detail::require_model(c.model_a, "model_a");
    const SpectralModel a = in_stage("model", [&] { return build_model(spec, c.seed); });
    const std::vector<Point> pts = observation_points(c, a);
    const GridRef o              = share(ObservationGrid::unit_weights(pts, "O"));
    detail::prepare(out);
    ForwardResult r;

    in_stage("solution", [&] {
        const RealizedSource f = realize_source(c, a);
        const GridFunction u   = fractional_solve(a, f.values, c.alpha, o);
        r.solution             = u.values();
        r.source.resize(static_cast<Eigen::Index>(pts.size()));
        Table t;
        t.metadata          = detail::base_metadata(c, "source-to-solution on O");
        t.metadata["model"] = detail::describe(spec);
        t.columns           = {"x0", "x1", "x2", "source", "solution"};
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            const auto ii = static_cast<Eigen::Index>(i);
            r.source(ii)  = f.at(pts[i]);
            t.rows.push_back({pts[i][0], pts[i][1], pts[i][2], r.source(ii), r.solution(ii)});
        }
        r.files.push_back(out / "solution.csv");
        save_table(r.files.back(), t);
    });

    in_stage("heat", [&] {
        KernelSamples k = heat_kernel(a, o, o, c.time.heat);
        k.metadata["model"] = detail::describe(spec);
        r.files.push_back(out / "heat.csv");
        detail::save_kernel(r.files.back(), std::move(k), c, "heat kernel on O x O");
    });

    in_stage("wave", [&] {
        WaveData w = wave_kernel(a, o, o, c.time.wave_times());
        w.kernel.metadata["model"]      = detail::describe(spec);
        w.kernel.metadata["provenance"] = to_string(w.provenance);
        r.files.push_back(out / "wave.csv");
        detail::save_kernel(r.files.back(), std::move(w.kernel), c, "wave kernel on O x O");
    });
    return r;
}

/// Per-stage outcome of a reduction run.
struct StageVerdict
{
    std::string stage;
    bool same = true;
    double value = 0.0;
    double threshold = 0.0;
};

struct ReduceResult
{
    std::vector<StageVerdict> stages;
    Verdict verdict;
    /// Max error of wave data recovered from heat data, per model.
    double recovery_error_a = 0.0;
    double recovery_error_b = 0.0;
    std::vector<std::filesystem::path> files;

    bool all_same() const
    {
        return std::all_of(stages.begin(), stages.end(), [](const StageVerdict& s) { return s.same; }) &&
               verdict.same;
    }
};

///
/// Two-model reduction: source-to-solution and heat comparison, heat
/// difference moments, wave recovery from heat data, and the staged verdict.
///
inline ReduceResult run_reduce(const ExperimentConfig& c, const std::filesystem::path& out)
{
    c.validate();
    const ModelSpec& sa = detail::require_model(c.model_a, "model_a");
    const ModelSpec& sb = detail::require_model(c.model_b, "model_b");
    if (c.observation.receivers.empty())
    {
        throw ConfigError("observation.receivers", "reduce needs receivers for the moment stage");
    }
    const SpectralModel a = in_stage("model", [&] { return build_model(sa, c.seed); });
    const SpectralModel b = in_stage("model", [&] { return build_model(sb, c.seed); });
    const PairProtocol p  = make_protocol(c, a);
    detail::prepare(out);
    ReduceResult r;
    std::vector<std::pair<std::string, std::string>> report = {
        {"config_hash", config_hash(c)}, {"model_a", detail::describe(sa)}, {"model_b", detail::describe(sb)}};

    const FractionalHeatReport fh =
        in_stage("fractional", [&] { return verify_fractional_to_heat(a, b, p, c.tolerances.solution); });
    r.stages.push_back({"fractional", fh.solution_discrepancy <= c.tolerances.solution, fh.solution_discrepancy,
                        c.tolerances.solution});
    r.stages.push_back({"heat", fh.heat_discrepancy <= fh.derived_tolerance, fh.heat_discrepancy,
                        fh.derived_tolerance});
    report.push_back({"fractional.solution_discrepancy", format_real(fh.solution_discrepancy)});
    report.push_back({"heat.discrepancy", format_real(fh.heat_discrepancy)});
    report.push_back({"heat.derived_tolerance", format_real(fh.derived_tolerance)});
    report.push_back({"heat.implication_holds", fh.implication_holds ? "true" : "false"});

    in_stage("moment", [&] {
        Table t;
        t.metadata = detail::base_metadata(c, "heat-difference moments");
        t.columns  = {"order", "receiver", "value", "error", "ratio", "s_max"};
        double worst = 0.0;
        for (const auto& m : fh.moments)
        {
            const double ratio = std::abs(m.value) / m.error;
            if (m.order <= c.tolerances.moment_order)
            {
                worst = std::max(worst, ratio);
            }
            t.rows.push_back({static_cast<double>(m.order), static_cast<double>(m.receiver), m.value, m.error,
                              ratio, m.s_max});
        }
        const int first = fh.first_detecting_order;
        r.stages.push_back({"moment", first < 0 || first > c.tolerances.moment_order, worst,
                            c.tolerances.moment_factor});
        report.push_back({"moment.first_detecting_order", std::to_string(first)});
        report.push_back({"moment.max_ratio", format_real(worst)});
        r.files.push_back(out / "moments.csv");
        save_table(r.files.back(), t);
    });

    in_stage("wave", [&] {
        const GridRef oa                   = share(ObservationGrid::unit_weights(p.observation, "O"));
        const GridRef ob                   = share(ObservationGrid::unit_weights(map_points(p.observation, p.to_b), "O"));
        const std::vector<double> wt       = c.time.wave_times();
        const std::vector<double> id_times = p.identification_times();
        const WaveData da = wave_kernel(a, oa, oa, wt);
        const WaveData db = wave_kernel(b, ob, ob, wt);
        const WaveData ra = heat_to_wave(heat_kernel(a, oa, oa, id_times), wt, c.identification);
        const WaveData rb = heat_to_wave(heat_kernel(b, ob, ob, id_times), wt, c.identification);
        r.recovery_error_a = max_difference(ra, da);
        r.recovery_error_b = max_difference(rb, db);
        double scale       = 1.0;
        double tail        = 0.0;
        for (std::size_t i = 0; i < wt.size(); ++i)
        {
            scale = std::max({scale, da.kernel.values[i].cwiseAbs().maxCoeff(), db.kernel.values[i].cwiseAbs().maxCoeff()});
            tail  = std::max(tail, da.kernel.tail_bounds[i] + db.kernel.tail_bounds[i]);
        }
        const double diff = max_difference(da, db);
        const double thr  = c.tolerances.data * scale + tail;
        r.stages.push_back({"wave", diff <= thr, diff, thr});
        report.push_back({"wave.discrepancy", format_real(diff)});
        report.push_back({"wave.threshold", format_real(thr)});
        report.push_back({"wave.recovery_error_a", format_real(r.recovery_error_a)});
        report.push_back({"wave.recovery_error_b", format_real(r.recovery_error_b)});
        r.files.push_back(out / "wave_direct_a.csv");
        detail::save_kernel(r.files.back(), da.kernel, c, "direct wave kernel, model A");
        r.files.push_back(out / "wave_recovered_a.csv");
        detail::save_kernel(r.files.back(), ra.kernel, c, "wave kernel recovered from heat data, model A");
    });

    r.verdict = in_stage("distinguish", [&] { return distinguish(a, b, p); });
    for (const auto& s : r.stages)
    {
        report.push_back({"verdict." + s.stage, s.same ? "SAME" : "DIFFERENT"});
    }
    report.push_back({"verdict", r.verdict.summary()});
    for (std::size_t i = 0; i < r.verdict.log.size(); ++i)
    {
        report.push_back({"log." + std::to_string(i), r.verdict.log[i]});
    }
    r.files.push_back(out / "report.txt");
    detail::save_report(r.files.back(), report);
    return r;
}

struct IdentifyResult
{
    IdentifiedSpectrum spectrum;
    std::optional<FamilyEstimate> family;
    std::vector<std::filesystem::path> files;
};

///
/// Spectral identification from a heat-kernel CSV, or from model A heat data
/// on O over the identification grid when no input file is configured.
///
inline IdentifyResult run_identify(const ExperimentConfig& c, const std::filesystem::path& out)
{
    c.validate();
    const KernelSamples heat = in_stage("data", [&] {
        if (!c.identify_input.empty())
        {
            return load_csv(c.identify_input);
        }
        const SpectralModel a = build_model(detail::require_model(c.model_a, "model_a"), c.seed);
        const GridRef o       = share(ObservationGrid::unit_weights(observation_points(c, a), "O"));
        std::vector<double> times;
        for (int i = 1; i <= c.time.id_count; ++i)
        {
            times.push_back(c.time.id_dt * i);
        }
        return heat_kernel(a, o, o, times);
    });
    detail::prepare(out);
    IdentifyResult r;
    r.spectrum = in_stage("identification", [&] { return identify_spectrum(heat, c.identification); });
    if (!c.identify_family.empty())
    {
        FamilyOptions fo;
        fo.match_tolerance = c.tolerances.family_match;
        r.family           = in_stage("family", [&] { return identify_family(r.spectrum, c.identify_family, fo); });
    }

    Table t;
    t.metadata             = detail::base_metadata(c, "identified spectrum");
    t.metadata["rank"]     = std::to_string(r.spectrum.rank);
    t.metadata["unstable"] = r.spectrum.unstable ? "true" : "false";
    t.metadata["residual"] = format_real(r.spectrum.residual);
    if (r.family)
    {
        std::string params;
        for (double x : r.family->parameters)
        {
            params += (params.empty() ? "" : " ") + format_real(x);
        }
        t.metadata["family"]            = r.family->family;
        t.metadata["family_parameters"] = params;
        t.metadata["family_residual"]   = format_real(r.family->residual);
        t.metadata["family_ambiguous"]  = r.family->ambiguous ? "true" : "false";
    }
    t.columns = {"eigenvalue", "multiplicity", "residual"};
    for (std::size_t i = 0; i < r.spectrum.size(); ++i)
    {
        t.rows.push_back({r.spectrum.eigenvalues[i], static_cast<double>(r.spectrum.multiplicities[i]),
                          r.spectrum.residuals[i]});
    }
    r.files.push_back(out / "spectrum.csv");
    save_table(r.files.back(), t);
    return r;
}

struct DistinguishResult
{
    Verdict verdict;
    std::vector<std::filesystem::path> files;
};

inline DistinguishResult run_distinguish(const ExperimentConfig& c, const std::filesystem::path& out)
{
    c.validate();
    const SpectralModel a = in_stage("model", [&] { return build_model(detail::require_model(c.model_a, "model_a"), c.seed); });
    const SpectralModel b = in_stage("model", [&] { return build_model(detail::require_model(c.model_b, "model_b"), c.seed); });
    const PairProtocol p  = make_protocol(c, a);
    detail::prepare(out);
    DistinguishResult r;
    r.verdict = in_stage("distinguish", [&] { return distinguish(a, b, p); });
    std::vector<std::pair<std::string, std::string>> kv = {{"config_hash", config_hash(c)},
                                                           {"verdict", r.verdict.summary()}};
    for (std::size_t i = 0; i < r.verdict.log.size(); ++i)
    {
        kv.push_back({"log." + std::to_string(i), r.verdict.log[i]});
    }
    r.files.push_back(out / "verdict.txt");
    detail::save_report(r.files.back(), kv);
    return r;
}

} // namespace fraccal

#endif
