///
/// \file config.hpp
///
/// Experiment configuration: an INI-style text with `[section]` headers and
/// `key = value` lines. `#` and `;` start comments. Every section and key is
/// known in advance; anything else is rejected with its dotted path.
///
/// emit() writes every real with 17 significant digits, so
/// parse(emit(c)) == c holds exactly.
///
#ifndef FRACCAL_CONFIG_HPP
#define FRACCAL_CONFIG_HPP

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <functional>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <fmt/format.h>

#include "core.hpp"
#include "identification.hpp"
#include "kernel_samples.hpp"
#include "quadrature.hpp"
#include "reduction.hpp"

namespace fraccal
{

struct ModelSpec
{
    /// circle, torus, sphere or matrix.
    std::string kind;
    double radius = 1.0;
    double L1     = 1.0;
    double L2     = 1.0;
    int K         = 12;
    /// Matrix models: dense matrix file, or a generated graph.
    std::string matrix;
    /// cycle or random (matrix models without a file).
    std::string graph = "cycle";
    int nodes         = 8;
    double density    = 0.4;
    /// identity, or swap (exchange the first two chart coordinates).
    std::string chart_map = "identity";

    bool operator==(const ModelSpec&) const = default;
};

struct ObservationSpec
{
    /// Explicit O points; when empty, O is a ball of the model-A grid.
    std::vector<Point> points;
    Point center{};
    double radius = 0.5;
    int count     = 6;
    /// Receivers in omega_2 for moment tests.
    std::vector<Point> receivers;

    bool operator==(const ObservationSpec&) const = default;
};

struct SourceConfig
{
    /// mode (one eigenfunction) or dipole.
    std::string kind = "dipole";
    int level        = 1;
    int branch       = 0;
    Point plus{};
    Point minus{};
    double radius = 0.1;

    bool operator==(const SourceConfig&) const = default;
};

struct TimeSpec
{
    std::vector<double> heat = {0.05, 0.1, 0.2, 0.5, 1.0};
    double wave_start        = 0.0;
    double wave_stop         = 5.0;
    int wave_count           = 101;
    double id_dt             = 0.005;
    int id_count             = 400;

    std::vector<double> wave_times() const
    {
        std::vector<double> t;
        for (int i = 0; i < wave_count; ++i)
        {
            t.push_back(wave_count == 1 ? wave_start
                                        : wave_start + (wave_stop - wave_start) * i / (wave_count - 1.0));
        }
        return t;
    }

    bool operator==(const TimeSpec&) const = default;
};

struct ToleranceSpec
{
    double eigen         = 1e-6;
    double data          = 1e-9;
    double solution      = 1e-9;
    double moment_factor = 10.0;
    int moment_order     = 4;
    double family_match  = 1e-4;

    bool operator==(const ToleranceSpec&) const = default;
};

/// Thresholds of the acceptance suite.
struct AcceptanceSpec
{
    double gamma_scalar      = 1e-10;
    double gamma_runtime     = 1.0;
    double gamma_operator    = 1e-8;
    double eigen_oracle      = 1e-10;
    double transmutation     = 1e-8;
    double transmutation_zero = 1e-12;
    double transmutation_op  = 1e-7;
    double image_sum         = 1e-8;
    double duhamel_stepper   = 1e-4;
    double duhamel_closed    = 1e-10;
    double eigen_relative    = 1e-6;
    double sphere_radius     = 1e-6;
    double torus_lengths     = 1e-4;
    double wave_recovery     = 1e-5;
    double moment_factor     = 10.0;

    bool operator==(const AcceptanceSpec&) const = default;
};

struct ExperimentConfig
{
    double alpha       = 0.5;
    std::uint64_t seed = 1;
    std::string output = "out";
    std::optional<ModelSpec> model_a;
    std::optional<ModelSpec> model_b;
    ObservationSpec observation;
    SourceConfig source;
    TimeSpec time;
    QuadratureScheme quadrature;
    OscillatoryScheme oscillatory;
    IdentificationOptions identification;
    MomentOptions moments;
    ToleranceSpec tolerances;
    AcceptanceSpec acceptance;
    /// identify subcommand: kernel CSV to read and family to fit (optional).
    std::string identify_input;
    std::string identify_family;

    /// Rejects out-of-range values with the field path.
    void validate() const
    {
        if (!(alpha > 0.0 && alpha < 1.0))
        {
            throw ConfigError("experiment.alpha", "must lie in (0, 1)");
        }
        for (const auto* m : {&model_a, &model_b})
        {
            if (!m->has_value())
            {
                continue;
            }
            const std::string sec = m == &model_a ? "model_a" : "model_b";
            const ModelSpec& s    = **m;
            if (s.kind != "circle" && s.kind != "torus" && s.kind != "sphere" && s.kind != "matrix")
            {
                throw ConfigError(sec + ".kind", "must be circle, torus, sphere or matrix");
            }
            if (s.K < 2)
            {
                throw ConfigError(sec + ".K", "must be at least 2");
            }
            if (!(s.radius > 0.0))
            {
                throw ConfigError(sec + ".radius", "must be positive");
            }
            if (!(s.L1 > 0.0) || !(s.L2 > 0.0))
            {
                throw ConfigError(sec + (s.L1 > 0.0 ? ".L2" : ".L1"), "must be positive");
            }
            if (s.chart_map != "identity" && s.chart_map != "swap")
            {
                throw ConfigError(sec + ".chart_map", "must be identity or swap");
            }
            if (s.kind == "matrix" && s.matrix.empty() && s.graph != "cycle" && s.graph != "random")
            {
                throw ConfigError(sec + ".graph", "must be cycle or random");
            }
        }
        for (std::size_t i = 0; i < time.heat.size(); ++i)
        {
            if (!(time.heat[i] > 0.0) || (i > 0 && !(time.heat[i] > time.heat[i - 1])))
            {
                throw ConfigError("time.heat", "must be positive and strictly increasing");
            }
        }
        if (time.wave_count < 1 || (time.wave_count > 1 && !(time.wave_stop > time.wave_start)) ||
            !(time.wave_start >= 0.0))
        {
            throw ConfigError("time.wave_count", "wave grid must be non-negative and strictly increasing");
        }
        if (!(time.id_dt > 0.0) || time.id_count < 2)
        {
            throw ConfigError("time.id_dt", "identification grid must be positive with at least two samples");
        }
        if (source.kind != "mode" && source.kind != "dipole")
        {
            throw ConfigError("sources.kind", "must be mode or dipole");
        }
        if (source.kind == "mode" && source.level < 1)
        {
            throw ConfigError("sources.level", "mode sources need level >= 1 (mean-zero)");
        }
        if (observation.points.empty() && observation.count < 1)
        {
            throw ConfigError("observation.count", "must be positive");
        }
        try
        {
            quadrature.validate();
        }
        catch (const InvalidArgument& e)
        {
            throw ConfigError("quadrature", e.what());
        }
        try
        {
            oscillatory.validate();
        }
        catch (const InvalidArgument& e)
        {
            throw ConfigError("quadrature", e.what());
        }
    }

    bool operator==(const ExperimentConfig& o) const
    {
        auto quad = [](const QuadratureScheme& q) {
            return std::tie(q.name, q.split, q.jacobi_nodes, q.tail_panels, q.tail_order, q.tail_cutoff, q.tolerance);
        };
        auto osc = [](const OscillatoryScheme& q) {
            return std::tie(q.order, q.min_panels, q.panels_per_wave, q.gaussian_cutoff, q.tolerance);
        };
        auto ident = [](const IdentificationOptions& q) {
            return std::tie(q.r_max, q.rank_tol, q.pencil_floor, q.gap_ratio, q.amplitude_floor, q.refine_steps,
                            q.grid_tolerance);
        };
        auto mom = [](const MomentOptions& q) {
            return std::tie(q.m_max, q.s_min, q.s_cap, q.points_per_decade, q.noise_factor);
        };
        return alpha == o.alpha && seed == o.seed && output == o.output && model_a == o.model_a &&
               model_b == o.model_b && observation == o.observation && source == o.source && time == o.time &&
               quad(quadrature) == quad(o.quadrature) && osc(oscillatory) == osc(o.oscillatory) &&
               ident(identification) == ident(o.identification) && mom(moments) == mom(o.moments) &&
               tolerances == o.tolerances && acceptance == o.acceptance && identify_input == o.identify_input &&
               identify_family == o.identify_family;
    }
};

namespace detail
{

/// Binds config keys to fields for both parsing and emission.
class FieldTable
{
public:
    using Setter = std::function<void(const std::string&)>;
    using Getter = std::function<std::string()>;

    void add(const std::string& section, const std::string& key, Setter set, Getter get)
    {
        entries_[section].push_back({key, std::move(set), std::move(get)});
    }

    bool has_section(const std::string& s) const
    {
        return entries_.count(s) != 0;
    }

    const Setter* setter(const std::string& section, const std::string& key) const
    {
        auto it = entries_.find(section);
        if (it == entries_.end())
        {
            return nullptr;
        }
        for (const auto& e : it->second)
        {
            if (e.key == key)
            {
                return &e.set;
            }
        }
        return nullptr;
    }

    void emit(std::ostream& os, const std::vector<std::string>& order) const
    {
        bool first = true;
        for (const auto& section : order)
        {
            auto it = entries_.find(section);
            if (it == entries_.end())
            {
                continue;
            }
            os << (first ? "" : "\n") << '[' << section << "]\n";
            first = false;
            for (const auto& e : it->second)
            {
                os << e.key << " = " << e.get() << '\n';
            }
        }
    }

private:
    struct Entry
    {
        std::string key;
        Setter set;
        Getter get;
    };
    std::map<std::string, std::vector<Entry>> entries_;
};

inline double to_real(const std::string& v, const std::string& field)
{
    double x          = 0.0;
    const char* first = v.data();
    const char* last  = v.data() + v.size();
    auto [ptr, ec]    = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last)
    {
        throw ConfigError(field, "expected a real number, got '" + v + "'");
    }
    return x;
}

template <typename Int>
Int to_integer(const std::string& v, const std::string& field)
{
    Int x          = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
    {
        throw ConfigError(field, "expected an integer, got '" + v + "'");
    }
    return x;
}

inline std::vector<double> to_reals(const std::string& v, const std::string& field)
{
    std::vector<double> out;
    std::istringstream is(v);
    std::string tok;
    while (is >> tok)
    {
        out.push_back(to_real(tok, field));
    }
    return out;
}

inline std::string from_reals(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        s += (i ? " " : "") + format_real(v[i]);
    }
    return s;
}

inline Point to_point(const std::string& v, const std::string& field)
{
    const std::vector<double> x = to_reals(v, field);
    if (x.empty() || x.size() > 3)
    {
        throw ConfigError(field, "expected 1 to 3 coordinates");
    }
    Point p{};
    std::copy(x.begin(), x.end(), p.begin());
    return p;
}

inline std::string from_point(const Point& p)
{
    return from_reals({p[0], p[1], p[2]});
}

/// Points separated by ';'.
inline std::vector<Point> to_points(const std::string& v, const std::string& field)
{
    std::vector<Point> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ';'))
    {
        if (item.find_first_not_of(" \t") != std::string::npos)
        {
            out.push_back(to_point(item, field));
        }
    }
    return out;
}

inline std::string from_points(const std::vector<Point>& pts)
{
    std::string s;
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        s += (i ? "; " : "") + from_point(pts[i]);
    }
    return s;
}

inline void bind_model(FieldTable& t, const std::string& sec, std::optional<ModelSpec>& m)
{
    auto get = [&m]() -> ModelSpec& {
        if (!m)
        {
            m.emplace();
        }
        return *m;
    };
    t.add(sec, "kind", [get](const std::string& v) { get().kind = v; }, [&m] { return m->kind; });
    t.add(sec, "radius", [get, sec](const std::string& v) { get().radius = to_real(v, sec + ".radius"); },
          [&m] { return format_real(m->radius); });
    t.add(sec, "L1", [get, sec](const std::string& v) { get().L1 = to_real(v, sec + ".L1"); },
          [&m] { return format_real(m->L1); });
    t.add(sec, "L2", [get, sec](const std::string& v) { get().L2 = to_real(v, sec + ".L2"); },
          [&m] { return format_real(m->L2); });
    t.add(sec, "K", [get, sec](const std::string& v) { get().K = to_integer<int>(v, sec + ".K"); },
          [&m] { return std::to_string(m->K); });
    t.add(sec, "matrix", [get](const std::string& v) { get().matrix = v; }, [&m] { return m->matrix; });
    t.add(sec, "graph", [get](const std::string& v) { get().graph = v; }, [&m] { return m->graph; });
    t.add(sec, "nodes", [get, sec](const std::string& v) { get().nodes = to_integer<int>(v, sec + ".nodes"); },
          [&m] { return std::to_string(m->nodes); });
    t.add(sec, "density", [get, sec](const std::string& v) { get().density = to_real(v, sec + ".density"); },
          [&m] { return format_real(m->density); });
    t.add(sec, "chart_map", [get](const std::string& v) { get().chart_map = v; }, [&m] { return m->chart_map; });
}

#define FRACCAL_REAL(sec, key, ref)                                                                          \
    t.add(sec, key, [&c](const std::string& v) { ref = to_real(v, std::string(sec) + "." + key); },          \
          [&c] { return format_real(ref); })
#define FRACCAL_INT(sec, key, ref)                                                                           \
    t.add(sec, key,                                                                                          \
          [&c](const std::string& v) { ref = to_integer<std::decay_t<decltype(ref)>>(v, std::string(sec) + "." + key); }, \
          [&c] { return std::to_string(ref); })
#define FRACCAL_TEXT(sec, key, ref) t.add(sec, key, [&c](const std::string& v) { ref = v; }, [&c] { return ref; })

inline FieldTable bind(ExperimentConfig& c)
{
    FieldTable t;
    FRACCAL_REAL("experiment", "alpha", c.alpha);
    FRACCAL_INT("experiment", "seed", c.seed);
    FRACCAL_TEXT("experiment", "output", c.output);

    bind_model(t, "model_a", c.model_a);
    bind_model(t, "model_b", c.model_b);

    t.add("observation", "points", [&c](const std::string& v) { c.observation.points = to_points(v, "observation.points"); },
          [&c] { return from_points(c.observation.points); });
    t.add("observation", "center", [&c](const std::string& v) { c.observation.center = to_point(v, "observation.center"); },
          [&c] { return from_point(c.observation.center); });
    FRACCAL_REAL("observation", "radius", c.observation.radius);
    FRACCAL_INT("observation", "count", c.observation.count);
    t.add("observation", "receivers",
          [&c](const std::string& v) { c.observation.receivers = to_points(v, "observation.receivers"); },
          [&c] { return from_points(c.observation.receivers); });

    FRACCAL_TEXT("sources", "kind", c.source.kind);
    FRACCAL_INT("sources", "level", c.source.level);
    FRACCAL_INT("sources", "branch", c.source.branch);
    t.add("sources", "plus", [&c](const std::string& v) { c.source.plus = to_point(v, "sources.plus"); },
          [&c] { return from_point(c.source.plus); });
    t.add("sources", "minus", [&c](const std::string& v) { c.source.minus = to_point(v, "sources.minus"); },
          [&c] { return from_point(c.source.minus); });
    FRACCAL_REAL("sources", "radius", c.source.radius);

    t.add("time", "heat", [&c](const std::string& v) { c.time.heat = to_reals(v, "time.heat"); },
          [&c] { return from_reals(c.time.heat); });
    FRACCAL_REAL("time", "wave_start", c.time.wave_start);
    FRACCAL_REAL("time", "wave_stop", c.time.wave_stop);
    FRACCAL_INT("time", "wave_count", c.time.wave_count);
    FRACCAL_REAL("time", "id_dt", c.time.id_dt);
    FRACCAL_INT("time", "id_count", c.time.id_count);

    FRACCAL_REAL("quadrature", "split", c.quadrature.split);
    FRACCAL_INT("quadrature", "jacobi_nodes", c.quadrature.jacobi_nodes);
    FRACCAL_INT("quadrature", "tail_panels", c.quadrature.tail_panels);
    FRACCAL_INT("quadrature", "tail_order", c.quadrature.tail_order);
    FRACCAL_REAL("quadrature", "tail_cutoff", c.quadrature.tail_cutoff);
    FRACCAL_REAL("quadrature", "tolerance", c.quadrature.tolerance);
    FRACCAL_INT("quadrature", "wave_order", c.oscillatory.order);
    FRACCAL_INT("quadrature", "wave_min_panels", c.oscillatory.min_panels);
    FRACCAL_REAL("quadrature", "wave_panels_per_wave", c.oscillatory.panels_per_wave);
    FRACCAL_REAL("quadrature", "wave_gaussian_cutoff", c.oscillatory.gaussian_cutoff);
    FRACCAL_REAL("quadrature", "wave_tolerance", c.oscillatory.tolerance);
    FRACCAL_INT("quadrature", "moment_order_max", c.moments.m_max);
    FRACCAL_REAL("quadrature", "moment_s_min", c.moments.s_min);
    FRACCAL_REAL("quadrature", "moment_s_cap", c.moments.s_cap);
    FRACCAL_INT("quadrature", "moment_points_per_decade", c.moments.points_per_decade);
    FRACCAL_REAL("quadrature", "moment_noise_factor", c.moments.noise_factor);

    FRACCAL_INT("identification", "r_max", c.identification.r_max);
    FRACCAL_REAL("identification", "rank_tol", c.identification.rank_tol);
    FRACCAL_REAL("identification", "pencil_floor", c.identification.pencil_floor);
    FRACCAL_REAL("identification", "gap_ratio", c.identification.gap_ratio);
    FRACCAL_REAL("identification", "amplitude_floor", c.identification.amplitude_floor);
    FRACCAL_INT("identification", "refine_steps", c.identification.refine_steps);
    FRACCAL_REAL("identification", "grid_tolerance", c.identification.grid_tolerance);
    FRACCAL_TEXT("identification", "input", c.identify_input);
    FRACCAL_TEXT("identification", "family", c.identify_family);

    FRACCAL_REAL("tolerances", "eigen", c.tolerances.eigen);
    FRACCAL_REAL("tolerances", "data", c.tolerances.data);
    FRACCAL_REAL("tolerances", "solution", c.tolerances.solution);
    FRACCAL_REAL("tolerances", "moment_factor", c.tolerances.moment_factor);
    FRACCAL_INT("tolerances", "moment_order", c.tolerances.moment_order);
    FRACCAL_REAL("tolerances", "family_match", c.tolerances.family_match);

    FRACCAL_REAL("acceptance", "gamma_scalar", c.acceptance.gamma_scalar);
    FRACCAL_REAL("acceptance", "gamma_runtime", c.acceptance.gamma_runtime);
    FRACCAL_REAL("acceptance", "gamma_operator", c.acceptance.gamma_operator);
    FRACCAL_REAL("acceptance", "eigen_oracle", c.acceptance.eigen_oracle);
    FRACCAL_REAL("acceptance", "transmutation", c.acceptance.transmutation);
    FRACCAL_REAL("acceptance", "transmutation_zero", c.acceptance.transmutation_zero);
    FRACCAL_REAL("acceptance", "transmutation_operator", c.acceptance.transmutation_op);
    FRACCAL_REAL("acceptance", "image_sum", c.acceptance.image_sum);
    FRACCAL_REAL("acceptance", "duhamel_stepper", c.acceptance.duhamel_stepper);
    FRACCAL_REAL("acceptance", "duhamel_closed", c.acceptance.duhamel_closed);
    FRACCAL_REAL("acceptance", "eigen_relative", c.acceptance.eigen_relative);
    FRACCAL_REAL("acceptance", "sphere_radius", c.acceptance.sphere_radius);
    FRACCAL_REAL("acceptance", "torus_lengths", c.acceptance.torus_lengths);
    FRACCAL_REAL("acceptance", "wave_recovery", c.acceptance.wave_recovery);
    FRACCAL_REAL("acceptance", "moment_factor", c.acceptance.moment_factor);
    return t;
}

#undef FRACCAL_REAL
#undef FRACCAL_INT
#undef FRACCAL_TEXT

inline const std::vector<std::string>& section_order()
{
    static const std::vector<std::string> order = {"experiment", "model_a",    "model_b",        "observation",
                                                   "sources",    "time",       "quadrature",     "identification",
                                                   "tolerances", "acceptance"};
    return order;
}

} // namespace detail

/// Parse configuration text. Errors carry the dotted field path (or the line).
inline ExperimentConfig parse_config(std::istream& is)
{
    ExperimentConfig c;
    detail::FieldTable table = detail::bind(c);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(is, line))
    {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        // ';' separates points inside values, so only a leading ';' is a comment.
        std::string text = detail::trim(line.substr(0, line.find('#')));
        if (text.empty() || text[0] == ';')
        {
            continue;
        }
        (void)cut;
        if (text.front() == '[')
        {
            if (text.back() != ']')
            {
                throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
            }
            section = detail::trim(text.substr(1, text.size() - 2));
            if (!table.has_section(section))
            {
                throw ConfigError(section, "unknown section");
            }
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        }
        if (section.empty())
        {
            throw ConfigError("line " + std::to_string(lineno), "key outside of any section");
        }
        const std::string key   = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        const std::string path  = section + "." + key;
        const auto* set         = table.setter(section, key);
        if (!set)
        {
            throw ConfigError(path, "unknown key");
        }
        if (seen.count(path))
        {
            throw ConfigError(path, "duplicate key (first set on line " + std::to_string(seen[path]) + ")");
        }
        seen[path] = lineno;
        (*set)(value);
    }
    c.validate();
    return c;
}

inline ExperimentConfig parse_config(const std::string& text)
{
    std::istringstream is(text);
    return parse_config(is);
}

/// Reads a config file; relative file paths inside it resolve against its directory.
inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
    {
        throw ConfigError("config", "cannot open '" + path + "'");
    }
    ExperimentConfig c        = parse_config(is);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&base](std::string& file) {
        if (!file.empty() && std::filesystem::path(file).is_relative())
        {
            file = (base / file).lexically_normal().string();
        }
    };
    for (auto* m : {&c.model_a, &c.model_b})
    {
        if (*m)
        {
            resolve((*m)->matrix);
        }
    }
    resolve(c.identify_input);
    return c;
}

/// Canonical text of a configuration; every field is written.
inline std::string emit_config(const ExperimentConfig& config)
{
    ExperimentConfig c       = config;
    detail::FieldTable table = detail::bind(c);
    std::vector<std::string> order;
    for (const auto& s : detail::section_order())
    {
        if ((s == "model_a" && !c.model_a) || (s == "model_b" && !c.model_b))
        {
            continue;
        }
        order.push_back(s);
    }
    std::ostringstream os;
    table.emit(os, order);
    return os.str();
}

/// 64-bit FNV-1a of the canonical text.
inline std::string config_hash(const ExperimentConfig& c)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : emit_config(c))
    {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return fmt::format("{:016x}", h);
}

/// Dense matrix, one row per line, entries separated by blanks or commas.
inline Eigen::MatrixXd read_matrix(std::istream& is)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        std::string text = detail::trim(line.substr(0, line.find('#')));
        if (text.empty())
        {
            continue;
        }
        std::replace(text.begin(), text.end(), ',', ' ');
        std::istringstream ls(text);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok)
        {
            row.push_back(detail::parse_real(tok, lineno));
        }
        if (!rows.empty() && row.size() != rows.front().size())
        {
            throw ParseError(lineno, "row has " + std::to_string(row.size()) + " entries, expected " +
                                         std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty())
    {
        throw ParseError(lineno, "empty matrix");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        for (std::size_t j = 0; j < rows[i].size(); ++j)
        {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

inline Eigen::MatrixXd load_matrix(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
    {
        throw Error("cannot open matrix file '" + path + "'");
    }
    return read_matrix(is);
}

} // namespace fraccal

#endif
