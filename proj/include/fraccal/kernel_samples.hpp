///
/// \file kernel_samples.hpp
///
/// Tabulated heat or wave kernels on (time, receiver, source) triples, the
/// wave-data record built on top of them, and their CSV representation.
///
/// CSV layout: `#`-prefixed `key=value` metadata lines, then the header row
/// `t,src_index,rcv_index,value,tail_bound` and one row per sample, reals
/// printed with 17 significant digits.
///
#ifndef FRACCAL_KERNEL_SAMPLES_HPP
#define FRACCAL_KERNEL_SAMPLES_HPP

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <fmt/format.h>

#include "core.hpp"
#include "spectral_model.hpp"

namespace fraccal
{

enum class KernelKind
{
    heat,
    wave
};

inline const char* to_string(KernelKind k)
{
    return k == KernelKind::heat ? "heat" : "wave";
}

///
/// Kernel values K(t, x_r, y_s) for receivers x_r and sources y_s, stored as
/// one receivers-by-sources matrix per time, with a truncation-tail bound per
/// time.
///
struct KernelSamples
{
    KernelKind kind = KernelKind::heat;
    GridRef sources;
    GridRef receivers;
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> values;
    std::vector<double> tail_bounds;
    /// Free-form provenance metadata written to the CSV header.
    std::map<std::string, std::string> metadata;

    std::size_t time_count() const
    {
        return times.size();
    }
    std::size_t source_count() const
    {
        return sources ? sources->size() : 0;
    }
    std::size_t receiver_count() const
    {
        return receivers ? receivers->size() : 0;
    }

    /// True when sources and receivers are the same point set.
    bool same_grids() const
    {
        return sources && receivers &&
               (sources == receivers || sources->points() == receivers->points());
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& v : values)
        {
            m = std::max(m, v.cwiseAbs().maxCoeff());
        }
        return m;
    }

    /// Structural checks: sizes agree, times strictly increase, values finite.
    void validate() const
    {
        if (!sources || !receivers)
        {
            throw InvalidArgument("kernel samples: missing grids");
        }
        if (times.empty())
        {
            throw InvalidArgument("kernel samples: empty time grid");
        }
        if (values.size() != times.size() || tail_bounds.size() != times.size())
        {
            throw InvalidArgument("kernel samples: per-time arrays disagree in length");
        }
        for (std::size_t i = 0; i < times.size(); ++i)
        {
            if (i > 0 && !(times[i] > times[i - 1]))
            {
                throw InvalidArgument("kernel samples: times must strictly increase");
            }
            if (values[i].rows() != static_cast<Eigen::Index>(receivers->size()) ||
                values[i].cols() != static_cast<Eigen::Index>(sources->size()))
            {
                throw InvalidArgument("kernel samples: value matrix has wrong shape");
            }
            if (!values[i].allFinite())
            {
                throw InvalidArgument("kernel samples: non-finite value");
            }
        }
    }
};

/// Max |a - b| over all samples; the two tables must share shape and times.
inline double max_difference(const KernelSamples& a, const KernelSamples& b)
{
    if (a.times.size() != b.times.size())
    {
        throw InvalidArgument("kernel comparison: time grids differ");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.times.size(); ++i)
    {
        if (std::abs(a.times[i] - b.times[i]) > 1e-12 * std::max(1.0, std::abs(a.times[i])))
        {
            throw InvalidArgument("kernel comparison: time grids differ");
        }
        if (a.values[i].rows() != b.values[i].rows() || a.values[i].cols() != b.values[i].cols())
        {
            throw InvalidArgument("kernel comparison: shapes differ");
        }
        m = std::max(m, (a.values[i] - b.values[i]).cwiseAbs().maxCoeff());
    }
    return m;
}

enum class Provenance
{
    direct_spectral,
    recovered_from_heat
};

inline const char* to_string(Provenance p)
{
    return p == Provenance::direct_spectral ? "direct-spectral" : "recovered-from-heat";
}

///
/// Values of (sin(t sqrt(P))/sqrt(P) f)(x), tabulated as the kernel of that
/// operator on O x O, with an error bound per time for recovered data.
///
struct WaveData
{
    KernelSamples kernel;
    Provenance provenance = Provenance::direct_spectral;
};

inline double max_difference(const WaveData& a, const WaveData& b)
{
    return max_difference(a.kernel, b.kernel);
}

//------------------------------------------------------------------------------
// CSV
//------------------------------------------------------------------------------

inline std::string format_real(double v)
{
    return fmt::format("{:.17g}", v);
}

inline void write_csv(std::ostream& os, const KernelSamples& k)
{
    k.validate();
    os << "# kind=" << to_string(k.kind) << '\n';
    os << "# sources=" << k.sources->size() << '\n';
    os << "# receivers=" << k.receivers->size() << '\n';
    for (const auto& [key, value] : k.metadata)
    {
        os << "# " << key << '=' << value << '\n';
    }
    os << "t,src_index,rcv_index,value,tail_bound\n";
    for (std::size_t ti = 0; ti < k.times.size(); ++ti)
    {
        const std::string t    = format_real(k.times[ti]);
        const std::string tail = format_real(k.tail_bounds[ti]);
        for (Eigen::Index s = 0; s < k.values[ti].cols(); ++s)
        {
            for (Eigen::Index r = 0; r < k.values[ti].rows(); ++r)
            {
                os << t << ',' << s << ',' << r << ',' << format_real(k.values[ti](r, s)) << ','
                   << tail << '\n';
            }
        }
    }
}

namespace detail
{

inline double parse_real(const std::string& field, std::size_t line)
{
    double v            = 0.0;
    const char* first   = field.data();
    const char* last    = field.data() + field.size();
    // from_chars does not accept a leading '+'.
    if (first != last && *first == '+')
    {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
    {
        if (field == "inf" || field == "+inf")
        {
            return std::numeric_limits<double>::infinity();
        }
        throw ParseError(line, "not a number: '" + field + "'");
    }
    return v;
}

inline long parse_index(const std::string& field, std::size_t line)
{
    long v         = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || v < 0)
    {
        throw ParseError(line, "not a non-negative index: '" + field + "'");
    }
    return v;
}

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
    {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

///
/// Parse the CSV written by write_csv. Point coordinates are not stored, so
/// the grids of the result are index grids. Any malformed or missing entry is
/// reported with its line number.
///
inline KernelSamples read_csv(std::istream& is)
{
    KernelSamples out;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen   = false;
    struct Row
    {
        double t;
        long s;
        long r;
        double value;
        double tail;
        std::size_t line;
    };
    std::vector<Row> rows;
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
            if (eq == std::string::npos)
            {
                continue;
            }
            const std::string key   = detail::trim(body.substr(0, eq));
            const std::string value = detail::trim(body.substr(eq + 1));
            if (key == "kind")
            {
                if (value == "heat")
                {
                    out.kind = KernelKind::heat;
                }
                else if (value == "wave")
                {
                    out.kind = KernelKind::wave;
                }
                else
                {
                    throw ParseError(lineno, "unknown kernel kind '" + value + "'");
                }
            }
            else if (key != "sources" && key != "receivers")
            {
                out.metadata[key] = value;
            }
            continue;
        }
        if (!header_seen)
        {
            if (text != "t,src_index,rcv_index,value,tail_bound")
            {
                throw ParseError(lineno, "expected header 't,src_index,rcv_index,value,tail_bound'");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(text);
        std::string f;
        while (std::getline(ss, f, ','))
        {
            fields.push_back(detail::trim(f));
        }
        if (fields.size() != 5)
        {
            throw ParseError(lineno, "expected 5 fields, found " + std::to_string(fields.size()));
        }
        rows.push_back({detail::parse_real(fields[0], lineno), detail::parse_index(fields[1], lineno),
                        detail::parse_index(fields[2], lineno), detail::parse_real(fields[3], lineno),
                        detail::parse_real(fields[4], lineno), lineno});
    }
    if (!header_seen)
    {
        throw ParseError(lineno, "missing header row");
    }
    if (rows.empty())
    {
        throw ParseError(lineno, "no data rows");
    }

    long ns = 0;
    long nr = 0;
    for (const auto& r : rows)
    {
        ns = std::max(ns, r.s + 1);
        nr = std::max(nr, r.r + 1);
        if (!std::isfinite(r.t) || !std::isfinite(r.value))
        {
            throw ParseError(r.line, "non-finite time or value");
        }
        if (out.times.empty() || r.t != out.times.back())
        {
            if (!out.times.empty() && !(r.t > out.times.back()))
            {
                throw ParseError(r.line, "times must be non-decreasing by row");
            }
            out.times.push_back(r.t);
            out.tail_bounds.push_back(r.tail);
        }
    }
    out.values.assign(out.times.size(), Eigen::MatrixXd::Constant(nr, ns, std::nan("")));
    std::size_t ti = 0;
    for (const auto& r : rows)
    {
        while (out.times[ti] != r.t)
        {
            ++ti;
        }
        double& cell = out.values[ti](r.r, r.s);
        if (!std::isnan(cell))
        {
            throw ParseError(r.line, "duplicate entry");
        }
        cell = r.value;
    }
    for (std::size_t i = 0; i < out.times.size(); ++i)
    {
        if (out.values[i].hasNaN())
        {
            throw ParseError(lineno, "missing entries for t = " + format_real(out.times[i]));
        }
    }
    std::vector<Point> sp;
    for (long s = 0; s < ns; ++s)
    {
        sp.push_back({static_cast<double>(s), 0.0, 0.0});
    }
    std::vector<Point> rp;
    for (long r = 0; r < nr; ++r)
    {
        rp.push_back({static_cast<double>(r), 0.0, 0.0});
    }
    out.sources   = share(ObservationGrid::unit_weights(std::move(sp), "sources"));
    out.receivers = ns == nr ? out.sources : share(ObservationGrid::unit_weights(std::move(rp), "receivers"));
    return out;
}

inline void save_csv(const std::string& path, const KernelSamples& k)
{
    // Write-then-rename keeps the output atomic per stage.
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os)
        {
            throw Error("cannot open '" + tmp + "' for writing");
        }
        write_csv(os, k);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
    {
        throw Error("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

inline KernelSamples load_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
    {
        throw Error("cannot open '" + path + "'");
    }
    return read_csv(is);
}

} // namespace fraccal

#endif
