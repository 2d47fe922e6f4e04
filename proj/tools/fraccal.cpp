// fraccal: command-line driver for forward runs, reductions, identification,
// model comparison and the acceptance suite.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fraccal/fraccal.hpp"

namespace
{

constexpr int kSuccess     = 0;
constexpr int kFailure     = 1;
constexpr int kConfigError = 2;

struct Options
{
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
};

fraccal::ExperimentConfig load(const Options& o, bool required)
{
    fraccal::ExperimentConfig c;
    if (!o.config.empty())
    {
        c = fraccal::load_config(o.config);
    }
    else if (required)
    {
        throw fraccal::ConfigError("--config", "this subcommand needs a configuration file");
    }
    if (o.seed)
    {
        c.seed = *o.seed;
    }
    if (!o.out.empty())
    {
        c.output = o.out;
    }
    return c;
}

void list_files(const std::vector<std::filesystem::path>& files)
{
    for (const auto& f : files)
    {
        std::cout << "  wrote " << f.string() << '\n';
    }
}

int forward(const Options& o)
{
    const auto c = load(o, true);
    const auto r = fraccal::run_forward(c, c.output);
    std::cout << "forward: " << r.solution.size() << " observation points, config " << fraccal::config_hash(c) << '\n';
    if (o.verbose)
    {
        list_files(r.files);
    }
    return kSuccess;
}

int reduce(const Options& o)
{
    const auto c = load(o, true);
    const auto r = fraccal::run_reduce(c, c.output);
    for (const auto& s : r.stages)
    {
        std::cout << fmt::format("{:<11} {:<9} value {:.6g} threshold {:.3g}\n", s.stage,
                                 s.same ? "SAME" : "DIFFERENT", s.value, s.threshold);
    }
    std::cout << "verdict " << r.verdict.summary() << '\n';
    if (o.verbose)
    {
        for (const auto& line : r.verdict.log)
        {
            std::cout << "  " << line << '\n';
        }
        list_files(r.files);
    }
    return kSuccess;
}

int identify(const Options& o)
{
    const auto c = load(o, true);
    const auto r = fraccal::run_identify(c, c.output);
    std::cout << fmt::format("rank {}{}, residual {:.3g}\n", r.spectrum.rank, r.spectrum.unstable ? " (unstable)" : "",
                             r.spectrum.residual);
    for (std::size_t i = 0; i < r.spectrum.size(); ++i)
    {
        std::cout << fmt::format("  mu = {:.12g}  multiplicity {}\n", r.spectrum.eigenvalues[i],
                                 r.spectrum.multiplicities[i]);
    }
    if (r.family)
    {
        std::cout << r.family->family << " parameters:";
        for (double x : r.family->parameters)
        {
            std::cout << ' ' << fmt::format("{:.12g}", x);
        }
        std::cout << (r.family->ambiguous ? " (ambiguous)" : "") << '\n';
    }
    if (o.verbose)
    {
        list_files(r.files);
    }
    return kSuccess;
}

int distinguish(const Options& o)
{
    const auto c = load(o, true);
    const auto r = fraccal::run_distinguish(c, c.output);
    std::cout << r.verdict.summary() << '\n';
    if (o.verbose)
    {
        for (const auto& line : r.verdict.log)
        {
            std::cout << "  " << line << '\n';
        }
        list_files(r.files);
    }
    return kSuccess;
}

int acceptance(const Options& o)
{
    const auto c       = load(o, false);
    const auto results = fraccal::run_acceptance(c, std::cout);
    int failed         = 0;
    for (const auto& r : results)
    {
        failed += r.passed ? 0 : 1;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? kSuccess : kFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fractional anisotropic Calderon problem experiments"};
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed = 0;
    auto add_common    = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "configuration file");
        sub->add_option("--out", opt.out, "output directory (overrides experiment.output)");
        sub->add_option("--seed", seed, "random seed (overrides experiment.seed)")->each([&](const std::string&) {
            opt.seed = seed;
        });
        sub->add_flag("--verbose", opt.verbose, "print stage logs and written files");
    };
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"forward", "source-to-solution, heat and wave data for model A"},
        {"reduce", "two-model reduction report"},
        {"identify", "spectral identification from heat data"},
        {"distinguish", "staged comparison of two models"},
        {"acceptance", "run the acceptance suite"},
    };
    for (const auto& [name, help] : commands)
    {
        add_common(app.add_subcommand(name, help));
    }
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kConfigError;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try
    {
        if (cmd == "forward")
        {
            return forward(opt);
        }
        if (cmd == "reduce")
        {
            return reduce(opt);
        }
        if (cmd == "identify")
        {
            return identify(opt);
        }
        if (cmd == "distinguish")
        {
            return distinguish(opt);
        }
        return acceptance(opt);
    }
    catch (const fraccal::ConfigError& e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
