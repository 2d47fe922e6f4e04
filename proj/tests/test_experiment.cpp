#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fraccal/experiment.hpp"

using namespace fraccal;
namespace fs = std::filesystem;

namespace
{

const fs::path configs = fs::path(FRACCAL_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("fraccal_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST(Config, ShippedConfigsRoundTrip)
{
    int seen = 0;
    for (const auto& e : fs::directory_iterator(configs))
    {
        if (e.path().extension() != ".ini")
        {
            continue;
        }
        ++seen;
        const ExperimentConfig c = load_config(e.path().string());
        const ExperimentConfig d = parse_config(emit_config(c));
        EXPECT_EQ(c, d) << e.path();
        EXPECT_EQ(config_hash(c), config_hash(d)) << e.path();
    }
    EXPECT_GE(seen, 8);
}

TEST(Config, ErrorsNameTheField)
{
    try
    {
        parse_config("[time]\nbogus = 1\n");
        FAIL() << "unknown key accepted";
    }
    catch (const ConfigError& e)
    {
        EXPECT_EQ(e.field(), "time.bogus");
        EXPECT_NE(std::string(e.what()).find("unknown key"), std::string::npos);
    }
    try
    {
        parse_config("[experiment]\nalpha = 1.5\n").validate();
        FAIL() << "alpha outside (0, 1) accepted";
    }
    catch (const ConfigError& e)
    {
        EXPECT_EQ(e.field(), "experiment.alpha");
    }
    EXPECT_THROW(parse_config("[experiment]\nseed = 1\nseed = 2\n"), ConfigError);
    EXPECT_THROW(parse_config("[nowhere]\nx = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[experiment]\nalpha = half\n"), ConfigError);
}

TEST(Config, EmptyTextGivesDefaults)
{
    EXPECT_EQ(parse_config(std::string{}), ExperimentConfig{});
}

TEST(Config, MatrixPathIsResolvedAgainstConfigDirectory)
{
    const ExperimentConfig c = load_config((configs / "matrix_file.ini").string());
    ASSERT_TRUE(c.model_a.has_value());
    const SpectralModel m = build_model(*c.model_a, c.seed);
    EXPECT_EQ(m.quadrature_grid()->size(), 4u);
    const fs::path out = scratch("matrix");
    EXPECT_NO_THROW(run_forward(c, out));
}

TEST(Table, WriteReadRoundTripIsExact)
{
    Table t;
    t.metadata = {{"alpha", "0.5"}, {"content", "test"}};
    t.columns  = {"a", "b"};
    t.rows     = {{0.1, 1.0 / 3.0}, {-2.5e-300, 6.02214076e23}};
    std::stringstream ss;
    write_table(ss, t);
    EXPECT_EQ(read_table(ss), t);
}

TEST(Table, CorruptLineIsReportedWithItsNumber)
{
    std::stringstream bad("# k=v\na,b\n1,2\n3,oops\n");
    try
    {
        read_table(bad);
        FAIL() << "corrupt value accepted";
    }
    catch (const ParseError& e)
    {
        EXPECT_EQ(e.line(), 4u);
    }
    std::stringstream ragged("a,b\n1,2,3\n");
    try
    {
        read_table(ragged);
        FAIL() << "ragged row accepted";
    }
    catch (const ParseError& e)
    {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Forward, CircleModeIsHalvedAndRerunsAreByteIdentical)
{
    const ExperimentConfig c = load_config((configs / "forward_circle.ini").string());
    const fs::path one       = scratch("fwd1");
    const fs::path two       = scratch("fwd2");
    const ForwardResult r    = run_forward(c, one);
    ASSERT_EQ(r.solution.size(), 5);
    EXPECT_LT((r.solution - 0.5 * r.source).cwiseAbs().maxCoeff(), 1e-14);
    run_forward(c, two);
    for (const char* f : {"solution.csv", "heat.csv", "wave.csv"})
    {
        EXPECT_EQ(slurp(one / f), slurp(two / f)) << f;
    }
    const Table t = load_table(one / "solution.csv");
    EXPECT_EQ(t.metadata.at("config_hash"), config_hash(c));
    EXPECT_EQ(t.rows.size(), 5u);
}

TEST(Reduce, MissingModelBIsAConfigError)
{
    const ExperimentConfig c = load_config((configs / "forward_circle.ini").string());
    try
    {
        run_reduce(c, scratch("nob"));
        FAIL() << "reduce ran without model_b";
    }
    catch (const ConfigError& e)
    {
        EXPECT_EQ(e.field(), "model_b");
    }
}

TEST(Reduce, IdenticalSpheresAreSameInEveryStage)
{
    const ExperimentConfig c = load_config((configs / "spheres_identical.ini").string());
    const fs::path out       = scratch("same");
    const ReduceResult r     = run_reduce(c, out);
    EXPECT_TRUE(r.all_same());
    EXPECT_FALSE(r.stages.empty());
    EXPECT_TRUE(fs::exists(out / "report.txt"));
}

TEST(Reduce, DifferentSpheresAreDistinguished)
{
    const ExperimentConfig c = load_config((configs / "spheres.ini").string());
    const ReduceResult r     = run_reduce(c, scratch("diff"));
    EXPECT_FALSE(r.all_same());
    EXPECT_FALSE(r.verdict.same);
    // Twenty sphere levels exceed what the exponential fit resolves, so only finiteness is checked here.
    EXPECT_TRUE(std::isfinite(r.recovery_error_a));
}

TEST(Identify, TorusConfigRecoversLengths)
{
    const ExperimentConfig c = load_config((configs / "identify_torus.ini").string());
    const IdentifyResult r   = run_identify(c, scratch("id"));
    ASSERT_TRUE(r.family.has_value());
    ASSERT_TRUE(c.model_a.has_value());
    EXPECT_NEAR(r.family->parameters.at(0), std::min(c.model_a->L1, c.model_a->L2), 1e-5);
    EXPECT_NEAR(r.family->parameters.at(1), std::max(c.model_a->L1, c.model_a->L2), 1e-5);
    const Table t = load_table(r.files.front());
    EXPECT_EQ(t.metadata.at("family"), "torus");
}
