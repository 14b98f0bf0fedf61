// Runs the command-line binary and checks exit codes and written files.

#include "panosweep/config.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

using namespace panosweep;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("panosweep_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        write_text(path("small.json"), R"({"width": 64, "height": 32, "scenes": ["checker-sphere"]})");
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& f) const { return (dir_ / f).string(); }

    /// Exit status of `panosweep <args>`, output captured to log.txt.
    int run(const std::string& args) const
    {
        const std::string cmd = std::string("\"") + PANOSWEEP_CLI + "\" " + args + " > \"" + path("log.txt") + "\" 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    std::string log() const { return read_text(path("log.txt")); }

    fs::path dir_;
};

std::size_t line_count(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

const std::string configs = PANOSWEEP_CONFIG_DIR;

} // namespace

TEST_F(Cli, UsageErrorsExitOne)
{
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("render --bogus"), 1);
    EXPECT_EQ(run("render"), 1) << "--config is required for render";
    EXPECT_EQ(run("ablate"), 1);
    EXPECT_EQ(run("ablate nonsense --config " + path("small.json")), 1);
    EXPECT_EQ(run("--help"), 0);
    EXPECT_NE(log().find("render"), std::string::npos);
}

TEST_F(Cli, ConfigAndIoErrors)
{
    EXPECT_EQ(run("render --config " + path("absent.json") + " --out " + path("o")), 2);
    write_text(path("broken.json"), "{");
    EXPECT_EQ(run("render --config " + path("broken.json") + " --out " + path("o")), 1);
    write_text(path("unknown.json"), R"({"sweep": {"levels": 3}})");
    EXPECT_EQ(run("pipeline --config " + path("unknown.json") + " --out " + path("o")), 1);
    EXPECT_EQ(run("sweep --in " + path("nowhere")), 2);
}

TEST_F(Cli, NumericalFailureExitsThree)
{
    ensure_dir(path("empty"));
    write_png(path("empty/rgb.png"), ErpImage(16, 8));
    write_depth_pfm(path("empty/depth.pfm"), DepthMap(16, 8, 0.2, 8.0));
    EXPECT_EQ(run("synth --in " + path("empty") + " --out " + path("views")), 3) << log();
}

TEST_F(Cli, RenderWritesRgbAndDepth)
{
    ASSERT_EQ(run("render --config " + configs + "/checker-sphere.json --out " + path("d")), 0) << log();
    EXPECT_TRUE(fs::exists(path("d/rgb.png")));
    EXPECT_TRUE(fs::exists(path("d/depth.pfm")));
    const DepthMap d = read_depth_pfm(path("d/depth.pfm"));
    EXPECT_EQ(d.width(), 512);
    EXPECT_EQ(d.height(), 256);
    EXPECT_EQ(read_erp_png(path("d/rgb.png")).width(), 512);
}

TEST_F(Cli, RenderSuiteWritesPerSceneDirectories)
{
    write_text(path("two.json"), R"({"width": 32, "height": 16, "scenes": ["room", "courtyard"]})");
    ASSERT_EQ(run("render --config " + path("two.json") + " --out " + path("d")), 0) << log();
    EXPECT_TRUE(fs::exists(path("d/room/depth.pfm")));
    EXPECT_TRUE(fs::exists(path("d/courtyard/rgb.png")));
}

TEST_F(Cli, RenderSynthSweepChain)
{
    ASSERT_EQ(run("render --config " + path("small.json") + " --out " + path("d")), 0) << log();
    ASSERT_EQ(run("synth --config " + path("small.json") + " --in " + path("d") + " --out " + path("v")), 0) << log();
    const Json views = Json::parse(read_text(path("v/views.json")));
    ASSERT_EQ(views.size(), 3u);
    EXPECT_EQ(views[2]["offset"].get<double>(), 0.4);
    EXPECT_TRUE(fs::exists(path("v/view_0.png")));
    EXPECT_TRUE(fs::exists(path("v/mask_2.png")));
    ASSERT_EQ(run("sweep --config " + path("small.json") + " --in " + path("d") + " --views " + path("v") + " --out " +
                  path("s")),
              0)
        << log();
    EXPECT_TRUE(fs::exists(path("s/depth.pfm")));
    EXPECT_TRUE(fs::exists(path("s/level_1.pfm")));
    EXPECT_TRUE(fs::exists(path("s/level_2.pfm")));
    EXPECT_NE(log().find("abs_rel"), std::string::npos);
}

TEST_F(Cli, PipelineWritesReport)
{
    ASSERT_EQ(run("pipeline --config " + path("small.json") + " --seed 5 --threads 2 --out " + path("p")), 0) << log();
    const Json r = Json::parse(read_text(path("p/report.json")));
    EXPECT_EQ(r["format"], "panosweep-report");
    EXPECT_EQ(r["config"]["seed"], 5);
    ASSERT_EQ(r["results"].size(), 1u);
    for (const char* k : {"abs_rel", "sq_rel", "rmse", "rmse_log", "delta1", "delta2", "delta3"})
        EXPECT_TRUE(r["results"][0]["final"].contains(k)) << k;
    // The report is itself a valid configuration.
    ASSERT_EQ(run("pipeline --config " + path("p/report.json") + " --seed 5 --out " + path("q")), 0) << log();
    EXPECT_EQ(read_text(path("q/report.json")), read_text(path("p/report.json")));
}

TEST_F(Cli, AblateSamplingWritesThreeRows)
{
    ASSERT_EQ(run("ablate sampling --config " + path("small.json") + " --out " + path("a")), 0) << log();
    const std::string csv = read_text(path("a/sampling.csv"));
    EXPECT_EQ(line_count(csv), 4u);
    EXPECT_EQ(csv.rfind("label,scene,abs_rel", 0), 0u);
    EXPECT_NE(csv.find("uniform_inverse_depth"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("a/sampling_per_scene.csv")));
}

TEST_F(Cli, StudyBaselineFov)
{
    write_text(path("study.json"), R"({"width": 64, "height": 32, "scenes": ["room"],
        "study": {"baselines": [0.0, 0.16], "fovs": [90, 360], "grid_rows": 2, "grid_cols": 2, "supersample": 1}})");
    ASSERT_EQ(run("study-baseline-fov --config " + path("study.json") + " --out " + path("s")), 0) << log();
    const std::string csv = read_text(path("s/baseline-fov.csv"));
    EXPECT_EQ(csv.rfind("label,scene,b0,b0.16", 0), 0u);
    EXPECT_EQ(line_count(csv), 3u);
}
