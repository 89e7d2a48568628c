#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "medliab/cli.hpp"

namespace medliab::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("medliab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

TEST_F(CliTest, SolveBaselineSummary) {
    const auto r = run({"solve"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("Regime A, theta=0.40, N=5"), std::string::npos) << r.out;
}

TEST_F(CliTest, ThresholdBaseline) {
    const auto r = run({"threshold"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("theta_d = 0.60"), std::string::npos) << r.out;
}

TEST_F(CliTest, ScenarioCsvAndNote) {
    const auto r = run({"scenario", "--out", path("s.csv")});
    EXPECT_EQ(r.code, kExitOk);
    const auto csv = slurp(path("s.csv"));
    EXPECT_EQ(csv.rfind("id,mode,theta,n,risk,congestion,staffing,compliance,total,pct_vs_s1\n", 0), 0u);
    EXPECT_NE(csv.find("\nS1,A,0.4,5,"), std::string::npos);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_NE(r.err.find("18.7k"), std::string::npos);
    EXPECT_NE(r.err.find("welfare gap"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("s.csv.json")));
}

TEST_F(CliTest, UnknownCommandListsCommands) {
    const auto r = run({"bogus"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("available commands"), std::string::npos);
    EXPECT_NE(r.err.find("regime-map"), std::string::npos);
}

TEST_F(CliTest, MissingConfigNamesPath) {
    const auto r = run({"solve", "--config", path("absent.cfg")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find(path("absent.cfg")), std::string::npos);
}

TEST_F(CliTest, InvalidConfigIsUsageError) {
    std::ofstream(path("bad.cfg")) << "q = 0.99\n";
    EXPECT_EQ(run({"solve", "--config", path("bad.cfg")}).code, kExitUsage);
}

TEST_F(CliTest, ConfigOverridesBaseline) {
    std::ofstream(path("hi.cfg")) << "big_l = 5000\n";
    const auto r = run({"solve", "--config", path("hi.cfg")});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out.rfind("Regime I", 0), 0u) << r.out;
}

TEST_F(CliTest, InfeasibleScenarioIsDomainError) {
    // Inverted bounds leave no admissible liability share.
    const auto r = run({"solve", "--theta-lo", "0.8", "--theta-hi", "0.2"});
    EXPECT_NE(r.code, kExitOk);
}

TEST_F(CliTest, BadFlagsAreUsageErrors) {
    EXPECT_EQ(run({"sweep"}).code, kExitUsage);
    EXPECT_EQ(run({"sweep", "--grid", "mu_a=1:2:3"}).code, kExitUsage);
    EXPECT_EQ(run({"figure", "--which", "fig9"}).code, kExitUsage);
    EXPECT_EQ(run({"figure", "--which", "fig2", "--grid", "big_l=1:2:3"}).code, kExitUsage);
    EXPECT_EQ(run({"solve", "--no-such-flag"}).code, kExitUsage);
}

TEST_F(CliTest, UnstableSimulationIsDomainError) {
    EXPECT_EQ(run({"simulate", "--lambda", "50", "--mu", "12", "--n", "4", "--customers", "1000"}).code,
              kExitDomain);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
    const std::vector<std::vector<std::string>> cmds{
        {"solve"},
        {"scenario"},
        {"regime-map", "--grid", "lambda=25:90:6", "--grid", "big_l=800:5000:6"},
        {"simulate", "--customers", "20000", "--seed", "9"},
        {"figure", "--which", "fig4"},
        {"welfare", "--grid", "big_l=800:5000:5"},
    };
    for (const auto& base : cmds) {
        std::string first;
        for (int rep = 0; rep < 2; ++rep) {
            auto args = base;
            const auto out = path("run" + std::to_string(rep) + ".csv");
            args.insert(args.end(), {"--out", out});
            ASSERT_EQ(run(args).code, kExitOk) << base[0];
            if (rep == 0) first = slurp(out);
            else EXPECT_EQ(slurp(out), first) << base[0];
        }
        EXPECT_FALSE(first.empty());
    }
}

TEST_F(CliTest, ManifestRecordsRunAndRerunReproduces) {
    std::ofstream(path("p.cfg")) << "big_l = 3000\nkappa = 3000\n";
    ASSERT_EQ(run({"sweep", "--config", path("p.cfg"), "--grid", "c_w=50:200:4", "--out", path("a.csv")}).code,
              kExitOk);
    const auto manifest = nlohmann::json::parse(slurp(path("a.csv.json")));
    EXPECT_EQ(manifest["command"], "sweep");
    EXPECT_EQ(manifest["params"]["big_l"], 3000.0);
    EXPECT_EQ(manifest["config_source"], path("p.cfg"));
    EXPECT_TRUE(manifest.contains("tool_version"));
    EXPECT_TRUE(manifest.contains("timestamp"));

    fs::remove(path("p.cfg"));  // rerun must not depend on the original file
    ASSERT_EQ(run({"rerun", "--manifest", path("a.csv.json"), "--out", path("b.csv")}).code, kExitOk);
    EXPECT_EQ(slurp(path("b.csv")), slurp(path("a.csv")));
}

TEST_F(CliTest, ThousandsScalesMoney) {
    ASSERT_EQ(run({"scenario", "--thousands", "--out", path("k.csv")}).code, kExitOk);
    EXPECT_NE(slurp(path("k.csv")).find("S1,A,0.4,5,6,"), std::string::npos);
}

// The installed binary, its exit status and the config environment fallback.
int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(CliTest, BinaryExitCodesAndEnvironment) {
    const std::string bin = MEDLIAB_BIN;
    EXPECT_EQ(shell(bin + " threshold > /dev/null"), kExitOk);
    EXPECT_EQ(shell(bin + " nope 2> /dev/null"), kExitUsage);
    std::ofstream(path("env.cfg")) << "big_l = 4000\n";
    const auto out = path("env.txt");
    EXPECT_EQ(shell(std::string(kConfigEnv) + "=" + path("env.cfg") + " " + bin + " threshold > " + out), kExitOk);
    EXPECT_NE(slurp(out).find("theta_d = 0.30"), std::string::npos) << slurp(out);
    EXPECT_EQ(shell(bin + " --version > " + out), kExitOk);
    EXPECT_NE(slurp(out).find(version()), std::string::npos);
}

}  // namespace
}  // namespace medliab::cli
