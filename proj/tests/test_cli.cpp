// Drives the modcover binary end to end. MODCOVER_BIN is set by CMake.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <regex>

#include "modcover/bench.hpp"
#include "modcover/env_io.hpp"
#include "modcover/solution_io.hpp"

using namespace modcover;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + " " + MODCOVER_BIN + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("modcover_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string star30() {
        const auto p = path("star.env");
        EXPECT_EQ(run("gen --pattern identical --modules 30 --link 20 --base star --seed 1 --out " + p).code, 0);
        return p;
    }

    std::filesystem::path dir_;
};

std::size_t used_robots(const std::string& summary) {
    std::smatch m;
    const std::regex re("robots_used=(\\d+)/");
    if (!std::regex_search(summary, m, re)) return 0;
    return std::stoul(m[1].str());
}

double makespan_of(const std::string& summary) {
    std::smatch m;
    const std::regex re("makespan=([0-9.eE+-]+)");
    if (!std::regex_search(summary, m, re)) return -1;
    return std::stod(m[1].str());
}

}  // namespace

TEST_F(Cli, GenWritesValidFileAndPrintsPath) {
    const auto p = star30();
    const auto env = load_environment(p);
    EXPECT_EQ(env.module_count(), 30u);
    EXPECT_EQ(run("gen --modules 2 --out " + path("x.env")).out, path("x.env") + "\n");
}

TEST_F(Cli, GenIsByteIdentical) {
    const auto a = path("a.env"), b = path("b.env");
    const std::string flags = "gen --pattern random --modules 12 --link 7.5 --seed 3 --out ";
    ASSERT_EQ(run(flags + a).code, 0);
    ASSERT_EQ(run(flags + b).code, 0);
    EXPECT_EQ(detail::read_file(a), detail::read_file(b));
}

TEST_F(Cli, SeedFromEnvironmentVariable) {
    ASSERT_EQ(run("gen --pattern random --modules 6 --out " + path("e.env"), "MODCOVER_SEED=42").code, 0);
    ASSERT_EQ(run("gen --pattern random --modules 6 --seed 42 --out " + path("f.env")).code, 0);
    EXPECT_EQ(detail::read_file(path("e.env")), detail::read_file(path("f.env")));
    EXPECT_NE(load_environment(path("e.env")).name.find("-s42"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("gen --pattern identical --link 20").code, 2);
    EXPECT_EQ(run("gen --modules 3 --pattern spiral").code, 2);
    EXPECT_EQ(run("gen --modules 3 --base hexagon").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("solve " + path("missing.env") + " --robots 2").code, 2);
    EXPECT_EQ(run("solve --robots 2").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, RuntimeErrors) {
    {
        std::ofstream out(path("broken.env"));
        out << "{ not json";
    }
    EXPECT_EQ(run("solve " + path("broken.env") + " --robots 2").code, 1);
    const auto p = star30();
    const auto r = run("solve " + p + " --robots 2 --tsp exact 2>&1");
    EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, ExactCapErrorNamesCap) {
    const auto p = star30();
    const std::string cmd = std::string(MODCOVER_BIN) + " solve " + p + " --robots 2 --tsp exact 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string text;
    std::array<char, 512> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) text += buf.data();
    pclose(pipe);
    EXPECT_NE(text.find("cap of 15"), std::string::npos) << text;
}

TEST_F(Cli, SolveSaturation) {
    const auto p = star30();
    const auto r = run("solve " + p + " --robots 20 --out " + path("sol.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_LE(used_robots(r.out), 18u);
    EXPECT_NE(r.out.find("compute_seconds="), std::string::npos);
    const auto sol = load_solution(path("sol.json"));
    EXPECT_EQ(sol.robots.size(), 20u);
    EXPECT_EQ(sol.algorithm, "integer");
    EXPECT_EQ(sol.robots[0].tour.front(), sol.robots[0].tour.back());
}

TEST_F(Cli, FredericksonSingleModule) {
    ASSERT_EQ(run("gen --modules 1 --base ring --out " + path("one.env")).code, 0);
    const auto f = run("solve " + path("one.env") + " --robots 1 --algo frederickson --out " + path("f.json"));
    const auto i = run("solve " + path("one.env") + " --robots 1");
    ASSERT_EQ(f.code, 0);
    EXPECT_DOUBLE_EQ(makespan_of(f.out), makespan_of(i.out));
    EXPECT_EQ(load_solution(path("f.json")).algorithm, "frederickson");
}

TEST_F(Cli, CompareRowsAndRoundTrip) {
    ASSERT_EQ(run("gen --pattern random --modules 9 --seed 2 --out " + path("r.env")).code, 0);
    const auto csv = path("cmp.csv");
    ASSERT_EQ(run("compare --env " + path("r.env") + " --robots 3 --csv " + csv).code, 0);
    const auto rows = records_from_csv(detail::read_file(csv));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].algorithm, "frederickson");
    EXPECT_EQ(rows[1].algorithm, "integer");
    EXPECT_EQ(records_to_csv(rows), detail::read_file(csv));

    ASSERT_EQ(run("compare --env " + path("r.env") + " --robots 2 --algos integer --append --csv " + csv).code, 0);
    EXPECT_EQ(records_from_csv(detail::read_file(csv)).size(), 3u);
}

TEST_F(Cli, CompareRecordsFailuresAndContinues) {
    ASSERT_EQ(run("gen --modules 2 --base corridor --out " + path("c.env")).code, 0);
    const auto r = run("compare --env " + path("c.env") + " --robots 1 --tsp exact");
    ASSERT_EQ(r.code, 0);
    const auto rows = records_from_csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& row : rows) EXPECT_EQ(row.status, "cap");
}

TEST_F(Cli, SweepEmptyRangeIsUsageError) {
    EXPECT_EQ(run("sweep --axis robots --from 5 --to 1").code, 2);
    EXPECT_EQ(run("sweep --axis robots --from 1 --to 5 --step 0").code, 2);
    EXPECT_EQ(run("sweep --axis diagonal --from 1 --to 5").code, 2);
}

TEST_F(Cli, SweepRobotsFlatBeyondEighteen) {
    const auto csv = path("robots.csv");
    ASSERT_EQ(run("sweep --axis robots --from 1 --to 25 --modules 30 --link 20 --base star --dedupe-modules --csv " +
                  csv + " --svg " + path("r"))
                  .code,
              0);
    const auto rows = records_from_csv(detail::read_file(csv));
    ASSERT_EQ(rows.size(), 25u);
    for (std::size_t m = 18; m <= 25; ++m) {
        EXPECT_EQ(rows[m - 1].makespan, rows[17].makespan);
        EXPECT_LE(rows[m - 1].robots_used, 18u);
    }
    for (const char* suffix : {"-tours.svg", "-allocation.svg", "-compute.svg"})
        EXPECT_TRUE(std::filesystem::exists(path(std::string("r") + suffix))) << suffix;
}

TEST_F(Cli, SweepLinkZeroBalances) {
    const auto r = run("sweep --axis link --from 0 --to 30 --step 15 --modules 30 --robots 10 --dedupe-modules");
    ASSERT_EQ(r.code, 0);
    const auto rows = records_from_csv(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].link_dist, 0.0);
    EXPECT_EQ(rows[0].std_tour, 0.0);
    EXPECT_GT(rows[1].std_tour, 0.0);
}

TEST_F(Cli, SweepModulesNonDecreasing) {
    const auto r = run("sweep --axis modules --from 10 --to 40 --step 5 --robots 6 --pattern random --dedupe-modules");
    ASSERT_EQ(r.code, 0);
    const auto rows = records_from_csv(r.out);
    ASSERT_EQ(rows.size(), 7u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].makespan, rows[i - 1].makespan);
}
