#include <gtest/gtest.h>

#include <random>
#include <set>

#include "modcover/baselines.hpp"
#include "support.hpp"

using namespace modcover;
using namespace testing_support;

namespace {

ModularEnvironment two_points(Time link) {
    ModularEnvironment env;
    env.modules = {point_module(1), point_module(2)};
    env.linking = {link};
    return env;
}

void expect_covering(const MultiTourSolution& sol, std::size_t vertices, std::size_t depot) {
    std::set<std::size_t> seen;
    for (const auto& w : sol.walks) {
        ASSERT_FALSE(w.empty());
        EXPECT_EQ(w.front(), depot);
        EXPECT_EQ(w.back(), depot);
        seen.insert(w.begin(), w.end());
    }
    EXPECT_EQ(seen.size(), vertices);
}

}  // namespace

TEST(Glue, SingleModuleIsItself) {
    std::mt19937_64 rng(61);
    const auto env = random_env({6}, {}, rng);
    const auto g = glue_environment(env);
    EXPECT_EQ(g.graph, env.modules[0].graph);
    EXPECT_EQ(g.depot, env.modules[0].doorway);
}

TEST(Glue, TwoPointsArePath) {
    const auto g = glue_environment(two_points(5));
    ASSERT_EQ(g.graph.size(), 2u);
    ASSERT_EQ(g.graph.edges.size(), 1u);
    EXPECT_EQ(g.graph.edges[0].weight, 5.0);
}

TEST(Glue, VertexCountAndConnectivity) {
    std::mt19937_64 rng(62);
    const auto env = random_env({3, 5, 1, 4}, {1, 0, 2}, rng);
    const auto g = glue_environment(env);
    EXPECT_EQ(g.graph.size(), 13u);
    EXPECT_TRUE(g.graph.connected());
    EXPECT_EQ(g.origin[g.offset[2]].module, 2u);
}

TEST(Frederickson, OneRobotIsGlobalTour) {
    std::mt19937_64 rng(63);
    const auto env = random_env({4, 3}, {6}, rng);
    const auto res = frederickson(env, 1);
    EXPECT_NEAR(res.solution.makespan, res.global_tour.time, 1e-9);
    expect_covering(res.solution, 7, res.glued.depot);
}

TEST(Frederickson, SubtoursCoverAndRespectBound) {
    std::mt19937_64 rng(64);
    for (int trial = 0; trial < 25; ++trial) {
        const auto env = random_env({pick(rng, 1, 6), pick(rng, 1, 6), pick(rng, 1, 6)},
                                    {uniform(rng, 0, 20), uniform(rng, 0, 20)}, rng);
        const auto m = pick(rng, 1, 6);
        const auto res = frederickson(env, m);
        ASSERT_EQ(res.solution.walks.size(), m);
        expect_covering(res.solution, res.glued.graph.size(), res.glued.depot);
        const auto d = metric_closure(res.glued.graph);
        Time c_max = 0;
        for (std::size_t v = 0; v < d.size(); ++v) c_max = std::max(c_max, d(res.glued.depot, v));
        for (auto t : res.solution.times)
            EXPECT_LE(t, res.global_tour.time / static_cast<double>(m) + 2 * c_max + 1e-9);
    }
}

TEST(Frederickson, CapAndBadRobotCount) {
    std::mt19937_64 rng(65);
    const auto env = random_env({5, 5}, {1}, rng);
    FredericksonOptions opts;
    opts.max_vertices = 9;
    EXPECT_THROW(frederickson(env, 2, opts), CapExceeded);
    EXPECT_THROW(frederickson(env, 0), InvalidInput);
}

TEST(SplitTour, TrivialTour) {
    const auto sol = k_splitour(DistanceMatrix(1), Tour{{0}, 0.0}, 0, 3);
    ASSERT_EQ(sol.walks.size(), 3u);
    EXPECT_EQ(sol.makespan, 0.0);
    EXPECT_EQ(sol.robots_used(), 0u);
}

TEST(BruteForceContiguous, Examples) {
    EXPECT_EQ(brute_force_contiguous(std::vector<Time>{5}, std::vector<Time>{10, 10}, 2).makespan, 20.0);
    std::mt19937_64 rng(66);
    const auto inst = random_line(7, rng);
    const LinkPrefix prefix(inst.linking);
    const auto single = brute_force_contiguous(inst.linking, inst.tau, 1);
    EXPECT_NEAR(single.makespan, block_time(inst.tau, prefix, 1, 7), 1e-9);
    const auto many = brute_force_contiguous(inst.linking, inst.tau, 9);
    Time worst = 0;
    for (std::size_t i = 1; i <= 7; ++i) worst = std::max(worst, inst.tau[i - 1] + 2 * prefix.to_module(i));
    EXPECT_NEAR(many.makespan, worst, 1e-9);
    EXPECT_EQ(many.robots.size(), 9u);
}

TEST(BruteForceContiguous, Caps) {
    EXPECT_THROW(brute_force_contiguous(constant(14, 1), constant(15, 1), 2), CapExceeded);
    EXPECT_THROW(brute_force_contiguous(constant(1, 1), constant(1, 1), 2), InvalidInput);
    EXPECT_THROW(brute_force_contiguous(constant(0, 1), constant(1, 1), 0), InvalidInput);
}

TEST(TinyOracle, Examples) {
    ModularEnvironment one;
    one.modules = {point_module(1)};
    EXPECT_EQ(brute_force_mtsp_tiny(one, 2).makespan, 0.0);
    const auto two = brute_force_mtsp_tiny(two_points(5), 2);
    EXPECT_EQ(two.makespan, 10.0);
}

TEST(TinyOracle, Caps) {
    std::mt19937_64 rng(67);
    EXPECT_THROW(brute_force_mtsp_tiny(random_env({5, 5}, {1}, rng), 2), CapExceeded);
    EXPECT_THROW(brute_force_mtsp_tiny(two_points(1), 4), CapExceeded);
}

TEST(TinyOracle, SingleRobotIsHeldKarpAndCovers) {
    std::mt19937_64 rng(68);
    for (int trial = 0; trial < 20; ++trial) {
        const auto env = random_tiny_env(rng);
        const auto glued = glue_environment(env);
        const auto d = metric_closure(glued.graph);
        const auto opt1 = brute_force_mtsp_tiny(env, 1);
        EXPECT_NEAR(opt1.makespan, permutation_tsp(d), 1e-9);
        for (std::size_t m = 1; m <= 3; ++m) {
            const auto sol = brute_force_mtsp_tiny(env, m);
            expect_covering(sol, glued.graph.size(), glued.depot);
            EXPECT_LE(sol.makespan, opt1.makespan + 1e-9);
        }
    }
}
