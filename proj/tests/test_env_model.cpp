#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "modcover/env_io.hpp"
#include "modcover/env_model.hpp"
#include "support.hpp"

using namespace modcover;
using namespace testing_support;

namespace {

ModularEnvironment single_vertex_env() {
    ModularEnvironment env;
    env.name = "one";
    env.modules.push_back(point_module(1));
    return env;
}

bool has_violation(const std::vector<std::string>& report, const std::string& needle) {
    return std::any_of(report.begin(), report.end(), [&](const auto& s) { return s.find(needle) != std::string::npos; });
}

MetricGraph path_abc() {
    MetricGraph g;
    const auto a = g.add_vertex("m1/a"), b = g.add_vertex("m1/b"), c = g.add_vertex("m1/c");
    g.add_edge(a, b, 1.0);
    g.add_edge(b, c, 1.0);
    return g;
}

}  // namespace

TEST(Validate, MinimalEnvironmentIsValid) { EXPECT_TRUE(validate_environment(single_vertex_env()).empty()); }

TEST(Validate, DisconnectedModuleReported) {
    auto env = single_vertex_env();
    env.modules[0].graph.add_vertex("m1/island");
    EXPECT_TRUE(has_violation(validate_environment(env), "module 1 disconnected"));
}

TEST(Validate, LinkingLengthMismatch) {
    auto env = single_vertex_env();
    env.linking = {3.0};
    EXPECT_FALSE(validate_environment(env).empty());
    env.modules.push_back(point_module(2));
    env.linking.clear();
    EXPECT_FALSE(validate_environment(env).empty());
}

TEST(Validate, BadWeightsAndStructure) {
    auto env = single_vertex_env();
    auto& g = env.modules[0].graph;
    const auto b = g.add_vertex("m1/b");
    g.add_edge(0, b, -1.0);
    EXPECT_FALSE(validate_environment(env).empty());
    g.edges.back().weight = 2.0;
    EXPECT_TRUE(validate_environment(env).empty());
    g.add_edge(b, 0, 2.0);  // duplicate pair
    EXPECT_FALSE(validate_environment(env).empty());
    g.edges.pop_back();
    g.add_edge(b, b, 1.0);  // self-loop
    EXPECT_FALSE(validate_environment(env).empty());
    g.edges.pop_back();
    env.modules[0].doorway = 7;
    EXPECT_FALSE(validate_environment(env).empty());
}

TEST(Validate, NegativeLinkAndForeignNamespace) {
    ModularEnvironment env;
    env.modules = {point_module(1), point_module(2)};
    env.linking = {-1.0};
    EXPECT_FALSE(validate_environment(env).empty());
    env.linking = {0.0};
    EXPECT_TRUE(validate_environment(env).empty());
    env.modules[1].graph.vertices[0].id = "m1/x";
    EXPECT_FALSE(validate_environment(env).empty());
}

TEST(Validate, EmptyEnvironment) { EXPECT_FALSE(validate_environment(ModularEnvironment{}).empty()); }

TEST(Closure, PathSum) {
    const auto d = metric_closure(path_abc());
    EXPECT_DOUBLE_EQ(d(0, 2), 2.0);
    EXPECT_DOUBLE_EQ(d(2, 0), 2.0);
}

TEST(Closure, TriangleShortcut) {
    auto g = path_abc();
    g.add_edge(0, 2, 3.0);
    EXPECT_DOUBLE_EQ(metric_closure(g)(0, 2), 2.0);
}

TEST(Closure, DisconnectedThrows) {
    auto g = path_abc();
    g.add_vertex("m1/z");
    EXPECT_THROW(metric_closure(g), InvalidInput);
}

TEST(Closure, MatchesFloydOracleAndIsMetric) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto n = pick(rng, 2, 14);
        const auto g = random_connected_graph(n, rng);
        const auto d = metric_closure(g);
        const auto oracle = floyd_closure(g);
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v) EXPECT_NEAR(d(u, v), oracle(u, v), 1e-9 * (1 + oracle(u, v)));
        EXPECT_TRUE(d.is_metric());
    }
}

TEST(Closure, TenVertexGraph) {
    std::mt19937_64 rng(10);
    const auto g = random_connected_graph(10, rng);
    const auto d = metric_closure(g), oracle = floyd_closure(g);
    for (std::size_t u = 0; u < 10; ++u)
        for (std::size_t v = 0; v < 10; ++v) EXPECT_NEAR(d(u, v), oracle(u, v), 1e-9);
}

TEST(PrefixCost, Examples) {
    ModularEnvironment env;
    for (int i = 1; i <= 4; ++i) env.modules.push_back(point_module(i));
    env.linking = {20, 20, 20};
    EXPECT_EQ(prefix_link_cost(env, 1), 0.0);
    EXPECT_EQ(prefix_link_cost(env, 3), 40.0);
    EXPECT_THROW(prefix_link_cost(env, 0), InvalidInput);
    EXPECT_THROW(prefix_link_cost(env, 5), InvalidInput);

    const LinkPrefix chain(constant(29, 20.0));
    EXPECT_EQ(chain.to_module(30), 580.0);
}

TEST(PrefixCost, DifferencesAreLinks) {
    std::mt19937_64 rng(3);
    const auto inst = random_line(12, rng);
    const LinkPrefix p(inst.linking);
    for (std::size_t i = 1; i < 12; ++i) EXPECT_NEAR(p.to_module(i + 1) - p.to_module(i), inst.linking[i - 1], 1e-12);
}

TEST(Delta, Examples) {
    ModularEnvironment env;
    for (int i = 1; i <= 30; ++i) env.modules.push_back(point_module(i));
    env.linking = constant(29, 20.0);
    EXPECT_NEAR(delta_index(env, constant(30, 347.0)), 347.0 / 580.0, 1e-12);
    EXPECT_NEAR(delta_index(env, constant(30, 347.0)), 0.59827, 1e-5);

    EXPECT_EQ(delta_index(single_vertex_env(), std::vector<Time>{5.0}), kInfinity);

    ModularEnvironment three;
    for (int i = 1; i <= 3; ++i) three.modules.push_back(point_module(i));
    three.linking = {3, 3};
    EXPECT_DOUBLE_EQ(delta_index(three, std::vector<Time>{1, 2, 3}), 0.5);
    EXPECT_DOUBLE_EQ(delta_index(three, std::vector<Time>{3, 1, 2}), 0.5);  // only the max matters
    three.linking = {0, 0};
    EXPECT_EQ(delta_index(three, std::vector<Time>{1, 2, 3}), kInfinity);
    EXPECT_THROW(delta_index(three, std::vector<Time>{1, 2}), InvalidInput);
}

TEST(EnvFile, RoundTrip) {
    std::mt19937_64 rng(5);
    auto env = random_env({3, 1, 5}, {4.5, 0.0}, rng, "roundtrip");
    env.modules[0].graph.vertices[0].x = 1.25;
    env.modules[0].graph.vertices[0].y = -3.0;
    const auto path = (std::filesystem::temp_directory_path() / "modcover_env_roundtrip.json").string();
    save_environment(env, path);
    EXPECT_EQ(load_environment(path), env);
    EXPECT_EQ(environment_from_text(environment_to_text(env)), env);
    std::filesystem::remove(path);
}

TEST(EnvFile, MalformedTextIsParseError) {
    EXPECT_THROW(environment_from_text("{ \"name\": "), ParseError);
    EXPECT_THROW(environment_from_text("[]"), ParseError);
}

TEST(EnvFile, UnknownFieldRejected) {
    const std::string text = R"({"name":"x","modules":[{"id":1,"doorway":"m1/a","vertices":[{"id":"m1/a"}],
        "edges":[]}],"linking":[],"extra":1})";
    EXPECT_THROW(environment_from_text(text), ParseError);
}

TEST(EnvFile, UnknownVertexNamesField) {
    const std::string text = R"({"name":"x","modules":[{"id":1,"doorway":"m1/zz","vertices":[{"id":"m1/a"}],
        "edges":[]}],"linking":[]})";
    try {
        environment_from_text(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("doorway"), std::string::npos);
    }
}

TEST(EnvFile, NegativeWeightIsValidationError) {
    const std::string text = R"({"name":"x","modules":[{"id":1,"doorway":"m1/a",
        "vertices":[{"id":"m1/a"},{"id":"m1/b"}],"edges":[{"u":"m1/a","v":"m1/b","w":-2}]}],"linking":[]})";
    EXPECT_THROW(environment_from_text(text), InvalidInput);
}

TEST(EnvFile, MissingFile) { EXPECT_THROW(load_environment("/nonexistent/modcover.json"), Error); }
