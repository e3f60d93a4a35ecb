#pragma once

// Independent oracles and random instance builders shared by the unit and
// acceptance suites. Oracles deliberately avoid the library's algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "modcover/baselines.hpp"
#include "modcover/env_model.hpp"
#include "modcover/integer_solver.hpp"
#include "modcover/tsp/tsp.hpp"

namespace testing_support {

using namespace modcover;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Euclidean distances between random points in a 100 x 100 square.
inline DistanceMatrix random_euclidean(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::pair<double, double>> pts(n);
    for (auto& p : pts) p = {uniform(rng, 0, 100), uniform(rng, 0, 100)};
    DistanceMatrix d(n);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            d.at(u, v) = u == v ? 0.0 : std::hypot(pts[u].first - pts[v].first, pts[u].second - pts[v].second);
    return d;
}

/// Random connected graph: a random spanning tree plus extra edges.
inline MetricGraph random_connected_graph(std::size_t n, std::mt19937_64& rng, int module_id = 1,
                                          double extra_fraction = 0.3) {
    MetricGraph g;
    for (std::size_t v = 0; v < n; ++v) g.add_vertex(vertex_prefix(module_id) + "v" + std::to_string(v));
    std::vector<std::vector<char>> has(n, std::vector<char>(n, 0));
    for (std::size_t v = 1; v < n; ++v) {
        const auto u = pick(rng, 0, v - 1);
        g.add_edge(u, v, uniform(rng, 0.5, 20.0));
        has[u][v] = has[v][u] = 1;
    }
    const auto extra = static_cast<std::size_t>(extra_fraction * static_cast<double>(n * n) / 2.0);
    for (std::size_t e = 0; e < extra && n > 2; ++e) {
        const auto u = pick(rng, 0, n - 1), v = pick(rng, 0, n - 1);
        if (u == v || has[u][v]) continue;
        g.add_edge(u, v, uniform(rng, 0.5, 20.0));
        has[u][v] = has[v][u] = 1;
    }
    return g;
}

/// All-pairs shortest paths by Floyd-Warshall relaxation.
inline DistanceMatrix floyd_closure(const MetricGraph& g) {
    const auto n = g.size();
    DistanceMatrix d(n, kInfinity);
    for (std::size_t v = 0; v < n; ++v) d.at(v, v) = 0.0;
    for (const auto& e : g.edges) {
        d.at(e.u, e.v) = std::min(d(e.u, e.v), e.weight);
        d.at(e.v, e.u) = std::min(d(e.v, e.u), e.weight);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d.at(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    return d;
}

/// Optimal closed tour time by trying every permutation with vertex 0 fixed.
inline Time permutation_tsp(const DistanceMatrix& d) {
    const auto n = d.size();
    if (n <= 1) return 0.0;
    std::vector<std::size_t> rest(n - 1);
    std::iota(rest.begin(), rest.end(), 1);
    Time best = kInfinity;
    do {
        Time t = d(0, rest.front()) + d(rest.back(), 0);
        for (std::size_t s = 1; s < rest.size(); ++s) t += d(rest[s - 1], rest[s]);
        best = std::min(best, t);
    } while (std::next_permutation(rest.begin(), rest.end()));
    return best;
}

/// Minimum total weight over every perfect pairing of `set`.
inline Time best_pairing(const DistanceMatrix& d, std::vector<std::size_t> set, std::size_t* count = nullptr) {
    if (set.empty()) {
        if (count) ++*count;
        return 0.0;
    }
    const auto first = set.front();
    Time best = kInfinity;
    for (std::size_t p = 1; p < set.size(); ++p) {
        std::vector<std::size_t> rest;
        for (std::size_t q = 1; q < set.size(); ++q)
            if (q != p) rest.push_back(set[q]);
        best = std::min(best, d(first, set[p]) + best_pairing(d, rest, count));
    }
    return best;
}

/// Split value by inspecting every h in [i-1, j].
inline Time linear_split_value(std::size_t i, std::size_t j, std::size_t k, const SplitTable& table) {
    Time best = kInfinity;
    for (std::size_t h = i - 1; h <= j; ++h)
        best = std::min(best, std::max(table.f(i, h, k / 2), table.f(h + 1, j, (k + 1) / 2)));
    return best;
}

struct LineInstance {
    std::vector<Time> tau;
    std::vector<Time> linking;
};

inline LineInstance random_line(std::size_t n, std::mt19937_64& rng, double tau_max = 100.0,
                                double link_max = 50.0) {
    LineInstance inst;
    for (std::size_t i = 0; i < n; ++i) {
        // tau in (0, tau_max]
        inst.tau.push_back(tau_max - uniform(rng, 0.0, tau_max));
        if (inst.tau.back() <= 0.0) inst.tau.back() = tau_max;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) inst.linking.push_back(uniform(rng, 0.0, link_max));
    return inst;
}

/// Module made of a single vertex.
inline ModuleSpec point_module(int id) {
    ModuleSpec m;
    m.id = id;
    m.graph.add_vertex(vertex_prefix(id) + "d");
    return m;
}

/// Random connected module with `vertices` vertices and a random doorway.
inline ModuleSpec random_module(int id, std::size_t vertices, std::mt19937_64& rng) {
    ModuleSpec m;
    m.id = id;
    m.graph = random_connected_graph(vertices, rng, id, 0.4);
    m.doorway = pick(rng, 0, vertices - 1);
    return m;
}

/// Environment from per-module vertex counts and links.
inline ModularEnvironment random_env(const std::vector<std::size_t>& sizes, const std::vector<Time>& linking,
                                     std::mt19937_64& rng, std::string name = "test") {
    ModularEnvironment env;
    env.name = std::move(name);
    for (std::size_t q = 0; q < sizes.size(); ++q)
        env.modules.push_back(random_module(static_cast<int>(q + 1), sizes[q], rng));
    env.linking = linking;
    return env;
}

/// Tiny environment for the exhaustive multi-robot oracle: at most
/// `max_vertices` vertices over 1..4 modules.
inline ModularEnvironment random_tiny_env(std::mt19937_64& rng, std::size_t max_vertices = 9) {
    const auto n = pick(rng, 1, 4);
    std::vector<std::size_t> sizes(n, 1);
    std::size_t total = n;
    while (total < max_vertices && uniform(rng, 0, 1) < 0.8) {
        ++sizes[pick(rng, 0, n - 1)];
        ++total;
    }
    std::vector<Time> linking;
    for (std::size_t i = 0; i + 1 < n; ++i) linking.push_back(uniform(rng, 0.0, 1.0) < 0.15 ? 0.0 : uniform(rng, 0.5, 30));
    return random_env(sizes, linking, rng, "tiny");
}

/// Identical point-like modules with a fixed coverage time cannot be built
/// from graphs directly, so line tests pass tau explicitly.
inline std::vector<Time> constant(std::size_t n, Time v) { return std::vector<Time>(n, v); }

}  // namespace testing_support
