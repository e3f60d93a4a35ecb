#pragma once

// Comparison algorithms and exhaustive oracles: Frederickson tour splitting
// on the glued environment, brute-force contiguous partitions, and an exact
// multi-robot tour oracle for tiny environments.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "modcover/budget.hpp"
#include "modcover/env_model.hpp"
#include "modcover/error.hpp"
#include "modcover/integer_solver.hpp"
#include "modcover/tsp/tsp.hpp"

namespace modcover {

/// Union of all module graphs plus the doorway links.
struct GluedGraph {
    MetricGraph graph;
    std::size_t depot = 0;
    /// Glued vertex -> (module, module-local vertex).
    std::vector<VertexRef> origin;
    /// First glued index of each module.
    std::vector<std::size_t> offset;
};

inline GluedGraph glue_environment(const ModularEnvironment& env) {
    GluedGraph g;
    for (std::size_t q = 0; q < env.module_count(); ++q) {
        const auto& mod = env.modules[q];
        const auto base = g.graph.size();
        g.offset.push_back(base);
        for (std::size_t v = 0; v < mod.graph.size(); ++v) {
            g.graph.vertices.push_back(mod.graph.vertices[v]);
            g.origin.push_back({q, v});
        }
        for (const auto& e : mod.graph.edges) g.graph.add_edge(base + e.u, base + e.v, e.weight);
    }
    for (std::size_t q = 0; q + 1 < env.module_count(); ++q)
        g.graph.add_edge(g.offset[q] + env.modules[q].doorway, g.offset[q + 1] + env.modules[q + 1].doorway,
                         env.linking[q]);
    g.depot = env.module_count() == 0 ? 0 : g.offset[0] + env.modules[0].doorway;
    return g;
}

/// m closed walks over glued-graph vertices (closure space), each starting
/// and ending at the depot. An idle robot's walk is [depot].
struct MultiTourSolution {
    std::vector<std::vector<std::size_t>> walks;
    std::vector<Time> times;
    Time makespan = 0.0;
    Time total = 0.0;

    [[nodiscard]] std::size_t robots_used() const {
        return static_cast<std::size_t>(
            std::count_if(walks.begin(), walks.end(), [](const auto& w) { return w.size() > 1; }));
    }
};

namespace detail {

inline void finish(MultiTourSolution& sol, const DistanceMatrix& d) {
    sol.times.clear();
    sol.makespan = 0.0;
    sol.total = 0.0;
    for (const auto& w : sol.walks) {
        const Time t = tour_time(d, w);
        sol.times.push_back(t);
        sol.makespan = std::max(sol.makespan, t);
        sol.total += t;
    }
}

}  // namespace detail

/// Frederickson's k-splitour. With L the tour time and c the largest depot
/// distance, cut j ends at the last tour vertex whose prefix time is at
/// most (j/m)(L - 2c) + c. Each piece is closed through the depot.
inline MultiTourSolution k_splitour(const DistanceMatrix& d, const Tour& tour, std::size_t depot, std::size_t m) {
    if (m < 1) throw InvalidInput("k_splitour: robot count must be at least 1");
    const auto anchored = anchor_tour(tour, depot);
    MultiTourSolution sol;
    const auto& seq = anchored.order;
    if (seq.size() <= 1) {
        sol.walks.assign(m, {depot});
        detail::finish(sol, d);
        return sol;
    }
    const std::size_t last_index = seq.size() - 2;  // final element repeats the depot
    Time c_max = 0.0;
    for (std::size_t v = 0; v < d.size(); ++v) c_max = std::max(c_max, d(depot, v));
    const Time length = anchored.time;

    std::vector<Time> prefix(seq.size(), 0.0);
    for (std::size_t p = 1; p < seq.size(); ++p) prefix[p] = prefix[p - 1] + d(seq[p - 1], seq[p]);

    std::size_t start = 1;
    for (std::size_t j = 1; j <= m; ++j) {
        std::size_t end = last_index;
        if (j < m) {
            const Time threshold =
                static_cast<double>(j) / static_cast<double>(m) * (length - 2.0 * c_max) + c_max;
            end = start - 1;
            while (end + 1 <= last_index && prefix[end + 1] <= threshold) ++end;
        }
        std::vector<std::size_t> walk{depot};
        for (std::size_t p = start; p <= end; ++p) walk.push_back(seq[p]);
        if (walk.size() > 1) walk.push_back(depot);
        sol.walks.push_back(std::move(walk));
        start = std::max(start, end + 1);
    }
    detail::finish(sol, d);
    return sol;
}

struct FredericksonOptions {
    TspBackend backend = TspBackend::christofides;
    /// Largest glued graph attempted; its dense closure needs 8 V^2 bytes.
    std::size_t max_vertices = 8000;
    TspOptions tsp;
};

struct FredericksonResult {
    MultiTourSolution solution;
    GluedGraph glued;
    Tour global_tour;
    double tsp_seconds = 0.0;
    double split_seconds = 0.0;
};

/// One TSP over the whole glued environment, split into m depot tours.
inline FredericksonResult frederickson(const ModularEnvironment& env, std::size_t m,
                                       const FredericksonOptions& opts = {}) {
    if (m < 1) throw InvalidInput("frederickson: robot count must be at least 1");
    FredericksonResult res;
    res.glued = glue_environment(env);
    const auto vertices = res.glued.graph.size();
    if (vertices > opts.max_vertices)
        throw CapExceeded("frederickson: glued graph has " + std::to_string(vertices) + " vertices, cap is " +
                          std::to_string(opts.max_vertices));
    Stopwatch tsp_clock;
    const auto closure = metric_closure(res.glued.graph, opts.tsp.deadline);
    res.global_tour = solve_tsp(closure, opts.backend, opts.tsp);
    res.tsp_seconds = tsp_clock.seconds();
    Stopwatch split_clock;
    res.solution = k_splitour(closure, res.global_tour, res.glued.depot, m);
    res.split_seconds = split_clock.seconds();
    return res;
}

/// Exhaustive minimum over every partition of 1..n into at most m
/// contiguous blocks. n <= 14.
inline IntegerSolution brute_force_contiguous(std::span<const Time> linking, std::span<const Time> tau,
                                              std::size_t m) {
    const auto n = tau.size();
    if (n == 0 || linking.size() + 1 != n) throw InvalidInput("brute_force_contiguous: bad instance");
    if (n > 14) throw CapExceeded("brute_force_contiguous: n = " + std::to_string(n) + " exceeds cap 14");
    if (m < 1) throw InvalidInput("brute_force_contiguous: robot count must be at least 1");

    const auto score = [&](std::size_t first, std::size_t last) {
        Time cover = 0.0;
        for (std::size_t h = first; h <= last; ++h) cover += tau[h - 1];
        Time reach = 0.0;
        for (std::size_t h = 1; h < last; ++h) reach += linking[h - 1];
        return cover + 2.0 * reach;
    };

    IntegerSolution best;
    best.makespan = kInfinity;
    // Bit g of `cuts` set: a block ends after module g + 1.
    for (std::uint32_t cuts = 0; cuts < (std::uint32_t{1} << (n - 1)); ++cuts) {
        const auto blocks = static_cast<std::size_t>(__builtin_popcount(cuts)) + 1;
        if (blocks > m) continue;
        IntegerSolution sol;
        std::size_t first = 1;
        for (std::size_t g = 1; g <= n; ++g) {
            if (g == n || (cuts >> (g - 1)) & 1u) {
                sol.robots.push_back({Block{first, g}, score(first, g)});
                first = g + 1;
            }
        }
        sol.makespan = solution_makespan(sol);
        if (sol.makespan < best.makespan) best = std::move(sol);
    }
    while (best.robots.size() < m) best.robots.push_back({std::nullopt, 0.0});
    return best;
}

inline IntegerSolution brute_force_contiguous(const ModularEnvironment& env, std::span<const Time> tau,
                                              std::size_t m) {
    return brute_force_contiguous(std::span<const Time>(env.linking), tau, m);
}

/// True optimal makespan over all vertex partitions and visiting orders on
/// the glued metric closure. At most 9 vertices and 3 robots.
inline MultiTourSolution brute_force_mtsp_tiny(const ModularEnvironment& env, std::size_t m) {
    if (m < 1) throw InvalidInput("brute_force_mtsp_tiny: robot count must be at least 1");
    const auto glued = glue_environment(env);
    const auto V = glued.graph.size();
    if (V > 9 || m > 3)
        throw CapExceeded("brute_force_mtsp_tiny: needs at most 9 vertices and 3 robots (got " +
                          std::to_string(V) + ", " + std::to_string(m) + ")");
    const auto d = metric_closure(glued.graph);
    const auto depot = glued.depot;
    std::vector<std::size_t> others;
    for (std::size_t v = 0; v < V; ++v)
        if (v != depot) others.push_back(v);
    const std::size_t k = others.size();
    const std::size_t full = std::size_t{1} << k;

    // path[S][l]: shortest depot-anchored path through subset S ending at l.
    std::vector<Time> path(full * std::max<std::size_t>(k, 1), kInfinity);
    std::vector<int> parent(full * std::max<std::size_t>(k, 1), -1);
    for (std::size_t l = 0; l < k; ++l) path[(std::size_t{1} << l) * k + l] = d(depot, others[l]);
    for (std::size_t s = 1; s < full; ++s)
        for (std::size_t l = 0; l < k; ++l) {
            if (!(s >> l & 1u) || path[s * k + l] == kInfinity) continue;
            for (std::size_t nx = 0; nx < k; ++nx) {
                if (s >> nx & 1u) continue;
                const auto grown = s | (std::size_t{1} << nx);
                const Time c = path[s * k + l] + d(others[l], others[nx]);
                if (c < path[grown * k + nx]) {
                    path[grown * k + nx] = c;
                    parent[grown * k + nx] = static_cast<int>(l);
                }
            }
        }
    std::vector<Time> closed(full, 0.0);
    std::vector<int> closing(full, -1);
    for (std::size_t s = 1; s < full; ++s) {
        closed[s] = kInfinity;
        for (std::size_t l = 0; l < k; ++l) {
            if (!(s >> l & 1u)) continue;
            const Time c = path[s * k + l] + d(others[l], depot);
            if (c < closed[s]) {
                closed[s] = c;
                closing[s] = static_cast<int>(l);
            }
        }
    }
    const auto walk_of = [&](std::size_t s) {
        std::vector<std::size_t> rev;
        if (s == 0) return std::vector<std::size_t>{depot};
        int l = closing[s];
        std::size_t set = s;
        while (l >= 0) {
            rev.push_back(others[static_cast<std::size_t>(l)]);
            const int p = parent[set * k + static_cast<std::size_t>(l)];
            set &= ~(std::size_t{1} << l);
            l = p;
        }
        std::vector<std::size_t> w{depot};
        w.insert(w.end(), rev.rbegin(), rev.rend());
        w.push_back(depot);
        return w;
    };

    // best[r][S]: optimal makespan covering S with r robots.
    const std::size_t all = full - 1;
    std::vector<std::vector<Time>> best(m + 1, std::vector<Time>(full, kInfinity));
    std::vector<std::vector<std::size_t>> pick(m + 1, std::vector<std::size_t>(full, 0));
    for (std::size_t s = 0; s < full; ++s) {
        best[1][s] = closed[s];
        pick[1][s] = s;
    }
    for (std::size_t r = 2; r <= m; ++r)
        for (std::size_t s = 0; s < full; ++s) {
            // Enumerate the submask handled by one robot, including empty.
            for (std::size_t sub = s;; sub = (sub - 1) & s) {
                const Time c = std::max(closed[sub], best[r - 1][s & ~sub]);
                if (c < best[r][s]) {
                    best[r][s] = c;
                    pick[r][s] = sub;
                }
                if (sub == 0) break;
            }
        }

    MultiTourSolution sol;
    std::size_t rest = all;
    for (std::size_t r = m; r >= 1; --r) {
        const auto sub = pick[r][rest];
        sol.walks.push_back(walk_of(sub));
        rest &= ~sub;
    }
    detail::finish(sol, d);
    return sol;
}

}  // namespace modcover
