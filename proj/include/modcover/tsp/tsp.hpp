#pragma once

// Single-module TSP backends on a metric closure: Held-Karp (exact),
// Christofides (3/2-approximate) and nearest-neighbour + 2-opt. Tours are
// closed vertex sequences in closure space.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "modcover/budget.hpp"
#include "modcover/env_model.hpp"
#include "modcover/error.hpp"
#include "modcover/tsp/matching.hpp"

namespace modcover {

/// Closed walk v_0, ..., v_k with v_0 == v_k. A single-vertex tour is [v_0].
struct Tour {
    std::vector<std::size_t> order;
    Time time = 0.0;
};

inline Time tour_time(const DistanceMatrix& d, std::span<const std::size_t> order) {
    Time t = 0.0;
    for (std::size_t i = 1; i < order.size(); ++i) t += d(order[i - 1], order[i]);
    return t;
}

/// Closed, visits every vertex of `d`, and the stored time matches the hop sum.
inline bool tour_is_consistent(const DistanceMatrix& d, const Tour& tour, double rel_tol = 1e-9) {
    if (tour.order.empty()) return false;
    if (tour.order.front() != tour.order.back()) return false;
    std::vector<char> seen(d.size(), 0);
    for (auto v : tour.order) {
        if (v >= d.size()) return false;
        seen[v] = 1;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return false;
    const Time recomputed = tour_time(d, tour.order);
    return std::abs(recomputed - tour.time) <= rel_tol * std::max(1.0, std::abs(recomputed));
}

enum class TspBackend { exact, christofides, greedy };

inline std::string_view to_string(TspBackend b) {
    switch (b) {
        case TspBackend::exact: return "exact";
        case TspBackend::christofides: return "christofides";
        case TspBackend::greedy: return "greedy";
    }
    return "?";
}

inline TspBackend parse_backend(std::string_view name) {
    if (name == "exact") return TspBackend::exact;
    if (name == "christofides") return TspBackend::christofides;
    if (name == "greedy") return TspBackend::greedy;
    throw InvalidInput("unknown TSP backend '" + std::string(name) + "'");
}

struct TspOptions {
    /// Largest instance Held-Karp accepts.
    std::size_t held_karp_cap = 15;
    Deadline deadline;
};

namespace detail {

inline Tour closed_tour(const DistanceMatrix& d, std::vector<std::size_t> open_order) {
    if (open_order.size() > 1) open_order.push_back(open_order.front());
    Tour t{std::move(open_order), 0.0};
    t.time = tour_time(d, t.order);
    return t;
}

}  // namespace detail

/// Exact tour by subset dynamic programming; O(2^n n^2). Starts at vertex 0.
inline Tour held_karp(const DistanceMatrix& d, const TspOptions& opts = {}) {
    const auto n = d.size();
    if (n == 0) throw InvalidInput("held_karp: empty matrix");
    if (n > opts.held_karp_cap || n > 24)
        throw CapExceeded("held_karp: " + std::to_string(n) + " vertices exceeds the exact-backend cap of " +
                          std::to_string(opts.held_karp_cap) + "; use the christofides backend");
    if (n == 1) return {{0}, 0.0};
    if (n == 2) return detail::closed_tour(d, {0, 1});

    // Vertex 0 is the fixed start; subsets range over vertices 1..n-1.
    const std::size_t m = n - 1;
    const std::size_t full = (std::size_t{1} << m);
    std::vector<Time> cost(full * m, kInfinity);
    std::vector<std::uint8_t> parent(full * m, 0xff);
    for (std::size_t v = 0; v < m; ++v) cost[(std::size_t{1} << v) * m + v] = d(0, v + 1);
    for (std::size_t set = 1; set < full; ++set) {
        if ((set & 1023) == 0) opts.deadline.check("held_karp");
        for (std::size_t last = 0; last < m; ++last) {
            if (!(set & (std::size_t{1} << last))) continue;
            const Time base = cost[set * m + last];
            if (base == kInfinity) continue;
            for (std::size_t next = 0; next < m; ++next) {
                if (set & (std::size_t{1} << next)) continue;
                const std::size_t grown = set | (std::size_t{1} << next);
                const Time c = base + d(last + 1, next + 1);
                if (c < cost[grown * m + next]) {
                    cost[grown * m + next] = c;
                    parent[grown * m + next] = static_cast<std::uint8_t>(last);
                }
            }
        }
    }
    const std::size_t all = full - 1;
    Time best = kInfinity;
    std::size_t best_last = 0;
    for (std::size_t last = 0; last < m; ++last) {
        const Time c = cost[all * m + last] + d(last + 1, 0);
        if (c < best) {
            best = c;
            best_last = last;
        }
    }
    std::vector<std::size_t> rev;
    std::size_t set = all;
    std::size_t cur = best_last;
    while (true) {
        rev.push_back(cur + 1);
        const auto p = parent[set * m + cur];
        set &= ~(std::size_t{1} << cur);
        if (p == 0xff) break;
        cur = p;
    }
    std::vector<std::size_t> order{0};
    order.insert(order.end(), rev.rbegin(), rev.rend());
    return detail::closed_tour(d, std::move(order));
}

/// Prim's MST on the complete graph of `d`; ties go to the lower vertex
/// index. Returns parent[v] (parent[0] = 0).
inline std::vector<std::size_t> minimum_spanning_tree(const DistanceMatrix& d, const Deadline& deadline = {}) {
    const auto n = d.size();
    std::vector<std::size_t> parent(n, 0);
    std::vector<Time> key(n, kInfinity);
    std::vector<char> in_tree(n, 0);
    key[0] = 0.0;
    for (std::size_t it = 0; it < n; ++it) {
        if ((it & 255) == 0) deadline.check("minimum_spanning_tree");
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!in_tree[v] && (u == n || key[v] < key[u])) u = v;
        in_tree[u] = 1;
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const Time w = d(u, v);
            if (w < key[v]) {
                key[v] = w;
                parent[v] = u;
            }
        }
    }
    return parent;
}

/// Christofides: MST, exact minimum-weight perfect matching on the odd-degree
/// vertices, Euler circuit from vertex 0, then shortcut repeated vertices.
inline Tour christofides(const DistanceMatrix& d, const TspOptions& opts = {}) {
    const auto n = d.size();
    if (n == 0) throw InvalidInput("christofides: empty matrix");
    if (n == 1) return {{0}, 0.0};
    if (n == 2) return detail::closed_tour(d, {0, 1});

    const auto parent = minimum_spanning_tree(d, opts.deadline);
    std::vector<std::vector<std::size_t>> multigraph(n);
    for (std::size_t v = 1; v < n; ++v) {
        multigraph[v].push_back(parent[v]);
        multigraph[parent[v]].push_back(v);
    }
    std::vector<std::size_t> odd;
    for (std::size_t v = 0; v < n; ++v)
        if (multigraph[v].size() % 2 == 1) odd.push_back(v);
    for (const auto& [a, b] : min_weight_perfect_matching(d, odd, opts.deadline)) {
        multigraph[a].push_back(b);
        multigraph[b].push_back(a);
    }

    // Hierholzer over an edge list so parallel edges are handled.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> incident(n);
    std::size_t edge_id = 0;
    for (std::size_t u = 0; u < n; ++u)
        for (auto v : multigraph[u])
            if (u < v) {
                incident[u].emplace_back(v, edge_id);
                incident[v].emplace_back(u, edge_id);
                ++edge_id;
            }
    for (auto& list : incident) std::sort(list.begin(), list.end());
    std::vector<char> used(edge_id, 0);
    std::vector<std::size_t> cursor(n, 0);
    std::vector<std::size_t> stack{0};
    std::vector<std::size_t> circuit;
    while (!stack.empty()) {
        const auto u = stack.back();
        auto& cur = cursor[u];
        while (cur < incident[u].size() && used[incident[u][cur].second]) ++cur;
        if (cur == incident[u].size()) {
            circuit.push_back(u);
            stack.pop_back();
        } else {
            const auto [v, id] = incident[u][cur];
            used[id] = 1;
            stack.push_back(v);
        }
    }

    std::vector<char> visited(n, 0);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (auto it = circuit.rbegin(); it != circuit.rend(); ++it) {
        if (!visited[*it]) {
            visited[*it] = 1;
            order.push_back(*it);
        }
    }
    return detail::closed_tour(d, std::move(order));
}

/// Nearest neighbour from vertex 0, then 2-opt until no improving move.
inline Tour greedy_tour(const DistanceMatrix& d, const TspOptions& opts = {}) {
    const auto n = d.size();
    if (n == 0) throw InvalidInput("greedy_tour: empty matrix");
    if (n <= 3) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        return detail::closed_tour(d, std::move(order));
    }
    std::vector<std::size_t> order{0};
    std::vector<char> used(n, 0);
    used[0] = 1;
    for (std::size_t step = 1; step < n; ++step) {
        const auto u = order.back();
        std::size_t best = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!used[v] && (best == n || d(u, v) < d(u, best))) best = v;
        used[best] = 1;
        order.push_back(best);
    }
    bool improved = true;
    while (improved) {
        opts.deadline.check("greedy_tour");
        improved = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 2; j < n; ++j) {
                const auto a = order[i], b = order[i + 1];
                const auto c = order[j], e = order[(j + 1) % n];
                if (a == e) continue;
                const Time gain = d(a, b) + d(c, e) - d(a, c) - d(b, e);
                if (gain > 1e-12 * (d(a, b) + d(c, e))) {
                    std::reverse(order.begin() + static_cast<long>(i) + 1, order.begin() + static_cast<long>(j) + 1);
                    improved = true;
                }
            }
        }
    }
    return detail::closed_tour(d, std::move(order));
}

inline Tour solve_tsp(const DistanceMatrix& d, TspBackend backend, const TspOptions& opts = {}) {
    switch (backend) {
        case TspBackend::exact: return held_karp(d, opts);
        case TspBackend::christofides: return christofides(d, opts);
        case TspBackend::greedy: return greedy_tour(d, opts);
    }
    throw InternalError("solve_tsp: unknown backend");
}

/// Rotates a closed tour so it starts and ends at `anchor`.
inline Tour anchor_tour(const Tour& tour, std::size_t anchor) {
    if (tour.order.size() <= 1) return tour;
    std::vector<std::size_t> open(tour.order.begin(), tour.order.end() - 1);
    const auto it = std::find(open.begin(), open.end(), anchor);
    if (it == open.end()) throw InvalidInput("anchor_tour: anchor not on tour");
    std::rotate(open.begin(), it, open.end());
    open.push_back(anchor);
    return {std::move(open), tour.time};
}

/// Coverage of one module: tau and the tour anchored at the doorway, in the
/// module's vertex indices (closure space).
struct ModuleCoverage {
    Time tau = 0.0;
    Tour tour;
};

inline ModuleCoverage module_coverage_time(const ModuleSpec& module, TspBackend backend,
                                           const TspOptions& opts = {}) {
    const auto closure = metric_closure(module.graph, opts.deadline);
    const auto tour = solve_tsp(closure, backend, opts);
    // Rotation preserves the cyclic hop sum, so tau is the backend's time.
    return {tour.time, anchor_tour(tour, module.doorway)};
}

/// Per-module coverage times for a whole environment.
struct CoverageCostTable {
    std::vector<Time> tau;
    TspBackend backend = TspBackend::christofides;
    /// Anchored tours, parallel to `tau`.
    std::vector<Tour> tours;
    /// Number of distinct TSP computations performed.
    std::size_t tsp_runs = 0;
};

/// Structural key of a module graph ignoring ids and doorway; equal keys mean
/// the TSP backend sees the same closure.
inline std::string module_fingerprint(const ModuleSpec& module) {
    std::string key;
    const auto append = [&key](double v) {
        key.append(reinterpret_cast<const char*>(&v), sizeof v);
    };
    key += std::to_string(module.graph.size()) + ":";
    for (const auto& e : module.graph.edges) {
        key += std::to_string(e.u) + "," + std::to_string(e.v) + ",";
        append(e.weight);
    }
    return key;
}

/// Computes tau for every module. With `dedupe`, structurally identical
/// modules share one TSP run and only re-anchor its tour.
inline CoverageCostTable compute_coverage_costs(const ModularEnvironment& env, TspBackend backend, bool dedupe,
                                                const TspOptions& opts = {}) {
    CoverageCostTable table;
    table.backend = backend;
    table.tau.reserve(env.modules.size());
    table.tours.reserve(env.modules.size());
    std::map<std::string, Tour> cache;
    for (const auto& module : env.modules) {
        if (dedupe) {
            const auto key = module_fingerprint(module);
            auto it = cache.find(key);
            if (it == cache.end()) {
                const auto closure = metric_closure(module.graph, opts.deadline);
                it = cache.emplace(key, solve_tsp(closure, backend, opts)).first;
                ++table.tsp_runs;
            }
            table.tau.push_back(it->second.time);
            table.tours.push_back(anchor_tour(it->second, module.doorway));
        } else {
            auto cov = module_coverage_time(module, backend, opts);
            ++table.tsp_runs;
            table.tau.push_back(cov.tau);
            table.tours.push_back(std::move(cov.tour));
        }
    }
    return table;
}

}  // namespace modcover
