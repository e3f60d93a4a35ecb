#pragma once

// Linear modular environments: module graphs, their metric closures, the
// doorway chain that links them, and the shape index of an instance.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "modcover/budget.hpp"
#include "modcover/error.hpp"

namespace modcover {

using Time = double;

inline constexpr Time kInfinity = std::numeric_limits<Time>::infinity();

struct Vertex {
    std::string id;
    std::optional<double> x;
    std::optional<double> y;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    Time weight = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted undirected graph with string-identified vertices. Edges refer
/// to vertices by position in `vertices`.
struct MetricGraph {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;

    [[nodiscard]] std::size_t size() const { return vertices.size(); }

    std::size_t add_vertex(std::string id, std::optional<double> x = std::nullopt,
                           std::optional<double> y = std::nullopt) {
        vertices.push_back({std::move(id), x, y});
        return vertices.size() - 1;
    }

    void add_edge(std::size_t u, std::size_t v, Time w) { edges.push_back({u, v, w}); }

    [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const {
        for (std::size_t i = 0; i < vertices.size(); ++i)
            if (vertices[i].id == id) return i;
        return std::nullopt;
    }

    /// Adjacency lists of (neighbor, weight); edges with bad endpoints are skipped.
    [[nodiscard]] std::vector<std::vector<std::pair<std::size_t, Time>>> adjacency() const {
        std::vector<std::vector<std::pair<std::size_t, Time>>> adj(vertices.size());
        for (const auto& e : edges) {
            if (e.u >= adj.size() || e.v >= adj.size()) continue;
            adj[e.u].emplace_back(e.v, e.weight);
            adj[e.v].emplace_back(e.u, e.weight);
        }
        return adj;
    }

    [[nodiscard]] bool connected() const {
        if (vertices.empty()) return false;
        const auto adj = adjacency();
        std::vector<char> seen(vertices.size(), 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (const auto& [v, w] : adj[u]) {
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == vertices.size();
    }

    friend bool operator==(const MetricGraph&, const MetricGraph&) = default;
};

/// Dense symmetric matrix of shortest-path travel times.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n, Time fill = 0.0) : n_(n), d_(n * n, fill) {}

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] Time operator()(std::size_t u, std::size_t v) const { return d_[u * n_ + v]; }
    Time& at(std::size_t u, std::size_t v) { return d_[u * n_ + v]; }

    /// Distances restricted to `subset`, in the given order.
    [[nodiscard]] DistanceMatrix sub_matrix(std::span<const std::size_t> subset) const {
        DistanceMatrix out(subset.size());
        for (std::size_t a = 0; a < subset.size(); ++a)
            for (std::size_t b = 0; b < subset.size(); ++b) out.at(a, b) = (*this)(subset[a], subset[b]);
        return out;
    }

    /// Symmetric, zero diagonal, positive off-diagonal, triangle inequality
    /// (relative slack `rel_tol`).
    [[nodiscard]] bool is_metric(double rel_tol = 1e-9) const {
        for (std::size_t u = 0; u < n_; ++u) {
            if ((*this)(u, u) != 0.0) return false;
            for (std::size_t v = 0; v < n_; ++v) {
                if ((*this)(u, v) != (*this)(v, u)) return false;
                if (u != v && !((*this)(u, v) > 0.0)) return false;
            }
        }
        for (std::size_t u = 0; u < n_; ++u)
            for (std::size_t v = 0; v < n_; ++v)
                for (std::size_t w = 0; w < n_; ++w) {
                    const Time direct = (*this)(u, w);
                    const Time via = (*this)(u, v) + (*this)(v, w);
                    if (direct > via * (1.0 + rel_tol)) return false;
                }
        return true;
    }

private:
    std::size_t n_ = 0;
    std::vector<Time> d_;
};

struct ModuleSpec {
    int id = 1;
    MetricGraph graph;
    std::size_t doorway = 0;

    friend bool operator==(const ModuleSpec&, const ModuleSpec&) = default;
};

/// Modules G_1..G_n in linking order; linking[i] is the travel time between
/// the doorways of modules i+1 and i+2 (1-based). The depot is the doorway
/// of the first module.
struct ModularEnvironment {
    std::string name;
    std::vector<ModuleSpec> modules;
    std::vector<Time> linking;

    [[nodiscard]] std::size_t module_count() const { return modules.size(); }

    friend bool operator==(const ModularEnvironment&, const ModularEnvironment&) = default;
};

/// Namespace prefix of vertex ids in module `module_id`, e.g. "m3/".
inline std::string vertex_prefix(int module_id) { return "m" + std::to_string(module_id) + "/"; }

/// Every invariant violation, one message per problem. Empty means valid.
inline std::vector<std::string> validate_environment(const ModularEnvironment& env) {
    std::vector<std::string> out;
    const auto n = env.modules.size();
    if (n == 0) out.emplace_back("environment has no modules");
    if (n > 0 && env.linking.size() != n - 1)
        out.push_back("linking has " + std::to_string(env.linking.size()) + " entries, expected " +
                      std::to_string(n - 1));
    for (std::size_t i = 0; i < env.linking.size(); ++i) {
        const auto w = env.linking[i];
        if (!std::isfinite(w) || w < 0.0)
            out.push_back("linking[" + std::to_string(i) + "] is negative or not finite");
    }

    std::unordered_map<std::string, std::size_t> owner;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& mod = env.modules[k];
        const std::string tag = "module " + std::to_string(k + 1);
        if (mod.id != static_cast<int>(k + 1))
            out.push_back(tag + " has id " + std::to_string(mod.id) + ", expected " + std::to_string(k + 1));
        const auto& g = mod.graph;
        if (g.vertices.empty()) {
            out.push_back(tag + " has no vertices");
            continue;
        }
        const auto prefix = vertex_prefix(mod.id);
        std::unordered_set<std::string> ids;
        for (const auto& v : g.vertices) {
            if (!ids.insert(v.id).second) out.push_back(tag + " repeats vertex id '" + v.id + "'");
            if (v.id.rfind(prefix, 0) != 0 || v.id.size() == prefix.size())
                out.push_back(tag + " vertex '" + v.id + "' is not namespaced as '" + prefix + "<name>'");
            const auto [it, fresh] = owner.emplace(v.id, k);
            if (!fresh && it->second != k)
                out.push_back(tag + " vertex '" + v.id + "' also appears in module " + std::to_string(it->second + 1));
        }
        if (mod.doorway >= g.size()) out.push_back(tag + " doorway is not a vertex of the module");

        bool edges_ok = true;
        std::unordered_set<std::size_t> pairs;
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            const auto& edge = g.edges[e];
            const std::string etag = tag + " edge " + std::to_string(e);
            if (edge.u >= g.size() || edge.v >= g.size()) {
                out.push_back(etag + " references an unknown vertex");
                edges_ok = false;
                continue;
            }
            if (edge.u == edge.v) out.push_back(etag + " is a self-loop");
            const auto key = std::min(edge.u, edge.v) * g.size() + std::max(edge.u, edge.v);
            if (!pairs.insert(key).second) out.push_back(etag + " duplicates an earlier edge");
            if (!std::isfinite(edge.weight) || !(edge.weight > 0.0))
                out.push_back(etag + " has non-positive or non-finite weight");
        }
        if (edges_ok && !g.connected()) out.push_back(tag + " disconnected");
    }
    return out;
}

/// All-pairs shortest-path closure of a connected graph (Dijkstra from every
/// vertex; graphs here are sparse).
inline DistanceMatrix metric_closure(const MetricGraph& g, const Deadline& deadline = Deadline::none()) {
    const auto n = g.size();
    if (n == 0) throw InvalidInput("metric_closure: empty graph");
    const auto adj = g.adjacency();
    DistanceMatrix d(n, kInfinity);
    using Item = std::pair<Time, std::size_t>;
    std::vector<Time> dist(n);
    for (std::size_t s = 0; s < n; ++s) {
        if ((s & 63) == 0) deadline.check("metric_closure");
        std::fill(dist.begin(), dist.end(), kInfinity);
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[s] = 0.0;
        pq.emplace(0.0, s);
        while (!pq.empty()) {
            const auto [du, u] = pq.top();
            pq.pop();
            if (du > dist[u]) continue;
            for (const auto& [v, w] : adj[u]) {
                const Time nd = du + w;
                if (nd < dist[v]) {
                    dist[v] = nd;
                    pq.emplace(nd, v);
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (dist[v] == kInfinity) throw InvalidInput("metric_closure: graph is disconnected");
            d.at(s, v) = dist[v];
        }
    }
    // Dijkstra from u and from v can round differently; keep the matrix
    // exactly symmetric.
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) {
            const Time m = std::min(d(u, v), d(v, u));
            d.at(u, v) = m;
            d.at(v, u) = m;
        }
    return d;
}

/// O(1) queries of the doorway-chain travel time from the depot.
class LinkPrefix {
public:
    LinkPrefix() = default;
    explicit LinkPrefix(std::span<const Time> linking) : prefix_(linking.size() + 1, 0.0) {
        for (std::size_t h = 0; h < linking.size(); ++h) prefix_[h + 1] = prefix_[h] + linking[h];
    }
    explicit LinkPrefix(const ModularEnvironment& env) : LinkPrefix(std::span<const Time>(env.linking)) {}

    /// Travel time from d_1 to d_i, i.e. the sum of the first i-1 links (1-based i).
    [[nodiscard]] Time to_module(std::size_t i) const {
        if (i < 1 || i > prefix_.size())
            throw InvalidInput("module index " + std::to_string(i) + " out of range [1, " +
                               std::to_string(prefix_.size()) + "]");
        return prefix_[i - 1];
    }

    [[nodiscard]] Time total() const { return prefix_.back(); }
    [[nodiscard]] std::size_t module_count() const { return prefix_.size(); }

private:
    std::vector<Time> prefix_{0.0};
};

inline Time prefix_link_cost(const ModularEnvironment& env, std::size_t i) {
    return LinkPrefix(env).to_module(i);
}

/// max_i tau(i) / sum of all links. Returns +inf when the link sum is zero
/// (including n = 1): the "wide" limit is a legal regime.
inline double delta_index(const ModularEnvironment& env, std::span<const Time> tau) {
    if (tau.size() != env.modules.size())
        throw InvalidInput("delta_index: cost table has " + std::to_string(tau.size()) + " entries for " +
                           std::to_string(env.modules.size()) + " modules");
    Time link_sum = 0.0;
    for (auto w : env.linking) link_sum += w;
    if (!(link_sum > 0.0)) return kInfinity;
    Time max_tau = 0.0;
    for (auto t : tau) max_tau = std::max(max_tau, t);
    return max_tau / link_sum;
}

}  // namespace modcover
