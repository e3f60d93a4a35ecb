#pragma once

// Optimal integer (contiguous-block) solutions of the modular multi-robot
// coverage problem.
//
// f(i, j, k) is the best makespan for k robots covering modules i..j in
// whole blocks, every tour starting and ending at the depot d_1. A team of k
// robots splits at some module h into floor(k/2) robots for [i, h] and
// ceil(k/2) robots for [h+1, j]. Only the robot counts reachable from m by
// repeated halving are ever needed, and because f(i, h, .) is non-decreasing
// and f(h+1, j, .) non-increasing in h, the best split is found by binary
// search on their crossover.
//
// Balanced halving loses nothing: any optimal partition into at most k
// contiguous blocks can be cut after its floor(k/2)-th block, and both sides
// are again partitions with few enough blocks (empty halves allowed).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "modcover/budget.hpp"
#include "modcover/env_model.hpp"
#include "modcover/error.hpp"
#include "modcover/tsp/tsp.hpp"

namespace modcover {

/// All robot counts met when recursively splitting m into floor(k/2) and
/// ceil(k/2) down to 1, in ascending order. At most two distinct values per
/// level since floor(ceil(k/2)/2) == ceil(floor(k/2)/2).
inline std::vector<std::size_t> needed_robot_counts(std::size_t m) {
    if (m < 1) throw InvalidInput("needed_robot_counts: robot count must be at least 1");
    std::set<std::size_t> out;
    std::set<std::size_t> level{m};
    while (!level.empty()) {
        if (level.size() > 2) throw InternalError("needed_robot_counts: halving produced more than two counts");
        std::set<std::size_t> next;
        for (auto k : level) {
            out.insert(k);
            if (k >= 2) {
                next.insert(k / 2);
                next.insert((k + 1) / 2);
            }
        }
        level = std::move(next);
    }
    return {out.begin(), out.end()};
}

/// Memo of f(i, j, k) and the chosen split points, for 1-based modules.
/// Empty intervals f(i, i-1, k) are 0. Cells not computed read as NaN.
class SplitTable {
public:
    SplitTable() = default;
    SplitTable(std::size_t module_count, std::span<const std::size_t> robot_counts) : n_(module_count) {
        for (auto k : robot_counts) add_layer(k);
    }

    [[nodiscard]] std::size_t module_count() const { return n_; }

    [[nodiscard]] std::vector<std::size_t> robot_counts() const {
        std::vector<std::size_t> out;
        for (const auto& [k, layer] : layers_) out.push_back(k);
        return out;
    }

    [[nodiscard]] bool has(std::size_t k) const { return layers_.count(k) != 0; }

    /// f(i, j, k); j may be i - 1 (empty interval).
    [[nodiscard]] Time f(std::size_t i, std::size_t j, std::size_t k) const {
        const auto& layer = get(k);
        return layer.value[index(i, j)];
    }

    /// Stored split point h of cell (i, j, k), or -1 if none.
    [[nodiscard]] long split(std::size_t i, std::size_t j, std::size_t k) const {
        return get(k).split[index(i, j)];
    }

    [[nodiscard]] bool computed(std::size_t i, std::size_t j, std::size_t k) const {
        return has(k) && !std::isnan(f(i, j, k));
    }

    void set(std::size_t i, std::size_t j, std::size_t k, Time value, long h) {
        auto& layer = get_mut(k);
        layer.value[index(i, j)] = value;
        layer.split[index(i, j)] = h;
    }

    void add_layer(std::size_t k) {
        if (k < 1) throw InvalidInput("SplitTable: robot count must be at least 1");
        if (has(k)) return;
        Layer layer;
        layer.value.assign((n_ + 2) * (n_ + 1), std::numeric_limits<Time>::quiet_NaN());
        layer.split.assign((n_ + 2) * (n_ + 1), -1);
        for (std::size_t i = 1; i <= n_ + 1; ++i) layer.value[(i * (n_ + 1)) + (i - 1)] = 0.0;
        layers_.emplace(k, std::move(layer));
    }

private:
    struct Layer {
        std::vector<Time> value;
        std::vector<long> split;
    };

    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const {
        if (i < 1 || i > n_ + 1 || j + 1 < i || j > n_)
            throw InternalError("SplitTable: cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") out of range");
        return i * (n_ + 1) + j;
    }
    [[nodiscard]] const Layer& get(std::size_t k) const {
        const auto it = layers_.find(k);
        if (it == layers_.end()) throw InternalError("SplitTable: no layer for k = " + std::to_string(k));
        return it->second;
    }
    Layer& get_mut(std::size_t k) {
        const auto it = layers_.find(k);
        if (it == layers_.end()) throw InternalError("SplitTable: no layer for k = " + std::to_string(k));
        return it->second;
    }

    std::size_t n_ = 0;
    std::map<std::size_t, Layer> layers_;
};

/// Time of one robot covering modules first..last (1-based, inclusive):
/// the block's coverage plus the round trip to the farthest doorway.
///
/// The coverage sum is accumulated from `first` upward. Every f-value is
/// produced this way, so f is exactly monotone in both interval ends
/// under floating-point rounding.
inline Time block_time(std::span<const Time> tau, const LinkPrefix& prefix, std::size_t first, std::size_t last) {
    Time cover = 0.0;
    for (std::size_t h = first; h <= last; ++h) cover += tau[h - 1];
    return cover + 2.0 * prefix.to_module(last);
}

/// Fills f(i, i, k) for every layer and f(i, j, 1) for every interval.
inline void fill_base_costs(SplitTable& table, std::span<const Time> tau, const LinkPrefix& prefix) {
    const auto n = table.module_count();
    const auto ks = table.robot_counts();
    for (std::size_t i = 1; i <= n; ++i) {
        const Time single = tau[i - 1] + 2.0 * prefix.to_module(i);
        for (auto k : ks) table.set(i, i, k, single, k == 1 ? static_cast<long>(i) : static_cast<long>(i) - 1);
    }
    if (!table.has(1)) return;
    for (std::size_t i = 1; i <= n; ++i) {
        Time cover = tau[i - 1];
        for (std::size_t j = i + 1; j <= n; ++j) {
            cover += tau[j - 1];
            table.set(i, j, 1, cover + 2.0 * prefix.to_module(j), static_cast<long>(j));
        }
    }
}

/// Base cells for an environment and its coverage costs, for the robot
/// counts needed by `m` robots.
inline SplitTable base_costs(const ModularEnvironment& env, std::span<const Time> tau, std::size_t m) {
    if (tau.size() != env.module_count()) throw InvalidInput("base_costs: cost table size mismatch");
    const auto ks = needed_robot_counts(std::min(m, std::max<std::size_t>(env.module_count(), 1)));
    SplitTable table(env.module_count(), ks);
    fill_base_costs(table, tau, LinkPrefix(env));
    return table;
}

struct SplitChoice {
    long h = -1;
    Time value = 0.0;
};

/// Best split of cell (i, j, k), k >= 2, over h in [i-1, j]. Returns the
/// smallest h attaining the minimum.
inline SplitChoice split_point(std::size_t i, std::size_t j, std::size_t k, const SplitTable& table) {
    if (k < 2) throw InternalError("split_point: needs at least two robots");
    const std::size_t lo_k = k / 2;
    const std::size_t hi_k = (k + 1) / 2;
    const auto lower = [&](long h) {
        const Time v = table.f(i, static_cast<std::size_t>(h), lo_k);
        if (std::isnan(v)) throw InternalError("split_point: missing lower memo entry");
        return v;
    };
    const auto upper = [&](long h) {
        const Time v = table.f(static_cast<std::size_t>(h) + 1, j, hi_k);
        if (std::isnan(v)) throw InternalError("split_point: missing upper memo entry");
        return v;
    };
    const long first = static_cast<long>(i) - 1;
    const long last = static_cast<long>(j);

    // Smallest h with lower(h) >= upper(h); true at h = j where upper is 0.
    long a = first;
    long b = last;
    while (a < b) {
        const long mid = a + (b - a) / 2;
        if (lower(mid) >= upper(mid))
            b = mid;
        else
            a = mid + 1;
    }
    const long cross = a;
    SplitChoice best{cross, std::max(lower(cross), upper(cross))};
    if (cross == first) return best;

    // Left of the crossover the max is upper(h), non-increasing in h.
    const Time left = std::max(lower(cross - 1), upper(cross - 1));
    if (left > best.value) return best;
    best.value = left;
    long lo = first;
    long hi = cross - 1;
    while (lo < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (upper(mid) <= left)
            hi = mid;
        else
            lo = mid + 1;
    }
    best.h = lo;
    return best;
}

enum class FillMode {
    /// Only robot counts reachable from m by halving.
    halving,
    /// Every k in [1, ceil(m/2)], then the top cell for m.
    all_counts,
};

struct SolveOptions {
    FillMode mode = FillMode::halving;
    /// Among optimal partitions, return one with the fewest busy robots.
    bool fewest_robots = true;
    Deadline deadline;
};

struct Block {
    std::size_t first = 1;  // 1-based, inclusive
    std::size_t last = 1;

    friend bool operator==(const Block&, const Block&) = default;
};

struct RobotAssignment {
    std::optional<Block> block;  // nullopt: idle robot
    Time time = 0.0;
};

struct IntegerSolution {
    std::vector<RobotAssignment> robots;
    Time makespan = 0.0;

    [[nodiscard]] std::size_t robots_used() const {
        return static_cast<std::size_t>(
            std::count_if(robots.begin(), robots.end(), [](const auto& r) { return r.block.has_value(); }));
    }
};

/// Max per-robot time, recomputed from the assignments.
inline Time solution_makespan(const IntegerSolution& solution) {
    Time worst = 0.0;
    for (const auto& r : solution.robots) worst = std::max(worst, r.time);
    return worst;
}

/// Non-empty blocks are ordered, disjoint and cover 1..n exactly once.
inline bool blocks_partition(const IntegerSolution& solution, std::size_t module_count) {
    std::size_t next = 1;
    for (const auto& r : solution.robots) {
        if (!r.block) continue;
        if (r.block->first != next || r.block->last < r.block->first) return false;
        next = r.block->last + 1;
    }
    return next == module_count + 1;
}

struct IntegerResult {
    IntegerSolution solution;
    SplitTable table;
};

namespace detail {

inline void fill_layer(SplitTable& table, std::size_t k, const Deadline& deadline) {
    const auto n = table.module_count();
    for (std::size_t i = 1; i <= n; ++i) {
        if ((i & 15) == 0) deadline.check("solve_integer");
        for (std::size_t j = i + 1; j <= n; ++j) {
            const auto choice = split_point(i, j, k, table);
            table.set(i, j, k, choice.value, choice.h);
        }
    }
}

/// Replaces `blocks` by the greedy left-to-right packing under the same
/// makespan. Block time grows with the last index and shrinks with the first,
/// so maximal blocks give the fewest robots. Keeps the input if rounding makes
/// the packing worse.
inline void compact_blocks(std::span<const Time> tau, const LinkPrefix& prefix,
                           std::vector<std::optional<Block>>& blocks) {
    Time limit = 0.0;
    std::size_t busy = 0;
    for (const auto& b : blocks)
        if (b) {
            limit = std::max(limit, block_time(tau, prefix, b->first, b->last));
            ++busy;
        }
    const auto n = tau.size();
    std::vector<std::optional<Block>> packed;
    for (std::size_t first = 1; first <= n;) {
        if (block_time(tau, prefix, first, first) > limit) return;
        std::size_t last = first;
        while (last < n && block_time(tau, prefix, first, last + 1) <= limit) ++last;
        packed.emplace_back(Block{first, last});
        first = last + 1;
    }
    if (packed.size() > busy) return;
    packed.resize(blocks.size());
    blocks = std::move(packed);
}

inline void assign_blocks(const SplitTable& table, std::size_t i, std::size_t j, std::size_t k,
                          std::vector<std::optional<Block>>& out) {
    if (j + 1 == i) {
        for (std::size_t r = 0; r < k; ++r) out.emplace_back(std::nullopt);
        return;
    }
    if (k == 1) {
        out.emplace_back(Block{i, j});
        return;
    }
    const long h = table.split(i, j, k);
    if (h < static_cast<long>(i) - 1 || h > static_cast<long>(j))
        throw InternalError("solve_integer: missing split point during reconstruction");
    assign_blocks(table, i, static_cast<std::size_t>(h), k / 2, out);
    assign_blocks(table, static_cast<std::size_t>(h) + 1, j, (k + 1) / 2, out);
}

}  // namespace detail

/// Optimal integer solution from coverage times `tau` and doorway links.
/// Robot counts above n are clamped to n; surplus robots stay idle.
inline IntegerResult solve_integer(std::span<const Time> linking, std::span<const Time> tau, std::size_t m,
                                   const SolveOptions& opts = {}) {
    const auto n = tau.size();
    if (n == 0) throw InvalidInput("solve_integer: no modules");
    if (linking.size() + 1 != n) throw InvalidInput("solve_integer: linking must have n - 1 entries");
    if (m < 1) throw InvalidInput("solve_integer: robot count must be at least 1");
    for (auto t : tau)
        if (!std::isfinite(t) || t < 0.0) throw InvalidInput("solve_integer: coverage times must be finite and >= 0");
    for (auto w : linking)
        if (!std::isfinite(w) || w < 0.0) throw InvalidInput("solve_integer: links must be finite and >= 0");

    const std::size_t team = std::min(m, n);
    std::vector<std::size_t> ks;
    if (opts.mode == FillMode::halving) {
        ks = needed_robot_counts(team);
    } else {
        for (std::size_t k = 1; k <= (team + 1) / 2; ++k) ks.push_back(k);
        ks.push_back(team);
    }
    const LinkPrefix prefix(linking);
    IntegerResult result{{}, SplitTable(n, ks)};
    auto& table = result.table;
    fill_base_costs(table, tau, prefix);
    for (auto k : ks) {
        if (k < 2 || k == team) continue;
        detail::fill_layer(table, k, opts.deadline);
    }
    if (team >= 2 && n >= 2) {
        const auto top = split_point(1, n, team, table);
        table.set(1, n, team, top.value, top.h);
    }

    std::vector<std::optional<Block>> blocks;
    detail::assign_blocks(table, 1, n, team, blocks);
    if (opts.fewest_robots) detail::compact_blocks(tau, prefix, blocks);
    for (std::size_t r = team; r < m; ++r) blocks.emplace_back(std::nullopt);

    auto& sol = result.solution;
    for (const auto& b : blocks) {
        RobotAssignment ra;
        ra.block = b;
        if (b) ra.time = block_time(tau, prefix, b->first, b->last);
        sol.robots.push_back(ra);
    }
    sol.makespan = solution_makespan(sol);
    return result;
}

inline IntegerResult solve_integer(const ModularEnvironment& env, std::span<const Time> tau, std::size_t m,
                                   const SolveOptions& opts = {}) {
    const auto problems = validate_environment(env);
    if (!problems.empty()) throw InvalidInput("solve_integer: invalid environment: " + problems.front());
    if (tau.size() != env.module_count()) throw InvalidInput("solve_integer: cost table size mismatch");
    return solve_integer(std::span<const Time>(env.linking), tau, m, opts);
}

/// Module-level reference to a vertex: 0-based module index and vertex index.
struct VertexRef {
    std::size_t module = 0;
    std::size_t vertex = 0;

    friend bool operator==(const VertexRef&, const VertexRef&) = default;
};

struct RobotTour {
    std::size_t robot = 0;
    std::vector<VertexRef> walk;
    Time time = 0.0;
};

/// Travel time of a walk: closure distances inside a module, link weights
/// between the doorways of adjacent modules.
inline Time walk_time(const ModularEnvironment& env, std::span<const DistanceMatrix> closures,
                      std::span<const VertexRef> walk) {
    Time t = 0.0;
    for (std::size_t s = 1; s < walk.size(); ++s) {
        const auto& a = walk[s - 1];
        const auto& b = walk[s];
        if (a.module == b.module) {
            t += closures[a.module](a.vertex, b.vertex);
        } else {
            const auto lo = std::min(a.module, b.module);
            if (std::max(a.module, b.module) != lo + 1 || a.vertex != env.modules[a.module].doorway ||
                b.vertex != env.modules[b.module].doorway)
                throw InvalidInput("walk_time: hop between modules must join adjacent doorways");
            t += env.linking[lo];
        }
    }
    return t;
}

/// Vertex-level closed walks from the depot: along the doorway chain to the
/// block, each module's anchored tour in ascending order, then back.
inline std::vector<RobotTour> build_robot_tours(const ModularEnvironment& env, const IntegerSolution& solution,
                                                std::span<const Tour> anchored_tours) {
    if (anchored_tours.size() != env.module_count())
        throw InvalidInput("build_robot_tours: missing module tour");
    std::vector<DistanceMatrix> closures(env.module_count());
    std::vector<char> have(env.module_count(), 0);
    std::vector<RobotTour> out;
    const auto depot = VertexRef{0, env.modules.front().doorway};
    for (std::size_t r = 0; r < solution.robots.size(); ++r) {
        RobotTour rt;
        rt.robot = r;
        rt.walk.push_back(depot);
        const auto& block = solution.robots[r].block;
        if (block) {
            const auto first = block->first - 1;
            const auto last = block->last - 1;
            for (std::size_t q = 1; q <= first; ++q) rt.walk.push_back({q, env.modules[q].doorway});
            for (std::size_t q = first; q <= last; ++q) {
                if (q > first) rt.walk.push_back({q, env.modules[q].doorway});
                const auto& tour = anchored_tours[q];
                if (tour.order.empty() || tour.order.front() != env.modules[q].doorway)
                    throw InvalidInput("build_robot_tours: module tour is not anchored at its doorway");
                for (std::size_t s = 1; s < tour.order.size(); ++s) rt.walk.push_back({q, tour.order[s]});
                if (!have[q]) {
                    closures[q] = metric_closure(env.modules[q].graph);
                    have[q] = 1;
                }
            }
            for (std::size_t q = last; q-- > 0;) rt.walk.push_back({q, env.modules[q].doorway});
        }
        rt.time = walk_time(env, closures, rt.walk);
        out.push_back(std::move(rt));
    }
    return out;
}

}  // namespace modcover
