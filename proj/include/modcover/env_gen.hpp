#pragma once

// Seeded synthetic modules and modular environments. A module is a graph
// of room centroids and portals (doors between rooms): centroid-portal
// edges use Euclidean length, portal-portal edges of the same room use the
// L1 norm. Coordinates are in meters after scaling.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modcover/env_model.hpp"
#include "modcover/error.hpp"

namespace modcover {

enum class Topology { ring, star, corridor };

inline std::string_view to_string(Topology t) {
    switch (t) {
        case Topology::ring: return "ring";
        case Topology::star: return "star";
        case Topology::corridor: return "corridor";
    }
    return "?";
}

struct ModuleTemplate {
    Topology topology = Topology::star;
    std::size_t rooms = 1;
    /// Meters per layout unit.
    double scale = 1.0;
    std::uint64_t seed = 1;
};

/// Base modules A (ring, 40 vertices), B (star, 47) and C (corridor, 80).
inline ModuleTemplate base_template(char type) {
    switch (type) {
        case 'A': return {Topology::ring, 20, 0.91, 101};
        case 'B': return {Topology::star, 46, 0.97, 202};
        case 'C': return {Topology::corridor, 40, 0.89, 303};
        default: throw InvalidInput(std::string("unknown base module '") + type + "'");
    }
}

/// Accepts A/B/C or ring/star/corridor.
inline ModuleTemplate base_template(std::string_view name) {
    if (name == "A" || name == "ring") return base_template('A');
    if (name == "B" || name == "star") return base_template('B');
    if (name == "C" || name == "corridor") return base_template('C');
    throw InvalidInput("unknown base module '" + std::string(name) + "'");
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double jitter(std::mt19937_64& rng, double spread) { return 1.0 + spread * (2.0 * unit(rng) - 1.0); }

inline std::size_t draw_index(std::mt19937_64& rng, std::size_t count) {
    return static_cast<std::size_t>(unit(rng) * static_cast<double>(count)) % count;
}

struct Builder {
    MetricGraph g;
    double scale = 1.0;

    std::size_t add(const std::string& name, double x, double y) {
        return g.add_vertex(vertex_prefix(1) + name, x * scale, y * scale);
    }
    void euclid(std::size_t a, std::size_t b) {
        const double dx = *g.vertices[a].x - *g.vertices[b].x;
        const double dy = *g.vertices[a].y - *g.vertices[b].y;
        g.add_edge(a, b, std::hypot(dx, dy));
    }
    void manhattan(std::size_t a, std::size_t b) {
        const double dx = *g.vertices[a].x - *g.vertices[b].x;
        const double dy = *g.vertices[a].y - *g.vertices[b].y;
        g.add_edge(a, b, std::abs(dx) + std::abs(dy));
    }
};

inline constexpr double kDoorWidth = 0.8;
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace detail

/// Vertices whose local name marks a room centroid ("c<k>").
inline std::vector<std::size_t> centroid_vertices(const ModuleSpec& module) {
    std::vector<std::size_t> out;
    const auto prefix = vertex_prefix(module.id);
    for (std::size_t v = 0; v < module.graph.size(); ++v) {
        const auto& id = module.graph.vertices[v].id;
        if (id.size() > prefix.size() && id[prefix.size()] == 'c') out.push_back(v);
    }
    return out;
}

/// Ring: rooms around a courtyard, consecutive rooms share a door.
/// Star: a hub corridor with one room at the end of every spoke.
/// Corridor: a row of rooms, each opening into the next, with an exit door.
inline ModuleSpec make_module(const ModuleTemplate& t) {
    if (t.rooms < 1) throw InvalidInput("make_module: need at least one room");
    if (!(t.scale > 0.0) || !std::isfinite(t.scale)) throw InvalidInput("make_module: scale must be positive");
    std::mt19937_64 rng(t.seed);
    detail::Builder b{{}, t.scale};
    const auto R = t.rooms;

    switch (t.topology) {
        case Topology::ring: {
            const double radius = 30.0;
            std::vector<std::size_t> centroid(R), portal(R);
            for (std::size_t k = 0; k < R; ++k) {
                const double a = 2.0 * detail::kPi * static_cast<double>(k) / static_cast<double>(R);
                const double r = radius * detail::jitter(rng, 0.12);
                centroid[k] = b.add("c" + std::to_string(k), r * std::cos(a), r * std::sin(a));
            }
            for (std::size_t k = 0; k < R; ++k) {
                // Door on the wall shared by rooms k and k+1, offset by half a door.
                const double a = 2.0 * detail::kPi * (static_cast<double>(k) + 0.5) / static_cast<double>(R);
                const double r = radius + detail::kDoorWidth / 2.0;
                portal[k] = b.add("p" + std::to_string(k), r * std::cos(a), r * std::sin(a));
            }
            for (std::size_t k = 0; k < R; ++k) {
                const auto prev = portal[(k + R - 1) % R];
                b.euclid(centroid[k], portal[k]);
                if (R == 1) break;
                b.euclid(centroid[k], prev);
                // With two rooms both walls join the same pair of doors.
                if (R > 2 || k == 0) b.manhattan(prev, portal[k]);
            }
            break;
        }
        case Topology::star: {
            const auto hub = b.add("c0", 0.0, 0.0);
            for (std::size_t k = 0; k < R; ++k) {
                const double a = 2.0 * detail::kPi * (static_cast<double>(k) + 0.3 * detail::unit(rng)) /
                                 static_cast<double>(R);
                const double reach = 3.8 * detail::jitter(rng, 0.3);
                const auto c = b.add("c" + std::to_string(k + 1), reach * std::cos(a), reach * std::sin(a));
                b.euclid(hub, c);
            }
            break;
        }
        case Topology::corridor: {
            double x = 0.0;
            std::vector<std::size_t> centroid(R), portal(R);
            for (std::size_t k = 0; k < R; ++k) {
                const double width = 5.5 * detail::jitter(rng, 0.25);
                const double depth = 6.0 * detail::jitter(rng, 0.25);
                centroid[k] = b.add("c" + std::to_string(k), x + width / 2.0, depth / 2.0);
                x += width;
                // Door in the right-hand wall; the last room's door is the exit.
                const double door_y = detail::kDoorWidth / 2.0 + (depth - detail::kDoorWidth) * detail::unit(rng);
                portal[k] = b.add("p" + std::to_string(k), x, door_y);
            }
            for (std::size_t k = 0; k < R; ++k) {
                b.euclid(centroid[k], portal[k]);
                if (k > 0) {
                    b.euclid(centroid[k], portal[k - 1]);
                    b.manhattan(portal[k - 1], portal[k]);
                }
            }
            break;
        }
    }

    ModuleSpec mod;
    mod.id = 1;
    mod.graph = std::move(b.g);
    const auto centroids = centroid_vertices(mod);
    mod.doorway = centroids[detail::draw_index(rng, centroids.size())];
    return mod;
}

/// Copy of `module` with vertex ids re-namespaced for position `id`.
inline ModuleSpec renumber_module(ModuleSpec module, int id) {
    const auto old_prefix = vertex_prefix(module.id);
    const auto new_prefix = vertex_prefix(id);
    for (auto& v : module.graph.vertices)
        if (v.id.rfind(old_prefix, 0) == 0) v.id = new_prefix + v.id.substr(old_prefix.size());
    module.id = id;
    return module;
}

enum class Pattern { identical, random, increasing, decreasing };

inline std::string_view to_string(Pattern p) {
    switch (p) {
        case Pattern::identical: return "identical";
        case Pattern::random: return "random";
        case Pattern::increasing: return "increasing";
        case Pattern::decreasing: return "decreasing";
    }
    return "?";
}

inline Pattern parse_pattern(std::string_view name) {
    if (name == "identical") return Pattern::identical;
    if (name == "random") return Pattern::random;
    if (name == "increasing") return Pattern::increasing;
    if (name == "decreasing") return Pattern::decreasing;
    throw InvalidInput("unknown pattern '" + std::string(name) + "'");
}

struct PatternSpec {
    Pattern pattern = Pattern::identical;
    std::size_t modules = 1;
    double link_dist = 20.0;
    std::uint64_t seed = 1;
};

/// Shortest decimal text that round-trips `v` (used in names).
inline std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Canonical environment name; bench tooling reads pattern, link and seed
/// back from it.
inline std::string environment_name(const PatternSpec& spec) {
    return std::string(to_string(spec.pattern)) + "-n" + std::to_string(spec.modules) + "-l" +
           format_number(spec.link_dist) + "-s" + std::to_string(spec.seed);
}

/// Template index (0 = A, 1 = B, 2 = C) of every module position.
inline std::vector<std::size_t> pattern_types(const PatternSpec& spec, std::mt19937_64* rng = nullptr) {
    const auto n = spec.modules;
    std::vector<std::size_t> types(n, 0);
    const auto third = n / 3;
    switch (spec.pattern) {
        case Pattern::identical: break;
        case Pattern::random:
            if (rng == nullptr) throw InternalError("pattern_types: random pattern needs a generator");
            for (auto& t : types) t = detail::draw_index(*rng, 3);
            break;
        case Pattern::increasing:
            // Thirds A, B, C; the remainder joins the last segment.
            for (std::size_t i = 0; i < n; ++i) types[i] = i < third ? 0 : (i < 2 * third ? 1 : 2);
            break;
        case Pattern::decreasing:
            for (std::size_t i = 0; i < n; ++i) types[i] = i < third ? 2 : (i < 2 * third ? 1 : 0);
            break;
    }
    return types;
}

/// Builds the environment. `templates` holds one template for the identical
/// pattern and A, B, C for the others. Every link equals `link_dist`;
/// doorways are drawn among centroids from the pattern seed.
inline ModularEnvironment make_environment(const PatternSpec& spec, std::span<const ModuleTemplate> templates) {
    if (spec.modules < 1) throw InvalidInput("make_environment: need at least one module");
    if (!std::isfinite(spec.link_dist) || spec.link_dist < 0.0)
        throw InvalidInput("make_environment: link distance must be finite and >= 0");
    const std::size_t needed = spec.pattern == Pattern::identical ? 1 : 3;
    if (templates.size() < needed)
        throw InvalidInput("make_environment: pattern '" + std::string(to_string(spec.pattern)) + "' needs " +
                           std::to_string(needed) + " templates");

    std::vector<ModuleSpec> bases;
    std::vector<std::vector<std::size_t>> centroids;
    for (std::size_t t = 0; t < needed; ++t) {
        bases.push_back(make_module(templates[t]));
        centroids.push_back(centroid_vertices(bases.back()));
    }

    std::mt19937_64 rng(spec.seed);
    const auto types = pattern_types(spec, &rng);
    ModularEnvironment env;
    env.name = environment_name(spec);
    for (std::size_t i = 0; i < spec.modules; ++i) {
        const auto type = types[i];
        auto mod = renumber_module(bases[type], static_cast<int>(i + 1));
        mod.doorway = centroids[type][detail::draw_index(rng, centroids[type].size())];
        env.modules.push_back(std::move(mod));
    }
    env.linking.assign(spec.modules - 1, spec.link_dist);
    return env;
}

}  // namespace modcover
