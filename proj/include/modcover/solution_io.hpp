#pragma once

// Solution file: one document per solved instance.
//
//   { "schema": "modcover-solution/1",
//     "environment": str, "algorithm": "integer" | "frederickson",
//     "backend": "exact" | "christofides" | "greedy",
//     "makespan": num,
//     "robots": [ { "robot": int, "block": [first, last] | null,
//                   "time": num, "tour": [vertex-id, ...]? } ] }
//
// Blocks are 1-based inclusive module intervals; Frederickson robots carry
// no block. Tours are closed walks of namespaced vertex ids (closure space).

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "modcover/baselines.hpp"
#include "modcover/env_io.hpp"
#include "modcover/integer_solver.hpp"

namespace modcover {

inline constexpr const char* kSolutionSchema = "modcover-solution/1";

struct RobotRecord {
    std::size_t robot = 0;
    std::optional<Block> block;
    Time time = 0.0;
    std::vector<std::string> tour;

    friend bool operator==(const RobotRecord&, const RobotRecord&) = default;
};

struct SolutionRecord {
    std::string environment;
    std::string algorithm;
    std::string backend;
    Time makespan = 0.0;
    std::vector<RobotRecord> robots;

    friend bool operator==(const SolutionRecord&, const SolutionRecord&) = default;
};

/// `tours` may be empty (no vertex-level walks) or one per robot.
inline SolutionRecord make_solution_record(const ModularEnvironment& env, const IntegerSolution& sol,
                                           TspBackend backend, std::span<const RobotTour> tours = {}) {
    SolutionRecord rec{env.name, "integer", std::string(to_string(backend)), sol.makespan, {}};
    for (std::size_t r = 0; r < sol.robots.size(); ++r) {
        RobotRecord rr{r, sol.robots[r].block, sol.robots[r].time, {}};
        if (!tours.empty())
            for (const auto& ref : tours[r].walk) rr.tour.push_back(env.modules[ref.module].graph.vertices[ref.vertex].id);
        rec.robots.push_back(std::move(rr));
    }
    return rec;
}

inline SolutionRecord make_solution_record(const ModularEnvironment& env, const GluedGraph& glued,
                                           const MultiTourSolution& sol, TspBackend backend) {
    SolutionRecord rec{env.name, "frederickson", std::string(to_string(backend)), sol.makespan, {}};
    for (std::size_t r = 0; r < sol.walks.size(); ++r) {
        RobotRecord rr{r, std::nullopt, sol.times[r], {}};
        for (auto v : sol.walks[r]) rr.tour.push_back(glued.graph.vertices[v].id);
        rec.robots.push_back(std::move(rr));
    }
    return rec;
}

inline std::string solution_to_text(const SolutionRecord& rec) {
    nlohmann::ordered_json doc;
    doc["schema"] = kSolutionSchema;
    doc["environment"] = rec.environment;
    doc["algorithm"] = rec.algorithm;
    doc["backend"] = rec.backend;
    doc["makespan"] = rec.makespan;
    doc["robots"] = nlohmann::ordered_json::array();
    for (const auto& r : rec.robots) {
        nlohmann::ordered_json jr;
        jr["robot"] = r.robot;
        if (r.block)
            jr["block"] = {r.block->first, r.block->last};
        else
            jr["block"] = nullptr;
        jr["time"] = r.time;
        if (!r.tour.empty()) jr["tour"] = r.tour;
        doc["robots"].push_back(std::move(jr));
    }
    return doc.dump(1) + "\n";
}

inline SolutionRecord solution_from_text(std::string_view text) {
    using detail::ojson;
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ParseError("line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
    }
    detail::expect_fields(doc, "solution", {"schema", "environment", "algorithm", "backend", "makespan", "robots"});
    if (detail::string_field(doc, "schema", "solution") != kSolutionSchema)
        throw ParseError("solution.schema: unsupported schema");
    SolutionRecord rec;
    rec.environment = detail::string_field(doc, "environment", "solution");
    rec.algorithm = detail::string_field(doc, "algorithm", "solution");
    rec.backend = detail::string_field(doc, "backend", "solution");
    rec.makespan = detail::number_field(doc, "makespan", "solution");
    if (!doc["robots"].is_array()) throw ParseError("solution.robots: expected an array");
    for (std::size_t r = 0; r < doc["robots"].size(); ++r) {
        const auto& jr = doc["robots"][r];
        const std::string where = "robots[" + std::to_string(r) + "]";
        detail::expect_fields(jr, where, {"robot", "block", "time"}, {"tour"});
        RobotRecord rr;
        if (!jr["robot"].is_number_unsigned()) throw ParseError(where + ".robot: expected a non-negative integer");
        rr.robot = jr["robot"].get<std::size_t>();
        const auto& jb = jr["block"];
        if (!jb.is_null()) {
            if (!jb.is_array() || jb.size() != 2 || !jb[0].is_number_unsigned() || !jb[1].is_number_unsigned())
                throw ParseError(where + ".block: expected [first, last] or null");
            rr.block = Block{jb[0].get<std::size_t>(), jb[1].get<std::size_t>()};
        }
        rr.time = detail::number_field(jr, "time", where);
        if (jr.contains("tour")) {
            if (!jr["tour"].is_array()) throw ParseError(where + ".tour: expected an array");
            for (const auto& v : jr["tour"]) {
                if (!v.is_string()) throw ParseError(where + ".tour: expected vertex ids");
                rr.tour.push_back(v.get<std::string>());
            }
        }
        rec.robots.push_back(std::move(rr));
    }
    return rec;
}

inline void save_solution(const SolutionRecord& rec, const std::string& path) {
    detail::write_file(path, solution_to_text(rec));
}

inline SolutionRecord load_solution(const std::string& path) {
    try {
        return solution_from_text(detail::read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace modcover
