#pragma once

// Environment file format:
//
//   { "name": str,
//     "modules": [ { "id": int, "doorway": vertex-id,
//                    "vertices": [ {"id": str, "x": num?, "y": num?} ],
//                    "edges": [ {"u": str, "v": str, "w": num} ] } ],
//     "linking": [ num, ... ] }
//
// Unknown fields are rejected. Loading validates the environment.

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "modcover/env_model.hpp"

namespace modcover {

namespace detail {

using ojson = nlohmann::ordered_json;

inline void expect_fields(const ojson& obj, std::string_view where, std::initializer_list<std::string_view> required,
                          std::initializer_list<std::string_view> optional = {}) {
    if (!obj.is_object()) throw ParseError(std::string(where) + ": expected an object");
    for (auto key : required)
        if (!obj.contains(key)) throw ParseError(std::string(where) + ": missing field '" + std::string(key) + "'");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto k : required) known = known || key == k;
        for (auto k : optional) known = known || key == k;
        if (!known) throw ParseError(std::string(where) + ": unknown field '" + key + "'");
    }
}

inline double number_field(const ojson& obj, std::string_view key, const std::string& where) {
    const auto& v = obj.at(std::string(key));
    if (!v.is_number()) throw ParseError(where + "." + std::string(key) + ": expected a number");
    return v.get<double>();
}

inline std::string string_field(const ojson& obj, std::string_view key, const std::string& where) {
    const auto& v = obj.at(std::string(key));
    if (!v.is_string()) throw ParseError(where + "." + std::string(key) + ": expected a string");
    return v.get<std::string>();
}

inline std::size_t line_of(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(path + ": cannot open file for writing");
    out << text;
    if (!out) throw Error(path + ": write failed");
}

}  // namespace detail

/// Parses the document without checking environment invariants.
inline ModularEnvironment parse_environment(std::string_view text) {
    using detail::ojson;
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ParseError("line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
    }
    detail::expect_fields(doc, "environment", {"name", "modules", "linking"});

    ModularEnvironment env;
    env.name = detail::string_field(doc, "name", "environment");
    if (!doc["modules"].is_array()) throw ParseError("environment.modules: expected an array");
    if (!doc["linking"].is_array()) throw ParseError("environment.linking: expected an array");

    for (std::size_t k = 0; k < doc["modules"].size(); ++k) {
        const auto& jm = doc["modules"][k];
        const std::string where = "modules[" + std::to_string(k) + "]";
        detail::expect_fields(jm, where, {"id", "doorway", "vertices", "edges"});
        ModuleSpec mod;
        if (!jm["id"].is_number_integer()) throw ParseError(where + ".id: expected an integer");
        mod.id = jm["id"].get<int>();
        if (!jm["vertices"].is_array()) throw ParseError(where + ".vertices: expected an array");
        if (!jm["edges"].is_array()) throw ParseError(where + ".edges: expected an array");

        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < jm["vertices"].size(); ++i) {
            const auto& jv = jm["vertices"][i];
            const std::string vw = where + ".vertices[" + std::to_string(i) + "]";
            detail::expect_fields(jv, vw, {"id"}, {"x", "y"});
            Vertex v;
            v.id = detail::string_field(jv, "id", vw);
            if (jv.contains("x")) v.x = detail::number_field(jv, "x", vw);
            if (jv.contains("y")) v.y = detail::number_field(jv, "y", vw);
            index.emplace(v.id, mod.graph.vertices.size());
            mod.graph.vertices.push_back(std::move(v));
        }
        const auto lookup = [&](const std::string& id, const std::string& field) {
            const auto it = index.find(id);
            if (it == index.end()) throw ParseError(field + ": unknown vertex '" + id + "'");
            return it->second;
        };
        for (std::size_t e = 0; e < jm["edges"].size(); ++e) {
            const auto& je = jm["edges"][e];
            const std::string ew = where + ".edges[" + std::to_string(e) + "]";
            detail::expect_fields(je, ew, {"u", "v", "w"});
            const auto u = lookup(detail::string_field(je, "u", ew), ew + ".u");
            const auto v = lookup(detail::string_field(je, "v", ew), ew + ".v");
            mod.graph.add_edge(u, v, detail::number_field(je, "w", ew));
        }
        mod.doorway = lookup(detail::string_field(jm, "doorway", where), where + ".doorway");
        env.modules.push_back(std::move(mod));
    }
    for (std::size_t i = 0; i < doc["linking"].size(); ++i) {
        const auto& w = doc["linking"][i];
        if (!w.is_number()) throw ParseError("linking[" + std::to_string(i) + "]: expected a number");
        env.linking.push_back(w.get<double>());
    }
    return env;
}

/// Parses and validates; invariant violations raise InvalidInput listing all of them.
inline ModularEnvironment environment_from_text(std::string_view text) {
    auto env = parse_environment(text);
    const auto problems = validate_environment(env);
    if (!problems.empty()) {
        std::string msg = "invalid environment:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw InvalidInput(msg);
    }
    return env;
}

inline std::string environment_to_text(const ModularEnvironment& env) {
    using detail::ojson;
    ojson doc;
    doc["name"] = env.name;
    doc["modules"] = ojson::array();
    for (const auto& mod : env.modules) {
        ojson jm;
        jm["id"] = mod.id;
        jm["doorway"] = mod.graph.vertices.at(mod.doorway).id;
        jm["vertices"] = ojson::array();
        for (const auto& v : mod.graph.vertices) {
            ojson jv;
            jv["id"] = v.id;
            if (v.x) jv["x"] = *v.x;
            if (v.y) jv["y"] = *v.y;
            jm["vertices"].push_back(std::move(jv));
        }
        jm["edges"] = ojson::array();
        for (const auto& e : mod.graph.edges)
            jm["edges"].push_back(ojson{{"u", mod.graph.vertices.at(e.u).id},
                                        {"v", mod.graph.vertices.at(e.v).id},
                                        {"w", e.weight}});
        doc["modules"].push_back(std::move(jm));
    }
    doc["linking"] = env.linking;
    return doc.dump(1) + "\n";
}

inline ModularEnvironment load_environment(const std::string& path) {
    const auto text = detail::read_file(path);
    try {
        return environment_from_text(text);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const InvalidInput& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

inline void save_environment(const ModularEnvironment& env, const std::string& path) {
    detail::write_file(path, environment_to_text(env));
}

}  // namespace modcover
