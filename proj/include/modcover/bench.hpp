#pragma once

// Benchmark records, their CSV form, and run helpers shared by the CLI and
// the acceptance suite.
//
// CSV layout: a schema line "#modcover-bench,1", a header row, then one row
// per record. Appending to an existing file checks the schema and header
// instead of rewriting them.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "modcover/baselines.hpp"
#include "modcover/budget.hpp"
#include "modcover/env_gen.hpp"
#include "modcover/env_model.hpp"
#include "modcover/error.hpp"
#include "modcover/integer_solver.hpp"
#include "modcover/tsp/tsp.hpp"

namespace modcover {

inline constexpr const char* kBenchSchemaLine = "#modcover-bench,1";

struct BenchmarkRecord {
    std::string instance_id;
    std::string pattern;
    std::size_t n = 0;
    std::size_t m = 0;
    double link_dist = 0.0;
    std::string algorithm;
    std::string backend;
    Time makespan = 0.0;
    Time mean_tour = 0.0;
    Time std_tour = 0.0;
    std::size_t robots_used = 0;
    double compute_seconds = 0.0;
    std::uint64_t seed = 0;
    double tsp_seconds = 0.0;
    double dp_seconds = 0.0;
    std::string status = "ok";
};

inline const std::vector<std::string>& bench_columns() {
    static const std::vector<std::string> cols{
        "instance_id", "pattern",     "n",     "m",        "link_dist", "algorithm",
        "backend",     "makespan",    "mean_tour", "std_tour", "robots_used", "compute_seconds",
        "seed",        "tsp_seconds", "dp_seconds", "status"};
    return cols;
}

struct TourStats {
    Time mean = 0.0;
    Time stddev = 0.0;
    std::size_t count = 0;
};

/// Mean and population standard deviation over the robots that move
/// (times > 0 or non-idle flags). Welford's update keeps identical times at
/// exactly zero spread.
inline TourStats tour_stats(std::span<const Time> times) {
    TourStats s;
    Time m2 = 0.0;
    for (auto t : times) {
        ++s.count;
        const Time delta = t - s.mean;
        s.mean += delta / static_cast<double>(s.count);
        m2 += delta * (t - s.mean);
    }
    if (s.count > 0) s.stddev = std::sqrt(std::max(0.0, m2 / static_cast<double>(s.count)));
    return s;
}

struct InstanceMeta {
    std::string pattern = "custom";
    double link_dist = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
};

/// Recovers generator metadata from a canonical environment name, falling
/// back to the links themselves.
inline InstanceMeta instance_meta(const ModularEnvironment& env) {
    InstanceMeta meta;
    static const std::regex canonical(R"(^(identical|random|increasing|decreasing)-n(\d+)-l([^-]+)-s(\d+)$)");
    std::smatch m;
    if (std::regex_match(env.name, m, canonical)) {
        meta.pattern = m[1].str();
        meta.link_dist = std::stod(m[3].str());
        meta.seed = std::stoull(m[4].str());
        return meta;
    }
    if (env.linking.empty()) {
        meta.link_dist = 0.0;
    } else if (std::all_of(env.linking.begin(), env.linking.end(),
                           [&](double w) { return w == env.linking.front(); })) {
        meta.link_dist = env.linking.front();
    }
    return meta;
}

inline BenchmarkRecord base_record(const ModularEnvironment& env, std::size_t m, std::string algorithm,
                                   TspBackend backend) {
    const auto meta = instance_meta(env);
    BenchmarkRecord r;
    r.instance_id = env.name;
    r.pattern = meta.pattern;
    r.n = env.module_count();
    r.m = m;
    r.link_dist = meta.link_dist;
    r.algorithm = std::move(algorithm);
    r.backend = std::string(to_string(backend));
    r.seed = meta.seed;
    return r;
}

inline void fill_stats(BenchmarkRecord& r, std::span<const Time> used_times, Time makespan) {
    const auto stats = tour_stats(used_times);
    r.makespan = makespan;
    r.mean_tour = stats.mean;
    r.std_tour = stats.stddev;
    r.robots_used = stats.count;
}

inline void mark_failed(BenchmarkRecord& r, std::string status) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.makespan = r.mean_tour = r.std_tour = nan;
    r.robots_used = 0;
    r.status = std::move(status);
}

struct RunConfig {
    TspBackend backend = TspBackend::christofides;
    /// Share one TSP run among structurally identical modules.
    bool dedupe_modules = false;
    double timeout_seconds = 3600.0;
    std::size_t held_karp_cap = 15;
    std::size_t frederickson_max_vertices = 8000;
};

struct IntegerRun {
    BenchmarkRecord record;
    std::optional<IntegerResult> result;
    std::optional<CoverageCostTable> costs;
    /// Failure message when the record status is not "ok".
    std::string message;
};

inline IntegerRun run_integer(const ModularEnvironment& env, std::size_t m, const RunConfig& cfg) {
    IntegerRun run{base_record(env, m, "integer", cfg.backend), std::nullopt, std::nullopt, {}};
    try {
        TspOptions topts;
        topts.held_karp_cap = cfg.held_karp_cap;
        topts.deadline = Deadline::after(std::chrono::duration<double>(cfg.timeout_seconds));
        Stopwatch tsp_clock;
        run.costs = compute_coverage_costs(env, cfg.backend, cfg.dedupe_modules, topts);
        run.record.tsp_seconds = tsp_clock.seconds();
        SolveOptions sopts;
        sopts.deadline = topts.deadline;
        Stopwatch dp_clock;
        run.result = solve_integer(env, run.costs->tau, m, sopts);
        run.record.dp_seconds = dp_clock.seconds();
        run.record.compute_seconds = run.record.tsp_seconds + run.record.dp_seconds;
        std::vector<Time> used;
        for (const auto& r : run.result->solution.robots)
            if (r.block) used.push_back(r.time);
        fill_stats(run.record, used, run.result->solution.makespan);
    } catch (const Timeout& e) {
        run.message = e.what();
        mark_failed(run.record, "timeout");
    } catch (const CapExceeded& e) {
        run.message = e.what();
        mark_failed(run.record, "cap");
    } catch (const std::bad_alloc& e) {
        run.message = e.what();
        mark_failed(run.record, "memory");
    } catch (const Error& e) {
        run.message = e.what();
        mark_failed(run.record, "error");
    }
    return run;
}

struct FredericksonRun {
    BenchmarkRecord record;
    std::optional<FredericksonResult> result;
    std::string message;
};

inline FredericksonRun run_frederickson(const ModularEnvironment& env, std::size_t m, const RunConfig& cfg) {
    FredericksonRun run{base_record(env, m, "frederickson", cfg.backend), std::nullopt, {}};
    try {
        FredericksonOptions fopts;
        fopts.backend = cfg.backend;
        fopts.max_vertices = cfg.frederickson_max_vertices;
        fopts.tsp.held_karp_cap = cfg.held_karp_cap;
        fopts.tsp.deadline = Deadline::after(std::chrono::duration<double>(cfg.timeout_seconds));
        run.result = frederickson(env, m, fopts);
        run.record.tsp_seconds = run.result->tsp_seconds;
        run.record.dp_seconds = run.result->split_seconds;
        run.record.compute_seconds = run.record.tsp_seconds + run.record.dp_seconds;
        std::vector<Time> used;
        const auto& sol = run.result->solution;
        for (std::size_t r = 0; r < sol.walks.size(); ++r)
            if (sol.walks[r].size() > 1) used.push_back(sol.times[r]);
        fill_stats(run.record, used, sol.makespan);
    } catch (const Timeout& e) {
        run.message = e.what();
        mark_failed(run.record, "timeout");
    } catch (const CapExceeded& e) {
        run.message = e.what();
        // The glued-graph guard stands in for memory exhaustion.
        const bool memory_guard = run.message.find("glued graph") != std::string::npos;
        mark_failed(run.record, memory_guard ? "memory" : "cap");
    } catch (const std::bad_alloc& e) {
        run.message = e.what();
        mark_failed(run.record, "memory");
    } catch (const Error& e) {
        run.message = e.what();
        mark_failed(run.record, "error");
    }
    return run;
}

/// Deterministic output order regardless of completion order.
inline void sort_records(std::vector<BenchmarkRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.instance_id, a.n, a.m, a.link_dist, a.algorithm, a.backend) <
               std::tie(b.instance_id, b.n, b.m, b.link_dist, b.algorithm, b.backend);
    });
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_number(v);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
}

}  // namespace detail

inline std::string csv_header() {
    std::string line;
    for (const auto& c : bench_columns()) line += (line.empty() ? "" : ",") + c;
    return line;
}

inline std::string to_csv_row(const BenchmarkRecord& r) {
    using detail::csv_field;
    using detail::csv_number;
    std::ostringstream ss;
    ss << csv_field(r.instance_id) << ',' << csv_field(r.pattern) << ',' << r.n << ',' << r.m << ','
       << csv_number(r.link_dist) << ',' << csv_field(r.algorithm) << ',' << csv_field(r.backend) << ','
       << csv_number(r.makespan) << ',' << csv_number(r.mean_tour) << ',' << csv_number(r.std_tour) << ','
       << r.robots_used << ',' << csv_number(r.compute_seconds) << ',' << r.seed << ','
       << csv_number(r.tsp_seconds) << ',' << csv_number(r.dp_seconds) << ',' << csv_field(r.status);
    return ss.str();
}

inline std::string records_to_csv(std::span<const BenchmarkRecord> records) {
    std::string out = std::string(kBenchSchemaLine) + "\n" + csv_header() + "\n";
    for (const auto& r : records) out += to_csv_row(r) + "\n";
    return out;
}

inline std::vector<BenchmarkRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kBenchSchemaLine) throw ParseError("csv line 1: missing schema line");
    if (!std::getline(in, line) || line != csv_header()) throw ParseError("csv line 2: header mismatch");
    std::vector<BenchmarkRecord> out;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != bench_columns().size())
            throw ParseError("csv line " + std::to_string(lineno) + ": expected " +
                             std::to_string(bench_columns().size()) + " fields");
        try {
            BenchmarkRecord r;
            r.instance_id = f[0];
            r.pattern = f[1];
            r.n = std::stoull(f[2]);
            r.m = std::stoull(f[3]);
            r.link_dist = detail::parse_double(f[4]);
            r.algorithm = f[5];
            r.backend = f[6];
            r.makespan = detail::parse_double(f[7]);
            r.mean_tour = detail::parse_double(f[8]);
            r.std_tour = detail::parse_double(f[9]);
            r.robots_used = std::stoull(f[10]);
            r.compute_seconds = detail::parse_double(f[11]);
            r.seed = std::stoull(f[12]);
            r.tsp_seconds = detail::parse_double(f[13]);
            r.dp_seconds = detail::parse_double(f[14]);
            r.status = f[15];
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError("csv line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return out;
}

/// Writes `records` to `path`; with `append`, adds rows after checking the
/// existing schema and header (an absent or empty file gets both).
inline void write_records(const std::string& path, std::span<const BenchmarkRecord> records, bool append) {
    bool fresh = true;
    if (append) {
        std::ifstream probe(path);
        std::string first, second;
        if (probe && std::getline(probe, first)) {
            std::getline(probe, second);
            if (first != kBenchSchemaLine || second != csv_header())
                throw ParseError(path + ": existing file has a different schema");
            fresh = false;
        }
    }
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw Error(path + ": cannot open for writing");
    if (fresh) out << kBenchSchemaLine << "\n" << csv_header() << "\n";
    for (const auto& r : records) out << to_csv_row(r) << "\n";
}

}  // namespace modcover
