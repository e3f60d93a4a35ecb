// modcover: generate environments, solve them, and benchmark solvers.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modcover/bench.hpp"
#include "modcover/env_gen.hpp"
#include "modcover/env_io.hpp"
#include "modcover/plots.hpp"
#include "modcover/solution_io.hpp"

namespace {

using namespace modcover;

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

/// Bad flag values found after parsing; mapped to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenArgs {
    std::string pattern = "identical";
    std::size_t modules = 0;
    double link = 20.0;
    std::string base = "star";
    std::uint64_t seed = 1;
    std::string templates;
    std::string out;
};

struct RunArgs {
    std::string tsp = "christofides";
    bool dedupe = false;
    double timeout = 3600.0;
    std::size_t held_karp_cap = 15;
};

struct SolveArgs {
    std::string env;
    std::size_t robots = 0;
    std::string algo = "integer";
    std::string out;
    RunArgs run;
};

struct CompareArgs {
    std::vector<std::string> envs;
    std::vector<std::size_t> robots;
    std::vector<std::string> algos{"integer", "frederickson"};
    std::string csv;
    bool append = false;
    RunArgs run;
};

struct SweepArgs {
    std::string axis;
    double from = 0, to = -1, step = 1;
    GenArgs gen;
    std::size_t robots = 1;
    std::string algo = "integer";
    std::string csv;
    std::string svg_prefix;
    bool append = false;
    RunArgs run;
};

void add_run_flags(CLI::App* cmd, RunArgs& a) {
    cmd->add_option("--tsp", a.tsp, "TSP backend")->check(CLI::IsMember({"exact", "christofides", "greedy"}));
    cmd->add_flag("--dedupe-modules", a.dedupe, "Share one TSP run among structurally identical modules");
    cmd->add_option("--timeout", a.timeout, "Per-run time budget in seconds")->check(CLI::PositiveNumber);
    cmd->add_option("--held-karp-cap", a.held_karp_cap, "Largest module the exact backend accepts");
}

RunConfig run_config(const RunArgs& a) {
    RunConfig cfg;
    cfg.backend = parse_backend(a.tsp);
    cfg.dedupe_modules = a.dedupe;
    cfg.timeout_seconds = a.timeout;
    cfg.held_karp_cap = a.held_karp_cap;
    return cfg;
}

void add_gen_flags(CLI::App* cmd, GenArgs& a, bool modules_required) {
    cmd->add_option("--pattern", a.pattern, "identical | random | increasing | decreasing")
        ->check(CLI::IsMember({"identical", "random", "increasing", "decreasing"}));
    auto* mods = cmd->add_option("--modules", a.modules, "Number of modules")->check(CLI::PositiveNumber);
    if (modules_required) mods->required();
    cmd->add_option("--link", a.link, "Doorway-to-doorway distance (m)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--base", a.base, "Template for the identical pattern: A|B|C or ring|star|corridor");
    cmd->add_option("--seed", a.seed, "Pattern seed")->envname("MODCOVER_SEED");
    cmd->add_option("--templates", a.templates, "JSON file overriding templates A, B, C")
        ->check(CLI::ExistingFile);
}

ModuleTemplate template_from_json(const nlohmann::json& j, ModuleTemplate t) {
    for (const auto& [key, value] : j.items()) {
        if (key == "topology") t.topology = base_template(value.get<std::string>()).topology;
        else if (key == "rooms") t.rooms = value.get<std::size_t>();
        else if (key == "scale") t.scale = value.get<double>();
        else if (key == "seed") t.seed = value.get<std::uint64_t>();
        else throw UsageError("templates: unknown field '" + key + "'");
    }
    return t;
}

/// Templates A, B, C, with overrides from the optional JSON file
/// ({"A": {"rooms": 20, "scale": 0.9, ...}, ...}).
std::vector<ModuleTemplate> load_templates(const GenArgs& a) {
    std::vector<ModuleTemplate> ts{base_template('A'), base_template('B'), base_template('C')};
    if (a.templates.empty()) return ts;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(modcover::detail::read_file(a.templates));
        for (const auto& [key, value] : doc.items()) {
            if (key != "A" && key != "B" && key != "C") throw UsageError("templates: unknown module type '" + key + "'");
            auto& t = ts[static_cast<std::size_t>(key[0] - 'A')];
            t = template_from_json(value, t);
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(a.templates + ": " + e.what());
    }
    return ts;
}

ModularEnvironment generate(const GenArgs& a) {
    PatternSpec spec;
    try {
        spec.pattern = parse_pattern(a.pattern);
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
    spec.modules = a.modules;
    spec.link_dist = a.link;
    spec.seed = a.seed;
    auto ts = load_templates(a);
    if (spec.pattern == Pattern::identical) {
        ModuleTemplate chosen;
        try {
            chosen = base_template(a.base);
        } catch (const InvalidInput& e) {
            throw UsageError(e.what());
        }
        // An override file still applies to the identical pattern's template.
        const auto idx = static_cast<std::size_t>(chosen.topology == Topology::ring   ? 0
                                                  : chosen.topology == Topology::star ? 1
                                                                                      : 2);
        ts = {ts[idx]};
    }
    return make_environment(spec, ts);
}

int cmd_gen(const GenArgs& a) {
    const auto env = generate(a);
    const auto path = a.out.empty() ? env.name + ".json" : a.out;
    save_environment(env, path);
    std::cout << path << "\n";
    return 0;
}

int cmd_solve(const SolveArgs& a) {
    const auto env = load_environment(a.env);
    const auto cfg = run_config(a.run);
    if (a.algo == "integer") {
        auto run = run_integer(env, a.robots, cfg);
        if (run.record.status != "ok") throw Error(run.record.status + ": " + run.message);
        const auto& sol = run.result->solution;
        if (!a.out.empty()) {
            const auto tours = build_robot_tours(env, sol, run.costs->tours);
            save_solution(make_solution_record(env, sol, cfg.backend, tours), a.out);
        }
        std::printf("makespan=%s robots_used=%zu/%zu compute_seconds=%.6f tsp_seconds=%.6f dp_seconds=%.6f\n",
                    format_number(run.record.makespan).c_str(), run.record.robots_used, a.robots,
                    run.record.compute_seconds, run.record.tsp_seconds, run.record.dp_seconds);
    } else {
        auto run = run_frederickson(env, a.robots, cfg);
        if (run.record.status != "ok") throw Error(run.record.status + ": " + run.message);
        if (!a.out.empty())
            save_solution(make_solution_record(env, run.result->glued, run.result->solution, cfg.backend), a.out);
        std::printf("makespan=%s robots_used=%zu/%zu compute_seconds=%.6f tsp_seconds=%.6f split_seconds=%.6f\n",
                    format_number(run.record.makespan).c_str(), run.record.robots_used, a.robots,
                    run.record.compute_seconds, run.record.tsp_seconds, run.record.dp_seconds);
    }
    return 0;
}

BenchmarkRecord run_one(const ModularEnvironment& env, std::size_t m, const std::string& algo, const RunConfig& cfg) {
    auto record = algo == "integer" ? run_integer(env, m, cfg).record : run_frederickson(env, m, cfg).record;
    if (record.status != "ok") std::cerr << env.name << " m=" << m << " " << algo << ": " << record.status << "\n";
    return record;
}

void emit(const std::string& csv, std::vector<BenchmarkRecord> records, bool append, bool sorted = true) {
    if (sorted) sort_records(records);
    if (csv.empty() || csv == "-")
        std::cout << records_to_csv(records);
    else
        write_records(csv, records, append);
}

int cmd_compare(const CompareArgs& a) {
    const auto cfg = run_config(a.run);
    std::vector<ModularEnvironment> envs;
    for (const auto& path : a.envs) envs.push_back(load_environment(path));
    std::vector<BenchmarkRecord> records;
    for (const auto& env : envs)
        for (auto m : a.robots)
            for (const auto& algo : a.algos) records.push_back(run_one(env, m, algo, cfg));
    emit(a.csv, std::move(records), a.append);
    return 0;
}

std::vector<double> sweep_values(const SweepArgs& a) {
    if (!(a.step > 0) || a.from > a.to) throw UsageError("sweep: empty range");
    std::vector<double> values;
    for (std::size_t i = 0;; ++i) {
        const double v = a.from + a.step * static_cast<double>(i);
        if (v > a.to + 1e-9 * std::max(1.0, std::abs(a.to))) break;
        values.push_back(v);
    }
    if (a.axis != "link")
        for (auto v : values)
            if (v < 1 || v != std::floor(v)) throw UsageError("sweep: " + a.axis + " values must be positive integers");
    return values;
}

int cmd_sweep(const SweepArgs& a) {
    const auto values = sweep_values(a);
    const auto cfg = run_config(a.run);
    std::vector<BenchmarkRecord> records;
    std::vector<plot::AllocationRow> strips;
    for (double v : values) {
        GenArgs g = a.gen;
        std::size_t m = a.robots;
        if (a.axis == "modules") g.modules = static_cast<std::size_t>(v);
        if (a.axis == "link") g.link = v;
        if (a.axis == "robots") m = static_cast<std::size_t>(v);
        const auto env = generate(g);
        if (a.algo == "integer") {
            auto run = run_integer(env, m, cfg);
            if (run.result) strips.push_back({a.axis + "=" + format_number(v), env.module_count(), {}});
            if (run.result)
                for (const auto& r : run.result->solution.robots) strips.back().blocks.push_back(r.block);
            records.push_back(run.record);
        } else {
            records.push_back(run_one(env, m, a.algo, cfg));
        }
    }
    // Rows follow the sweep axis, which is already deterministic.
    emit(a.csv, records, a.append, false);

    if (!a.svg_prefix.empty()) {
        const auto axis_value = [&](const BenchmarkRecord& r) {
            return a.axis == "modules" ? static_cast<double>(r.n)
                   : a.axis == "robots" ? static_cast<double>(r.m)
                                        : r.link_dist;
        };
        plot::Series makespan{"makespan", {}}, mean{"mean tour", {}}, spread{"std tour", {}};
        plot::Series total{"total", {}}, tsp{"tsp", {}}, dp{a.algo == "integer" ? "dp" : "split", {}};
        for (const auto& r : records) {
            const double x = axis_value(r);
            makespan.points.emplace_back(x, r.makespan);
            mean.points.emplace_back(x, r.mean_tour);
            spread.points.emplace_back(x, r.std_tour);
            total.points.emplace_back(x, r.compute_seconds);
            tsp.points.emplace_back(x, r.tsp_seconds);
            dp.points.emplace_back(x, r.dp_seconds);
        }
        const std::string x_label = a.axis == "modules" ? "modules (n)" : a.axis == "robots" ? "robots (m)" : "link distance (m)";
        const std::vector<plot::Panel> tours{{"Tour times", x_label, "time", {makespan, mean}},
                                             {"Tour-time standard deviation", x_label, "time", {spread}}};
        const std::vector<plot::Panel> compute{{"Compute time", x_label, "seconds", {total, tsp, dp}}};
        modcover::detail::write_file(a.svg_prefix + "-tours.svg", plot::line_charts(tours));
        modcover::detail::write_file(a.svg_prefix + "-allocation.svg",
                                     plot::allocation_strips("Robot-to-module allocation", strips));
        modcover::detail::write_file(a.svg_prefix + "-compute.svg", plot::line_charts(compute));
        std::cerr << "wrote " << a.svg_prefix << "-{tours,allocation,compute}.svg\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-robot coverage of modular environments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "modcover 1.0");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic modular environment");
    add_gen_flags(gen_cmd, gen, true);
    gen_cmd->add_option("--out", gen.out, "Output path (default <name>.json)");

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Solve one environment");
    solve_cmd->add_option("env", solve.env, "Environment file")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--robots", solve.robots, "Number of robots")->required()->check(CLI::PositiveNumber);
    solve_cmd->add_option("--algo", solve.algo, "integer | frederickson")
        ->check(CLI::IsMember({"integer", "frederickson"}));
    solve_cmd->add_option("--out", solve.out, "Solution file to write");
    add_run_flags(solve_cmd, solve.run);

    CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "Run algorithms over environments and robot counts");
    compare_cmd->add_option("--env", compare.envs, "Environment files")->required()->check(CLI::ExistingFile);
    compare_cmd->add_option("--robots", compare.robots, "Robot counts")->required()->check(CLI::PositiveNumber);
    compare_cmd->add_option("--algos", compare.algos, "Algorithms")
        ->check(CLI::IsMember({"integer", "frederickson"}));
    compare_cmd->add_option("--csv", compare.csv, "CSV output (default stdout)");
    compare_cmd->add_flag("--append", compare.append, "Append rows to an existing CSV");
    add_run_flags(compare_cmd, compare.run);

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter and plot the results");
    sweep_cmd->add_option("--axis", sweep.axis, "modules | robots | link")
        ->required()
        ->check(CLI::IsMember({"modules", "robots", "link"}));
    sweep_cmd->add_option("--from", sweep.from, "First axis value")->required();
    sweep_cmd->add_option("--to", sweep.to, "Last axis value")->required();
    sweep_cmd->add_option("--step", sweep.step, "Axis increment");
    add_gen_flags(sweep_cmd, sweep.gen, false);
    sweep.gen.modules = 30;
    sweep_cmd->add_option("--robots", sweep.robots, "Robot count when not swept")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--algo", sweep.algo, "integer | frederickson")
        ->check(CLI::IsMember({"integer", "frederickson"}));
    sweep_cmd->add_option("--csv", sweep.csv, "CSV output (default stdout)");
    sweep_cmd->add_flag("--append", sweep.append, "Append rows to an existing CSV");
    sweep_cmd->add_option("--svg", sweep.svg_prefix, "Path prefix for the three SVG plots");
    add_run_flags(sweep_cmd, sweep.run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (solve_cmd->parsed()) return cmd_solve(solve);
        if (compare_cmd->parsed()) return cmd_compare(compare);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    return kUsageError;
}
