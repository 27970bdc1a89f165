// Command-line front end: load an instance, build tables, run scenarios
// through a solver, validate the results, and emit report artifacts.
//
// Exit codes: 0 success, 1 validator violations, 2 solver failure,
// 64 usage errors.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greenplan/export.hpp"
#include "greenplan/instance.hpp"
#include "greenplan/milp.hpp"
#include "greenplan/solver.hpp"
#include "greenplan/tables.hpp"
#include "greenplan/units.hpp"
#include "greenplan/validate.hpp"

namespace fs = std::filesystem;
using namespace greenplan;

namespace {

constexpr const char* tool_version = "greenplan 1.0.0";

struct CommonOpts {
    std::string instance_path;
    std::vector<std::string> scenarios;
    std::string solver;        // "builtin", or a command template
    std::string out_dir = "out";
    std::string format = "lp";
    double tax_start = -1.0;   // <0: keep the instance schedule
    double tax_step = 0.0;
    double time_limit_s = 600.0;
    double gap = 0.0;
    int max_enum = 1 << 20;
    bool peak_only = false;
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    write_file(p.string(), text);
}

std::vector<std::string> resolve_scenarios(const std::vector<std::string>& asked) {
    if (asked.empty() || (asked.size() == 1 && asked[0] == "all")) return ScenarioSpec::all_ids();
    for (const auto& id : asked) ScenarioSpec::from_id(id); // throws on unknown
    return asked;
}

PlanningInstance load_with_tax(const CommonOpts& o) {
    PlanningInstance inst = load_instance(o.instance_path);
    if (o.tax_start >= 0.0)
        inst.econ.tax_per_ton = default_tax_schedule(o.tax_start, o.tax_step, inst.Q());
    return inst;
}

RawSolution run_solver(const MilpModel& model, const CommonOpts& o) {
    if (o.solver == "builtin") return solve_enumerate(model, o.max_enum);
    SolverConfig cfg;
    if (!o.solver.empty()) cfg.command_template = o.solver;
    cfg.format = o.format;
    cfg.time_limit_s = o.time_limit_s;
    cfg.mip_rel_gap = o.gap;
    return solve(model, cfg);
}

// period with the highest total demand rate of a year
int peak_period(const PlanningInstance& inst, const Tables& tb, int q) {
    int best_t = 1;
    double best = -1.0;
    for (int t = 1; t <= inst.T(); ++t) {
        double sum = 0.0;
        for (int i = 0; i < inst.num_test_points(); ++i) sum += tb.demand.rate(i, q, t);
        if (sum > best) {
            best = sum;
            best_t = t;
        }
    }
    return best_t;
}

std::string timeline_csv(const PlanningInstance& inst, const PlanSolution& plan) {
    std::string out = "year,site,type\n";
    for (int j = 0; j < inst.num_existing; ++j)
        out += "0," + inst.sites[j].id + "," + inst.bs_types[0].name + "\n";
    for (int q = 1; q <= inst.Q(); ++q)
        for (int jc = 0; jc < inst.num_candidates(); ++jc)
            for (int l = 1; l < inst.num_types(); ++l)
                if (plan.zv(l, jc, q))
                    out += std::to_string(q) + "," + inst.sites[inst.num_existing + jc].id + "," +
                           inst.bs_types[l].name + "\n";
    return out;
}

std::string assignments_csv(const PlanningInstance& inst, const Tables& tb,
                            const PlanSolution& plan, bool peak_only) {
    std::string out = "year,period,test_point,site\n";
    for (int q = 1; q <= inst.Q(); ++q) {
        const int tp = peak_period(inst, tb, q);
        for (int t = 1; t <= inst.T(); ++t) {
            if (peak_only && t != tp) continue;
            for (int i = 0; i < inst.num_test_points(); ++i)
                for (int j = 0; j < inst.num_sites(); ++j)
                    if (plan.hv(i, j, q, t))
                        out += std::to_string(q) + "," + std::to_string(t) + "," +
                               inst.test_points[i].id + "," + inst.sites[j].id + "\n";
        }
    }
    return out;
}

std::string violations_text(const ViolationReport& rep) {
    if (rep.feasible()) return "feasible\n";
    std::string out = std::to_string(rep.violations.size()) + " violation(s)\n";
    for (const auto& v : rep.violations)
        out += v.family + v.index + " sense " + v.sense + " lhs " + fmt(v.lhs) + " rhs " +
               fmt(v.rhs) + " slack " + fmt(v.slack) + (v.detail.empty() ? "" : " : " + v.detail) +
               "\n";
    return out;
}

std::string manifest_json(const CommonOpts& o, const std::vector<std::string>& scenarios,
                          const std::map<std::string, std::string>& checksums) {
    std::string out = "{\n";
    out += "  \"tool\": \"" + std::string(tool_version) + "\",\n";
    out += "  \"instance\": \"" + o.instance_path + "\",\n";
    out += "  \"scenarios\": [";
    for (size_t k = 0; k < scenarios.size(); ++k)
        out += (k ? ", " : "") + ("\"" + scenarios[k] + "\"");
    out += "],\n";
    out += "  \"solver\": \"" + (o.solver.empty() ? "default" : o.solver) + "\",\n";
    out += "  \"format\": \"" + o.format + "\",\n";
    out += "  \"time_limit_s\": " + fmt(o.time_limit_s) + ",\n";
    out += "  \"mip_rel_gap\": " + fmt(o.gap) + ",\n";
    if (o.tax_start >= 0.0) {
        out += "  \"tax_start\": " + fmt(o.tax_start) + ",\n";
        out += "  \"tax_step\": " + fmt(o.tax_step) + ",\n";
    }
    out += "  \"seed\": 0,\n";
    out += "  \"checksums\": {";
    bool first = true;
    for (const auto& [name, sum] : checksums) {
        out += (first ? "\n" : ",\n");
        out += "    \"" + name + "\": \"" + sum + "\"";
        first = false;
    }
    out += first ? "}\n" : "\n  }\n";
    out += "}\n";
    return out;
}

const char* costs_header =
    "scenario,Z,delta_pct,Z_c,Z_s,Z_op,Z_g,Z_CO2,Z_s_per_kwh,Z_s_star_per_kwh\n";
const char* energy_header = "scenario,E_N,E_G,CO2,E_si,E_su\n";

int cmd_run(const CommonOpts& o) {
    const PlanningInstance inst = load_with_tax(o);
    const Tables tables = build_tables(inst);
    const std::vector<std::string> scenarios = resolve_scenarios(o.scenarios);

    std::string costs_csv = costs_header;
    std::string energy_csv = energy_header;
    std::map<std::string, std::string> checksums;
    std::optional<double> baseline_z;
    int exit_code = 0;

    // baseline first so every other scenario can report a delta against it
    std::vector<std::string> ordered = scenarios;
    for (size_t k = 0; k < ordered.size(); ++k)
        if (ordered[k] == "B" && k != 0) std::swap(ordered[0], ordered[k]);

    for (const auto& id : ordered) {
        MilpModel model = build_model(inst, tables, ScenarioSpec::from_id(id));
        for (const auto& w : model.warnings) std::cerr << "warning: " << id << ": " << w << "\n";
        RawSolution sol;
        try {
            sol = run_solver(model, o);
        } catch (const SolverError& e) {
            std::cerr << "solver failure on scenario " << id << ": " << e.what() << "\n";
            return 2;
        }
        const fs::path dir = fs::path(o.out_dir) / id;
        if (!sol.has_solution()) {
            write_text(dir / "solution.sol", format_solution(sol));
            std::cerr << "scenario " << id << ": " << to_string(sol.status) << "\n";
            return 2;
        }
        write_text(dir / "solution.sol", format_solution(sol));
        checksums[id + "/solution.sol"] = fnv1a64_hex(format_solution(sol));

        const PlanSolution plan = extract_solution(inst, sol.values);
        const ViolationReport rep = check_feasibility(inst, tables, plan);
        write_text(dir / "violations.txt", violations_text(rep));
        if (!rep.feasible()) {
            std::cerr << "scenario " << id << ": " << rep.violations.size()
                      << " constraint violation(s)\n";
            exit_code = 1;
            continue;
        }
        const CostReport costs = compute_costs(inst, tables, plan, baseline_z);
        const EnergyReport energy = compute_energy(inst, tables, plan);
        if (id == "B") baseline_z = costs.z;
        costs_csv += cost_report_csv_row(id, costs) + "\n";
        energy_csv += energy_report_csv_row(id, energy) + "\n";
        write_text(dir / "timeline.csv", timeline_csv(inst, plan));
        write_text(dir / "assignments.csv", assignments_csv(inst, tables, plan, o.peak_only));
    }

    write_text(fs::path(o.out_dir) / "costs.csv", costs_csv);
    write_text(fs::path(o.out_dir) / "energy.csv", energy_csv);
    write_text(fs::path(o.out_dir) / "manifest.json", manifest_json(o, scenarios, checksums));
    return exit_code;
}

int cmd_export(const CommonOpts& o) {
    const PlanningInstance inst = load_with_tax(o);
    const Tables tables = build_tables(inst);
    const std::vector<std::string> scenarios = resolve_scenarios(o.scenarios);
    std::map<std::string, std::string> checksums;
    for (const auto& id : scenarios) {
        MilpModel model = build_model(inst, tables, ScenarioSpec::from_id(id));
        const std::string text = o.format == "mps" ? write_mps(model) : write_lp(model);
        const std::string fname = id + "." + o.format;
        write_text(fs::path(o.out_dir) / fname, text);
        checksums[fname] = fnv1a64_hex(text);
    }
    write_text(fs::path(o.out_dir) / "manifest.json", manifest_json(o, scenarios, checksums));
    return 0;
}

int cmd_sweep(const CommonOpts& o, const std::vector<std::string>& levels_arg) {
    std::vector<std::pair<double, double>> levels;
    if (levels_arg.empty())
        for (int k = 0; k <= 5; ++k) levels.push_back({10.0 * k, 10.0 * k});
    else
        for (const auto& spec : levels_arg) {
            const auto colon = spec.find(':');
            if (colon == std::string::npos)
                throw CLI::ValidationError("levels", "expected start:step, got " + spec);
            levels.push_back({std::stod(spec.substr(0, colon)), std::stod(spec.substr(colon + 1))});
        }

    const std::vector<std::string> scenarios = resolve_scenarios(
        o.scenarios.empty() ? std::vector<std::string>{"S+Z"} : o.scenarios);
    if (scenarios.size() != 1)
        throw CLI::ValidationError("scenario", "sweep runs one scenario at a time");
    const ScenarioSpec scenario = ScenarioSpec::from_id(scenarios[0]);

    std::string csv = "tax_start,tax_step,Z,E_G,CO2,solar_installs\n";
    for (const auto& [start, step] : levels) {
        CommonOpts lo = o;
        lo.tax_start = start;
        lo.tax_step = step;
        const PlanningInstance inst = load_with_tax(lo);
        const Tables tables = build_tables(inst);
        MilpModel model = build_model(inst, tables, scenario);
        RawSolution sol;
        try {
            sol = run_solver(model, o);
        } catch (const SolverError& e) {
            std::cerr << "solver failure at tax level " << start << ":" << step << ": " << e.what()
                      << "\n";
            return 2;
        }
        if (!sol.has_solution()) {
            std::cerr << "tax level " << start << ":" << step << ": " << to_string(sol.status)
                      << "\n";
            return 2;
        }
        const PlanSolution plan = extract_solution(inst, sol.values);
        const ViolationReport rep = check_feasibility(inst, tables, plan);
        if (!rep.feasible()) {
            std::cerr << "tax level " << start << ":" << step << ": "
                      << rep.violations.size() << " violation(s)\n";
            return 1;
        }
        const EnergyReport energy = compute_energy(inst, tables, plan);
        int solar = 0;
        for (int l = 1; l < inst.num_types(); ++l)
            if (inst.bs_types[l].solar)
                for (int jc = 0; jc < inst.num_candidates(); ++jc)
                    for (int q = 1; q <= inst.Q(); ++q) solar += plan.zv(l, jc, q);
        csv += fmt(start) + "," + fmt(step) + "," + fmt(sol.objective) + "," +
               fmt(energy.e_g_mwh) + "," + fmt(energy.co2_tons) + "," + std::to_string(solar) +
               "\n";
    }
    write_text(fs::path(o.out_dir) / "sweep.csv", csv);
    std::cout << csv;
    return 0;
}

int cmd_validate(const CommonOpts& o, const std::string& solution_path) {
    const PlanningInstance inst = load_with_tax(o);
    const Tables tables = build_tables(inst);
    std::ifstream in(solution_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open solution file " << solution_path << "\n";
        return 64;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const RawSolution sol = parse_solution_text(text);
    const PlanSolution plan = extract_solution(inst, sol.values);
    const ViolationReport rep = check_feasibility(inst, tables, plan);
    std::cout << violations_text(rep);
    if (!rep.feasible()) return 1;
    const CostReport costs = compute_costs(inst, tables, plan);
    const EnergyReport energy = compute_energy(inst, tables, plan);
    std::cout << costs_header << cost_report_csv_row("-", costs) << "\n";
    std::cout << energy_header << energy_report_csv_row("-", energy) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Green cellular upgrade planner"};
    app.require_subcommand(1);
    CommonOpts opts;
    std::vector<std::string> levels_arg;
    std::string solution_path;

    auto add_common = [&](CLI::App* cmd, bool needs_solver) {
        cmd->add_option("--instance", opts.instance_path, "instance JSON path")->required();
        cmd->add_option("--scenario", opts.scenarios,
                        "scenario id (repeatable) or \"all\" (default)");
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--format", opts.format, "model file format")
            ->check(CLI::IsMember({"lp", "mps"}));
        cmd->add_option("--tax-start", opts.tax_start, "override tax schedule start ($/ton)");
        cmd->add_option("--tax-step", opts.tax_step, "override tax schedule yearly step ($/ton)");
        if (needs_solver) {
            cmd->add_option("--solver", opts.solver,
                            "\"builtin\" or a command template with {model} {solution} "
                            "{time_limit} {gap} (default: GREENPLAN_SOLVER or bundled runner)");
            cmd->add_option("--time-limit", opts.time_limit_s, "solver time limit, seconds");
            cmd->add_option("--gap", opts.gap, "relative MIP gap");
            cmd->add_option("--max-enum", opts.max_enum, "builtin solver free-binary limit");
        }
    };

    CLI::App* run = app.add_subcommand("run", "solve scenarios and emit reports");
    add_common(run, true);
    run->add_flag("--peak-only", opts.peak_only, "assignment dumps for the peak period only");

    CLI::App* sweep = app.add_subcommand("sweep", "carbon-tax sweep on one scenario");
    add_common(sweep, true);
    sweep->add_option("--levels", levels_arg, "tax levels as start:step (repeatable)");

    CLI::App* exportc = app.add_subcommand("export", "write model files without solving");
    add_common(exportc, false);

    CLI::App* validate = app.add_subcommand("validate", "check a solution file");
    add_common(validate, false);
    validate->add_option("--solution", solution_path, "solution file to check")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 64;
    }

    try {
        if (run->parsed()) return cmd_run(opts);
        if (sweep->parsed()) return cmd_sweep(opts, levels_arg);
        if (exportc->parsed()) return cmd_export(opts);
        if (validate->parsed()) return cmd_validate(opts, solution_path);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 64;
}
