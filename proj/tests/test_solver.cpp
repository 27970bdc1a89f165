#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>

#include <greenplan/instance.hpp>
#include <greenplan/milp.hpp>
#include <greenplan/solver.hpp>
#include <greenplan/tables.hpp>

#include "test_config.hpp"

using namespace greenplan;
namespace fs = std::filesystem;

namespace {

std::string inst_path(const char* name) {
    return std::string(GREENPLAN_INSTANCE_DIR) + "/" + name;
}

// min x + 2y subject to x + y >= 1; optimum picks x alone
MilpModel toy_model() {
    MilpModel m;
    m.name = "toy";
    const int x = m.add_var("x", 0.0, 1.0, true, 1.0);
    const int y = m.add_var("y", 0.0, 1.0, true, 2.0);
    m.rows.push_back(Row{"pick", 'G', 1.0, {{x, 1.0}, {y, 1.0}}});
    return m;
}

struct EnvGuard {
    EnvGuard() { unsetenv("GREENPLAN_SOLVER"); }
    ~EnvGuard() { unsetenv("GREENPLAN_SOLVER"); }
};

} // namespace

TEST_CASE("reference-format solutions parse with bounds and values") {
    const auto sol = parse_solution_text(
        "Model status\n"
        "Optimal\n"
        "\n"
        "Objective 12.5\n"
        "\n"
        "# Columns 2\n"
        "x 1\n"
        "y 0.5\n"
        "# mip_dual_bound 12.5\n"
        "# mip_gap 0\n");
    CHECK(sol.status == SolveStatus::optimal);
    CHECK(sol.has_solution());
    CHECK(sol.objective == 12.5);
    CHECK(sol.best_bound == 12.5);
    CHECK(sol.gap == 0.0);
    CHECK(sol.values.size() == 2);
    CHECK(sol.value("x") == 1.0);
    CHECK(sol.value("y") == 0.5);
    CHECK(sol.value("missing") == 0.0);
}

TEST_CASE("a timeout report keeps the dual bound and carries no values") {
    const auto sol = parse_solution_text(
        "Model status\n"
        "Time limit reached\n"
        "\n"
        "# mip_dual_bound 42.5\n");
    CHECK(sol.status == SolveStatus::timeout);
    CHECK_FALSE(sol.has_solution());
    CHECK(sol.best_bound == 42.5);
    CHECK(std::isnan(sol.objective));
    CHECK(sol.values.empty());

    const auto bad = parse_solution_text("Model status\nInfeasible\n");
    CHECK(bad.status == SolveStatus::infeasible);
    CHECK_FALSE(bad.has_solution());
}

TEST_CASE("generic name/value solutions parse") {
    const auto sol = parse_solution_text(
        "# produced by a third-party wrapper\n"
        "status optimal\n"
        "objective 3\n"
        "x 1\n"
        "y 2\n");
    CHECK(sol.status == SolveStatus::optimal);
    CHECK(sol.objective == 3.0);
    CHECK(sol.value("y") == 2.0);

    // objective keyword is case-insensitive and has a short alias
    CHECK(parse_solution_text("Obj 4\nx 1\n").objective == 4.0);
    // status-only reports are fine when they claim no solution
    CHECK(parse_solution_text("status infeasible\n").status == SolveStatus::infeasible);
}

TEST_CASE("malformed solution text is rejected") {
    // claims optimal but carries no values
    CHECK_THROWS_AS(parse_solution_text("Model status\nOptimal\n\nObjective 1\n"), SolverError);
    CHECK_THROWS_AS(parse_solution_text("status optimal\n"), SolverError);
    CHECK_THROWS_AS(parse_solution_text("x notanumber\n"), SolverError);
    CHECK_THROWS_AS(parse_solution_text(""), SolverError);
}

TEST_CASE("format and parse round trip") {
    RawSolution in;
    in.status = SolveStatus::feasible;
    in.objective = 7.25;
    in.values = {{"a", 1.0}, {"b", 0.0}, {"EB[1,1,1]", 2.7015625}};
    const auto out = parse_solution_text(format_solution(in));
    CHECK(out.status == SolveStatus::feasible);
    CHECK(out.objective == in.objective);
    CHECK(out.values == in.values);

    RawSolution none;
    none.status = SolveStatus::infeasible;
    const auto out2 = parse_solution_text(format_solution(none));
    CHECK(out2.status == SolveStatus::infeasible);
    CHECK(out2.values.empty());

    CHECK(std::string(to_string(SolveStatus::timeout)) == "timeout");
    CHECK(std::string(to_string(SolveStatus::error)) == "error");
}

TEST_CASE("a toy model solves through the external pipeline") {
    EnvGuard guard;
    const auto m = toy_model();
    SolverConfig cfg;
    const auto sol = solve(m, cfg);
    CHECK(sol.status == SolveStatus::optimal);
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.value("x") == doctest::Approx(1.0));
    CHECK(sol.value("y") == doctest::Approx(0.0));
    CHECK(sol.wall_time_s > 0.0);

    // same answer through the MPS path
    SolverConfig mps = cfg;
    mps.format = "mps";
    CHECK(solve(m, mps).objective == doctest::Approx(1.0).epsilon(1e-9));

    SolverConfig bad = cfg;
    bad.format = "xlsx";
    CHECK_THROWS_AS(solve(m, bad), SolverError);
}

TEST_CASE("the objective constant shifts the reported objective") {
    EnvGuard guard;
    auto m = toy_model();
    m.obj_constant = 10.0;
    const auto sol = solve(m, SolverConfig{});
    CHECK(sol.objective == doctest::Approx(11.0).epsilon(1e-9));
}

TEST_CASE("an infeasible model reports infeasible") {
    EnvGuard guard;
    auto m = toy_model();
    m.vars[0].ub = 0.0;
    m.vars[1].ub = 0.0; // pick row now unsatisfiable
    const auto sol = solve(m, SolverConfig{});
    CHECK(sol.status == SolveStatus::infeasible);
    CHECK_FALSE(sol.has_solution());
}

TEST_CASE("a tight time limit reports a timeout") {
    EnvGuard guard;
    const auto inst = load_instance(inst_path("p1-like.json"));
    const auto tables = build_tables(inst);
    const auto model = build_model(inst, tables, ScenarioSpec::from_id("S+Z"));
    SolverConfig cfg;
    cfg.time_limit_s = 0.005;
    const auto sol = solve(model, cfg);
    CHECK(sol.status == SolveStatus::timeout);
    CHECK_FALSE(sol.has_solution());
}

TEST_CASE("solver files can be kept for inspection") {
    EnvGuard guard;
    const auto dir = fs::temp_directory_path() / "gp-test-keep";
    fs::remove_all(dir);
    SolverConfig cfg;
    cfg.work_dir = dir.string();
    cfg.keep_files = true;
    CHECK(solve(toy_model(), cfg).status == SolveStatus::optimal);
    bool found_model = false, found_solution = false;
    for (const auto& sub : fs::recursive_directory_iterator(dir)) {
        found_model |= sub.path().filename() == "model.lp";
        found_solution |= sub.path().filename() == "solution.sol";
    }
    CHECK(found_model);
    CHECK(found_solution);
    fs::remove_all(dir);
}

TEST_CASE("the environment variable overrides the solver command") {
    EnvGuard guard;
    // default resolution finds the bundled runner next to the binary
    CHECK(default_solver_template().find("milp_solve.py") != std::string::npos);

    setenv("GREENPLAN_SOLVER", "false # {model} {solution}", 1);
    CHECK(default_solver_template() == "false # {model} {solution}");
    CHECK_THROWS_AS(solve(toy_model(), SolverConfig{}), SolverError);
    unsetenv("GREENPLAN_SOLVER");

    // an explicit template wins regardless of the environment
    SolverConfig cfg;
    cfg.command_template = "false # {model} {solution}";
    CHECK_THROWS_AS(solve(toy_model(), cfg), SolverError);
}

TEST_CASE("a lying solver is caught by recomputing the objective") {
    EnvGuard guard;
    SolverConfig cfg;
    cfg.command_template =
        "sh -c \"printf 'Model status\\nOptimal\\n\\nObjective 999\\n\\n# Columns 2\\nx 1\\ny 0\\n'"
        " > {solution}\"";
    CHECK_THROWS_WITH_AS(solve(toy_model(), cfg), doctest::Contains("objective mismatch"),
                         SolverError);
}
