// Solving a built model: either through an external solver subprocess fed an
// LP/MPS file (command template with {model}/{solution} placeholders), or
// through the built-in exhaustive enumeration oracle for small models.
//
// Temp-file lifecycle of solve(): a fresh directory under work_dir (default:
// the system temp dir) holds the model file, the solver log and the solution
// file; it is removed after parsing unless keep_files is set.
#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "greenplan/milp.hpp"

namespace greenplan {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SolveStatus { optimal, feasible, infeasible, timeout, error };
const char* to_string(SolveStatus s);

struct SolverConfig {
    // Command template; {model}, {solution}, {time_limit}, {gap}, {threads}
    // are substituted. Empty means: use the GREENPLAN_SOLVER environment
    // variable, else the bundled reference solver next to the running binary.
    std::string command_template;
    std::string format = "lp"; // "lp" or "mps"
    double time_limit_s = 600.0;
    double mip_rel_gap = 0.0;
    int threads = 1;
    std::string work_dir;    // empty: system temp dir
    bool keep_files = false;
};

struct RawSolution {
    SolveStatus status = SolveStatus::error;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double best_bound = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    double wall_time_s = 0.0;
    std::string message;
    std::map<std::string, double> values; // by variable name

    double value(const std::string& name) const {
        auto it = values.find(name);
        return it == values.end() ? 0.0 : it->second;
    }
    bool has_solution() const {
        return status == SolveStatus::optimal || status == SolveStatus::feasible;
    }
};

// Resolve the default external command template (env var or bundled tool).
std::string default_solver_template();

// Export, run the external solver, parse and cross-check the solution
// (the objective is recomputed from variable values and must match the
// reported one within 1e-6 relative). Throws SolverError on subprocess or
// parse failure; solver-reported infeasibility/timeouts come back as status.
RawSolution solve(const MilpModel& model, const SolverConfig& config);

// Parse solver output text: auto-detects the HiGHS-style solution format
// ("Model status" header, "# Columns N" section) and the generic two-column
// "name value" format (optional "# ..." comments and "objective X" line).
RawSolution parse_solution_text(const std::string& text);

// Serialize a solution in the generic two-column format (reloadable).
std::string format_solution(const RawSolution& sol);

// Exhaustive enumeration oracle. Models carrying their build context are
// searched structurally (install profiles x per-period operating
// configurations, with an exact interval-propagation feasibility test for the
// cyclic battery subsystem); context-free models fall back to literal
// enumeration of all free-binary assignments and must be purely binary.
// Errors when the number of free binaries exceeds max_free_binaries.
RawSolution solve_enumerate(const MilpModel& model, int max_free_binaries = 24);

// One day of battery operation at a site: per-period solar input and battery
// draw (kWh), and the level box [bmin, bmax]. The level is cyclic: the level
// entering period 1 equals the level after the last period plus its spill.
struct BatteryCycle {
    std::vector<double> solar_in;  // kWh harvested per period
    std::vector<double> batt_draw; // kWh drawn by the radio per period
    double bmin = 0.0;
    double bmax = 0.0;
};

// Exact feasibility of a cyclic battery day: propagates the reachable level
// interval symbolically in the unknown start level and intersects the
// closing condition. If feasible and start is non-null, *start receives one
// admissible level entering period 1.
bool battery_cycle_feasible(const BatteryCycle& c, double* start = nullptr);

// Reconstruct a full witness from an admissible start level: per-period
// levels entering each period and spilled surplus. Levels obey the cyclic
// recursion level[t+1] = level[t] - draw[t] + solar[t] - spill[t] within
// [bmin, bmax], and spill[t] is within [0, solar[t]].
void battery_cycle_witness(const BatteryCycle& c, double start,
                           std::vector<double>& level,
                           std::vector<double>& spill);

} // namespace greenplan
