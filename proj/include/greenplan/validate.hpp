// Independent plan validation: constraint checking by direct arithmetic,
// battery ledger simulation, and cost/energy reporting. Shares only the
// instance and precomputed tables with the model builder, never its rows.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greenplan/instance.hpp"
#include "greenplan/tables.hpp"

namespace greenplan {

// Decision tables extracted from a solver value map. Binaries are stored
// rounded; extraction rejects values farther than tol from an integer and
// negative continuous levels. Index conventions follow the instance: j is
// the global site index, candidate-only tables are offset by num_existing.
struct PlanSolution {
    std::string solver_id;
    std::string scenario;

    // flattened tables; helpers below document the layouts
    std::vector<std::uint8_t> z; // [l][jc][q]
    std::vector<std::uint8_t> v; // [l][s][jc][q][t]
    std::vector<std::uint8_t> u; // [jc][q][t]
    std::vector<std::uint8_t> h; // [i][j][q][t]
    std::vector<std::uint8_t> x; // [l][s][jc][q][t]
    std::vector<double> eb;      // [jc][q][t]
    std::vector<double> spill;   // [jc][q][t]

    int L = 0, Smax = 0, J = 0, C0 = 0, I = 0, Q = 0, T = 0;

    std::uint8_t& zv(int l, int jc, int q);
    std::uint8_t& vv(int l, int s, int jc, int q, int t);
    std::uint8_t& uv(int jc, int q, int t);
    std::uint8_t& hv(int i, int j, int q, int t);
    std::uint8_t& xv(int l, int s, int jc, int q, int t);
    double& ebv(int jc, int q, int t);
    double& lv(int jc, int q, int t);
    std::uint8_t zv(int l, int jc, int q) const;
    std::uint8_t vv(int l, int s, int jc, int q, int t) const;
    std::uint8_t uv(int jc, int q, int t) const;
    std::uint8_t hv(int i, int j, int q, int t) const;
    std::uint8_t xv(int l, int s, int jc, int q, int t) const;
    double ebv(int jc, int q, int t) const;
    double lv(int jc, int q, int t) const;

    // installed type at global site j in year q (-1 when none); existing
    // sites always report the legacy type 0
    int installed_type(int j, int q) const;
    int install_year(int j) const; // 0 when never installed
    // active state of global site j in (q, t); -1 when switched off
    int active_state(int j, int q, int t) const;
};

// Builds a PlanSolution from solver variable values (missing names read as
// 0). Throws ValidationError when a binary is farther than tol from {0, 1}
// or a continuous level is below -tol.
PlanSolution extract_solution(const PlanningInstance& inst,
                              const std::map<std::string, double>& values, double tol = 1e-6);

struct Violation {
    std::string family; // constraint family identifier, e.g. "eq7"
    std::string index;  // bracketed index tuple, e.g. "[2,1,1,3]"
    double lhs = 0.0;
    double rhs = 0.0;
    char sense = 'L';   // 'L' lhs <= rhs, 'G' lhs >= rhs, 'E' lhs == rhs
    double slack = 0.0; // negative exactly when violated
    std::string detail;
};

struct ViolationReport {
    std::vector<Violation> violations;
    bool feasible() const { return violations.empty(); }
};

// Evaluates every constraint family by direct arithmetic. tol is absolute
// on energy rows (kWh); binary rows are checked exactly.
ViolationReport check_feasibility(const PlanningInstance& inst, const Tables& tables,
                                  const PlanSolution& plan, double tol = 1e-6);

// Derived per-(j,q,t) energy quantities recomputed from primitives, kWh.
double grid_energy_kwh(const PlanningInstance& inst, const PlanSolution& plan, int j, int q, int t);
double battery_energy_kwh(const PlanningInstance& inst, const PlanSolution& plan, int j, int q,
                          int t);
double solar_energy_kwh(const PlanningInstance& inst, const Tables& tables,
                        const PlanSolution& plan, int j, int q, int t);

struct BatteryTrajectory {
    // [jc][q][t] recomputed levels; wrap holds the recursion value closing
    // the cycle back onto t = 1
    std::vector<double> level;
    std::vector<double> wrap; // [jc][q]
};

// Replays the battery recursion from the supplied starting levels and
// verifies the supplied trajectory and the cyclic closure within tol.
// Throws ValidationError naming the first offending (j, q, t) on mismatch.
BatteryTrajectory simulate_battery(const PlanningInstance& inst, const Tables& tables,
                                   const PlanSolution& plan, double tol = 1e-6);

struct CostReport {
    double z = 0.0;     // total discounted cost
    double z_c = 0.0;   // capital cost of installations
    double z_s = 0.0;   // solar-equipment share of z_c
    double z_op = 0.0;  // z_g + z_co2
    double z_g = 0.0;   // grid energy cost
    double z_co2 = 0.0; // emission tax cost
    std::optional<double> delta_pct;        // vs baseline z when provided
    std::optional<double> zs_per_kwh;       // z_s / produced solar energy
    std::optional<double> zs_per_used_kwh;  // z_s / used solar energy
};

struct EnergyReport {
    double e_n_mwh = 0.0;  // total network consumption
    double e_g_mwh = 0.0;  // grid share
    double co2_tons = 0.0; // emission-factor weighted grid energy
    double e_si_mwh = 0.0; // solar production
    double e_su_mwh = 0.0; // solar energy used (battery-served share)
};

// Both reject infeasible input (ValidationError carrying the first
// violation) before computing the report.
CostReport compute_costs(const PlanningInstance& inst, const Tables& tables,
                         const PlanSolution& plan,
                         std::optional<double> baseline_z = std::nullopt, double tol = 1e-6);
EnergyReport compute_energy(const PlanningInstance& inst, const Tables& tables,
                            const PlanSolution& plan, double tol = 1e-6);

// Delimited rendering used by the CLI tables; NA cells mirror absent values.
std::string cost_report_csv_row(const std::string& scenario, const CostReport& r);
std::string energy_report_csv_row(const std::string& scenario, const EnergyReport& r);

} // namespace greenplan
