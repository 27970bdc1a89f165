// Mixed-integer model of the upgrade plan: installation choices, per-period
// operating states, user assignment, battery operation, and the discounted
// cost objective. Variable names follow a fixed contract consumed by the
// exporters, the solution parsers and the validator:
//   z[l,j,q] v[l,s,j,q,t] u[j,q,t] h[i,j,q,t] x[l,s,j,q,t] EB[j,q,t] L[j,q,t]
// with global 0-based site indices j, 0-based i/l/s and 1-based q/t.
// Grid and battery draw (and solar input) appear inline as linear expressions
// of v, x and z; only the battery level EB and the spill L stay continuous.
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "greenplan/tables.hpp"

namespace greenplan {

// The eight operating policies. Rules fix variable bounds only; the variable
// and constraint sets are identical across scenarios.
struct ScenarioSpec {
    enum class ZRule { Free, FirstYearOnly, SolarOnly };
    enum class VRule { Free, PinMax, IdleMax };
    enum class URule { Free, Zero };

    std::string id;
    ZRule z_rule = ZRule::Free;
    VRule v_rule = VRule::Free;
    URule u_rule = URule::Zero;

    // Canonical ids: B, S, O, Z, S+O, S+Z, S+Z0, FS+Z. Throws on anything else.
    static ScenarioSpec from_id(const std::string& id);
    static const std::vector<std::string>& all_ids();
};

struct Variable {
    std::string name;
    double lb = 0.0, ub = 1.0;
    bool integer = true;
    double obj = 0.0;
};

struct Row {
    std::string name;
    char sense = 'L'; // 'L' <=, 'E' ==, 'G' >=
    double rhs = 0.0;
    std::vector<std::pair<int, double>> terms; // (column, coefficient)
};

struct MilpModel {
    std::string name;
    std::vector<Variable> vars;
    std::vector<Row> rows;
    double obj_constant = 0.0; // always-on grid cost of existing sites, variable-free
    std::unordered_map<std::string, int> var_index;
    std::vector<std::string> warnings;

    // Build context retained for the enumeration oracle; null for hand-built models.
    const PlanningInstance* instance = nullptr;
    const Tables* tables = nullptr;
    ScenarioSpec scenario;

    int add_var(std::string name, double lb, double ub, bool integer, double obj);
    int col(const std::string& name) const; // -1 when absent
    int free_binary_count() const;
};

// Assemble the full model for one scenario (fixings applied before return).
// The tables must outlive the model.
MilpModel build_model(const PlanningInstance& inst, const Tables& tables,
                      const ScenarioSpec& scenario);

// Re-apply (or change) scenario fixings on a built model: resets every binary
// to [0,1], then fixes bounds per the scenario rules.
void apply_scenario(MilpModel& model, const ScenarioSpec& scenario);

struct ModelStats {
    std::unordered_map<std::string, int> vars_by_family;
    std::unordered_map<std::string, int> rows_by_family;
    int free_binaries = 0, fixed_binaries = 0, continuous = 0, nonzeros = 0;
};
ModelStats model_stats(const MilpModel& model);

} // namespace greenplan
