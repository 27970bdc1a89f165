#include "greenplan/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "greenplan/units.hpp"

namespace greenplan {

namespace {

std::string idx_str(std::initializer_list<int> idx) {
    std::string out = "[";
    bool first = true;
    for (int v : idx) {
        if (!first) out += ',';
        out += std::to_string(v);
        first = false;
    }
    out += ']';
    return out;
}

std::string var_name(const char* fam, std::initializer_list<int> idx) {
    return std::string(fam) + idx_str(idx);
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

// ---------- PlanSolution layout ----------

std::uint8_t& PlanSolution::zv(int l, int jc, int q) {
    return z[(static_cast<size_t>(l) * (J - C0) + jc) * Q + (q - 1)];
}
std::uint8_t& PlanSolution::vv(int l, int s, int jc, int q, int t) {
    return v[(((static_cast<size_t>(l) * Smax + s) * (J - C0) + jc) * Q + (q - 1)) * T + (t - 1)];
}
std::uint8_t& PlanSolution::uv(int jc, int q, int t) {
    return u[(static_cast<size_t>(jc) * Q + (q - 1)) * T + (t - 1)];
}
std::uint8_t& PlanSolution::hv(int i, int j, int q, int t) {
    return h[((static_cast<size_t>(i) * J + j) * Q + (q - 1)) * T + (t - 1)];
}
std::uint8_t& PlanSolution::xv(int l, int s, int jc, int q, int t) {
    return x[(((static_cast<size_t>(l) * Smax + s) * (J - C0) + jc) * Q + (q - 1)) * T + (t - 1)];
}
double& PlanSolution::ebv(int jc, int q, int t) {
    return eb[(static_cast<size_t>(jc) * Q + (q - 1)) * T + (t - 1)];
}
double& PlanSolution::lv(int jc, int q, int t) {
    return spill[(static_cast<size_t>(jc) * Q + (q - 1)) * T + (t - 1)];
}
std::uint8_t PlanSolution::zv(int l, int jc, int q) const {
    return const_cast<PlanSolution*>(this)->zv(l, jc, q);
}
std::uint8_t PlanSolution::vv(int l, int s, int jc, int q, int t) const {
    return const_cast<PlanSolution*>(this)->vv(l, s, jc, q, t);
}
std::uint8_t PlanSolution::uv(int jc, int q, int t) const {
    return const_cast<PlanSolution*>(this)->uv(jc, q, t);
}
std::uint8_t PlanSolution::hv(int i, int j, int q, int t) const {
    return const_cast<PlanSolution*>(this)->hv(i, j, q, t);
}
std::uint8_t PlanSolution::xv(int l, int s, int jc, int q, int t) const {
    return const_cast<PlanSolution*>(this)->xv(l, s, jc, q, t);
}
double PlanSolution::ebv(int jc, int q, int t) const {
    return const_cast<PlanSolution*>(this)->ebv(jc, q, t);
}
double PlanSolution::lv(int jc, int q, int t) const {
    return const_cast<PlanSolution*>(this)->lv(jc, q, t);
}

int PlanSolution::installed_type(int j, int q) const {
    if (j < C0) return 0;
    for (int l = 1; l < L; ++l)
        for (int qp = 1; qp <= q; ++qp)
            if (zv(l, j - C0, qp)) return l;
    return -1;
}

int PlanSolution::install_year(int j) const {
    if (j < C0) return 0;
    for (int l = 1; l < L; ++l)
        for (int q = 1; q <= Q; ++q)
            if (zv(l, j - C0, q)) return q;
    return 0;
}

int PlanSolution::active_state(int j, int q, int t) const {
    if (j < C0) return 0;
    const int l = installed_type(j, q);
    if (l < 0) return -1;
    for (int s = 0; s < Smax; ++s)
        if (vv(l, s, j - C0, q, t)) return s;
    return -1;
}

// ---------- extraction ----------

PlanSolution extract_solution(const PlanningInstance& inst,
                              const std::map<std::string, double>& values, double tol) {
    PlanSolution p;
    p.L = inst.num_types();
    p.J = inst.num_sites();
    p.C0 = inst.num_existing;
    p.I = inst.num_test_points();
    p.Q = inst.Q();
    p.T = inst.T();
    for (int l = 0; l < p.L; ++l)
        p.Smax = std::max(p.Smax, static_cast<int>(inst.bs_types[l].states.size()));
    const int JC = p.J - p.C0;
    p.z.assign(static_cast<size_t>(p.L) * JC * p.Q, 0);
    p.v.assign(static_cast<size_t>(p.L) * p.Smax * JC * p.Q * p.T, 0);
    p.u.assign(static_cast<size_t>(JC) * p.Q * p.T, 0);
    p.h.assign(static_cast<size_t>(p.I) * p.J * p.Q * p.T, 0);
    p.x = p.v;
    p.eb.assign(p.u.size(), 0.0);
    p.spill.assign(p.u.size(), 0.0);

    auto binary = [&](const std::string& name) -> std::uint8_t {
        auto it = values.find(name);
        if (it == values.end()) return 0;
        const double r = std::round(it->second);
        if (std::abs(it->second - r) > tol || r < -0.5 || r > 1.5)
            throw ValidationError("non-binary value " + fmt(it->second) + " for " + name);
        return r > 0.5 ? 1 : 0;
    };
    auto level = [&](const std::string& name) -> double {
        auto it = values.find(name);
        if (it == values.end()) return 0.0;
        if (it->second < -tol)
            throw ValidationError("negative level " + fmt(it->second) + " for " + name);
        return std::max(it->second, 0.0);
    };

    for (int l = 1; l < p.L; ++l)
        for (int jc = 0; jc < JC; ++jc)
            for (int q = 1; q <= p.Q; ++q)
                p.zv(l, jc, q) = binary(var_name("z", {l, p.C0 + jc, q}));
    for (int l = 1; l < p.L; ++l)
        for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
            for (int jc = 0; jc < JC; ++jc)
                for (int q = 1; q <= p.Q; ++q)
                    for (int t = 1; t <= p.T; ++t) {
                        p.vv(l, s, jc, q, t) = binary(var_name("v", {l, s, p.C0 + jc, q, t}));
                        p.xv(l, s, jc, q, t) = binary(var_name("x", {l, s, p.C0 + jc, q, t}));
                    }
    for (int jc = 0; jc < JC; ++jc)
        for (int q = 1; q <= p.Q; ++q)
            for (int t = 1; t <= p.T; ++t) {
                p.uv(jc, q, t) = binary(var_name("u", {p.C0 + jc, q, t}));
                p.ebv(jc, q, t) = level(var_name("EB", {p.C0 + jc, q, t}));
                p.lv(jc, q, t) = level(var_name("L", {p.C0 + jc, q, t}));
            }
    for (int i = 0; i < p.I; ++i)
        for (int j = 0; j < p.J; ++j)
            for (int q = 1; q <= p.Q; ++q)
                for (int t = 1; t <= p.T; ++t) p.hv(i, j, q, t) = binary(var_name("h", {i, j, q, t}));
    return p;
}

// ---------- derived energies ----------

double grid_energy_kwh(const PlanningInstance& inst, const PlanSolution& plan, int j, int q,
                       int t) {
    if (j < plan.C0)
        return energy_kwh(inst.bs_types[0].states[0].total_w, inst.period_hours[t - 1]);
    double e = 0.0;
    for (int l = 1; l < plan.L; ++l)
        for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
            e += inst.bs_types[l].states[s].total_w *
                 (static_cast<int>(plan.vv(l, s, j - plan.C0, q, t)) -
                  static_cast<int>(plan.xv(l, s, j - plan.C0, q, t)));
    return energy_kwh(e, inst.period_hours[t - 1]);
}

double battery_energy_kwh(const PlanningInstance& inst, const PlanSolution& plan, int j, int q,
                          int t) {
    if (j < plan.C0) return 0.0;
    double e = 0.0;
    for (int l = 1; l < plan.L; ++l)
        for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
            e += inst.bs_types[l].states[s].total_w * plan.xv(l, s, j - plan.C0, q, t);
    return energy_kwh(e, inst.period_hours[t - 1]);
}

double solar_energy_kwh(const PlanningInstance& inst, const Tables& tables,
                        const PlanSolution& plan, int j, int q, int t) {
    if (j < plan.C0) return 0.0;
    double e = 0.0;
    for (int l = 1; l < plan.L; ++l)
        if (inst.bs_types[l].solar)
            for (int qp = 1; qp <= q; ++qp)
                if (plan.zv(l, j - plan.C0, qp)) e += tables.solar.yield(l, qp, q, t);
    return e;
}

// ---------- feasibility ----------

ViolationReport check_feasibility(const PlanningInstance& inst, const Tables& tables,
                                  const PlanSolution& plan, double tol) {
    ViolationReport rep;
    const int L = plan.L, J = plan.J, C0 = plan.C0, I = plan.I, Q = plan.Q, T = plan.T;

    auto states_of = [&](int l) { return static_cast<int>(inst.bs_types[l].states.size()); };
    auto add = [&](const char* fam, std::initializer_list<int> idx, char sense, double lhs,
                   double rhs, double rtol, std::string detail = "") {
        const double slack = sense == 'L'   ? rhs - lhs
                             : sense == 'G' ? lhs - rhs
                                            : -std::abs(lhs - rhs);
        if (slack >= -rtol) return;
        rep.violations.push_back({fam, idx_str(idx), lhs, rhs, sense, slack, std::move(detail)});
    };

    for (int l = 1; l < L; ++l)
        for (int jc = 0; jc < J - C0; ++jc) {
            int sum = 0;
            for (int q = 1; q <= Q; ++q) sum += plan.zv(l, jc, q);
            add("eq2", {l, C0 + jc}, 'L', sum, inst.is_allowed(l, C0 + jc) ? 1.0 : 0.0, 0.0,
                "install limited by the allowed-sites matrix");
        }
    for (int jc = 0; jc < J - C0; ++jc) {
        int sum = 0;
        for (int l = 1; l < L; ++l)
            for (int q = 1; q <= Q; ++q) sum += plan.zv(l, jc, q);
        add("eq3", {C0 + jc}, 'L', sum, 1.0, 0.0, "at most one installation per site");
    }
    for (int jc = 0; jc < J - C0; ++jc)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) {
                int rhs = 0;
                for (int l = 1; l < L; ++l)
                    if (inst.bs_types[l].solar)
                        for (int qp = 1; qp <= q; ++qp) rhs += plan.zv(l, jc, qp);
                add("eq5", {C0 + jc, q, t}, 'L', plan.uv(jc, q, t), rhs, 0.0,
                    "battery mode requires installed solar equipment");
            }
    for (int i = 0; i < I; ++i)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) {
                int sum = 0;
                for (int j = 0; j < J; ++j) sum += plan.hv(i, j, q, t);
                add("eq6", {i, q, t}, 'E', sum, activation_indicator(inst, i, q), 0.0,
                    "each active test point is served exactly once");
            }
    for (int i = 0; i < I; ++i)
        for (int jc = 0; jc < J - C0; ++jc)
            for (int q = 1; q <= Q; ++q)
                for (int t = 1; t <= T; ++t) {
                    int rhs = 0;
                    for (int l = 1; l < L; ++l)
                        for (int s = 0; s < states_of(l); ++s)
                            rhs += tables.coverage.k(i, C0 + jc, l, s, q, t) *
                                   plan.vv(l, s, jc, q, t);
                    add("eq7", {i, C0 + jc, q, t}, 'L', plan.hv(i, C0 + jc, q, t), rhs, 0.0,
                        "service requires a covering active state");
                }
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
            for (int q = 1; q <= Q; ++q)
                for (int t = 1; t <= T; ++t) {
                    int ksum = 0;
                    for (int l = 0; l < L; ++l)
                        for (int s = 0; s < states_of(l); ++s)
                            ksum += tables.coverage.k(i, j, l, s, q, t);
                    add("eq8", {i, j, q, t}, 'L', plan.hv(i, j, q, t), ksum, 0.0,
                        "service requires coverage by some type and state");
                }
    for (int j = 0; j < C0; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) {
                double lhs = 0.0;
                for (int i = 0; i < I; ++i)
                    if (plan.hv(i, j, q, t)) lhs += tables.demand.energy(i, j, q, t);
                add("eq10", {j, q, t}, 'L', lhs,
                    energy_kwh(inst.bs_types[0].states[0].transmit_w, inst.period_hours[t - 1]),
                    tol, "served demand fits the legacy transmit budget");
            }
    for (int jc = 0; jc < J - C0; ++jc)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) {
                double lhs = 0.0, rhs = 0.0;
                for (int i = 0; i < I; ++i)
                    if (plan.hv(i, C0 + jc, q, t)) lhs += tables.demand.energy(i, C0 + jc, q, t);
                for (int l = 1; l < L; ++l)
                    for (int s = 0; s < states_of(l); ++s)
                        if (plan.vv(l, s, jc, q, t))
                            rhs += energy_kwh(inst.bs_types[l].states[s].transmit_w,
                                              inst.period_hours[t - 1]);
                add("eq11", {C0 + jc, q, t}, 'L', lhs, rhs, tol,
                    "served demand fits the chosen state's transmit budget");
            }
    for (int l = 1; l < L; ++l)
        for (int jc = 0; jc < J - C0; ++jc)
            for (int q = 1; q <= Q; ++q)
                for (int t = 1; t <= T; ++t) {
                    int lhs = 0, rhs = 0;
                    for (int s = 0; s < states_of(l); ++s) lhs += plan.vv(l, s, jc, q, t);
                    for (int qp = 1; qp <= q; ++qp) rhs += plan.zv(l, jc, qp);
                    add("eq12", {l, C0 + jc, q, t}, 'E', lhs, rhs, 0.0,
                        "an installed station is in exactly one state");
                }
    for (int jc = 0; jc < J - C0; ++jc)
        for (int q = 1; q <= Q; ++q) {
            const int j = C0 + jc;
            for (int t = 2; t <= T; ++t) {
                const double step = plan.ebv(jc, q, t - 1) - plan.lv(jc, q, t - 1) -
                                    battery_energy_kwh(inst, plan, j, q, t - 1) +
                                    solar_energy_kwh(inst, tables, plan, j, q, t - 1);
                add("eq18", {j, q, t}, 'E', plan.ebv(jc, q, t), step, tol,
                    "battery level recursion");
            }
            const double wrap = plan.ebv(jc, q, T) - plan.lv(jc, q, T) -
                                battery_energy_kwh(inst, plan, j, q, T) +
                                solar_energy_kwh(inst, tables, plan, j, q, T);
            add("eq19", {j, q}, 'E', plan.ebv(jc, q, 1), wrap, tol,
                "battery level recursion wraps around the day");
            double bmin = 0.0, bmax = 0.0;
            for (int l = 1; l < L; ++l)
                if (inst.bs_types[l].solar)
                    for (int qp = 1; qp <= q; ++qp)
                        if (plan.zv(l, jc, qp)) {
                            bmin += tables.solar.bmin(l, qp, q);
                            bmax += tables.solar.bmax(l, qp, q);
                        }
            for (int t = 1; t <= T; ++t) {
                add("eq20lo", {j, q, t}, 'G', plan.ebv(jc, q, t), bmin, tol,
                    "battery level above the depth-of-discharge floor");
                add("eq20hi", {j, q, t}, 'L', plan.ebv(jc, q, t), bmax, tol,
                    "battery level below the aged capacity");
                add("eq21", {j, q, t}, 'L', plan.lv(jc, q, t),
                    solar_energy_kwh(inst, tables, plan, j, q, t), tol,
                    "spill bounded by the period's solar input");
            }
        }
    for (int l = 1; l < L; ++l)
        for (int s = 0; s < states_of(l); ++s)
            for (int jc = 0; jc < J - C0; ++jc)
                for (int q = 1; q <= Q; ++q)
                    for (int t = 1; t <= T; ++t) {
                        const int xv = plan.xv(l, s, jc, q, t);
                        const int vv = plan.vv(l, s, jc, q, t);
                        const int uv = plan.uv(jc, q, t);
                        add("eq22", {l, s, C0 + jc, q, t}, 'L', xv, vv, 0.0,
                            "battery draw only in the active state");
                        add("eq23", {l, s, C0 + jc, q, t}, 'L', xv, uv, 0.0,
                            "battery draw only in battery mode");
                        add("eq24", {l, s, C0 + jc, q, t}, 'G', xv, vv + uv - 1, 0.0,
                            "battery mode forces the active state onto the battery");
                    }
    return rep;
}

// ---------- battery replay ----------

BatteryTrajectory simulate_battery(const PlanningInstance& inst, const Tables& tables,
                                   const PlanSolution& plan, double tol) {
    BatteryTrajectory out;
    const int JC = plan.J - plan.C0;
    out.level.assign(static_cast<size_t>(JC) * plan.Q * plan.T, 0.0);
    out.wrap.assign(static_cast<size_t>(JC) * plan.Q, 0.0);
    for (int jc = 0; jc < JC; ++jc)
        for (int q = 1; q <= plan.Q; ++q) {
            const int j = plan.C0 + jc;
            double cur = plan.ebv(jc, q, 1);
            double cycle = 0.0;
            for (int t = 1; t <= plan.T; ++t) {
                out.level[(static_cast<size_t>(jc) * plan.Q + (q - 1)) * plan.T + (t - 1)] = cur;
                if (std::abs(cur - plan.ebv(jc, q, t)) > tol)
                    throw ValidationError("battery recursion mismatch at site j=" +
                                          std::to_string(j) + ", q=" + std::to_string(q) +
                                          ", t=" + std::to_string(t) + ": recomputed " + fmt(cur) +
                                          ", supplied " + fmt(plan.ebv(jc, q, t)));
                const double delta = solar_energy_kwh(inst, tables, plan, j, q, t) -
                                     plan.lv(jc, q, t) - battery_energy_kwh(inst, plan, j, q, t);
                cur += delta;
                cycle += delta;
            }
            out.wrap[static_cast<size_t>(jc) * plan.Q + (q - 1)] = cur;
            if (std::abs(cur - plan.ebv(jc, q, 1)) > tol || std::abs(cycle) > tol)
                throw ValidationError("battery cycle does not close at site j=" +
                                      std::to_string(j) + ", q=" + std::to_string(q) +
                                      ": net " + fmt(cycle));
        }
    return out;
}

// ---------- reports ----------

namespace {

void reject_infeasible(const PlanningInstance& inst, const Tables& tables,
                       const PlanSolution& plan, double tol) {
    const ViolationReport rep = check_feasibility(inst, tables, plan, tol);
    if (rep.feasible()) return;
    const Violation& v = rep.violations.front();
    throw ValidationError("infeasible solution: " + std::to_string(rep.violations.size()) +
                          " violation(s), first " + v.family + v.index + " (lhs " + fmt(v.lhs) +
                          ", rhs " + fmt(v.rhs) + ")");
}

} // namespace

CostReport compute_costs(const PlanningInstance& inst, const Tables& tables,
                         const PlanSolution& plan, std::optional<double> baseline_z, double tol) {
    reject_infeasible(inst, tables, plan, tol);
    CostReport r;
    const double mphi = inst.econ.installs_per_year * inst.econ.days_per_period;
    for (int l = 1; l < plan.L; ++l)
        for (int jc = 0; jc < plan.J - plan.C0; ++jc)
            for (int q = 1; q <= plan.Q; ++q)
                if (plan.zv(l, jc, q)) {
                    r.z_c += discount_factor(inst, q) * installation_cost(inst, l, q);
                    r.z_s += discount_factor(inst, q) * solar_equipment_cost(inst, l, q);
                }
    double e_si_kwh = 0.0, e_su_kwh = 0.0;
    for (int j = 0; j < plan.J; ++j)
        for (int q = 1; q <= plan.Q; ++q)
            for (int t = 1; t <= plan.T; ++t) {
                const double grid = mphi * grid_energy_kwh(inst, plan, j, q, t);
                r.z_g += discount_factor(inst, q) * inst.tariff(j, q, t) * grid;
                r.z_co2 += discount_factor(inst, q) *
                           tax_per_kwh(inst.tax(q), inst.grid_kg_per_kwh(q)) * grid;
                e_si_kwh += mphi * solar_energy_kwh(inst, tables, plan, j, q, t);
                e_su_kwh += mphi * battery_energy_kwh(inst, plan, j, q, t);
            }
    r.z_op = r.z_g + r.z_co2;
    r.z = r.z_c + r.z_op;
    if (baseline_z && *baseline_z != 0.0) r.delta_pct = (r.z - *baseline_z) / *baseline_z * 100.0;
    if (e_si_kwh > 0.0) r.zs_per_kwh = r.z_s / e_si_kwh;
    if (e_su_kwh > 0.0) r.zs_per_used_kwh = r.z_s / e_su_kwh;
    return r;
}

EnergyReport compute_energy(const PlanningInstance& inst, const Tables& tables,
                            const PlanSolution& plan, double tol) {
    reject_infeasible(inst, tables, plan, tol);
    EnergyReport r;
    const double mphi = inst.econ.installs_per_year * inst.econ.days_per_period;
    for (int q = 1; q <= plan.Q; ++q) {
        double grid_kwh = 0.0;
        for (int j = 0; j < plan.J; ++j)
            for (int t = 1; t <= plan.T; ++t) {
                grid_kwh += mphi * grid_energy_kwh(inst, plan, j, q, t);
                r.e_su_mwh += mphi * battery_energy_kwh(inst, plan, j, q, t) / 1000.0;
                r.e_si_mwh += mphi * solar_energy_kwh(inst, tables, plan, j, q, t) / 1000.0;
            }
        r.e_g_mwh += grid_kwh / 1000.0;
        r.co2_tons += inst.grid_kg_per_kwh(q) * grid_kwh * tons_per_kg;
    }
    r.e_n_mwh = r.e_g_mwh + r.e_su_mwh;
    return r;
}

std::string cost_report_csv_row(const std::string& scenario, const CostReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("NA"); };
    return scenario + ',' + fmt(r.z) + ',' + opt(r.delta_pct) + ',' + fmt(r.z_c) + ',' +
           fmt(r.z_s) + ',' + fmt(r.z_op) + ',' + fmt(r.z_g) + ',' + fmt(r.z_co2) + ',' +
           opt(r.zs_per_kwh) + ',' + opt(r.zs_per_used_kwh);
}

std::string energy_report_csv_row(const std::string& scenario, const EnergyReport& r) {
    return scenario + ',' + fmt(r.e_n_mwh) + ',' + fmt(r.e_g_mwh) + ',' + fmt(r.co2_tons) + ',' +
           fmt(r.e_si_mwh) + ',' + fmt(r.e_su_mwh);
}

} // namespace greenplan
