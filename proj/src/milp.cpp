// Model assembly: variables, constraint rows, objective, scenario fixings.
#include "greenplan/milp.hpp"

#include <cstdio>
#include <stdexcept>

#include "greenplan/units.hpp"

namespace greenplan {

namespace {

std::string nm(const char* fam, std::initializer_list<int> idx) {
    std::string out(fam);
    out += '[';
    bool first = true;
    char buf[16];
    for (int v : idx) {
        if (!first) out += ',';
        std::snprintf(buf, sizeof buf, "%d", v);
        out += buf;
        first = false;
    }
    out += ']';
    return out;
}

} // namespace

ScenarioSpec ScenarioSpec::from_id(const std::string& id) {
    ScenarioSpec s;
    s.id = id;
    using Z = ScenarioSpec::ZRule;
    using V = ScenarioSpec::VRule;
    using U = ScenarioSpec::URule;
    if (id == "B") { s.v_rule = V::PinMax; s.u_rule = U::Zero; }
    else if (id == "S") { s.v_rule = V::PinMax; s.u_rule = U::Free; }
    else if (id == "O") { s.v_rule = V::IdleMax; s.u_rule = U::Zero; }
    else if (id == "Z") { s.v_rule = V::Free; s.u_rule = U::Zero; }
    else if (id == "S+O") { s.v_rule = V::IdleMax; s.u_rule = U::Free; }
    else if (id == "S+Z") { s.v_rule = V::Free; s.u_rule = U::Free; }
    else if (id == "S+Z0") { s.v_rule = V::Free; s.u_rule = U::Free; s.z_rule = Z::FirstYearOnly; }
    else if (id == "FS+Z") { s.v_rule = V::Free; s.u_rule = U::Free; s.z_rule = Z::SolarOnly; }
    else throw std::invalid_argument("unknown scenario id \"" + id + "\"");
    return s;
}

const std::vector<std::string>& ScenarioSpec::all_ids() {
    static const std::vector<std::string> ids = {"B", "S", "O", "Z", "S+O", "S+Z", "S+Z0", "FS+Z"};
    return ids;
}

int MilpModel::add_var(std::string name, double lb, double ub, bool integer, double obj) {
    int idx = static_cast<int>(vars.size());
    var_index.emplace(name, idx);
    vars.push_back(Variable{std::move(name), lb, ub, integer, obj});
    return idx;
}

int MilpModel::col(const std::string& name) const {
    auto it = var_index.find(name);
    return it == var_index.end() ? -1 : it->second;
}

int MilpModel::free_binary_count() const {
    int n = 0;
    for (const auto& v : vars)
        if (v.integer && v.lb < v.ub) ++n;
    return n;
}

MilpModel build_model(const PlanningInstance& inst, const Tables& tables,
                      const ScenarioSpec& scenario) {
    MilpModel m;
    m.name = inst.name;
    m.instance = &inst;
    m.tables = &tables;

    const int J = inst.num_sites(), I = inst.num_test_points(), L = inst.num_types();
    const int Q = inst.Q(), T = inst.T();
    const int C0 = inst.num_existing; // first candidate index
    const double mphi = inst.econ.installs_per_year * inst.econ.days_per_period;

    // $/kWh of grid draw in year q at site j, tariff plus carbon tax
    auto grid_rate = [&](int j, int q, int t) {
        return inst.tariff(j, q, t) + tax_per_kwh(inst.tax(q), inst.grid_kg_per_kwh(q));
    };

    // --- variables, in the fixed family order ---
    for (int l = 1; l < L; ++l)
        for (int j = C0; j < J; ++j)
            for (int q = 1; q <= Q; ++q)
                m.add_var(nm("z", {l, j, q}), 0, 1, true,
                          discount_factor(inst, q) * installation_cost(inst, l, q));
    for (int l = 1; l < L; ++l)
        for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
            for (int j = C0; j < J; ++j)
                for (int q = 1; q <= Q; ++q)
                    for (int t = 1; t <= T; ++t)
                        m.add_var(nm("v", {l, s, j, q, t}), 0, 1, true,
                                  discount_factor(inst, q) * mphi * grid_rate(j, q, t) *
                                      energy_kwh(inst.bs_types[l].states[s].total_w,
                                                 inst.period_hours[t - 1]));
    for (int j = C0; j < J; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) m.add_var(nm("u", {j, q, t}), 0, 1, true, 0.0);
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
            for (int q = 1; q <= Q; ++q)
                for (int t = 1; t <= T; ++t) m.add_var(nm("h", {i, j, q, t}), 0, 1, true, 0.0);
    for (int l = 1; l < L; ++l)
        for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
            for (int j = C0; j < J; ++j)
                for (int q = 1; q <= Q; ++q)
                    for (int t = 1; t <= T; ++t)
                        m.add_var(nm("x", {l, s, j, q, t}), 0, 1, true,
                                  -discount_factor(inst, q) * mphi * grid_rate(j, q, t) *
                                      energy_kwh(inst.bs_types[l].states[s].total_w,
                                                 inst.period_hours[t - 1]));
    const double inf = std::numeric_limits<double>::infinity();
    for (int j = C0; j < J; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) m.add_var(nm("EB", {j, q, t}), 0, inf, false, 0.0);
    for (int j = C0; j < J; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) m.add_var(nm("L", {j, q, t}), 0, inf, false, 0.0);

    // objective constant: existing stations draw their full power from the grid
    for (int j = 0; j < C0; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t)
                m.obj_constant += discount_factor(inst, q) * mphi * grid_rate(j, q, t) *
                                  energy_kwh(inst.bs_types[0].states[0].total_w,
                                             inst.period_hours[t - 1]);

    auto row = [&](std::string name, char sense, double rhs) -> Row& {
        m.rows.push_back(Row{std::move(name), sense, rhs, {}});
        return m.rows.back();
    };
    auto term = [&](Row& r, const std::string& var, double coef) {
        if (coef == 0.0) return;
        int c = m.col(var);
        if (c < 0) throw std::logic_error("unknown column " + var);
        r.terms.emplace_back(c, coef);
    };

    // install at most once per type/site, within the allowed matrix
    for (int l = 1; l < L; ++l)
        for (int j = C0; j < J; ++j) {
            Row& r = row(nm("eq2", {l, j}), 'L', inst.is_allowed(l, j) ? 1.0 : 0.0);
            for (int q = 1; q <= Q; ++q) term(r, nm("z", {l, j, q}), 1.0);
        }
    // at most one installation per candidate site over the whole horizon
    for (int j = C0; j < J; ++j) {
        Row& r = row(nm("eq3", {j}), 'L', 1.0);
        for (int l = 1; l < L; ++l)
            for (int q = 1; q <= Q; ++q) term(r, nm("z", {l, j, q}), 1.0);
    }
    // battery mode only on installed solar plants
    for (int j = C0; j < J; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) {
                Row& r = row(nm("eq5", {j, q, t}), 'L', 0.0);
                term(r, nm("u", {j, q, t}), 1.0);
                for (int l = 1; l < L; ++l)
                    if (inst.bs_types[l].solar)
                        for (int qp = 1; qp <= q; ++qp) term(r, nm("z", {l, j, qp}), -1.0);
            }
    // every active test point is served exactly once
    for (int i = 0; i < I; ++i)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) {
                Row& r = row(nm("eq6", {i, q, t}), 'E', activation_indicator(inst, i, q));
                for (int j = 0; j < J; ++j) term(r, nm("h", {i, j, q, t}), 1.0);
            }
    // candidate service requires a covering active state
    for (int i = 0; i < I; ++i)
        for (int j = C0; j < J; ++j)
            for (int q = 1; q <= Q; ++q)
                for (int t = 1; t <= T; ++t) {
                    Row& r = row(nm("eq7", {i, j, q, t}), 'L', 0.0);
                    term(r, nm("h", {i, j, q, t}), 1.0);
                    for (int l = 1; l < L; ++l)
                        for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
                            term(r, nm("v", {l, s, j, q, t}),
                                 -static_cast<double>(tables.coverage.k(i, j, l, s, q, t)));
                }
    // service requires coverage by some type/state at that distance
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
            for (int q = 1; q <= Q; ++q)
                for (int t = 1; t <= T; ++t) {
                    double ksum = 0.0;
                    for (int l = 0; l < L; ++l)
                        for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
                            ksum += tables.coverage.k(i, j, l, s, q, t);
                    Row& r = row(nm("eq8", {i, j, q, t}), 'L', ksum);
                    term(r, nm("h", {i, j, q, t}), 1.0);
                }
    // existing stations: served demand fits the fixed transmit energy budget
    for (int j = 0; j < C0; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) {
                Row& r = row(nm("eq10", {j, q, t}), 'L',
                             energy_kwh(inst.bs_types[0].states[0].transmit_w,
                                        inst.period_hours[t - 1]));
                for (int i = 0; i < I; ++i)
                    term(r, nm("h", {i, j, q, t}), tables.demand.energy(i, j, q, t));
            }
    // candidates: served demand fits the chosen state's transmit energy budget
    for (int j = C0; j < J; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) {
                Row& r = row(nm("eq11", {j, q, t}), 'L', 0.0);
                for (int i = 0; i < I; ++i)
                    term(r, nm("h", {i, j, q, t}), tables.demand.energy(i, j, q, t));
                for (int l = 1; l < L; ++l)
                    for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
                        term(r, nm("v", {l, s, j, q, t}),
                             -energy_kwh(inst.bs_types[l].states[s].transmit_w,
                                         inst.period_hours[t - 1]));
            }
    // an installed station is in exactly one state each period
    for (int l = 1; l < L; ++l)
        for (int j = C0; j < J; ++j)
            for (int q = 1; q <= Q; ++q)
                for (int t = 1; t <= T; ++t) {
                    Row& r = row(nm("eq12", {l, j, q, t}), 'E', 0.0);
                    for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
                        term(r, nm("v", {l, s, j, q, t}), 1.0);
                    for (int qp = 1; qp <= q; ++qp) term(r, nm("z", {l, j, qp}), -1.0);
                }
    // battery level recursion within the representative day, with cyclic wrap
    auto battery_step = [&](Row& r, int j, int q, int t_prev) {
        // EB[next] - EB[t_prev] + L[t_prev] + PhatP(t_prev) - ES(t_prev) = 0
        term(r, nm("EB", {j, q, t_prev}), -1.0);
        term(r, nm("L", {j, q, t_prev}), 1.0);
        for (int l = 1; l < L; ++l)
            for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
                term(r, nm("x", {l, s, j, q, t_prev}),
                     energy_kwh(inst.bs_types[l].states[s].total_w, inst.period_hours[t_prev - 1]));
        for (int l = 1; l < L; ++l)
            if (inst.bs_types[l].solar)
                for (int qp = 1; qp <= q; ++qp)
                    term(r, nm("z", {l, j, qp}), -tables.solar.yield(l, qp, q, t_prev));
    };
    for (int j = C0; j < J; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 2; t <= T; ++t) {
                Row& r = row(nm("eq18", {j, q, t}), 'E', 0.0);
                term(r, nm("EB", {j, q, t}), 1.0);
                battery_step(r, j, q, t - 1);
            }
    for (int j = C0; j < J; ++j)
        for (int q = 1; q <= Q; ++q) {
            Row& r = row(nm("eq19", {j, q}), 'E', 0.0);
            term(r, nm("EB", {j, q, 1}), 1.0);
            battery_step(r, j, q, T);
        }
    // battery level stays within the installed battery's window
    for (int j = C0; j < J; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) {
                Row& lo = row(nm("eq20lo", {j, q, t}), 'L', 0.0);
                for (int l = 1; l < L; ++l)
                    if (inst.bs_types[l].solar)
                        for (int qp = 1; qp <= q; ++qp)
                            term(lo, nm("z", {l, j, qp}), tables.solar.bmin(l, qp, q));
                term(lo, nm("EB", {j, q, t}), -1.0);
                Row& hi = row(nm("eq20hi", {j, q, t}), 'L', 0.0);
                term(hi, nm("EB", {j, q, t}), 1.0);
                for (int l = 1; l < L; ++l)
                    if (inst.bs_types[l].solar)
                        for (int qp = 1; qp <= q; ++qp)
                            term(hi, nm("z", {l, j, qp}), -tables.solar.bmax(l, qp, q));
            }
    // spill is bounded by the solar input of the period
    for (int j = C0; j < J; ++j)
        for (int q = 1; q <= Q; ++q)
            for (int t = 1; t <= T; ++t) {
                Row& r = row(nm("eq21", {j, q, t}), 'L', 0.0);
                term(r, nm("L", {j, q, t}), 1.0);
                for (int l = 1; l < L; ++l)
                    if (inst.bs_types[l].solar)
                        for (int qp = 1; qp <= q; ++qp)
                            term(r, nm("z", {l, j, qp}), -tables.solar.yield(l, qp, q, t));
            }
    // x = v AND u, linearized
    for (int l = 1; l < L; ++l)
        for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
            for (int j = C0; j < J; ++j)
                for (int q = 1; q <= Q; ++q)
                    for (int t = 1; t <= T; ++t) {
                        Row& r22 = row(nm("eq22", {l, s, j, q, t}), 'L', 0.0);
                        term(r22, nm("x", {l, s, j, q, t}), 1.0);
                        term(r22, nm("v", {l, s, j, q, t}), -1.0);
                        Row& r23 = row(nm("eq23", {l, s, j, q, t}), 'L', 0.0);
                        term(r23, nm("x", {l, s, j, q, t}), 1.0);
                        term(r23, nm("u", {j, q, t}), -1.0);
                        Row& r24 = row(nm("eq24", {l, s, j, q, t}), 'L', 1.0);
                        term(r24, nm("v", {l, s, j, q, t}), 1.0);
                        term(r24, nm("u", {j, q, t}), 1.0);
                        term(r24, nm("x", {l, s, j, q, t}), -1.0);
                    }

    apply_scenario(m, scenario);
    return m;
}

void apply_scenario(MilpModel& m, const ScenarioSpec& scenario) {
    if (!m.instance) throw std::logic_error("apply_scenario: model has no build context");
    const PlanningInstance& inst = *m.instance;
    m.scenario = scenario;
    m.warnings.clear();

    for (auto& v : m.vars)
        if (v.integer) { v.lb = 0.0; v.ub = 1.0; }

    auto fix0 = [&](const std::string& name) {
        int c = m.col(name);
        if (c >= 0) m.vars[c].ub = 0.0;
    };

    const int J = inst.num_sites(), L = inst.num_types();
    const int Q = inst.Q(), T = inst.T();
    const int C0 = inst.num_existing;

    using Z = ScenarioSpec::ZRule;
    using V = ScenarioSpec::VRule;
    using U = ScenarioSpec::URule;

    if ((scenario.u_rule == U::Free || scenario.z_rule == Z::SolarOnly) && !inst.has_solar_type())
        m.warnings.push_back("scenario " + scenario.id +
                             " references solar operation but the instance has no installable solar type");

    for (int l = 1; l < L; ++l)
        for (int j = C0; j < J; ++j)
            for (int q = 1; q <= Q; ++q) {
                const bool kill = (scenario.z_rule == Z::FirstYearOnly && q > 1) ||
                                  (scenario.z_rule == Z::SolarOnly && !inst.bs_types[l].solar);
                if (kill) fix0(nm("z", {l, j, q}));
            }

    for (int l = 1; l < L; ++l) {
        const int top = inst.smax(l);
        for (int s = 0; s <= top; ++s) {
            const bool allowed = scenario.v_rule == V::Free ||
                                 (scenario.v_rule == V::PinMax && s == top) ||
                                 (scenario.v_rule == V::IdleMax && (s == 0 || s == top));
            for (int j = C0; j < J; ++j)
                for (int q = 1; q <= Q; ++q)
                    for (int t = 1; t <= T; ++t) {
                        if (!allowed) fix0(nm("v", {l, s, j, q, t}));
                        if (!allowed || scenario.u_rule == U::Zero) fix0(nm("x", {l, s, j, q, t}));
                    }
        }
    }

    if (scenario.u_rule == U::Zero)
        for (int j = C0; j < J; ++j)
            for (int q = 1; q <= Q; ++q)
                for (int t = 1; t <= T; ++t) fix0(nm("u", {j, q, t}));
}

ModelStats model_stats(const MilpModel& m) {
    ModelStats st;
    for (const auto& v : m.vars) {
        st.vars_by_family[v.name.substr(0, v.name.find('['))]++;
        if (!v.integer) ++st.continuous;
        else if (v.lb < v.ub) ++st.free_binaries;
        else ++st.fixed_binaries;
    }
    for (const auto& r : m.rows) {
        st.rows_by_family[r.name.substr(0, r.name.find('['))]++;
        st.nonzeros += static_cast<int>(r.terms.size());
    }
    return st;
}

} // namespace greenplan
