// Built-in exhaustive enumeration oracle.
//
// Models built by build_model carry their instance/tables context and are
// searched structurally, which enumerates exactly the feasible assignments of
// the binary families: per-site install profiles (z), per-period state
// vectors (v) filtered by existence of a test-point assignment (h), and
// per-site battery-mode subsequences (u, x) screened by an exact feasibility
// test of the cyclic battery subsystem (E^B, L). The objective only depends
// on the binaries, so the minimum over this space is the model optimum.
//
// The battery test is the analytic fixed point of forward interval
// propagation: the reachable level window after each period is
// [max(a, E+b), min(c, E+d)] with (a,b,c,d) accumulated per period, so the
// cyclic wrap collapses to an interval condition on the start level E.
// A concrete (E^B, L) witness is rebuilt by a backward trace.
#include "greenplan/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "greenplan/units.hpp"

namespace greenplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

std::string nm(const char* fam, std::initializer_list<int> idx) {
    std::string out(fam);
    out += '[';
    bool first = true;
    for (int v : idx) {
        if (!first) out += ',';
        out += std::to_string(v);
        first = false;
    }
    out += ']';
    return out;
}

} // namespace

// ---------- cyclic battery subsystem ----------

// Feasibility of: E_{t+1} = E_t + solar - spill - draw, spill in [0, solar],
// bmin <= E_t <= bmax for t = 1..T, cyclic wrap E_{T+1} = E_1.
// On success *start receives a feasible E_1.
bool battery_cycle_feasible(const BatteryCycle& c, double* start) {
    const int T = static_cast<int>(c.solar_in.size());
    double a = -kInf, b = 0.0, cc = kInf, d = 0.0;
    double emin = c.bmin, emax = c.bmax;
    for (int t = 0; t < T; ++t) {
        const double lo_step = -c.batt_draw[t];
        const double hi_step = c.solar_in[t] - c.batt_draw[t];
        a += lo_step;
        b += lo_step;
        cc += hi_step;
        d += hi_step;
        if (t < T - 1) {
            a = std::max(a, c.bmin);
            cc = std::min(cc, c.bmax);
        }
        if (a > cc + kEps) return false;
        if (a > -kInf) emin = std::max(emin, a - d);
        if (cc < kInf) emax = std::min(emax, cc - b);
    }
    // wrap: E must be reachable from itself
    if (d < -kEps) return false;
    if (a > -kInf) emin = std::max(emin, a);
    if (cc < kInf) emax = std::min(emax, cc);
    if (emin > emax + kEps) return false;
    if (start) *start = std::min(emin, emax);
    return true;
}

// Rebuilds a level/spill trajectory for a feasible cycle.
void battery_cycle_witness(const BatteryCycle& c, double start,
                           std::vector<double>& level,
                           std::vector<double>& spill) {
    const int T = static_cast<int>(c.solar_in.size());
    std::vector<double> rlo(T + 1), rhi(T + 1);
    rlo[0] = rhi[0] = start;
    for (int t = 0; t < T; ++t) {
        rlo[t + 1] = rlo[t] - c.batt_draw[t];
        rhi[t + 1] = rhi[t] + c.solar_in[t] - c.batt_draw[t];
        if (t < T - 1) {
            rlo[t + 1] = std::max(rlo[t + 1], c.bmin);
            rhi[t + 1] = std::min(rhi[t + 1], c.bmax);
        }
        if (rlo[t + 1] > rhi[t + 1]) rlo[t + 1] = rhi[t + 1]; // fp slack
    }
    level.assign(T, 0.0);
    spill.assign(T, 0.0);
    std::vector<double> pos(T + 1);
    pos[T] = start; // cyclic wrap target
    for (int t = T - 1; t >= 0; --t) {
        double p = std::min(rhi[t], pos[t + 1] + c.batt_draw[t]);
        p = std::max(p, std::max(rlo[t], pos[t + 1] - (c.solar_in[t] - c.batt_draw[t])));
        pos[t] = p;
    }
    for (int t = 0; t < T; ++t) {
        level[t] = pos[t];
        double sp = c.solar_in[t] - c.batt_draw[t] - (pos[t + 1] - pos[t]);
        spill[t] = std::min(std::max(sp, 0.0), c.solar_in[t]);
    }
}

// ---------- structured search over a built model ----------

namespace {

struct InstallChoice {
    int l = 0;  // 0 = no install
    int qi = 0; // install year
};

struct SiteState {
    int j = 0;       // global site index
    int l = 0, qi = 0;
};

struct Searcher {
    const MilpModel& m;
    const PlanningInstance& inst;
    const Tables& tb;
    int J, I, L, Q, T, C0;
    double mphi;

    explicit Searcher(const MilpModel& model)
        : m(model), inst(*model.instance), tb(*model.tables) {
        J = inst.num_sites();
        I = inst.num_test_points();
        L = inst.num_types();
        Q = inst.Q();
        T = inst.T();
        C0 = inst.num_existing;
        mphi = inst.econ.installs_per_year * inst.econ.days_per_period;
    }

    bool var_open(const std::string& name) const {
        int c = m.col(name);
        return c >= 0 && m.vars[c].ub > 0.0;
    }
    double unit_cost(int j, int q, int t) const {
        return discount_factor(inst, q) * mphi *
               (inst.tariff(j, q, t) + tax_per_kwh(inst.tax(q), inst.grid_kg_per_kwh(q)));
    }
    double state_energy(int l, int s, int t) const {
        return energy_kwh(inst.bs_types[l].states[s].total_w, inst.period_hours[t - 1]);
    }
    double transmit_budget(int l, int s, int t) const {
        return energy_kwh(inst.bs_types[l].states[s].transmit_w, inst.period_hours[t - 1]);
    }

    // constant part: existing stations always draw full power from the grid
    double existing_grid_cost() const {
        double c = 0.0;
        for (int j = 0; j < C0; ++j)
            for (int q = 1; q <= Q; ++q)
                for (int t = 1; t <= T; ++t)
                    c += unit_cost(j, q, t) * state_energy(0, 0, t);
        return c;
    }

    // per-site install options honoring the allowed matrix and bound fixings
    std::vector<std::vector<InstallChoice>> site_options() const {
        std::vector<std::vector<InstallChoice>> opts;
        for (int j = C0; j < J; ++j) {
            std::vector<InstallChoice> o{{0, 0}};
            for (int l = 1; l < L; ++l) {
                if (!inst.is_allowed(l, j)) continue;
                for (int q = 1; q <= Q; ++q)
                    if (var_open(nm("z", {l, j, q}))) o.push_back({l, q});
            }
            opts.push_back(std::move(o));
        }
        return opts;
    }

    // allowed operating states of an installed (l) at site j in (q,t)
    std::vector<int> allowed_states(int l, int j, int q, int t) const {
        std::vector<int> s;
        for (int k = 0; k < static_cast<int>(inst.bs_types[l].states.size()); ++k)
            if (var_open(nm("v", {l, k, j, q, t}))) s.push_back(k);
        return s;
    }

    // TP assignment existence for a fixed state vector; fills tp -> site map.
    bool assign_tps(int q, int t, const std::vector<SiteState>& active,
                    const std::vector<int>& states, std::vector<int>& out) const {
        std::vector<int> tps;
        for (int i = 0; i < I; ++i)
            if (activation_indicator(inst, i, q)) tps.push_back(i);
        out.assign(I, -1);
        if (tps.empty()) return true;

        // site capacity: transmit-energy budget per (site, state)
        std::vector<double> cap(J, -1.0); // -1: not usable
        for (int j = 0; j < C0; ++j) cap[j] = transmit_budget(0, 0, t);
        for (size_t aidx = 0; aidx < active.size(); ++aidx)
            cap[active[aidx].j] = transmit_budget(active[aidx].l, states[aidx], t);
        // candidate coverage requires the chosen state to cover (eq family 7);
        // existing-site service requires coverage by some type/state (family 8)
        auto can_serve = [&](int i, int j) -> bool {
            if (cap[j] < 0.0) return false;
            if (inst.is_existing(j)) {
                bool any = false;
                for (int l = 0; l < L && !any; ++l)
                    for (int s = 0; s < static_cast<int>(inst.bs_types[l].states.size()); ++s)
                        if (tb.coverage.k(i, j, l, s, q, t)) { any = true; break; }
                if (!any) return false;
            } else {
                for (size_t aidx = 0;; ++aidx) {
                    if (aidx == active.size()) return false;
                    if (active[aidx].j == j) {
                        if (!tb.coverage.k(i, j, active[aidx].l, states[aidx], q, t)) return false;
                        break;
                    }
                }
            }
            return true;
        };

        std::vector<double> used(J, 0.0);
        std::vector<int> pick(tps.size(), -1);
        // depth-first over test points in index order, sites in index order
        int depth = 0;
        while (depth >= 0) {
            if (depth == static_cast<int>(tps.size())) {
                for (size_t k = 0; k < tps.size(); ++k) out[tps[k]] = pick[k];
                return true;
            }
            const int i = tps[depth];
            int j = pick[depth] < 0 ? 0 : pick[depth] + 1;
            if (pick[depth] >= 0) used[pick[depth]] -= tb.demand.energy(i, pick[depth], q, t);
            pick[depth] = -1;
            bool advanced = false;
            for (; j < J; ++j) {
                if (!can_serve(i, j)) continue;
                const double e = tb.demand.energy(i, j, q, t);
                if (used[j] + e > cap[j] * (1.0 + 1e-12) + kEps) continue;
                used[j] += e;
                pick[depth] = j;
                ++depth;
                advanced = true;
                break;
            }
            if (!advanced) --depth;
        }
        return false;
    }

    // minimum yearly operating cost for one install profile, or infinity;
    // optionally records the chosen states/u/h/battery trajectories
    struct YearDetail {
        std::vector<std::vector<int>> states; // [t][active site] state
        std::vector<std::vector<int>> assign; // [t][i] -> site or -1
        std::vector<std::vector<int>> u;      // [active site][t] 0/1
        std::vector<std::vector<double>> level, spill; // [active site][t]
    };

    double year_cost(const std::vector<InstallChoice>& profile, int q, YearDetail* detail) const {
        std::vector<SiteState> active;
        for (int jj = 0; jj < J - C0; ++jj)
            if (profile[jj].l > 0 && profile[jj].qi <= q)
                active.push_back({C0 + jj, profile[jj].l, profile[jj].qi});
        const int A = static_cast<int>(active.size());

        // per-period feasible state vectors (with one stored h-assignment each)
        std::vector<std::vector<std::vector<int>>> sv_options(T + 1); // [t][option] = states
        std::vector<std::vector<std::vector<int>>> sv_assign(T + 1);
        for (int t = 1; t <= T; ++t) {
            std::vector<std::vector<int>> state_sets;
            for (const auto& a : active) {
                auto s = allowed_states(a.l, a.j, q, t);
                if (s.empty()) return kInf; // eq family 12 unsatisfiable
                state_sets.push_back(std::move(s));
            }
            std::vector<int> idx(A, 0), states(A);
            while (true) {
                for (int k = 0; k < A; ++k) states[k] = state_sets[k][idx[k]];
                std::vector<int> hmap;
                if (assign_tps(q, t, active, states, hmap)) {
                    sv_options[t].push_back(states);
                    sv_assign[t].push_back(std::move(hmap));
                }
                int k = A - 1;
                for (; k >= 0; --k) {
                    if (++idx[k] < static_cast<int>(state_sets[k].size())) break;
                    idx[k] = 0;
                }
                if (k < 0) break;
            }
            if (sv_options[t].empty()) return kInf;
        }

        // per-site minimum cost of a full state sequence (battery-mode choice
        // folded in), memoized by the sequence code
        struct SiteCtx {
            SiteState st;
            bool solar = false;
            BatteryCycle base; // solar_in and bounds; draws filled per u-vector
            std::vector<std::vector<double>> grid_cost; // [t][s]
            std::vector<std::vector<char>> batt_ok;     // [t][s]: x open
            bool u_open_all = true;
            std::vector<char> u_open;                   // [t]
            std::map<long long, std::pair<double, int>> memo; // code -> (cost, best u mask)
        };
        std::vector<SiteCtx> ctx(A);
        for (int k = 0; k < A; ++k) {
            SiteCtx& c = ctx[k];
            c.st = active[k];
            c.solar = inst.bs_types[c.st.l].solar;
            c.base.bmin = tb.solar.bmin(c.st.l, c.st.qi, q);
            c.base.bmax = tb.solar.bmax(c.st.l, c.st.qi, q);
            c.base.solar_in.assign(T, 0.0);
            c.base.batt_draw.assign(T, 0.0);
            c.u_open.assign(T + 1, 0);
            for (int t = 1; t <= T; ++t) {
                if (c.solar) c.base.solar_in[t - 1] = tb.solar.yield(c.st.l, c.st.qi, q, t);
                c.u_open[t] = c.solar && var_open(nm("u", {c.st.j, q, t})) ? 1 : 0;
            }
            const int S = static_cast<int>(inst.bs_types[c.st.l].states.size());
            c.grid_cost.assign(T + 1, std::vector<double>(S, 0.0));
            c.batt_ok.assign(T + 1, std::vector<char>(S, 0));
            for (int t = 1; t <= T; ++t)
                for (int s = 0; s < S; ++s) {
                    c.grid_cost[t][s] = unit_cost(c.st.j, q, t) * state_energy(c.st.l, s, t);
                    c.batt_ok[t][s] = var_open(nm("x", {c.st.l, s, c.st.j, q, t})) ? 1 : 0;
                }
        }

        // cost of site k running state sequence seq; u chosen optimally
        auto site_seq_cost = [&](int k, const std::vector<int>& seq, int* best_mask) -> double {
            SiteCtx& c = ctx[k];
            long long code = 0;
            for (int t = 0; t < T; ++t) code = code * 16 + seq[t];
            auto it = c.memo.find(code);
            if (it == c.memo.end()) {
                double best = kInf;
                int bmask = -1;
                // battery never usable: pure grid cost
                double grid_all = 0.0;
                for (int t = 1; t <= T; ++t) grid_all += c.grid_cost[t][seq[t - 1]];
                BatteryCycle cyc = c.base;
                for (int mask = 0; mask < (1 << T); ++mask) {
                    bool legal = true;
                    double cost = 0.0;
                    for (int t = 1; t <= T && legal; ++t) {
                        const bool u = (mask >> (t - 1)) & 1;
                        if (u && (!c.u_open[t] || !c.batt_ok[t][seq[t - 1]])) legal = false;
                        cost += u ? 0.0 : c.grid_cost[t][seq[t - 1]];
                        cyc.batt_draw[t - 1] = u ? state_energy(c.st.l, seq[t - 1], t) : 0.0;
                    }
                    if (!legal || cost >= best) continue;
                    if (!c.solar) {
                        if (mask != 0) continue;
                        best = grid_all;
                        bmask = 0;
                        continue;
                    }
                    if (battery_cycle_feasible(cyc, nullptr)) {
                        best = cost;
                        bmask = mask;
                    }
                }
                it = c.memo.emplace(code, std::make_pair(best, bmask)).first;
            }
            if (best_mask) *best_mask = it->second.second;
            return it->second.first;
        };

        // depth-first over per-period state vectors
        double best = kInf;
        std::vector<int> choice(T + 1, 0), best_choice;
        std::vector<std::vector<int>> seqs(A, std::vector<int>(T, 0));
        std::function<void(int)> dfs = [&](int t) {
            if (t > T) {
                double total = 0.0;
                for (int k = 0; k < A && total < kInf; ++k)
                    total += site_seq_cost(k, seqs[k], nullptr);
                if (total < best - 1e-15) {
                    best = total;
                    best_choice = std::vector<int>(choice.begin() + 1, choice.begin() + T + 1);
                }
                return;
            }
            for (size_t o = 0; o < sv_options[t].size(); ++o) {
                choice[t] = static_cast<int>(o);
                for (int k = 0; k < A; ++k) seqs[k][t - 1] = sv_options[t][o][k];
                dfs(t + 1);
            }
        };
        dfs(1);

        if (best >= kInf) return kInf;
        if (detail) {
            detail->states.assign(T + 1, {});
            detail->assign.assign(T + 1, {});
            detail->u.assign(A, std::vector<int>(T + 1, 0));
            detail->level.assign(A, std::vector<double>(T + 1, 0.0));
            detail->spill.assign(A, std::vector<double>(T + 1, 0.0));
            for (int k = 0; k < A; ++k)
                for (int t = 1; t <= T; ++t) seqs[k][t - 1] = sv_options[t][best_choice[t - 1]][k];
            for (int t = 1; t <= T; ++t) {
                detail->states[t] = sv_options[t][best_choice[t - 1]];
                detail->assign[t] = sv_assign[t][best_choice[t - 1]];
            }
            for (int k = 0; k < A; ++k) {
                int mask = 0;
                site_seq_cost(k, seqs[k], &mask);
                BatteryCycle cyc = ctx[k].base;
                for (int t = 1; t <= T; ++t) {
                    detail->u[k][t] = (mask >> (t - 1)) & 1;
                    cyc.batt_draw[t - 1] =
                        detail->u[k][t] ? state_energy(ctx[k].st.l, seqs[k][t - 1], t) : 0.0;
                }
                if (ctx[k].solar) {
                    double start = 0.0;
                    battery_cycle_feasible(cyc, &start);
                    std::vector<double> level, spill;
                    battery_cycle_witness(cyc, start, level, spill);
                    for (int t = 1; t <= T; ++t) {
                        detail->level[k][t] = level[t - 1];
                        detail->spill[k][t] = spill[t - 1];
                    }
                }
            }
        }
        return best;
    }
};

RawSolution enumerate_structured(const MilpModel& m) {
    Searcher sr(m);
    const auto options = sr.site_options();
    const int NC = static_cast<int>(options.size());

    // lexicographic walk over install profiles
    long long total_profiles = 1;
    for (const auto& o : options) {
        total_profiles *= static_cast<long long>(o.size());
        if (total_profiles > 2'000'000)
            throw SolverError("enumeration: install profile space too large");
    }

    const double constant = sr.existing_grid_cost();
    std::vector<double> profile_cost(static_cast<size_t>(total_profiles), kInf);

#pragma omp parallel for schedule(dynamic)
    for (long long p = 0; p < total_profiles; ++p) {
        std::vector<InstallChoice> profile(NC);
        long long rest = p;
        for (int k = NC - 1; k >= 0; --k) {
            profile[k] = options[k][rest % options[k].size()];
            rest /= options[k].size();
        }
        double capex = 0.0;
        for (int k = 0; k < NC; ++k)
            if (profile[k].l > 0)
                capex += discount_factor(sr.inst, profile[k].qi) *
                         installation_cost(sr.inst, profile[k].l, profile[k].qi);
        double cost = capex;
        for (int q = 1; q <= sr.Q && cost < kInf; ++q) {
            double yc = sr.year_cost(profile, q, nullptr);
            cost = yc >= kInf ? kInf : cost + yc;
        }
        profile_cost[static_cast<size_t>(p)] = cost;
    }

    long long best_p = -1;
    double best = kInf;
    for (long long p = 0; p < total_profiles; ++p)
        if (profile_cost[static_cast<size_t>(p)] < best - 1e-15) {
            best = profile_cost[static_cast<size_t>(p)];
            best_p = p;
        }

    RawSolution sol;
    if (best_p < 0) {
        sol.status = SolveStatus::infeasible;
        sol.message = "enumeration found no feasible assignment";
        return sol;
    }

    // reconstruct the winning assignment
    std::vector<InstallChoice> profile(NC);
    long long rest = best_p;
    for (int k = NC - 1; k >= 0; --k) {
        profile[k] = options[k][rest % options[k].size()];
        rest /= options[k].size();
    }
    sol.status = SolveStatus::optimal;
    sol.objective = best + constant;
    sol.best_bound = sol.objective;
    sol.gap = 0.0;
    sol.message = "enumeration";
    for (const auto& v : m.vars) sol.values[v.name] = 0.0;

    for (int k = 0; k < NC; ++k)
        if (profile[k].l > 0)
            sol.values[nm("z", {profile[k].l, sr.C0 + k, profile[k].qi})] = 1.0;
    for (int q = 1; q <= sr.Q; ++q) {
        Searcher::YearDetail det;
        sr.year_cost(profile, q, &det);
        std::vector<SiteState> active;
        for (int k = 0; k < NC; ++k)
            if (profile[k].l > 0 && profile[k].qi <= q)
                active.push_back({sr.C0 + k, profile[k].l, profile[k].qi});
        for (int t = 1; t <= sr.T; ++t) {
            for (size_t a = 0; a < active.size(); ++a) {
                const auto& st = active[a];
                sol.values[nm("v", {st.l, det.states[t][a], st.j, q, t})] = 1.0;
                if (det.u[a][t]) {
                    sol.values[nm("u", {st.j, q, t})] = 1.0;
                    sol.values[nm("x", {st.l, det.states[t][a], st.j, q, t})] = 1.0;
                }
                sol.values[nm("EB", {st.j, q, t})] = det.level[a][t];
                sol.values[nm("L", {st.j, q, t})] = det.spill[a][t];
            }
            for (int i = 0; i < sr.I; ++i)
                if (det.assign[t][i] >= 0) sol.values[nm("h", {i, det.assign[t][i], q, t})] = 1.0;
        }
    }
    return sol;
}

// literal enumeration for small hand-built models without context
RawSolution enumerate_generic(const MilpModel& m, int limit) {
    std::vector<int> free_cols;
    for (int c = 0; c < static_cast<int>(m.vars.size()); ++c) {
        const Variable& v = m.vars[c];
        if (!v.integer && v.lb != v.ub)
            throw SolverError("context-free enumeration supports binary-only models");
        if (v.integer && v.lb < v.ub) free_cols.push_back(c);
    }
    if (static_cast<int>(free_cols.size()) > std::min(limit, 24))
        throw SolverError("free binary count exceeds the context-free enumeration limit");

    std::vector<double> val(m.vars.size());
    for (size_t c = 0; c < m.vars.size(); ++c) val[c] = m.vars[c].lb;

    RawSolution best;
    best.status = SolveStatus::infeasible;
    best.message = "enumeration found no feasible assignment";
    const long long n = static_cast<long long>(free_cols.size());
    for (long long mask = 0; mask < (1ll << n); ++mask) {
        for (long long k = 0; k < n; ++k) val[free_cols[k]] = (mask >> k) & 1 ? 1.0 : 0.0;
        bool ok = true;
        for (const auto& r : m.rows) {
            double lhs = 0.0;
            for (const auto& [c, coef] : r.terms) lhs += coef * val[c];
            if (r.sense == 'L' ? lhs > r.rhs + kEps
                               : r.sense == 'G' ? lhs < r.rhs - kEps
                                                : std::abs(lhs - r.rhs) > kEps) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        double obj = m.obj_constant;
        for (size_t c = 0; c < m.vars.size(); ++c) obj += m.vars[c].obj * val[c];
        if (!best.has_solution() || obj < best.objective - 1e-15) {
            best.status = SolveStatus::optimal;
            best.objective = obj;
            best.best_bound = obj;
            best.gap = 0.0;
            best.message = "enumeration";
            best.values.clear();
            for (size_t c = 0; c < m.vars.size(); ++c) best.values[m.vars[c].name] = val[c];
        }
    }
    return best;
}

} // namespace

RawSolution solve_enumerate(const MilpModel& model, int max_free_binaries) {
    const int free_bins = model.free_binary_count();
    if (free_bins > max_free_binaries)
        throw SolverError("free binary count " + std::to_string(free_bins) +
                          " exceeds limit " + std::to_string(max_free_binaries));
    if (model.instance && model.tables) return enumerate_structured(model);
    return enumerate_generic(model, max_free_binaries);
}

} // namespace greenplan
