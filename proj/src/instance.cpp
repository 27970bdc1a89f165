// Instance loading, validation, serialization and the basic economic schedules.
#include "greenplan/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace greenplan {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

const json& need(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(std::string("missing section or field \"") + key + "\" in " + where);
    return *it;
}

double need_num(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    require(v.is_number(), std::string("field \"") + key + "\" in " + where + " must be a number");
    return v.get<double>();
}

// Accepts scalar (inflated per year when inflate=true) or an explicit
// per-year array of size Q taken as-is.
std::vector<double> resolve_yearly(const json& v, int Q, double inflation, bool inflate,
                                   const std::string& what) {
    std::vector<double> out(static_cast<size_t>(Q));
    if (v.is_number()) {
        double base = v.get<double>();
        for (int q = 1; q <= Q; ++q)
            out[q - 1] = inflate ? base * std::pow(1.0 + inflation, q - 1) : base;
    } else if (v.is_array()) {
        require(static_cast<int>(v.size()) == Q, what + " schedule must have one entry per year");
        for (int q = 0; q < Q; ++q) {
            require(v[q].is_number(), what + " schedule entries must be numbers");
            out[q] = v[q].get<double>();
        }
    } else {
        fail(what + " must be a number or a per-year array");
    }
    return out;
}

std::vector<double> get_profile(const json& j, const char* key, int T, const char* where) {
    const json& v = need(j, key, where);
    require(v.is_array() && static_cast<int>(v.size()) == T,
            std::string("profile \"") + key + "\" must have one entry per period");
    std::vector<double> out(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) out[t] = v[t].get<double>();
    return out;
}

} // namespace

double PlanningInstance::grid_kg_per_kwh(int q) const {
    for (const auto& src : econ.emission_sources)
        if (src.name == econ.grid_source) return src.kg_per_kwh[q - 1];
    throw ValidationError("grid_source \"" + econ.grid_source + "\" does not name an emission source");
}

bool PlanningInstance::has_solar_type() const {
    for (int l = 1; l < num_types(); ++l)
        if (bs_types[l].solar) return true;
    return false;
}

PlanningInstance load_instance_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("instance document is not valid JSON: ") + e.what());
    }

    require(doc.contains("schema"), "missing section or field \"schema\"");
    require(doc["schema"].is_number_integer() && doc["schema"].get<int>() == 1,
            "unsupported schema version (expected schema: 1)");

    PlanningInstance inst;
    inst.name = doc.value("name", std::string("instance"));

    // horizon
    const json& horizon = need(doc, "horizon", "document");
    inst.years = static_cast<int>(need_num(horizon, "years", "horizon"));
    require(inst.years >= 1, "horizon.years must be >= 1");
    const json& ph = need(horizon, "period_hours", "horizon");
    require(ph.is_array() && !ph.empty(), "horizon.period_hours must be a non-empty array");
    double total_h = 0.0;
    for (const auto& v : ph) {
        double h = v.get<double>();
        require(h > 0.0, "horizon.period_hours entries must be positive");
        inst.period_hours.push_back(h);
        total_h += h;
    }
    if (std::abs(total_h - 24.0) > 1e-9) {
        std::ostringstream os;
        os << "periods must cover 24 hours (got " << total_h << ")";
        fail(os.str());
    }
    const int Q = inst.Q(), T = inst.T();

    // profiles
    const json& profiles = need(doc, "profiles", "document");
    inst.traffic_profile = get_profile(profiles, "traffic", T, "profiles");
    inst.illumination_wm2 = get_profile(profiles, "illumination_wm2", T, "profiles");
    for (double f : inst.traffic_profile) require(f >= 0.0, "profiles.traffic entries must be non-negative");
    for (double w : inst.illumination_wm2) require(w >= 0.0, "profiles.illumination_wm2 entries must be non-negative");

    // economics (needed early: inflation drives schedule resolution)
    const json& econ = need(doc, "economics", "document");
    Economics& e = inst.econ;
    e.discount_rate = econ.value("discount_rate", 0.12);
    e.inflation_rate = econ.value("inflation_rate", 0.0264);
    e.demand_growth_rate = econ.value("demand_growth_rate", 0.20);
    require(e.discount_rate > -1.0, "economics.discount_rate must exceed -1");
    e.installs_per_year = econ.value("installs_per_year", 1);
    e.days_per_period = econ.value("days_per_install_period", 365.0);
    require(e.installs_per_year >= 1, "economics.installs_per_year must be >= 1");
    require(e.days_per_period > 0.0, "economics.days_per_install_period must be positive");

    const json& radio = need(econ, "radio", "economics");
    e.antenna_gain = need_num(radio, "antenna_gain", "economics.radio");
    e.propagation_coefficient = need_num(radio, "propagation_coefficient", "economics.radio");
    e.channel_noise_w = need_num(radio, "channel_noise_w", "economics.radio");
    require(e.antenna_gain > 0.0, "economics.radio.antenna_gain must be positive");
    require(e.propagation_coefficient > 0.0, "economics.radio.propagation_coefficient must be positive");
    require(e.channel_noise_w > 0.0, "economics.radio.channel_noise_w must be positive");

    // grid tariff: scalar | per-year array | per-year array of per-period arrays
    {
        const json& g = need(econ, "grid_tariff_per_kwh", "economics");
        e.grid_tariff.assign(static_cast<size_t>(Q) * T, 0.0);
        if (g.is_array() && !g.empty() && g[0].is_array()) {
            require(static_cast<int>(g.size()) == Q, "grid_tariff_per_kwh table must have one row per year");
            for (int q = 0; q < Q; ++q) {
                require(static_cast<int>(g[q].size()) == T,
                        "grid_tariff_per_kwh rows must have one entry per period");
                for (int t = 0; t < T; ++t) e.grid_tariff[static_cast<size_t>(q) * T + t] = g[q][t].get<double>();
            }
        } else {
            auto per_year = resolve_yearly(g, Q, e.inflation_rate, /*inflate=*/true, "grid_tariff_per_kwh");
            for (int q = 0; q < Q; ++q)
                for (int t = 0; t < T; ++t) e.grid_tariff[static_cast<size_t>(q) * T + t] = per_year[q];
        }
        for (double c : e.grid_tariff) require(c >= 0.0, "grid_tariff_per_kwh must be non-negative");
    }

    // carbon tax: scalar | per-year array | {start, step}
    {
        const json& tj = need(econ, "tax_per_ton", "economics");
        if (tj.is_object()) {
            e.tax_per_ton = default_tax_schedule(need_num(tj, "start", "tax_per_ton"),
                                                 need_num(tj, "step", "tax_per_ton"), Q);
        } else {
            e.tax_per_ton = resolve_yearly(tj, Q, 0.0, /*inflate=*/false, "tax_per_ton");
        }
        for (double p : e.tax_per_ton) require(p >= 0.0, "tax_per_ton must be non-negative");
    }

    // emission sources
    {
        const json& srcs = need(econ, "emission_sources", "economics");
        require(srcs.is_array() && !srcs.empty(), "economics.emission_sources must be a non-empty array");
        std::set<std::string> seen;
        for (const auto& sj : srcs) {
            EmissionSource src;
            src.name = need(sj, "name", "emission source").get<std::string>();
            require(seen.insert(src.name).second, "duplicate emission source \"" + src.name + "\"");
            src.kg_per_kwh = resolve_yearly(need(sj, "kg_per_kwh", "emission source"), Q, 0.0, false,
                                            "emission source kg_per_kwh");
            for (double v : src.kg_per_kwh) require(v >= 0.0, "emission factors must be non-negative");
            e.emission_sources.push_back(std::move(src));
        }
        e.grid_source = econ.value("grid_source", e.emission_sources.front().name);
        bool found = false;
        for (const auto& s : e.emission_sources) found = found || s.name == e.grid_source;
        require(found, "grid_source \"" + e.grid_source + "\" does not name an emission source");
    }

    // sites
    const json& sites = need(doc, "sites", "document");
    std::set<std::string> site_ids;
    auto read_site = [&](const json& sj) {
        Site s;
        s.id = need(sj, "id", "site").get<std::string>();
        require(site_ids.insert(s.id).second, "duplicate site id \"" + s.id + "\"");
        const json& pos = need(sj, "position", "site \"" + s.id + "\"");
        require(pos.is_array() && pos.size() == 2, "site position must be [x, y]");
        s.x = pos[0].get<double>();
        s.y = pos[1].get<double>();
        return s;
    };
    for (const auto& sj : need(sites, "existing", "sites")) inst.sites.push_back(read_site(sj));
    inst.num_existing = static_cast<int>(inst.sites.size());
    for (const auto& sj : need(sites, "candidates", "sites")) inst.sites.push_back(read_site(sj));

    // test points
    std::set<std::string> tp_ids;
    for (const auto& tj : need(doc, "test_points", "document")) {
        TestPoint tp;
        tp.id = need(tj, "id", "test point").get<std::string>();
        require(tp_ids.insert(tp.id).second, "duplicate test point id \"" + tp.id + "\"");
        const json& pos = need(tj, "position", "test point \"" + tp.id + "\"");
        require(pos.is_array() && pos.size() == 2, "test point position must be [x, y]");
        tp.x = pos[0].get<double>();
        tp.y = pos[1].get<double>();
        tp.activation_year = tj.value("activation_year", 1);
        if (tp.activation_year < 1 || tp.activation_year > Q + 1) {
            std::ostringstream os;
            os << "test point \"" << tp.id << "\" activation_year " << tp.activation_year
               << " outside [1, " << Q + 1 << "]";
            fail(os.str());
        }
        if (tj.contains("peak_rate_by_year")) {
            tp.peak_rate_by_year =
                resolve_yearly(tj["peak_rate_by_year"], Q, 0.0, false, "peak_rate_by_year");
        } else {
            double base = need_num(tj, "peak_rate_mbps", "test point \"" + tp.id + "\"");
            tp.peak_rate_by_year.resize(static_cast<size_t>(Q));
            for (int q = 1; q <= Q; ++q)
                tp.peak_rate_by_year[q - 1] = base * std::pow(1.0 + e.demand_growth_rate, q - 1);
        }
        for (double r : tp.peak_rate_by_year)
            require(r >= 0.0, "test point \"" + tp.id + "\" peak rates must be non-negative");
        inst.test_points.push_back(std::move(tp));
    }
    require(!inst.test_points.empty(), "missing section or field \"test_points\"");

    // guard against zero test-point-to-site distance (breaks the channel model)
    for (int i = 0; i < inst.num_test_points(); ++i)
        for (int j = 0; j < inst.num_sites(); ++j)
            if (inst.distance(i, j) <= 0.0)
                fail("test point \"" + inst.test_points[i].id + "\" coincides with site \"" +
                     inst.sites[j].id + "\" (distance is zero)");

    // bs types
    const json& types = need(doc, "bs_types", "document");
    require(types.is_array() && types.size() >= 1, "bs_types must contain at least the legacy type");
    std::set<std::string> type_names;
    std::vector<std::vector<std::string>> allowed_lists;
    for (const auto& bj : types) {
        BsTypeSpec b;
        b.name = need(bj, "name", "bs type").get<std::string>();
        require(type_names.insert(b.name).second, "duplicate bs type \"" + b.name + "\"");
        for (const auto& st : need(bj, "states", "bs type \"" + b.name + "\"")) {
            PowerState ps;
            ps.total_w = need_num(st, "total_w", "state");
            ps.transmit_w = need_num(st, "transmit_w", "state");
            require(ps.transmit_w >= 0.0 && ps.total_w >= ps.transmit_w,
                    "bs type \"" + b.name + "\" states need total_w >= transmit_w >= 0");
            b.states.push_back(ps);
        }
        require(!b.states.empty(), "bs type \"" + b.name + "\" needs at least one state");
        b.bandwidth_mhz = bj.value("bandwidth_mhz", 20.0);
        require(b.bandwidth_mhz > 0.0, "bs type \"" + b.name + "\" bandwidth must be positive");
        b.build_cost = bj.value("build_cost", 0.0);
        require(b.build_cost >= 0.0, "bs type \"" + b.name + "\" build_cost must be non-negative");
        if (bj.contains("solar")) {
            const json& sj = bj["solar"];
            require(sj.is_object(), "bs type \"" + b.name + "\" solar section must be an object");
            b.solar = true;
            b.solar_unit_cost = resolve_yearly(sj.contains("unit_cost_per_w") ? sj["unit_cost_per_w"] : json(3.0),
                                               Q, e.inflation_rate, /*inflate=*/true, "solar unit_cost_per_w");
            b.panel_rating_w = sj.value("panel_rating_w", 0.0);
            b.panel_area_eff_m2 = sj.value("panel_area_eff_m2", 0.0);
            b.battery_capacity_kwh = sj.value("battery_capacity_kwh", 0.0);
            b.battery_min_fraction = sj.value("battery_min_fraction", 0.2);
            b.battery_aging_rate = sj.value("battery_aging_rate", 0.05);
            b.panel_aging_rate = sj.value("panel_aging_rate", 0.01);
            b.battery_lifetime_years = sj.value("battery_lifetime_years", 0);
            b.battery_replacement_cost = sj.value("battery_replacement_cost", 0.0);
            require(b.panel_rating_w >= 0.0 && b.panel_area_eff_m2 >= 0.0 &&
                        b.battery_capacity_kwh >= 0.0 && b.battery_replacement_cost >= 0.0,
                    "bs type \"" + b.name + "\" solar parameters must be non-negative");
            require(b.battery_min_fraction >= 0.0 && b.battery_min_fraction <= 1.0,
                    "bs type \"" + b.name + "\" battery_min_fraction must lie in [0, 1]");
            require(b.battery_aging_rate >= 0.0 && b.battery_aging_rate < 1.0 &&
                        b.panel_aging_rate >= 0.0 && b.panel_aging_rate < 1.0,
                    "bs type \"" + b.name + "\" aging rates must lie in [0, 1)");
            require(b.battery_lifetime_years >= 1,
                    "bs type \"" + b.name + "\" battery_lifetime_years must be >= 1");
            for (double c : b.solar_unit_cost)
                require(c >= 0.0, "bs type \"" + b.name + "\" solar unit cost must be non-negative");
        } else {
            b.solar_unit_cost.assign(static_cast<size_t>(Q), 0.0);
        }
        allowed_lists.emplace_back();
        if (bj.contains("allowed_sites"))
            for (const auto& a : bj["allowed_sites"]) allowed_lists.back().push_back(a.get<std::string>());
        inst.bs_types.push_back(std::move(b));
    }

    // legacy type invariants
    const BsTypeSpec& legacy = inst.bs_types[0];
    require(legacy.states.size() == 1, "legacy type \"" + legacy.name + "\" must have exactly one state");
    require(!legacy.solar, "legacy type \"" + legacy.name + "\" cannot be solar");
    require(allowed_lists[0].empty(),
            "M[0,j] must be 0: legacy type \"" + legacy.name +
                "\" is not installable (allowed_sites must be absent)");
    // installable type invariants
    for (int l = 1; l < inst.num_types(); ++l) {
        const BsTypeSpec& b = inst.bs_types[l];
        require(b.states.size() >= 2, "installable type \"" + b.name + "\" needs an idle state plus at least one transmit state");
        require(b.states[0].transmit_w == 0.0, "installable type \"" + b.name + "\" state 0 must be idle (transmit_w == 0)");
        for (size_t s = 1; s < b.states.size(); ++s)
            require(b.states[s].transmit_w > b.states[s - 1].transmit_w,
                    "installable type \"" + b.name + "\" states must have strictly ascending transmit_w");
    }

    // resolve the installability matrix M
    inst.allowed.assign(static_cast<size_t>(inst.num_types()) * inst.num_sites(), 0);
    for (int l = 1; l < inst.num_types(); ++l) {
        const auto& list = allowed_lists[l];
        if (list.empty()) {
            for (int j = inst.num_existing; j < inst.num_sites(); ++j)
                inst.allowed[static_cast<size_t>(l) * inst.num_sites() + j] = 1;
        } else {
            for (const auto& id : list) {
                int j = -1;
                for (int jj = 0; jj < inst.num_sites(); ++jj)
                    if (inst.sites[jj].id == id) { j = jj; break; }
                require(j >= 0, "bs type \"" + inst.bs_types[l].name + "\" allowed_sites names unknown site \"" + id + "\"");
                require(!inst.is_existing(j),
                        "bs type \"" + inst.bs_types[l].name + "\" cannot be installed on existing site \"" + id + "\"");
                inst.allowed[static_cast<size_t>(l) * inst.num_sites() + j] = 1;
            }
        }
    }

    return inst;
}

PlanningInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open instance file \"" + path + "\"");
    std::ostringstream os;
    os << in.rdbuf();
    return load_instance_text(os.str());
}

std::string save_instance_text(const PlanningInstance& inst) {
    json doc;
    doc["schema"] = 1;
    doc["name"] = inst.name;
    doc["horizon"] = {{"years", inst.years}, {"period_hours", inst.period_hours}};
    doc["profiles"] = {{"traffic", inst.traffic_profile},
                       {"illumination_wm2", inst.illumination_wm2}};

    json existing = json::array(), candidates = json::array();
    for (int j = 0; j < inst.num_sites(); ++j) {
        json sj = {{"id", inst.sites[j].id}, {"position", {inst.sites[j].x, inst.sites[j].y}}};
        (inst.is_existing(j) ? existing : candidates).push_back(sj);
    }
    doc["sites"] = {{"existing", existing}, {"candidates", candidates}};

    json tps = json::array();
    for (const auto& tp : inst.test_points)
        tps.push_back({{"id", tp.id},
                       {"position", {tp.x, tp.y}},
                       {"activation_year", tp.activation_year},
                       {"peak_rate_by_year", tp.peak_rate_by_year}});
    doc["test_points"] = tps;

    json types = json::array();
    for (int l = 0; l < inst.num_types(); ++l) {
        const BsTypeSpec& b = inst.bs_types[l];
        json bj;
        bj["name"] = b.name;
        json states = json::array();
        for (const auto& st : b.states)
            states.push_back({{"total_w", st.total_w}, {"transmit_w", st.transmit_w}});
        bj["states"] = states;
        bj["bandwidth_mhz"] = b.bandwidth_mhz;
        bj["build_cost"] = b.build_cost;
        if (b.solar) {
            bj["solar"] = {{"unit_cost_per_w", b.solar_unit_cost},
                           {"panel_rating_w", b.panel_rating_w},
                           {"panel_area_eff_m2", b.panel_area_eff_m2},
                           {"battery_capacity_kwh", b.battery_capacity_kwh},
                           {"battery_min_fraction", b.battery_min_fraction},
                           {"battery_aging_rate", b.battery_aging_rate},
                           {"panel_aging_rate", b.panel_aging_rate},
                           {"battery_lifetime_years", b.battery_lifetime_years},
                           {"battery_replacement_cost", b.battery_replacement_cost}};
        }
        if (l >= 1) {
            json allowed = json::array();
            for (int j = inst.num_existing; j < inst.num_sites(); ++j)
                if (inst.is_allowed(l, j)) allowed.push_back(inst.sites[j].id);
            bj["allowed_sites"] = allowed;
        }
        types.push_back(std::move(bj));
    }
    doc["bs_types"] = types;

    const Economics& e = inst.econ;
    json tariff = json::array();
    for (int q = 1; q <= inst.Q(); ++q) {
        json row = json::array();
        for (int t = 1; t <= inst.T(); ++t) row.push_back(inst.tariff(0, q, t));
        tariff.push_back(std::move(row));
    }
    json srcs = json::array();
    for (const auto& s : e.emission_sources)
        srcs.push_back({{"name", s.name}, {"kg_per_kwh", s.kg_per_kwh}});
    doc["economics"] = {{"discount_rate", e.discount_rate},
                        {"inflation_rate", e.inflation_rate},
                        {"demand_growth_rate", e.demand_growth_rate},
                        {"grid_tariff_per_kwh", tariff},
                        {"tax_per_ton", e.tax_per_ton},
                        {"emission_sources", srcs},
                        {"grid_source", e.grid_source},
                        {"installs_per_year", e.installs_per_year},
                        {"days_per_install_period", e.days_per_period},
                        {"radio",
                         {{"antenna_gain", e.antenna_gain},
                          {"propagation_coefficient", e.propagation_coefficient},
                          {"channel_noise_w", e.channel_noise_w}}}};
    return doc.dump(2) + "\n";
}

void save_instance(const PlanningInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write instance file \"" + path + "\"");
    out << save_instance_text(inst);
}

double discount_factor(const PlanningInstance& inst, int q) {
    if (q < 1 || q > inst.Q()) throw std::out_of_range("discount_factor: year out of range");
    return std::pow(1.0 + inst.econ.discount_rate, -q);
}

double installation_cost(const PlanningInstance& inst, int l, int q) {
    if (l <= 0 || l >= inst.num_types())
        throw std::invalid_argument("installation_cost: type 0 (legacy) is never installed");
    if (q < 1 || q > inst.Q()) throw std::out_of_range("installation_cost: year out of range");
    const BsTypeSpec& b = inst.bs_types[l];
    const double infl = std::pow(1.0 + inst.econ.inflation_rate, q - 1);
    return b.build_cost * infl + solar_equipment_cost(inst, l, q);
}

double solar_equipment_cost(const PlanningInstance& inst, int l, int q) {
    if (l <= 0 || l >= inst.num_types())
        throw std::invalid_argument("solar_equipment_cost: type 0 (legacy) is never installed");
    if (q < 1 || q > inst.Q()) throw std::out_of_range("solar_equipment_cost: year out of range");
    const BsTypeSpec& b = inst.bs_types[l];
    if (!b.solar) return 0.0;
    double cost = b.solar_unit_cost[q - 1] * b.panel_rating_w;
    // battery replacements at years q + k * lifetime within the horizon,
    // each at the then-nominal price, discounted back to year q
    for (int qr = q + b.battery_lifetime_years; qr <= inst.Q(); qr += b.battery_lifetime_years)
        cost += b.battery_replacement_cost * std::pow(1.0 + inst.econ.inflation_rate, qr - 1) *
                std::pow(1.0 + inst.econ.discount_rate, -(qr - q));
    return cost;
}

std::vector<double> default_tax_schedule(double start, double step, int years) {
    if (years < 1) throw std::invalid_argument("default_tax_schedule: years must be >= 1");
    if (start < 0.0 || step < 0.0) throw std::invalid_argument("default_tax_schedule: start and step must be non-negative");
    std::vector<double> out(static_cast<size_t>(years));
    const double cap = start + step * (years - 1);
    for (int q = 1; q <= years; ++q) out[q - 1] = std::min(start + step * (q - 1), cap);
    return out;
}

} // namespace greenplan
