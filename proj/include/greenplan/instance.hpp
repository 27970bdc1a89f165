// Planning instance: sites, test points, base station types, horizon,
// daily profiles and economic parameters, plus the derived schedules
// (discounting, installation cost, carbon tax) used by the optimizer.
//
// Index conventions used everywhere in this library:
//   j : site, 0-based, existing sites first then candidates
//   i : test point, 0-based
//   l : base station type, 0-based; type 0 is the legacy type of existing sites
//   s : power state of a type, 0-based, sorted by transmit power ascending
//   q : year, 1-based, 1..Q
//   t : intraday period, 1-based, 1..T
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace greenplan {

// Raised when an instance file violates the schema or an invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One operating point of a base station type: total electrical draw and the
// portion radiated as transmit power. total_w >= transmit_w >= 0.
struct PowerState {
    double total_w = 0.0;    // W_{l,s}
    double transmit_w = 0.0; // W^x_{l,s}
    bool operator==(const PowerState&) const = default;
};

struct BsTypeSpec {
    std::string name;
    // For installable types (l >= 1): state 0 is idle (transmit_w == 0) and
    // transmit powers are strictly ascending. Type 0 has exactly one state
    // whose transmit_w is the fixed transmit power of existing stations.
    std::vector<PowerState> states;
    bool solar = false; // U_l
    double bandwidth_mhz = 20.0;
    double build_cost = 0.0; // C^B_l, nominal year-1 dollars

    // Solar subsystem; meaningful only when solar == true.
    std::vector<double> solar_unit_cost;   // $/W by year, resolved to size Q
    double panel_rating_w = 0.0;           // drives the solar CAPEX
    double panel_area_eff_m2 = 0.0;        // panel area x efficiency, drives yield
    double battery_capacity_kwh = 0.0;     // B^+ of a fresh battery
    double battery_min_fraction = 0.2;     // B^- as a fraction of current B^+
    double battery_aging_rate = 0.05;      // capacity loss per year of battery age
    double panel_aging_rate = 0.01;        // yield loss per year of panel age
    int battery_lifetime_years = 0;        // replacement cadence, >= 1 for solar types
    double battery_replacement_cost = 0.0; // nominal $ per replacement event

    bool operator==(const BsTypeSpec&) const = default;
};

struct Site {
    std::string id;
    double x = 0.0, y = 0.0; // meters
    bool operator==(const Site&) const = default;
};

struct TestPoint {
    std::string id;
    double x = 0.0, y = 0.0;
    int activation_year = 1;                // q*_i, in [1, Q+1]; Q+1 means never active
    std::vector<double> peak_rate_by_year;  // rho-hat_{i,q}, Mbps, resolved to size Q
    bool operator==(const TestPoint&) const = default;
};

struct EmissionSource {
    std::string name;
    std::vector<double> kg_per_kwh; // lambda by year, resolved to size Q
    bool operator==(const EmissionSource&) const = default;
};

struct Economics {
    double discount_rate = 0.12;    // r
    double inflation_rate = 0.0264;
    double demand_growth_rate = 0.20;
    std::vector<double> grid_tariff;  // C^G by (q,t), $/kWh, uniform across sites
    std::vector<double> tax_per_ton;  // pi_q, $/ton CO2, size Q
    std::vector<EmissionSource> emission_sources;
    std::string grid_source;          // which source powers the grid
    int installs_per_year = 1;        // m
    double days_per_period = 365.0;   // phi
    double antenna_gain = 3.0;        // alpha
    double propagation_coefficient = 3.0; // n
    double channel_noise_w = 1e-5;    // N
    bool operator==(const Economics&) const = default;
};

struct PlanningInstance {
    std::string name;
    std::vector<Site> sites; // existing first, then candidates
    int num_existing = 0;
    std::vector<TestPoint> test_points;
    std::vector<BsTypeSpec> bs_types; // type 0 = legacy
    int years = 0;                    // Q
    std::vector<double> period_hours; // Delta_t, sums to 24
    std::vector<double> traffic_profile;   // per-period multiplier of peak rate
    std::vector<double> illumination_wm2;  // per-period solar irradiance
    Economics econ;
    // Installability matrix M_{l,j}, row-major [l * num_sites + j].
    // Always 0 for l == 0 and for existing sites.
    std::vector<std::uint8_t> allowed;

    bool operator==(const PlanningInstance&) const = default;

    int num_sites() const { return static_cast<int>(sites.size()); }
    int num_candidates() const { return num_sites() - num_existing; }
    int num_test_points() const { return static_cast<int>(test_points.size()); }
    int num_types() const { return static_cast<int>(bs_types.size()); }
    int Q() const { return years; }
    int T() const { return static_cast<int>(period_hours.size()); }
    bool is_existing(int j) const { return j < num_existing; }

    bool is_allowed(int l, int j) const { return allowed[static_cast<size_t>(l) * sites.size() + j] != 0; }
    double tariff(int /*j*/, int q, int t) const { return econ.grid_tariff[static_cast<size_t>(q - 1) * T() + (t - 1)]; }
    double tax(int q) const { return econ.tax_per_ton[q - 1]; }
    // Emission factor of the grid's source in year q, kg CO2 per kWh.
    double grid_kg_per_kwh(int q) const;
    // Index of the highest-transmit-power state of type l.
    int smax(int l) const { return static_cast<int>(bs_types[l].states.size()) - 1; }
    double distance(int i, int j) const {
        return std::hypot(test_points[i].x - sites[j].x, test_points[i].y - sites[j].y);
    }
    // True if any installable type is solar-capable.
    bool has_solar_type() const;
};

// Parse and validate an instance document (JSON text). Scalar conveniences
// (flat peak rate, scalar tariff or tax, scalar solar unit cost) are resolved
// into full per-year schedules here; nominal scalar prices inflate at
// econ.inflation_rate per year.
PlanningInstance load_instance_text(const std::string& text);
PlanningInstance load_instance(const std::string& path);

// Serialize with all schedules in resolved form; load(save(x)) == x.
std::string save_instance_text(const PlanningInstance& inst);
void save_instance(const PlanningInstance& inst, const std::string& path);

// nu_{i,q}: 1 if test point i requires service in year q.
inline int activation_indicator(const PlanningInstance& inst, int i, int q) {
    return q >= inst.test_points[i].activation_year ? 1 : 0;
}

// (1 + r)^{-q}
double discount_factor(const PlanningInstance& inst, int q);

// C_{l,q}: nominal cost of installing type l in year q, including solar
// equipment and battery replacements scheduled every battery_lifetime_years
// within the remaining horizon, discounted back to year q. Errors on l == 0.
double installation_cost(const PlanningInstance& inst, int l, int q);

// Solar-equipment share of installation_cost (panels plus battery
// replacements); 0 for types without solar. Errors on l == 0.
double solar_equipment_cost(const PlanningInstance& inst, int l, int q);

// pi_q = start + step * (q - 1), capped at start + step * (Q - 1).
std::vector<double> default_tax_schedule(double start, double step, int years);

} // namespace greenplan
