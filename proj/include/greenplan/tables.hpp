// Radio demand and coverage model plus the precomputed tables the optimizer
// consumes: per-period demand rates and energies, coverage indicators,
// solar yield and battery bound schedules.
#pragma once

#include <vector>

#include "greenplan/instance.hpp"

namespace greenplan {

// gamma_{i,j} = alpha / d^n. Errors on d <= 0.
double channel_gain(double antenna_gain, double propagation_coefficient, double distance_m);

// Shannon capacity B * log2(1 + W^x * gamma / N) in Mbps; 0 when transmit_w == 0.
double max_bitrate_mbps(double bandwidth_mhz, double transmit_w, double gain, double noise_w);

// Transmit power needed to hit rate_mbps: (N / gamma) * (2^{rate/B} - 1); 0 at rate 0.
double required_transmit_w(double rate_mbps, double bandwidth_mhz, double gain, double noise_w);

// rho_{i,q,t} = peak rate * traffic profile.
double demand_rate_mbps(const PlanningInstance& inst, int i, int q, int t);

// E^T_{i,j,q,t}: energy (kWh) site j spends to serve test point i during
// period t of year q at the given bandwidth.
double demand_energy_kwh(const PlanningInstance& inst, int i, int j, int q, int t,
                         double bandwidth_mhz);

// e^S_{l,q',q,t}: solar energy (kWh) produced during period t of year q by a
// type-l plant installed in year q_install <= q. 0 for non-solar types.
double solar_yield_kwh(const PlanningInstance& inst, int l, int q_install, int q, int t);

struct BatteryBounds {
    double min_kwh = 0.0; // B^-
    double max_kwh = 0.0; // B^+
};
// B^{+/-}_{l,q',q}: battery capacity window in year q >= q_install. Battery
// age resets at each replacement epoch (every battery_lifetime_years).
BatteryBounds battery_bounds(const PlanningInstance& inst, int l, int q_install, int q);

// k_{i,j,l,s,q,t}: 1 iff state s of type l at site j can serve test point i's
// demand in (q,t). Demand 0 is always coverable, including by the idle state.
struct CoverageTable {
    int I = 0, J = 0, L = 0, Smax = 0, Q = 0, T = 0;
    std::vector<std::uint8_t> data;
    std::uint8_t k(int i, int j, int l, int s, int q, int t) const {
        return data[((((static_cast<size_t>(i) * J + j) * L + l) * Smax + s) * Q + (q - 1)) * T + (t - 1)];
    }
};

// rho and E^T. Candidate-site E^T uses the smallest bandwidth among types
// installable there (conservative); existing sites use the legacy bandwidth.
struct DemandTable {
    int I = 0, J = 0, Q = 0, T = 0;
    std::vector<double> rate_mbps;   // [i][q][t]
    std::vector<double> energy_kwh;  // [i][j][q][t]
    double rate(int i, int q, int t) const {
        return rate_mbps[(static_cast<size_t>(i) * Q + (q - 1)) * T + (t - 1)];
    }
    double energy(int i, int j, int q, int t) const {
        return energy_kwh[((static_cast<size_t>(i) * J + j) * Q + (q - 1)) * T + (t - 1)];
    }
};

// e^S and B^{+/-} indexed by install year; entries with q < q_install are 0.
struct SolarSchedule {
    int L = 0, Q = 0, T = 0;
    std::vector<double> yield_kwh;           // [l][q_install][q][t]
    std::vector<double> bmin_kwh, bmax_kwh;  // [l][q_install][q]
    double yield(int l, int q_install, int q, int t) const {
        return yield_kwh[(((static_cast<size_t>(l) * Q + (q_install - 1)) * Q + (q - 1)) * T + (t - 1))];
    }
    double bmin(int l, int q_install, int q) const {
        return bmin_kwh[((static_cast<size_t>(l) * Q + (q_install - 1)) * Q + (q - 1))];
    }
    double bmax(int l, int q_install, int q) const {
        return bmax_kwh[((static_cast<size_t>(l) * Q + (q_install - 1)) * Q + (q - 1))];
    }
};

struct Tables {
    CoverageTable coverage;
    DemandTable demand;
    SolarSchedule solar;
};

// Bandwidth used for E^T at site j (see DemandTable).
double site_bandwidth_mhz(const PlanningInstance& inst, int j);

// Parallel builder (OpenMP across (q,t) slices) and the serial reference.
// Both produce identical tables.
Tables build_tables(const PlanningInstance& inst);
Tables build_tables_serial(const PlanningInstance& inst);

} // namespace greenplan
