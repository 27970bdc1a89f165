// Demand/coverage model evaluation and table construction.
#include "greenplan/tables.hpp"

#include <cmath>
#include <stdexcept>

#include "greenplan/units.hpp"

namespace greenplan {

double channel_gain(double antenna_gain, double propagation_coefficient, double distance_m) {
    if (distance_m <= 0.0) throw std::invalid_argument("channel_gain: distance is zero or negative");
    return antenna_gain / std::pow(distance_m, propagation_coefficient);
}

double max_bitrate_mbps(double bandwidth_mhz, double transmit_w, double gain, double noise_w) {
    if (noise_w <= 0.0) throw std::invalid_argument("max_bitrate_mbps: noise must be positive");
    if (transmit_w <= 0.0) return 0.0;
    return bandwidth_mhz * std::log2(1.0 + transmit_w * gain / noise_w);
}

double required_transmit_w(double rate_mbps, double bandwidth_mhz, double gain, double noise_w) {
    if (noise_w <= 0.0) throw std::invalid_argument("required_transmit_w: noise must be positive");
    if (bandwidth_mhz <= 0.0) throw std::invalid_argument("required_transmit_w: bandwidth must be positive");
    if (rate_mbps <= 0.0) return 0.0;
    return noise_w / gain * (std::exp2(rate_mbps / bandwidth_mhz) - 1.0);
}

double demand_rate_mbps(const PlanningInstance& inst, int i, int q, int t) {
    return inst.test_points[i].peak_rate_by_year[q - 1] * inst.traffic_profile[t - 1];
}

double demand_energy_kwh(const PlanningInstance& inst, int i, int j, int q, int t,
                         double bandwidth_mhz) {
    const double gain = channel_gain(inst.econ.antenna_gain, inst.econ.propagation_coefficient,
                                     inst.distance(i, j));
    const double w = required_transmit_w(demand_rate_mbps(inst, i, q, t), bandwidth_mhz, gain,
                                         inst.econ.channel_noise_w);
    return energy_kwh(w, inst.period_hours[t - 1]);
}

double solar_yield_kwh(const PlanningInstance& inst, int l, int q_install, int q, int t) {
    const BsTypeSpec& b = inst.bs_types[l];
    if (!b.solar) return 0.0;
    if (q < q_install) throw std::invalid_argument("solar_yield_kwh: year precedes installation");
    const double aging = std::pow(1.0 - b.panel_aging_rate, q - q_install);
    return energy_kwh(b.panel_area_eff_m2 * inst.illumination_wm2[t - 1] * aging,
                      inst.period_hours[t - 1]);
}

BatteryBounds battery_bounds(const PlanningInstance& inst, int l, int q_install, int q) {
    const BsTypeSpec& b = inst.bs_types[l];
    if (!b.solar) return {0.0, 0.0};
    if (q < q_install) throw std::invalid_argument("battery_bounds: year precedes installation");
    const int age = (q - q_install) % b.battery_lifetime_years;
    const double bmax = b.battery_capacity_kwh * std::pow(1.0 - b.battery_aging_rate, age);
    return {b.battery_min_fraction * bmax, bmax};
}

double site_bandwidth_mhz(const PlanningInstance& inst, int j) {
    if (inst.is_existing(j)) return inst.bs_types[0].bandwidth_mhz;
    double bw = 0.0;
    for (int l = 1; l < inst.num_types(); ++l)
        if (inst.is_allowed(l, j) && (bw == 0.0 || inst.bs_types[l].bandwidth_mhz < bw))
            bw = inst.bs_types[l].bandwidth_mhz;
    return bw > 0.0 ? bw : inst.bs_types[0].bandwidth_mhz;
}

namespace {

// Fills one (q,t) slice of every table; the slice layout keeps writes disjoint
// so the parallel and serial builders are trivially identical.
void fill_slice(const PlanningInstance& inst, Tables& out, int q, int t) {
    const int I = inst.num_test_points(), J = inst.num_sites(), L = inst.num_types();
    const int Q = inst.Q(), T = inst.T();
    const int Smax = out.coverage.Smax;

    for (int i = 0; i < I; ++i) {
        const double rho = demand_rate_mbps(inst, i, q, t);
        out.demand.rate_mbps[(static_cast<size_t>(i) * Q + (q - 1)) * T + (t - 1)] = rho;
        for (int j = 0; j < J; ++j) {
            out.demand.energy_kwh[((static_cast<size_t>(i) * J + j) * Q + (q - 1)) * T + (t - 1)] =
                demand_energy_kwh(inst, i, j, q, t, site_bandwidth_mhz(inst, j));
            const double gain = channel_gain(inst.econ.antenna_gain,
                                             inst.econ.propagation_coefficient, inst.distance(i, j));
            for (int l = 0; l < L; ++l) {
                const BsTypeSpec& b = inst.bs_types[l];
                for (int s = 0; s < Smax; ++s) {
                    std::uint8_t k = 0;
                    if (s < static_cast<int>(b.states.size())) {
                        const double cap = max_bitrate_mbps(b.bandwidth_mhz, b.states[s].transmit_w,
                                                            gain, inst.econ.channel_noise_w);
                        k = rho <= cap ? 1 : 0;
                    }
                    out.coverage.data[((((static_cast<size_t>(i) * J + j) * L + l) * Smax + s) * Q +
                                       (q - 1)) * T + (t - 1)] = k;
                }
            }
        }
    }

    for (int l = 0; l < L; ++l) {
        if (!inst.bs_types[l].solar) continue;
        for (int qi = 1; qi <= q; ++qi) {
            out.solar.yield_kwh[(((static_cast<size_t>(l) * Q + (qi - 1)) * Q + (q - 1)) * T +
                                 (t - 1))] = solar_yield_kwh(inst, l, qi, q, t);
            if (t == 1) {
                const BatteryBounds bb = battery_bounds(inst, l, qi, q);
                out.solar.bmin_kwh[((static_cast<size_t>(l) * Q + (qi - 1)) * Q + (q - 1))] = bb.min_kwh;
                out.solar.bmax_kwh[((static_cast<size_t>(l) * Q + (qi - 1)) * Q + (q - 1))] = bb.max_kwh;
            }
        }
    }
}

Tables make_empty(const PlanningInstance& inst) {
    Tables out;
    const int I = inst.num_test_points(), J = inst.num_sites(), L = inst.num_types();
    const int Q = inst.Q(), T = inst.T();
    int smax = 0;
    for (const auto& b : inst.bs_types) smax = std::max(smax, static_cast<int>(b.states.size()));
    out.coverage = CoverageTable{I, J, L, smax, Q, T, {}};
    out.coverage.data.assign(static_cast<size_t>(I) * J * L * smax * Q * T, 0);
    out.demand = DemandTable{I, J, Q, T, {}, {}};
    out.demand.rate_mbps.assign(static_cast<size_t>(I) * Q * T, 0.0);
    out.demand.energy_kwh.assign(static_cast<size_t>(I) * J * Q * T, 0.0);
    out.solar = SolarSchedule{L, Q, T, {}, {}, {}};
    out.solar.yield_kwh.assign(static_cast<size_t>(L) * Q * Q * T, 0.0);
    out.solar.bmin_kwh.assign(static_cast<size_t>(L) * Q * Q, 0.0);
    out.solar.bmax_kwh.assign(static_cast<size_t>(L) * Q * Q, 0.0);
    return out;
}

} // namespace

Tables build_tables(const PlanningInstance& inst) {
    Tables out = make_empty(inst);
    const int Q = inst.Q(), T = inst.T();
#pragma omp parallel for schedule(static)
    for (int qt = 0; qt < Q * T; ++qt) fill_slice(inst, out, qt / T + 1, qt % T + 1);
    return out;
}

Tables build_tables_serial(const PlanningInstance& inst) {
    Tables out = make_empty(inst);
    for (int q = 1; q <= inst.Q(); ++q)
        for (int t = 1; t <= inst.T(); ++t) fill_slice(inst, out, q, t);
    return out;
}

} // namespace greenplan
