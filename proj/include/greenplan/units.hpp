// Unit conventions shared across the library: energies in kWh, powers in W,
// durations in hours, rates in Mbps, bandwidths in MHz, emissions in kg CO2,
// taxes in $ per ton CO2.
#pragma once

namespace greenplan {

inline constexpr double kwh_per_wh = 1e-3;
inline constexpr double tons_per_kg = 1e-3;

// Energy in kWh drawn by a constant load of `watts` over `hours`.
inline constexpr double energy_kwh(double watts, double hours) {
    return watts * hours * kwh_per_wh;
}

// $/kWh adder implied by a carbon tax in $/ton and an emission factor in kg/kWh.
inline constexpr double tax_per_kwh(double tax_per_ton, double kg_per_kwh) {
    return tax_per_ton * kg_per_kwh * tons_per_kg;
}

} // namespace greenplan
